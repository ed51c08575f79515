#pragma once

#include "smilegeo/analysis.hpp"
#include "smilegeo/shape_fit.hpp"
#include "smilegeo/vanna_volga.hpp"

#include <optional>
#include <string>
#include <vector>

namespace smilegeo {

struct StudyOptions {
    RepresentationConfig representation = RepresentationConfig::automatic();
    FitOptions fit;
    VannaVolgaVariant vanna_volga = VannaVolgaVariant::PriceBased;
    GridSpec grid;
    /// Comparison window in N(-d1) of the reference smile.
    double window_lo = 0.01;
    double window_hi = 0.99;
    std::size_t kl_nodes = 4001;
    DensityOptions density;
};

/// One reconstructed density compared with the reference.
struct ModelResult {
    std::string name;
    bool ok = false;
    std::string error;
    DensityCurve density;
    DivergenceReport divergence{};
    double margin = 0.0;  // min density bracket on the window (smile models)
};

struct DistributionStudy {
    DistributionSpec spec;
    MarketState market;
    StrikeInterval window;
    std::vector<double> window_grid;
    DensityCurve reference;
    std::optional<CircleFit> circle;
    std::optional<EllipseFit> ellipse;
    std::optional<ThreeQuoteSmile> quotes;
    LogNormal lognormal{};
    std::vector<ModelResult> models;  // circle, ellipse, vanna-volga, lognormal

    const ModelResult& model(const std::string& name) const;
};

/// The reference smile of `spec`, circle, ellipse and vanna-volga smiles from
/// its anchors, and the KL-best log-normal, each turned into a density on the
/// window grid and compared with the true pdf.
DistributionStudy study_distribution(const DistributionSpec& spec, const MarketState& ms,
                                     const StudyOptions& opts = {});

}  // namespace smilegeo
