#pragma once

#include "smilegeo/distributions.hpp"
#include "smilegeo/georep.hpp"

#include <optional>
#include <vector>

namespace smilegeo {

/// Euclidean curvature with the (x'^2 + y'^2)^{3/2} denominator, NaN where
/// masked. Derivatives are taken in the curve's polar angle with seven-point
/// stencils; the three points at each end are masked. Third differences lose
/// accuracy to rounding on dense grids, so a few hundred points work best.
/// Throws CurveTooShort below 7 points.
std::vector<double> euclidean_curvature(const RepresentationCurve& curve);

/// 3 (x'x'' + y'y'')/W - (x'y''' - y'x''') (x'^2 + y'^2)/W^2 with
/// W = x'y'' - y'x''; NaN where masked or |W| <= 1e-12. Throws CurveTooShort
/// below 9 points.
std::vector<double> similarity_curvature(const RepresentationCurve& curve);

struct CurvatureProfile {
    std::vector<double> strikes;
    std::vector<double> angle;        // polar angle about `center`
    std::vector<double> n_minus_d1;   // N(-d1(K, sigma(K)))
    std::vector<double> kappa_e;
    std::vector<double> kappa_s;
    std::vector<bool> valid;
    Point2 center;
};

/// Both curvatures against the angle about `center` (default: origin) and N(-d1).
CurvatureProfile curvature_profile(const RepresentationCurve& curve,
                                   std::optional<Point2> center = std::nullopt);

struct DivergenceReport {
    double kl_nats;
    double clamped_fraction;
    std::size_t clamped_count;
    bool pseudo;
    std::vector<double> grid;
};

struct KlOptions {
    std::size_t nodes = 4001;
    double clamp_floor = 1e-50;
    /// Optional restriction of the common grid.
    std::optional<StrikeInterval> window;
};

/// Trapezoid KL(p || q) in nats on a uniform ln K grid over the common support.
/// Both curves are interpolated linearly in ln K and renormalized on the grid;
/// q values <= clamp_floor or non-finite are clamped and flagged.
DivergenceReport kl_divergence(const DensityCurve& p, const DensityCurve& q, const KlOptions& opts = {});

/// KL-optimal log-normal: mu = E[ln X], s^2 = Var[ln X] under p on its grid.
/// Throws DegenerateMass if the grid mass is below 0.99.
LogNormal best_lognormal(const DensityCurve& p);

}  // namespace smilegeo
