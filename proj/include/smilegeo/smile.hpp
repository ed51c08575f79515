#pragma once

#include "smilegeo/bsm.hpp"
#include "smilegeo/distributions.hpp"

#include <functional>
#include <span>
#include <vector>

namespace smilegeo {

/// sigma and its first two derivatives with respect to ln K.
struct SmilePoint {
    double vol;
    double dvol;
    double d2vol;
};

struct StrikeInterval {
    double lo;
    double hi;
};

/// An evaluable smile sigma(K) on a strike domain. Immutable once built.
class SmileCurve {
public:
    /// Called with the strike; returns sigma and its ln K derivatives.
    using StrikeFn = std::function<SmilePoint(double strike)>;

    SmileCurve(MarketState market, StrikeInterval domain, StrikeFn fn);

    const MarketState& market() const { return market_; }
    const StrikeInterval& domain() const { return domain_; }

    /// Evaluation at strike K; throws DomainTooNarrow outside the domain.
    SmilePoint at(double strike) const;
    SmilePoint at_log(double log_strike) const;
    double vol(double strike) const { return at(strike).vol; }
    bool contains(double strike) const;

    /// Strike-space derivatives sigma'(K), sigma''(K).
    double dvol_dk(double strike) const;
    double d2vol_dk2(double strike) const;

private:
    MarketState market_;
    StrikeInterval domain_;
    StrikeFn fn_;
};

/// Strike-grid parameters: `points` nodes uniform in ln K spanning the
/// flat-proxy window N(-d1) in [p_lo, p_hi], extended by `extension` of the
/// window's log-width at each end.
struct GridSpec {
    std::size_t points = 2001;
    double p_lo = 0.005;
    double p_hi = 0.995;
    double extension = 0.1;
};

/// Strikes where N(-d1) = p_lo and p_hi under a flat smile at `vol`.
StrikeInterval proxy_window(const MarketState& ms, double vol, double p_lo, double p_hi);

/// n nodes uniform in ln K on [lo, hi].
std::vector<double> log_grid(double lo, double hi, std::size_t n);

/// Which smile representation smile_from_distribution returns.
///   Exact   - implied vol solved at every query; derivatives by implicit
///             differentiation of the closed-form price (uses cdf and pdf)
///   Spline  - natural cubic spline in (ln K, sigma) through the grid vols
enum class SmileBacking { Exact, Spline };

struct DistributionSmile {
    SmileCurve smile;
    std::vector<double> grid;  // the strike grid built from GridSpec
    StrikeInterval window;     // unextended proxy window
};

DistributionSmile smile_from_distribution(const DistributionSpec& spec, const MarketState& ms,
                                          const GridSpec& grid = {},
                                          SmileBacking backing = SmileBacking::Exact);

/// Grid-backed smile from sampled vols.
SmileCurve smile_from_samples(const MarketState& ms, std::span<const double> strikes,
                              std::span<const double> vols);

/// Constant-vol smile on [lo, hi].
SmileCurve flat_smile(const MarketState& ms, double vol, StrikeInterval domain);

/// Log-strike derivatives of the implied vol of a price curve P(x), x = ln K,
/// given P_x and P_xx and the vol already implied from P at K.
SmilePoint implied_vol_derivatives(const MarketState& ms, double strike, double vol,
                                   OptionSide side, double price_x, double price_xx);

struct DeltaAnchor {
    double target;
    double strike;
    double vol;
};

/// Solves N(-d1(K, sigma(K))) = target (ForwardN) or e^{-qT} N(-d1) = target
/// (SpotPips) inside the smile domain.
DeltaAnchor strike_for_delta(const SmileCurve& smile, double target, DeltaConvention conv);

/// Strike with d1(K, sigma(K)) = 0: the straddle-neutral strike of the smile.
double atm_rn_from_smile(const SmileCurve& smile);

enum class DensityMode { Analytic, FiniteDifference };

struct DensityOptions {
    DensityMode mode = DensityMode::Analytic;
    double fd_step = 1e-3;  // in ln K
};

/// p(K) from sigma(K) and its strike derivatives. Negative values are kept.
DensityCurve density_from_smile(const SmileCurve& smile, std::span<const double> strikes,
                                const DensityOptions& opts = {});

/// Same density through the log-strike form of the formula.
DensityCurve log_strike_density(const SmileCurve& smile, std::span<const double> strikes,
                                const DensityOptions& opts = {});

/// 1 + 2K sqrt(T) d1 sigma' + K^2 T (d1 d2 sigma'^2 + sigma sigma'') at K.
double density_bracket(const SmileCurve& smile, double strike, const DensityOptions& opts = {});

/// Minimum of density_bracket over the grid.
double nonnegativity_margin(const SmileCurve& smile, std::span<const double> strikes,
                            const DensityOptions& opts = {});

}  // namespace smilegeo
