#include "smilegeo/smile.hpp"

#include "smilegeo/errors.hpp"
#include "smilegeo/spline.hpp"

#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>

namespace smilegeo {

namespace {

constexpr double kDomainSlack = 1e-12;

double solve_log_strike(const std::function<double(double)>& f, double lo, double hi, double f_lo,
                        double f_hi) {
    if (f_lo == 0.0) return lo;
    if (f_hi == 0.0) return hi;
    boost::uintmax_t iters = 200;
    const auto [a, b] = boost::math::tools::toms748_solve(
        f, lo, hi, f_lo, f_hi, boost::math::tools::eps_tolerance<double>(52), iters);
    return 0.5 * (a + b);
}

// First sign change of f on [lo, hi], scanning n cells.
bool bracket_scan(const std::function<double(double)>& f, double lo, double hi, int n, double& a,
                  double& b, double& fa, double& fb) {
    double x0 = lo;
    double f0 = f(x0);
    for (int i = 1; i <= n; ++i) {
        const double x1 = i == n ? hi : lo + (hi - lo) * i / n;
        const double f1 = f(x1);
        if (std::isfinite(f0) && std::isfinite(f1) && (f0 == 0.0 || f0 * f1 <= 0.0)) {
            a = x0;
            b = x1;
            fa = f0;
            fb = f1;
            return true;
        }
        x0 = x1;
        f0 = f1;
    }
    return false;
}

}  // namespace

SmileCurve::SmileCurve(MarketState market, StrikeInterval domain, StrikeFn fn)
    : market_(market), domain_(domain), fn_(std::move(fn)) {
    market_.validate();
    if (!(domain_.lo > 0.0) || !(domain_.hi > domain_.lo)) {
        throw Error(ErrorKind::InvalidArgument, "smile domain must satisfy 0 < lo < hi");
    }
    if (!(market_.tenor > 0.0)) {
        throw Error(ErrorKind::DegenerateTenor, "smile needs a positive tenor");
    }
}

bool SmileCurve::contains(double strike) const {
    return strike >= domain_.lo * (1.0 - kDomainSlack) && strike <= domain_.hi * (1.0 + kDomainSlack);
}

SmilePoint SmileCurve::at(double strike) const {
    if (!contains(strike)) {
        throw Error(ErrorKind::DomainTooNarrow, "strike " + std::to_string(strike) +
                                                    " outside smile domain [" +
                                                    std::to_string(domain_.lo) + ", " +
                                                    std::to_string(domain_.hi) + "]");
    }
    return fn_(strike);
}

SmilePoint SmileCurve::at_log(double log_strike) const { return at(std::exp(log_strike)); }

double SmileCurve::dvol_dk(double strike) const { return at(strike).dvol / strike; }

double SmileCurve::d2vol_dk2(double strike) const {
    const SmilePoint p = at(strike);
    return (p.d2vol - p.dvol) / (strike * strike);
}

StrikeInterval proxy_window(const MarketState& ms, double vol, double p_lo, double p_hi) {
    if (!(p_lo > 0.0 && p_lo < p_hi && p_hi < 1.0)) {
        throw Error(ErrorKind::InvalidArgument, "window probabilities must satisfy 0 < lo < hi < 1");
    }
    return {bsm::strike_from_forward_delta(ms, vol, p_lo),
            bsm::strike_from_forward_delta(ms, vol, p_hi)};
}

std::vector<double> log_grid(double lo, double hi, std::size_t n) {
    if (n < 2 || !(lo > 0.0) || !(hi > lo)) {
        throw Error(ErrorKind::InvalidArgument, "log grid needs n >= 2 and 0 < lo < hi");
    }
    std::vector<double> out(n);
    const double a = std::log(lo);
    const double step = (std::log(hi) - a) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) out[i] = std::exp(a + step * static_cast<double>(i));
    out.front() = lo;
    out.back() = hi;
    return out;
}

SmilePoint implied_vol_derivatives(const MarketState& ms, double strike, double vol,
                                   OptionSide side, double price_x, double price_xx) {
    const auto [d1, d2] = bsm::d1_d2(ms, strike, vol);
    const double sqrt_t = std::sqrt(ms.tenor);
    const double dk = ms.dom_discount() * strike;
    const double b_x = side == OptionSide::Call ? -dk * bsm::norm_cdf(d2) : dk * bsm::norm_cdf(-d2);
    const double n2 = bsm::norm_pdf(d2);
    const double b_xx = b_x + dk * n2 / (vol * sqrt_t);
    const double b_s = dk * n2 * sqrt_t;
    const double b_xs = dk * n2 * d1 / vol;
    const double b_ss = b_s * d1 * d2 / vol;
    const double dvol = (price_x - b_x) / b_s;
    const double d2vol = (price_xx - b_xx - 2.0 * b_xs * dvol - b_ss * dvol * dvol) / b_s;
    return {vol, dvol, d2vol};
}

DistributionSmile smile_from_distribution(const DistributionSpec& spec, const MarketState& ms,
                                          const GridSpec& grid, SmileBacking backing) {
    dist::check_forward(spec, ms);
    if (!(ms.tenor > 0.0)) {
        throw Error(ErrorKind::DegenerateTenor, "smile needs a positive tenor");
    }
    if (grid.points < 3) {
        throw Error(ErrorKind::InvalidArgument, "grid needs at least 3 points");
    }
    const dist::StrikeRange range = dist::quotable_range(spec);

    auto exact = [spec, ms](double k) -> SmilePoint {
        const dist::OtmQuote q = dist::otm_price(spec, ms, k);
        const double vol = bsm::implied_vol(ms, k, q.price, q.side);
        const double df = ms.dom_discount();
        const double density = df * dist::pdf(spec, k);
        const double slope = q.side == OptionSide::Call ? -df * dist::sf(spec, k)
                                                        : df * dist::cdf(spec, k);
        const double price_x = k * slope;
        const double price_xx = price_x + k * k * density;
        return implied_vol_derivatives(ms, k, vol, q.side, price_x, price_xx);
    };

    const double fwd = ms.forward();
    const double vol_f = exact(fwd).vol;
    StrikeInterval window = proxy_window(ms, vol_f, grid.p_lo, grid.p_hi);
    const double width = std::log(window.hi / window.lo);
    StrikeInterval domain{window.lo * std::exp(-grid.extension * width),
                          window.hi * std::exp(grid.extension * width)};
    domain.lo = std::max(domain.lo, range.lo);
    domain.hi = std::min(domain.hi, range.hi);
    // Fat-tailed families put less than p_lo of N(-d1) inside the flat-proxy
    // window; widen until the smile itself reaches the requested levels.
    auto n_minus_d1 = [&](double k) {
        return bsm::norm_cdf(-bsm::d1_d2(ms, k, exact(k).vol).d1);
    };
    for (int i = 0; i < 16 && domain.lo > range.lo && n_minus_d1(domain.lo) > 0.5 * grid.p_lo; ++i) {
        domain.lo = std::max(domain.lo * std::exp(-0.5 * width), range.lo);
    }
    for (int i = 0; i < 16 && domain.hi < range.hi && n_minus_d1(domain.hi) < 1.0 - 0.5 * (1.0 - grid.p_hi);
         ++i) {
        domain.hi = std::min(domain.hi * std::exp(0.5 * width), range.hi);
    }
    window.lo = std::max(window.lo, domain.lo);
    window.hi = std::min(window.hi, domain.hi);

    std::vector<double> strikes = log_grid(domain.lo, domain.hi, grid.points);
    if (backing == SmileBacking::Exact) {
        return {SmileCurve(ms, domain, exact), std::move(strikes), window};
    }
    std::vector<double> vols;
    vols.reserve(strikes.size());
    for (double k : strikes) vols.push_back(exact(k).vol);
    return {smile_from_samples(ms, strikes, vols), std::move(strikes), window};
}

SmileCurve smile_from_samples(const MarketState& ms, std::span<const double> strikes,
                              std::span<const double> vols) {
    if (strikes.size() != vols.size() || strikes.size() < 3) {
        throw Error(ErrorKind::InvalidArgument, "need at least 3 matching strike/vol samples");
    }
    std::vector<double> xs;
    xs.reserve(strikes.size());
    for (std::size_t i = 0; i < strikes.size(); ++i) {
        if (!(strikes[i] > 0.0) || !(vols[i] > 0.0)) {
            throw Error(ErrorKind::InvalidArgument, "sample strikes and vols must be positive");
        }
        xs.push_back(std::log(strikes[i]));
    }
    auto spline = std::make_shared<const CubicSpline>(xs, vols);
    return SmileCurve(ms, {strikes.front(), strikes.back()}, [spline](double k) {
        const CubicSpline::Eval e = (*spline)(std::log(k));
        return SmilePoint{e.value, e.d1, e.d2};
    });
}

SmileCurve flat_smile(const MarketState& ms, double vol, StrikeInterval domain) {
    if (!(vol > 0.0)) {
        throw Error(ErrorKind::NonpositiveVol, "flat smile needs a positive vol");
    }
    return SmileCurve(ms, domain, [vol](double) { return SmilePoint{vol, 0.0, 0.0}; });
}

DeltaAnchor strike_for_delta(const SmileCurve& smile, double target, DeltaConvention conv) {
    if (!(target > 0.0 && target < 1.0)) {
        throw Error(ErrorKind::InvalidArgument, "delta target must lie in (0, 1)");
    }
    const MarketState& ms = smile.market();
    const double n_target =
        conv == DeltaConvention::ForwardN ? target : target / ms.for_discount();
    if (!(n_target < 1.0)) {
        throw Error(ErrorKind::TargetOutsideDomain, "spot delta target exceeds e^{-qT}");
    }
    auto g = [&](double x) {
        const double k = std::exp(x);
        const double vol = smile.at(k).vol;
        return bsm::norm_cdf(-bsm::d1_d2(ms, k, vol).d1) - n_target;
    };
    const double lo = std::log(smile.domain().lo);
    const double hi = std::log(smile.domain().hi);
    double a = lo, b = hi, fa = g(lo), fb = g(hi);
    if (!(std::isfinite(fa) && std::isfinite(fb) && fa * fb <= 0.0)) {
        if (!bracket_scan(g, lo, hi, 256, a, b, fa, fb)) {
            throw Error(ErrorKind::TargetOutsideDomain,
                        "delta target " + std::to_string(target) + " not bracketed in smile domain");
        }
    }
    const double x = solve_log_strike(g, a, b, fa, fb);
    const double k = std::exp(x);
    return {target, k, smile.at(k).vol};
}

double atm_rn_from_smile(const SmileCurve& smile) {
    const MarketState& ms = smile.market();
    auto f = [&](double x) {
        const double k = std::exp(x);
        return bsm::d1_d2(ms, k, smile.at(k).vol).d1;
    };
    const double lo = std::log(smile.domain().lo);
    const double hi = std::log(smile.domain().hi);
    double a = lo, b = hi, fa = f(lo), fb = f(hi);
    if (!(fa * fb <= 0.0)) {
        if (!bracket_scan(f, lo, hi, 256, a, b, fa, fb)) {
            throw Error(ErrorKind::NoConvergence, "straddle-neutral strike not bracketed in smile domain");
        }
    } else {
        // Narrow the bracket around the forward first; d1 > 0 there.
        const double xf = std::clamp(std::log(ms.forward()), lo, hi);
        const double ff = f(xf);
        if (ff > 0.0 && fb < 0.0) {
            a = xf;
            fa = ff;
        }
    }
    return std::exp(solve_log_strike(f, a, b, fa, fb));
}

namespace {

SmilePoint point_for_density(const SmileCurve& smile, double strike, const DensityOptions& opts) {
    if (opts.mode == DensityMode::Analytic) return smile.at(strike);
    const double h = opts.fd_step;
    if (!(h > 0.0)) throw Error(ErrorKind::InvalidArgument, "finite-difference step must be positive");
    const double x = std::log(strike);
    const double lo = std::exp(x - h);
    const double hi = std::exp(x + h);
    if (!smile.contains(lo) || !smile.contains(hi)) {
        throw Error(ErrorKind::DomainTooNarrow,
                    "finite-difference stencil at K=" + std::to_string(strike) + " leaves the smile domain");
    }
    const double s0 = smile.at(strike).vol;
    const double sm = smile.at(lo).vol;
    const double sp = smile.at(hi).vol;
    return {s0, (sp - sm) / (2.0 * h), (sp - 2.0 * s0 + sm) / (h * h)};
}

void require_inside(const SmileCurve& smile, std::span<const double> strikes) {
    for (double k : strikes) {
        if (!smile.contains(k)) {
            throw Error(ErrorKind::DomainTooNarrow,
                        "output strike " + std::to_string(k) + " outside smile domain");
        }
    }
}

}  // namespace

double density_bracket(const SmileCurve& smile, double strike, const DensityOptions& opts) {
    const MarketState& ms = smile.market();
    const SmilePoint p = point_for_density(smile, strike, opts);
    if (!std::isfinite(p.vol)) return std::numeric_limits<double>::quiet_NaN();
    const auto [d1, d2] = bsm::d1_d2(ms, strike, p.vol);
    const double t = ms.tenor;
    const double s1 = p.dvol / strike;
    const double s2 = (p.d2vol - p.dvol) / (strike * strike);
    return 1.0 + 2.0 * strike * std::sqrt(t) * d1 * s1 +
           strike * strike * t * (d1 * d2 * s1 * s1 + p.vol * s2);
}

DensityCurve density_from_smile(const SmileCurve& smile, std::span<const double> strikes,
                                const DensityOptions& opts) {
    require_inside(smile, strikes);
    const MarketState& ms = smile.market();
    DensityCurve out;
    out.strikes.assign(strikes.begin(), strikes.end());
    out.values.reserve(strikes.size());
    for (double k : strikes) {
        const double vol = point_for_density(smile, k, opts).vol;
        if (!std::isfinite(vol)) {
            out.values.push_back(std::numeric_limits<double>::quiet_NaN());
            continue;
        }
        const double d2 = bsm::d1_d2(ms, k, vol).d2;
        const double bracket = density_bracket(smile, k, opts);
        out.values.push_back(bracket * bsm::norm_pdf(d2) / (k * vol * std::sqrt(ms.tenor)));
    }
    return out;
}

DensityCurve log_strike_density(const SmileCurve& smile, std::span<const double> strikes,
                                const DensityOptions& opts) {
    require_inside(smile, strikes);
    const MarketState& ms = smile.market();
    const double t = ms.tenor;
    const double sqrt_t = std::sqrt(t);
    DensityCurve out;
    out.strikes.assign(strikes.begin(), strikes.end());
    out.values.reserve(strikes.size());
    for (double k : strikes) {
        const SmilePoint p = point_for_density(smile, k, opts);
        if (!std::isfinite(p.vol)) {
            out.values.push_back(std::numeric_limits<double>::quiet_NaN());
            continue;
        }
        const auto [d1, d2] = bsm::d1_d2(ms, k, p.vol);
        const double bracket = 1.0 + sqrt_t * (d1 + d2) * p.dvol + t * d1 * d2 * p.dvol * p.dvol +
                               t * p.vol * p.d2vol;
        out.values.push_back(bracket * std::exp(-0.5 * d2 * d2) /
                             (k * p.vol * std::sqrt(2.0 * std::numbers::pi * t)));
    }
    return out;
}

double nonnegativity_margin(const SmileCurve& smile, std::span<const double> strikes,
                            const DensityOptions& opts) {
    require_inside(smile, strikes);
    double margin = std::numeric_limits<double>::infinity();
    for (double k : strikes) margin = std::min(margin, density_bracket(smile, k, opts));
    return margin;
}

}  // namespace smilegeo
