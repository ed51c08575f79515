#include "smilegeo/bsm.hpp"

#include "smilegeo/errors.hpp"

#include <boost/math/special_functions/erf.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace smilegeo {

double MarketState::forward() const {
    return spot * std::exp((dom_rate - for_rate) * tenor);
}

double MarketState::dom_discount() const { return std::exp(-dom_rate * tenor); }

double MarketState::for_discount() const { return std::exp(-for_rate * tenor); }

void MarketState::validate() const {
    if (!(spot > 0.0) || !std::isfinite(spot)) {
        throw Error(ErrorKind::InvalidArgument, "spot must be positive and finite");
    }
    if (!(tenor >= 0.0) || !std::isfinite(tenor)) {
        throw Error(ErrorKind::InvalidArgument, "tenor must be non-negative and finite");
    }
    if (!std::isfinite(dom_rate) || !std::isfinite(for_rate)) {
        throw Error(ErrorKind::InvalidArgument, "rates must be finite");
    }
}

namespace bsm {

namespace {

constexpr double kVolLo = 1e-6;
constexpr double kVolHi = 5.0;
constexpr int kMaxIter = 100;

void require_strike(double strike) {
    if (!(strike > 0.0) || !std::isfinite(strike)) {
        throw Error(ErrorKind::InvalidArgument, "strike must be positive and finite");
    }
}

}  // namespace

double norm_pdf(double x) {
    return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

double norm_cdf(double x) {
    return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

double norm_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) {
        throw Error(ErrorKind::InvalidArgument, "quantile probability must lie in (0, 1)");
    }
    return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
}

D1D2 d1_d2(const MarketState& ms, double strike, double vol) {
    ms.validate();
    require_strike(strike);
    if (ms.tenor == 0.0 || vol == 0.0) {
        throw Error(ErrorKind::DegenerateTenor, "d1/d2 undefined for zero tenor or zero vol");
    }
    if (!(vol > 0.0)) {
        throw Error(ErrorKind::InvalidArgument, "vol must be positive");
    }
    const double sd = vol * std::sqrt(ms.tenor);
    const double d1 =
        (std::log(ms.spot / strike) + (ms.dom_rate - ms.for_rate + 0.5 * vol * vol) * ms.tenor) / sd;
    return {d1, d1 - sd};
}

double price(const MarketState& ms, double strike, double vol, OptionSide side) {
    ms.validate();
    require_strike(strike);
    if (!(vol >= 0.0)) {
        throw Error(ErrorKind::InvalidArgument, "vol must be non-negative");
    }
    const double df_dom = ms.dom_discount();
    if (ms.tenor == 0.0 || vol == 0.0) {
        const double fwd = ms.forward();
        const double payoff = side == OptionSide::Call ? std::max(fwd - strike, 0.0)
                                                       : std::max(strike - fwd, 0.0);
        return df_dom * payoff;
    }
    const auto [d1, d2] = d1_d2(ms, strike, vol);
    const double df_for = ms.for_discount();
    if (side == OptionSide::Call) {
        return df_for * ms.spot * norm_cdf(d1) - df_dom * strike * norm_cdf(d2);
    }
    return df_dom * strike * norm_cdf(-d2) - df_for * ms.spot * norm_cdf(-d1);
}

double delta(const MarketState& ms, double strike, double vol, OptionSide side) {
    const auto [d1, d2] = d1_d2(ms, strike, vol);
    const double df_for = ms.for_discount();
    return side == OptionSide::Call ? df_for * norm_cdf(d1) : -df_for * norm_cdf(-d1);
}

double vega(const MarketState& ms, double strike, double vol) {
    const auto [d1, d2] = d1_d2(ms, strike, vol);
    return ms.for_discount() * ms.spot * norm_pdf(d1) * std::sqrt(ms.tenor);
}

double implied_vol(const MarketState& ms, double strike, double observed_price, OptionSide side) {
    ms.validate();
    require_strike(strike);
    const double df = ms.dom_discount();
    const double fwd = ms.forward();
    const double lower = side == OptionSide::Call ? df * std::max(fwd - strike, 0.0)
                                                  : df * std::max(strike - fwd, 0.0);
    const double upper = side == OptionSide::Call ? df * fwd : df * strike;
    if (!(observed_price > lower && observed_price < upper) || ms.tenor == 0.0) {
        throw Error(ErrorKind::PriceOutOfBand,
                    "price " + std::to_string(observed_price) + " outside no-arbitrage band (" +
                        std::to_string(lower) + ", " + std::to_string(upper) + ")");
    }

    auto objective = [&](double v) { return price(ms, strike, v, side) - observed_price; };

    double lo = kVolLo;
    double hi = kVolHi;
    const double f_lo = objective(lo);
    const double f_hi = objective(hi);
    if (f_lo > 0.0 || f_hi < 0.0) {
        throw Error(ErrorKind::NoConvergence, "implied vol outside [1e-6, 5]");
    }
    if (f_lo == 0.0) return lo;
    if (f_hi == 0.0) return hi;

    // Initial guess from the log-moneyness, clipped into the bracket.
    const double log_m = std::abs(std::log(fwd / strike));
    double vol = std::clamp(std::sqrt(2.0 * log_m / ms.tenor), 0.05, 1.0);
    for (int iter = 0; iter < kMaxIter; ++iter) {
        const double f = objective(vol);
        if (f == 0.0) return vol;
        if (f < 0.0) {
            lo = vol;
        } else {
            hi = vol;
        }
        const double v = vega(ms, strike, vol);
        double next = vol - f / v;
        if (!(v > 0.0) || !std::isfinite(next) || next <= lo || next >= hi) {
            next = 0.5 * (lo + hi);
        }
        const double step = std::abs(next - vol);
        vol = next;
        if (step <= 4.0 * std::numeric_limits<double>::epsilon() * vol ||
            hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * vol) {
            return vol;
        }
    }
    throw Error(ErrorKind::NoConvergence, "implied vol iteration cap reached");
}

double identity_residual(const MarketState& ms, double strike, double vol) {
    const auto [d1, d2] = d1_d2(ms, strike, vol);
    const double lhs = ms.spot * ms.for_discount() * norm_pdf(d1);
    const double rhs = strike * ms.dom_discount() * norm_pdf(d2);
    return std::abs(lhs - rhs);
}

double atm_rn_lognormal(const MarketState& ms, double vol) {
    ms.validate();
    if (!(vol >= 0.0)) {
        throw Error(ErrorKind::InvalidArgument, "vol must be non-negative");
    }
    return ms.spot * std::exp((ms.dom_rate - ms.for_rate + 0.5 * vol * vol) * ms.tenor);
}

double strike_from_forward_delta(const MarketState& ms, double vol, double put_delta_target) {
    const double z = norm_quantile(put_delta_target);
    const double sd = vol * std::sqrt(ms.tenor);
    return ms.forward() * std::exp(0.5 * sd * sd + z * sd);
}

}  // namespace bsm
}  // namespace smilegeo
