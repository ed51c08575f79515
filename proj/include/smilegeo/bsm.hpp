#pragma once

#include <utility>

namespace smilegeo {

/// Spot, continuously-compounded domestic/foreign rates and tenor in years.
struct MarketState {
    double spot = 1.0;
    double dom_rate = 0.0;
    double for_rate = 0.0;
    double tenor = 1.0;

    double forward() const;
    double dom_discount() const;  // e^{-rT}
    double for_discount() const;  // e^{-qT}

    /// Throws InvalidArgument unless spot > 0, tenor >= 0 and rates finite.
    void validate() const;
};

enum class OptionSide { Call, Put };

/// How delta targets are quoted.
///   ForwardN  - targets are N(-d1) values (put delta times e^{qT})
///   SpotPips  - targets are raw |put delta| = e^{-qT} N(-d1)
enum class DeltaConvention { ForwardN, SpotPips };

namespace bsm {

double norm_pdf(double x);
double norm_cdf(double x);
/// Inverse of norm_cdf on (0, 1).
double norm_quantile(double p);

struct D1D2 {
    double d1;
    double d2;
};

/// Throws DegenerateTenor when tenor or vol is zero.
D1D2 d1_d2(const MarketState& ms, double strike, double vol);

/// Discounted BSM price. Zero tenor or zero vol collapse to the discounted
/// forward intrinsic value.
double price(const MarketState& ms, double strike, double vol, OptionSide side);

/// Spot delta: e^{-qT} N(d1) for calls, e^{-qT} (N(d1) - 1) for puts.
double delta(const MarketState& ms, double strike, double vol, OptionSide side);

/// dPrice/dvol (identical for calls and puts).
double vega(const MarketState& ms, double strike, double vol);

/// Solves price(ms, strike, vol, side) == observed_price for vol.
/// Bracketed Newton on [1e-6, 5] with bisection fallback, 100 iterations at most.
double implied_vol(const MarketState& ms, double strike, double observed_price, OptionSide side);

/// |S0 e^{-qT} n(d1) - K e^{-rT} n(d2)|.
double identity_residual(const MarketState& ms, double strike, double vol);

/// Strike zeroing the straddle delta for a flat smile: S0 e^{(r - q + vol^2/2) T}.
double atm_rn_lognormal(const MarketState& ms, double vol);

/// Strike at which N(-d1(K; vol)) equals put_delta_target (flat vol).
double strike_from_forward_delta(const MarketState& ms, double vol, double put_delta_target);

}  // namespace bsm
}  // namespace smilegeo
