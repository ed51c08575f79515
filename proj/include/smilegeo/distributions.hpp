#pragma once

#include "smilegeo/bsm.hpp"

#include <span>
#include <string>
#include <variant>
#include <vector>

namespace smilegeo {

// The five analytic families with closed-form call prices.
struct LogNormal {
    double mu;
    double s;
};
struct Gamma {
    double kappa;
    double theta;
};
struct Normal {
    double mu;
    double s;
};
/// Unit-scale Student's t translated to mu.
struct StudentT {
    double mu;
    double nu;
};
struct Uniform {
    double a;
    double b;
};

using DistributionSpec = std::variant<LogNormal, Gamma, Normal, StudentT, Uniform>;

/// Sampled density on an ascending strike grid. mass_below_zero is P(0) for
/// families whose support extends below zero.
struct DensityCurve {
    std::vector<double> strikes;
    std::vector<double> values;
    double mass_below_zero = 0.0;

    /// Trapezoid integral in strike.
    double mass() const;
    /// Trapezoid integral in log-strike of value * strike.
    double log_mass() const;
    std::size_t negative_count() const;
};

namespace dist {

std::string name(const DistributionSpec& spec);

/// Throws InvalidArgument for parameters outside the family's domain.
void validate(const DistributionSpec& spec);

double pdf(const DistributionSpec& spec, double x);
double cdf(const DistributionSpec& spec, double x);
/// 1 - cdf, evaluated directly for upper-tail precision.
double sf(const DistributionSpec& spec, double x);
double mean(const DistributionSpec& spec);
double quantile(const DistributionSpec& spec, double p);

/// e^{-rT} E[(S_T - K)^+]. Throws InconsistentForward unless mean == forward.
double call_price(const DistributionSpec& spec, const MarketState& ms, double strike);
/// e^{-rT} E[(K - S_T)^+], evaluated from its own closed form (no parity
/// subtraction) so out-of-the-money puts keep full relative precision.
double put_price(const DistributionSpec& spec, const MarketState& ms, double strike);

/// The out-of-the-money side relative to the forward, with its price.
struct OtmQuote {
    OptionSide side;
    double price;
};
OtmQuote otm_price(const DistributionSpec& spec, const MarketState& ms, double strike);

/// Tabulated straddle-neutral strikes: e^{mu+s^2} for log-normal, mu for the
/// normal and Student families, a + (b-a)/sqrt(2) for the uniform. The gamma
/// family has no closed form and is root-solved on its implied smile.
double atm_rn(const DistributionSpec& spec, const MarketState& ms);

/// Strikes at which the family's implied vol exists: the open interval
/// (a, b) shrunk by 1e-6 (b - a) for the uniform, (0, inf) otherwise.
struct StrikeRange {
    double lo;
    double hi;
};
StrikeRange quotable_range(const DistributionSpec& spec);

/// Market with spot chosen so that forward == mean(spec).
MarketState consistent_market(const DistributionSpec& spec, double dom_rate, double for_rate,
                              double tenor);

/// Throws InconsistentForward unless |mean - forward| <= 1e-9 forward.
void check_forward(const DistributionSpec& spec, const MarketState& ms);

DensityCurve density_curve(const DistributionSpec& spec, std::span<const double> strikes);

}  // namespace dist

/// p(x) -> p(ln y) / y on y = e^x. The input grid is taken on the real line.
DensityCurve support_transform_exp(const DensityCurve& curve);

}  // namespace smilegeo
