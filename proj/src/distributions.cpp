#include "smilegeo/distributions.hpp"

#include "smilegeo/errors.hpp"

#include <boost/math/distributions/gamma.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace smilegeo {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

bool finite_all(std::initializer_list<double> xs) {
    return std::all_of(xs.begin(), xs.end(), [](double x) { return std::isfinite(x); });
}

double student_kernel_tail(const StudentT& d, double strike) {
    // A(K) = c nu/(nu-1) (1 + (mu-K)^2/nu)^{(1-nu)/2}: the partial first moment
    // about mu, i.e. integral_K^inf (x - mu) p(x) dx.
    const double nu = d.nu;
    const double c = std::exp(std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu)) /
                     std::sqrt(nu * std::numbers::pi);
    const double z = d.mu - strike;
    return c * nu / (nu - 1.0) * std::pow(1.0 + z * z / nu, 0.5 * (1.0 - nu));
}

// P(T > K) and P(T < K) for the translated t, via I_y(nu/2, 1/2).
double student_upper(const StudentT& d, double strike) {
    const double z = strike - d.mu;
    const double y = d.nu / (d.nu + z * z);
    const double half_tail = 0.5 * boost::math::ibeta(0.5 * d.nu, 0.5, y);
    return z >= 0.0 ? half_tail : 1.0 - half_tail;
}

double student_lower(const StudentT& d, double strike) {
    const double z = strike - d.mu;
    const double y = d.nu / (d.nu + z * z);
    const double half_tail = 0.5 * boost::math::ibeta(0.5 * d.nu, 0.5, y);
    return z <= 0.0 ? half_tail : 1.0 - half_tail;
}

}  // namespace

double DensityCurve::mass() const {
    double total = 0.0;
    for (std::size_t i = 1; i < strikes.size(); ++i) {
        total += 0.5 * (values[i] + values[i - 1]) * (strikes[i] - strikes[i - 1]);
    }
    return total;
}

double DensityCurve::log_mass() const {
    double total = 0.0;
    for (std::size_t i = 1; i < strikes.size(); ++i) {
        const double a = values[i - 1] * strikes[i - 1];
        const double b = values[i] * strikes[i];
        total += 0.5 * (a + b) * (std::log(strikes[i]) - std::log(strikes[i - 1]));
    }
    return total;
}

std::size_t DensityCurve::negative_count() const {
    return static_cast<std::size_t>(
        std::count_if(values.begin(), values.end(), [](double v) { return v < 0.0; }));
}

namespace dist {

std::string name(const DistributionSpec& spec) {
    return std::visit(overloaded{
                          [](const LogNormal&) { return std::string("lognormal"); },
                          [](const Gamma&) { return std::string("gamma"); },
                          [](const Normal&) { return std::string("normal"); },
                          [](const StudentT&) { return std::string("student"); },
                          [](const Uniform&) { return std::string("uniform"); },
                      },
                      spec);
}

void validate(const DistributionSpec& spec) {
    std::visit(overloaded{
                   [](const LogNormal& d) {
                       if (!finite_all({d.mu, d.s}) || !(d.s > 0.0)) {
                           throw Error(ErrorKind::InvalidArgument, "lognormal needs finite mu and s > 0");
                       }
                   },
                   [](const Gamma& d) {
                       if (!finite_all({d.kappa, d.theta}) || !(d.kappa > 0.0) || !(d.theta > 0.0)) {
                           throw Error(ErrorKind::InvalidArgument, "gamma needs kappa > 0 and theta > 0");
                       }
                   },
                   [](const Normal& d) {
                       if (!finite_all({d.mu, d.s}) || !(d.s > 0.0)) {
                           throw Error(ErrorKind::InvalidArgument, "normal needs finite mu and s > 0");
                       }
                   },
                   [](const StudentT& d) {
                       if (!finite_all({d.mu, d.nu}) || !(d.nu > 1.0)) {
                           throw Error(ErrorKind::InvalidArgument, "student needs finite mu and nu > 1");
                       }
                   },
                   [](const Uniform& d) {
                       if (!finite_all({d.a, d.b}) || !(d.a >= 0.0) || !(d.b > d.a)) {
                           throw Error(ErrorKind::InvalidArgument, "uniform needs 0 <= a < b");
                       }
                   },
               },
               spec);
}

double pdf(const DistributionSpec& spec, double x) {
    validate(spec);
    return std::visit(
        overloaded{
            [x](const LogNormal& d) {
                if (!(x > 0.0)) return 0.0;
                const double z = (std::log(x) - d.mu) / d.s;
                return std::exp(-0.5 * z * z) / (x * d.s * std::sqrt(2.0 * std::numbers::pi));
            },
            [x](const Gamma& d) {
                if (!(x > 0.0)) return 0.0;
                return boost::math::gamma_p_derivative(d.kappa, x / d.theta) / d.theta;
            },
            [x](const Normal& d) { return bsm::norm_pdf((x - d.mu) / d.s) / d.s; },
            [x](const StudentT& d) {
                const double nu = d.nu;
                const double z = x - d.mu;
                const double log_c = std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu) -
                                     0.5 * std::log(nu * std::numbers::pi);
                return std::exp(log_c - 0.5 * (nu + 1.0) * std::log1p(z * z / nu));
            },
            [x](const Uniform& d) { return (x >= d.a && x <= d.b) ? 1.0 / (d.b - d.a) : 0.0; },
        },
        spec);
}

double cdf(const DistributionSpec& spec, double x) {
    validate(spec);
    return std::visit(overloaded{
                          [x](const LogNormal& d) {
                              if (!(x > 0.0)) return 0.0;
                              return bsm::norm_cdf((std::log(x) - d.mu) / d.s);
                          },
                          [x](const Gamma& d) {
                              if (!(x > 0.0)) return 0.0;
                              return boost::math::gamma_p(d.kappa, x / d.theta);
                          },
                          [x](const Normal& d) { return bsm::norm_cdf((x - d.mu) / d.s); },
                          [x](const StudentT& d) { return student_lower(d, x); },
                          [x](const Uniform& d) {
                              return std::clamp((x - d.a) / (d.b - d.a), 0.0, 1.0);
                          },
                      },
                      spec);
}

double sf(const DistributionSpec& spec, double x) {
    validate(spec);
    return std::visit(overloaded{
                          [x](const LogNormal& d) {
                              if (!(x > 0.0)) return 1.0;
                              return bsm::norm_cdf((d.mu - std::log(x)) / d.s);
                          },
                          [x](const Gamma& d) {
                              if (!(x > 0.0)) return 1.0;
                              return boost::math::gamma_q(d.kappa, x / d.theta);
                          },
                          [x](const Normal& d) { return bsm::norm_cdf((d.mu - x) / d.s); },
                          [x](const StudentT& d) { return student_upper(d, x); },
                          [x](const Uniform& d) {
                              return std::clamp((d.b - x) / (d.b - d.a), 0.0, 1.0);
                          },
                      },
                      spec);
}

double mean(const DistributionSpec& spec) {
    validate(spec);
    return std::visit(overloaded{
                          [](const LogNormal& d) { return std::exp(d.mu + 0.5 * d.s * d.s); },
                          [](const Gamma& d) { return d.kappa * d.theta; },
                          [](const Normal& d) { return d.mu; },
                          [](const StudentT& d) { return d.mu; },
                          [](const Uniform& d) { return 0.5 * (d.a + d.b); },
                      },
                      spec);
}

double quantile(const DistributionSpec& spec, double p) {
    validate(spec);
    if (!(p > 0.0 && p < 1.0)) {
        throw Error(ErrorKind::InvalidArgument, "quantile probability must lie in (0, 1)");
    }
    return std::visit(
        overloaded{
            [p](const LogNormal& d) { return std::exp(d.mu + d.s * bsm::norm_quantile(p)); },
            [p](const Gamma& d) {
                return boost::math::quantile(boost::math::gamma_distribution<>(d.kappa, d.theta), p);
            },
            [p](const Normal& d) { return d.mu + d.s * bsm::norm_quantile(p); },
            [p](const StudentT& d) {
                return d.mu + boost::math::quantile(boost::math::students_t_distribution<>(d.nu), p);
            },
            [p](const Uniform& d) { return d.a + p * (d.b - d.a); },
        },
        spec);
}

void check_forward(const DistributionSpec& spec, const MarketState& ms) {
    ms.validate();
    const double m = mean(spec);
    const double fwd = ms.forward();
    if (!(std::abs(m - fwd) <= 1e-9 * fwd)) {
        throw Error(ErrorKind::InconsistentForward,
                    "distribution mean " + std::to_string(m) + " differs from forward " +
                        std::to_string(fwd));
    }
}

MarketState consistent_market(const DistributionSpec& spec, double dom_rate, double for_rate,
                              double tenor) {
    MarketState ms{1.0, dom_rate, for_rate, tenor};
    ms.spot = mean(spec) * std::exp(-(dom_rate - for_rate) * tenor);
    ms.validate();
    return ms;
}

double call_price(const DistributionSpec& spec, const MarketState& ms, double strike) {
    check_forward(spec, ms);
    if (!(strike > 0.0) || !std::isfinite(strike)) {
        throw Error(ErrorKind::InvalidArgument, "strike must be positive and finite");
    }
    const double df = ms.dom_discount();
    const double k = strike;
    const double undiscounted = std::visit(
        overloaded{
            [k](const LogNormal& d) {
                const double d2 = (d.mu - std::log(k)) / d.s;
                return std::exp(d.mu + 0.5 * d.s * d.s) * bsm::norm_cdf(d2 + d.s) -
                       k * bsm::norm_cdf(d2);
            },
            [k](const Gamma& d) {
                const double u = k / d.theta;
                return d.kappa * d.theta * boost::math::gamma_q(d.kappa + 1.0, u) -
                       k * boost::math::gamma_q(d.kappa, u);
            },
            [k](const Normal& d) {
                const double z = (d.mu - k) / d.s;
                return (d.mu - k) * bsm::norm_cdf(z) + d.s * bsm::norm_pdf(z);
            },
            [k](const StudentT& d) {
                return student_kernel_tail(d, k) + (d.mu - k) * student_upper(d, k);
            },
            [k](const Uniform& d) {
                if (k <= d.a) return 0.5 * (d.a + d.b) - k;
                if (k >= d.b) return 0.0;
                return (d.b - k) * (d.b - k) / (2.0 * (d.b - d.a));
            },
        },
        spec);
    return df * std::max(undiscounted, 0.0);
}

double put_price(const DistributionSpec& spec, const MarketState& ms, double strike) {
    check_forward(spec, ms);
    if (!(strike > 0.0) || !std::isfinite(strike)) {
        throw Error(ErrorKind::InvalidArgument, "strike must be positive and finite");
    }
    const double df = ms.dom_discount();
    const double k = strike;
    const double undiscounted = std::visit(
        overloaded{
            [k](const LogNormal& d) {
                const double d2 = (d.mu - std::log(k)) / d.s;
                return k * bsm::norm_cdf(-d2) -
                       std::exp(d.mu + 0.5 * d.s * d.s) * bsm::norm_cdf(-d2 - d.s);
            },
            [k](const Gamma& d) {
                const double u = k / d.theta;
                return k * boost::math::gamma_p(d.kappa, u) -
                       d.kappa * d.theta * boost::math::gamma_p(d.kappa + 1.0, u);
            },
            [k](const Normal& d) {
                const double z = (k - d.mu) / d.s;
                return (k - d.mu) * bsm::norm_cdf(z) + d.s * bsm::norm_pdf(z);
            },
            [k](const StudentT& d) {
                // Symmetry about mu: put(K) mirrors call(2 mu - K).
                return student_kernel_tail(d, k) + (k - d.mu) * student_lower(d, k);
            },
            [k](const Uniform& d) {
                if (k <= d.a) return 0.0;
                if (k >= d.b) return k - 0.5 * (d.a + d.b);
                return (k - d.a) * (k - d.a) / (2.0 * (d.b - d.a));
            },
        },
        spec);
    return df * std::max(undiscounted, 0.0);
}

OtmQuote otm_price(const DistributionSpec& spec, const MarketState& ms, double strike) {
    if (strike >= ms.forward()) {
        return {OptionSide::Call, call_price(spec, ms, strike)};
    }
    return {OptionSide::Put, put_price(spec, ms, strike)};
}

StrikeRange quotable_range(const DistributionSpec& spec) {
    validate(spec);
    if (const auto* u = std::get_if<Uniform>(&spec)) {
        const double eps = 1e-6 * (u->b - u->a);
        return {std::max(u->a + eps, std::numeric_limits<double>::min()), u->b - eps};
    }
    return {0.0, std::numeric_limits<double>::infinity()};
}

double atm_rn(const DistributionSpec& spec, const MarketState& ms) {
    check_forward(spec, ms);
    if (const auto* d = std::get_if<LogNormal>(&spec)) return std::exp(d->mu + d->s * d->s);
    if (const auto* d = std::get_if<Normal>(&spec)) return d->mu;
    if (const auto* d = std::get_if<StudentT>(&spec)) return d->mu;
    if (const auto* d = std::get_if<Uniform>(&spec)) return d->a + (d->b - d->a) / std::numbers::sqrt2;

    // Gamma: solve d1(K, sigma(K)) = 0 with sigma implied from the closed-form price.
    auto d1_at = [&](double log_k) {
        const double k = std::exp(log_k);
        const OtmQuote q = otm_price(spec, ms, k);
        const double vol = bsm::implied_vol(ms, k, q.price, q.side);
        return bsm::d1_d2(ms, k, vol).d1;
    };
    const double fwd = ms.forward();
    double lo = std::log(fwd);
    double hi = lo;
    double f_lo = d1_at(lo);
    double f_hi = f_lo;
    // d1 is positive at the forward and decreases with K; walk right to bracket.
    for (int i = 0; i < 60 && f_hi > 0.0; ++i) {
        hi += 0.05;
        f_hi = d1_at(hi);
    }
    if (f_lo < 0.0 || f_hi > 0.0) {
        throw Error(ErrorKind::NoConvergence, "could not bracket the straddle-neutral strike");
    }
    if (f_lo == 0.0) return std::exp(lo);
    boost::uintmax_t iters = 200;
    const auto [a, b] = boost::math::tools::toms748_solve(
        d1_at, lo, hi, f_lo, f_hi, boost::math::tools::eps_tolerance<double>(52), iters);
    return std::exp(0.5 * (a + b));
}

DensityCurve density_curve(const DistributionSpec& spec, std::span<const double> strikes) {
    DensityCurve out;
    out.strikes.assign(strikes.begin(), strikes.end());
    out.values.reserve(strikes.size());
    for (double k : strikes) out.values.push_back(pdf(spec, k));
    out.mass_below_zero = cdf(spec, 0.0);
    return out;
}

}  // namespace dist

DensityCurve support_transform_exp(const DensityCurve& curve) {
    DensityCurve out;
    out.strikes.reserve(curve.strikes.size());
    out.values.reserve(curve.values.size());
    for (std::size_t i = 0; i < curve.strikes.size(); ++i) {
        const double y = std::exp(curve.strikes[i]);
        out.strikes.push_back(y);
        out.values.push_back(curve.values[i] / y);
    }
    return out;
}

}  // namespace smilegeo
