#include "smilegeo/analysis.hpp"

#include "smilegeo/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

namespace smilegeo {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

constexpr std::size_t kStencil = 7;
constexpr std::size_t kHalf = kStencil / 2;

// Fornberg weights for derivatives 0..3 at z on kStencil nodes.
std::array<std::array<double, 4>, kStencil> fornberg(const double* x, double z) {
    std::array<std::array<double, 4>, kStencil> c{};
    double c1 = 1.0;
    double c4 = x[0] - z;
    c[0][0] = 1.0;
    for (std::size_t i = 1; i < kStencil; ++i) {
        const int mn = std::min<int>(static_cast<int>(i), 3);
        double c2 = 1.0;
        const double c5 = c4;
        c4 = x[i] - z;
        for (std::size_t j = 0; j < i; ++j) {
            const double c3 = x[i] - x[j];
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k >= 1; --k) {
                    c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for (int k = mn; k >= 1; --k) {
                c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    return c;
}

struct Derivs {
    double x1, y1, x2, y2, x3, y3;
};

Derivs derivs_at(const RepresentationCurve& curve, std::size_t i) {
    const double* t = curve.angles.data() + (i - kHalf);
    const auto w = fornberg(t, curve.angles[i]);
    Derivs d{0, 0, 0, 0, 0, 0};
    for (std::size_t j = 0; j < kStencil; ++j) {
        const Point2& p = curve.points[i - kHalf + j];
        d.x1 += w[j][1] * p.x;
        d.y1 += w[j][1] * p.y;
        d.x2 += w[j][2] * p.x;
        d.y2 += w[j][2] * p.y;
        d.x3 += w[j][3] * p.x;
        d.y3 += w[j][3] * p.y;
    }
    return d;
}

void check_curve(const RepresentationCurve& curve, std::size_t min_points) {
    if (curve.points.size() < min_points || curve.angles.size() != curve.points.size()) {
        throw Error(ErrorKind::CurveTooShort,
                    "curvature needs at least " + std::to_string(min_points) + " points");
    }
    for (std::size_t i = 1; i < curve.angles.size(); ++i) {
        if (!(curve.angles[i] != curve.angles[i - 1])) {
            throw Error(ErrorKind::InvalidArgument, "curve parameter must be strictly monotone");
        }
    }
}

double kappa_e_at(const Derivs& d) {
    const double speed2 = d.x1 * d.x1 + d.y1 * d.y1;
    return (d.x1 * d.y2 - d.y1 * d.x2) / (speed2 * std::sqrt(speed2));
}

double kappa_s_at(const Derivs& d) {
    const double w = d.x1 * d.y2 - d.y1 * d.x2;
    if (!(std::abs(w) > 1e-12)) return kNaN;
    const double speed2 = d.x1 * d.x1 + d.y1 * d.y1;
    return 3.0 * (d.x1 * d.x2 + d.y1 * d.y2) / w - (d.x1 * d.y3 - d.y1 * d.x3) * speed2 / (w * w);
}

// Linear interpolation of a density in ln K; NaN outside.
double interp_log(const DensityCurve& c, double log_k) {
    const auto& ks = c.strikes;
    const double k = std::exp(log_k);
    if (k < ks.front() * (1.0 - 1e-12) || k > ks.back() * (1.0 + 1e-12)) return kNaN;
    auto it = std::upper_bound(ks.begin(), ks.end(), k);
    std::size_t j = it == ks.begin() ? 1 : static_cast<std::size_t>(it - ks.begin());
    j = std::clamp<std::size_t>(j, 1, ks.size() - 1);
    const double x0 = std::log(ks[j - 1]);
    const double x1 = std::log(ks[j]);
    const double t = std::clamp((log_k - x0) / (x1 - x0), 0.0, 1.0);
    return (1.0 - t) * c.values[j - 1] + t * c.values[j];
}

double trapezoid(const std::vector<double>& x, const std::vector<double>& y) {
    double total = 0.0;
    for (std::size_t i = 1; i < x.size(); ++i) total += 0.5 * (y[i] + y[i - 1]) * (x[i] - x[i - 1]);
    return total;
}

void check_density(const DensityCurve& c, const char* name) {
    if (c.strikes.size() < 2 || c.values.size() != c.strikes.size()) {
        throw Error(ErrorKind::InvalidArgument, std::string(name) + " needs at least two matching samples");
    }
    for (std::size_t i = 0; i < c.strikes.size(); ++i) {
        if (!(c.strikes[i] > 0.0) || (i > 0 && !(c.strikes[i] > c.strikes[i - 1]))) {
            throw Error(ErrorKind::InvalidArgument,
                        std::string(name) + " strikes must be positive and increasing");
        }
    }
}

}  // namespace

std::vector<double> euclidean_curvature(const RepresentationCurve& curve) {
    check_curve(curve, 7);
    const std::size_t n = curve.points.size();
    std::vector<double> out(n, kNaN);
    for (std::size_t i = kHalf; i + kHalf < n; ++i) {
        const Derivs d = derivs_at(curve, i);
        if (std::abs(d.x1 * d.y2 - d.y1 * d.x2) > 1e-12) out[i] = kappa_e_at(d);
    }
    return out;
}

std::vector<double> similarity_curvature(const RepresentationCurve& curve) {
    check_curve(curve, 9);
    const std::size_t n = curve.points.size();
    std::vector<double> out(n, kNaN);
    for (std::size_t i = kHalf; i + kHalf < n; ++i) out[i] = kappa_s_at(derivs_at(curve, i));
    return out;
}

CurvatureProfile curvature_profile(const RepresentationCurve& curve, std::optional<Point2> center) {
    CurvatureProfile out;
    out.kappa_e = euclidean_curvature(curve);
    out.kappa_s = similarity_curvature(curve);
    out.center = center.value_or(Point2{0.0, 0.0});
    out.strikes = curve.strikes;
    const std::size_t n = curve.points.size();
    out.angle.resize(n);
    out.n_minus_d1.resize(n);
    out.valid.resize(n);
    double prev = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const Point2& p = curve.points[i];
        double a = std::atan2(p.y - out.center.y, p.x - out.center.x);
        if (i > 0) a = prev + std::remainder(a - prev, 2.0 * std::numbers::pi);
        out.angle[i] = prev = a;
        const double vol = curve.radii[i] - curve.context.radius;
        out.n_minus_d1[i] =
            vol > 0.0 ? bsm::norm_cdf(-bsm::d1_d2(curve.context.market, curve.strikes[i], vol).d1) : kNaN;
        out.valid[i] = std::isfinite(out.kappa_e[i]) && std::isfinite(out.kappa_s[i]);
    }
    return out;
}

DivergenceReport kl_divergence(const DensityCurve& p, const DensityCurve& q, const KlOptions& opts) {
    check_density(p, "p");
    check_density(q, "q");
    if (opts.nodes < 2) throw Error(ErrorKind::InvalidArgument, "KL grid needs at least 2 nodes");
    double lo = std::max(p.strikes.front(), q.strikes.front());
    double hi = std::min(p.strikes.back(), q.strikes.back());
    if (opts.window) {
        lo = std::max(lo, opts.window->lo);
        hi = std::min(hi, opts.window->hi);
    }
    if (!(hi > lo)) {
        throw Error(ErrorKind::DisjointSupport, "densities share no support");
    }
    DivergenceReport out{};
    const double a = std::log(lo);
    const double step = (std::log(hi) - a) / static_cast<double>(opts.nodes - 1);
    out.grid.resize(opts.nodes);
    std::vector<double> pv(opts.nodes), qv(opts.nodes);
    for (std::size_t i = 0; i < opts.nodes; ++i) {
        const double x = i + 1 == opts.nodes ? std::log(hi) : a + step * static_cast<double>(i);
        out.grid[i] = i == 0 ? lo : (i + 1 == opts.nodes ? hi : std::exp(x));
        const double pi = interp_log(p, x);
        if (!std::isfinite(pi) || pi < 0.0) {
            throw Error(ErrorKind::InvalidArgument, "p must be finite and non-negative on the grid");
        }
        pv[i] = pi;
        double qi = interp_log(q, x);
        if (!std::isfinite(qi) || qi <= opts.clamp_floor) {
            qi = opts.clamp_floor;
            ++out.clamped_count;
        }
        qv[i] = qi;
    }
    const double p_mass = trapezoid(out.grid, pv);
    const double q_mass = trapezoid(out.grid, qv);
    if (!(p_mass > 0.0) || !(q_mass > 0.0)) {
        throw Error(ErrorKind::DegenerateMass, "density has no mass on the common grid");
    }
    std::vector<double> integrand(opts.nodes);
    for (std::size_t i = 0; i < opts.nodes; ++i) {
        const double pn = pv[i] / p_mass;
        const double qn = qv[i] / q_mass;
        integrand[i] = pn > 0.0 ? pn * std::log(pn / qn) : 0.0;
    }
    out.kl_nats = trapezoid(out.grid, integrand);
    out.clamped_fraction = static_cast<double>(out.clamped_count) / static_cast<double>(opts.nodes);
    out.pseudo = out.clamped_count > 0;
    return out;
}

LogNormal best_lognormal(const DensityCurve& p) {
    check_density(p, "p");
    const double mass = p.mass();
    if (!(mass >= 0.99)) {
        throw Error(ErrorKind::DegenerateMass, "grid mass " + std::to_string(mass) + " below 0.99");
    }
    std::vector<double> f(p.strikes.size());
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = p.values[i] * std::log(p.strikes[i]);
    const double mu = trapezoid(p.strikes, f) / mass;
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double z = std::log(p.strikes[i]) - mu;
        f[i] = p.values[i] * z * z;
    }
    const double var = trapezoid(p.strikes, f) / mass;
    if (!(var > 0.0)) throw Error(ErrorKind::DegenerateMass, "zero log-variance");
    return {mu, std::sqrt(var)};
}

}  // namespace smilegeo
