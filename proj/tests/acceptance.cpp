// Acceptance run: one PASS/FAIL line per criterion, exit 1 if any fails.

#include "oracles.hpp"

#include "smilegeo/analysis.hpp"
#include "smilegeo/errors.hpp"
#include "smilegeo/shape_fit.hpp"
#include "smilegeo/study.hpp"
#include "smilegeo/surface.hpp"

#include <fmt/core.h>

#include <chrono>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

using namespace smilegeo;

namespace {

// R pinned for the distribution studies (criteria 5 to 7).
constexpr double kStudyRadius = 3.0;

struct Outcome {
    bool ok = false;
    std::string detail;
};

struct Criterion {
    int id;
    const char* title;
    double limit_s;
    std::function<Outcome()> run;
};

const std::vector<DistributionSpec>& families() {
    static const std::vector<DistributionSpec> s = {LogNormal{1.2, 0.3}, Gamma{5.12, 0.64}, Normal{11.3328, 3.0},
                                                    StudentT{3.7201, 7.3824}, Uniform{2.0109, 5.4750}};
    return s;
}

std::vector<double> central_grid(const DistributionSpec& spec, std::size_t n) {
    return log_grid(oracle::central_mass_lo(spec), oracle::central_mass_hi(spec), n);
}

template <class F>
bool raises(ErrorKind kind, F&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind() == kind;
    }
    return false;
}

Outcome flat_circle() {
    const MarketState ms{1.1, 0.03, 0.01, 1.0};
    double offset = 0.0, radius_err = 0.0;
    for (double vol : {0.05, 0.1, 0.2, 0.5}) {
        for (double r : {0.5, 1.0, 2.0}) {
            const SmileCurve flat = flat_smile(ms, vol, {0.1, 10.0});
            const RepresentationCurve c = represent(flat, RepresentationConfig::fixed(r), log_grid(0.2, 6.0, 401));
            for (const Point2& p : c.points) radius_err = std::max(radius_err, std::abs(std::hypot(p.x, p.y) - (r + vol)));
            const std::size_t n = c.points.size();
            const CircleShape fit = circumcircle(c.points[n / 8], c.points[n / 2], c.points[7 * n / 8]);
            offset = std::max(offset, std::hypot(fit.center.x, fit.center.y));
            radius_err = std::max(radius_err, std::abs(fit.radius - (r + vol)));
        }
    }
    return {offset <= 1e-10 && radius_err <= 1e-10,
            fmt::format("max center offset {:.2e}, max radius error {:.2e}", offset, radius_err)};
}

Outcome bsm_identities() {
    std::mt19937_64 rng(20);
    std::uniform_real_distribution<double> spot(0.5, 200.0), rate(-0.02, 0.08), tenor(0.02, 5.0), vol(0.03, 1.0),
        money(-1.8, 1.8);
    double parity = 0.0, identity = 0.0, round_trip = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const MarketState ms{spot(rng), rate(rng), rate(rng), tenor(rng)};
        const double v = vol(rng);
        const double k = ms.forward() * std::exp(money(rng) * v * std::sqrt(ms.tenor));
        const double c = bsm::price(ms, k, v, OptionSide::Call);
        const double p = bsm::price(ms, k, v, OptionSide::Put);
        const double sd = ms.spot * ms.for_discount(), kd = k * ms.dom_discount();
        parity = std::max(parity, std::abs(c - p - (sd - kd)) / (sd + kd));
        const double nd1 = sd * bsm::norm_pdf(bsm::d1_d2(ms, k, v).d1);
        identity = std::max(identity, bsm::identity_residual(ms, k, v) / nd1);
        const OptionSide side = k > ms.forward() ? OptionSide::Call : OptionSide::Put;
        round_trip = std::max(round_trip, std::abs(bsm::implied_vol(ms, k, side == OptionSide::Call ? c : p, side) - v));
    }
    return {parity <= 1e-12 && identity <= 1e-12 && round_trip <= 1e-10,
            fmt::format("10000 tuples: parity {:.2e}, n(d1) identity {:.2e}, iv round trip {:.2e}", parity, identity,
                        round_trip)};
}

Outcome breeden_litzenberger() {
    double worst = 0.0;
    std::string per;
    for (const auto& spec : families()) {
        const MarketState ms = dist::consistent_market(spec, 0.02, 0.01, 1.0);
        const double h = 1e-4 * dist::mean(spec);
        double err = 0.0;
        for (double k : central_grid(spec, 201)) {
            const double fd = (dist::call_price(spec, ms, k + h) - 2.0 * dist::call_price(spec, ms, k) +
                               dist::call_price(spec, ms, k - h)) /
                              (h * h) / ms.dom_discount();
            err = std::max(err, std::abs(fd - oracle::pdf(spec, k)));
        }
        worst = std::max(worst, err);
        per += fmt::format(" {} {:.1e}", dist::name(spec), err);
    }
    return {worst <= 1e-4, "max |FD2 - pdf|:" + per};
}

Outcome density_recovery() {
    const MarketState ms{1.1, 0.03, 0.01, 2.0};
    double ln_rel = 0.0;
    for (double vol : {0.05, 0.1, 0.3}) {
        const double s = vol * std::sqrt(ms.tenor);
        const LogNormal ln{std::log(ms.forward()) - 0.5 * s * s, s};
        const auto grid = central_grid(ln, 401);
        const SmileCurve flat = flat_smile(ms, vol, {grid.front() * 0.5, grid.back() * 2.0});
        const DensityCurve d = density_from_smile(flat, grid);
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const double ref = oracle::pdf(ln, grid[i]);
            ln_rel = std::max(ln_rel, std::abs(d.values[i] - ref) / ref);
        }
    }
    double dual = 0.0;
    for (const auto& spec : families()) {
        const MarketState m = dist::consistent_market(spec, 0.0, 0.0, 1.0);
        const SmileCurve s = smile_from_distribution(spec, m).smile;
        const auto grid = central_grid(spec, 201);
        const DensityCurve a = density_from_smile(s, grid);
        const DensityCurve b = log_strike_density(s, grid);
        for (std::size_t i = 0; i < grid.size(); ++i) {
            dual = std::max(dual, std::abs(a.values[i] - b.values[i]) / std::max(1.0, std::abs(b.values[i])));
        }
    }
    return {ln_rel <= 1e-6 && dual <= 1e-8,
            fmt::format("flat smile vs log-normal rel {:.2e}, K vs ln K forms {:.2e}", ln_rel, dual)};
}

StudyOptions study_options() {
    StudyOptions o;
    o.representation = RepresentationConfig::fixed(kStudyRadius);
    return o;
}

const DistributionStudy& gamma_study() {
    static const DistributionStudy s = [] {
        const DistributionSpec g = Gamma{5.12, 0.64};
        return study_distribution(g, dist::consistent_market(g, 0.0, 0.0, 1.0), study_options());
    }();
    return s;
}

Outcome gamma_ordering() {
    const DistributionStudy& s = gamma_study();
    const ModelResult &c = s.model("circle"), &v = s.model("vanna-volga"), &l = s.model("lognormal");
    if (!c.ok || !v.ok || !l.ok) return {false, "a model failed: " + c.error + v.error + l.error};
    const double kc = c.divergence.kl_nats, kv = v.divergence.kl_nats, kl = l.divergence.kl_nats;
    return {kc < kv && kc < kl,
            fmt::format("R = {}: KL circle {:.3e} < vanna-volga {:.3e}, < log-normal {:.3e}", kStudyRadius, kc, kv, kl)};
}

Outcome uniform_failure() {
    const DistributionSpec u = Uniform{2.0109, 5.4750};
    const DistributionStudy s = study_distribution(u, dist::consistent_market(u, 0.0, 0.0, 1.0), study_options());
    const ModelResult& c = s.model("circle");
    const ModelResult& g = gamma_study().model("circle");
    if (!c.ok) return {false, "circle failed: " + c.error};
    return {c.divergence.kl_nats > g.divergence.kl_nats,
            fmt::format("R = {}: KL uniform {:.3e}{} > gamma {:.3e}", kStudyRadius, c.divergence.kl_nats,
                        c.divergence.pseudo ? " (pseudo)" : "", g.divergence.kl_nats)};
}

Outcome negative_density() {
    const DistributionSpec t = StudentT{3.7322, 3.9565};
    const MarketState ms = dist::consistent_market(t, 0.0, 0.0, 1.0);
    const DistributionStudy s = study_distribution(t, ms, study_options());
    if (!s.circle) return {false, "no circle fit: " + s.model("circle").error};
    const SmileCurve cs = smile_from_shape(s.circle->circle, s.circle->context, s.window);
    const double margin = nonnegativity_margin(cs, s.window_grid);
    const DensityCurve d = density_from_smile(cs, s.window_grid);
    KlOptions ko;
    ko.clamp_floor = 1e-50;
    const DivergenceReport r = kl_divergence(s.reference, d, ko);
    const bool ok = margin < 0.0 && d.negative_count() > 0 && r.pseudo && std::isfinite(r.kl_nats);
    return {ok, fmt::format("R = {}: margin {:.3e}, {} negative density points, pseudo-KL {:.3e} (clamped {:.1f}%)",
                            kStudyRadius, margin, d.negative_count(), r.kl_nats, 100.0 * r.clamped_fraction)};
}

Outcome curvature() {
    std::mt19937_64 rng(88);
    std::uniform_real_distribution<double> off(-0.1, 0.1), rad(1.2, 2.5);
    const RepresentationContext ctx{{1.0, 0.0, 0.0, 1.0}, 1.0, 1.0};
    const auto grid = log_grid(0.2, 5.0, 801);
    double ke_err = 0.0, ks_err = 0.0, ks_moved = 0.0;
    for (int i = 0; i < 5; ++i) {
        const CircleShape c{{off(rng), off(rng)}, rad(rng)};
        const CircleShape t = transform_circle(c, 1.4, -0.02, 0.03);
        const auto curve = represent(smile_from_shape(c, ctx, {0.1, 10.0}), ctx, grid);
        const auto moved = represent(smile_from_shape(t, ctx, {0.1, 10.0}), ctx, grid);
        const auto ke = euclidean_curvature(curve);
        const auto ks = similarity_curvature(curve);
        const auto kt = similarity_curvature(moved);
        for (std::size_t j = 0; j < ke.size(); ++j) {
            if (std::isnan(ks[j]) || std::isnan(kt[j])) continue;
            ke_err = std::max(ke_err, std::abs(ke[j] - 1.0 / c.radius));
            ks_err = std::max(ks_err, std::abs(ks[j]));
            ks_moved = std::max(ks_moved, std::abs(kt[j] - ks[j]));
        }
    }
    return {ke_err <= 1e-6 && ks_err <= 1e-5 && ks_moved <= 1e-5,
            fmt::format("801-point grid: |kE - 1/rho| {:.2e}, |kS| {:.2e}, |kS moved - kS| {:.2e}", ke_err, ks_err,
                        ks_moved)};
}

Outcome anchor_exactness() {
    std::vector<std::vector<SurfaceQuoteRow>> surfaces = {
        synth_gamma_surface(), synth_gamma_surface({}, 0.2), synth_gamma_surface({}, 0.1, DeltaConvention::ForwardN),
        synth_circle_surface()};
    std::size_t nonzero = 0, cells = 0, failed = 0;
    const std::size_t idx[] = {label_index(DeltaLabel::P25), label_index(DeltaLabel::ATM), label_index(DeltaLabel::C25)};
    for (const auto& rows : surfaces) {
        const DeltaConvention conv = &rows == &surfaces[2] ? DeltaConvention::ForwardN : DeltaConvention::SpotPips;
        CompletionOptions o;
        o.convention = conv;
        for (auto m : {CompletionMethod::Circle, CompletionMethod::VannaVolga}) {
            const DiscrepancyTable t = discrepancy_table(rows, m, o);
            for (std::size_t i = 0; i < t.cells.size(); ++i) {
                if (!t.errors[i].empty()) ++failed;
                for (std::size_t j : idx) {
                    ++cells;
                    if (!t.cells[i][j] || *t.cells[i][j] != 0.0) ++nonzero;
                }
            }
        }
    }
    const double l2 = discrepancy_table(surfaces[3], CompletionMethod::Circle).grand_l2;
    return {nonzero == 0 && failed == 0 && l2 <= 1e-8,
            fmt::format("{} of {} anchor cells nonzero, {} failed rows, circle-surface grand L2 {:.2e}", nonzero, cells,
                        failed, l2)};
}

Outcome shape_fitting() {
    std::mt19937_64 rng(1010);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double circ = 0.0, conic = 0.0;
    int triples = 0;
    while (triples < 1000) {
        const Point2 a{6 * u(rng) - 3, 6 * u(rng) - 3}, b{6 * u(rng) - 3, 6 * u(rng) - 3}, c{6 * u(rng) - 3, 6 * u(rng) - 3};
        if (std::abs((b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)) < 1e-3) continue;
        ++triples;
        const CircleShape s = circumcircle(a, b, c);
        for (const Point2& p : {a, b, c}) {
            circ = std::max(circ, std::abs(std::hypot(p.x - s.center.x, p.y - s.center.y) - s.radius) /
                                      std::max(1.0, s.radius));
        }
    }
    for (int i = 0; i < 1000; ++i) {
        const double cx = u(rng) - 0.5, cy = u(rng) - 0.5, ax = 0.5 + 2 * u(rng), by = 0.5 + 2 * u(rng);
        const double rot = std::numbers::pi * u(rng);
        std::array<Point2, 5> pts;
        for (int j = 0; j < 5; ++j) {
            const double t = 2 * std::numbers::pi * (j + 0.6 * u(rng)) / 5.0;
            const double x = ax * std::cos(t), y = by * std::sin(t);
            pts[j] = {cx + x * std::cos(rot) - y * std::sin(rot), cy + x * std::sin(rot) + y * std::cos(rot)};
        }
        const ConicShape k = conic_through_5(pts);
        for (const Point2& p : pts) conic = std::max(conic, std::abs(k.residual(p)));
    }
    std::array<Point2, 5> hyp;
    const double ts[] = {-1.0, -0.3, 0.2, 0.8, 1.5};
    for (int j = 0; j < 5; ++j) hyp[j] = {(j % 2 ? -1.0 : 1.0) * std::cosh(ts[j]), std::sinh(ts[j])};
    const bool errors =
        raises(ErrorKind::CollinearPoints, [] { circumcircle({0, 0}, {1, 1}, {2, 2}); }) &&
        raises(ErrorKind::CollinearPoints, [] { circumcircle({1, 1}, {1, 1}, {2, 0}); }) &&
        raises(ErrorKind::DegenerateConfiguration,
               [] { conic_through_5({Point2{0, 0}, {1, 0}, {2, 0}, {0, 1}, {1, 2}}); }) &&
        raises(ErrorKind::NotAnEllipse, [&] { conic_through_5(hyp); });
    return {circ <= 1e-10 && conic <= 1e-9 && errors,
            fmt::format("circumcircle {:.2e}, conic {:.2e}, degenerate inputs {}", circ, conic,
                        errors ? "raise" : "DO NOT raise")};
}

}  // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {1, "flat smile is an origin circle", 1.0, flat_circle},
        {2, "BSM identities", 5.0, bsm_identities},
        {3, "Breeden-Litzenberger", 10.0, breeden_litzenberger},
        {4, "density recovery", 5.0, density_recovery},
        {5, "gamma ordering", 30.0, gamma_ordering},
        {6, "uniform failure mode", 30.0, uniform_failure},
        {7, "negative density", 30.0, negative_density},
        {8, "curvature of circles", 5.0, curvature},
        {9, "anchor exactness", 10.0, anchor_exactness},
        {10, "shape fitting", 5.0, shape_fitting},
    };
    int failures = 0;
    for (const Criterion& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool pass = o.ok && secs < c.limit_s;
        if (!pass) ++failures;
        fmt::print("{} {:>2} {}: {} [{:.2f} s, limit {:g} s]\n", pass ? "PASS" : "FAIL", c.id, c.title, o.detail,
                   secs, c.limit_s);
    }
    return failures == 0 ? 0 : 1;
}
