#include "smilegeo/errors.hpp"
#include "smilegeo/shape_fit.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

using namespace smilegeo;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

template <class F>
void expect_error(ErrorKind kind, F&& f) {
    try {
        f();
        FAIL("expected " << to_string(kind));
    } catch (const Error& e) {
        CHECK(e.kind() == kind);
    }
}

}  // namespace

TEST_CASE("circumcircle of random triples", "[shape_fit][property]") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const Point2 a{u(rng), u(rng)}, b{u(rng), u(rng)}, c{u(rng), u(rng)};
        const double area = std::abs((b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x));
        if (area < 1e-3) continue;
        const CircleShape s = circumcircle(a, b, c);
        for (const Point2& p : {a, b, c}) {
            worst = std::max(worst, std::abs(std::hypot(p.x - s.center.x, p.y - s.center.y) - s.radius) /
                                        std::max(1.0, s.radius));
        }
    }
    CHECK(worst <= 1e-10);
}

TEST_CASE("conic through five ellipse points", "[shape_fit][property]") {
    std::mt19937_64 rng(123);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const double cx = -0.5 + u(rng), cy = -0.5 + u(rng), a = 0.5 + 2 * u(rng), b = 0.5 + 2 * u(rng);
        const double rot = std::numbers::pi * u(rng);
        std::array<Point2, 5> pts;
        // Five angles spread around the ellipse keep the configuration well-posed.
        for (int j = 0; j < 5; ++j) {
            const double t = 2 * std::numbers::pi * (j + 0.6 * u(rng)) / 5.0;
            const double x = a * std::cos(t), y = b * std::sin(t);
            pts[j] = {cx + x * std::cos(rot) - y * std::sin(rot), cy + x * std::sin(rot) + y * std::cos(rot)};
        }
        const ConicShape k = conic_through_5(pts);
        REQUIRE(k.is_ellipse());
        for (const Point2& p : pts) worst = std::max(worst, std::abs(k.residual(p)));
    }
    CHECK(worst <= 1e-9);
}

TEST_CASE("degenerate fits raise", "[shape_fit][error]") {
    expect_error(ErrorKind::CollinearPoints, [] { circumcircle({0, 0}, {1, 1}, {2, 2}); });
    expect_error(ErrorKind::CollinearPoints, [] { circumcircle({1, 1}, {1, 1}, {2, 0}); });
    expect_error(ErrorKind::DegenerateConfiguration,
                 [] { conic_through_5({Point2{0, 0}, {1, 0}, {2, 0}, {0, 1}, {1, 2}}); });
    expect_error(ErrorKind::DegenerateConfiguration,
                 [] { conic_through_5({Point2{0, 1}, {0, 1}, {1, 0}, {-1, 0}, {0, -1}}); });
    // Five points on x^2 - y^2 = 1.
    std::array<Point2, 5> hyp;
    const double ts[] = {-1.0, -0.3, 0.2, 0.8, 1.5};
    for (int j = 0; j < 5; ++j) hyp[j] = {(j % 2 ? -1.0 : 1.0) * std::cosh(ts[j]), std::sinh(ts[j])};
    expect_error(ErrorKind::NotAnEllipse, [&] { conic_through_5(hyp); });
}

TEST_CASE("circle fit of a flat smile is the origin-centred circle", "[shape_fit]") {
    const MarketState ms{1.1, 0.02, 0.01, 1.0};
    const SmileCurve flat = flat_smile(ms, 0.15, {0.4, 3.0});
    const CircleFit f = fit_circle_to_smile(flat, RepresentationConfig::fixed(1.3));
    CHECK_THAT(f.circle.center.x, WithinAbs(0.0, 1e-10));
    CHECK_THAT(f.circle.center.y, WithinAbs(0.0, 1e-10));
    CHECK_THAT(f.circle.radius, WithinAbs(1.45, 1e-10));
}

TEST_CASE("fitted shapes reproduce their anchors", "[shape_fit]") {
    const DistributionSpec g = Gamma{5.12, 0.64};
    const MarketState ms = dist::consistent_market(g, 0.0, 0.0, 1.0);
    const SmileCurve s = smile_from_distribution(g, ms).smile;
    const CircleFit cf = fit_circle_to_smile(s, RepresentationConfig::fixed(3.0));
    REQUIRE(cf.anchors.size() == 3);
    CHECK(cf.anchors[0].target == 0.25);
    CHECK(cf.anchors[1].target == 0.5);
    CHECK_THAT(cf.anchors[1].strike, WithinRel(atm_rn_from_smile(s), 1e-12));
    const SmileCurve cs = smile_from_shape(cf.circle, cf.context, s.domain());
    for (const DeltaAnchor& a : cf.anchors) CHECK_THAT(cs.vol(a.strike), WithinAbs(a.vol, 1e-10));

    const EllipseFit ef = fit_ellipse_to_smile(s, RepresentationConfig::fixed(3.0));
    REQUIRE(ef.anchors.size() == 5);
    const SmileCurve es = smile_from_shape(ef.conic, ef.context, s.domain());
    for (const DeltaAnchor& a : ef.anchors) CHECK_THAT(es.vol(a.strike), WithinAbs(a.vol, 1e-10));
}

TEST_CASE("circle fit recovers a circle-generated smile", "[shape_fit]") {
    const MarketState ms{1.0, 0.0, 0.0, 1.0};
    const RepresentationConfig cfg = RepresentationConfig::fixed(2.0);
    // A circle through (0, -(R + atm_vol)) placed at K = F e^{atm_vol^2 T / 2}
    // makes that strike the smile's own straddle-neutral strike.
    const double atm_vol = 0.12, rho0 = 2.0 + atm_vol;
    const RepresentationContext gen{ms, bsm::atm_rn_lognormal(ms, atm_vol), 2.0};
    const Point2 ctr{-0.03, 0.02};
    const CircleShape truth{ctr, std::hypot(ctr.x, ctr.y + rho0)};
    const SmileCurve s = smile_from_shape(truth, gen, {0.3, 3.0});
    const CircleFit f = fit_circle_to_smile(s, cfg);
    const SmileCurve back = smile_from_shape(f.circle, f.context, s.domain());
    for (double k : {0.5, 0.7, 1.0, 1.4, 2.0}) CHECK_THAT(back.vol(k), WithinAbs(s.vol(k), 1e-8));
}

TEST_CASE("spot-pips anchors are scaled by the foreign discount", "[shape_fit]") {
    const MarketState ms{1.1, 0.03, 0.04, 2.0};
    const SmileCurve flat = flat_smile(ms, 0.1, {0.4, 3.0});
    FitOptions opts;
    opts.convention = DeltaConvention::SpotPips;
    constexpr double targets[] = {0.25, 0.5, 0.75};
    const auto a = resolve_anchors(flat, targets, opts, atm_rn_from_smile(flat));
    CHECK_THAT(a[0].target, WithinAbs(0.25, 1e-15));
    CHECK_THAT(a[1].target, WithinRel(0.5 * ms.for_discount(), 1e-14));
    const double n = bsm::norm_cdf(-bsm::d1_d2(ms, a[0].strike, 0.1).d1);
    CHECK_THAT(n * ms.for_discount(), WithinAbs(0.25, 1e-12));
}
