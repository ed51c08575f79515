#include "smilegeo/errors.hpp"
#include "smilegeo/georep.hpp"
#include "smilegeo/shapes.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

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

TEST_CASE("stereographic slice lies on the unit circle", "[georep]") {
    for (double X : {-50.0, -2.0, -0.3, 0.0, 0.7, 3.0, 1e3}) {
        const Point2 p = stereographic_point(X);
        CHECK_THAT(p.x * p.x + p.y * p.y, WithinAbs(1.0, 1e-15));
        const double phi = continuous_angle(X);
        CHECK_THAT(std::cos(phi), WithinAbs(p.x, 1e-14));
        CHECK_THAT(std::sin(phi), WithinAbs(p.y, 1e-14));
    }
    const Point2 south = stereographic_point(0.0);
    CHECK(south.x == 0.0);
    CHECK(south.y == -1.0);
    CHECK(continuous_angle(0.0) == -0.5 * std::numbers::pi);
}

TEST_CASE("polar angle convention", "[georep]") {
    CHECK(polar_angle(-1.0, -0.0) == std::numbers::pi);
    CHECK(polar_angle(-1.0, 0.0) == std::numbers::pi);
    CHECK_THAT(polar_angle(0.0, -2.0), WithinAbs(-0.5 * std::numbers::pi, 1e-15));
    expect_error(ErrorKind::InvalidArgument, [] { polar_angle(0.0, 0.0); });
}

TEST_CASE("flat smile maps to a circle about the origin", "[georep]") {
    const MarketState ms{1.1, 0.03, 0.01, 1.0};
    for (double vol : {0.05, 0.1, 0.2, 0.5}) {
        for (double r : {0.5, 1.0, 2.0}) {
            const SmileCurve flat = flat_smile(ms, vol, {0.2, 6.0});
            const auto grid = log_grid(0.25, 5.0, 301);
            const RepresentationCurve c = represent(flat, RepresentationConfig::fixed(r), grid);
            CHECK_THAT(c.context.atm_rn, WithinRel(bsm::atm_rn_lognormal(ms, vol), 1e-10));
            for (const Point2& p : c.points) {
                CHECK_THAT(std::hypot(p.x, p.y), WithinAbs(r + vol, 1e-12));
            }
        }
    }
}

TEST_CASE("auto radius puts the proxy tails at |X| = 0.95", "[georep]") {
    const MarketState ms{1.1, 0.03, 0.01, 0.5};
    const double vol = 0.12;
    const double atm = bsm::atm_rn_lognormal(ms, vol);
    const double r = resolve_radius(RepresentationConfig::automatic(), ms, vol, atm);
    const double lo = bsm::strike_from_forward_delta(ms, vol, 0.01);
    const double hi = bsm::strike_from_forward_delta(ms, vol, 0.99);
    const double xl = std::abs(strike_to_X(lo, atm, r)), xh = std::abs(strike_to_X(hi, atm, r));
    CHECK_THAT(std::max(xl, xh), WithinAbs(0.95, 1e-12));
    CHECK(resolve_radius(RepresentationConfig::fixed(2.5), ms, vol, atm) == 2.5);
    expect_error(ErrorKind::InvalidArgument,
                 [&] { resolve_radius(RepresentationConfig::fixed(0.0), ms, vol, atm); });
}

TEST_CASE("circle smile represents back onto its circle", "[georep]") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> off(-0.05, 0.05), rad(1.6, 2.4);
    const RepresentationContext ctx{{1.0, 0.01, 0.0, 0.75}, 1.01, 1.5};
    for (int i = 0; i < 20; ++i) {
        const CircleShape c{{off(rng), off(rng)}, rad(rng)};
        const SmileCurve s = smile_from_shape(c, ctx, {0.2, 5.0});
        const RepresentationCurve curve = represent(s, ctx, log_grid(0.25, 4.0, 101));
        for (const Point2& p : curve.points) {
            CHECK_THAT(std::hypot(p.x - c.center.x, p.y - c.center.y), WithinAbs(c.radius, 1e-12));
        }
    }
}

TEST_CASE("shape smile derivatives match finite differences", "[georep]") {
    const RepresentationContext ctx{{1.0, 0.0, 0.0, 1.0}, 1.0, 1.2};
    const CircleShape circle{{0.03, -0.02}, 1.35};
    // Ellipse (x/1.4)^2 + ((y-0.01)/1.3)^2 = 1 rotated slightly.
    const double th = 0.2, ca = std::cos(th), sa = std::sin(th);
    const double a2 = 1.0 / (1.4 * 1.4), b2 = 1.0 / (1.3 * 1.3);
    const double A = a2 * ca * ca + b2 * sa * sa, C = a2 * sa * sa + b2 * ca * ca, B = 2 * (a2 - b2) * ca * sa;
    const double y0 = 0.01;
    const ConicShape conic{{A, B, C, -B * y0, -2 * C * y0, C * y0 * y0 - 1.0}};
    REQUIRE(conic.contains_origin());
    const SmileCurve sc = smile_from_shape(circle, ctx, {0.2, 5.0});
    const SmileCurve se = smile_from_shape(conic, ctx, {0.2, 5.0});
    for (const SmileCurve* s : {&sc, &se}) {
        for (double k : {0.4, 0.8, 1.0, 1.3, 2.5}) {
            const double x = std::log(k), h = 1e-4;
            const SmilePoint p = s->at(k);
            auto d1 = [&](double e) { return (s->at_log(x + e).vol - s->at_log(x - e).vol) / (2 * e); };
            auto d2 = [&](double e) { return (s->at_log(x + e).vol - 2 * p.vol + s->at_log(x - e).vol) / (e * e); };
            CHECK_THAT(p.dvol, WithinAbs((4 * d1(h / 2) - d1(h)) / 3, 1e-9));
            CHECK_THAT(p.d2vol, WithinAbs((4 * d2(h / 2) - d2(h)) / 3, 1e-6));
        }
    }
}

TEST_CASE("ray intersections land on the shape", "[georep]") {
    const CircleShape circle{{0.2, -0.1}, 1.0};
    const ConicShape conic{{1.0, 0.3, 2.0, 0.1, -0.2, -1.5}};
    REQUIRE(conic.contains_origin());
    for (int i = 0; i < 64; ++i) {
        const double phi = -std::numbers::pi + 2 * std::numbers::pi * i / 64.0;
        const RayRadius rc = ray_intersection(circle, phi);
        const Point2 pc{rc.rho * std::cos(phi), rc.rho * std::sin(phi)};
        CHECK_THAT(std::hypot(pc.x - 0.2, pc.y + 0.1), WithinAbs(1.0, 1e-14));
        const RayRadius re = ray_intersection(conic, phi);
        CHECK(re.rho > 0.0);
        CHECK_THAT(conic.residual({re.rho * std::cos(phi), re.rho * std::sin(phi)}), WithinAbs(0.0, 1e-14));
        const double h = 1e-5;
        const double fd = (ray_intersection(conic, phi + h).rho - ray_intersection(conic, phi - h).rho) / (2 * h);
        CHECK_THAT(re.drho, WithinAbs(fd, 1e-8));
    }
}

TEST_CASE("shape errors", "[georep][error]") {
    const RepresentationContext ctx{{1.0, 0.0, 0.0, 1.0}, 1.0, 1.0};
    expect_error(ErrorKind::OriginOutsideShape, [&] { smile_from_shape(CircleShape{{2.0, 0.0}, 1.0}, ctx, {0.5, 2.0}); });
    const ConicShape hyperbola{{1.0, 0.0, -1.0, 0.0, 0.0, -1.0}};
    expect_error(ErrorKind::NotAnEllipse, [&] { smile_from_shape(hyperbola, ctx, {0.5, 2.0}); });
    const ConicShape far_ellipse{{1.0, 0.0, 1.0, -10.0, 0.0, 24.0}};
    expect_error(ErrorKind::OriginOutsideShape, [&] { smile_from_shape(far_ellipse, ctx, {0.5, 2.0}); });
    const std::vector<double> check = {0.8, 1.0, 1.2};
    expect_error(ErrorKind::NonpositiveVol,
                 [&] { smile_from_shape(CircleShape{{0.0, 0.0}, 0.9}, ctx, {0.5, 2.0}, check); });
}

TEST_CASE("circle transform is a similarity", "[shapes]") {
    const CircleShape c{{0.1, -0.2}, 1.3};
    const CircleShape t = transform_circle(c, 2.0, 0.5, -0.25);
    CHECK_THAT(t.center.x, WithinAbs(0.7, 1e-15));
    CHECK_THAT(t.center.y, WithinAbs(-0.65, 1e-15));
    CHECK_THAT(t.radius, WithinAbs(2.6, 1e-15));
    const CircleShape d{{-0.3, 0.05}, 0.4};
    const SimilarityTransform m = SimilarityTransform::between(c, d);
    const CircleShape back = transform_circle(c, m);
    CHECK_THAT(back.center.x, WithinAbs(d.center.x, 1e-15));
    CHECK_THAT(back.center.y, WithinAbs(d.center.y, 1e-15));
    CHECK_THAT(back.radius, WithinAbs(d.radius, 1e-15));
    const SimilarityTransform first{2.0, 1.0, 0.0}, second{0.5, 0.0, 3.0};
    const Point2 p{0.3, 0.7};
    const Point2 q = second.compose(first).apply(p);
    const Point2 r = second.apply(first.apply(p));
    CHECK_THAT(q.x, WithinAbs(r.x, 1e-15));
    CHECK_THAT(q.y, WithinAbs(r.y, 1e-15));
}
