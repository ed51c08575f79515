#include "smilegeo/georep.hpp"

#include "smilegeo/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <type_traits>

namespace smilegeo {

double strike_to_X(double strike, double atm_rn, double radius) {
    if (!(strike > 0.0) || !(atm_rn > 0.0) || !(radius > 0.0)) {
        throw Error(ErrorKind::InvalidArgument, "strike_to_X needs positive strike, atm_rn and R");
    }
    return std::log(strike / atm_rn) / radius;
}

Point2 stereographic_point(double X) {
    const double den = 1.0 + X * X;
    return {2.0 * X / den, (X * X - 1.0) / den};
}

double polar_angle(double x, double z) {
    if (x == 0.0 && z == 0.0) {
        throw Error(ErrorKind::InvalidArgument, "polar angle undefined at the origin");
    }
    const double phi = std::atan2(z, x);
    return phi == -std::numbers::pi ? std::numbers::pi : phi;
}

double continuous_angle(double X) { return 2.0 * std::atan(X) - 0.5 * std::numbers::pi; }

double resolve_radius(const RepresentationConfig& cfg, const SmileCurve& smile, double atm_rn) {
    if (cfg.mode == RadiusMode::Explicit) return resolve_radius(cfg, smile.market(), 0.0, atm_rn);
    return resolve_radius(cfg, smile.market(), smile.vol(atm_rn), atm_rn);
}

double resolve_radius(const RepresentationConfig& cfg, const MarketState& ms, double atm_vol,
                      double atm_rn) {
    if (cfg.mode == RadiusMode::Explicit) {
        if (!(cfg.radius > 0.0) || !std::isfinite(cfg.radius)) {
            throw Error(ErrorKind::InvalidArgument, "radius scale R must be positive");
        }
        return cfg.radius;
    }
    if (!(atm_vol > 0.0) || !(atm_rn > 0.0)) {
        throw Error(ErrorKind::InvalidArgument, "auto R needs a positive ATM vol and strike");
    }
    const StrikeInterval w = proxy_window(ms, atm_vol, 0.01, 0.99);
    const double span = std::max(std::abs(std::log(w.lo / atm_rn)), std::abs(std::log(w.hi / atm_rn)));
    return span / 0.95;
}

RepresentationContext make_context(const SmileCurve& smile, const RepresentationConfig& cfg) {
    const double atm = atm_rn_from_smile(smile);
    return {smile.market(), atm, resolve_radius(cfg, smile, atm)};
}

Point2 represent_point(const RepresentationContext& ctx, double strike, double vol) {
    const double phi = continuous_angle(strike_to_X(strike, ctx.atm_rn, ctx.radius));
    const double rho = ctx.radius + vol;
    return {rho * std::cos(phi), rho * std::sin(phi)};
}

RepresentationCurve represent(const SmileCurve& smile, const RepresentationContext& ctx,
                              std::span<const double> strikes) {
    RepresentationCurve out;
    out.context = ctx;
    out.strikes.assign(strikes.begin(), strikes.end());
    out.angles.reserve(strikes.size());
    out.radii.reserve(strikes.size());
    out.points.reserve(strikes.size());
    for (std::size_t i = 0; i < strikes.size(); ++i) {
        if (i > 0 && !(strikes[i] > strikes[i - 1])) {
            throw Error(ErrorKind::InvalidArgument, "representation strikes must be increasing");
        }
        const double phi = continuous_angle(strike_to_X(strikes[i], ctx.atm_rn, ctx.radius));
        const double rho = ctx.radius + smile.vol(strikes[i]);
        out.angles.push_back(phi);
        out.radii.push_back(rho);
        out.points.push_back({rho * std::cos(phi), rho * std::sin(phi)});
    }
    return out;
}

RepresentationCurve represent(const SmileCurve& smile, const RepresentationConfig& cfg,
                              std::span<const double> strikes) {
    return represent(smile, make_context(smile, cfg), strikes);
}

RayRadius ray_intersection(const CircleShape& shape, double phi) {
    if (!shape.contains_origin()) {
        throw Error(ErrorKind::OriginOutsideShape, "origin is not strictly inside the circle");
    }
    const double c = std::cos(phi);
    const double s = std::sin(phi);
    const double cx = shape.center.x;
    const double cy = shape.center.y;
    const double g = cx * c + cy * s;
    const double g1 = -cx * s + cy * c;
    const double g2 = -g;
    const double disc = g * g - (cx * cx + cy * cy) + shape.radius * shape.radius;
    const double root = std::sqrt(disc);
    const double rho = g + root;
    const double drho = g1 + g * g1 / root;
    const double d2rho = g2 + (g1 * g1 + g * g2) / root - g * g * g1 * g1 / (disc * root);
    return {rho, drho, d2rho};
}

RayRadius ray_intersection(const ConicShape& shape, double phi) {
    if (!shape.is_ellipse()) {
        throw Error(ErrorKind::NotAnEllipse, "conic is not an ellipse");
    }
    if (!shape.contains_origin()) {
        throw Error(ErrorKind::OriginOutsideShape, "origin is not strictly inside the ellipse");
    }
    const double c = std::cos(phi);
    const double s = std::sin(phi);
    const double A = shape.a(), B = shape.b(), C = shape.c(), D = shape.d(), E = shape.e(),
                 F = shape.f();
    const double a = A * c * c + B * c * s + C * s * s;
    const double a1 = (C - A) * 2.0 * c * s + B * (c * c - s * s);
    const double a2 = 2.0 * (C - A) * (c * c - s * s) - 4.0 * B * c * s;
    const double b = D * c + E * s;
    const double b1 = -D * s + E * c;
    const double b2 = -b;
    // a F < 0 gives exactly one positive root; pick it with the stable form.
    const double disc = b * b - 4.0 * a * F;
    const double q = -0.5 * (b + std::copysign(std::sqrt(disc), b));
    const double r1 = q / a;
    const double r2 = F / q;
    const double rho = r1 > 0.0 ? r1 : r2;
    if (!(rho > 0.0)) {
        throw Error(ErrorKind::OriginOutsideShape, "ray from origin does not meet the ellipse");
    }
    const double den = 2.0 * a * rho + b;
    const double drho = -(a1 * rho * rho + b1 * rho) / den;
    const double d2rho =
        -(a2 * rho * rho + 4.0 * a1 * rho * drho + 2.0 * a * drho * drho + b2 * rho + 2.0 * b1 * drho) /
        den;
    return {rho, drho, d2rho};
}

namespace {

template <class Shape>
SmileCurve smile_from_shape_impl(const Shape& shape, const RepresentationContext& ctx,
                                 StrikeInterval domain, std::span<const double> check) {
    if (!shape.contains_origin()) {
        if constexpr (std::is_same_v<Shape, ConicShape>) {
            if (!shape.is_ellipse()) throw Error(ErrorKind::NotAnEllipse, "conic is not an ellipse");
        }
        throw Error(ErrorKind::OriginOutsideShape, "origin is not strictly inside the shape");
    }
    if (!(ctx.radius > 0.0) || !(ctx.atm_rn > 0.0)) {
        throw Error(ErrorKind::InvalidArgument, "context needs positive R and atm_rn");
    }
    const double log_atm = std::log(ctx.atm_rn);
    const double radius = ctx.radius;
    auto fn = [shape, log_atm, radius](double strike) -> SmilePoint {
        const double X = (std::log(strike) - log_atm) / radius;
        const double den = 1.0 + X * X;
        const double phi = 2.0 * std::atan(X) - 0.5 * std::numbers::pi;
        const double phi1 = 2.0 / (radius * den);
        const double phi2 = -4.0 * X / (radius * radius * den * den);
        const RayRadius r = ray_intersection(shape, phi);
        const double vol = r.rho - radius;
        if (!(vol > 0.0)) {
            throw Error(ErrorKind::NonpositiveVol,
                        "shape gives non-positive vol at K=" + std::to_string(strike));
        }
        return {vol, r.drho * phi1, r.d2rho * phi1 * phi1 + r.drho * phi2};
    };
    SmileCurve smile(ctx.market, domain, fn);
    for (double k : check) (void)smile.at(k);
    return smile;
}

}  // namespace

SmileCurve smile_from_shape(const CircleShape& shape, const RepresentationContext& ctx,
                            StrikeInterval domain, std::span<const double> check) {
    return smile_from_shape_impl(shape, ctx, domain, check);
}

SmileCurve smile_from_shape(const ConicShape& shape, const RepresentationContext& ctx,
                            StrikeInterval domain, std::span<const double> check) {
    return smile_from_shape_impl(shape, ctx, domain, check);
}

}  // namespace smilegeo
