#pragma once

#include <array>

namespace smilegeo {

struct Point2 {
    double x;
    double y;
};

struct CircleShape {
    Point2 center;
    double radius;

    /// Origin strictly inside: every ray from the origin meets the circle once.
    bool contains_origin() const { return center.x * center.x + center.y * center.y < radius * radius; }
};

/// A x^2 + B xy + C y^2 + D x + E y + F = 0, unit coefficient norm, first
/// nonzero coefficient positive.
struct ConicShape {
    std::array<double, 6> coef;

    double a() const { return coef[0]; }
    double b() const { return coef[1]; }
    double c() const { return coef[2]; }
    double d() const { return coef[3]; }
    double e() const { return coef[4]; }
    double f() const { return coef[5]; }

    double discriminant() const { return coef[1] * coef[1] - 4.0 * coef[0] * coef[2]; }
    double residual(Point2 p) const;
    bool is_ellipse() const { return discriminant() < 0.0; }
    /// Ellipse with the origin strictly inside.
    bool contains_origin() const;
};

/// Center -> scale * center + (dx, dy), radius -> scale * radius.
struct SimilarityTransform {
    double scale = 1.0;
    double dx = 0.0;
    double dy = 0.0;

    Point2 apply(Point2 p) const { return {scale * p.x + dx, scale * p.y + dy}; }
    /// (this o first): apply `first`, then this.
    SimilarityTransform compose(const SimilarityTransform& first) const;
    /// The unique transform carrying `from` onto `to`.
    static SimilarityTransform between(const CircleShape& from, const CircleShape& to);
};

CircleShape transform_circle(const CircleShape& c, double scale, double dx, double dy);
CircleShape transform_circle(const CircleShape& c, const SimilarityTransform& t);

}  // namespace smilegeo
