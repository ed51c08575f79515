#include "smilegeo/shapes.hpp"

#include "smilegeo/errors.hpp"

namespace smilegeo {

double ConicShape::residual(Point2 p) const {
    return coef[0] * p.x * p.x + coef[1] * p.x * p.y + coef[2] * p.y * p.y + coef[3] * p.x +
           coef[4] * p.y + coef[5];
}

bool ConicShape::contains_origin() const {
    // For an ellipse the quadratic part is definite with the sign of A; the
    // origin is interior iff F has the opposite sign.
    return is_ellipse() && coef[0] * coef[5] < 0.0;
}

SimilarityTransform SimilarityTransform::compose(const SimilarityTransform& first) const {
    return {scale * first.scale, scale * first.dx + dx, scale * first.dy + dy};
}

SimilarityTransform SimilarityTransform::between(const CircleShape& from, const CircleShape& to) {
    if (!(from.radius > 0.0) || !(to.radius > 0.0)) {
        throw Error(ErrorKind::InvalidArgument, "circle radii must be positive");
    }
    const double s = to.radius / from.radius;
    return {s, to.center.x - s * from.center.x, to.center.y - s * from.center.y};
}

CircleShape transform_circle(const CircleShape& c, double scale, double dx, double dy) {
    return transform_circle(c, SimilarityTransform{scale, dx, dy});
}

CircleShape transform_circle(const CircleShape& c, const SimilarityTransform& t) {
    if (!(t.scale > 0.0)) {
        throw Error(ErrorKind::InvalidArgument, "transform scale must be positive");
    }
    return {t.apply(c.center), t.scale * c.radius};
}

}  // namespace smilegeo
