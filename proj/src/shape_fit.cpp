#include "smilegeo/shape_fit.hpp"

#include "smilegeo/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace smilegeo {

namespace {

double cross(Point2 o, Point2 a, Point2 b) {
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

double dist2(Point2 a, Point2 b) {
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    return dx * dx + dy * dy;
}

bool collinear(Point2 a, Point2 b, Point2 c) {
    const double scale2 = std::max({dist2(a, b), dist2(b, c), dist2(a, c)});
    return 0.5 * std::abs(cross(a, b, c)) <= 1e-12 * scale2;
}

}  // namespace

CircleShape circumcircle(Point2 p1, Point2 p2, Point2 p3) {
    for (Point2 p : {p1, p2, p3}) {
        if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
            throw Error(ErrorKind::InvalidArgument, "circumcircle points must be finite");
        }
    }
    if (collinear(p1, p2, p3)) {
        throw Error(ErrorKind::CollinearPoints, "three points are (nearly) collinear");
    }
    // Work relative to the centroid to keep the bisector system well scaled.
    const Point2 g{(p1.x + p2.x + p3.x) / 3.0, (p1.y + p2.y + p3.y) / 3.0};
    const Point2 a{p1.x - g.x, p1.y - g.y};
    const Point2 b{p2.x - g.x, p2.y - g.y};
    const Point2 c{p3.x - g.x, p3.y - g.y};
    // Rows: 2(q - a) . center = |q|^2 - |a|^2 for q in {b, c}.
    double m[2][3] = {{2.0 * (b.x - a.x), 2.0 * (b.y - a.y), b.x * b.x + b.y * b.y - a.x * a.x - a.y * a.y},
                      {2.0 * (c.x - a.x), 2.0 * (c.y - a.y), c.x * c.x + c.y * c.y - a.x * a.x - a.y * a.y}};
    if (std::abs(m[1][0]) > std::abs(m[0][0])) std::swap(m[0], m[1]);
    const double l = m[1][0] / m[0][0];
    const double u11 = m[1][1] - l * m[0][1];
    const double r1 = m[1][2] - l * m[0][2];
    const double cy = r1 / u11;
    const double cx = (m[0][2] - m[0][1] * cy) / m[0][0];
    const Point2 center{cx + g.x, cy + g.y};
    const double radius =
        (std::sqrt(dist2(center, p1)) + std::sqrt(dist2(center, p2)) + std::sqrt(dist2(center, p3))) / 3.0;
    return {center, radius};
}

ConicShape conic_through_5(const std::array<Point2, 5>& points) {
    for (const Point2& p : points) {
        if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
            throw Error(ErrorKind::InvalidArgument, "conic points must be finite");
        }
    }
    for (std::size_t i = 0; i < 5; ++i) {
        for (std::size_t j = i + 1; j < 5; ++j) {
            for (std::size_t k = j + 1; k < 5; ++k) {
                if (collinear(points[i], points[j], points[k])) {
                    throw Error(ErrorKind::DegenerateConfiguration, "three of the five points are collinear");
                }
            }
        }
    }
    Eigen::Matrix<double, 5, 6> design;
    for (std::size_t i = 0; i < 5; ++i) {
        const double x = points[i].x;
        const double y = points[i].y;
        design.row(static_cast<Eigen::Index>(i)) << x * x, x * y, y * y, x, y, 1.0;
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(design, Eigen::ComputeFullV);
    const Eigen::VectorXd sv = svd.singularValues();
    if (!(sv(4) > 1e-12 * sv(0))) {
        throw Error(ErrorKind::DegenerateConfiguration, "design matrix has rank below 5");
    }
    const Eigen::VectorXd v = svd.matrixV().col(5);
    ConicShape out{};
    const double norm = v.norm();
    const double vmax = v.cwiseAbs().maxCoeff();
    double sign = 1.0;
    for (int i = 0; i < 6; ++i) {
        if (std::abs(v(i)) > 1e-12 * vmax) {
            sign = v(i) > 0.0 ? 1.0 : -1.0;
            break;
        }
    }
    for (int i = 0; i < 6; ++i) out.coef[static_cast<std::size_t>(i)] = sign * v(i) / norm;
    if (!out.is_ellipse()) {
        throw Error(ErrorKind::NotAnEllipse,
                    "conic through the points is not an ellipse (B^2 - 4AC = " +
                        std::to_string(out.discriminant()) + ")");
    }
    return out;
}

std::vector<DeltaAnchor> resolve_anchors(const SmileCurve& smile, std::span<const double> targets,
                                         const FitOptions& opts, double atm_rn) {
    std::vector<DeltaAnchor> anchors;
    anchors.reserve(targets.size());
    const double half = opts.convention == DeltaConvention::ForwardN
                            ? 0.5
                            : 0.5 * smile.market().for_discount();
    for (double t : targets) {
        if (t == 0.5 && opts.middle == MiddleAnchor::AtmRn) {
            anchors.push_back({half, atm_rn, smile.vol(atm_rn)});
        } else if (t == 0.5) {
            anchors.push_back(strike_for_delta(smile, 0.5, opts.convention));
        } else {
            anchors.push_back(strike_for_delta(smile, t, opts.convention));
        }
    }
    return anchors;
}

namespace {

std::vector<Point2> anchor_points(const RepresentationContext& ctx, const std::vector<DeltaAnchor>& anchors) {
    std::vector<Point2> pts;
    pts.reserve(anchors.size());
    for (const DeltaAnchor& a : anchors) pts.push_back(represent_point(ctx, a.strike, a.vol));
    return pts;
}

}  // namespace

CircleFit fit_circle_to_smile(const SmileCurve& smile, const RepresentationConfig& cfg,
                              const FitOptions& opts) {
    const RepresentationContext ctx = make_context(smile, cfg);
    constexpr double targets[] = {0.25, 0.5, 0.75};
    std::vector<DeltaAnchor> anchors = resolve_anchors(smile, targets, opts, ctx.atm_rn);
    std::vector<Point2> pts = anchor_points(ctx, anchors);
    const CircleShape circle = circumcircle(pts[0], pts[1], pts[2]);
    return {circle, ctx, std::move(anchors), std::move(pts)};
}

EllipseFit fit_ellipse_to_smile(const SmileCurve& smile, const RepresentationConfig& cfg,
                                const FitOptions& opts) {
    const RepresentationContext ctx = make_context(smile, cfg);
    constexpr double targets[] = {0.10, 0.25, 0.5, 0.75, 0.90};
    std::vector<DeltaAnchor> anchors = resolve_anchors(smile, targets, opts, ctx.atm_rn);
    std::vector<Point2> pts = anchor_points(ctx, anchors);
    const ConicShape conic = conic_through_5({pts[0], pts[1], pts[2], pts[3], pts[4]});
    return {conic, ctx, std::move(anchors), std::move(pts)};
}

}  // namespace smilegeo
