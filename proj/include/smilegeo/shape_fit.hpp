#pragma once

#include "smilegeo/georep.hpp"
#include "smilegeo/shapes.hpp"
#include "smilegeo/smile.hpp"

#include <array>
#include <span>
#include <vector>

namespace smilegeo {

/// Circle through three points. Throws CollinearPoints when the triangle
/// area is at most 1e-12 * scale^2.
CircleShape circumcircle(Point2 p1, Point2 p2, Point2 p3);

/// Conic through five points from the null space of the 5x6 design matrix.
/// Throws DegenerateConfiguration (rank < 5 or three collinear points) and
/// NotAnEllipse.
ConicShape conic_through_5(const std::array<Point2, 5>& points);

/// Middle anchor rule: the smile's straddle-neutral strike, or the strike
/// whose put delta (per convention) is 0.5.
enum class MiddleAnchor { AtmRn, HalfDelta };

struct FitOptions {
    DeltaConvention convention = DeltaConvention::ForwardN;
    MiddleAnchor middle = MiddleAnchor::AtmRn;
};

struct CircleFit {
    CircleShape circle;
    RepresentationContext context;
    std::vector<DeltaAnchor> anchors;
    std::vector<Point2> points;
};

struct EllipseFit {
    ConicShape conic;
    RepresentationContext context;
    std::vector<DeltaAnchor> anchors;
    std::vector<Point2> points;
};

/// Anchors at put-delta targets; 0.5 marks the middle anchor.
std::vector<DeltaAnchor> resolve_anchors(const SmileCurve& smile, std::span<const double> targets,
                                         const FitOptions& opts, double atm_rn);

/// Anchors 0.25, middle, 0.75.
CircleFit fit_circle_to_smile(const SmileCurve& smile, const RepresentationConfig& cfg,
                              const FitOptions& opts = {});

/// Anchors 0.10, 0.25, middle, 0.75, 0.90.
EllipseFit fit_ellipse_to_smile(const SmileCurve& smile, const RepresentationConfig& cfg,
                                const FitOptions& opts = {});

}  // namespace smilegeo
