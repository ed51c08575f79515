#pragma once

#include "smilegeo/shapes.hpp"
#include "smilegeo/smile.hpp"

#include <span>
#include <vector>

namespace smilegeo {

enum class RadiusMode { Explicit, Auto };

/// The free scale R. Auto puts the flat-proxy strikes at N(-d1) = 0.01 and
/// 0.99 (at the ATM vol) on |X| <= 0.95.
struct RepresentationConfig {
    RadiusMode mode = RadiusMode::Auto;
    double radius = 1.0;

    static RepresentationConfig fixed(double r) { return {RadiusMode::Explicit, r}; }
    static RepresentationConfig automatic() { return {RadiusMode::Auto, 0.0}; }
};

struct RepresentationContext {
    MarketState market;
    double atm_rn;
    double radius;
};

struct RepresentationCurve {
    std::vector<double> strikes;
    std::vector<double> angles;
    std::vector<double> radii;
    std::vector<Point2> points;
    RepresentationContext context;
};

/// X(K) = ln(K / atm_rn) / R.
double strike_to_X(double strike, double atm_rn, double radius);

/// Unit-circle image (2X/(1+X^2), (X^2-1)/(1+X^2)).
Point2 stereographic_point(double X);

/// atan2 angle in (-pi, pi].
double polar_angle(double x, double z);

/// Continuous angle of the image of X: 2 atan(X) - pi/2, in (-3pi/2, pi/2).
double continuous_angle(double X);

double resolve_radius(const RepresentationConfig& cfg, const SmileCurve& smile, double atm_rn);
/// Same rule from the ATM vol alone.
double resolve_radius(const RepresentationConfig& cfg, const MarketState& ms, double atm_vol,
                      double atm_rn);

/// Context with the smile's own straddle-neutral strike and the resolved R.
RepresentationContext make_context(const SmileCurve& smile, const RepresentationConfig& cfg);

RepresentationCurve represent(const SmileCurve& smile, const RepresentationContext& ctx,
                              std::span<const double> strikes);
RepresentationCurve represent(const SmileCurve& smile, const RepresentationConfig& cfg,
                              std::span<const double> strikes);

/// Point of the representation at one strike for a given vol.
Point2 represent_point(const RepresentationContext& ctx, double strike, double vol);

/// Smile whose representation is the given shape: sigma(K) = rho(phi(K)) - R,
/// rho the positive ray intersection. `check` strikes are verified for
/// sigma > 0 (NonpositiveVol) at construction.
SmileCurve smile_from_shape(const CircleShape& shape, const RepresentationContext& ctx,
                            StrikeInterval domain, std::span<const double> check = {});
SmileCurve smile_from_shape(const ConicShape& shape, const RepresentationContext& ctx,
                            StrikeInterval domain, std::span<const double> check = {});

/// Ray radius at angle phi with its first two phi-derivatives.
struct RayRadius {
    double rho;
    double drho;
    double d2rho;
};
RayRadius ray_intersection(const CircleShape& shape, double phi);
RayRadius ray_intersection(const ConicShape& shape, double phi);

}  // namespace smilegeo
