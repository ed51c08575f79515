#pragma once

#include <span>
#include <vector>

namespace smilegeo {

/// Natural cubic spline through (x_i, y_i), x strictly increasing.
/// Outside the knots the end cubic pieces are continued.
class CubicSpline {
public:
    struct Eval {
        double value;
        double d1;
        double d2;
    };

    CubicSpline() = default;
    CubicSpline(std::span<const double> x, std::span<const double> y);

    Eval operator()(double x) const;
    double front() const { return x_.front(); }
    double back() const { return x_.back(); }
    std::size_t size() const { return x_.size(); }

private:
    std::vector<double> x_;
    std::vector<double> y_;
    std::vector<double> m_;  // second derivatives at the knots
};

}  // namespace smilegeo
