#include "smilegeo/spline.hpp"

#include "smilegeo/errors.hpp"

#include <algorithm>

namespace smilegeo {

CubicSpline::CubicSpline(std::span<const double> x, std::span<const double> y)
    : x_(x.begin(), x.end()), y_(y.begin(), y.end()), m_(x.size(), 0.0) {
    const std::size_t n = x_.size();
    if (n < 3 || y_.size() != n) {
        throw Error(ErrorKind::InvalidArgument, "spline needs at least 3 matching knots");
    }
    for (std::size_t i = 1; i < n; ++i) {
        if (!(x_[i] > x_[i - 1])) {
            throw Error(ErrorKind::InvalidArgument, "spline knots must be strictly increasing");
        }
    }
    // Thomas algorithm on the interior second derivatives, natural ends.
    std::vector<double> c(n, 0.0);
    std::vector<double> d(n, 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double h0 = x_[i] - x_[i - 1];
        const double h1 = x_[i + 1] - x_[i];
        const double diag = 2.0 * (h0 + h1) - h0 * c[i - 1];
        const double rhs = 6.0 * ((y_[i + 1] - y_[i]) / h1 - (y_[i] - y_[i - 1]) / h0);
        c[i] = h1 / diag;
        d[i] = (rhs - h0 * d[i - 1]) / diag;
    }
    for (std::size_t i = n - 2; i >= 1; --i) {
        m_[i] = d[i] - c[i] * m_[i + 1];
    }
}

CubicSpline::Eval CubicSpline::operator()(double x) const {
    const auto it = std::upper_bound(x_.begin(), x_.end(), x);
    std::size_t i = it == x_.begin() ? 0 : static_cast<std::size_t>(it - x_.begin()) - 1;
    i = std::min(i, x_.size() - 2);
    const double h = x_[i + 1] - x_[i];
    const double a = (x_[i + 1] - x) / h;
    const double b = (x - x_[i]) / h;
    const double value = a * y_[i] + b * y_[i + 1] +
                         ((a * a * a - a) * m_[i] + (b * b * b - b) * m_[i + 1]) * h * h / 6.0;
    const double d1 = (y_[i + 1] - y_[i]) / h -
                      (3.0 * a * a - 1.0) * h / 6.0 * m_[i] + (3.0 * b * b - 1.0) * h / 6.0 * m_[i + 1];
    const double d2 = a * m_[i] + b * m_[i + 1];
    return {value, d1, d2};
}

}  // namespace smilegeo
