#include "liouville/interpolation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace liouville {

namespace {

void limit_slopes(std::span<const double> x, std::span<const double> y, std::vector<double>& m) {
    const std::size_t n = x.size();
    for (std::size_t k = 0; k + 1 < n; ++k) {
        const double secant = (y[k + 1] - y[k]) / (x[k + 1] - x[k]);
        if (secant == 0.0) {
            m[k] = 0.0;
            m[k + 1] = 0.0;
            continue;
        }
        // Slopes against the direction of the data would create an extremum.
        if (m[k] * secant < 0.0) m[k] = 0.0;
        if (m[k + 1] * secant < 0.0) m[k + 1] = 0.0;
        const double alpha = m[k] / secant;
        const double beta = m[k + 1] / secant;
        const double r2 = alpha * alpha + beta * beta;
        if (r2 > 9.0) {
            const double tau = 3.0 / std::sqrt(r2);
            m[k] = tau * alpha * secant;
            m[k + 1] = tau * beta * secant;
        }
    }
}

} // namespace

MonotoneCubic::MonotoneCubic(std::vector<double> x, std::vector<double> y,
                             std::vector<double> slopes)
    : x_(std::move(x)), y_(std::move(y)), m_(std::move(slopes)) {
    if (x_.size() < 2 || y_.size() != x_.size() || m_.size() != x_.size()) {
        throw std::invalid_argument("MonotoneCubic needs >= 2 nodes with matching values/slopes");
    }
    for (std::size_t i = 0; i + 1 < x_.size(); ++i) {
        if (!(x_[i] < x_[i + 1])) throw std::invalid_argument("MonotoneCubic nodes must increase");
    }
    limit_slopes(x_, y_, m_);
}

MonotoneCubic MonotoneCubic::from_data(std::vector<double> x, std::vector<double> y) {
    const std::size_t n = x.size();
    if (n < 2 || y.size() != n) throw std::invalid_argument("MonotoneCubic needs >= 2 nodes");
    std::vector<double> m(n, 0.0);
    std::vector<double> h(n - 1);
    std::vector<double> d(n - 1);
    for (std::size_t k = 0; k + 1 < n; ++k) {
        h[k] = x[k + 1] - x[k];
        d[k] = (y[k + 1] - y[k]) / h[k];
    }
    m.front() = d.front();
    m.back() = d.back();
    for (std::size_t k = 1; k + 1 < n; ++k) {
        if (d[k - 1] * d[k] <= 0.0) continue;
        const double w1 = 2.0 * h[k] + h[k - 1];
        const double w2 = h[k] + 2.0 * h[k - 1];
        m[k] = (w1 + w2) / (w1 / d[k - 1] + w2 / d[k]);
    }
    return MonotoneCubic(std::move(x), std::move(y), std::move(m));
}

std::size_t MonotoneCubic::segment(double x) const {
    const auto it = std::upper_bound(x_.begin(), x_.end(), x);
    const std::size_t i = static_cast<std::size_t>(it - x_.begin());
    if (i == 0) return 0;
    return std::min(i - 1, x_.size() - 2);
}

double MonotoneCubic::operator()(double x) const {
    const std::size_t k = segment(x);
    const double h = x_[k + 1] - x_[k];
    const double t = (x - x_[k]) / h;
    const double t2 = t * t;
    const double t3 = t2 * t;
    const double h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
    const double h10 = t3 - 2.0 * t2 + t;
    const double h01 = -2.0 * t3 + 3.0 * t2;
    const double h11 = t3 - t2;
    return h00 * y_[k] + h10 * h * m_[k] + h01 * y_[k + 1] + h11 * h * m_[k + 1];
}

double MonotoneCubic::derivative(double x) const {
    const std::size_t k = segment(x);
    const double h = x_[k + 1] - x_[k];
    const double t = (x - x_[k]) / h;
    const double t2 = t * t;
    const double d00 = (6.0 * t2 - 6.0 * t) / h;
    const double d10 = 3.0 * t2 - 4.0 * t + 1.0;
    const double d01 = (-6.0 * t2 + 6.0 * t) / h;
    const double d11 = 3.0 * t2 - 2.0 * t;
    return d00 * y_[k] + d10 * m_[k] + d01 * y_[k + 1] + d11 * m_[k + 1];
}

} // namespace liouville
