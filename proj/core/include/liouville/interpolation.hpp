#pragma once

#include <span>
#include <vector>

namespace liouville {

/// Piecewise cubic Hermite interpolant through (x_i, y_i) with given node
/// slopes, limited by the Fritsch-Carlson condition so that monotone data
/// produce a monotone interpolant. Nodes must be strictly increasing.
class MonotoneCubic {
public:
    MonotoneCubic() = default;
    MonotoneCubic(std::vector<double> x, std::vector<double> y, std::vector<double> slopes);

    /// Slopes estimated from the data (weighted harmonic mean, as in PCHIP).
    static MonotoneCubic from_data(std::vector<double> x, std::vector<double> y);

    /// Evaluates inside [front, back]; outside, the nearest end segment is
    /// extended cubically.
    double operator()(double x) const;
    double derivative(double x) const;

    bool empty() const noexcept { return x_.empty(); }
    std::span<const double> nodes() const noexcept { return x_; }
    std::span<const double> values() const noexcept { return y_; }
    std::span<const double> slopes() const noexcept { return m_; }

private:
    std::size_t segment(double x) const;

    std::vector<double> x_;
    std::vector<double> y_;
    std::vector<double> m_;
};

} // namespace liouville
