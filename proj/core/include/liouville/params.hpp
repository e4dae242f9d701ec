#pragma once

namespace liouville {

/// Dimension n, operator exponent p and monotonicity threshold eps of
///   -Delta_p u >= f(u)  in R^n,
/// where f is assumed non-decreasing on [0, eps].
struct StructureParams {
    int n = 3;
    double p = 2.0;
    double eps = 1.0;

    /// Throws InvalidParams unless n >= 2, p > 1 and eps > 0 (all finite).
    void validate() const;

    /// True when n > p, the only regime with non-constant solutions.
    bool supercritical() const noexcept { return static_cast<double>(n) > p; }
};

/// q = n(p-1)/(n-p). Throws UnsupportedRegime when n <= p.
double critical_exponent(const StructureParams& params);

/// beta = (n-p)/(p-1), the decay rate of the envelope and of w_delta.
double decay_exponent(const StructureParams& params);

} // namespace liouville
