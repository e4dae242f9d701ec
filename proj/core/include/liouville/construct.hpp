#pragma once

#include <optional>
#include <span>
#include <vector>

#include "liouville/interpolation.hpp"
#include "liouville/nonlinearity.hpp"
#include "liouville/params.hpp"
#include "liouville/quadrature.hpp"

namespace liouville {

/// eps (1 + r/delta)^-(n-p)/(p-1): the comparison function the profile must
/// stay below.
double envelope(const StructureParams& params, double delta, double r);

/// Log-spaced points lo = x_0 < ... < x_(points-1) = hi.
std::vector<double> log_grid(double lo, double hi, int points);

struct ProfileOptions {
    Tolerance tol{1e-10, 0.0};
    double cache_lo = 1e-8; ///< lower end of the inner-integral table, in units of delta
    double cache_hi = 1e8;  ///< upper end, in units of delta
    int cache_nodes = 4096;
};

/// The radial function
///
///   w(r) = int_r^inf ( I(z) / z^(n-1) )^(1/(p-1)) dz,
///   I(z) = int_0^z  x^(n-1) f(envelope(x)) dx,
///
/// which solves -Delta_p w = f(envelope(r)) for r > 0. Whenever
/// envelope >= w and f is non-decreasing, u(x) = w(|x|) is a positive
/// supersolution of -Delta_p u >= f(u) with inf u = 0.
///
/// I is tabulated once on a log grid together with its complement
/// I(inf) - I, both interpolated in log-log coordinates with exact node
/// slopes; queries outside the table are integrated directly. A built
/// profile is immutable.
class RadialProfile {
public:
    /// Throws DivergentCriterion when K_f or I(inf) is infinite, and
    /// UnsupportedRegime for n <= p.
    static RadialProfile build(Nonlinearity f, StructureParams params, double delta,
                               ProfileOptions opts = {});

    const StructureParams& params() const noexcept { return params_; }
    const Nonlinearity& nonlinearity() const noexcept { return f_; }
    double delta() const noexcept { return delta_; }
    const ProfileOptions& options() const noexcept { return opts_; }
    double critical_exponent() const noexcept { return q_; }
    double decay_exponent() const noexcept { return beta_; }

    double envelope(double r) const;

    /// I(zeta) from the table.
    double inner_integral(double zeta) const;
    /// I(zeta) by quadrature from 0, bypassing the table.
    double inner_integral_direct(double zeta) const;
    /// I(b) - I(a) without cancellation where I is close to I(inf).
    double inner_increment(double a, double b) const;
    /// x^(n-1) f(envelope(x)) = dI/dx.
    double inner_integrand(double x) const;

    double inner_total() const noexcept { return inner_total_; }
    double inner_total_error() const noexcept { return inner_total_error_; }
    /// K_f = int_0^eps f(z) z^-(1+q) dz.
    double criterion_value() const noexcept { return criterion_value_; }

    /// w(r); throws DivergentCriterion if the outer integral fails.
    double value(double r) const;
    /// w at ascending radii, accumulated from the largest one down.
    std::vector<double> values(std::span<const double> radii) const;
    /// w'(r) = -(I(r) / r^(n-1))^(1/(p-1)).
    double gradient(double r) const;
    /// sup w = w(0).
    double sup() const noexcept { return sup_; }

    bool is_zero() const noexcept { return zero_; }

    /// Explicit decay bound w(r) <= C_f r^-(n-p)/(p-1) with
    ///   C_f = g [g delta^n eps^q K_f]^(1/(p-1)),  g = (p-1)/(n-p).
    double decay_bound(double r) const;
    double decay_bound_constant() const;
    /// w(r) <= g I(inf)^(1/(p-1)) r^-(n-p)/(p-1) (uses I <= I(inf) only).
    double tail_constant() const;

private:
    RadialProfile() = default;

    // Everything below works in s = log(zeta).
    double log_inner_integrand(double s) const; ///< log(zeta^n f(envelope(zeta))), Jacobian included
    double log_inner(double s) const;           ///< log I
    double log_complement(double s) const;      ///< log(I(inf) - I)
    double log_outer(double s) const;           ///< log(zeta |w'(zeta)|)

    Nonlinearity f_ = Nonlinearity::constant(0.0);
    StructureParams params_;
    double delta_ = 1.0;
    ProfileOptions opts_;
    double q_ = 0.0;
    double beta_ = 0.0;
    double log_eps_ = 0.0;
    double log_delta_ = 0.0;

    double criterion_value_ = 0.0;
    double inner_total_ = 0.0;
    double inner_total_error_ = 0.0;
    double sup_ = 0.0;
    bool zero_ = false;

    MonotoneCubic log_lower_; ///< log I over s, empty if unusable
    MonotoneCubic log_upper_; ///< log(I(inf) - I) over s
    double s_hi_ = 0.0;       ///< top of the table
};

inline double inner_integral(const RadialProfile& profile, double zeta) {
    return profile.inner_integral(zeta);
}
inline double profile_value(const RadialProfile& profile, double r) { return profile.value(r); }
inline double sup_profile(const RadialProfile& profile) { return profile.sup(); }
inline double decay_bound(const RadialProfile& profile, double r) {
    return profile.decay_bound(r);
}

/// Both sides of
///   int_0^inf x^(n-1) f(envelope(x)) dx
///     = g delta^n / eps  int_0^eps ((eps/z)^g - 1)^(n-1) (eps/z)^(g+1) f(z) dz,
/// g = (p-1)/(n-p), each side computed by its own quadrature.
struct ChangeOfVariables {
    QuadratureResult direct;
    QuadratureResult transformed;
    double relative_gap() const;
};
ChangeOfVariables change_of_variables_check(const RadialProfile& profile, Tolerance tol = {});

struct FindDeltaOptions {
    double delta0 = 1.0;
    int max_halvings = 60;
    std::optional<double> r_min; ///< default 1e-6 delta
    std::optional<double> r_max; ///< default 1e6 delta
    int grid_points = 200;
    double slack = 1e-12;
    ProfileOptions profile{};
};

/// Which conditions one candidate delta met.
struct DeltaAssessment {
    double delta = 0.0;
    bool grid_ok = false;      ///< envelope >= w - slack at every grid radius
    double worst_margin = 0.0; ///< min over the grid of envelope - w
    double worst_at = 0.0;
    bool delta1_ok = false;    ///< sup w <= eps 2^-beta, covering [0, delta)
    bool delta2_ok = false;    ///< C_f <= eps 2^-beta delta^beta (explicit-constant form)
    bool tail_ok = false;      ///< tail_constant <= eps (1/r_max + 1/delta)^-beta, covering [r_max, inf)
    bool accepted() const { return grid_ok && delta1_ok && tail_ok; }
};

DeltaAssessment assess_delta(const RadialProfile& profile, const FindDeltaOptions& opts);

struct FindDeltaResult {
    double delta;
    RadialProfile profile;
    std::vector<DeltaAssessment> attempts;
};

/// First delta in delta0 2^-j, j = 0..max_halvings, whose profile passes
/// assess_delta. Throws SearchExhausted otherwise.
FindDeltaResult find_delta(const Nonlinearity& f, const StructureParams& params,
                           const FindDeltaOptions& opts = {});

} // namespace liouville
