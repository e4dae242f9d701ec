#pragma once

#include <functional>
#include <vector>

namespace liouville {

/// Accept when abs_error <= max(abs, rel * |value|). Set abs = 0 for a purely
/// relative request when the scale of the integral is unknown.
struct Tolerance {
    double rel = 1e-10;
    double abs = 1e-14;

    double bound(double value) const;
};

struct QuadratureResult {
    double value = 0.0;
    double abs_error = 0.0;
    int subdivisions = 0;
    bool converged = false;
};

using Integrand = std::function<double(double)>;

/// Globally adaptive Gauss-Kronrod (7, 15) quadrature on [a, b]. The rule is
/// open, so integrable endpoint singularities are fine; the integrand is never
/// evaluated at a or b. Intervals are split up to depth 60 (geometrically
/// towards a and b, by halves elsewhere), and at most
/// 10^6 intervals are kept.
///
/// Non-convergence is reported through `converged`, with the best estimate in
/// `value`. Throws QuadratureError if g returns NaN or infinity.
QuadratureResult integrate(const Integrand& g, double a, double b, Tolerance tol = {});

/// Integral of g over [a, inf), mapped to (0, 1] by t = 1/(1 + x - a).
/// `converged` is false when the mapped integrand is not integrable at t = 0.
QuadratureResult integrate_to_infinity(const Integrand& g, double a, Tolerance tol = {});

/// Entry k is the integral of g over [eps 2^-(k+1), eps 2^-k], k = 0..K-1.
std::vector<QuadratureResult> dyadic_shell_integrals(const Integrand& g, double eps, int shells,
                                           Tolerance tol = {});

/// The same shells in the logarithmic coordinate s = log(eps / zeta):
/// entry k is the integral of h over [k log 2, (k+1) log 2], where h already
/// includes the Jacobian (h(s) = zeta g(zeta)).
std::vector<QuadratureResult> log_shell_integrals(const Integrand& h, int shells,
                                                  Tolerance tol = {});

} // namespace liouville
