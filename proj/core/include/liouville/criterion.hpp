#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "liouville/nonlinearity.hpp"
#include "liouville/params.hpp"
#include "liouville/quadrature.hpp"

namespace liouville {

enum class Verdict { Diverges, Converges, Inconclusive };
enum class Method { Analytic, Numeric };

std::string_view to_string(Verdict verdict);
std::string_view to_string(Method method);

/// Evidence gathered by the dyadic shell heuristic.
struct ShellDiagnostics {
    std::vector<double> shells;   ///< integrals over [eps 2^-(k+1), eps 2^-k]
    double slope = 0.0;           ///< least-squares slope of log(shell_k) over the last K/2
    double min_ratio = 0.0;       ///< min shell_k / shell_(k-1) over the same window
    double partial_sum = 0.0;
    double tail_bound = 0.0;      ///< geometric extrapolation of the missing tail
    std::optional<int> failed_shell;
    std::string note;
};

/// Outcome of the divergence / convergence test for
///   K_f = integral_0^eps f(z) z^-(1+q) dz.
/// Diverges: every non-negative solution vanishes identically.
/// Converges: a positive radial solution of -Delta_p u >= f(u) exists.
struct CriterionVerdict {
    Verdict verdict = Verdict::Inconclusive;
    Method method = Method::Numeric;
    double value = 0.0;     ///< K_f when verdict == Converges
    double abs_error = 0.0;
    std::optional<ShellDiagnostics> diagnostics; ///< set by the numeric path
    std::string reason;
};

struct ClassifyOptions {
    int shells = 40;
    double ratio_cut = 0.999;
    double slope_cut = 0.01;
    /// Converges only if the extrapolated tail is below this fraction of the
    /// partial sum.
    double tail_tol = 0.02;
    Tolerance tol{};
    bool check_monotone = true;
    int monotone_samples = 400;
    /// Skip the closed-form rules and always run the shell heuristic.
    bool force_numeric = false;
};

/// z -> f(z) z^-(1+q). Evaluation errors propagate.
std::function<double(double)> criterion_integrand(const Nonlinearity& f,
                                                  const StructureParams& params);

/// The criterion integrand in s = log(eps / z), Jacobian included:
/// s -> f(eps e^-s) (eps e^-s)^-q. Evaluated in log space, so arbitrarily
/// small z are handled.
std::function<double(double)> log_criterion_integrand(const Nonlinearity& f,
                                                      const StructureParams& params);

/// Throws MonotonicityError if the check is enabled and fails.
CriterionVerdict classify(const Nonlinearity& f, const StructureParams& params,
                          const ClassifyOptions& opts = {});

/// The shell heuristic alone.
CriterionVerdict classify_numeric(const Nonlinearity& f, const StructureParams& params,
                                  const ClassifyOptions& opts = {});

/// K_f as the sum of `shells` dyadic shells plus the remaining part near 0,
/// the latter integrated to s = infinity in the log coordinate. Throws
/// DivergentCriterion if that remainder does not converge (run classify).
QuadratureResult criterion_value(const Nonlinearity& f, const StructureParams& params,
                                 Tolerance tol = {}, int shells = 40);

} // namespace liouville
