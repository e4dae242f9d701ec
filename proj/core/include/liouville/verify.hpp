#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "liouville/construct.hpp"
#include "liouville/error.hpp"

namespace liouville {

/// One line of a verification report. `worst_residual` is the quantity
/// compared against `threshold`; its meaning is specific to each check.
struct CheckResult {
    std::string name;
    int grid_size = 0;
    double worst_residual = 0.0;
    double worst_at = 0.0;
    double threshold = 0.0;
    bool pass = false;
    std::string note;
};

struct VerificationReport {
    std::vector<CheckResult> checks; ///< sorted by name
    bool overall = false;            ///< AND of every pass flag

    void add(CheckResult check);
};

/// A check threw instead of producing a result.
class CheckError : public Error {
public:
    CheckError(std::string check, const std::string& what);
    const std::string& check() const noexcept { return check_; }

private:
    std::string check_;
};

struct VerifyOptions {
    std::optional<double> grid_min; ///< default 1e-6 delta
    std::optional<double> grid_max; ///< default 1e6 delta
    int grid_points = 200;
    double slack = 1e-12;          ///< envelope >= w - slack
    double supersolution_tol = 1e-10;
    double flux_tol = 1e-6;
    int gradient_points = 50;      ///< r_j = 1e-2 delta 2^-j
    double gradient_drop = 1e-6;   ///< |w'(r_last)| <= drop * |w'(r_0)|
    /// Optional absolute target for w(grid_max); the decay bound is always checked.
    std::optional<double> normalization_target;
    int energy_points = 31;        ///< log-spaced over [delta, 1e3 delta]
    double bound_factor = 1e3;
    int delta_j_max = 10;
    double delta_limit_target = 1e-3;
    bool run_delta_limit = true;
};

/// Central differences of I (Richardson-extrapolated, step halved until the
/// residual stops improving) against r^(n-1) f(envelope(r)) at the interior
/// grid points. Residual is relative.
CheckResult flux_identity_check(const RadialProfile& profile, std::span<const double> r_grid,
                                const VerifyOptions& opts = {});

/// f(envelope(r)) - f(w(r)) >= -tol and envelope(r) >= w(r) - slack on the
/// grid and at r = 0. Residual is the minimum of the first difference.
CheckResult supersolution_check(const RadialProfile& profile, std::span<const double> r_grid,
                                const VerifyOptions& opts = {});

/// |w'(r_j)| along r_j -> 0: non-increasing, below (f(eps) r / n)^(1/(p-1)),
/// and the surface term I(r_j) <= f(eps) r_j^n / n. Residual is the largest
/// ratio |w'| / bound.
CheckResult gradient_decay_check(const RadialProfile& profile, const VerifyOptions& opts = {});

/// w non-increasing on the grid and w(r_max) below the explicit algebraic
/// decay bound, which tends to 0. Residual is w(r_max) / sup w.
CheckResult normalization_check(const RadialProfile& profile, std::span<const double> r_grid,
                                const VerifyOptions& opts = {});

struct EnergyDiagnostic {
    std::vector<double> radii;
    std::vector<double> E_values; ///< E(r) = |S^(n-1)| int_0^r f(u) rho^(n-1) [u < eps] drho
    std::vector<double> ratios;   ///< E(r) r^(p-n) / min(w(r), eps)^(p-1)
    double r_star = 0.0;          ///< w >= eps exactly on [0, r_star)
    bool monotone = false;
    double max_over_median = 0.0;
    double median_over_min = 0.0;
};

/// Surface area of the unit sphere in R^n, 2 pi^(n/2) / Gamma(n/2).
double unit_sphere_area(int n);

EnergyDiagnostic energy_diagnostic(const RadialProfile& profile, std::span<const double> radii);
CheckResult energy_check(const EnergyDiagnostic& diag, double bound_factor = 1e3);

/// sup w_delta over delta = 2^-j, j = 0..j_max: strictly decreasing from
/// some j on and below `target` at j_max. Residual is the final sup.
CheckResult delta_limit_check(const Nonlinearity& f, const StructureParams& params, int j_max,
                              const ProfileOptions& profile_opts = {},
                              double target = 1e-3);

/// Every check on the default grid [1e-6 delta, 1e6 delta]. A check that
/// throws is rethrown as CheckError carrying its name.
VerificationReport verify_profile(const RadialProfile& profile, const VerifyOptions& opts = {});

} // namespace liouville
