#include "liouville/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace liouville {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string format_number(double x) {
    std::ostringstream out;
    out.precision(6);
    out << x;
    return out.str();
}

double median_of(std::vector<double> xs) {
    std::sort(xs.begin(), xs.end());
    const std::size_t mid = xs.size() / 2;
    return xs.size() % 2 == 1 ? xs[mid] : 0.5 * (xs[mid - 1] + xs[mid]);
}

template <class Check>
CheckResult guarded(const std::string& name, Check&& check) {
    try {
        return check();
    } catch (const Error& e) {
        throw CheckError(name, e.what());
    }
}

} // namespace

CheckError::CheckError(std::string check, const std::string& what)
    : Error(check + ": " + what), check_(std::move(check)) {}

void VerificationReport::add(CheckResult check) {
    const auto pos = std::upper_bound(
        checks.begin(), checks.end(), check.name,
        [](const std::string& name, const CheckResult& c) { return name < c.name; });
    checks.insert(pos, std::move(check));
    overall = std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
}

CheckResult flux_identity_check(const RadialProfile& profile, std::span<const double> r_grid,
                                const VerifyOptions& opts) {
    CheckResult out;
    out.name = "flux_identity_check";
    out.threshold = opts.flux_tol;
    if (r_grid.size() < 3) {
        out.note = "grid has no interior points";
        out.pass = true;
        return out;
    }
    const auto slope = [&profile](double r, double eta) {
        return profile.inner_increment(r * (1.0 - eta), r * (1.0 + eta)) / (2.0 * eta * r);
    };
    int unsettled = 0;
    for (std::size_t i = 1; i + 1 < r_grid.size(); ++i) {
        const double r = r_grid[i];
        const double target = profile.inner_integrand(r);
        double eta = 1e-2;
        double coarse = slope(r, eta);
        double best = kInf;
        bool settled = false;
        for (int k = 0; k < 6; ++k) {
            const double fine = slope(r, 0.5 * eta);
            const double extrapolated = (4.0 * fine - coarse) / 3.0;
            double residual = 0.0;
            if (target != 0.0) {
                residual = std::fabs(extrapolated - target) / std::fabs(target);
            } else if (extrapolated != 0.0) {
                residual = kInf;
            }
            if (residual >= best) {
                settled = true;
                break;
            }
            best = residual;
            coarse = fine;
            eta *= 0.5;
        }
        if (!settled) ++unsettled;
        ++out.grid_size;
        if (best > out.worst_residual || out.grid_size == 1) {
            out.worst_residual = best;
            out.worst_at = r;
        }
    }
    out.pass = out.worst_residual <= opts.flux_tol;
    if (unsettled > 0) {
        out.note = std::to_string(unsettled) + " points still improving at the step cap";
    }
    return out;
}

CheckResult supersolution_check(const RadialProfile& profile, std::span<const double> r_grid,
                                const VerifyOptions& opts) {
    CheckResult out;
    out.name = "supersolution_check";
    out.threshold = -opts.supersolution_tol;

    std::vector<double> radii;
    radii.reserve(r_grid.size() + 1);
    radii.push_back(0.0);
    for (double r : r_grid) {
        if (r > 0.0) radii.push_back(r);
    }
    const std::vector<double> w = profile.values(radii);
    const Nonlinearity& f = profile.nonlinearity();

    out.worst_residual = kInf;
    double worst_margin = kInf;
    double margin_at = 0.0;
    for (std::size_t i = 0; i < radii.size(); ++i) {
        const double env = profile.envelope(radii[i]);
        const double residual = f(env) - f(w[i]);
        if (residual < out.worst_residual) {
            out.worst_residual = residual;
            out.worst_at = radii[i];
        }
        if (env - w[i] < worst_margin) {
            worst_margin = env - w[i];
            margin_at = radii[i];
        }
    }
    out.grid_size = static_cast<int>(radii.size());
    const bool below_envelope = worst_margin >= -opts.slack;
    out.pass = out.worst_residual >= out.threshold && below_envelope;
    out.note = "min(envelope - w) = " + format_number(worst_margin) + " at r = " +
               format_number(margin_at);
    return out;
}

CheckResult gradient_decay_check(const RadialProfile& profile, const VerifyOptions& opts) {
    CheckResult out;
    out.name = "gradient_decay_check";
    out.threshold = 1.0 + 1e-9; // the bound is sharp as r -> 0, allow rounding
    const StructureParams& params = profile.params();
    const double f_eps = profile.nonlinearity()(params.eps);
    const double n = params.n;
    const double r0 = 1e-2 * profile.delta();

    bool monotone = true;
    bool surface_ok = true;
    double previous = kInf;
    double first = 0.0;
    double last = 0.0;
    for (int j = 0; j < opts.gradient_points; ++j) {
        const double r = std::ldexp(r0, -j);
        const double slope = std::fabs(profile.gradient(r));
        const double bound = std::pow(f_eps * r / n, 1.0 / (params.p - 1.0));
        const double ratio = bound > 0.0 ? slope / bound : (slope > 0.0 ? kInf : 0.0);
        if (ratio > out.worst_residual) {
            out.worst_residual = ratio;
            out.worst_at = r;
        }
        if (slope > previous) monotone = false;
        const double surface = profile.inner_integral(r);
        if (surface > f_eps * std::pow(r, n) / n * (1.0 + 1e-9)) surface_ok = false;
        previous = slope;
        if (j == 0) first = slope;
        last = slope;
    }
    out.grid_size = opts.gradient_points;
    const bool vanishes = last <= opts.gradient_drop * first;
    out.pass = monotone && surface_ok && vanishes && out.worst_residual <= out.threshold;
    out.note = "|w'| from " + format_number(first) + " to " + format_number(last);
    if (!monotone) out.note += "; not monotone";
    if (!surface_ok) out.note += "; surface term above f(eps) r^n / n";
    return out;
}

CheckResult normalization_check(const RadialProfile& profile, std::span<const double> r_grid,
                                const VerifyOptions& opts) {
    CheckResult out;
    out.name = "normalization_check";
    out.grid_size = static_cast<int>(r_grid.size());
    if (r_grid.empty() || profile.is_zero()) {
        out.pass = true;
        out.note = "profile vanishes identically";
        return out;
    }
    const std::vector<double> w = profile.values(r_grid);
    bool monotone = true;
    for (std::size_t i = 1; i < w.size(); ++i) {
        if (w[i] > w[i - 1]) {
            monotone = false;
            out.worst_at = r_grid[i];
        }
    }
    const double r_max = r_grid.back();
    const double bound = profile.decay_bound(r_max);
    out.worst_residual = w.back() / profile.sup();
    out.threshold = bound / profile.sup();
    if (monotone) out.worst_at = r_max;
    bool target_ok = true;
    if (opts.normalization_target) target_ok = w.back() <= *opts.normalization_target;
    out.pass = monotone && w.back() <= bound && target_ok;
    out.note = "w(" + format_number(r_max) + ") = " + format_number(w.back()) +
               " <= C_f r^-beta = " + format_number(bound) +
               "; inf w = 0 follows from the decay bound, the grid only samples it";
    if (!monotone) out.note += "; w increases somewhere on the grid";
    return out;
}

double unit_sphere_area(int n) {
    const double half = 0.5 * n;
    return 2.0 * std::pow(std::numbers::pi, half) / std::tgamma(half);
}

EnergyDiagnostic energy_diagnostic(const RadialProfile& profile, std::span<const double> radii) {
    if (radii.empty()) return {};
    if (!std::is_sorted(radii.begin(), radii.end()) || !(radii.front() > 0.0)) {
        throw DomainError("energy_diagnostic needs increasing positive radii");
    }
    EnergyDiagnostic out;
    out.radii.assign(radii.begin(), radii.end());
    out.E_values.assign(radii.size(), 0.0);
    out.ratios.assign(radii.size(), 0.0);
    out.monotone = true;
    if (profile.is_zero()) return out;

    const StructureParams& params = profile.params();
    const Nonlinearity& f = profile.nonlinearity();
    const double eps = params.eps;
    const int n = params.n;

    // w >= eps only near the origin; locate where it drops through eps.
    if (profile.sup() >= eps) {
        double hi = profile.delta();
        while (profile.value(hi) >= eps) hi *= 2.0;
        double lo = 0.0;
        for (int k = 0; k < 200 && hi - lo > 1e-15 * hi; ++k) {
            const double mid = 0.5 * (lo + hi);
            (profile.value(mid) >= eps ? lo : hi) = mid;
        }
        out.r_star = hi;
    }

    // log w over log r, tabulated once, so E needs no nested quadrature.
    const double table_lo = std::min(1e-8 * profile.delta(), 1e-3 * radii.front());
    const std::vector<double> table_r = log_grid(table_lo, radii.back(), 2048);
    const std::vector<double> table_w = profile.values(table_r);
    std::vector<double> x(table_r.size());
    std::vector<double> y(table_r.size());
    std::vector<double> m(table_r.size());
    for (std::size_t i = 0; i < table_r.size(); ++i) {
        x[i] = std::log(table_r[i]);
        y[i] = std::log(table_w[i]);
        m[i] = table_r[i] * profile.gradient(table_r[i]) / table_w[i];
    }
    const MonotoneCubic log_w(std::move(x), std::move(y), std::move(m));
    const double log_lo = std::log(table_lo);
    const double w_lo = table_w.front();

    // E integrand in s = log rho; below the table w is frozen at w(table_lo).
    const auto integrand = [&](double s) {
        const double w = s < log_lo ? w_lo : std::exp(log_w(s));
        if (w >= eps) return 0.0;
        return std::exp(n * s) * f(w);
    };
    const Tolerance tol{1e-9, 0.0};
    const double area = unit_sphere_area(n);
    double e = 0.0;
    double from = out.r_star;
    const std::vector<double> w_exact = profile.values(radii);
    for (std::size_t k = 0; k < radii.size(); ++k) {
        const double to = radii[k];
        if (to > from) {
            QuadratureResult piece;
            if (from > 0.0) {
                piece = integrate(integrand, std::log(from), std::log(to), tol);
            } else {
                piece = integrate_to_infinity(
                    [&](double u) { return integrand(std::log(to) - u); }, 0.0, tol);
            }
            e += area * piece.value;
            from = to;
        }
        if (k > 0 && e < out.E_values[k - 1]) out.monotone = false;
        out.E_values[k] = e;
        const double u_eps = std::min(w_exact[k], eps);
        out.ratios[k] = u_eps > 0.0
                            ? e * std::pow(to, params.p - n) / std::pow(u_eps, params.p - 1.0)
                            : kInf;
    }

    std::vector<double> positive;
    for (double ratio : out.ratios) {
        if (ratio > 0.0) positive.push_back(ratio);
    }
    if (!positive.empty()) {
        const double median = median_of(positive);
        out.max_over_median = *std::max_element(positive.begin(), positive.end()) / median;
        out.median_over_min = median / *std::min_element(positive.begin(), positive.end());
    }
    return out;
}

CheckResult energy_check(const EnergyDiagnostic& diag, double bound_factor) {
    CheckResult out;
    out.name = "energy_diagnostic";
    out.grid_size = static_cast<int>(diag.radii.size());
    out.threshold = bound_factor;
    out.worst_residual = std::max(diag.max_over_median, diag.median_over_min);
    // Point at the extreme ratio responsible for the larger spread.
    const bool high_side = diag.max_over_median >= diag.median_over_min;
    double extreme = high_side ? 0.0 : kInf;
    for (std::size_t k = 0; k < diag.ratios.size(); ++k) {
        const double ratio = diag.ratios[k];
        if (!(ratio > 0.0)) continue;
        if (high_side ? ratio > extreme : ratio < extreme) {
            extreme = ratio;
            out.worst_at = diag.radii[k];
        }
    }
    out.pass = diag.monotone && out.worst_residual <= bound_factor;
    out.note = "max/median " + format_number(diag.max_over_median) + ", median/min " +
               format_number(diag.median_over_min);
    if (!diag.monotone) out.note += "; E decreases";
    return out;
}

CheckResult delta_limit_check(const Nonlinearity& f, const StructureParams& params, int j_max,
                              const ProfileOptions& profile_opts, double target) {
    CheckResult out;
    out.name = "delta_limit_check";
    out.threshold = target;
    out.grid_size = j_max + 1;
    std::vector<double> sups;
    for (int j = 0; j <= j_max; ++j) {
        sups.push_back(RadialProfile::build(f, params, std::ldexp(1.0, -j), profile_opts).sup());
    }
    out.worst_residual = sups.back();
    out.worst_at = std::ldexp(1.0, -j_max);
    if (std::all_of(sups.begin(), sups.end(), [](double s) { return s == 0.0; })) {
        out.pass = true;
        out.note = "profile vanishes for every delta";
        return out;
    }
    int j0 = j_max;
    while (j0 > 0 && sups[static_cast<std::size_t>(j0)] < sups[static_cast<std::size_t>(j0 - 1)]) {
        --j0;
    }
    out.pass = j0 < j_max && sups.back() < target;
    out.note = "sup w strictly decreasing from j = " + std::to_string(j0) + "; sup at j = 0 is " +
               format_number(sups.front());
    return out;
}

VerificationReport verify_profile(const RadialProfile& profile, const VerifyOptions& opts) {
    const double delta = profile.delta();
    const std::vector<double> grid = log_grid(opts.grid_min.value_or(1e-6 * delta),
                                              opts.grid_max.value_or(1e6 * delta),
                                              opts.grid_points);
    VerificationReport report;
    report.add(guarded("flux_identity_check",
                       [&] { return flux_identity_check(profile, grid, opts); }));
    report.add(guarded("supersolution_check",
                       [&] { return supersolution_check(profile, grid, opts); }));
    report.add(guarded("gradient_decay_check", [&] { return gradient_decay_check(profile, opts); }));
    report.add(guarded("normalization_check",
                       [&] { return normalization_check(profile, grid, opts); }));
    report.add(guarded("energy_diagnostic", [&] {
        const std::vector<double> radii = log_grid(delta, 1e3 * delta, opts.energy_points);
        return energy_check(energy_diagnostic(profile, radii), opts.bound_factor);
    }));
    if (opts.run_delta_limit) {
        report.add(guarded("delta_limit_check", [&] {
            return delta_limit_check(profile.nonlinearity(), profile.params(), opts.delta_j_max,
                                     profile.options(), opts.delta_limit_target);
        }));
    }
    return report;
}

} // namespace liouville
