#include "liouville/criterion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "liouville/error.hpp"

namespace liouville {

std::string_view to_string(Verdict verdict) {
    switch (verdict) {
    case Verdict::Diverges: return "Diverges";
    case Verdict::Converges: return "Converges";
    case Verdict::Inconclusive: return "Inconclusive";
    }
    return "?";
}

std::string_view to_string(Method method) {
    return method == Method::Analytic ? "analytic" : "numeric";
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Exponents coming from critical_exponent() carry rounding; treat values
// this close as equal when deciding which side of the threshold they are on.
bool same_exponent(double a, double b) {
    return std::fabs(a - b) <= 1e-12 * std::max({1.0, std::fabs(a), std::fabs(b)});
}

CriterionVerdict verdict(Verdict v, Method m, std::string reason) {
    CriterionVerdict out;
    out.verdict = v;
    out.method = m;
    out.reason = std::move(reason);
    return out;
}

// Closed-form rules; nullopt when the family has none.
std::optional<CriterionVerdict> classify_analytic(const Nonlinearity& f,
                                                  const StructureParams& params,
                                                  const ClassifyOptions& opts) {
    const double q = critical_exponent(params);
    const auto& rep = f.variant();

    if (const auto* power = std::get_if<Nonlinearity::Power>(&rep)) {
        const double lambda = power->lambda;
        if (lambda < q || same_exponent(lambda, q)) {
            return verdict(Verdict::Diverges, Method::Analytic, "power lambda <= q");
        }
        CriterionVerdict out = verdict(Verdict::Converges, Method::Analytic, "power lambda > q");
        out.value = std::pow(params.eps, lambda - q) / (lambda - q);
        out.abs_error = 8.0 * std::numeric_limits<double>::epsilon() * out.value;
        return out;
    }

    if (const auto* plog = std::get_if<Nonlinearity::PowerLog>(&rep)) {
        // z^(a-1) log^mu(e + 1/z) near 0 with a = q_f - q.
        bool diverges = false;
        std::string reason;
        if (same_exponent(plog->q, q)) {
            diverges = plog->mu >= -1.0 - 1e-12;
            reason = diverges ? "critical power with mu >= -1" : "critical power with mu < -1";
        } else {
            diverges = plog->q < q;
            reason = diverges ? "power-log below the critical power" :
                                "power-log above the critical power";
        }
        if (diverges) return verdict(Verdict::Diverges, Method::Analytic, reason);
        CriterionVerdict out = verdict(Verdict::Converges, Method::Analytic, reason);
        const QuadratureResult k_f = criterion_value(f, params, opts.tol, opts.shells);
        out.value = k_f.value;
        out.abs_error = k_f.abs_error;
        return out;
    }

    if (const auto* shifted = std::get_if<Nonlinearity::Shifted>(&rep)) {
        if (shifted->alpha == 0.0) return classify_analytic(*shifted->base, params, opts);
        // base non-decreasing: f(z) >= base(alpha) > 0, and 1/z^(1+q) is not
        // integrable at 0.
        if ((*shifted->base)(shifted->alpha) > 0.0) {
            return verdict(Verdict::Diverges, Method::Analytic,
                           "shift by alpha > 0 with f(alpha) > 0");
        }
        return std::nullopt;
    }

    if (const auto* floored = std::get_if<Nonlinearity::Floored>(&rep)) {
        // max{g, z^(1+q)} <= g + z^(1+q), and z^(1+q) contributes exactly eps.
        if (!same_exponent(floored->exponent, 1.0 + q)) return std::nullopt;
        auto inner = classify_analytic(*floored->base, params, opts);
        if (!inner) return std::nullopt;
        if (inner->verdict != Verdict::Converges) {
            inner->reason = "floored: " + inner->reason;
            return inner;
        }
        CriterionVerdict out = verdict(Verdict::Converges, Method::Analytic,
                                       "floored: " + inner->reason);
        const QuadratureResult k_f = criterion_value(f, params, opts.tol, opts.shells);
        out.value = k_f.value;
        out.abs_error = k_f.abs_error;
        return out;
    }

    return std::nullopt;
}

double least_squares_slope(const std::vector<double>& ys, int first) {
    const int count = static_cast<int>(ys.size()) - first;
    double mean_k = 0.0;
    double mean_y = 0.0;
    for (int k = first; k < static_cast<int>(ys.size()); ++k) {
        mean_k += k;
        mean_y += ys[static_cast<std::size_t>(k)];
    }
    mean_k /= count;
    mean_y /= count;
    double sxy = 0.0;
    double sxx = 0.0;
    for (int k = first; k < static_cast<int>(ys.size()); ++k) {
        const double dk = k - mean_k;
        sxy += dk * (ys[static_cast<std::size_t>(k)] - mean_y);
        sxx += dk * dk;
    }
    return sxy / sxx;
}

} // namespace

std::function<double(double)> criterion_integrand(const Nonlinearity& f,
                                                  const StructureParams& params) {
    const double q = critical_exponent(params);
    return [f, q](double zeta) {
        if (!(zeta > 0.0)) throw DomainError("criterion integrand needs zeta > 0");
        return std::exp(f.log_eval_over_power(std::log(zeta), 1.0 + q));
    };
}

std::function<double(double)> log_criterion_integrand(const Nonlinearity& f,
                                                      const StructureParams& params) {
    const double q = critical_exponent(params);
    const double log_eps = std::log(params.eps);
    return [f, q, log_eps](double s) {
        const double log_ratio = f.log_eval_over_power(log_eps - s, q);
        if (log_ratio == -kInf) return 0.0;
        return std::exp(log_ratio);
    };
}

QuadratureResult criterion_value(const Nonlinearity& f, const StructureParams& params,
                                 Tolerance tol, int shells) {
    if (shells < 0) throw std::invalid_argument("criterion_value needs shells >= 0");
    const auto h = log_criterion_integrand(f, params);
    const Tolerance piece{tol.rel, tol.abs / (shells + 1)};

    QuadratureResult out;
    out.converged = true;
    QuadratureResult tail;
    try {
        if (shells > 0) {
            for (const QuadratureResult& shell : log_shell_integrals(h, shells, piece)) {
                out.value += shell.value;
                out.abs_error += shell.abs_error;
                out.subdivisions += shell.subdivisions;
                out.converged = out.converged && shell.converged;
            }
        }
        tail = integrate_to_infinity(h, shells * std::numbers::ln2, piece);
    } catch (const QuadratureError& e) {
        // f itself reports NaN as a DomainError, so this is overflow of f / z^(1+q)
        throw DivergentCriterion("criterion integrand overflows near 0 (" + f.to_string() +
                                 "): " + e.what());
    }
    if (!tail.converged) {
        throw DivergentCriterion(
            "criterion integral does not converge at 0 (" + f.to_string() +
            "); run classify to decide the regime");
    }
    out.value += tail.value;
    out.abs_error += tail.abs_error;
    out.subdivisions += tail.subdivisions;
    return out;
}

CriterionVerdict classify_numeric(const Nonlinearity& f, const StructureParams& params,
                                  const ClassifyOptions& opts) {
    if (opts.shells < 4) throw std::invalid_argument("classify needs at least 4 shells");
    const auto h = log_criterion_integrand(f, params);
    const int count = opts.shells;
    const int first = count / 2;

    ShellDiagnostics diag;
    diag.shells.reserve(static_cast<std::size_t>(count));
    for (int k = 0; k < count; ++k) {
        QuadratureResult shell;
        try {
            shell = integrate(h, k * std::numbers::ln2, (k + 1) * std::numbers::ln2, opts.tol);
        } catch (const Error& e) {
            diag.failed_shell = k;
            diag.note = e.what();
        }
        if (!diag.failed_shell && !shell.converged) {
            diag.failed_shell = k;
            diag.note = "shell quadrature did not converge";
        }
        if (diag.failed_shell) {
            CriterionVerdict out = verdict(Verdict::Inconclusive, Method::Numeric,
                                           "evaluation failed in shell " + std::to_string(k));
            out.diagnostics = std::move(diag);
            return out;
        }
        diag.shells.push_back(shell.value);
        diag.partial_sum += shell.value;
    }

    const auto window_begin = diag.shells.begin() + first;
    const bool any_zero = std::any_of(window_begin, diag.shells.end(),
                                      [](double v) { return v <= 0.0; });
    if (any_zero) {
        // f vanishes (to binary64) close to 0: convergent if the shells
        // decrease into zero, otherwise leave it open.
        const bool decreasing = std::is_sorted(window_begin, diag.shells.end(), std::greater<>());
        if (decreasing && diag.shells.back() == 0.0) {
            CriterionVerdict out = verdict(Verdict::Converges, Method::Numeric,
                                           "shells decrease to zero");
            diag.slope = -kInf;
            diag.note = "integrand vanishes near 0";
            const QuadratureResult k_f = criterion_value(f, params, opts.tol, count);
            out.value = k_f.value;
            out.abs_error = k_f.abs_error;
            out.diagnostics = std::move(diag);
            return out;
        }
        CriterionVerdict out = verdict(Verdict::Inconclusive, Method::Numeric,
                                       "zero shells interleaved with positive ones");
        out.diagnostics = std::move(diag);
        return out;
    }

    std::vector<double> logs(diag.shells.size());
    std::transform(diag.shells.begin(), diag.shells.end(), logs.begin(),
                   [](double v) { return std::log(v); });
    diag.slope = least_squares_slope(logs, first);
    diag.min_ratio = kInf;
    for (int k = first; k < count; ++k) {
        const auto i = static_cast<std::size_t>(k);
        diag.min_ratio = std::min(diag.min_ratio, diag.shells[i] / diag.shells[i - 1]);
    }

    if (diag.min_ratio >= opts.ratio_cut && diag.slope >= -opts.slope_cut) {
        diag.tail_bound = kInf;
        CriterionVerdict out = verdict(Verdict::Diverges, Method::Numeric,
                                       "shells do not decay toward 0");
        out.diagnostics = std::move(diag);
        return out;
    }

    if (diag.slope <= -opts.slope_cut) {
        const double rho = std::exp(diag.slope);
        diag.tail_bound = diag.shells.back() * rho / (1.0 - rho);
        if (diag.tail_bound < opts.tail_tol * diag.partial_sum) {
            CriterionVerdict out = verdict(Verdict::Converges, Method::Numeric,
                                           "shells decay geometrically");
            try {
                const QuadratureResult k_f = criterion_value(f, params, opts.tol, count);
                out.value = k_f.value;
                out.abs_error = k_f.abs_error;
            } catch (const Error& e) {
                out = verdict(Verdict::Inconclusive, Method::Numeric,
                              std::string("shells decay but the remainder failed: ") + e.what());
            }
            out.diagnostics = std::move(diag);
            return out;
        }
        CriterionVerdict out = verdict(Verdict::Inconclusive, Method::Numeric,
                                       "shells decay too slowly for a reliable tail bound");
        out.diagnostics = std::move(diag);
        return out;
    }

    CriterionVerdict out = verdict(Verdict::Inconclusive, Method::Numeric,
                                   "near-critical shell decay");
    out.diagnostics = std::move(diag);
    return out;
}

CriterionVerdict classify(const Nonlinearity& f, const StructureParams& params,
                          const ClassifyOptions& opts) {
    critical_exponent(params); // validates, throws for n <= p
    if (opts.check_monotone) {
        const MonotoneCheck mono = check_monotone(f, params.eps, opts.monotone_samples);
        if (!mono.monotone) {
            const auto& v = *mono.violation;
            throw MonotonicityError("f decreases on (0, eps] between z = " +
                                        std::to_string(v.zeta_lo) + " and z = " +
                                        std::to_string(v.zeta_hi),
                                    v.zeta_lo, v.zeta_hi);
        }
    }
    if (!opts.force_numeric) {
        if (auto analytic = classify_analytic(f, params, opts)) return *analytic;
    }
    return classify_numeric(f, params, opts);
}

} // namespace liouville
