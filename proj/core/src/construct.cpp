#include "liouville/construct.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "liouville/criterion.hpp"
#include "liouville/error.hpp"

namespace liouville {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// log(1 + e^y) without overflow.
double softplus(double y) {
    return y > 30.0 ? y + std::log1p(std::exp(-y)) : std::log1p(std::exp(y));
}

double safe_exp(double x) { return x == -kInf ? 0.0 : std::exp(x); }

// int_0^inf exp(h(s0 + dir u)) du, i.e. the integral of exp(h) over
// [s0, inf) for dir = +1 and over (-inf, s0] for dir = -1.
template <class H>
QuadratureResult half_line(const H& h, double s0, double dir, Tolerance tol) {
    return integrate_to_infinity([&](double u) { return safe_exp(h(s0 + dir * u)); }, 0.0, tol);
}

template <class H>
QuadratureResult segment(const H& h, double a, double b, Tolerance tol) {
    return integrate([&](double s) { return safe_exp(h(s)); }, a, b, tol);
}

} // namespace

double envelope(const StructureParams& params, double delta, double r) {
    if (r < 0.0) throw DomainError("envelope needs r >= 0");
    return params.eps * std::exp(-decay_exponent(params) * std::log1p(r / delta));
}

std::vector<double> log_grid(double lo, double hi, int points) {
    if (!(lo > 0.0) || !(hi > lo) || points < 2) {
        throw std::invalid_argument("log_grid needs 0 < lo < hi and at least 2 points");
    }
    std::vector<double> grid(static_cast<std::size_t>(points));
    const double a = std::log(lo);
    const double step = (std::log(hi) - a) / (points - 1);
    for (int i = 0; i < points; ++i) grid[static_cast<std::size_t>(i)] = std::exp(a + i * step);
    grid.front() = lo;
    grid.back() = hi;
    return grid;
}

RadialProfile RadialProfile::build(Nonlinearity f, StructureParams params, double delta,
                                   ProfileOptions opts) {
    params.validate();
    RadialProfile out;
    out.q_ = liouville::critical_exponent(params);
    out.beta_ = liouville::decay_exponent(params);
    if (!(delta > 0.0) || !std::isfinite(delta)) throw InvalidParams("delta must be positive");
    if (opts.cache_nodes < 2 || !(opts.cache_lo > 0.0) || !(opts.cache_hi > opts.cache_lo)) {
        throw InvalidParams("profile cache needs >= 2 nodes and 0 < cache_lo < cache_hi");
    }
    out.f_ = std::move(f);
    out.params_ = params;
    out.delta_ = delta;
    out.opts_ = opts;
    out.log_eps_ = std::log(params.eps);
    out.log_delta_ = std::log(delta);
    out.criterion_value_ = liouville::criterion_value(out.f_, params, opts.tol).value;

    const auto h = [&out](double s) { return out.log_inner_integrand(s); };
    const auto count = static_cast<std::size_t>(opts.cache_nodes);
    const double s_lo = out.log_delta_ + std::log(opts.cache_lo);
    const double s_hi = out.log_delta_ + std::log(opts.cache_hi);
    const double step = (s_hi - s_lo) / static_cast<double>(count - 1);
    std::vector<double> nodes(count);
    for (std::size_t i = 0; i < count; ++i) nodes[i] = s_lo + static_cast<double>(i) * step;
    nodes.back() = s_hi;
    out.s_hi_ = s_hi;

    std::vector<double> pieces(count - 1);
    double error = 0.0;
    for (std::size_t i = 0; i + 1 < count; ++i) {
        const QuadratureResult piece = segment(h, nodes[i], nodes[i + 1], opts.tol);
        if (!piece.converged) {
            throw QuadratureError("inner integral did not converge", std::exp(nodes[i]));
        }
        pieces[i] = piece.value;
        error += piece.abs_error;
    }
    const QuadratureResult head = half_line(h, s_lo, -1.0, opts.tol);
    const QuadratureResult tail = half_line(h, s_hi, 1.0, opts.tol);
    if (!head.converged) throw QuadratureError("inner integral near 0 did not converge", 0.0);
    if (!tail.converged) {
        throw DivergentCriterion("inner integral I(inf) is infinite for " + out.f_.to_string() +
                                 "; run classify to decide the regime");
    }

    std::vector<double> lower(count);
    std::vector<double> upper(count);
    lower.front() = head.value;
    for (std::size_t i = 1; i < count; ++i) lower[i] = lower[i - 1] + pieces[i - 1];
    upper.back() = tail.value;
    for (std::size_t i = count - 1; i-- > 0;) upper[i] = upper[i + 1] + pieces[i];

    out.inner_total_ = lower.back() + tail.value;
    out.inner_total_error_ = error + head.abs_error + tail.abs_error;
    out.zero_ = out.inner_total_ == 0.0;
    if (out.zero_) return out;

    // d log I / d s = zeta^n f / I; the tables start where I (resp. end
    // where I(inf) - I) is still representable.
    {
        const auto first = static_cast<std::size_t>(
            std::find_if(lower.begin(), lower.end(), [](double v) { return v > 0.0; }) -
            lower.begin());
        if (count - first >= 2) {
            std::vector<double> x(nodes.begin() + static_cast<std::ptrdiff_t>(first), nodes.end());
            std::vector<double> y(x.size());
            std::vector<double> m(x.size());
            for (std::size_t i = 0; i < x.size(); ++i) {
                y[i] = std::log(lower[first + i]);
                m[i] = safe_exp(h(x[i]) - y[i]);
            }
            out.log_lower_ = MonotoneCubic(std::move(x), std::move(y), std::move(m));
        }
    }
    {
        std::size_t end = count;
        while (end > 0 && !(upper[end - 1] > 0.0)) --end;
        if (end >= 2) {
            std::vector<double> x(nodes.begin(), nodes.begin() + static_cast<std::ptrdiff_t>(end));
            std::vector<double> y(x.size());
            std::vector<double> m(x.size());
            for (std::size_t i = 0; i < x.size(); ++i) {
                y[i] = std::log(upper[i]);
                m[i] = -safe_exp(h(x[i]) - y[i]);
            }
            out.log_upper_ = MonotoneCubic(std::move(x), std::move(y), std::move(m));
        }
    }

    out.sup_ = out.value(0.0);
    return out;
}

double RadialProfile::log_inner_integrand(double s) const {
    // n s + q log(envelope) collapses to the expression below because
    // q beta = n; cancelling it by hand keeps critical-power f accurate far out.
    const double log_env = log_eps_ - beta_ * softplus(s - log_delta_);
    const double remainder = f_.log_eval_over_power(log_env, q_);
    if (remainder == -kInf) return -kInf;
    return params_.n * (log_delta_ - softplus(log_delta_ - s)) + q_ * log_eps_ + remainder;
}

double RadialProfile::log_inner(double s) const {
    if (zero_) return -kInf;
    const auto h = [this](double t) { return log_inner_integrand(t); };
    if (!log_lower_.empty() && s >= log_lower_.nodes().front() && s <= s_hi_) return log_lower_(s);
    if (s > s_hi_) {
        const double rest = half_line(h, s, 1.0, opts_.tol).value;
        return std::log(inner_total_) + std::log1p(-std::min(rest / inner_total_, 1.0));
    }
    const double head = half_line(h, s, -1.0, opts_.tol).value;
    return head > 0.0 ? std::log(head) : -kInf;
}

double RadialProfile::log_complement(double s) const {
    if (zero_) return -kInf;
    const auto h = [this](double t) { return log_inner_integrand(t); };
    if (!log_upper_.empty() && s >= log_upper_.nodes().front() && s <= log_upper_.nodes().back()) {
        return log_upper_(s);
    }
    if (s > s_hi_ || log_upper_.empty() || s > log_upper_.nodes().back()) {
        const double rest = half_line(h, s, 1.0, opts_.tol).value;
        return rest > 0.0 ? std::log(rest) : -kInf;
    }
    const double inner = safe_exp(log_inner(s));
    return std::log(std::max(inner_total_ - inner, 0.0));
}

double RadialProfile::log_outer(double s) const {
    const double log_i = log_inner(s);
    if (log_i == -kInf) return -kInf;
    return (log_i - (params_.n - 1) * s) / (params_.p - 1.0) + s;
}

double RadialProfile::envelope(double r) const { return liouville::envelope(params_, delta_, r); }

double RadialProfile::inner_integrand(double x) const {
    if (!(x > 0.0)) return 0.0;
    return safe_exp(log_inner_integrand(std::log(x)) - std::log(x));
}

double RadialProfile::inner_integral(double zeta) const {
    if (!(zeta > 0.0)) return 0.0;
    return safe_exp(log_inner(std::log(zeta)));
}

double RadialProfile::inner_integral_direct(double zeta) const {
    if (!(zeta > 0.0) || zero_) return 0.0;
    const auto h = [this](double t) { return log_inner_integrand(t); };
    return half_line(h, std::log(zeta), -1.0, opts_.tol).value;
}

double RadialProfile::inner_increment(double a, double b) const {
    if (a > b) return -inner_increment(b, a);
    if (!(b > 0.0) || a == b) return 0.0;
    if (!(a > 0.0)) return inner_integral(b);
    const double at_a = inner_integral(a);
    if (at_a > 0.5 * inner_total_) {
        return safe_exp(log_complement(std::log(a))) - safe_exp(log_complement(std::log(b)));
    }
    return inner_integral(b) - at_a;
}

double RadialProfile::value(double r) const {
    if (r < 0.0 || std::isnan(r)) throw DomainError("profile needs r >= 0");
    if (zero_) return 0.0;
    const auto h = [this](double s) { return log_outer(s); };
    const double s0 = r > 0.0 ? std::log(r) : log_delta_;
    QuadratureResult total = half_line(h, s0, 1.0, opts_.tol);
    if (r == 0.0) {
        const QuadratureResult head = half_line(h, s0, -1.0, opts_.tol);
        total.value += head.value;
        total.converged = total.converged && head.converged;
    }
    if (!total.converged) {
        throw DivergentCriterion("outer integral for w did not converge at r = " +
                                 std::to_string(r));
    }
    return total.value;
}

std::vector<double> RadialProfile::values(std::span<const double> radii) const {
    if (!std::is_sorted(radii.begin(), radii.end())) {
        throw std::invalid_argument("values needs ascending radii");
    }
    std::vector<double> out(radii.size(), 0.0);
    if (radii.empty() || zero_) return out;
    if (radii.front() < 0.0) throw DomainError("profile needs r >= 0");
    const auto h = [this](double s) { return log_outer(s); };
    out.back() = value(radii.back());
    for (std::size_t i = radii.size() - 1; i-- > 0;) {
        const double a = radii[i];
        const double b = radii[i + 1];
        if (a == b) {
            out[i] = out[i + 1];
            continue;
        }
        const QuadratureResult piece = a > 0.0 ? segment(h, std::log(a), std::log(b), opts_.tol)
                                               : half_line(h, std::log(b), -1.0, opts_.tol);
        if (!piece.converged) throw QuadratureError("outer integral did not converge", a);
        out[i] = out[i + 1] + piece.value;
    }
    return out;
}

double RadialProfile::gradient(double r) const {
    if (!(r > 0.0)) return 0.0;
    const double s = std::log(r);
    return -safe_exp(log_outer(s) - s);
}

double RadialProfile::decay_bound_constant() const {
    if (criterion_value_ == 0.0) return 0.0;
    const double gamma = 1.0 / beta_;
    const double inside = std::log(gamma) + params_.n * log_delta_ + q_ * log_eps_ +
                          std::log(criterion_value_);
    return gamma * std::exp(inside / (params_.p - 1.0));
}

double RadialProfile::decay_bound(double r) const {
    if (!(r > 0.0)) return kInf;
    return decay_bound_constant() * std::pow(r, -beta_);
}

double RadialProfile::tail_constant() const {
    return std::pow(inner_total_ + inner_total_error_, 1.0 / (params_.p - 1.0)) / beta_;
}

double ChangeOfVariables::relative_gap() const {
    const double scale = std::max(std::fabs(direct.value), std::fabs(transformed.value));
    return scale == 0.0 ? 0.0 : std::fabs(direct.value - transformed.value) / scale;
}

ChangeOfVariables change_of_variables_check(const RadialProfile& profile, Tolerance tol) {
    const StructureParams& params = profile.params();
    const double delta = profile.delta();
    const double log_delta = std::log(delta);
    const double log_eps = std::log(params.eps);
    const double q = profile.critical_exponent();
    const double beta = profile.decay_exponent();
    const Nonlinearity& f = profile.nonlinearity();
    const int n = params.n;

    // Direct side: x on [0, delta], then x = delta e^u beyond, where the
    // integrand x^n f(envelope) is formed in logs.
    ChangeOfVariables out;
    const QuadratureResult near =
        integrate([&profile](double x) { return profile.inner_integrand(x); }, 0.0, delta, tol);
    const auto far_integrand = [&](double u) {
        const double remainder = f.log_eval_over_power(log_eps - beta * softplus(u), q);
        if (remainder == -kInf) return 0.0;
        return std::exp(n * (log_delta - softplus(-u)) + q * log_eps + remainder);
    };
    const QuadratureResult far = integrate_to_infinity(far_integrand, 0.0, tol);
    out.direct.value = near.value + far.value;
    out.direct.abs_error = near.abs_error + far.abs_error;
    out.direct.subdivisions = near.subdivisions + far.subdivisions;
    out.direct.converged = near.converged && far.converged;

    // Transformed side: zeta = eps e^-s. With q = n gamma its integrand is
    // eps^(q+1) (1 - e^(-gamma s))^(n-1) f(zeta) / zeta^q.
    const double gamma = 1.0 / beta;
    const auto transformed_integrand = [&](double s) {
        const double remainder = f.log_eval_over_power(log_eps - s, q);
        if (remainder == -kInf) return 0.0;
        return std::exp((q + 1.0) * log_eps + (n - 1) * std::log(-std::expm1(-gamma * s)) +
                        remainder);
    };
    out.transformed = integrate_to_infinity(transformed_integrand, 0.0, tol);
    const double scale = gamma * std::pow(delta, n) / params.eps;
    out.transformed.value *= scale;
    out.transformed.abs_error *= scale;
    return out;
}

DeltaAssessment assess_delta(const RadialProfile& profile, const FindDeltaOptions& opts) {
    const double delta = profile.delta();
    const StructureParams& params = profile.params();
    const double beta = profile.decay_exponent();
    const double r_min = opts.r_min.value_or(1e-6 * delta);
    const double r_max = opts.r_max.value_or(1e6 * delta);

    DeltaAssessment out;
    out.delta = delta;
    const std::vector<double> grid = log_grid(r_min, r_max, opts.grid_points);
    const std::vector<double> w = profile.values(grid);
    out.worst_margin = kInf;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double margin = profile.envelope(grid[i]) - w[i];
        if (margin < out.worst_margin) {
            out.worst_margin = margin;
            out.worst_at = grid[i];
        }
    }
    out.grid_ok = out.worst_margin >= -opts.slack;

    const double plateau = params.eps * std::exp2(-beta);
    out.delta1_ok = profile.sup() <= plateau + opts.slack;
    out.delta2_ok = profile.decay_bound_constant() <= plateau * std::pow(delta, beta);
    out.tail_ok = profile.tail_constant() <=
                  params.eps * std::pow(1.0 / r_max + 1.0 / delta, -beta);
    return out;
}

FindDeltaResult find_delta(const Nonlinearity& f, const StructureParams& params,
                           const FindDeltaOptions& opts) {
    if (!(opts.delta0 > 0.0) || !std::isfinite(opts.delta0)) {
        throw InvalidParams("delta0 must be positive");
    }
    if (opts.max_halvings < 0) throw InvalidParams("max_halvings must be >= 0");
    std::vector<DeltaAssessment> attempts;
    for (int j = 0; j <= opts.max_halvings; ++j) {
        const double delta = std::ldexp(opts.delta0, -j);
        RadialProfile profile = RadialProfile::build(f, params, delta, opts.profile);
        attempts.push_back(assess_delta(profile, opts));
        if (attempts.back().accepted()) {
            return FindDeltaResult{delta, std::move(profile), std::move(attempts)};
        }
    }
    std::ostringstream msg;
    const DeltaAssessment& last = attempts.back();
    msg << "no admissible delta down to " << last.delta << " after " << attempts.size()
        << " attempts (last: grid " << (last.grid_ok ? "ok" : "failed") << ", sup "
        << (last.delta1_ok ? "ok" : "failed") << ", tail " << (last.tail_ok ? "ok" : "failed")
        << ")";
    throw SearchExhausted(msg.str());
}

} // namespace liouville
