#include "liouville/nonlinearity.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>

#include "liouville/error.hpp"

namespace liouville {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string format_number(double value) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    (void)ec;
    return std::string(buf, ptr);
}

std::string format_exponent(double value) {
    return value < 0.0 ? "(" + format_number(value) + ")" : format_number(value);
}

double checked_result(double value) {
    if (std::isnan(value)) throw DomainError("nonlinearity produced NaN");
    if (std::isinf(value)) throw OverflowError("nonlinearity overflowed binary64");
    if (value < 0.0) throw DomainError("nonlinearity evaluated to a negative value");
    return value;
}

// log(e + 1/zeta) from log(zeta), accurate when zeta underflows.
double log_e_plus_inverse(double log_zeta) {
    if (log_zeta < 0.0) return -log_zeta + std::log1p(std::numbers::e * std::exp(log_zeta));
    return std::log(std::numbers::e + std::exp(-log_zeta));
}

// log(exp(log_zeta) + alpha) for alpha > 0.
double log_sum(double log_zeta, double alpha) {
    const double log_alpha = std::log(alpha);
    if (log_zeta < log_alpha) return log_alpha + std::log1p(std::exp(log_zeta - log_alpha));
    return log_zeta + std::log1p(std::exp(log_alpha - log_zeta));
}

// log(z^exponent) with 0^0 = 1.
double log_power(double exponent, double log_zeta) {
    if (exponent == 0.0) return 0.0;
    const double v = exponent * log_zeta;
    if (v == kInf) throw DomainError("zero raised to a negative power");
    return v;
}

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

} // namespace

Nonlinearity Nonlinearity::power(double lambda) {
    if (!std::isfinite(lambda)) throw DomainError("power exponent must be finite");
    return Nonlinearity(Power{lambda});
}

Nonlinearity Nonlinearity::power_log(double mu, double q) {
    if (!std::isfinite(mu) || !std::isfinite(q) || !(q > 0.0)) {
        throw DomainError("power-log needs finite mu and q > 0");
    }
    return Nonlinearity(PowerLog{mu, q});
}

Nonlinearity Nonlinearity::power_log(double mu, const StructureParams& params) {
    return power_log(mu, critical_exponent(params));
}

Nonlinearity Nonlinearity::expression(ExprPtr ast) {
    if (!ast) throw std::invalid_argument("Nonlinearity::expression: null tree");
    return Nonlinearity(Expression{std::move(ast)});
}

Nonlinearity Nonlinearity::constant(double c) { return expression(ExprNode::constant(c)); }

double Nonlinearity::operator()(double zeta) const {
    if (!(zeta >= 0.0)) throw DomainError("f is defined on [0, inf) only");
    return std::visit(
        overloaded{
            [&](const Power& f) {
                if (zeta == 0.0) {
                    if (f.lambda > 0.0) return 0.0;
                    if (f.lambda == 0.0) return 1.0;
                    throw DomainError("zero raised to a negative power");
                }
                return checked_result(std::pow(zeta, f.lambda));
            },
            [&](const PowerLog& f) {
                if (zeta == 0.0) return 0.0;
                const double log_term = log_e_plus_inverse(std::log(zeta));
                return checked_result(std::pow(zeta, f.q) * std::pow(log_term, f.mu));
            },
            [&](const Expression& f) { return checked_result(evaluate(*f.ast, zeta)); },
            [&](const Shifted& f) { return (*f.base)(zeta + f.alpha); },
            [&](const Floored& f) {
                const double floor = zeta == 0.0 ? (f.exponent == 0.0 ? 1.0 : 0.0)
                                                 : checked_result(std::pow(zeta, f.exponent));
                return std::max((*f.base)(zeta), floor);
            },
        },
        rep_);
}

double Nonlinearity::log_eval(double log_zeta) const {
    if (std::isnan(log_zeta)) throw DomainError("log_zeta is NaN");
    const double out = std::visit(
        overloaded{
            [&](const Power& f) { return log_power(f.lambda, log_zeta); },
            [&](const PowerLog& f) {
                if (log_zeta == -kInf) return -kInf;
                return f.q * log_zeta + f.mu * std::log(log_e_plus_inverse(log_zeta));
            },
            [&](const Expression& f) { return evaluate_log(*f.ast, log_zeta); },
            [&](const Shifted& f) {
                if (f.alpha == 0.0) return f.base->log_eval(log_zeta);
                return f.base->log_eval(log_sum(log_zeta, f.alpha));
            },
            [&](const Floored& f) {
                return std::max(f.base->log_eval(log_zeta), log_power(f.exponent, log_zeta));
            },
        },
        rep_);
    if (std::isnan(out)) throw DomainError("nonlinearity produced NaN");
    if (out == kInf) throw OverflowError("nonlinearity overflowed the extended range");
    return out;
}

double Nonlinearity::log_eval_over_power(double log_zeta, double k) const {
    if (std::isnan(log_zeta)) throw DomainError("log_zeta is NaN");
    if (log_zeta == -kInf) return log_eval(log_zeta) == -kInf ? -kInf : kInf;
    const double out = std::visit(
        overloaded{
            [&](const Power& f) { return log_power(f.lambda - k, log_zeta); },
            [&](const PowerLog& f) {
                return (f.q - k) * log_zeta + f.mu * std::log(log_e_plus_inverse(log_zeta));
            },
            [&](const Floored& f) {
                return std::max(f.base->log_eval_over_power(log_zeta, k),
                                log_power(f.exponent - k, log_zeta));
            },
            [&](const Shifted& f) {
                if (f.alpha == 0.0) return f.base->log_eval_over_power(log_zeta, k);
                return log_eval(log_zeta) - k * log_zeta;
            },
            [&](const Expression&) { return log_eval(log_zeta) - k * log_zeta; },
        },
        rep_);
    if (std::isnan(out)) throw DomainError("nonlinearity produced NaN");
    return out;
}

std::string Nonlinearity::to_string() const {
    return std::visit(
        overloaded{
            [](const Power& f) { return "z^" + format_exponent(f.lambda); },
            [](const PowerLog& f) {
                return "z^" + format_exponent(f.q) + " * log(e + 1/z)^" + format_exponent(f.mu);
            },
            [](const Expression& f) { return liouville::to_string(*f.ast); },
            [](const Shifted& f) {
                return "shift(" + f.base->to_string() + ", " + format_number(f.alpha) + ")";
            },
            [](const Floored& f) {
                return "max(" + f.base->to_string() + ", z^" + format_exponent(f.exponent) + ")";
            },
        },
        rep_);
}

Nonlinearity parse_nonlinearity(std::string_view source) {
    return Nonlinearity::expression(parse_expr(source));
}

Nonlinearity shift(const Nonlinearity& f, double alpha) {
    if (!std::isfinite(alpha) || alpha < 0.0) throw DomainError("shift needs finite alpha >= 0");
    return Nonlinearity(Nonlinearity::Shifted{std::make_shared<const Nonlinearity>(f), alpha});
}

Nonlinearity floor_by_power(const Nonlinearity& f, const StructureParams& params) {
    const double exponent = 1.0 + critical_exponent(params);
    return Nonlinearity(Nonlinearity::Floored{std::make_shared<const Nonlinearity>(f), exponent});
}

MonotoneCheck check_monotone(const Nonlinearity& f, double eps, int samples, double rel_tol) {
    if (!(eps > 0.0) || !std::isfinite(eps)) throw DomainError("check_monotone needs eps > 0");
    if (samples < 2) throw std::invalid_argument("check_monotone needs at least 2 samples");

    constexpr double kDecades = 40.0; // powers of two below eps
    MonotoneCheck out;
    double prev_zeta = 0.0;
    double prev_f = 0.0;
    for (int i = 0; i < samples; ++i) {
        const double t = static_cast<double>(i) / (samples - 1);
        const double zeta = eps * std::exp2(-kDecades * (1.0 - t));
        const double value = f(zeta);
        if (i > 0) {
            const double scale = std::max(std::fabs(prev_f), std::fabs(value));
            if (prev_f > value + rel_tol * scale) {
                out.monotone = false;
                out.violation = MonotoneCheck::Violation{i - 1, prev_zeta, zeta, prev_f, value};
                return out;
            }
        }
        prev_zeta = zeta;
        prev_f = value;
    }
    return out;
}

} // namespace liouville
