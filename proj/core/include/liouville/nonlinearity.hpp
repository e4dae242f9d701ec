#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "liouville/expr.hpp"
#include "liouville/params.hpp"

namespace liouville {

/// The right-hand side f of -Delta_p u >= f(u).
///
/// Values are immutable and cheap to copy (wrappers share their base), so a
/// single instance may be evaluated concurrently.
class Nonlinearity {
public:
    /// f(z) = z^lambda.
    struct Power {
        double lambda;
    };
    /// f(z) = z^q log^mu(e + 1/z), with f(0) = 0.
    struct PowerLog {
        double mu;
        double q;
    };
    struct Expression {
        ExprPtr ast;
    };
    /// f(z) = base(z + alpha); the form f takes after subtracting inf u.
    struct Shifted {
        std::shared_ptr<const Nonlinearity> base;
        double alpha;
    };
    /// f(z) = max{base(z), z^exponent}.
    struct Floored {
        std::shared_ptr<const Nonlinearity> base;
        double exponent;
    };
    using Variant = std::variant<Power, PowerLog, Expression, Shifted, Floored>;

    static Nonlinearity power(double lambda);
    static Nonlinearity power_log(double mu, double q);
    /// PowerLog at the critical power q = n(p-1)/(n-p) of `params`.
    static Nonlinearity power_log(double mu, const StructureParams& params);
    static Nonlinearity expression(ExprPtr ast);
    /// f(z) = c, as a constant expression.
    static Nonlinearity constant(double c);

    const Variant& variant() const noexcept { return rep_; }

    /// f(zeta) for zeta >= 0. Throws DomainError / OverflowError.
    double operator()(double zeta) const;

    /// log f(exp(log_zeta)); -inf where f vanishes. Stays accurate where
    /// zeta itself underflows binary64.
    double log_eval(double log_zeta) const;

    /// log(f(zeta) / zeta^k). The power cancels exactly for Power, PowerLog
    /// and power floors; expressions subtract, so they lose accuracy once
    /// |k log zeta| dwarfs the remainder.
    double log_eval_over_power(double log_zeta, double k) const;

    /// Human-readable form; for Power, PowerLog and Expression this is valid
    /// input to parse_nonlinearity.
    std::string to_string() const;

private:
    explicit Nonlinearity(Variant rep) : rep_(std::move(rep)) {}
    friend Nonlinearity shift(const Nonlinearity&, double);
    friend Nonlinearity floor_by_power(const Nonlinearity&, const StructureParams&);

    Variant rep_;
};

/// Parses an expression in the variable z (see ExprNode for the grammar).
Nonlinearity parse_nonlinearity(std::string_view source);

inline double eval(const Nonlinearity& f, double zeta) { return f(zeta); }

/// f(. + alpha). Throws DomainError if alpha < 0.
Nonlinearity shift(const Nonlinearity& f, double alpha);

/// max{f(z), z^(1+q)}: strictly positive on (0, eps) and with the same
/// criterion verdict as f.
Nonlinearity floor_by_power(const Nonlinearity& f, const StructureParams& params);

struct MonotoneCheck {
    bool monotone = true;
    /// First grid pair (zeta_i, zeta_{i+1}) with f(zeta_i) > f(zeta_{i+1}) + tol.
    struct Violation {
        int index;
        double zeta_lo;
        double zeta_hi;
        double f_lo;
        double f_hi;
    };
    std::optional<Violation> violation;
};

/// Samples f on `samples` log-spaced points in [eps * 2^-40, eps] and checks
/// f(zeta_i) <= f(zeta_{i+1}) + rel_tol * max(|f(zeta_i)|, |f(zeta_{i+1})|).
MonotoneCheck check_monotone(const Nonlinearity& f, double eps, int samples,
                             double rel_tol = 1e-12);

} // namespace liouville
