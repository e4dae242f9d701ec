#pragma once

#include <memory>
#include <string>
#include <string_view>

namespace liouville {

class ExprNode;
using ExprPtr = std::shared_ptr<const ExprNode>;

/// Immutable operator tree over a single variable z.
///
/// Grammar accepted by parse_expr (standard precedence, lowest first):
///
///   expr    := term (('+' | '-') term)*
///   term    := unary (('*' | '/') unary)*
///   unary   := '-' unary | power
///   power   := primary ('^' unary)?          right-associative
///   primary := number | 'z' | 'e' | ('log' | 'exp') '(' expr ')' | '(' expr ')'
///
/// Constants stored in a tree are finite and non-negative; a negative literal
/// is a Neg node over a Constant, so parse(print(t)) == t.
class ExprNode {
public:
    enum class Op { Constant, Variable, Euler, Add, Sub, Mul, Div, Pow, Neg, Log, Exp };

    static ExprPtr constant(double value);
    static ExprPtr variable();
    static ExprPtr euler();
    static ExprPtr unary(Op op, ExprPtr operand);
    static ExprPtr binary(Op op, ExprPtr lhs, ExprPtr rhs);

    Op op() const noexcept { return op_; }
    double value() const noexcept { return value_; }
    const ExprPtr& lhs() const noexcept { return lhs_; }
    const ExprPtr& rhs() const noexcept { return rhs_; }
    int arity() const noexcept;

    friend bool operator==(const ExprNode& a, const ExprNode& b);

    ExprNode(Op op, double value, ExprPtr lhs, ExprPtr rhs);

private:
    Op op_;
    double value_ = 0.0;
    ExprPtr lhs_;
    ExprPtr rhs_;
};

/// Throws ParseError (with byte offset) on malformed input or an unknown
/// identifier.
ExprPtr parse_expr(std::string_view source);

/// Minimal-parenthesis rendering that parses back to an equal tree.
std::string to_string(const ExprNode& node);

/// Plain binary64 evaluation at z. Throws DomainError / OverflowError.
double evaluate(const ExprNode& node, double z);

/// Evaluates log(value) at z = exp(log_z) in sign/log-magnitude arithmetic,
/// so that z far below the binary64 range (and intermediate 1/z far above it)
/// stay representable. Returns -inf for a zero value; throws DomainError when
/// the value is negative or an operation leaves the real domain.
double evaluate_log(const ExprNode& node, double log_z);

} // namespace liouville
