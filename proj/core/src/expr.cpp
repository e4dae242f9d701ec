#include "liouville/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <system_error>

#include "liouville/error.hpp"

namespace liouville {

namespace {

using Op = ExprNode::Op;

constexpr double kInf = std::numeric_limits<double>::infinity();

bool is_binary(Op op) {
    return op == Op::Add || op == Op::Sub || op == Op::Mul || op == Op::Div || op == Op::Pow;
}

bool is_unary(Op op) { return op == Op::Neg || op == Op::Log || op == Op::Exp; }

} // namespace

ExprNode::ExprNode(Op op, double value, ExprPtr lhs, ExprPtr rhs)
    : op_(op), value_(value), lhs_(std::move(lhs)), rhs_(std::move(rhs)) {}

ExprPtr ExprNode::constant(double value) {
    if (!std::isfinite(value) || value < 0.0) {
        throw DomainError("expression constants must be finite and non-negative");
    }
    return std::make_shared<const ExprNode>(Op::Constant, value, nullptr, nullptr);
}

ExprPtr ExprNode::variable() {
    return std::make_shared<const ExprNode>(Op::Variable, 0.0, nullptr, nullptr);
}

ExprPtr ExprNode::euler() {
    return std::make_shared<const ExprNode>(Op::Euler, 0.0, nullptr, nullptr);
}

ExprPtr ExprNode::unary(Op op, ExprPtr operand) {
    if (!is_unary(op) || !operand) {
        throw std::invalid_argument("ExprNode::unary: bad operator or operand");
    }
    return std::make_shared<const ExprNode>(op, 0.0, std::move(operand), nullptr);
}

ExprPtr ExprNode::binary(Op op, ExprPtr lhs, ExprPtr rhs) {
    if (!is_binary(op) || !lhs || !rhs) {
        throw std::invalid_argument("ExprNode::binary: bad operator or operands");
    }
    return std::make_shared<const ExprNode>(op, 0.0, std::move(lhs), std::move(rhs));
}

int ExprNode::arity() const noexcept {
    if (is_binary(op_)) return 2;
    if (is_unary(op_)) return 1;
    return 0;
}

bool operator==(const ExprNode& a, const ExprNode& b) {
    if (a.op_ != b.op_) return false;
    switch (a.arity()) {
    case 0: return a.op_ != Op::Constant || a.value_ == b.value_;
    case 1: return *a.lhs_ == *b.lhs_;
    default: return *a.lhs_ == *b.lhs_ && *a.rhs_ == *b.rhs_;
    }
}

// ---------------------------------------------------------------------------
// Parser

namespace {

class Parser {
public:
    explicit Parser(std::string_view src) : src_(src) {}

    ExprPtr parse() {
        skip_space();
        if (pos_ == src_.size()) fail("empty expression");
        ExprPtr root = parse_expr();
        skip_space();
        if (pos_ != src_.size()) fail("unexpected character '" + std::string(1, src_[pos_]) + "'");
        return root;
    }

private:
    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, pos_); }

    void skip_space() {
        while (pos_ < src_.size() && (src_[pos_] == ' ' || src_[pos_] == '\t')) ++pos_;
    }

    bool accept(char c) {
        skip_space();
        if (pos_ < src_.size() && src_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    ExprPtr parse_expr() {
        ExprPtr lhs = parse_term();
        for (;;) {
            if (accept('+')) {
                lhs = ExprNode::binary(Op::Add, lhs, parse_term());
            } else if (accept('-')) {
                lhs = ExprNode::binary(Op::Sub, lhs, parse_term());
            } else {
                return lhs;
            }
        }
    }

    ExprPtr parse_term() {
        ExprPtr lhs = parse_unary();
        for (;;) {
            if (accept('*')) {
                lhs = ExprNode::binary(Op::Mul, lhs, parse_unary());
            } else if (accept('/')) {
                lhs = ExprNode::binary(Op::Div, lhs, parse_unary());
            } else {
                return lhs;
            }
        }
    }

    ExprPtr parse_unary() {
        if (accept('-')) return ExprNode::unary(Op::Neg, parse_unary());
        return parse_power();
    }

    ExprPtr parse_power() {
        ExprPtr base = parse_primary();
        if (accept('^')) return ExprNode::binary(Op::Pow, base, parse_unary());
        return base;
    }

    ExprPtr parse_primary() {
        skip_space();
        if (pos_ == src_.size()) fail("unexpected end of input, expected an operand");
        const char c = src_[pos_];
        if (c == '(') {
            ++pos_;
            ExprPtr inner = parse_expr();
            if (!accept(')')) fail("expected ')'");
            return inner;
        }
        if ((c >= '0' && c <= '9') || c == '.') return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_identifier();
        fail("expected an operand, found '" + std::string(1, c) + "'");
    }

    ExprPtr parse_number() {
        const char* first = src_.data() + pos_;
        const char* last = src_.data() + src_.size();
        double value = 0.0;
        auto [ptr, ec] = std::from_chars(first, last, value);
        if (ec == std::errc::result_out_of_range) fail("numeric literal out of range");
        if (ec != std::errc() || ptr == first) fail("malformed numeric literal");
        pos_ += static_cast<std::size_t>(ptr - first);
        return ExprNode::constant(value);
    }

    ExprPtr parse_identifier() {
        const std::size_t start = pos_;
        while (pos_ < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
            ++pos_;
        }
        const std::string_view name = src_.substr(start, pos_ - start);
        if (name == "z") return ExprNode::variable();
        if (name == "e") return ExprNode::euler();
        if (name == "log" || name == "exp") {
            if (!accept('(')) fail("expected '(' after function name '" + std::string(name) + "'");
            ExprPtr arg = parse_expr();
            if (!accept(')')) fail("expected ')'");
            return ExprNode::unary(name == "log" ? Op::Log : Op::Exp, arg);
        }
        pos_ = start;
        fail("unknown identifier '" + std::string(name) + "' (the variable is 'z')");
    }

    std::string_view src_;
    std::size_t pos_ = 0;
};

} // namespace

ExprPtr parse_expr(std::string_view source) { return Parser(source).parse(); }

// ---------------------------------------------------------------------------
// Printer

namespace {

// Binding strength of the construct that renders a node; higher binds tighter.
int precedence(Op op) {
    switch (op) {
    case Op::Add:
    case Op::Sub: return 1;
    case Op::Mul:
    case Op::Div: return 2;
    case Op::Neg: return 3;
    case Op::Pow: return 4;
    default: return 5;
    }
}

std::string format_number(double value) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    (void)ec;
    return std::string(buf, ptr);
}

void print(const ExprNode& node, int min_prec, std::string& out) {
    const int prec = precedence(node.op());
    const bool paren = prec < min_prec;
    if (paren) out += '(';
    switch (node.op()) {
    case Op::Constant: out += format_number(node.value()); break;
    case Op::Variable: out += 'z'; break;
    case Op::Euler: out += 'e'; break;
    case Op::Neg:
        out += '-';
        print(*node.lhs(), 3, out);
        break;
    case Op::Log:
    case Op::Exp:
        out += node.op() == Op::Log ? "log(" : "exp(";
        print(*node.lhs(), 0, out);
        out += ')';
        break;
    case Op::Pow:
        print(*node.lhs(), 5, out);
        out += '^';
        print(*node.rhs(), 3, out);
        break;
    default: {
        const char* sym = node.op() == Op::Add ? " + "
                        : node.op() == Op::Sub ? " - "
                        : node.op() == Op::Mul ? " * "
                                               : " / ";
        print(*node.lhs(), prec, out);
        out += sym;
        print(*node.rhs(), prec + 1, out);
        break;
    }
    }
    if (paren) out += ')';
}

} // namespace

std::string to_string(const ExprNode& node) {
    std::string out;
    print(node, 0, out);
    return out;
}

// ---------------------------------------------------------------------------
// Plain evaluation

namespace {

double checked(double result, const char* what) {
    if (std::isnan(result)) throw DomainError(std::string("non-real result in ") + what);
    if (std::isinf(result)) throw OverflowError(std::string("overflow in ") + what);
    return result;
}

bool is_integer(double y) { return std::isfinite(y) && std::nearbyint(y) == y; }

double checked_pow(double x, double y) {
    if (x < 0.0 && !is_integer(y)) {
        throw DomainError("negative base under a non-integer power");
    }
    if (x == 0.0 && y < 0.0) throw DomainError("zero raised to a negative power");
    return checked(std::pow(x, y), "power");
}

} // namespace

double evaluate(const ExprNode& node, double z) {
    switch (node.op()) {
    case Op::Constant: return node.value();
    case Op::Variable: return z;
    case Op::Euler: return std::numbers::e;
    case Op::Neg: return -evaluate(*node.lhs(), z);
    case Op::Log: {
        const double x = evaluate(*node.lhs(), z);
        if (!(x > 0.0)) throw DomainError("log of a non-positive argument");
        return std::log(x);
    }
    case Op::Exp: return checked(std::exp(evaluate(*node.lhs(), z)), "exp");
    case Op::Add: return checked(evaluate(*node.lhs(), z) + evaluate(*node.rhs(), z), "sum");
    case Op::Sub: return checked(evaluate(*node.lhs(), z) - evaluate(*node.rhs(), z), "difference");
    case Op::Mul: return checked(evaluate(*node.lhs(), z) * evaluate(*node.rhs(), z), "product");
    case Op::Div: {
        const double num = evaluate(*node.lhs(), z);
        const double den = evaluate(*node.rhs(), z);
        if (den == 0.0) throw DomainError("division by zero");
        return checked(num / den, "quotient");
    }
    case Op::Pow: return checked_pow(evaluate(*node.lhs(), z), evaluate(*node.rhs(), z));
    }
    throw std::logic_error("unreachable");
}

// ---------------------------------------------------------------------------
// Sign / log-magnitude evaluation

namespace {

struct LogValue {
    int sign = 0;         // -1, 0, +1
    double log_mag = 0.0; // log|x|; meaningless when sign == 0

    static LogValue zero() { return {0, -kInf}; }

    static LogValue make(int sign, double log_mag) {
        if (sign == 0 || log_mag == -kInf) return zero();
        if (std::isnan(log_mag)) throw DomainError("non-real intermediate value");
        if (log_mag == kInf) throw OverflowError("intermediate value exceeds extended range");
        return {sign, log_mag};
    }

    static LogValue from_double(double x) {
        if (x == 0.0) return zero();
        return make(x > 0.0 ? 1 : -1, std::log(std::fabs(x)));
    }

    double to_double() const {
        if (sign == 0) return 0.0;
        return sign * std::exp(log_mag);
    }
};

LogValue add(LogValue a, LogValue b) {
    if (a.sign == 0) return b;
    if (b.sign == 0) return a;
    const LogValue& hi = a.log_mag >= b.log_mag ? a : b;
    const LogValue& lo = a.log_mag >= b.log_mag ? b : a;
    const double d = std::exp(lo.log_mag - hi.log_mag);
    if (a.sign == b.sign) return LogValue::make(hi.sign, hi.log_mag + std::log1p(d));
    if (a.log_mag == b.log_mag) return LogValue::zero();
    return LogValue::make(hi.sign, hi.log_mag + std::log1p(-d));
}

LogValue negate(LogValue a) { return {-a.sign, a.log_mag}; }

LogValue multiply(LogValue a, LogValue b) {
    if (a.sign == 0 || b.sign == 0) return LogValue::zero();
    return LogValue::make(a.sign * b.sign, a.log_mag + b.log_mag);
}

LogValue divide(LogValue a, LogValue b) {
    if (b.sign == 0) throw DomainError("division by zero");
    if (a.sign == 0) return LogValue::zero();
    return LogValue::make(a.sign * b.sign, a.log_mag - b.log_mag);
}

LogValue power(LogValue base, LogValue exponent) {
    const double y = exponent.to_double();
    if (!std::isfinite(y)) throw OverflowError("exponent exceeds binary64 range");
    if (base.sign == 0) {
        if (y > 0.0) return LogValue::zero();
        if (y == 0.0) return {1, 0.0};
        throw DomainError("zero raised to a negative power");
    }
    if (y == 0.0) return {1, 0.0};
    if (base.sign < 0) {
        if (!is_integer(y)) throw DomainError("negative base under a non-integer power");
        const bool odd = std::fmod(std::fabs(y), 2.0) == 1.0;
        return LogValue::make(odd ? -1 : 1, y * base.log_mag);
    }
    return LogValue::make(1, y * base.log_mag);
}

LogValue eval_log(const ExprNode& node, double log_z) {
    switch (node.op()) {
    case Op::Constant: return LogValue::from_double(node.value());
    case Op::Variable: return LogValue::make(1, log_z);
    case Op::Euler: return {1, 1.0};
    case Op::Neg: return negate(eval_log(*node.lhs(), log_z));
    case Op::Log: {
        const LogValue x = eval_log(*node.lhs(), log_z);
        if (x.sign <= 0) throw DomainError("log of a non-positive argument");
        return LogValue::from_double(x.log_mag);
    }
    case Op::Exp: {
        const double x = eval_log(*node.lhs(), log_z).to_double();
        if (x == kInf) throw OverflowError("overflow in exp");
        return LogValue::make(1, x);
    }
    case Op::Add: return add(eval_log(*node.lhs(), log_z), eval_log(*node.rhs(), log_z));
    case Op::Sub:
        return add(eval_log(*node.lhs(), log_z), negate(eval_log(*node.rhs(), log_z)));
    case Op::Mul: return multiply(eval_log(*node.lhs(), log_z), eval_log(*node.rhs(), log_z));
    case Op::Div: return divide(eval_log(*node.lhs(), log_z), eval_log(*node.rhs(), log_z));
    case Op::Pow: return power(eval_log(*node.lhs(), log_z), eval_log(*node.rhs(), log_z));
    }
    throw std::logic_error("unreachable");
}

} // namespace

double evaluate_log(const ExprNode& node, double log_z) {
    if (std::isnan(log_z)) throw DomainError("log_z is NaN");
    const LogValue v = eval_log(node, log_z);
    if (v.sign < 0) throw DomainError("nonlinearity evaluated to a negative value");
    return v.sign == 0 ? -kInf : v.log_mag;
}

} // namespace liouville
