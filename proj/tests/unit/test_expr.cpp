#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "liouville/error.hpp"
#include "liouville/expr.hpp"

using namespace liouville;
using Op = ExprNode::Op;

TEST(Parse, PowerOfVariable) {
    const ExprPtr tree = parse_expr("z^4");
    ASSERT_EQ(tree->op(), Op::Pow);
    EXPECT_EQ(tree->lhs()->op(), Op::Variable);
    ASSERT_EQ(tree->rhs()->op(), Op::Constant);
    EXPECT_EQ(tree->rhs()->value(), 4.0);
}

TEST(Parse, CriticalPowerLogHasLogNode) {
    const ExprPtr tree = parse_expr("z^3 * log(e + 1/z)^(-1)");
    ASSERT_EQ(tree->op(), Op::Mul);
    const ExprPtr& factor = tree->rhs();
    ASSERT_EQ(factor->op(), Op::Pow);
    EXPECT_EQ(factor->lhs()->op(), Op::Log);
    EXPECT_EQ(factor->lhs()->lhs()->op(), Op::Add);
    EXPECT_EQ(factor->lhs()->lhs()->lhs()->op(), Op::Euler);
}

TEST(Parse, DoubleCaretReportsOffset) {
    try {
        parse_expr("z^^2");
        FAIL() << "expected a parse error";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.offset(), 2u);
    }
}

TEST(Parse, RejectsUnknownIdentifierAndTrailingInput) {
    EXPECT_THROW(parse_expr("y + 1"), ParseError);
    EXPECT_THROW(parse_expr("sin(z)"), ParseError);
    EXPECT_THROW(parse_expr("z)"), ParseError);
    EXPECT_THROW(parse_expr(""), ParseError);
    EXPECT_THROW(parse_expr("log(z"), ParseError);
}

TEST(Parse, PrecedenceAndAssociativity) {
    EXPECT_DOUBLE_EQ(evaluate(*parse_expr("2^3^2"), 0.0), 512.0);
    EXPECT_DOUBLE_EQ(evaluate(*parse_expr("-z^2"), 3.0), -9.0);
    EXPECT_DOUBLE_EQ(evaluate(*parse_expr("8/4/2"), 0.0), 1.0);
    EXPECT_DOUBLE_EQ(evaluate(*parse_expr("1 - 2 - 3"), 0.0), -4.0);
    EXPECT_DOUBLE_EQ(evaluate(*parse_expr("2*z^-1"), 4.0), 0.5);
    EXPECT_DOUBLE_EQ(evaluate(*parse_expr("1.5e2 + z"), 1.0), 151.0);
}

namespace {

ExprPtr random_tree(std::mt19937& rng, int depth) {
    std::uniform_int_distribution<int> pick(0, depth <= 0 ? 2 : 10);
    std::uniform_real_distribution<double> number(0.0, 10.0);
    switch (pick(rng)) {
    case 0: return ExprNode::constant(std::round(number(rng) * 1000.0) / 8.0);
    case 1: return ExprNode::variable();
    case 2: return ExprNode::euler();
    case 3: return ExprNode::unary(Op::Neg, random_tree(rng, depth - 1));
    case 4: return ExprNode::unary(Op::Log, random_tree(rng, depth - 1));
    case 5: return ExprNode::unary(Op::Exp, random_tree(rng, depth - 1));
    case 6: return ExprNode::binary(Op::Add, random_tree(rng, depth - 1), random_tree(rng, depth - 1));
    case 7: return ExprNode::binary(Op::Sub, random_tree(rng, depth - 1), random_tree(rng, depth - 1));
    case 8: return ExprNode::binary(Op::Mul, random_tree(rng, depth - 1), random_tree(rng, depth - 1));
    case 9: return ExprNode::binary(Op::Div, random_tree(rng, depth - 1), random_tree(rng, depth - 1));
    default: return ExprNode::binary(Op::Pow, random_tree(rng, depth - 1), random_tree(rng, depth - 1));
    }
}

} // namespace

TEST(Print, ParsePrintIdentityOnRandomTrees) {
    std::mt19937 rng(20240611);
    for (int i = 0; i < 2000; ++i) {
        const ExprPtr tree = random_tree(rng, 5);
        const std::string text = to_string(*tree);
        const ExprPtr back = parse_expr(text);
        ASSERT_TRUE(*back == *tree) << text << " reparsed as " << to_string(*back);
    }
}

TEST(Print, ConstantsRoundTripExactly) {
    for (double v : {0.1, 1.0 / 3.0, 1e-300, 6.02214076e23, 2.5}) {
        const ExprPtr back = parse_expr(to_string(*ExprNode::constant(v)));
        ASSERT_EQ(back->op(), Op::Constant);
        EXPECT_EQ(back->value(), v);
    }
}

TEST(Factory, RejectsNegativeOrNonFiniteConstants) {
    EXPECT_THROW(ExprNode::constant(-1.0), DomainError);
    EXPECT_THROW(ExprNode::constant(std::nan("")), DomainError);
}

TEST(Evaluate, DomainAndOverflowErrors) {
    EXPECT_THROW(evaluate(*parse_expr("log(z - 1)"), 0.5), DomainError);
    EXPECT_THROW(evaluate(*parse_expr("(z - 1)^0.5"), 0.5), DomainError);
    EXPECT_THROW(evaluate(*parse_expr("1/(z - z)"), 0.5), DomainError);
    EXPECT_THROW(evaluate(*parse_expr("exp(z)"), 1000.0), OverflowError);
    EXPECT_DOUBLE_EQ(evaluate(*parse_expr("(z - 1)^2"), 0.5), 0.25);
}

TEST(EvaluateLog, MatchesPlainEvaluation) {
    const char* sources[] = {"z^3 * log(e + 1/z)^(-2)", "exp(-1/z)", "(z + 1)^2.5 - 1",
                             "z / (1 + z)", "2 * z^4 + z^5", "(1 - exp(-z))^3", "e^z - 1"};
    for (const char* source : sources) {
        const ExprPtr tree = parse_expr(source);
        for (double z : {1e-3, 0.01, 0.1, 0.5, 0.9, 1.0}) {
            const double plain = evaluate(*tree, z);
            const double logged = evaluate_log(*tree, std::log(z));
            if (plain == 0.0) { // underflow in plain arithmetic, the log path is the point
                EXPECT_LT(logged, -700.0) << source;
                continue;
            }
            EXPECT_NEAR(logged, std::log(plain), 1e-12 * std::max(1.0, std::fabs(logged)))
                << source << " at z = " << z;
        }
    }
}

TEST(EvaluateLog, HandlesArgumentsBelowBinary64Range) {
    // z = e^-920: z^3 underflows and 1/z overflows in plain arithmetic.
    const double log_z = -920.0;
    const double expected = 3.0 * log_z - 2.0 * std::log(920.0);
    const double got = evaluate_log(*parse_expr("z^3 * log(e + 1/z)^(-2)"), log_z);
    EXPECT_NEAR(got, expected, 1e-10);
    EXPECT_EQ(evaluate_log(*parse_expr("z - z"), -1.0), -INFINITY);
    EXPECT_THROW(evaluate_log(*parse_expr("z - 1"), -1.0), DomainError);
}
