#include <cmath>
#include <numbers>
#include <string>

#include <gtest/gtest.h>

#include "liouville/criterion.hpp"
#include "liouville/error.hpp"

using namespace liouville;

namespace {

// K_f for z^q log^mu(e + 1/z) over (0, 1], frozen from a 30-digit mpmath run
// of the integral in s = -log z.
constexpr double kPowerLogMinus2 = 1.18988397034434958018;
constexpr double kPowerLogMinus3_2 = 2.29756561059920714495;

// Independent oracle for mu = -2: with L = log(e + 1/z),
//   K = 1/log(e + 1) + e * int_{log(e+1)}^inf dL / (L^2 (e^L - e)),
// the remaining integrand decays like e^-L; composite Simpson.
double power_log_minus2_oracle() {
    const double e = std::numbers::e;
    const double l0 = std::log(e + 1.0);
    const auto g = [e](double l) { return 1.0 / (l * l * (std::exp(l) - e)); };
    const int n = 200000;
    const double h = 60.0 / n;
    double sum = g(l0) + g(l0 + 60.0);
    for (int i = 1; i < n; ++i) sum += (i % 2 == 1 ? 4.0 : 2.0) * g(l0 + i * h);
    return 1.0 / l0 + e * sum * h / 3.0;
}

StructureParams params(int n, double p, double eps = 1.0) { return StructureParams{n, p, eps}; }

} // namespace

TEST(CriticalExponent, Examples) {
    EXPECT_DOUBLE_EQ(critical_exponent(params(4, 2.0)), 2.0);
    EXPECT_DOUBLE_EQ(critical_exponent(params(3, 2.0)), 3.0);
    EXPECT_DOUBLE_EQ(critical_exponent(params(5, 3.0)), 5.0);
    try {
        critical_exponent(params(2, 2.0));
        FAIL() << "expected UnsupportedRegime";
    } catch (const UnsupportedRegime& e) {
        EXPECT_NE(std::string(e.what()).find("constant"), std::string::npos);
    }
    EXPECT_THROW(critical_exponent(params(3, 3.5)), UnsupportedRegime);
    EXPECT_THROW(critical_exponent(params(1, 0.5)), InvalidParams);
    EXPECT_THROW(critical_exponent(params(3, 2.0, -1.0)), InvalidParams);
}

TEST(CriterionIntegrand, Examples) {
    const StructureParams p42 = params(4, 2.0); // q = 2
    EXPECT_NEAR(criterion_integrand(Nonlinearity::power(2.0), p42)(0.5), 2.0, 1e-14);
    for (double z : {1e-5, 0.3, 0.9}) {
        EXPECT_NEAR(criterion_integrand(Nonlinearity::power(3.0), p42)(z), 1.0, 1e-13);
        const double expected = std::pow(std::log(std::numbers::e + 1 / z), -1.5) / z;
        EXPECT_NEAR(criterion_integrand(Nonlinearity::power_log(-1.5, 2.0), p42)(z), expected,
                    1e-13 * expected);
    }
}

TEST(Classify, SpecExamples) {
    EXPECT_EQ(classify(Nonlinearity::power(2.0), params(4, 2.0)).verdict, Verdict::Diverges);
    const CriterionVerdict conv = classify(Nonlinearity::power(2.5), params(4, 2.0));
    EXPECT_EQ(conv.verdict, Verdict::Converges);
    EXPECT_EQ(conv.method, Method::Analytic);
    EXPECT_NEAR(conv.value, 2.0, 1e-14);
    const StructureParams p32 = params(3, 2.0);
    EXPECT_EQ(classify(Nonlinearity::power_log(-1.0, p32), p32).verdict, Verdict::Diverges);
}

TEST(Classify, PowerThresholdIsInclusive) {
    // q computed as 5 * 2 / 2 with rounding in general (n, p)
    const StructureParams p = params(7, 2.5);
    const double q = critical_exponent(p);
    EXPECT_EQ(classify(Nonlinearity::power(q), p).verdict, Verdict::Diverges);
    EXPECT_EQ(classify(Nonlinearity::power(q * (1 + 1e-14)), p).verdict, Verdict::Diverges);
    EXPECT_EQ(classify(Nonlinearity::power(q + 1e-6), p).verdict, Verdict::Converges);
}

TEST(Classify, PowerLogFamily) {
    const StructureParams p = params(3, 2.0);
    for (double mu : {-1.0, -0.5, 0.0, 1.0}) {
        EXPECT_EQ(classify(Nonlinearity::power_log(mu, p), p).verdict, Verdict::Diverges) << mu;
    }
    for (double mu : {-1.5, -2.0, -3.0}) {
        EXPECT_EQ(classify(Nonlinearity::power_log(mu, p), p).verdict, Verdict::Converges) << mu;
    }
    // away from the critical power the power decides
    EXPECT_EQ(classify(Nonlinearity::power_log(-5.0, 2.5), p).verdict, Verdict::Diverges);
    const CriterionVerdict above = classify(Nonlinearity::power_log(1.0, 3.5), p);
    EXPECT_EQ(above.verdict, Verdict::Converges);
    EXPECT_NEAR(above.value, 5.11472734544752097, 1e-9 * 5.1147);
}

TEST(Classify, MonotonicityFailureIsAnError) {
    EXPECT_THROW(classify(parse_nonlinearity("1 - z"), params(3, 2.0)), MonotonicityError);
    ClassifyOptions waived;
    waived.check_monotone = false;
    EXPECT_NO_THROW(classify(parse_nonlinearity("1 - z"), params(3, 2.0), waived));
}

TEST(Classify, AnalyticAndNumericPathsAgreeOnPowers) {
    ClassifyOptions numeric;
    numeric.force_numeric = true;
    const StructureParams cases[] = {params(4, 2.0), params(3, 2.0), params(5, 3.0),
                                     params(3, 1.5), params(6, 2.0)};
    for (const StructureParams& p : cases) {
        const double q = critical_exponent(p);
        for (double d : {-1.0, -0.5, 0.0, 0.5, 1.0, 2.5}) {
            const Nonlinearity f = Nonlinearity::power(q + d);
            const CriterionVerdict a = classify(f, p);
            const CriterionVerdict n = classify(f, p, numeric);
            EXPECT_EQ(n.method, Method::Numeric);
            EXPECT_EQ(a.verdict, n.verdict) << "n=" << p.n << " p=" << p.p << " lambda=" << q + d;
            if (a.verdict == Verdict::Converges) {
                EXPECT_NEAR(n.value, a.value, 1e-6 * a.value);
            }
        }
    }
}

TEST(Classify, ExpressionFormsMatchPowerLog) {
    const StructureParams p = params(3, 2.0);
    const CriterionVerdict conv = classify(parse_nonlinearity("z^3 * log(e + 1/z)^(-2)"), p);
    EXPECT_EQ(conv.method, Method::Numeric);
    EXPECT_EQ(conv.verdict, Verdict::Converges);
    EXPECT_NEAR(conv.value, kPowerLogMinus2, 1e-8);
    ASSERT_TRUE(conv.diagnostics.has_value());
    EXPECT_EQ(conv.diagnostics->shells.size(), 40u);

    const CriterionVerdict div = classify(parse_nonlinearity("z^3"), p);
    EXPECT_EQ(div.verdict, Verdict::Diverges);
    EXPECT_EQ(div.method, Method::Numeric);
}

TEST(Classify, NearCriticalExpressionIsInconclusive) {
    // mu = -1.05 converges, but far too slowly for forty shells to show it:
    // shell k ~ k^-1.05, a log slope near -1.05 / k over the window
    const CriterionVerdict v = classify(parse_nonlinearity("z^3 * log(e + 1/z)^(-1.05)"),
                                        params(3, 2.0));
    EXPECT_EQ(v.verdict, Verdict::Inconclusive);
    ASSERT_TRUE(v.diagnostics.has_value());
    EXPECT_GT(v.diagnostics->slope, -0.1);
    EXPECT_LT(v.diagnostics->slope, 0.0);
}

TEST(Classify, EvaluationFailureNamesTheShell) {
    ClassifyOptions opts;
    opts.check_monotone = false;
    // log(z - 1e-3) is undefined below z = 1e-3, i.e. from shell 9 on
    const CriterionVerdict v = classify_numeric(parse_nonlinearity("log(z - 0.001) + 10"),
                                                params(3, 2.0), opts);
    EXPECT_EQ(v.verdict, Verdict::Inconclusive);
    ASSERT_TRUE(v.diagnostics && v.diagnostics->failed_shell);
    EXPECT_EQ(*v.diagnostics->failed_shell, 9);
}

TEST(Classify, IdenticallyZeroConverges) {
    const CriterionVerdict v = classify(Nonlinearity::constant(0.0), params(3, 2.0));
    EXPECT_EQ(v.verdict, Verdict::Converges);
    EXPECT_EQ(v.value, 0.0);
}

TEST(Classify, ShiftAndFloorRules) {
    const StructureParams p = params(3, 2.0);
    EXPECT_EQ(classify(shift(Nonlinearity::power(6), 0.1), p).verdict, Verdict::Diverges);
    EXPECT_EQ(classify(shift(Nonlinearity::power(6), 0.0), p).verdict, Verdict::Converges);
    const CriterionVerdict floored = classify(floor_by_power(Nonlinearity::power(5), p), p);
    EXPECT_EQ(floored.verdict, Verdict::Converges);
    // never below the floor's own contribution, int_0^1 z^(1+q-1-q) dz = 1
    EXPECT_GE(floored.value, 1.0);
    EXPECT_EQ(classify(floor_by_power(Nonlinearity::power(2), p), p).verdict, Verdict::Diverges);
}

TEST(CriterionValue, SpecExamples) {
    EXPECT_NEAR(criterion_value(Nonlinearity::power(4), params(3, 2.0)).value, 1.0, 1e-12);
    EXPECT_NEAR(criterion_value(Nonlinearity::power(3), params(4, 2.0)).value, 1.0, 1e-12);
}

TEST(CriterionValue, PowerLogAgainstTwoOracles) {
    const StructureParams p = params(3, 2.0);
    const double oracle = power_log_minus2_oracle();
    EXPECT_NEAR(oracle, kPowerLogMinus2, 1e-12);
    const QuadratureResult k = criterion_value(Nonlinearity::power_log(-2.0, p), p);
    EXPECT_NEAR(k.value, oracle, 1e-9);
    EXPECT_NEAR(criterion_value(Nonlinearity::power_log(-1.5, p), p).value, kPowerLogMinus3_2,
                1e-8);
}

TEST(CriterionValue, ScalingInEps) {
    for (double lambda : {2.5, 3.0, 4.25}) {
        for (double eps : {0.25, 0.5, 2.0}) {
            const StructureParams p = params(4, 2.0, eps);
            const double expected = std::pow(eps, lambda - 2.0) / (lambda - 2.0);
            EXPECT_NEAR(criterion_value(Nonlinearity::power(lambda), p).value, expected,
                        1e-9 * expected);
        }
    }
}

TEST(CriterionValue, DivergenceIsAnError) {
    EXPECT_THROW(criterion_value(Nonlinearity::power(3), params(3, 2.0)), DivergentCriterion);
}
