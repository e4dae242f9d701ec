// One PASS/FAIL line per acceptance criterion, with wall time against its
// budget. Exit status is non-zero if any line fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "commands.hpp"
#include "liouville/construct.hpp"
#include "liouville/criterion.hpp"
#include "liouville/quadrature.hpp"
#include "liouville/verify.hpp"

using namespace liouville;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool condition, const std::string& what) {
        if (!condition) {
            pass = false;
            if (!detail.empty()) detail += "; ";
            detail += what;
        }
    }
};

std::string num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", x);
    return buf;
}

std::string cell(int n, double p, double lambda) {
    return "(" + std::to_string(n) + "," + num(p) + "," + num(lambda) + ")";
}

int classify_exit(const StructureParams& params, const std::string& flag, double value) {
    cli::RunConfig config;
    config.params = params;
    if (flag == "power") config.power = value;
    else config.powerlog = value;
    std::ostringstream out;
    std::ostringstream err;
    return cli::cmd_classify(config, out, err);
}

Outcome check_dichotomy_power() {
    Outcome o;
    ClassifyOptions numeric;
    numeric.force_numeric = true;
    for (const StructureParams params : {StructureParams{4, 2.0, 1.0}, StructureParams{3, 2.0, 1.0},
                                         StructureParams{5, 3.0, 1.0}}) {
        const double q = critical_exponent(params);
        const struct {
            double lambda;
            Verdict expected;
        } cases[] = {{q, Verdict::Diverges}, {q - 0.5, Verdict::Diverges}, {q + 0.5, Verdict::Converges}};
        for (const auto& c : cases) {
            const Nonlinearity f = Nonlinearity::power(c.lambda);
            const CriterionVerdict analytic = classify(f, params);
            const CriterionVerdict num_path = classify(f, params, numeric);
            const std::string where = cell(params.n, params.p, c.lambda);
            o.require(analytic.verdict == c.expected, "analytic verdict wrong at " + where);
            o.require(num_path.verdict == c.expected, "numeric verdict wrong at " + where);
            if (c.expected == Verdict::Converges) {
                o.require(std::fabs(num_path.value - analytic.value) <= 1e-6 * analytic.value,
                          "K_f disagrees at " + where);
            }
            const int code = classify_exit(params, "power", c.lambda);
            o.require(code == (c.expected == Verdict::Diverges ? 0 : 1),
                      "exit code " + std::to_string(code) + " at " + where);
        }
    }
    if (o.pass) o.detail = "9 cases, analytic = numeric = CLI exit code";
    return o;
}

Outcome check_dichotomy_power_log() {
    Outcome o;
    const StructureParams params{3, 2.0, 1.0};
    for (double mu : {-1.0, -0.5, 0.0}) {
        o.require(classify(Nonlinearity::power_log(mu, params), params).verdict == Verdict::Diverges,
                  "mu = " + num(mu) + " should diverge");
    }
    for (double mu : {-1.5, -2.0}) {
        o.require(classify(Nonlinearity::power_log(mu, params), params).verdict == Verdict::Converges,
                  "mu = " + num(mu) + " should converge");
    }
    for (double mu : {-2.0, 0.0}) {
        const CriterionVerdict analytic = classify(Nonlinearity::power_log(mu, params), params);
        const std::string text = "z^3 * log(e + 1/z)^(" + num(mu) + ")";
        const CriterionVerdict expr = classify(parse_nonlinearity(text), params);
        o.require(expr.method == Method::Numeric, text + " did not take the numeric path");
        o.require(expr.verdict == analytic.verdict, text + " disagrees with the analytic path");
        if (analytic.verdict == Verdict::Converges) {
            o.require(std::fabs(expr.value - analytic.value) <= 1e-6 * analytic.value,
                      "K_f disagrees for " + text);
        }
    }
    o.require(classify_exit(params, "powerlog", -1.0) == 0, "CLI exit for mu = -1");
    if (o.pass) o.detail = "5 exponents, expression forms agree at mu = -2 and 0";
    return o;
}

const StructureParams kClosed{3, 2.0, 1.0};

Outcome check_closed_form() {
    Outcome o;
    const RadialProfile pr = RadialProfile::build(Nonlinearity::power(4), kClosed, 1.0);
    const double total_err = std::fabs(pr.inner_total() - 1.0 / 3.0);
    const double w0_err = std::fabs(pr.value(0.0) - 1.0 / 6.0);
    const double w1_err = std::fabs(pr.value(1.0) - 1.0 / 8.0);
    const double gap = change_of_variables_check(pr).relative_gap();
    o.require(total_err <= 1e-8, "I(inf) off by " + num(total_err));
    o.require(w0_err <= 1e-7, "w(0) off by " + num(w0_err));
    o.require(w1_err <= 1e-7, "w(1) off by " + num(w1_err));
    o.require(gap <= 1e-8, "change of variables gap " + num(gap));
    if (o.pass) {
        o.detail = "|I-1/3| " + num(total_err) + ", |w(0)-1/6| " + num(w0_err) + ", |w(1)-1/8| " +
                   num(w1_err) + ", gap " + num(gap);
    }
    return o;
}

Outcome check_supersolution_certificate() {
    Outcome o;
    const FindDeltaResult found = find_delta(Nonlinearity::power(4), kClosed);
    o.require(found.delta == 1.0, "find_delta returned " + num(found.delta));
    o.require(found.attempts.size() == 1, std::to_string(found.attempts.size()) + " attempts");
    const std::vector<double> grid = log_grid(1e-6, 1e6, 200);
    const CheckResult super = supersolution_check(found.profile, grid);
    const CheckResult flux = flux_identity_check(found.profile, grid);
    o.require(super.worst_residual >= -1e-10, "supersolution residual " + num(super.worst_residual));
    o.require(flux.worst_residual <= 1e-6, "flux residual " + num(flux.worst_residual));
    if (o.pass) {
        o.detail = "supersolution " + num(super.worst_residual) + ", flux " + num(flux.worst_residual);
    }
    return o;
}

Outcome check_decay_bound() {
    Outcome o;
    const struct {
        int n;
        double p;
        double lambda;
    } cases[] = {{3, 2.0, 4.0}, {3, 2.0, 3.5}, {4, 2.0, 3.0}, {5, 3.0, 6.0}, {3, 1.5, 2.0}, {6, 2.0, 2.5}};
    const std::vector<double> grid = log_grid(1e-6, 1e6, 200);
    double worst = 0.0;
    for (const auto& c : cases) {
        const StructureParams params{c.n, c.p, 1.0};
        const std::string where = cell(c.n, c.p, c.lambda);
        if (!(c.lambda > critical_exponent(params))) {
            o.require(false, where + " is not above the critical exponent");
            continue;
        }
        const FindDeltaResult found = find_delta(Nonlinearity::power(c.lambda), params);
        const std::vector<double> w = found.profile.values(grid);
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const double bound = found.profile.decay_bound(grid[i]);
            worst = std::max(worst, w[i] / bound);
            if (w[i] > bound) {
                o.require(false, "w above bound at r = " + num(grid[i]) + " for " + where);
                break;
            }
        }
    }
    if (o.pass) o.detail = "6 instances, max w/bound " + num(worst);
    return o;
}

Outcome check_delta_limit() {
    Outcome o;
    std::vector<double> sups;
    for (int j = 0; j <= 10; ++j) {
        sups.push_back(
            RadialProfile::build(Nonlinearity::power(4), kClosed, std::ldexp(1.0, -j)).sup());
    }
    int first_below = -1;
    for (int j = 0; j <= 10; ++j) {
        if (j > 0) {
            o.require(sups[j] < sups[j - 1], "sup not decreasing at j = " + std::to_string(j));
        }
        if (first_below < 0 && sups[j] < 1e-3) first_below = j;
    }
    o.require(first_below >= 0, "sup never below 1e-3");
    const CheckResult check = delta_limit_check(Nonlinearity::power(4), kClosed, 10);
    o.require(check.pass, "delta_limit_check failed: " + check.note);
    if (o.pass) {
        o.detail = "below 1e-3 from j = " + std::to_string(first_below) + ", sup(j=10) " +
                   num(sups.back());
    }
    return o;
}

Outcome check_energy() {
    Outcome o;
    const RadialProfile pr = RadialProfile::build(Nonlinearity::power(4), kClosed, 1.0);
    const EnergyDiagnostic diag = energy_diagnostic(pr, log_grid(1.0, 1e3, 31));
    o.require(diag.monotone, "E decreases somewhere");
    o.require(diag.max_over_median <= 1e3, "max/median " + num(diag.max_over_median));
    o.require(diag.median_over_min <= 1e3, "median/min " + num(diag.median_over_min));
    for (double r : diag.ratios) o.require(r > 0.0 && std::isfinite(r), "bad ratio " + num(r));
    if (o.pass) {
        o.detail = "max/median " + num(diag.max_over_median) + ", median/min " +
                   num(diag.median_over_min);
    }
    return o;
}

Outcome check_determinism() {
    Outcome o;
    cli::RunConfig config;
    config.params = kClosed;
    config.power = 4.0;
    config.format = cli::Format::Json;
    std::ostringstream first;
    std::ostringstream second;
    std::ostringstream err;
    const int a = cli::cmd_verify(config, first, err);
    const int b = cli::cmd_verify(config, second, err);
    o.require(a == 0 && b == 0, "verify exit codes " + std::to_string(a) + ", " + std::to_string(b));
    o.require(!first.str().empty(), "empty report");
    o.require(first.str() == second.str(), "reports differ");
    if (o.pass) o.detail = std::to_string(first.str().size()) + " identical bytes";
    return o;
}

Outcome check_quadrature() {
    Outcome o;
    const Tolerance tol{1e-10, 0.0};
    const struct {
        const char* name;
        QuadratureResult result;
        double exact;
    } cases[] = {
        {"z^2 on [0,1]", integrate([](double z) { return z * z; }, 0.0, 1.0, tol), 1.0 / 3.0},
        {"z^-1/2 on [0,1]", integrate([](double z) { return 1.0 / std::sqrt(z); }, 0.0, 1.0, tol),
         2.0},
        {"x^2 (1+x)^-4 on [0,inf)",
         integrate_to_infinity([](double x) { return x * x * std::pow(1.0 + x, -4.0); }, 0.0, tol),
         1.0 / 3.0},
    };
    double worst = 0.0;
    for (const auto& c : cases) {
        const double rel = std::fabs(c.result.value - c.exact) / c.exact;
        worst = std::max(worst, rel);
        o.require(c.result.converged, std::string(c.name) + " did not converge");
        o.require(rel <= 1e-10, std::string(c.name) + " relative error " + num(rel));
    }
    if (o.pass) o.detail = "max relative error " + num(worst);
    return o;
}

struct Criterion {
    int id;
    const char* title;
    double budget_s;
    std::function<Outcome()> run;
};

} // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {1, "power-family dichotomy at lambda = q", 5.0, check_dichotomy_power},
        {2, "power-log dichotomy at mu = -1", 10.0, check_dichotomy_power_log},
        {3, "closed-form profile n=3 p=2 lambda=4", 2.0, check_closed_form},
        {4, "supersolution certificate", 5.0, check_supersolution_certificate},
        {5, "explicit decay bound", 0.0, check_decay_bound},
        {6, "sup w shrinks as delta -> 0", 0.0, check_delta_limit},
        {7, "energy ratio diagnostic", 0.0, check_energy},
        {8, "byte-identical verify reports", 0.0, check_determinism},
        {9, "quadrature closed forms", 0.0, check_quadrature},
    };
    int failures = 0;
    for (const Criterion& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome outcome;
        try {
            outcome = c.run();
        } catch (const std::exception& e) {
            outcome.pass = false;
            outcome.detail = std::string("threw: ") + e.what();
        }
        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (c.budget_s > 0.0 && seconds > c.budget_s) {
            outcome.pass = false;
            outcome.detail += (outcome.detail.empty() ? "" : "; ") + std::string("over budget ") +
                              num(c.budget_s) + " s";
        }
        if (!outcome.pass) ++failures;
        std::printf("%s  criterion %d  %-40s %7.3f s  %s\n", outcome.pass ? "PASS" : "FAIL", c.id,
                    c.title, seconds, outcome.detail.c_str());
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
                criteria.size());
    return failures == 0 ? 0 : 1;
}
