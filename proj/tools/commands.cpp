#include "commands.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "liouville/construct.hpp"
#include "liouville/error.hpp"
#include "liouville/verify.hpp"

namespace liouville::cli {

namespace {

using nlohmann::ordered_json;

constexpr const char* kSchemaVersion = "v1";
constexpr const char* kLiouvilleText =
    "Liouville regime: every non-negative solution is identically zero (Thm 2.1)";
constexpr const char* kExistenceText =
    "Existence regime: positive radial solution constructible (Thm 2.2)";

ordered_json number(double x) {
    if (!std::isfinite(x)) return nullptr;
    return x;
}

ordered_json params_json(const StructureParams& params) {
    return {{"n", params.n}, {"p", params.p}, {"eps", params.eps}};
}

std::string regime_text(Verdict verdict) {
    switch (verdict) {
    case Verdict::Diverges: return kLiouvilleText;
    case Verdict::Converges: return kExistenceText;
    case Verdict::Inconclusive: break;
    }
    return "Inconclusive: the numeric evidence does not settle the criterion";
}

int verdict_code(Verdict verdict) {
    switch (verdict) {
    case Verdict::Diverges: return exit_code::diverges;
    case Verdict::Converges: return exit_code::converges;
    case Verdict::Inconclusive: break;
    }
    return exit_code::inconclusive;
}

ClassifyOptions classify_options(const RunConfig& config) {
    ClassifyOptions opts;
    opts.tol = Tolerance{config.tol, 1e-14};
    opts.check_monotone = config.monotone_check;
    return opts;
}

ProfileOptions profile_options(const RunConfig& config) {
    ProfileOptions opts;
    opts.tol = Tolerance{config.tol, 0.0};
    return opts;
}

void validate_config(const RunConfig& config) {
    config.params.validate();
    if (!(config.tol > 0.0 && config.tol < 1.0)) throw InvalidParams("--tol must lie in (0, 1)");
    if (!(config.delta0 > 0.0) || !std::isfinite(config.delta0)) {
        throw InvalidParams("--delta0 must be positive");
    }
    if (config.delta && (!(*config.delta > 0.0) || !std::isfinite(*config.delta))) {
        throw InvalidParams("--delta must be positive");
    }
    if (config.grid_min && !(*config.grid_min > 0.0)) {
        throw InvalidParams("--grid-min must be positive");
    }
    if (config.grid_min && config.grid_max && !(*config.grid_max > *config.grid_min)) {
        throw InvalidParams("--grid-max must exceed --grid-min");
    }
    if (config.grid_points && *config.grid_points < 2) {
        throw InvalidParams("--grid-points must be at least 2");
    }
}

// Runs `body`, mapping library errors to exit codes with a one-line message.
int guarded(std::ostream& err, const std::function<int()>& body) {
    try {
        return body();
    } catch (const UnsupportedRegime& e) {
        err << "error: " << e.what() << '\n';
        return exit_code::unsupported_regime;
    } catch (const ParseError& e) {
        err << "error: " << e.what() << '\n';
        return exit_code::parse_error;
    } catch (const CheckError& e) {
        err << "error: check " << e.check() << " failed to run: " << e.what() << '\n';
        return exit_code::check_error;
    } catch (const InvalidParams& e) {
        err << "error: " << e.what() << '\n';
        return exit_code::invalid_config;
    } catch (const MonotonicityError& e) {
        err << "error: " << e.what() << " (pass --no-monotone-check to waive)\n";
        return exit_code::not_monotone;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return exit_code::numeric_failure;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return exit_code::invalid_config;
    }
}

// Profile for construct / verify: classify first, then search or honour --delta.
struct Built {
    RadialProfile profile;
    std::vector<DeltaAssessment> attempts;
    bool searched;
};

std::optional<Built> build_profile(const RunConfig& config, const Nonlinearity& f,
                                   std::ostream& err, int& code) {
    const CriterionVerdict verdict = classify(f, config.params, classify_options(config));
    if (verdict.verdict == Verdict::Diverges) {
        err << "criterion integral diverges for f(z) = " << f.to_string()
            << ": no positive solution exists; see `liouville classify`\n";
        code = 1;
        return std::nullopt;
    }
    if (verdict.verdict == Verdict::Inconclusive) {
        err << "warning: criterion inconclusive (" << verdict.reason
            << "); attempting the construction anyway\n";
    }
    FindDeltaOptions search;
    search.delta0 = config.delta0;
    search.profile = profile_options(config);
    try {
        if (config.delta) {
            RadialProfile profile = RadialProfile::build(f, config.params, *config.delta,
                                                         search.profile);
            std::vector<DeltaAssessment> attempts{assess_delta(profile, search)};
            return Built{std::move(profile), std::move(attempts), false};
        }
        FindDeltaResult found = find_delta(f, config.params, search);
        return Built{std::move(found.profile), std::move(found.attempts), true};
    } catch (const DivergentCriterion& e) {
        err << "error: " << e.what() << '\n';
        code = verdict.verdict == Verdict::Inconclusive ? exit_code::inconclusive : 1;
        return std::nullopt;
    }
}

ordered_json attempts_json(const std::vector<DeltaAssessment>& attempts) {
    ordered_json out = ordered_json::array();
    for (const DeltaAssessment& a : attempts) {
        out.push_back({{"delta", a.delta},
                       {"grid_ok", a.grid_ok},
                       {"worst_margin", number(a.worst_margin)},
                       {"worst_at", a.worst_at},
                       {"delta1_ok", a.delta1_ok},
                       {"delta2_ok", a.delta2_ok},
                       {"tail_ok", a.tail_ok},
                       {"accepted", a.accepted()}});
    }
    return out;
}

std::string csv_field(std::string text) {
    for (char& c : text) {
        if (c == ',' || c == '\n' || c == '\r') c = ';';
    }
    return text;
}

void write_json(std::ostream& out, const ordered_json& doc) { out << doc.dump(2) << '\n'; }

} // namespace

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buffer[64];
    const auto result = std::to_chars(buffer, buffer + sizeof buffer, x);
    return std::string(buffer, result.ptr);
}

Nonlinearity make_nonlinearity(const RunConfig& config) {
    const int sources = int(config.power.has_value()) + int(config.powerlog.has_value()) +
                        int(config.expr.has_value());
    if (sources != 1) {
        throw InvalidParams("exactly one of --power, --powerlog, --expr is required");
    }
    Nonlinearity f = config.power      ? Nonlinearity::power(*config.power)
                     : config.powerlog ? Nonlinearity::power_log(*config.powerlog, config.params)
                                       : parse_nonlinearity(*config.expr);
    if (config.shift) f = shift(f, *config.shift);
    if (config.floor) f = floor_by_power(f, config.params);
    return f;
}

int cmd_classify(const RunConfig& config, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        validate_config(config);
        const double q = critical_exponent(config.params);
        const Nonlinearity f = make_nonlinearity(config);
        const CriterionVerdict v = classify(f, config.params, classify_options(config));
        const bool has_value = v.verdict == Verdict::Converges;

        switch (config.format) {
        case Format::Json: {
            ordered_json doc{{"schema_version", kSchemaVersion},
                             {"command", "classify"},
                             {"params", params_json(config.params)},
                             {"f", f.to_string()},
                             {"critical_exponent", q},
                             {"verdict", std::string(to_string(v.verdict))},
                             {"method", std::string(to_string(v.method))},
                             {"regime", regime_text(v.verdict)},
                             {"K_f", has_value ? number(v.value) : ordered_json(nullptr)},
                             {"K_f_error", has_value ? number(v.abs_error) : ordered_json(nullptr)},
                             {"reason", v.reason}};
            if (v.diagnostics) {
                const ShellDiagnostics& d = *v.diagnostics;
                ordered_json shells = ordered_json::array();
                for (double s : d.shells) shells.push_back(number(s));
                doc["diagnostics"] = {{"shells", shells},
                                      {"slope", number(d.slope)},
                                      {"min_ratio", number(d.min_ratio)},
                                      {"partial_sum", number(d.partial_sum)},
                                      {"tail_bound", number(d.tail_bound)},
                                      {"note", d.note}};
            } else {
                doc["diagnostics"] = nullptr;
            }
            write_json(out, doc);
            break;
        }
        case Format::Csv:
            out << "n,p,eps,f,q,verdict,method,K_f\n"
                << config.params.n << ',' << format_double(config.params.p) << ','
                << format_double(config.params.eps) << ',' << csv_field(f.to_string()) << ','
                << format_double(q) << ',' << to_string(v.verdict) << ',' << to_string(v.method)
                << ',' << (has_value ? format_double(v.value) : "") << '\n';
            break;
        case Format::Text:
            out << "f(z)     = " << f.to_string() << '\n'
                << "n, p, eps = " << config.params.n << ", " << format_double(config.params.p)
                << ", " << format_double(config.params.eps) << '\n'
                << "q        = " << format_double(q) << '\n'
                << "verdict  = " << to_string(v.verdict) << " (" << to_string(v.method) << ")\n";
            if (has_value) {
                out << "K_f      = " << format_double(v.value) << " +- "
                    << format_double(v.abs_error) << '\n';
            }
            out << "reason   = " << v.reason << '\n' << regime_text(v.verdict) << '\n';
            break;
        }
        return verdict_code(v.verdict);
    });
}

int cmd_construct(const RunConfig& config, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        validate_config(config);
        critical_exponent(config.params);
        const Nonlinearity f = make_nonlinearity(config);
        int code = 0;
        std::optional<Built> built = build_profile(config, f, err, code);
        if (!built) return code;
        const RadialProfile& profile = built->profile;

        std::vector<double> radii{0.0};
        for (double r : log_grid(config.grid_min.value_or(1e-3), config.grid_max.value_or(1e3),
                                 config.grid_points.value_or(61))) {
            radii.push_back(r);
        }
        const std::vector<double> w = profile.values(radii);

        switch (config.format) {
        case Format::Csv:
            out << "r,w,envelope,bound\n";
            for (std::size_t i = 0; i < radii.size(); ++i) {
                out << format_double(radii[i]) << ',' << format_double(w[i]) << ','
                    << format_double(profile.envelope(radii[i])) << ','
                    << format_double(profile.decay_bound(radii[i])) << '\n';
            }
            break;
        case Format::Json: {
            ordered_json rows = ordered_json::array();
            for (std::size_t i = 0; i < radii.size(); ++i) {
                rows.push_back({{"r", radii[i]},
                                {"w", w[i]},
                                {"envelope", profile.envelope(radii[i])},
                                {"bound", number(profile.decay_bound(radii[i]))}});
            }
            write_json(out, {{"schema_version", kSchemaVersion},
                             {"command", "construct"},
                             {"params", params_json(config.params)},
                             {"f", f.to_string()},
                             {"delta", profile.delta()},
                             {"delta_searched", built->searched},
                             {"attempts", attempts_json(built->attempts)},
                             {"K_f", profile.criterion_value()},
                             {"inner_total", profile.inner_total()},
                             {"decay_constant", profile.decay_bound_constant()},
                             {"sup_w", profile.sup()},
                             {"rows", rows}});
            break;
        }
        case Format::Text: {
            out << "f(z)    = " << f.to_string() << '\n'
                << "delta   = " << format_double(profile.delta())
                << (built->searched ? " (searched, " + std::to_string(built->attempts.size()) +
                                          " candidate(s))"
                                    : " (given)")
                << '\n'
                << "K_f     = " << format_double(profile.criterion_value()) << '\n'
                << "I(inf)  = " << format_double(profile.inner_total()) << '\n'
                << "C_f     = " << format_double(profile.decay_bound_constant()) << '\n'
                << "sup w   = " << format_double(profile.sup()) << "\n\n";
            constexpr int width = 24;
            out << std::setw(width) << "r" << std::setw(width) << "w" << std::setw(width)
                << "envelope" << std::setw(width) << "bound" << '\n';
            for (std::size_t i = 0; i < radii.size(); ++i) {
                out << std::setw(width) << format_double(radii[i]) << std::setw(width)
                    << format_double(w[i]) << std::setw(width)
                    << format_double(profile.envelope(radii[i])) << std::setw(width)
                    << format_double(profile.decay_bound(radii[i])) << '\n';
            }
            break;
        }
        }
        return 0;
    });
}

int cmd_verify(const RunConfig& config, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        validate_config(config);
        critical_exponent(config.params);
        const Nonlinearity f = make_nonlinearity(config);
        int code = 0;
        std::optional<Built> built = build_profile(config, f, err, code);
        if (!built) return code;
        const RadialProfile& profile = built->profile;

        VerifyOptions opts;
        opts.grid_min = config.grid_min;
        opts.grid_max = config.grid_max;
        if (config.grid_points) opts.grid_points = *config.grid_points;
        const VerificationReport report = verify_profile(profile, opts);

        switch (config.format) {
        case Format::Json: {
            ordered_json checks = ordered_json::array();
            for (const CheckResult& c : report.checks) {
                checks.push_back({{"name", c.name},
                                  {"grid_size", c.grid_size},
                                  {"worst_residual", number(c.worst_residual)},
                                  {"worst_at", number(c.worst_at)},
                                  {"threshold", number(c.threshold)},
                                  {"pass", c.pass},
                                  {"note", c.note}});
            }
            write_json(out, {{"schema_version", kSchemaVersion},
                             {"command", "verify"},
                             {"params", params_json(config.params)},
                             {"f", f.to_string()},
                             {"delta", profile.delta()},
                             {"delta_searched", built->searched},
                             {"overall", report.overall},
                             {"checks", checks}});
            break;
        }
        case Format::Csv:
            out << "name,grid_size,worst_residual,worst_at,threshold,pass,note\n";
            for (const CheckResult& c : report.checks) {
                out << c.name << ',' << c.grid_size << ',' << format_double(c.worst_residual)
                    << ',' << format_double(c.worst_at) << ',' << format_double(c.threshold)
                    << ',' << (c.pass ? "pass" : "fail") << ',' << csv_field(c.note) << '\n';
            }
            break;
        case Format::Text:
            out << "f(z)  = " << f.to_string() << '\n'
                << "delta = " << format_double(profile.delta()) << "\n\n";
            for (const CheckResult& c : report.checks) {
                out << (c.pass ? "PASS  " : "FAIL  ") << std::left << std::setw(22) << c.name
                    << std::right << " grid " << std::setw(4) << c.grid_size << "  worst "
                    << format_double(c.worst_residual) << " at r = " << format_double(c.worst_at)
                    << " (threshold " << format_double(c.threshold) << ")\n";
                if (!c.note.empty()) out << "      " << c.note << '\n';
            }
            out << "\noverall: " << (report.overall ? "PASS" : "FAIL") << '\n';
            break;
        }
        return report.overall ? 0 : 1;
    });
}

int cmd_sweep(const RunConfig& config, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        validate_config(config);
        critical_exponent(config.params);
        if (!(config.step > 0.0) || !std::isfinite(config.step) || !std::isfinite(config.from) ||
            !std::isfinite(config.to)) {
            throw InvalidParams("sweep needs finite --from/--to and --step > 0");
        }
        const bool power = config.family == SweepFamily::Power;
        const char* column = power ? "lambda" : "mu";

        struct Row {
            double value;
            std::string verdict;
            std::string method;
            std::optional<double> k_f;
            std::optional<double> delta;
            std::optional<double> sup_w;
            std::string error;
        };
        std::vector<Row> rows;
        if (config.to >= config.from) {
            const auto count =
                static_cast<long>(std::floor((config.to - config.from) / config.step + 1e-9)) + 1;
            for (long i = 0; i < count; ++i) {
                Row row;
                row.value = config.from + static_cast<double>(i) * config.step;
                try {
                    const Nonlinearity f = power ? Nonlinearity::power(row.value)
                                                 : Nonlinearity::power_log(row.value, config.params);
                    const CriterionVerdict v = classify(f, config.params, classify_options(config));
                    row.verdict = to_string(v.verdict);
                    row.method = to_string(v.method);
                    if (v.verdict == Verdict::Converges) {
                        row.k_f = v.value;
                        FindDeltaOptions search;
                        search.delta0 = config.delta0;
                        search.profile = profile_options(config);
                        const FindDeltaResult found = find_delta(f, config.params, search);
                        row.delta = found.delta;
                        row.sup_w = found.profile.sup();
                    }
                } catch (const Error& e) {
                    row.error = e.what();
                }
                rows.push_back(std::move(row));
            }
        }

        const auto opt = [](const std::optional<double>& x) {
            return x ? format_double(*x) : std::string();
        };
        switch (config.format) {
        case Format::Json: {
            ordered_json list = ordered_json::array();
            for (const Row& r : rows) {
                list.push_back({{"value", r.value},
                                {"verdict", r.verdict.empty() ? ordered_json(nullptr) : ordered_json(r.verdict)},
                                {"method", r.method.empty() ? ordered_json(nullptr) : ordered_json(r.method)},
                                {"K_f", r.k_f ? number(*r.k_f) : ordered_json(nullptr)},
                                {"delta", r.delta ? number(*r.delta) : ordered_json(nullptr)},
                                {"sup_w", r.sup_w ? number(*r.sup_w) : ordered_json(nullptr)},
                                {"error", r.error.empty() ? ordered_json(nullptr) : ordered_json(r.error)}});
            }
            write_json(out, {{"schema_version", kSchemaVersion},
                             {"command", "sweep"},
                             {"params", params_json(config.params)},
                             {"family", power ? "power" : "powerlog"},
                             {"rows", list}});
            break;
        }
        case Format::Csv:
        case Format::Text:
            out << column << ",verdict,method,K_f,delta,sup_w,error\n";
            for (const Row& r : rows) {
                out << format_double(r.value) << ',' << r.verdict << ',' << r.method << ','
                    << opt(r.k_f) << ',' << opt(r.delta) << ',' << opt(r.sup_w) << ','
                    << csv_field(r.error) << '\n';
            }
            break;
        }
        return 0;
    });
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Liouville dichotomy for -Delta_p u >= f(u): classify, construct, verify"};
    app.require_subcommand(1);
    RunConfig config;

    const std::map<std::string, Format> formats{
        {"text", Format::Text}, {"json", Format::Json}, {"csv", Format::Csv}};
    const auto add_common = [&](CLI::App* sub) {
        sub->add_option("--n", config.params.n, "dimension n >= 2")->capture_default_str();
        sub->add_option("--p", config.params.p, "operator exponent p > 1")->capture_default_str();
        sub->add_option("--eps", config.params.eps, "monotonicity threshold eps > 0")
            ->capture_default_str();
        sub->add_option("--tol", config.tol, "relative quadrature tolerance")
            ->capture_default_str();
        sub->add_option("--format", config.format, "output format: text, json or csv")
            ->transform(CLI::CheckedTransformer(formats, CLI::ignore_case));
        sub->add_option("--out", config.out, "write output to this file");
        sub->add_flag("--monotone-check,!--no-monotone-check", config.monotone_check,
                      "run (default) or skip the sampled monotonicity check of f");
        sub->add_option("--delta0", config.delta0, "first delta of the search")
            ->capture_default_str();
    };
    const auto add_f = [&](CLI::App* sub) {
        sub->add_option("--power", config.power, "f(z) = z^L");
        sub->add_option("--powerlog", config.powerlog, "f(z) = z^q log^M(e + 1/z)");
        sub->add_option("--expr", config.expr, "f as an expression in z");
        sub->add_option("--shift", config.shift, "replace f by f(z + alpha)");
        sub->add_flag("--floor", config.floor, "replace f by max{f(z), z^(1+q)}");
    };
    const auto add_grid = [&](CLI::App* sub) {
        sub->add_option("--grid-min", config.grid_min, "smallest tabulated radius");
        sub->add_option("--grid-max", config.grid_max, "largest tabulated radius");
        sub->add_option("--grid-points", config.grid_points, "number of log-spaced radii");
        sub->add_option("--delta", config.delta, "use this delta instead of searching");
    };

    CLI::App* classify_cmd = app.add_subcommand("classify", "decide the criterion integral");
    CLI::App* construct_cmd = app.add_subcommand("construct", "tabulate the radial supersolution");
    CLI::App* verify_cmd = app.add_subcommand("verify", "certify the constructed profile");
    CLI::App* sweep_cmd = app.add_subcommand("sweep", "classify over a parameter range");
    for (CLI::App* sub : {classify_cmd, construct_cmd, verify_cmd, sweep_cmd}) add_common(sub);
    for (CLI::App* sub : {classify_cmd, construct_cmd, verify_cmd}) add_f(sub);
    for (CLI::App* sub : {construct_cmd, verify_cmd}) add_grid(sub);
    const std::map<std::string, SweepFamily> families{{"power", SweepFamily::Power},
                                                      {"powerlog", SweepFamily::PowerLog}};
    sweep_cmd->add_option("--family", config.family, "power (lambda) or powerlog (mu)")
        ->transform(CLI::CheckedTransformer(families, CLI::ignore_case));
    sweep_cmd->add_option("--from", config.from, "first parameter value")->required();
    sweep_cmd->add_option("--to", config.to, "last parameter value")->required();
    sweep_cmd->add_option("--step", config.step, "parameter increment")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return exit_code::invalid_config;
    }
    std::ostringstream buffer;
    std::ostream& sink = config.out ? static_cast<std::ostream&>(buffer) : out;
    int code = exit_code::invalid_config;
    if (classify_cmd->parsed()) code = cmd_classify(config, sink, err);
    if (construct_cmd->parsed()) code = cmd_construct(config, sink, err);
    if (verify_cmd->parsed()) code = cmd_verify(config, sink, err);
    if (sweep_cmd->parsed()) code = cmd_sweep(config, sink, err);

    if (config.out) {
        std::ofstream file(*config.out, std::ios::binary);
        file << buffer.str();
        if (!file) {
            err << "error: cannot write " << *config.out << '\n';
            return exit_code::invalid_config;
        }
    }
    return code;
}

} // namespace liouville::cli
