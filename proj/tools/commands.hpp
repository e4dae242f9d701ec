#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "liouville/criterion.hpp"
#include "liouville/nonlinearity.hpp"
#include "liouville/params.hpp"

namespace liouville::cli {

enum class Format { Text, Json, Csv };

/// Process exit codes. Verdict codes 0/1/2 come from classify; the rest are
/// shared by every command.
namespace exit_code {
inline constexpr int diverges = 0;
inline constexpr int converges = 1;
inline constexpr int inconclusive = 2;
inline constexpr int unsupported_regime = 10;
inline constexpr int parse_error = 11;
inline constexpr int check_error = 12;
inline constexpr int invalid_config = 13;
inline constexpr int numeric_failure = 14;
inline constexpr int not_monotone = 15;
} // namespace exit_code

enum class SweepFamily { Power, PowerLog };

struct RunConfig {
    StructureParams params;
    // Exactly one of these selects f.
    std::optional<double> power;
    std::optional<double> powerlog;
    std::optional<std::string> expr;
    std::optional<double> shift;    ///< replace f by f(. + alpha)
    bool floor = false;             ///< replace f by max{f, z^(1+q)}
    bool monotone_check = true;

    double delta0 = 1.0;
    std::optional<double> delta;    ///< skip the search and use this delta
    std::optional<double> grid_min;
    std::optional<double> grid_max;
    std::optional<int> grid_points;
    double tol = 1e-10;

    Format format = Format::Text;
    std::optional<std::string> out; ///< write here instead of stdout

    SweepFamily family = SweepFamily::Power;
    double from = 0.0;
    double to = 0.0;
    double step = 1.0;
};

/// The configured f. Throws InvalidParams unless exactly one source is set,
/// ParseError for bad expression text.
Nonlinearity make_nonlinearity(const RunConfig& config);

// Each command writes its document to `out` and diagnostics to `err`, and
// returns the process exit code. Library errors are mapped to exit codes,
// never propagated.
int cmd_classify(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_construct(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_verify(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_sweep(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Full command line: parses argv, dispatches, honours --out.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Shortest decimal string that reads back to the same double; "inf",
/// "-inf" and "nan" for non-finite values.
std::string format_double(double x);

} // namespace liouville::cli
