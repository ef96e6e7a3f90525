// cli.hpp — Command-line front end: presets, CSV output and run manifests

#pragma once

#include <json.hpp>

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace decaysim::cli {

enum ExitCode : int {
    exit_ok = 0,
    exit_usage = 1,
    exit_numerical = 2,
    exit_qualitative = 3,
};

struct Check {
    std::string name;
    bool passed{false};
    std::string detail;
};

/// Column-oriented table; every column has the same length.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<double>> columns;

    std::size_t rows() const { return columns.empty() ? 0 : columns.front().size(); }
};

struct FigureResult {
    std::string id;
    Table table;
    nlohmann::json parameters;
    nlohmann::json solver;
    nlohmann::json norm_checks;
    std::vector<Check> checks;

    bool passed() const;
};

/// Runs a figure preset: fig2, fig3, fig4 or fig5. Throws ConfigurationError
/// for an unknown id.
FigureResult reproduce_figure(const std::string& id);

/// CSV with a header row and 15 significant digits.
void write_csv(const std::filesystem::path& file, const Table& table);
std::string format_csv(const Table& table);

nlohmann::json to_json(const std::vector<Check>& checks);

/// Appends one JSON object per line to `dir`/manifest.jsonl.
void append_manifest(const std::filesystem::path& dir, const nlohmann::json& entry);

/// Entry point shared by the executable and the tests.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace decaysim::cli
