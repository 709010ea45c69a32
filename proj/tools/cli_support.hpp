#pragma once

#include "rgarch/error.hpp"
#include "rgarch/io.hpp"

#include <CLI11.hpp>

#include <iosfwd>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace rgarch::cli {

enum ExitCode : int { kOk = 0, kInputError = 1, kNotConverged = 2, kNumericalFailure = 3 };

/// Input and usage errors map to 1, numerical failures to 3.
int exit_code_for(ErrorCode code) noexcept;

/**
 * Expands every `--config FILE` / `--design-file FILE` into `--key=value` tokens
 * placed right after the subcommand, so that flags given later override file values.
 * args[0] is the program, args[1] the subcommand.
 */
std::vector<std::string> expand_config(const std::vector<std::string>& args);

/// Thread count from RANK_GARCH_THREADS, or 1 when unset.
int default_threads();

enum class Format { Csv, Jsonl };
Format parse_format(std::string_view name);

using Cell = std::variant<std::string, double, long long>;

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    void add(std::vector<Cell> row);
};

/// Header block, then the table: CSV with '#' header lines, or JSONL with a header record first.
void write_table(std::ostream& os, const RunHeader& header, const Table& table, Format format);
/// As write_table; "-" writes to stdout. Throws Io when the file cannot be written.
void write_table(const std::string& path, const RunHeader& header, const Table& table, Format format);

/// Resolved option values of a subcommand (given or default), sorted by name, minus `exclude`.
std::vector<std::pair<std::string, std::string>> resolved_config(const CLI::App& sub,
                                                                 const std::set<std::string>& exclude);

}  // namespace rgarch::cli
