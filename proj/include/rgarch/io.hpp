#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace rgarch {

/**
 * Reads a return series: one value per line, optional header line, optional first
 * date column (any non-numeric first field of a two-field row), blank lines and
 * '#' comment lines skipped.
 * Throws Io naming the first offending line; an empty file is an error.
 */
std::vector<double> read_series(const std::string& path);
std::vector<double> parse_series(std::string_view text);

/// Flat `key = value` text; '#' starts a comment. Later keys override earlier ones.
std::map<std::string, std::string> parse_config(std::string_view text);
std::map<std::string, std::string> read_config(const std::string& path);

std::string read_file(const std::string& path);

/// 64-bit FNV-1a of the bytes, as 16 lowercase hex digits.
std::string fnv1a64_hex(std::string_view bytes);

/// Shortest text that parses back to the same double ("nan", "inf", "-inf" for specials).
std::string format_double(double v);

/// Reproducibility block written at the top of every output file.
struct RunHeader {
    std::string tool_version;
    std::string command;
    std::vector<std::pair<std::string, std::string>> config;  ///< resolved, sorted by key
    std::uint64_t seed = 0;
    std::string input_checksum;  ///< empty when the command reads no input file
};

/// Header as '#'-prefixed lines, for CSV outputs.
void write_header_comment(std::ostream& os, const RunHeader& h);

/// Simple CSV table writer with a fixed column list.
class CsvWriter {
public:
    CsvWriter(std::ostream& os, std::vector<std::string> columns);
    CsvWriter& cell(std::string_view text);
    CsvWriter& cell(double v);
    CsvWriter& cell(long long v);
    CsvWriter& cell(std::size_t v) { return cell(static_cast<long long>(v)); }
    CsvWriter& cell(int v) { return cell(static_cast<long long>(v)); }
    /// Ends the row; throws InvalidArgument if the cell count differs from the columns.
    void end_row();

private:
    std::ostream& os_;
    std::size_t columns_;
    std::size_t filled_ = 0;
};

}  // namespace rgarch
