#include "rgarch/io.hpp"

#include "rgarch/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

namespace rgarch {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

bool parse_number(std::string_view s, double& out) {
    s = trim(s);
    if (s.empty()) return false;
    if (s.front() == '+') s.remove_prefix(1);
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size();
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    const char sep = line.find(',') != std::string_view::npos ? ',' : (line.find(';') != std::string_view::npos ? ';' : '\0');
    if (sep == '\0') {
        out.push_back(trim(line));
        return out;
    }
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(sep, start);
        out.push_back(trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

}  // namespace

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<double> parse_series(std::string_view text) {
    std::vector<double> out;
    std::size_t line_no = 0;
    bool seen_content = false;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        const std::string_view raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        const std::string_view line = trim(raw);
        if (line.empty() || line.front() == '#') continue;
        const auto fields = split_fields(line);
        double v = 0.0;
        bool ok = false;
        if (fields.size() == 1) {
            ok = parse_number(fields[0], v);
        } else if (fields.size() == 2) {
            ok = parse_number(fields[1], v);
        }
        if (!ok) {
            if (!seen_content) {
                seen_content = true;  // header line
                continue;
            }
            throw Error(ErrorCode::Io, "line " + std::to_string(line_no) + ": cannot parse '" + std::string(line) + "'");
        }
        if (!std::isfinite(v)) {
            throw Error(ErrorCode::NonFiniteInput, "line " + std::to_string(line_no) + ": non-finite value");
        }
        seen_content = true;
        out.push_back(v);
    }
    if (out.empty()) throw Error(ErrorCode::Io, "line 1: no values found");
    return out;
}

std::vector<double> read_series(const std::string& path) {
    const std::string text = read_file(path);
    try {
        return parse_series(text);
    } catch (const Error& e) {
        const std::string what = e.what();
        throw Error(e.code(), path + ": " + what.substr(to_string(e.code()).size() + 2));
    }
}

std::map<std::string, std::string> parse_config(std::string_view text) {
    std::map<std::string, std::string> out;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw Error(ErrorCode::Io, "config line " + std::to_string(line_no) + ": expected 'key = value'");
        }
        const std::string key(trim(line.substr(0, eq)));
        if (key.empty()) throw Error(ErrorCode::Io, "config line " + std::to_string(line_no) + ": empty key");
        out[key] = std::string(trim(line.substr(eq + 1)));
    }
    return out;
}

std::map<std::string, std::string> read_config(const std::string& path) {
    return parse_config(read_file(path));
}

std::string fnv1a64_hex(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = kHex[h & 0xf];
        h >>= 4;
    }
    return out;
}

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc()) throw Error(ErrorCode::Io, "cannot format number");
    return std::string(buf, ptr);
}

void write_header_comment(std::ostream& os, const RunHeader& h) {
    os << "# tool_version: " << h.tool_version << '\n';
    os << "# command: " << h.command << '\n';
    os << "# seed: " << h.seed << '\n';
    if (!h.input_checksum.empty()) os << "# input_fnv1a64: " << h.input_checksum << '\n';
    for (const auto& [k, v] : h.config) os << "# config." << k << ": " << v << '\n';
}

CsvWriter::CsvWriter(std::ostream& os, std::vector<std::string> columns) : os_(os), columns_(columns.size()) {
    if (columns.empty()) throw Error(ErrorCode::InvalidArgument, "CSV needs at least one column");
    for (std::size_t i = 0; i < columns.size(); ++i) os_ << (i ? "," : "") << columns[i];
    os_ << '\n';
}

CsvWriter& CsvWriter::cell(std::string_view text) {
    if (filled_ >= columns_) throw Error(ErrorCode::InvalidArgument, "too many CSV cells in row");
    if (filled_++) os_ << ',';
    if (text.find_first_of(",\"\n") != std::string_view::npos) {
        os_ << '"';
        for (char c : text) {
            if (c == '"') os_ << '"';
            os_ << c;
        }
        os_ << '"';
    } else {
        os_ << text;
    }
    return *this;
}

CsvWriter& CsvWriter::cell(double v) { return cell(std::string_view(format_double(v))); }

CsvWriter& CsvWriter::cell(long long v) { return cell(std::string_view(std::to_string(v))); }

void CsvWriter::end_row() {
    if (filled_ != columns_) {
        throw Error(ErrorCode::InvalidArgument,
                    "CSV row has " + std::to_string(filled_) + " cells, expected " + std::to_string(columns_));
    }
    os_ << '\n';
    filled_ = 0;
}

}  // namespace rgarch
