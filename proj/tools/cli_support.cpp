#include "cli_support.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>

namespace rgarch::cli {

int exit_code_for(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::NonPositiveParameter:
    case ErrorCode::NonStationary:
    case ErrorCode::DimensionMismatch:
    case ErrorCode::UnsupportedSpec:
    case ErrorCode::DomainError:
    case ErrorCode::NonFiniteInput:
    case ErrorCode::DegenerateSeries:
    case ErrorCode::InvalidDf:
    case ErrorCode::InfiniteFourthMoment:
    case ErrorCode::InvalidArgument:
    case ErrorCode::Io:
        return kInputError;
    case ErrorCode::NonPositiveVariance:
    case ErrorCode::SingularInformation:
    case ErrorCode::NonFiniteStep:
    case ErrorCode::InitFailed:
    case ErrorCode::OptimFailed:
    case ErrorCode::ExplosiveBeta:
    case ErrorCode::InsufficientReplicates:
    case ErrorCode::TooManyFailedReplicates:
    case ErrorCode::QuadratureNotConverged:
    case ErrorCode::AllReplicationsFailed:
        return kNumericalFailure;
    }
    return kNumericalFailure;
}

std::vector<std::string> expand_config(const std::vector<std::string>& args) {
    std::vector<std::string> injected;
    for (std::size_t i = 1; i < args.size(); ++i) {
        std::string path;
        for (const std::string flag : {"--config", "--design-file"}) {
            if (args[i] == flag && i + 1 < args.size()) {
                path = args[i + 1];
            } else if (args[i].rfind(flag + "=", 0) == 0) {
                path = args[i].substr(flag.size() + 1);
            }
        }
        if (path.empty()) continue;
        for (const auto& [key, value] : read_config(path)) injected.push_back("--" + key + "=" + value);
    }
    if (injected.empty() || args.size() < 2) return args;
    std::vector<std::string> out(args.begin(), args.begin() + 2);
    out.insert(out.end(), injected.begin(), injected.end());
    out.insert(out.end(), args.begin() + 2, args.end());
    return out;
}

int default_threads() {
    const char* env = std::getenv("RANK_GARCH_THREADS");
    if (env == nullptr || *env == '\0') return 1;
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (*end != '\0' || v < 1) {
        throw Error(ErrorCode::InvalidArgument, "RANK_GARCH_THREADS must be a positive integer");
    }
    return static_cast<int>(v);
}

Format parse_format(std::string_view name) {
    if (name == "csv") return Format::Csv;
    if (name == "jsonl") return Format::Jsonl;
    throw Error(ErrorCode::InvalidArgument, "unknown format '" + std::string(name) + "'");
}

void Table::add(std::vector<Cell> row) {
    if (row.size() != columns.size()) {
        throw Error(ErrorCode::InvalidArgument, "table row does not match the column count");
    }
    rows.push_back(std::move(row));
}

namespace {

nlohmann::ordered_json to_json(const Cell& c) {
    if (const auto* s = std::get_if<std::string>(&c)) return *s;
    if (const auto* i = std::get_if<long long>(&c)) return *i;
    const double d = std::get<double>(c);
    if (!std::isfinite(d)) return nullptr;
    return d;
}

}  // namespace

void write_table(std::ostream& os, const RunHeader& header, const Table& table, Format format) {
    if (format == Format::Csv) {
        write_header_comment(os, header);
        CsvWriter csv(os, table.columns);
        for (const auto& row : table.rows) {
            for (const auto& c : row) std::visit([&](const auto& v) { csv.cell(v); }, c);
            csv.end_row();
        }
        return;
    }
    nlohmann::ordered_json h;
    h["record"] = "header";
    h["tool_version"] = header.tool_version;
    h["command"] = header.command;
    h["seed"] = header.seed;
    if (!header.input_checksum.empty()) h["input_fnv1a64"] = header.input_checksum;
    nlohmann::ordered_json cfg = nlohmann::ordered_json::object();
    for (const auto& [k, v] : header.config) cfg[k] = v;
    h["config"] = cfg;
    os << h.dump() << '\n';
    for (const auto& row : table.rows) {
        nlohmann::ordered_json r;
        r["record"] = "row";
        for (std::size_t i = 0; i < row.size(); ++i) r[table.columns[i]] = to_json(row[i]);
        os << r.dump() << '\n';
    }
}

void write_table(const std::string& path, const RunHeader& header, const Table& table, Format format) {
    if (path == "-") {
        write_table(std::cout, header, table, format);
        std::cout.flush();
        return;
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, "cannot write '" + path + "'");
    write_table(out, header, table, format);
    out.close();
    if (!out) throw Error(ErrorCode::Io, "failed writing '" + path + "'");
}

std::vector<std::pair<std::string, std::string>> resolved_config(const CLI::App& sub,
                                                                 const std::set<std::string>& exclude) {
    std::map<std::string, std::string> values;
    for (const CLI::Option* opt : sub.get_options()) {
        std::string name = opt->get_lnames().empty() ? opt->get_name() : opt->get_lnames().front();
        if (name.empty() || name == "help" || exclude.count(name)) continue;
        std::string value;
        if (opt->count() > 0) {
            const auto res = opt->reduced_results();
            for (std::size_t i = 0; i < res.size(); ++i) value += (i ? "," : "") + res[i];
        } else {
            value = opt->get_default_str();
            if (value.size() >= 2 && value.front() == '[' && value.back() == ']') value = value.substr(1, value.size() - 2);
        }
        values[name] = value;
    }
    return {values.begin(), values.end()};
}

}  // namespace rgarch::cli
