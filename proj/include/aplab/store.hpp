#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <mutex>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "aplab/ground_set.hpp"

namespace aplab {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

/// One persisted experiment result. Serialized as a single JSON line with a fixed field order.
struct RunRecord {
    int schema_version = kSchemaVersion;
    std::string command;
    std::map<std::string, std::string> params;  // rationals as "p/q", integers as decimal strings
    std::uint64_t seed = 0;
    std::string started_at;                      // UTC, ISO 8601
    std::int64_t duration_ms = 0;
    Json results = Json::object();
    std::vector<std::string> budget_flags;
    std::string code_revision;
    bool rerun = false;

    Json to_json() const;
    std::string to_line() const;
    static RunRecord from_json(const Json& j);
    static RunRecord from_line(std::string_view line);

    // (command, params, seed) as a canonical string.
    std::string identity() const;
};

/// Append-only record file. Appends are serialized; a repeated identity is marked as a rerun.
class RecordStore {
public:
    explicit RecordStore(std::filesystem::path path);

    void append(RunRecord record);
    std::vector<RunRecord> load() const;
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
    mutable std::mutex mutex_;
};

class SetSpecError : public std::invalid_argument {
public:
    SetSpecError(const std::string& token, const std::string& reason);
    const std::string& token() const { return token_; }

private:
    std::string token_;
};

/// Parses "1..n", "3..7", "1,2,5", "@path" (file holding a spec), "" or "empty", or combinations
/// joined by commas. The literal "n" stands for the universe size.
GroundSet parse_set_spec(std::string_view spec, Element n);

class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Flat key = value configuration; '#' starts a comment. Keys mirror CLI flag names.
struct ExperimentConfig {
    std::map<std::string, std::string> values;

    static ExperimentConfig parse(std::string_view text);
    static ExperimentConfig load(const std::filesystem::path& path);
    // Throws ConfigError naming the first key not in `allowed`.
    void check_keys(const std::vector<std::string>& allowed) const;
};

std::string utc_timestamp();

}  // namespace aplab
