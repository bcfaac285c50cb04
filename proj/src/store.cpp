#include "aplab/store.hpp"

#include <algorithm>
#include <chrono>
#include <charconv>
#include <ctime>
#include <fstream>
#include <sstream>

namespace aplab {

Json RunRecord::to_json() const {
    Json j;
    j["schema_version"] = schema_version;
    j["command"] = command;
    Json p = Json::object();
    for (const auto& [key, value] : params) p[key] = value;
    j["params"] = p;
    j["seed"] = seed;
    j["started_at"] = started_at;
    j["duration_ms"] = duration_ms;
    j["results"] = results;
    j["budget_flags"] = budget_flags;
    j["code_revision"] = code_revision;
    j["rerun"] = rerun;
    return j;
}

std::string RunRecord::to_line() const { return to_json().dump(); }

RunRecord RunRecord::from_json(const Json& j) {
    RunRecord r;
    r.schema_version = j.at("schema_version").get<int>();
    r.command = j.at("command").get<std::string>();
    for (const auto& [key, value] : j.at("params").items()) r.params[key] = value.get<std::string>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.started_at = j.at("started_at").get<std::string>();
    r.duration_ms = j.at("duration_ms").get<std::int64_t>();
    r.results = j.at("results");
    r.budget_flags = j.at("budget_flags").get<std::vector<std::string>>();
    r.code_revision = j.at("code_revision").get<std::string>();
    r.rerun = j.value("rerun", false);
    return r;
}

RunRecord RunRecord::from_line(std::string_view line) { return from_json(Json::parse(line)); }

std::string RunRecord::identity() const {
    Json id;
    id["command"] = command;
    id["params"] = params;
    id["seed"] = seed;
    return id.dump();
}

RecordStore::RecordStore(std::filesystem::path path) : path_(std::move(path)) {}

void RecordStore::append(RunRecord record) {
    std::lock_guard lock(mutex_);
    if (!record.rerun) {
        const std::string id = record.identity();
        std::ifstream in(path_);
        for (std::string line; std::getline(in, line);) {
            if (line.empty()) continue;
            if (RunRecord::from_line(line).identity() == id) {
                record.rerun = true;
                break;
            }
        }
    }
    if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path());
    std::ofstream out(path_, std::ios::app);
    if (!out) throw std::runtime_error("cannot open " + path_.string() + " for appending");
    out << record.to_line() << '\n';
}

std::vector<RunRecord> RecordStore::load() const {
    std::lock_guard lock(mutex_);
    std::vector<RunRecord> out;
    std::ifstream in(path_);
    for (std::string line; std::getline(in, line);) {
        if (!line.empty()) out.push_back(RunRecord::from_line(line));
    }
    return out;
}

SetSpecError::SetSpecError(const std::string& token, const std::string& reason)
    : std::invalid_argument("bad set spec token '" + token + "': " + reason), token_(token) {}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

Element parse_bound(std::string_view text, std::string_view token, Element n) {
    text = trim(text);
    if (text == "n") return n;
    std::uint64_t value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
        throw SetSpecError(std::string(token), "not an integer");
    }
    if (value < 1 || value > n) {
        throw SetSpecError(std::string(token), "outside [1," + std::to_string(n) + "]");
    }
    return static_cast<Element>(value);
}

void add_spec(GroundSet& out, std::string_view spec, Element n, int depth) {
    spec = trim(spec);
    if (spec.empty() || spec == "empty") return;
    if (depth > 8) throw SetSpecError(std::string(spec), "@file nesting too deep");
    std::size_t start = 0;
    while (start <= spec.size()) {
        std::size_t comma = spec.find(',', start);
        if (comma == std::string_view::npos) comma = spec.size();
        std::string_view token = trim(spec.substr(start, comma - start));
        start = comma + 1;
        if (token.empty()) {
            if (comma == spec.size()) break;
            throw SetSpecError("", "empty element between commas");
        }
        if (token.front() == '@') {
            std::ifstream in{std::string(token.substr(1))};
            if (!in) throw SetSpecError(std::string(token), "cannot read file");
            std::stringstream text;
            for (std::string line; std::getline(in, line);) {
                line = line.substr(0, line.find('#'));
                std::replace_if(line.begin(), line.end(), [](char c) { return std::isspace(static_cast<unsigned char>(c)); }, ',');
                text << line << ',';
            }
            std::string body = text.str();
            // Collapse repeated separators produced by whitespace.
            std::string cleaned;
            for (char c : body) {
                if (c == ',' && (cleaned.empty() || cleaned.back() == ',')) continue;
                cleaned += c;
            }
            add_spec(out, cleaned, n, depth + 1);
            continue;
        }
        if (auto dots = token.find(".."); dots != std::string_view::npos) {
            Element lo = parse_bound(token.substr(0, dots), token, n);
            Element hi = parse_bound(token.substr(dots + 2), token, n);
            if (lo > hi) throw SetSpecError(std::string(token), "empty range");
            for (Element x = lo; x <= hi; ++x) out.insert(x);
            continue;
        }
        out.insert(parse_bound(token, token, n));
    }
}

}  // namespace

GroundSet parse_set_spec(std::string_view spec, Element n) {
    GroundSet out(n);
    add_spec(out, spec, n, 0);
    return out;
}

ExperimentConfig ExperimentConfig::parse(std::string_view text) {
    ExperimentConfig config;
    std::size_t line_no = 0;
    std::istringstream in{std::string(text)};
    for (std::string raw; std::getline(in, raw);) {
        ++line_no;
        std::string_view line = raw;
        line = trim(line.substr(0, line.find('#')));
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
        }
        std::string key(trim(line.substr(0, eq)));
        std::string value(trim(line.substr(eq + 1)));
        if (key.empty()) throw ConfigError("config line " + std::to_string(line_no) + ": empty key");
        if (config.values.count(key)) throw ConfigError("config key '" + key + "' given twice");
        config.values[key] = value;
    }
    return config;
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path.string());
    std::stringstream text;
    text << in.rdbuf();
    return parse(text.str());
}

void ExperimentConfig::check_keys(const std::vector<std::string>& allowed) const {
    for (const auto& [key, value] : values) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
            throw ConfigError("unknown config key '" + key + "'");
        }
    }
}

std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace aplab
