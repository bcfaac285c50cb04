#include "aplab/cli.hpp"

#include <charconv>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <limits>
#include <optional>

#include <CLI11.hpp>

#include "aplab/apfree.hpp"
#include "aplab/counting.hpp"
#include "aplab/proof_lab.hpp"
#include "aplab/random_lab.hpp"
#include "aplab/store.hpp"

#ifndef APLAB_REVISION
#define APLAB_REVISION "unknown"
#endif

namespace aplab {
namespace {

std::string shortest(double value) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    return ec == std::errc() ? std::string(buf, ptr) : std::string("nan");
}

std::uint64_t default_node_budget() {
    if (const char* env = std::getenv("APLAB_BUDGET_NODES")) {
        try {
            return std::stoull(env);
        } catch (const std::exception&) {
            throw std::invalid_argument(std::string("APLAB_BUDGET_NODES is not an integer: ") + env);
        }
    }
    return kDefaultNodeBudget;
}

std::vector<Rational> parse_rational_list(const std::string& text) {
    std::vector<Rational> out;
    std::stringstream in(text);
    for (std::string item; std::getline(in, item, ',');) {
        if (!item.empty()) out.push_back(parse_rational(item));
    }
    return out;
}

Json set_json(const GroundSet& s) {
    Json arr = Json::array();
    s.for_each([&](Element x) { arr.push_back(x); });
    return arr;
}

// Options shared by every command.
struct Common {
    std::string config;
    std::string out = "results.jsonl";
    bool no_record = false;
    bool json = false;
    std::uint64_t seed = 0;
};

struct ProofFlags {
    Element n = 0;
    unsigned k = 3;
    unsigned kprime = 2;
    Element m = 0;
    std::string alpha = "1";
    std::string beta = "1/2";
    std::string gamma_prime;
    std::string xi_prime;
    std::string T;
    std::string saturation_threshold;
    std::string count_threshold;
    std::string growth_threshold;
    long long deletion_limit = -1;
    std::string ground_spec = "1..n";
    std::string mode = "greedy";
    std::uint64_t exact_budget = 100'000;
    unsigned random_deletions = 32;
};

struct Flags {
    Common common;
    // count / enum / sweep
    Element n = 0;
    unsigned k = 3;
    std::optional<unsigned> kprime;
    std::string set_spec = "1..n";
    std::string ground_spec = "1..n";
    std::optional<Element> m;
    std::string gamma = "0";
    std::string beta = "1/2";
    std::string alpha = "1/2";
    bool allow_long = false;
    unsigned threads = 1;
    std::string c_grid;
    std::uint64_t trials = 0;
    std::string csv = "sweep.csv";
    std::uint64_t node_budget = 2'000'000;
    // proof
    ProofFlags proof;
    std::string shat_spec;
    std::string block_spec;
    std::string blocks;
    std::string x_spec;
    std::string threshold;
    std::string counts;
    std::optional<std::size_t> q;
    std::string T_target = "50";
};

void add_common(CLI::App* app, Common& c) {
    app->add_option("--config", c.config, "key = value file; command-line flags take precedence");
    app->add_option("--out", c.out, "record file (one JSON record per line)");
    app->add_flag("--no-record", c.no_record, "do not append a record");
    app->add_flag("--json", c.json, "print the record to stdout");
    app->add_option("--seed", c.seed, "master seed");
}

void add_proof_params(CLI::App* app, ProofFlags& p) {
    app->add_option("--n", p.n, "universe size")->required();
    app->add_option("--k", p.k, "AP length");
    app->add_option("--kprime", p.kprime, "threshold k'");
    app->add_option("--m", p.m, "subset size m (rounded down to a multiple of 2z)");
    app->add_option("--alpha", p.alpha);
    app->add_option("--beta", p.beta);
    app->add_option("--gamma-prime", p.gamma_prime);
    app->add_option("--xi-prime", p.xi_prime);
    app->add_option("--T", p.T);
    app->add_option("--saturation-threshold", p.saturation_threshold, "override gamma' mu_e / 2");
    app->add_option("--count-threshold", p.count_threshold, "override gamma mu");
    app->add_option("--growth-threshold", p.growth_threshold, "override n / z");
    app->add_option("--deletion-limit", p.deletion_limit, "override floor(xi' m' / 6)");
    app->add_option("--ground-spec", p.ground_spec, "D");
    app->add_option("--mode", p.mode, "exact or greedy")->check(CLI::IsMember({"exact", "greedy"}));
    app->add_option("--exact-budget", p.exact_budget);
    app->add_option("--random-deletions", p.random_deletions);
}

ProofParams proof_params_from(const ProofFlags& p) {
    if (p.gamma_prime.empty() || p.xi_prime.empty() || p.T.empty()) {
        throw std::invalid_argument("--gamma-prime, --xi-prime and --T are required");
    }
    ProblemParams problem;
    problem.n = p.n;
    problem.m = p.m;
    problem.k = p.k;
    problem.k_prime = p.kprime;
    problem.alpha = parse_rational(p.alpha);
    problem.beta = parse_rational(p.beta);
    ProofParams pp = derive_proof_params(problem, parse_rational(p.gamma_prime), parse_rational(p.xi_prime),
                                         parse_rational(p.T));
    if (!p.saturation_threshold.empty()) pp.saturation_threshold = parse_rational(p.saturation_threshold);
    if (!p.count_threshold.empty()) pp.count_threshold = parse_rational(p.count_threshold);
    if (!p.growth_threshold.empty()) pp.growth_threshold = parse_rational(p.growth_threshold);
    if (p.deletion_limit >= 0) pp.deletion_limit = static_cast<std::size_t>(p.deletion_limit);
    return pp;
}

void put_proof_params(RunRecord& rec, const ProofFlags& flags, const ProofParams& pp) {
    rec.params["n"] = std::to_string(pp.problem.n);
    rec.params["k"] = std::to_string(pp.problem.k);
    rec.params["kprime"] = std::to_string(pp.problem.k_prime);
    rec.params["m"] = std::to_string(pp.problem.m);
    rec.params["requested_m"] = std::to_string(pp.requested_m);
    rec.params["beta"] = to_string(pp.problem.beta);
    rec.params["gamma_prime"] = to_string(pp.gamma_prime);
    rec.params["xi_prime"] = to_string(pp.xi_prime);
    rec.params["T"] = to_string(pp.T);
    rec.params["e_approx"] = to_string(pp.e_approx);
    rec.params["ground_spec"] = flags.ground_spec;
    rec.params["mode"] = flags.mode;

    Json derived;
    derived["lambda"] = to_string(pp.lambda);
    derived["z"] = std::to_string(pp.z);
    derived["m_prime"] = std::to_string(pp.m_prime);
    derived["mu"] = to_string(pp.mu);
    derived["mu_e_lemma"] = to_string(pp.mu_e_lemma);
    derived["mu_e_proof"] = to_string(pp.mu_e_proof);
    derived["gamma"] = to_string(pp.gamma);
    derived["xi"] = to_string(pp.xi);
    derived["saturation_threshold"] = to_string(pp.saturation_threshold);
    derived["count_threshold"] = to_string(pp.count_threshold);
    derived["growth_threshold"] = to_string(pp.growth_threshold);
    derived["deletion_limit"] = std::to_string(pp.deletion_limit);
    derived["m_adjusted"] = pp.m_adjusted();
    rec.results["proof_params"] = derived;
}

Json verdict_json(const AdvancingVerdict& v) {
    Json j;
    j["mode"] = v.mode == CheckMode::exact ? "exact" : "greedy";
    j["advancing"] = v.advancing;
    j["verdict"] = v.advancing ? (v.mode == CheckMode::exact ? "PASS" : "PASS-heuristic") : "FAIL";
    j["downgraded"] = v.downgraded;
    j["base_saturated"] = std::to_string(v.base_saturated);
    j["deletions_checked"] = std::to_string(v.deletions_checked);
    if (v.witness) {
        j["witness"] = set_json(*v.witness);
        j["witness_ap_count"] = std::to_string(v.witness_values->ap_count);
        j["witness_saturated"] = std::to_string(v.witness_values->saturated_size);
    }
    return j;
}

AdvancingOptions advancing_options(const ProofFlags& p, std::uint64_t seed) {
    AdvancingOptions o;
    o.mode = p.mode == "exact" ? CheckMode::exact : CheckMode::greedy;
    o.exact_budget = p.exact_budget;
    o.random_deletions = p.random_deletions;
    o.seed = seed;
    return o;
}

Json trace_json(const ZBuilderTrace& trace) {
    Json j;
    j["mode_heuristic"] = trace.heuristic;
    j["Z"] = trace.Z;
    Json dels = Json::object();
    for (const auto& [i, X] : trace.deletions) dels[std::to_string(i)] = set_json(X);
    j["deletions"] = dels;
    Json steps = Json::array();
    for (const ZBuilderStep& s : trace.steps) {
        Json step;
        step["index"] = s.index;
        step["advancing"] = s.advancing;
        step["saturated_before"] = std::to_string(s.saturated_before);
        step["saturated_after"] = std::to_string(s.saturated_after);
        step["ap_count_after"] = std::to_string(s.ap_count_after);
        step["clause_a"] = s.clause_a;
        step["clause_b"] = s.clause_b;
        steps.push_back(step);
    }
    j["steps"] = steps;
    j["outcome"] = to_string(trace.outcome);
    j["final_count"] = std::to_string(trace.final_count);
    return j;
}

std::vector<GroundSet> parse_blocks(const std::string& text, Element n) {
    std::vector<GroundSet> blocks;
    std::stringstream in(text);
    for (std::string part; std::getline(in, part, ';');) blocks.push_back(parse_set_spec(part, n));
    return blocks;
}

// Appends --key value pairs from the config file for flags absent from the command line.
std::vector<std::string> inject_config(const std::vector<std::string>& args, CLI::App* target) {
    std::string path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
        if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
    }
    if (path.empty() || target == nullptr) return args;
    ExperimentConfig config = ExperimentConfig::load(path);

    std::vector<std::string> allowed;
    for (const CLI::Option* opt : target->get_options()) {
        for (const std::string& name : opt->get_lnames()) allowed.push_back(name);
    }
    config.check_keys(allowed);

    std::vector<std::string> out = args;
    for (const auto& [key, value] : config.values) {
        if (key == "config") throw ConfigError("config files cannot nest --config");
        const std::string flag = "--" + key;
        bool present = false;
        for (const std::string& a : args) present = present || a == flag || a.rfind(flag + "=", 0) == 0;
        if (present) continue;
        const CLI::Option* opt = target->get_option(flag);
        if (opt->get_expected_max() == 0) {
            if (value == "true" || value == "1") out.push_back(flag);
            else if (value != "false" && value != "0") throw ConfigError("flag '" + key + "' takes true/false");
        } else {
            out.push_back(flag);
            out.push_back(value);
        }
    }
    return out;
}

class Runner {
public:
    Runner(std::ostream& out, std::ostream& err) : out_(out), err_(err) {}

    int run(const std::vector<std::string>& raw_args) {
        CLI::App app{"Exact and Monte Carlo analysis of arithmetic progressions in subsets of [n]", "aplab"};
        app.require_subcommand(1);

        auto* count = app.add_subcommand("count", "count APs meeting S in at least k' elements");
        add_common(count, f_.common);
        count->add_option("--n", f_.n, "universe size")->required();
        count->add_option("--k", f_.k, "AP length")->required();
        count->add_option("--kprime", f_.kprime, "threshold k' (default k)");
        count->add_option("--set-spec", f_.set_spec, "S");
        count->add_option("--ground-spec", f_.ground_spec, "D");

        auto* enumerate = app.add_subcommand("enum", "exhaustive AP-free / deficient m-set counts");
        add_common(enumerate, f_.common);
        enumerate->add_option("--n", f_.n)->required();
        enumerate->add_option("--k", f_.k)->required();
        enumerate->add_option("--m", f_.m, "subset size (default: every m)");
        enumerate->add_option("--gamma", f_.gamma, "deficiency constant");
        enumerate->add_option("--beta", f_.beta, "rate for the beta^m C(n,m) comparison");
        enumerate->add_flag("--allow-long", f_.allow_long, "lift the node budget");
        enumerate->add_option("--threads", f_.threads);

        auto* sweep = app.add_subcommand("sweep", "random-set threshold sweep");
        add_common(sweep, f_.common);
        sweep->add_option("--n", f_.n)->required();
        sweep->add_option("--k", f_.k)->required();
        sweep->add_option("--alpha", f_.alpha)->required();
        sweep->add_option("--c-grid", f_.c_grid, "comma-separated constants C, p = C n^(-1/(k-1))")->required();
        sweep->add_option("--trials", f_.trials)->required();
        sweep->add_option("--csv", f_.csv, "CSV output path");
        sweep->add_option("--node-budget", f_.node_budget, "search nodes per trial");
        sweep->add_option("--threads", f_.threads);

        auto* proof = app.add_subcommand("proof", "instrumented steps of the counting argument");
        proof->require_subcommand(1);
        auto* saturate = proof->add_subcommand("saturate", "saturated set of S_hat in D");
        auto* advancing = proof->add_subcommand("advancing", "advancing property of a block");
        auto* zbuild = proof->add_subcommand("zbuild", "sequential construction of Z");
        auto* deletion = proof->add_subcommand("deletion", "deletion families and greedy second-moment descent");
        auto* pz = proof->add_subcommand("pz", "Paley-Zygmund check on a degree profile");
        for (auto* sub : {saturate, advancing, zbuild}) {
            add_common(sub, f_.common);
            add_proof_params(sub, f_.proof);
        }
        saturate->add_option("--shat-spec", f_.shat_spec, "S_hat");
        saturate->add_option("--threshold", f_.threshold, "explicit threshold (else gamma' mu_e / 2)");
        advancing->add_option("--block-spec", f_.block_spec, "S")->required();
        advancing->add_option("--shat-spec", f_.shat_spec, "S_hat");
        zbuild->add_option("--blocks", f_.blocks, "S_1;S_2;... as set specs")->required();
        zbuild->add_option("--x-spec", f_.x_spec, "X");
        for (auto* sub : {deletion, pz}) {
            add_common(sub, f_.common);
            sub->add_option("--n", f_.n)->required();
            sub->add_option("--k", f_.k);
            sub->add_option("--kprime", f_.kprime);
            sub->add_option("--set-spec", f_.set_spec, "S");
        }
        deletion->add_option("--q", f_.q, "deletion budget for the second-moment descent");
        deletion->add_option("--T-target", f_.T_target, "report achieved <= T mu_e^2");
        pz->add_option("--ground-spec", f_.ground_spec, "D");
        pz->add_option("--counts", f_.counts, "explicit profile c_1,...,c_n (overrides the sets)");

        std::vector<std::string> args = raw_args;
        try {
            args = inject_config(raw_args, locate(app, raw_args));
            std::vector<std::string> reversed(args.rbegin(), args.rend());
            app.parse(reversed);
        } catch (const CLI::ParseError& e) {
            return app.exit(e, out_, err_) == 0 ? kExitOk : kExitUsage;
        } catch (const std::exception& e) {
            err_ << "error: " << e.what() << '\n';
            return kExitUsage;
        }

        try {
            started_ = std::chrono::steady_clock::now();
            std::optional<RunRecord> rec;
            if (*count) rec = cmd_count();
            else if (*enumerate) rec = cmd_enum();
            else if (*sweep) rec = cmd_sweep();
            else if (*saturate) rec = cmd_saturate();
            else if (*advancing) rec = cmd_advancing();
            else if (*zbuild) rec = cmd_zbuild();
            else if (*deletion) rec = cmd_deletion();
            else if (*pz) rec = cmd_pz();
            finish(*rec);
        } catch (const BudgetExceeded& e) {
            err_ << "error: refusing to run: " << e.what()
                 << "; pass --allow-long or raise APLAB_BUDGET_NODES\n";
            return kExitBudget;
        } catch (const std::exception& e) {
            err_ << "error: " << e.what() << '\n';
            return kExitUsage;
        }
        return kExitOk;
    }

private:
    // Subcommand the arguments select, for validating config keys.
    static CLI::App* locate(CLI::App& app, const std::vector<std::string>& args) {
        CLI::App* current = &app;
        for (const std::string& a : args) {
            if (a.rfind("-", 0) == 0) break;
            CLI::App* sub = nullptr;
            try {
                sub = current->get_subcommand(a);
            } catch (const CLI::OptionNotFound&) {
                break;
            }
            current = sub;
        }
        return current == &app ? nullptr : current;
    }

    RunRecord begin(const std::string& command) {
        RunRecord rec;
        rec.command = command;
        rec.seed = f_.common.seed;
        rec.started_at = utc_timestamp();
        rec.code_revision = APLAB_REVISION;
        return rec;
    }

    void finish(RunRecord& rec) {
        rec.duration_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                              std::chrono::steady_clock::now() - started_)
                              .count();
        if (!f_.common.no_record) RecordStore(f_.common.out).append(rec);
        if (f_.common.json) out_ << rec.to_line() << '\n';
    }

    RunRecord cmd_count() {
        const unsigned kp = f_.kprime.value_or(f_.k);
        const GroundSet D = parse_set_spec(f_.ground_spec, f_.n);
        const GroundSet S = parse_set_spec(f_.set_spec, f_.n);
        if (!S.is_subset_of(D)) throw std::invalid_argument("S is not a subset of D");

        RunRecord rec = begin("count");
        rec.params = {{"n", std::to_string(f_.n)}, {"k", std::to_string(f_.k)}, {"kprime", std::to_string(kp)},
                      {"set_spec", f_.set_spec}, {"ground_spec", f_.ground_spec}};
        const std::uint64_t total = count_aps(S, D, kp, f_.k);
        const DegreeProfile profile = degree_profile(S, D, kp, f_.k);
        const DegreeSumRelation rel = degree_sum_relation(S, D, kp, f_.k);
        rec.results["ap_count"] = std::to_string(total);
        rec.results["aps_in_interval"] = std::to_string(ap_count_in_interval(f_.n, f_.k));
        rec.results["set_size"] = std::to_string(S.size());
        rec.results["ground_size"] = std::to_string(D.size());
        rec.results["first_moment"] = to_string(profile.first_moment());
        rec.results["second_moment"] = to_string(profile.second_moment());
        rec.results["degree_sum"] = std::to_string(rel.degree_sum);
        rec.results["exact_weighted"] = std::to_string(rel.exact_weighted);
        rec.results["k_times_count"] = std::to_string(rel.k_times_count);

        out_ << "AP_{" << kp << "," << f_.k << "}(S,D) = " << total << "\n"
             << "|S| = " << S.size() << ", |D| = " << D.size() << "\n"
             << "first moment  = " << to_string(profile.first_moment()) << "\n"
             << "second moment = " << to_string(profile.second_moment()) << "\n"
             << "degree sum = " << rel.degree_sum << " (exact weighting " << rel.exact_weighted
             << ", k * count = " << rel.k_times_count << ")\n";
        return rec;
    }

    RunRecord cmd_enum() {
        EnumerationOptions options;
        options.node_budget = f_.allow_long ? std::numeric_limits<std::uint64_t>::max() : default_node_budget();
        options.enforce_binomial_budget = !f_.allow_long;
        options.threads = f_.threads;
        const Rational gamma = parse_rational(f_.gamma);

        ProblemParams params;
        params.n = f_.n;
        params.k = f_.k;
        params.k_prime = f_.k;
        params.alpha = 1;
        params.beta = parse_rational(f_.beta);

        std::vector<Element> sizes;
        if (f_.m) sizes.push_back(*f_.m);
        else for (Element m = 0; m <= f_.n; ++m) sizes.push_back(m);

        // Every size is computed before anything is printed or recorded.
        std::vector<EnumerationResult> rows;
        for (Element m : sizes) {
            params.m = m;
            rows.push_back(count_deficient_msets(params, gamma, options));
        }

        RunRecord rec = begin("enum");
        rec.params = {{"n", std::to_string(f_.n)}, {"k", std::to_string(f_.k)},
                      {"m", f_.m ? std::to_string(*f_.m) : std::string("all")},
                      {"gamma", to_string(gamma)}, {"beta", to_string(params.beta)},
                      {"allow_long", f_.allow_long ? "true" : "false"}};
        if (f_.allow_long) rec.budget_flags.push_back("allow_long");
        Json table = Json::array();
        out_ << std::left << std::setw(6) << "m" << std::setw(16) << "C(n,m)" << std::setw(16) << "apfree"
             << std::setw(16) << "deficient" << "beta^m C(n,m)\n";
        for (const EnumerationResult& r : rows) {
            Json row;
            row["m"] = r.params.m;
            row["total_msets"] = r.total_msets.str();
            row["apfree_count"] = r.apfree_count.str();
            row["deficient_count"] = r.deficient_count.str();
            row["threshold"] = to_string(r.threshold);
            row["deficient_fraction"] = to_string(r.deficient_fraction());
            row["beta_bound"] = to_string(r.beta_bound());
            row["deficient_within_beta_bound"] = Rational(r.deficient_count) <= r.beta_bound();
            row["exhaustive"] = r.exhaustive;
            row["nodes"] = std::to_string(r.nodes);
            table.push_back(row);
            out_ << std::setw(6) << r.params.m << std::setw(16) << r.total_msets.str() << std::setw(16)
                 << r.apfree_count.str() << std::setw(16) << r.deficient_count.str()
                 << shortest(to_double(r.beta_bound())) << "\n";
        }
        rec.results["rows"] = table;
        return rec;
    }

    RunRecord cmd_sweep() {
        SweepConfig config;
        config.n = f_.n;
        config.k = f_.k;
        config.alpha = parse_rational(f_.alpha);
        config.c_grid = parse_rational_list(f_.c_grid);
        config.trials = f_.trials;
        config.seed = f_.common.seed;
        config.node_budget = f_.node_budget;
        config.threads = f_.threads;
        config.validate();
        const SweepResult result = threshold_sweep(config);

        std::ostringstream csv;
        csv << "C,p,trials,successes,unresolved,wilson_lo,wilson_hi,mean_set_size\n";
        Json points = Json::array();
        for (const SweepPoint& pt : result.points) {
            csv << shortest(to_double(pt.c)) << ',' << shortest(pt.p) << ',' << pt.trials << ',' << pt.successes
                << ',' << pt.unresolved << ',' << shortest(pt.interval.lo) << ',' << shortest(pt.interval.hi)
                << ',' << shortest(to_double(pt.mean_set_size)) << '\n';
            Json j;
            j["C"] = to_string(pt.c);
            j["p"] = shortest(pt.p);
            j["trials"] = std::to_string(pt.trials);
            j["successes"] = std::to_string(pt.successes);
            j["unresolved"] = std::to_string(pt.unresolved);
            j["wilson"] = {shortest(pt.interval.lo), shortest(pt.interval.hi)};
            j["mean_set_size"] = to_string(pt.mean_set_size);
            points.push_back(j);
        }
        std::ofstream file(f_.csv, std::ios::binary | std::ios::trunc);
        if (!file) throw std::runtime_error("cannot write " + f_.csv);
        file << csv.str();
        file.close();

        RunRecord rec = begin("sweep");
        rec.params = {{"n", std::to_string(f_.n)}, {"k", std::to_string(f_.k)}, {"alpha", to_string(config.alpha)},
                      {"c_grid", f_.c_grid}, {"trials", std::to_string(f_.trials)},
                      {"node_budget", std::to_string(f_.node_budget)}};
        rec.results["csv"] = f_.csv;
        rec.results["points"] = points;
        for (const SweepPoint& pt : result.points) {
            if (pt.unresolved > 0) {
                rec.budget_flags.push_back("unresolved:C=" + to_string(pt.c) + ":" + std::to_string(pt.unresolved));
            }
        }
        out_ << csv.str();
        return rec;
    }

    RunRecord cmd_saturate() {
        const ProofFlags& p = f_.proof;
        const GroundSet D = parse_set_spec(p.ground_spec, p.n);
        const GroundSet S_hat = parse_set_spec(f_.shat_spec, p.n);
        if (!S_hat.is_subset_of(D)) throw std::invalid_argument("S_hat is not a subset of D");
        RunRecord rec = begin("proof saturate");
        Rational threshold;
        if (!f_.threshold.empty()) {
            threshold = parse_rational(f_.threshold);
            rec.params = {{"n", std::to_string(p.n)}, {"k", std::to_string(p.k)},
                          {"kprime", std::to_string(p.kprime)}, {"ground_spec", p.ground_spec}};
        } else {
            const ProofParams pp = proof_params_from(p);
            threshold = pp.saturation_threshold;
            put_proof_params(rec, p, pp);
        }
        rec.params["shat_spec"] = f_.shat_spec;
        rec.params["threshold"] = to_string(threshold);
        const GroundSet T = saturated_set(S_hat, D, p.k, p.kprime, threshold);
        rec.results["saturated_size"] = std::to_string(T.size());
        rec.results["ground_size"] = std::to_string(D.size());
        rec.results["saturated"] = set_json(T);
        out_ << "|T(S_hat)| = " << T.size() << " of |D| = " << D.size() << "\n" << T.to_string() << "\n";
        return rec;
    }

    RunRecord cmd_advancing() {
        const ProofFlags& p = f_.proof;
        const ProofParams pp = proof_params_from(p);
        const GroundSet D = parse_set_spec(p.ground_spec, p.n);
        const GroundSet S = parse_set_spec(f_.block_spec, p.n);
        const GroundSet S_hat = parse_set_spec(f_.shat_spec, p.n);
        const AdvancingVerdict v = check_advancing(S, S_hat, D, pp, advancing_options(p, f_.common.seed));
        RunRecord rec = begin("proof advancing");
        put_proof_params(rec, p, pp);
        rec.params["block_spec"] = f_.block_spec;
        rec.params["shat_spec"] = f_.shat_spec;
        rec.results["verdict"] = verdict_json(v);
        if (v.downgraded) rec.budget_flags.push_back("exact_downgraded_to_greedy");
        out_ << verdict_json(v).dump(2) << "\n";
        return rec;
    }

    RunRecord cmd_zbuild() {
        const ProofFlags& p = f_.proof;
        const ProofParams pp = proof_params_from(p);
        const GroundSet D = parse_set_spec(p.ground_spec, p.n);
        const std::vector<GroundSet> blocks = parse_blocks(f_.blocks, p.n);
        const GroundSet X = parse_set_spec(f_.x_spec, p.n);
        const ZBuilderTrace trace = sequential_z_builder(blocks, X, D, pp, advancing_options(p, f_.common.seed));
        RunRecord rec = begin("proof zbuild");
        put_proof_params(rec, p, pp);
        rec.params["blocks"] = f_.blocks;
        rec.params["x_spec"] = f_.x_spec;
        rec.results["mode"] = p.mode;
        rec.results["trace"] = trace_json(trace);
        out_ << trace_json(trace).dump(2) << "\n";
        return rec;
    }

    RunRecord cmd_deletion() {
        const unsigned kp = f_.kprime.value_or(2);
        RunRecord rec = begin("proof deletion");
        rec.params = {{"n", std::to_string(f_.n)}, {"k", std::to_string(f_.k)}, {"kprime", std::to_string(kp)}};
        if (!f_.q) {
            const DeletionFamilies fam = build_deletion_families(f_.n, f_.k, kp);
            rec.results["B_size"] = std::to_string(fam.B.size());
            rec.results["related_pairs"] = std::to_string(fam.related.size());
            rec.results["K"] = std::to_string(fam.K);
            Json unions = Json::object();
            for (const auto& [s, family] : fam.unions) unions[std::to_string(s)] = std::to_string(family.size());
            rec.results["union_sizes"] = unions;
            out_ << "|B| = " << fam.B.size() << ", K = " << fam.K << ", related pairs = " << fam.related.size()
                 << "\n";
            for (const auto& [s, family] : fam.unions) out_ << "|B'_" << s << "| = " << family.size() << "\n";
            return rec;
        }
        const GroundSet S = parse_set_spec(f_.set_spec, f_.n);
        const Rational T_target = parse_rational(f_.T_target);
        const DeletionOutcome d = second_moment_with_deletion(S, f_.k, kp, *f_.q, T_target);
        rec.params["set_spec"] = f_.set_spec;
        rec.params["q"] = std::to_string(*f_.q);
        rec.params["T_target"] = to_string(T_target);
        rec.results["X"] = set_json(d.X);
        rec.results["achieved"] = to_string(d.achieved);
        rec.results["mu_e"] = to_string(d.mu_e);
        rec.results["ratio"] = to_string(d.ratio);
        rec.results["within_target"] = d.within_target;
        out_ << "removed " << d.X.to_string() << "\nachieved second moment " << to_string(d.achieved)
             << " = " << shortest(to_double(d.ratio)) << " mu_e^2\n";
        return rec;
    }

    RunRecord cmd_pz() {
        DegreeProfile profile;
        RunRecord rec = begin("proof pz");
        if (!f_.counts.empty()) {
            std::vector<std::uint64_t> counts{0};
            std::stringstream in(f_.counts);
            for (std::string item; std::getline(in, item, ',');) counts.push_back(parse_bigint(item).convert_to<std::uint64_t>());
            profile = DegreeProfile::from_counts(std::move(counts));
            rec.params = {{"counts", f_.counts}};
        } else {
            const unsigned kp = f_.kprime.value_or(f_.k);
            const GroundSet D = parse_set_spec(f_.ground_spec, f_.n);
            const GroundSet S = parse_set_spec(f_.set_spec, f_.n);
            profile = degree_profile(S, D, kp, f_.k);
            rec.params = {{"n", std::to_string(f_.n)}, {"k", std::to_string(f_.k)}, {"kprime", std::to_string(kp)},
                          {"set_spec", f_.set_spec}, {"ground_spec", f_.ground_spec}};
        }
        const PaleyZygmundReport r = paley_zygmund_check(profile);
        rec.results["degenerate"] = r.degenerate;
        rec.results["mean"] = to_string(r.mean);
        rec.results["second_moment"] = to_string(r.second_moment);
        rec.results["probability"] = to_string(r.probability);
        rec.results["lower_bound"] = to_string(r.lower_bound);
        rec.results["holds"] = r.holds;
        rec.results["ratio"] = to_string(r.ratio);
        rec.results["ratio_decimal"] = shortest(to_double(r.ratio));
        if (r.degenerate) {
            out_ << "degenerate profile (zero mean): inequality vacuous\n";
        } else {
            out_ << "Pr(Y >= E[Y]/2) = " << to_string(r.probability) << "\nE[Y]^2/(4E[Y^2]) = "
                 << to_string(r.lower_bound) << "\nholds: " << (r.holds ? "yes" : "NO") << ", ratio "
                 << shortest(to_double(r.ratio)) << "\n";
        }
        return rec;
    }

    std::ostream& out_;
    std::ostream& err_;
    Flags f_;
    std::chrono::steady_clock::time_point started_;
};

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    return Runner(out, err).run(args);
}

}  // namespace aplab
