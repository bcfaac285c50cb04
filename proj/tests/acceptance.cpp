// Acceptance harness: one PASS/FAIL line per criterion, nonzero exit if any fails.
// Usage: acceptance [criterion numbers...]

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "aplab/apfree.hpp"
#include "aplab/cli.hpp"
#include "aplab/counting.hpp"
#include "aplab/proof_lab.hpp"
#include "aplab/random_lab.hpp"
#include "aplab/store.hpp"
#include "oracle.hpp"
#include "toy.hpp"

using namespace aplab;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
    bool pass = false;
    std::string detail;
};

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

GroundSet random_subset(const GroundSet& of, std::mt19937_64& rng, double p) {
    GroundSet out(of.universe());
    std::bernoulli_distribution coin(p);
    of.for_each([&](Element x) {
        if (coin(rng)) out.insert(x);
    });
    return out;
}

struct Instance {
    Element n;
    unsigned k, kp;
    GroundSet S, D;
};

// Profiles met in criteria 1-4, re-checked by criterion 5.
std::vector<DegreeProfile> g_profiles;

Instance random_instance(std::mt19937_64& rng, Element max_n) {
    Instance inst;
    inst.n = static_cast<Element>(1 + rng() % max_n);
    inst.k = static_cast<unsigned>(3 + rng() % 3);
    inst.kp = static_cast<unsigned>(rng() % (inst.k + 1));
    inst.D = random_subset(GroundSet::interval(inst.n), rng, 0.6 + 0.4 * std::uniform_real_distribution<>()(rng));
    inst.S = random_subset(inst.D, rng, std::uniform_real_distribution<>()(rng));
    return inst;
}

Outcome criterion1() {
    const auto t0 = Clock::now();
    std::mt19937_64 rng(1);
    int mismatches = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const Instance in = random_instance(rng, 40);
        const auto s = oracle::mask_of(in.S), d = oracle::mask_of(in.D);
        const int n = static_cast<int>(in.n);
        mismatches += count_aps(in.S, in.D, in.kp, in.k) != oracle::count(s, d, n, in.kp, in.k);
        for (Element x = 1; x <= in.n; ++x) {
            mismatches += count_aps_through(x, in.S, in.D, in.kp, in.k) !=
                          oracle::through(static_cast<int>(x), s, d, n, in.kp, in.k);
        }
        g_profiles.push_back(degree_profile(in.S, in.D, in.kp, in.k));
    }
    const double secs = seconds_since(t0);
    return {mismatches == 0 && secs < 10,
            "200 instances, " + std::to_string(mismatches) + " mismatches, " + fmt("%.2f s", secs)};
}

Outcome criterion2() {
    const auto t0 = Clock::now();
    bool ok = count_apfree_msets(5, 3, 3) == 6;
    int checked = 0;
    for (int k = 3; k <= 4; ++k) {
        for (int n = 0; n <= 12; ++n) {
            const auto by_size = oracle::apfree_by_size(n, k);
            for (int m = 0; m <= n; ++m, ++checked) ok = ok && count_apfree_msets(n, k, m) == by_size[m];
            if (n >= k) g_profiles.push_back(degree_profile(GroundSet::interval(n), GroundSet::interval(n), k - 1, k));
        }
    }
    const double secs = seconds_since(t0);
    return {ok && secs < 60, "apfree(5,3,3)=" + count_apfree_msets(5, 3, 3).str() + ", " + std::to_string(checked) +
                                 " (n,k,m) cases, " + fmt("%.2f s", secs)};
}

Outcome criterion3() {
    const auto t0 = Clock::now();
    bool ok = true;
    int cases = 0;
    std::mt19937_64 rng(3);
    for (int n = 1; n <= 16; ++n) {
        std::vector<oracle::Mask> sets = {oracle::interval(n)};
        for (int extra = 0; extra < 4; ++extra) sets.push_back((rng() << 1) & oracle::interval(n));
        for (oracle::Mask S : sets) {
            const auto [size, witness] = oracle::max_apfree(S, n, 3);
            const ExtremalResult r = max_apfree_subset(oracle::set_of(S, n), 3);
            std::vector<int> got;
            for (Element x : r.witness.members()) got.push_back(static_cast<int>(x));
            ok = ok && r.exact && r.size == static_cast<std::size_t>(size) && got == witness;
            ++cases;
        }
    }
    const double secs = seconds_since(t0);
    return {ok && secs < 60, std::to_string(cases) + " sets (every [n] plus random subsets), n <= 16, " +
                                 fmt("%.2f s", secs)};
}

Outcome criterion4() {
    std::mt19937_64 rng(4);
    int failures = 0;
    for (int trial = 0; trial < 500; ++trial) {
        const Instance in = random_instance(rng, 30);
        std::uint64_t weighted = 0;
        for (const auto& ap : oracle::aps(static_cast<int>(in.n), static_cast<int>(in.k))) {
            if (!oracle::inside(ap, oracle::mask_of(in.D))) continue;
            const auto j = static_cast<unsigned>(oracle::meet(ap, oracle::mask_of(in.S)));
            weighted += j < in.kp ? 0 : j == in.kp ? in.k - in.kp : in.k;
        }
        const DegreeProfile p = degree_profile(in.S, in.D, in.kp, in.k);
        failures += p.sum != weighted;
        failures += degree_sum_relation(in.S, in.D, in.kp, in.k).exact_weighted != weighted;
        g_profiles.push_back(p);
    }
    return {failures == 0, "500 instances, " + std::to_string(failures) + " violations"};
}

Outcome criterion5() {
    std::mt19937_64 rng(5);
    int violations = 0, random_checked = 0, degenerate = 0;
    for (int trial = 0; trial < 1000; ++trial, ++random_checked) {
        std::vector<std::uint64_t> counts(2 + rng() % 60, 0);
        const int style = static_cast<int>(rng() % 3);
        for (std::size_t x = 1; x < counts.size(); ++x) {
            counts[x] = style == 0 ? rng() % 5 : style == 1 ? (rng() % 8 == 0 ? rng() % 10000 : 0) : rng() % 100;
        }
        const PaleyZygmundReport r = paley_zygmund_check(DegreeProfile::from_counts(counts));
        violations += !r.holds;
        degenerate += r.degenerate;
    }
    for (const DegreeProfile& p : g_profiles) {
        const PaleyZygmundReport r = paley_zygmund_check(p);
        violations += !r.holds;
        degenerate += r.degenerate;
    }
    return {violations == 0 && !g_profiles.empty(),
            std::to_string(random_checked) + " random + " + std::to_string(g_profiles.size()) +
                " profiles from criteria 1-4 (" + std::to_string(degenerate) + " degenerate), " +
                std::to_string(violations) + " violations"};
}

// Records for criteria 6-8, compared by criterion 10.
struct Records {
    std::string concentration;
    std::string deletion;
    std::string sweep;
};

constexpr std::uint64_t kSeed = 20240101;

std::string concentration_record(unsigned threads, ConcentrationReport* report_out = nullptr) {
    const Element n = 2000;
    const Element m = 3 * static_cast<Element>(std::ceil(std::sqrt(2000.0)));
    const ConcentrationReport r = ap_count_concentration(n, 3, m, 10000, kSeed, {threads});
    if (report_out) *report_out = r;
    Json j;
    j["n"] = n;
    j["m"] = m;
    j["expected"] = to_string(r.expected);
    j["sample_mean"] = fmt("%.17g", r.sample_mean);
    j["standard_error"] = fmt("%.17g", r.standard_error);
    return j.dump();
}

Outcome criterion6(Records& rec) {
    const auto t0 = Clock::now();
    ConcentrationReport r;
    rec.concentration = concentration_record(1, &r);
    const double secs = seconds_since(t0);
    return {std::abs(r.z_score) <= 4 && secs < 300,
            "m=" + std::to_string(3 * static_cast<int>(std::ceil(std::sqrt(2000.0)))) + ", mean " +
                fmt("%.4f", r.sample_mean) + " vs " + fmt("%.4f", to_double(r.expected)) + ", z=" +
                fmt("%.3f", r.z_score) + ", " + fmt("%.1f s", secs)};
}

std::string deletion_record(unsigned threads, int* within_out = nullptr, double* worst_out = nullptr) {
    const Element n = 200;
    const auto m = static_cast<Element>(std::ceil(4 * std::sqrt(200.0)));
    const auto q = static_cast<std::size_t>(std::ceil(0.05 * m));
    std::vector<DeletionOutcome> outs(100);
    std::vector<std::thread> pool;
    std::atomic<int> next{0};
    auto work = [&] {
        for (int s = next++; s < 100; s = next++) {
            outs[s] = second_moment_with_deletion(sample_m_set(n, m, {kSeed, static_cast<std::uint64_t>(s)}), 3, 2, q,
                                                  50);
        }
    };
    for (unsigned t = 0; t < std::max(1u, threads); ++t) pool.emplace_back(work);
    for (auto& t : pool) t.join();
    Json j;
    j["n"] = n;
    j["m"] = m;
    j["q"] = q;
    Json seeds = Json::array();
    int within = 0;
    double worst = 0;
    for (const DeletionOutcome& d : outs) {
        within += d.within_target;
        worst = std::max(worst, to_double(d.ratio));
        seeds.push_back({{"X", d.X.to_string()}, {"achieved", to_string(d.achieved)}, {"ratio", to_string(d.ratio)}});
    }
    j["seeds"] = seeds;
    if (within_out) *within_out = within;
    if (worst_out) *worst_out = worst;
    return j.dump();
}

Outcome criterion7(Records& rec) {
    const auto t0 = Clock::now();
    int within = 0;
    double worst = 0;
    rec.deletion = deletion_record(1, &within, &worst);
    const double secs = seconds_since(t0);
    return {within >= 95 && secs < 600, std::to_string(within) + "/100 seeds within 50 mu_e^2 (worst ratio " +
                                            fmt("%.2f", worst) + "), " + fmt("%.1f s", secs)};
}

struct SweepRun {
    Json results;
    std::string record;
    std::string csv;
    int code = 0;
};

SweepRun sweep_record(unsigned threads) {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "aplab_acceptance";
    fs::create_directories(dir);
    const std::string csv = (dir / "sweep.csv").string();
    const std::string out = (dir / "results.jsonl").string();
    fs::remove(out);
    std::ostringstream sink, err;
    SweepRun run;
    run.code = run_cli({"sweep", "--n", "300", "--k", "3", "--alpha", "1/2", "--c-grid", "0.5,1,2,4,8", "--trials",
                        "200", "--seed", std::to_string(kSeed), "--threads", std::to_string(threads), "--csv", csv,
                        "--out", out},
                       sink, err);
    if (run.code != 0) {
        std::fprintf(stderr, "%s", err.str().c_str());
        return run;
    }
    std::ifstream in(csv, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    run.csv = ss.str();
    const RunRecord rec = RecordStore(out).load().back();
    run.results = rec.results;
    run.record = rec.results.dump() + Json(rec.budget_flags).dump();
    fs::remove_all(dir);
    return run;
}

Outcome criterion8(Records& rec) {
    const auto t0 = Clock::now();
    const SweepRun run = sweep_record(1);
    const double secs = seconds_since(t0);
    if (run.code != 0) return {false, "sweep command failed"};
    rec.sweep = run.record + run.csv;
    const Json& points = run.results["points"];
    const Json& low = points.front();
    const Json& high = points.back();
    std::uint64_t trials = 0, unresolved = 0;
    for (const Json& p : points) {
        trials += std::stoull(p["trials"].get<std::string>());
        unresolved += std::stoull(p["unresolved"].get<std::string>());
    }
    const double low_hi = std::stod(low["wilson"][1].get<std::string>());
    const double high_lo = std::stod(high["wilson"][0].get<std::string>());
    const bool separated = high_lo > low_hi;
    const bool few_unresolved = unresolved * 20 < trials;
    std::string curve;
    for (const Json& p : points) curve += (curve.empty() ? "" : " ") + p["successes"].get<std::string>();
    return {separated && few_unresolved && secs < 1800,
            "successes per C {0.5,1,2,4,8}: " + curve + "; C=0.5 upper " + fmt("%.3f", low_hi) + " < C=8 lower " +
                fmt("%.3f", high_lo) + "; unresolved " + std::to_string(unresolved) + "/" + std::to_string(trials) +
                ", " + fmt("%.1f s", secs)};
}

Outcome criterion9() {
    std::mt19937_64 rng(9);
    int mismatches = 0;
    for (int trial = 0; trial < 50; ++trial) {
        const toy::Instance inst = toy::make(rng);
        const oracle::Mask D = oracle::mask_of(inst.D);
        const unsigned kp = inst.pp.problem.k_prime;
        AdvancingOptions exact;
        exact.mode = CheckMode::exact;

        // Advancing, for block 1 against a random prefix and block 2 against block 1.
        const oracle::Mask prefix = oracle::mask_of(inst.D - inst.blocks[0]) & (rng() << 1);
        mismatches += check_advancing(inst.blocks[0], oracle::set_of(prefix, inst.n), inst.D, inst.pp, exact)
                          .advancing != oracle::advancing(oracle::mask_of(inst.blocks[0]), prefix, D, inst.n, 3, kp,
                                                          inst.thresholds);
        mismatches += check_advancing(inst.blocks[1], inst.blocks[0], inst.D, inst.pp, exact).advancing !=
                      oracle::advancing(oracle::mask_of(inst.blocks[1]), oracle::mask_of(inst.blocks[0]), D, inst.n,
                                        3, kp, inst.thresholds);

        // Bad sequences, for every Z and every admissible deletion on it.
        for (const std::set<int>& Z : std::vector<std::set<int>>{{}, {1}, {2}, {1, 2}}) {
            std::vector<std::map<int, oracle::Mask>> families = {{}};
            for (int i : Z) {
                std::vector<std::map<int, oracle::Mask>> grown;
                for (const auto& f : families)
                    for (oracle::Mask Xi :
                         oracle::subsets_up_to(oracle::mask_of(inst.blocks[i - 1]), inst.thresholds.deletion_limit)) {
                        auto g = f;
                        g[i] = Xi;
                        grown.push_back(g);
                    }
                families = grown;
            }
            for (const auto& X : families) {
                PartitionSequence seq;
                seq.blocks = inst.blocks;
                for (int i : Z) {
                    seq.Z.push_back(static_cast<std::size_t>(i));
                    seq.deletions[static_cast<std::size_t>(i)] = oracle::set_of(X.at(i), inst.n);
                }
                mismatches += classify_bad_sequence(seq, inst.D, inst.pp, exact).bad !=
                              oracle::bad(toy::masks(inst), Z, X, D, inst.n, 3, kp, inst.thresholds);
            }
        }
        mismatches += find_bad_witness(inst.blocks, inst.D, inst.pp).has_value() != toy::some_bad_witness(inst);

        // The Z construction, for every admissible X.
        const oracle::Mask all = oracle::mask_of(inst.blocks[0] | inst.blocks[1]);
        for (oracle::Mask X : oracle::subsets_up_to(all, inst.thresholds.deletion_limit)) {
            const ZBuilderTrace trace = sequential_z_builder(inst.blocks, oracle::set_of(X, inst.n), inst.D, inst.pp, exact);
            const toy::Replay expected = toy::replay(inst, X);
            bool same = trace.Z == expected.Z && trace.outcome == expected.outcome &&
                        trace.final_count == expected.final_count;
            for (const auto& [i, Xi] : trace.deletions) same = same && oracle::mask_of(Xi) == expected.deletions.at(i);
            mismatches += !same;
        }
    }
    return {mismatches == 0, "50 toy instances (z=1, n<=20, m'<=6), " + std::to_string(mismatches) + " mismatches"};
}

Outcome criterion10(const Records& first) {
    if (first.concentration.empty() || first.deletion.empty() || first.sweep.empty()) {
        return {false, "needs criteria 6-8 in the same run"};
    }
    const auto t0 = Clock::now();
    const bool c6 = concentration_record(2) == first.concentration;
    const bool c7 = deletion_record(2) == first.deletion;
    const SweepRun run = sweep_record(2);
    const bool c8 = run.code == 0 && run.record + run.csv == first.sweep;
    const auto tag = [](bool b) { return b ? "identical" : "DIFFERENT"; };
    return {c6 && c7 && c8, std::string("threads 1 vs 2: criterion 6 ") + tag(c6) + ", 7 " + tag(c7) + ", 8 " +
                                tag(c8) + ", " + fmt("%.1f s", seconds_since(t0))};
}

}  // namespace

int main(int argc, char** argv) {
    std::set<int> only;
    for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
    auto wanted = [&](int c) { return only.empty() || only.count(c) > 0; };

    Records records;
    const std::vector<std::pair<int, std::function<Outcome()>>> criteria = {
        {1, criterion1},
        {2, criterion2},
        {3, criterion3},
        {4, criterion4},
        {5, criterion5},
        {6, [&] { return criterion6(records); }},
        {7, [&] { return criterion7(records); }},
        {8, [&] { return criterion8(records); }},
        {9, criterion9},
        {10, [&] { return criterion10(records); }},
    };
    int failed = 0;
    for (const auto& [number, run] : criteria) {
        if (!wanted(number)) continue;
        Outcome o;
        try {
            o = run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += !o.pass;
        std::printf("criterion %d: %s (%s)\n", number, o.pass ? "PASS" : "FAIL", o.detail.c_str());
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}
