#include "aplab/proof_lab.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "aplab/apfree.hpp"
#include "aplab/random_lab.hpp"

namespace aplab {

ProofParams derive_proof_params(const ProblemParams& problem, const Rational& gamma_prime,
                                const Rational& xi_prime, const Rational& T) {
    problem.validate();
    if (gamma_prime <= 0 || xi_prime <= 0 || T <= 0) {
        throw std::invalid_argument("gamma', xi' and T must be positive");
    }
    if (problem.n == 0) throw std::invalid_argument("n must be positive");

    ProofParams pp;
    pp.problem = problem;
    pp.requested_m = problem.m;
    pp.gamma_prime = gamma_prime;
    pp.xi_prime = xi_prime;
    pp.T = T;

    const Rational hundred_e = 100 * pp.e_approx;
    pp.lambda = pow(problem.beta, 6) / pow(hundred_e, 3);
    pp.z = ceil(gamma_prime / (4 * T)).convert_to<std::uint64_t>();

    const std::uint64_t block = 2 * pp.z;
    pp.problem.m = static_cast<Element>(problem.m / block * block);
    if (pp.problem.m == 0) {
        throw std::invalid_argument("m = " + std::to_string(problem.m) + " is smaller than 2z = " +
                                    std::to_string(block));
    }
    pp.m_prime = static_cast<Element>(pp.problem.m / block);

    const unsigned k = problem.k;
    const unsigned kp = problem.k_prime;
    const Rational n(problem.n);
    const Rational density = Rational(pp.problem.m) / n;
    pp.mu = n * n * pow(density, kp);
    pp.mu_e_lemma = n * pow(density, kp);
    const Rational block_density = Rational(pp.m_prime) / (3 * n);
    pp.mu_e_proof = kp >= 1 ? k * n * pow(block_density, kp - 1) : k * n / block_density;
    pp.gamma = gamma_prime * k / (2 * pow(Rational(6 * pp.z), kp));
    pp.xi = xi_prime / (12 * Rational(pp.z));

    pp.saturation_threshold = gamma_prime * pp.mu_e_proof / 2;
    pp.count_threshold = pp.gamma * pp.mu;
    pp.growth_threshold = n / Rational(pp.z);
    pp.deletion_limit = floor(xi_prime * pp.m_prime / 6).convert_to<std::size_t>();
    return pp;
}

GroundSet saturated_set(const GroundSet& S_hat, const GroundSet& D, unsigned k, unsigned k_prime,
                        const Rational& threshold) {
    if (k_prime == 0) throw std::invalid_argument("saturation needs k' >= 1");
    const DegreeProfile profile = degree_profile(S_hat, D, k_prime - 1, k);
    GroundSet out(D.universe());
    D.for_each([&](Element x) {
        if (Rational(profile.counts[x]) >= threshold) out.insert(x);
    });
    return out;
}

ClauseValues evaluate_clauses(const GroundSet& S, const GroundSet& X, const GroundSet& S_hat, const GroundSet& D,
                              const ProofParams& pp, std::size_t base_saturated) {
    const unsigned k = pp.problem.k;
    const unsigned kp = pp.problem.k_prime;
    const GroundSet combined = S_hat | (S - X);
    ClauseValues v;
    v.ap_count = count_aps(combined, D, kp, k);
    v.saturated_size = saturated_set(combined, D, k, kp, pp.saturation_threshold).size();
    v.clause_a = Rational(v.ap_count) >= pp.count_threshold;
    v.clause_b = Rational(v.saturated_size) > Rational(base_saturated) + pp.growth_threshold;
    return v;
}

namespace {

void require_block(const GroundSet& S, const GroundSet& S_hat, const GroundSet& D, const ProofParams& pp) {
    if (pp.problem.k_prime == 0) throw std::invalid_argument("the advancing property needs k' >= 1");
    if (S.size() != pp.m_prime) {
        throw std::invalid_argument("block has " + std::to_string(S.size()) + " elements, expected m' = " +
                                    std::to_string(pp.m_prime));
    }
    if (!S.is_subset_of(D) || !S_hat.is_subset_of(D)) throw std::invalid_argument("S and S_hat must lie in D");
}

// Calls f(X) for every subset of `members` of size <= limit, by size then lexicographically;
// stops when f returns true.
template <class F>
bool for_each_small_subset(Element n, const std::vector<Element>& members, std::size_t limit, F&& f) {
    const std::size_t total = members.size();
    for (std::size_t size = 0; size <= std::min(limit, total); ++size) {
        std::vector<std::size_t> pick(size);
        std::iota(pick.begin(), pick.end(), std::size_t{0});
        while (true) {
            GroundSet X(n);
            for (std::size_t i : pick) X.insert(members[i]);
            if (f(X)) return true;
            std::size_t i = size;
            while (i > 0 && pick[i - 1] == total - size + i - 1) --i;
            if (i == 0) break;
            ++pick[i - 1];
            for (std::size_t j = i; j < size; ++j) pick[j] = pick[j - 1] + 1;
        }
    }
    return false;
}

BigInt small_subset_count(std::size_t total, std::size_t limit) {
    BigInt count = 0;
    for (std::size_t j = 0; j <= std::min(limit, total); ++j) count += binomial(total, j);
    return count;
}

}  // namespace

AdvancingVerdict check_advancing(const GroundSet& S, const GroundSet& S_hat, const GroundSet& D,
                                 const ProofParams& pp, const AdvancingOptions& options) {
    require_block(S, S_hat, D, pp);
    const unsigned k = pp.problem.k;
    const unsigned kp = pp.problem.k_prime;
    const Element n = D.universe();

    AdvancingVerdict verdict;
    verdict.base_saturated = saturated_set(S_hat, D, k, kp, pp.saturation_threshold).size();
    const std::size_t limit = std::min(pp.deletion_limit, S.size());
    const std::vector<Element> members = S.members();

    auto violates = [&](const GroundSet& X) {
        ++verdict.deletions_checked;
        ClauseValues v = evaluate_clauses(S, X, S_hat, D, pp, verdict.base_saturated);
        if (v.clause_a || v.clause_b) return false;
        verdict.witness = X;
        verdict.witness_values = v;
        return true;
    };

    CheckMode mode = options.mode;
    if (mode == CheckMode::exact && small_subset_count(members.size(), limit) > options.exact_budget) {
        mode = CheckMode::greedy;
        verdict.downgraded = true;
    }
    verdict.mode = mode;

    if (mode == CheckMode::exact) {
        verdict.advancing = !for_each_small_subset(n, members, limit, violates);
        return verdict;
    }

    // Adversary: the empty deletion, then removals of the highest-degree elements, then random
    // deletions of the maximal admissible size.
    if (violates(GroundSet(n))) return verdict;
    const GroundSet everything = S_hat | S;
    std::vector<std::pair<std::uint64_t, Element>> ranked;
    for (Element x : members) ranked.emplace_back(count_aps_through(x, everything, D, kp - 1, k), x);
    std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        return a.first != b.first ? a.first > b.first : a.second < b.second;
    });
    GroundSet X(n);
    for (std::size_t j = 0; j < limit; ++j) {
        X.insert(ranked[j].second);
        if (violates(X)) return verdict;
    }
    if (limit > 0) {
        for (unsigned r = 0; r < options.random_deletions; ++r) {
            auto rng = RngStream{options.seed, r}.engine();
            std::vector<Element> pool = members;
            GroundSet Y(n);
            for (std::size_t j = 0; j < limit; ++j) {
                std::size_t pick = j + uniform_below(rng, pool.size() - j);
                std::swap(pool[j], pool[pick]);
                Y.insert(pool[j]);
            }
            if (violates(Y)) return verdict;
        }
    }
    verdict.advancing = true;
    return verdict;
}

void PartitionSequence::validate(const ProofParams& pp) const {
    if (blocks.size() != 2 * pp.z) {
        throw std::invalid_argument("expected 2z = " + std::to_string(2 * pp.z) + " blocks, got " +
                                    std::to_string(blocks.size()));
    }
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        if (blocks[i].size() != pp.m_prime) throw std::invalid_argument("block sizes must equal m'");
        for (std::size_t j = i + 1; j < blocks.size(); ++j) {
            if (!(blocks[i] & blocks[j]).empty()) throw std::invalid_argument("blocks must be disjoint");
        }
    }
    if (!std::is_sorted(Z.begin(), Z.end()) || std::adjacent_find(Z.begin(), Z.end()) != Z.end()) {
        throw std::invalid_argument("Z must be strictly increasing");
    }
    for (std::size_t i : Z) {
        if (i < 1 || i > blocks.size()) throw std::invalid_argument("Z index out of range");
    }
    for (const auto& [i, X] : deletions) {
        if (!std::binary_search(Z.begin(), Z.end(), i)) throw std::invalid_argument("deletion outside Z");
        if (!X.is_subset_of(blocks[i - 1])) throw std::invalid_argument("X_i must lie in S_i");
        if (X.size() > pp.deletion_limit) throw std::invalid_argument("X_i exceeds the deletion limit");
    }
}

GroundSet PartitionSequence::accumulated(std::size_t i) const {
    GroundSet out(blocks.empty() ? 0 : blocks.front().universe());
    for (std::size_t j : Z) {
        if (j > i) break;
        GroundSet part = blocks[j - 1];
        if (auto it = deletions.find(j); it != deletions.end()) part -= it->second;
        out |= part;
    }
    return out;
}

BadSequenceReport classify_bad_sequence(const PartitionSequence& seq, const GroundSet& D, const ProofParams& pp,
                                        const AdvancingOptions& options) {
    seq.validate(pp);
    BadSequenceReport report;
    report.bad = true;
    for (std::size_t i = 1; i <= seq.blocks.size(); ++i) {
        if (std::binary_search(seq.Z.begin(), seq.Z.end(), i)) continue;
        BlockVerdict block{i, check_advancing(seq.blocks[i - 1], seq.accumulated(i - 1), D, pp, options)};
        report.heuristic = report.heuristic || block.verdict.mode == CheckMode::greedy;
        if (block.verdict.advancing) report.bad = false;
        report.blocks.push_back(std::move(block));
    }
    return report;
}

std::optional<PartitionSequence> find_bad_witness(const std::vector<GroundSet>& blocks, const GroundSet& D,
                                                  const ProofParams& pp, std::uint64_t budget) {
    const std::size_t count = blocks.size();
    if (count != 2 * pp.z) throw std::invalid_argument("expected 2z blocks");
    if (count > 20) throw std::invalid_argument("too many blocks for exhaustive search");
    AdvancingOptions exact;
    exact.mode = CheckMode::exact;
    exact.exact_budget = budget;
    std::uint64_t spent = 0;

    std::vector<std::uint32_t> masks;
    for (std::uint32_t mask = 0; mask < (1U << count); ++mask) {
        if (static_cast<std::uint64_t>(std::popcount(mask)) <= pp.z) masks.push_back(mask);
    }
    std::stable_sort(masks.begin(), masks.end(),
                     [](std::uint32_t a, std::uint32_t b) { return std::popcount(a) < std::popcount(b); });

    for (std::uint32_t mask : masks) {
        PartitionSequence seq;
        seq.blocks = blocks;
        for (std::size_t i = 0; i < count; ++i) {
            if ((mask >> i) & 1U) seq.Z.push_back(i + 1);
        }
        // Odometer over the deletion choices of the blocks in Z.
        std::vector<std::vector<GroundSet>> choices;
        for (std::size_t i : seq.Z) {
            std::vector<GroundSet> options_i;
            for_each_small_subset(D.universe(), blocks[i - 1].members(), pp.deletion_limit, [&](const GroundSet& X) {
                options_i.push_back(X);
                return false;
            });
            choices.push_back(std::move(options_i));
        }
        std::vector<std::size_t> digit(seq.Z.size(), 0);
        while (true) {
            if (++spent > budget) throw BudgetExceeded("bad-sequence search", budget, BigInt(spent));
            seq.deletions.clear();
            for (std::size_t t = 0; t < seq.Z.size(); ++t) seq.deletions.emplace(seq.Z[t], choices[t][digit[t]]);
            if (classify_bad_sequence(seq, D, pp, exact).bad) return seq;
            std::size_t t = 0;
            while (t < digit.size() && ++digit[t] == choices[t].size()) digit[t++] = 0;
            if (t == digit.size()) break;
        }
    }
    return std::nullopt;
}

ZBuilderTrace sequential_z_builder(const std::vector<GroundSet>& blocks, const GroundSet& X, const GroundSet& D,
                                   const ProofParams& pp, const AdvancingOptions& options) {
    PartitionSequence seq;
    seq.blocks = blocks;
    seq.validate(pp);
    GroundSet all(D.universe());
    for (const GroundSet& b : blocks) all |= b;
    if (!X.is_subset_of(all)) throw std::invalid_argument("X must lie in the union of the blocks");
    if (X.size() > pp.deletion_limit) throw std::invalid_argument("|X| exceeds xi*m");

    const unsigned k = pp.problem.k;
    const unsigned kp = pp.problem.k_prime;
    ZBuilderTrace trace;
    for (std::size_t i = 1; i <= blocks.size(); ++i) {
        const GroundSet before = seq.accumulated(i - 1);
        const AdvancingVerdict verdict = check_advancing(blocks[i - 1], before, D, pp, options);
        trace.heuristic = trace.heuristic || verdict.mode == CheckMode::greedy;

        ZBuilderStep step;
        step.index = i;
        step.advancing = verdict.advancing;
        step.saturated_before = verdict.base_saturated;
        if (verdict.advancing) {
            const GroundSet Xi = X & blocks[i - 1];
            seq.Z.push_back(i);
            seq.deletions.emplace(i, Xi);
            const ClauseValues v = evaluate_clauses(blocks[i - 1], Xi, before, D, pp, verdict.base_saturated);
            step.saturated_after = v.saturated_size;
            step.ap_count_after = v.ap_count;
            step.clause_a = v.clause_a;
            step.clause_b = v.clause_b;
        } else {
            step.saturated_after = step.saturated_before;
            step.ap_count_after = count_aps(before, D, kp, k);
        }
        trace.steps.push_back(step);
    }
    trace.Z = seq.Z;
    trace.deletions = seq.deletions;

    if (trace.Z.size() <= pp.z) {
        trace.outcome = ZOutcome::too_few_advancing;
        trace.final_count = count_aps(seq.accumulated(blocks.size()), D, kp, k);
        return trace;
    }
    trace.final_count = count_aps(seq.accumulated(trace.Z[pp.z]), D, kp, k);
    trace.outcome = Rational(trace.final_count) >= pp.count_threshold ? ZOutcome::clause_a
                                                                      : ZOutcome::growth_contradiction;
    return trace;
}

std::string to_string(ZOutcome outcome) {
    switch (outcome) {
        case ZOutcome::too_few_advancing: return "too_few_advancing";
        case ZOutcome::clause_a: return "clause_a";
        case ZOutcome::growth_contradiction: return "growth_contradiction";
    }
    return "unknown";
}

std::size_t DeletionFamilies::union_count(std::size_t s) const {
    auto it = unions.find(s);
    return it == unions.end() ? 0 : it->second.size();
}

namespace {

struct TupleHash {
    std::size_t operator()(const ElementTuple& t) const {
        std::uint64_t h = 0x84222325cbf29ce4ULL;
        for (Element x : t) h = splitmix64(h ^ x);
        return static_cast<std::size_t>(h);
    }
};

// All k'-element subsets of the AP's terms, each sorted.
std::vector<ElementTuple> sub_tuples(const Progression& ap, unsigned size) {
    std::vector<ElementTuple> out;
    std::vector<bool> pick(ap.k, false);
    std::fill(pick.begin(), pick.begin() + size, true);
    do {
        ElementTuple t;
        for (unsigned i = 0; i < ap.k; ++i) {
            if (pick[i]) t.push_back(ap.element(i));
        }
        out.push_back(std::move(t));
    } while (std::prev_permutation(pick.begin(), pick.end()));
    return out;
}

}  // namespace

DeletionFamilies build_deletion_families(Element n, unsigned k, unsigned k_prime, Element n_limit) {
    if (k < 3) throw std::invalid_argument("k must be at least 3");
    if (k_prime < 1 || k_prime > k) throw std::invalid_argument("k' must lie in [1, k]");
    if (n > n_limit) throw BudgetExceeded("family size", n_limit, BigInt(n));

    DeletionFamilies fam;
    fam.n = n;
    fam.k = k;
    fam.k_prime = k_prime;

    std::vector<Progression> aps(enumerate_aps(n, k).begin(), enumerate_aps(n, k).end());
    std::unordered_map<ElementTuple, std::uint32_t, TupleHash> index;
    std::vector<std::uint64_t> through;
    // tuples_of[a] = indices into B of the k'-subsets of AP a.
    std::vector<std::vector<std::uint32_t>> tuples_of(aps.size());
    for (std::size_t a = 0; a < aps.size(); ++a) {
        for (ElementTuple& t : sub_tuples(aps[a], k_prime)) {
            auto [it, fresh] = index.try_emplace(t, static_cast<std::uint32_t>(fam.B.size()));
            if (fresh) {
                fam.B.push_back(t);
                through.push_back(0);
            }
            ++through[it->second];
            tuples_of[a].push_back(it->second);
        }
    }
    fam.K = through.empty() ? 0 : *std::max_element(through.begin(), through.end());

    std::vector<std::vector<std::uint32_t>> aps_through(static_cast<std::size_t>(n) + 1);
    for (std::size_t a = 0; a < aps.size(); ++a) {
        for (unsigned i = 0; i < k; ++i) aps_through[aps[a].element(i)].push_back(static_cast<std::uint32_t>(a));
    }

    // B ~ B' iff some y in A ∩ A' lies outside B ∪ B'; iterate over that y.
    std::unordered_set<std::uint64_t> related;
    for (Element y = 1; y <= n; ++y) {
        for (std::uint32_t a : aps_through[y]) {
            for (std::uint32_t b : aps_through[y]) {
                for (std::uint32_t i : tuples_of[a]) {
                    const ElementTuple& Bi = fam.B[i];
                    if (std::binary_search(Bi.begin(), Bi.end(), y)) continue;
                    for (std::uint32_t j : tuples_of[b]) {
                        const ElementTuple& Bj = fam.B[j];
                        if (std::binary_search(Bj.begin(), Bj.end(), y)) continue;
                        related.insert((static_cast<std::uint64_t>(i) << 32) | j);
                    }
                }
            }
        }
    }
    fam.related.reserve(related.size());
    for (std::uint64_t key : related) {
        fam.related.emplace_back(static_cast<std::uint32_t>(key >> 32), static_cast<std::uint32_t>(key));
    }
    std::sort(fam.related.begin(), fam.related.end());

    std::map<std::size_t, std::set<ElementTuple>> unions;
    for (auto [i, j] : fam.related) {
        if (i > j) continue;
        ElementTuple u;
        std::set_union(fam.B[i].begin(), fam.B[i].end(), fam.B[j].begin(), fam.B[j].end(), std::back_inserter(u));
        unions[u.size()].insert(std::move(u));
    }
    for (auto& [s, family] : unions) fam.unions[s] = std::vector<ElementTuple>(family.begin(), family.end());
    return fam;
}

DeletionOutcome second_moment_with_deletion(const GroundSet& S, unsigned k, unsigned k_prime, std::size_t q,
                                            const Rational& T_target) {
    const Element n = S.universe();
    const GroundSet universe = GroundSet::interval(n);
    DeletionOutcome out;
    out.X = GroundSet(n);
    out.mu_e = n == 0 ? Rational(0) : Rational(n) * pow(Rational(S.size()) / Rational(n), k_prime);

    GroundSet current = S;
    DegreeProfile profile = degree_profile(current, universe, k_prime, k);
    std::vector<std::int64_t> counts(profile.counts.begin(), profile.counts.end());
    BigInt sum_sq = profile.sum_of_squares;
    auto normalized = [&] { return n == 0 ? Rational(0) : Rational(sum_sq, n); };
    out.trajectory.push_back(normalized());

    std::vector<std::int64_t> delta(static_cast<std::size_t>(n) + 1, 0);
    std::vector<Element> touched;
    // Fills delta/touched with the count changes caused by removing s from `current`.
    auto removal_effect = [&](Element s) {
        for (Element y : touched) delta[y] = 0;
        touched.clear();
        for_each_ap_through(s, n, k, [&](const Progression& ap) {
            unsigned hits = 0;
            for (unsigned i = 0; i < k; ++i) hits += current.contains(ap.element(i));
            for (unsigned i = 0; i < k; ++i) {
                const Element y = ap.element(i);
                const bool y_in = current.contains(y);
                const bool before = hits - y_in >= k_prime;
                const bool after = (hits - 1) - (y_in && y != s) >= k_prime;
                if (before == after) continue;
                if (delta[y] == 0) touched.push_back(y);
                delta[y] += after ? 1 : -1;
            }
        });
    };
    auto square_change = [&] {
        std::int64_t change = 0;
        for (Element y : touched) change += (counts[y] + delta[y]) * (counts[y] + delta[y]) - counts[y] * counts[y];
        return change;
    };

    for (std::size_t step = 0; step < q; ++step) {
        std::int64_t best_change = 0;
        Element best = 0;
        current.for_each([&](Element s) {
            removal_effect(s);
            const std::int64_t change = square_change();
            if (change < best_change) {
                best_change = change;
                best = s;
            }
        });
        if (best == 0) break;
        removal_effect(best);
        for (Element y : touched) counts[y] += delta[y];
        sum_sq += best_change;
        current.erase(best);
        out.X.insert(best);
        out.trajectory.push_back(normalized());
    }
    out.achieved = normalized();
    out.ratio = out.mu_e == 0 ? Rational(0) : out.achieved / (out.mu_e * out.mu_e);
    out.within_target = out.achieved <= T_target * out.mu_e * out.mu_e;
    return out;
}

PaleyZygmundReport paley_zygmund_check(const DegreeProfile& profile) {
    PaleyZygmundReport report;
    report.mean = profile.first_moment();
    report.second_moment = profile.second_moment();
    if (profile.n == 0 || profile.sum == 0) {
        report.degenerate = true;
        return report;
    }
    std::uint64_t hits = 0;
    for (Element x = 1; x <= profile.n; ++x) {
        // counts[x] >= sum / (2n)
        if (BigInt(profile.counts[x]) * 2 * profile.n >= profile.sum) ++hits;
    }
    report.probability = Rational(hits, profile.n);
    report.lower_bound = report.mean * report.mean / (4 * report.second_moment);
    report.holds = report.probability >= report.lower_bound;
    report.ratio = report.probability / report.lower_bound;
    return report;
}

}  // namespace aplab
