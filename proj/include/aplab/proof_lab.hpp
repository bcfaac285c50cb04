#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "aplab/counting.hpp"
#include "aplab/ground_set.hpp"
#include "aplab/numeric.hpp"
#include "aplab/params.hpp"

namespace aplab {

/// Fixed rational stand-in for e, recorded with every derived parameter set.
inline const Rational kEApprox = Rational(BigInt("2718281828459045"), BigInt("1000000000000000"));

/// Constants of the inductive counting argument, all exact.
struct ProofParams {
    ProblemParams problem;  // problem.m is the (possibly rounded) multiple of 2z
    Element requested_m = 0;
    Rational gamma_prime = 0;
    Rational xi_prime = 0;
    Rational T = 0;
    Rational e_approx = kEApprox;

    Rational lambda = 0;  // beta^6 / (100e)^3
    std::uint64_t z = 1;  // ceil(gamma' / (4T))
    Element m_prime = 0;  // m / (2z)
    Rational mu = 0;          // n^2 (m/n)^k'
    Rational mu_e_lemma = 0;  // n (m/n)^k'            (second-moment statistic)
    Rational mu_e_proof = 0;  // k n (m'/(3n))^(k'-1)  (saturation threshold)
    Rational gamma = 0;       // gamma' k / (2 (6z)^k')
    Rational xi = 0;          // xi' / (12z)

    // Thresholds used by the predicates. Derived from the constants above; tests may override.
    Rational saturation_threshold = 0;  // gamma' * mu_e_proof / 2
    Rational count_threshold = 0;       // gamma * mu (clause A)
    Rational growth_threshold = 0;      // n / z (clause B)
    std::size_t deletion_limit = 0;     // floor(xi' m' / 6): admissible |X|

    bool m_adjusted() const { return requested_m != problem.m; }
};

/// Computes every derived constant; m is rounded down to a multiple of 2z.
ProofParams derive_proof_params(const ProblemParams& problem, const Rational& gamma_prime,
                                const Rational& xi_prime, const Rational& T);

/// { x in D : count_aps_through(x, S_hat, D, k'-1, k) >= threshold }. Requires k' >= 1.
GroundSet saturated_set(const GroundSet& S_hat, const GroundSet& D, unsigned k, unsigned k_prime,
                        const Rational& threshold);

enum class CheckMode { exact, greedy };

struct ClauseValues {
    std::uint64_t ap_count = 0;      // count_aps(S_hat ∪ (S \ X), D, k', k)
    std::size_t saturated_size = 0;  // |T(S_hat ∪ (S \ X))|
    bool clause_a = false;
    bool clause_b = false;
};

struct AdvancingVerdict {
    bool advancing = false;
    CheckMode mode = CheckMode::exact;
    bool downgraded = false;             // exact was requested but exceeded the budget
    std::optional<GroundSet> witness;    // X violating both clauses
    std::optional<ClauseValues> witness_values;
    std::size_t base_saturated = 0;      // |T(S_hat)|
    std::uint64_t deletions_checked = 0;
};

struct AdvancingOptions {
    CheckMode mode = CheckMode::greedy;
    std::uint64_t exact_budget = 100'000;  // number of X's enumerated in exact mode
    unsigned random_deletions = 32;        // extra random X's in greedy mode
    std::uint64_t seed = 0;
};

ClauseValues evaluate_clauses(const GroundSet& S, const GroundSet& X, const GroundSet& S_hat, const GroundSet& D,
                              const ProofParams& pp, std::size_t base_saturated);

/// Whether S is advancing with respect to S_hat: for every admissible X ⊆ S, clause A
/// (many APs) or clause B (the saturated set grows by more than n/z) holds.
AdvancingVerdict check_advancing(const GroundSet& S, const GroundSet& S_hat, const GroundSet& D,
                                 const ProofParams& pp, const AdvancingOptions& options = {});

/// Blocks S_1..S_2z (stored 0-based) with the index set Z (1-based) and deletions X_i for i in Z.
struct PartitionSequence {
    std::vector<GroundSet> blocks;
    std::vector<std::size_t> Z;                 // sorted, 1-based
    std::map<std::size_t, GroundSet> deletions;  // i in Z -> X_i

    /// Throws std::invalid_argument unless the blocks and deletions are well formed for pp.
    void validate(const ProofParams& pp) const;
    /// Union over j in Z, j <= i of S_j \ X_j.
    GroundSet accumulated(std::size_t i) const;
};

struct BlockVerdict {
    std::size_t index = 0;  // 1-based, not in Z
    AdvancingVerdict verdict;
};

struct BadSequenceReport {
    bool bad = false;
    bool heuristic = false;  // some block was checked in greedy mode
    std::vector<BlockVerdict> blocks;
};

/// Whether the sequence is (Z,X)-bad for its stored Z and deletions.
BadSequenceReport classify_bad_sequence(const PartitionSequence& seq, const GroundSet& D, const ProofParams& pp,
                                        const AdvancingOptions& options = {});

/// Searches every Z with |Z| <= z and every admissible deletion family for a witness that the
/// blocks form a bad sequence. Exponential; intended for toy instances.
std::optional<PartitionSequence> find_bad_witness(const std::vector<GroundSet>& blocks, const GroundSet& D,
                                                  const ProofParams& pp, std::uint64_t budget = 1'000'000);

struct ZBuilderStep {
    std::size_t index = 0;  // 1-based block
    bool advancing = false;
    std::size_t saturated_before = 0;  // |T(S_hat_{i-1})|
    std::size_t saturated_after = 0;   // |T(S_hat_i)|, equal to before when i is skipped
    std::uint64_t ap_count_after = 0;  // count_aps(S_hat_i, D, k', k)
    bool clause_a = false;             // for X_i = X ∩ S_i
    bool clause_b = false;
};

enum class ZOutcome {
    too_few_advancing,     // |Z| <= z
    clause_a,              // |Z| > z and the AP count of the accumulated set reached gamma*mu
    growth_contradiction,  // |Z| > z, count below gamma*mu: saturated-set growth would exceed n
};

struct ZBuilderTrace {
    std::vector<std::size_t> Z;
    std::map<std::size_t, GroundSet> deletions;
    std::vector<ZBuilderStep> steps;
    ZOutcome outcome = ZOutcome::too_few_advancing;
    std::uint64_t final_count = 0;  // count at the (z+1)-th member of Z, or at the end
    bool heuristic = false;
};

/// Replays the sequential construction of Z for a deletion set X ⊆ ∪ blocks with |X| <= xi m.
ZBuilderTrace sequential_z_builder(const std::vector<GroundSet>& blocks, const GroundSet& X, const GroundSet& D,
                                   const ProofParams& pp, const AdvancingOptions& options = {});

std::string to_string(ZOutcome outcome);

using ElementTuple = std::vector<Element>;

struct DeletionFamilies {
    Element n = 0;
    unsigned k = 3;
    unsigned k_prime = 1;
    std::vector<ElementTuple> B;                                  // sorted k'-sets inside some k-AP
    std::vector<std::pair<std::uint32_t, std::uint32_t>> related;  // ordered pairs (i, j) with B_i ~ B_j
    std::map<std::size_t, std::vector<ElementTuple>> unions;      // s -> B'_s
    std::uint64_t K = 0;  // max number of k-APs containing one member of B

    std::size_t union_count(std::size_t s) const;
};

inline constexpr Element kDefaultFamilyLimit = 120;

DeletionFamilies build_deletion_families(Element n, unsigned k, unsigned k_prime,
                                         Element n_limit = kDefaultFamilyLimit);

struct DeletionOutcome {
    GroundSet X;
    Rational achieved = 0;  // (1/n) Σ_x count_aps_through(x, S \ X, [n], k', k)^2
    Rational mu_e = 0;      // n (|S|/n)^k'
    Rational ratio = 0;     // achieved / mu_e^2 (0 when mu_e = 0)
    bool within_target = false;
    std::vector<Rational> trajectory;  // achieved after 0, 1, ... removals
};

/// Greedy second-moment descent: removes up to q elements of S, each time the one whose removal
/// lowers Σ_x count^2 the most (smallest element on ties), stopping early when nothing helps.
DeletionOutcome second_moment_with_deletion(const GroundSet& S, unsigned k, unsigned k_prime, std::size_t q,
                                            const Rational& T_target);

struct PaleyZygmundReport {
    bool degenerate = false;  // E[Y] = 0
    Rational mean = 0;
    Rational second_moment = 0;
    Rational probability = 0;  // Pr(Y >= E[Y]/2), x uniform on [n]
    Rational lower_bound = 0;  // E[Y]^2 / (4 E[Y^2])
    bool holds = true;
    Rational ratio = 0;  // probability / lower_bound
};

PaleyZygmundReport paley_zygmund_check(const DegreeProfile& profile);

}  // namespace aplab
