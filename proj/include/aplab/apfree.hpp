#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

#include "aplab/ground_set.hpp"
#include "aplab/numeric.hpp"
#include "aplab/params.hpp"

namespace aplab {

inline constexpr std::uint64_t kDefaultNodeBudget = 100'000'000;
inline constexpr std::size_t kDefaultExactLimit = 60;

/// Raised when an exhaustive computation would exceed its configured budget.
class BudgetExceeded : public std::runtime_error {
public:
    BudgetExceeded(std::string budget_name, std::uint64_t budget, BigInt estimated_cost);

    const std::string& budget_name() const { return budget_name_; }
    std::uint64_t budget() const { return budget_; }
    const BigInt& estimated_cost() const { return estimated_cost_; }

private:
    std::string budget_name_;
    std::uint64_t budget_;
    BigInt estimated_cost_;
};

struct EnumerationOptions {
    std::uint64_t node_budget = kDefaultNodeBudget;
    // Refuse up front when C(n,m) exceeds node_budget; disabled by --allow-long.
    bool enforce_binomial_budget = true;
    unsigned threads = 1;
};

struct EnumerationResult {
    ProblemParams params;
    BigInt total_msets = 0;
    BigInt apfree_count = 0;
    BigInt deficient_count = 0;
    Rational threshold = 0;  // gamma * n^2 * (m/n)^k
    bool exhaustive = true;
    std::uint64_t nodes = 0;

    Rational deficient_fraction() const;
    Rational beta_bound() const;  // beta^m * C(n,m)
};

/// Number of m-element subsets of [n] with no k-AP.
BigInt count_apfree_msets(Element n, unsigned k, Element m, const EnumerationOptions& options = {});

/// Exhaustive sweep over the m-subsets of [n] counting those with fewer than gamma*n^2*(m/n)^k
/// k-APs, alongside the AP-free ones.
EnumerationResult count_deficient_msets(const ProblemParams& params, const Rational& gamma,
                                        const EnumerationOptions& options = {});

/// Total number of k-AP-free subsets of [n] (all sizes).
BigInt count_apfree_subsets(Element n, unsigned k, const EnumerationOptions& options = {});

struct ExtremalResult {
    std::size_t size = 0;         // exact maximum, or best lower bound when !exact
    std::size_t upper_bound = 0;  // equals size when exact
    GroundSet witness;            // AP-free subset of the input of cardinality `size`
    bool exact = true;
    std::uint64_t nodes = 0;
};

struct ExtremalOptions {
    std::size_t exact_limit = kDefaultExactLimit;
    std::uint64_t node_budget = kDefaultNodeBudget;
};

/// Largest k-AP-free subset of S. Exact (lexicographically smallest witness) for |S| up to
/// exact_limit and within the node budget; otherwise an interval [size, upper_bound].
ExtremalResult max_apfree_subset(const GroundSet& S, unsigned k, const ExtremalOptions& options = {});

enum class Decision { yes, no, unresolved };

/// Whether S has a k-AP-free subset with at least `target` elements.
struct DecisionResult {
    Decision decision = Decision::unresolved;
    std::optional<GroundSet> witness;  // present when decision == yes
    std::uint64_t nodes = 0;
};

DecisionResult has_apfree_subset_of_size(const GroundSet& S, unsigned k, std::size_t target,
                                         std::uint64_t node_budget = kDefaultNodeBudget);

/// count_aps(D,D,k,k) >= gamma * n^2.
bool dense_ap_lower_bound_check(const GroundSet& D, unsigned k, const Rational& gamma);

}  // namespace aplab
