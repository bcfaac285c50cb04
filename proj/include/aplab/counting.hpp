#pragma once

#include <cstdint>
#include <vector>

#include "aplab/ground_set.hpp"
#include "aplab/numeric.hpp"
#include "aplab/progression.hpp"

namespace aplab {

/// Number of k-APs in [n]: sum over d >= 1 of max(0, n - (k-1)d).
std::uint64_t ap_count_in_interval(Element n, unsigned k);

/// Number of k-APs A inside D with |A ∩ S| >= k_prime. Throws if S is not a subset of D.
std::uint64_t count_aps(const GroundSet& S, const GroundSet& D, unsigned k_prime, unsigned k);

/// Number of k-APs A inside D with x in A and |A ∩ (S \ {x})| >= k_prime.
std::uint64_t count_aps_through(Element x, const GroundSet& S, const GroundSet& D, unsigned k_prime,
                                unsigned k);

/// Per-element values of count_aps_through over the whole universe, with their moments.
struct DegreeProfile {
    Element n = 0;
    std::vector<std::uint64_t> counts;  // counts[x] for x in 1..n; counts[0] is unused
    BigInt sum = 0;
    BigInt sum_of_squares = 0;

    Rational first_moment() const { return n == 0 ? Rational(0) : Rational(sum, n); }
    Rational second_moment() const { return n == 0 ? Rational(0) : Rational(sum_of_squares, n); }

    static DegreeProfile from_counts(std::vector<std::uint64_t> counts_by_element);
};

DegreeProfile degree_profile(const GroundSet& S, const GroundSet& D, unsigned k_prime, unsigned k);

// Both sides of the relation between the degree sum and the AP count. The exact right-hand side
// weights an AP meeting S in j elements by 0 (j < k'), k-k' (j = k') or k (j > k'); the multiplied
// form k·count_aps(S,D,k',k) is what one gets by treating every counted AP as contributing k.
struct DegreeSumRelation {
    std::uint64_t degree_sum = 0;      // Σ_x count_aps_through(x,S,D,k',k)
    std::uint64_t exact_weighted = 0;  // Σ_A f(|A ∩ S|)
    std::uint64_t k_times_count = 0;   // k · count_aps(S,D,k',k)
};

DegreeSumRelation degree_sum_relation(const GroundSet& S, const GroundSet& D, unsigned k_prime,
                                      unsigned k);

}  // namespace aplab
