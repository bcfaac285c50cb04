#include <doctest.h>

#include <random>

#include "aplab/apfree.hpp"
#include "aplab/counting.hpp"
#include "oracle.hpp"

using namespace aplab;

namespace {

ProblemParams params(Element n, unsigned k, Element m) {
    ProblemParams p;
    p.n = n;
    p.k = k;
    p.k_prime = k;
    p.m = m;
    return p;
}

std::vector<int> as_ints(const GroundSet& s) {
    std::vector<int> out;
    for (Element x : s.members()) out.push_back(static_cast<int>(x));
    return out;
}

}  // namespace

TEST_CASE("count_apfree_msets examples") {
    CHECK(count_apfree_msets(5, 3, 3) == 6);
    for (unsigned k = 3; k <= 6; ++k) CHECK(count_apfree_msets(k, k, k) == 0);
    CHECK(count_apfree_msets(9, 3, 5) == oracle::apfree_msets(9, 3, 5));
    CHECK(count_apfree_msets(7, 3, 0) == 1);
    CHECK(count_apfree_msets(7, 3, 8) == 0);
}

TEST_CASE("count_apfree_msets matches the subset filter") {
    for (int n = 0; n <= 14; ++n) {
        for (int k = 3; k <= 5; ++k) {
            const auto by_size = oracle::apfree_by_size(n, k);
            BigInt total = 0;
            for (int m = 0; m <= n; ++m) {
                const BigInt got = count_apfree_msets(n, k, m);
                CHECK(got == by_size[m]);
                total += got;
            }
            CHECK(count_apfree_subsets(n, k) == total);
        }
    }
}

TEST_CASE("thread split leaves counts unchanged") {
    EnumerationOptions one, four;
    four.threads = 4;
    for (Element m = 0; m <= 16; ++m) CHECK(count_apfree_msets(16, 3, m, one) == count_apfree_msets(16, 3, m, four));
}

TEST_CASE("budget refusal names budget and cost") {
    EnumerationOptions tight;
    tight.node_budget = 1000;
    try {
        count_apfree_msets(30, 3, 10, tight);
        FAIL("expected BudgetExceeded");
    } catch (const BudgetExceeded& e) {
        CHECK(e.budget() == 1000);
        CHECK(e.estimated_cost() == binomial(30, 10));
        CHECK(std::string(e.what()).find("1000") != std::string::npos);
    }
    tight.enforce_binomial_budget = false;
    CHECK_THROWS_AS(count_apfree_msets(30, 3, 10, tight), BudgetExceeded);
}

TEST_CASE("count_deficient_msets") {
    const EnumerationResult zero = count_deficient_msets(params(9, 3, 4), 0);
    CHECK(zero.deficient_count == 0);
    CHECK(zero.total_msets == 126);
    CHECK(zero.apfree_count == oracle::apfree_msets(9, 3, 4));

    // 16 APs in [9]; threshold 1000 * 81 * (4/9)^3 is far above that.
    const EnumerationResult all = count_deficient_msets(params(9, 3, 4), 1000);
    CHECK(all.deficient_count == 126);

    const Rational gamma = parse_rational("0.01");
    const EnumerationResult r = count_deficient_msets(params(9, 3, 4), gamma);
    const Rational threshold = gamma * 81 * pow(Rational(4, 9), 3);
    CHECK(r.threshold == threshold);
    std::uint64_t naive = 0;
    for (oracle::Mask s = 0; s < (oracle::Mask{1} << 9); ++s) {
        if (oracle::popcount(s) != 4) continue;
        naive += Rational(oracle::count(s << 1, oracle::interval(9), 9, 3, 3)) < threshold;
    }
    CHECK(r.deficient_count == naive);
    CHECK(r.apfree_count <= r.deficient_count);
    CHECK(r.deficient_count <= r.total_msets);
    CHECK(r.beta_bound() == pow(Rational(1, 2), 4) * 126);
    CHECK(r.deficient_fraction() == Rational(r.deficient_count, 126));
}

TEST_CASE("deficient fraction shrinks with m at fixed gamma") {
    Rational previous = 2;
    for (Element m = 4; m <= 12; ++m) {
        const EnumerationResult r = count_deficient_msets(params(14, 3, m), Rational(1, 10));
        CHECK(r.deficient_fraction() <= previous);
        previous = r.deficient_fraction();
    }
}

TEST_CASE("max_apfree_subset examples") {
    const ExtremalResult five = max_apfree_subset(GroundSet::interval(5), 3);
    CHECK(five.exact);
    CHECK(five.size == 4);
    CHECK(five.witness == GroundSet(5, {1, 2, 4, 5}));

    const GroundSet free(20, {1, 2, 4, 5, 10, 11, 13, 14});
    const ExtremalResult same = max_apfree_subset(free, 3);
    CHECK(same.size == free.size());
    CHECK(same.witness == free);

    const auto [size, witness] = oracle::max_apfree(oracle::interval(9), 9, 3);
    const ExtremalResult nine = max_apfree_subset(GroundSet::interval(9), 3);
    CHECK(nine.size == static_cast<std::size_t>(size));
    CHECK(as_ints(nine.witness) == witness);
}

TEST_CASE("max_apfree_subset agrees with brute force on random sets") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 120; ++trial) {
        const int n = 3 + static_cast<int>(rng() % 18);
        const int k = 3 + static_cast<int>(rng() % 2);
        const oracle::Mask S = (rng() << 1) & oracle::interval(n);
        const auto [size, witness] = oracle::max_apfree(S, n, k);
        const ExtremalResult r = max_apfree_subset(oracle::set_of(S, n), static_cast<unsigned>(k));
        REQUIRE(r.exact);
        CHECK(r.size == static_cast<std::size_t>(size));
        CHECK(r.upper_bound == r.size);
        CHECK(as_ints(r.witness) == witness);
        CHECK(r.witness.is_subset_of(oracle::set_of(S, n)));
        CHECK(count_aps(r.witness, r.witness, k, k) == 0);
    }
}

TEST_CASE("maximum AP-free size of [n] is nondecreasing in n") {
    std::size_t previous = 0;
    for (Element n = 1; n <= 30; ++n) {
        const std::size_t size = max_apfree_subset(GroundSet::interval(n), 3).size;
        CHECK(size >= previous);
        previous = size;
    }
}

TEST_CASE("inexact mode reports an interval") {
    ExtremalOptions options;
    options.exact_limit = 10;
    const std::size_t exact = max_apfree_subset(GroundSet::interval(40), 3).size;
    const ExtremalResult r = max_apfree_subset(GroundSet::interval(40), 3, options);
    CHECK_FALSE(r.exact);
    CHECK(r.size <= exact);
    CHECK(r.upper_bound >= exact);
    CHECK(count_aps(r.witness, r.witness, 3, 3) == 0);
    CHECK(r.witness.size() == r.size);
}

TEST_CASE("decision procedure") {
    const GroundSet S = GroundSet::interval(20);
    const std::size_t best = max_apfree_subset(S, 3).size;
    const DecisionResult yes = has_apfree_subset_of_size(S, 3, best);
    CHECK(yes.decision == Decision::yes);
    REQUIRE(yes.witness);
    CHECK(yes.witness->size() >= best);
    CHECK(count_aps(*yes.witness, *yes.witness, 3, 3) == 0);
    CHECK(has_apfree_subset_of_size(S, 3, best + 1).decision == Decision::no);
    CHECK(has_apfree_subset_of_size(GroundSet::interval(120), 3, 40, 10).decision == Decision::unresolved);
}

TEST_CASE("dense_ap_lower_bound_check") {
    for (Element n = 10; n <= 60; ++n) CHECK(dense_ap_lower_bound_check(GroundSet::interval(n), 3, Rational(1, 10)));
    CHECK_FALSE(dense_ap_lower_bound_check(GroundSet(10, {3, 7}), 3, Rational(1, 1000)));

    GroundSet odd(40);
    for (Element x = 1; x <= 40; x += 2) odd.insert(x);
    const std::uint64_t naive = oracle::count(oracle::mask_of(odd), oracle::mask_of(odd), 40, 3, 3);
    CHECK(naive == 90);
    CHECK(dense_ap_lower_bound_check(odd, 3, Rational(90, 1600)));
    CHECK_FALSE(dense_ap_lower_bound_check(odd, 3, Rational(91, 1600)));
}
