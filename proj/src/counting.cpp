#include "aplab/counting.hpp"

#include <bit>
#include <stdexcept>
#include <string>

namespace aplab {
namespace {

void require_subset(const GroundSet& S, const GroundSet& D) {
    if (!S.is_subset_of(D)) throw std::invalid_argument("S is not a subset of D");
}

void require_length(unsigned k) {
    if (k < 3) throw std::invalid_argument("AP length k must be at least 3");
}

// Bit-sliced vertical counter: 64 independent small counters, one per bit lane.
struct LaneCounter {
    static constexpr int kPlanes = 6;  // counts up to 63 hits per lane
    std::uint64_t plane[kPlanes] = {};

    void add(std::uint64_t bits) {
        for (int p = 0; p < kPlanes && bits; ++p) {
            std::uint64_t carry = plane[p] & bits;
            plane[p] ^= bits;
            bits = carry;
        }
    }

    // Lanes whose counter is >= threshold.
    std::uint64_t at_least(unsigned threshold) const {
        std::uint64_t greater = 0;
        std::uint64_t equal = ~std::uint64_t{0};
        for (int p = kPlanes - 1; p >= 0; --p) {
            if ((threshold >> p) & 1U) {
                equal &= plane[p];
            } else {
                greater |= equal & plane[p];
                equal &= ~plane[p];
            }
        }
        return greater | equal;
    }
};

// Bits a of word w with 1 <= a <= last.
std::uint64_t start_mask(std::size_t w, Element last) {
    std::uint64_t mask = ~std::uint64_t{0};
    if (w == 0) mask &= ~std::uint64_t{1};
    std::size_t hi = static_cast<std::size_t>(last);
    if (hi < w * 64) return 0;
    if (hi - w * 64 < 63) mask &= (std::uint64_t{1} << (hi - w * 64 + 1)) - 1;
    return mask;
}

}  // namespace

std::uint64_t ap_count_in_interval(Element n, unsigned k) {
    require_length(k);
    if (n < k) return 0;
    std::uint64_t steps = (static_cast<std::uint64_t>(n) - 1) / (k - 1);
    return static_cast<std::uint64_t>(n) * steps - (k - 1) * steps * (steps + 1) / 2;
}

std::uint64_t count_aps(const GroundSet& S, const GroundSet& D, unsigned k_prime, unsigned k) {
    require_length(k);
    require_subset(S, D);
    if (k_prime > k) return 0;
    const Element n = D.universe();
    if (n < k) return 0;
    if (k >= 64) throw std::invalid_argument("AP length k must be below 64");

    std::uint64_t total = 0;
    for (Element d = 1; (k - 1) * d <= n - 1; ++d) {
        const Element last_start = n - (k - 1) * d;
        for (std::size_t w = 0; w * 64 <= last_start; ++w) {
            std::uint64_t hits = start_mask(w, last_start);
            LaneCounter counter;
            for (unsigned i = 0; i < k && hits; ++i) {
                const std::size_t shift = static_cast<std::size_t>(i) * d;
                hits &= D.shifted_word(w, shift);
                if (k_prime > 0 && k_prime < k) counter.add(S.shifted_word(w, shift));
                if (k_prime == k) hits &= S.shifted_word(w, shift);
            }
            if (k_prime > 0 && k_prime < k) hits &= counter.at_least(k_prime);
            total += std::popcount(hits);
        }
    }
    return total;
}

std::uint64_t count_aps_through(Element x, const GroundSet& S, const GroundSet& D, unsigned k_prime,
                                unsigned k) {
    require_length(k);
    const Element n = D.universe();
    if (x < 1 || x > n) {
        throw std::out_of_range("element " + std::to_string(x) + " outside [1," + std::to_string(n) + "]");
    }
    require_subset(S, D);
    if (!D.contains(x)) return 0;
    std::uint64_t total = 0;
    for_each_ap_through(x, n, k, [&](const Progression& ap) {
        unsigned hits = 0;
        for (unsigned i = 0; i < k; ++i) {
            Element y = ap.element(i);
            if (!D.contains(y)) return;
            if (y != x && S.contains(y)) ++hits;
        }
        if (hits >= k_prime) ++total;
    });
    return total;
}

DegreeProfile DegreeProfile::from_counts(std::vector<std::uint64_t> counts_by_element) {
    DegreeProfile profile;
    if (counts_by_element.empty()) counts_by_element.push_back(0);
    profile.n = static_cast<Element>(counts_by_element.size() - 1);
    counts_by_element[0] = 0;
    for (std::uint64_t c : counts_by_element) {
        profile.sum += c;
        profile.sum_of_squares += BigInt(c) * c;
    }
    profile.counts = std::move(counts_by_element);
    return profile;
}

DegreeProfile degree_profile(const GroundSet& S, const GroundSet& D, unsigned k_prime, unsigned k) {
    require_length(k);
    require_subset(S, D);
    const Element n = D.universe();
    std::vector<std::uint64_t> counts(static_cast<std::size_t>(n) + 1, 0);
    for (const Progression& ap : enumerate_aps(n, k)) {
        unsigned in_s = 0;
        bool inside = true;
        for (unsigned i = 0; i < k && inside; ++i) {
            Element y = ap.element(i);
            inside = D.contains(y);
            in_s += S.contains(y);
        }
        if (!inside) continue;
        for (unsigned i = 0; i < k; ++i) {
            Element y = ap.element(i);
            if (in_s - S.contains(y) >= k_prime) ++counts[y];
        }
    }
    return DegreeProfile::from_counts(std::move(counts));
}

DegreeSumRelation degree_sum_relation(const GroundSet& S, const GroundSet& D, unsigned k_prime,
                                      unsigned k) {
    DegreeSumRelation rel;
    DegreeProfile profile = degree_profile(S, D, k_prime, k);
    rel.degree_sum = profile.sum.convert_to<std::uint64_t>();
    for (const Progression& ap : enumerate_aps(D.universe(), k)) {
        unsigned in_s = 0;
        bool inside = true;
        for (unsigned i = 0; i < k && inside; ++i) {
            inside = D.contains(ap.element(i));
            in_s += S.contains(ap.element(i));
        }
        if (!inside || in_s < k_prime) continue;
        rel.exact_weighted += in_s == k_prime ? k - k_prime : k;
    }
    rel.k_times_count = k * count_aps(S, D, k_prime, k);
    return rel;
}

}  // namespace aplab
