#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace aplab {

using Element = std::uint32_t;

// Largest supported universe; AP counts stay far inside 64 bits.
inline constexpr Element kMaxUniverse = Element{1} << 20;

/// A subset of {1,...,n} stored as a dense bitset. Bit x is element x; bit 0 is unused.
class GroundSet {
public:
    GroundSet() = default;
    explicit GroundSet(Element n);
    GroundSet(Element n, std::initializer_list<Element> members);
    GroundSet(Element n, std::span<const Element> members);

    static GroundSet interval(Element n);                 // [n]
    static GroundSet interval(Element n, Element lo, Element hi);  // {lo..hi} inside [n]

    Element universe() const { return n_; }
    std::size_t size() const;
    bool empty() const { return size() == 0; }

    bool contains(Element x) const {
        return x >= 1 && x <= n_ && ((words_[x >> 6] >> (x & 63)) & 1U);
    }
    void insert(Element x);
    void erase(Element x);

    bool is_subset_of(const GroundSet& other) const;
    GroundSet& operator|=(const GroundSet& other);
    GroundSet& operator&=(const GroundSet& other);
    GroundSet& operator-=(const GroundSet& other);
    friend GroundSet operator|(GroundSet a, const GroundSet& b) { return a |= b; }
    friend GroundSet operator&(GroundSet a, const GroundSet& b) { return a &= b; }
    friend GroundSet operator-(GroundSet a, const GroundSet& b) { return a -= b; }
    friend bool operator==(const GroundSet&, const GroundSet&) = default;

    std::vector<Element> members() const;
    std::string to_string() const;  // "{1,2,4}"

    template <class F>
    void for_each(F&& f) const {
        for (std::size_t w = 0; w < words_.size(); ++w) {
            std::uint64_t bits = words_[w];
            while (bits) {
                f(static_cast<Element>(w * 64 + std::countr_zero(bits)));
                bits &= bits - 1;
            }
        }
    }

    std::span<const std::uint64_t> words() const { return words_; }

    // Word w of the set shifted down by s: bit a of the result is bit a+s of this set.
    std::uint64_t shifted_word(std::size_t w, std::size_t s) const {
        std::size_t q = w + (s >> 6);
        unsigned r = s & 63;
        std::uint64_t lo = q < words_.size() ? words_[q] : 0;
        if (r == 0) return lo;
        std::uint64_t hi = q + 1 < words_.size() ? words_[q + 1] : 0;
        return (lo >> r) | (hi << (64 - r));
    }

private:
    void check_same_universe(const GroundSet& other) const;

    Element n_ = 0;
    std::vector<std::uint64_t> words_;
};

}  // namespace aplab
