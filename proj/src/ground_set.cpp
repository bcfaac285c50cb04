#include "aplab/ground_set.hpp"

#include <numeric>
#include <stdexcept>

namespace aplab {

GroundSet::GroundSet(Element n) : n_(n), words_((static_cast<std::size_t>(n) >> 6) + 1, 0) {
    if (n > kMaxUniverse) throw std::invalid_argument("universe size exceeds 2^20");
}

GroundSet::GroundSet(Element n, std::initializer_list<Element> members)
    : GroundSet(n, std::span<const Element>(members.begin(), members.size())) {}

GroundSet::GroundSet(Element n, std::span<const Element> members) : GroundSet(n) {
    for (Element x : members) insert(x);
}

GroundSet GroundSet::interval(Element n) { return interval(n, 1, n); }

GroundSet GroundSet::interval(Element n, Element lo, Element hi) {
    GroundSet s(n);
    for (Element x = lo; x <= hi && x <= n; ++x) s.insert(x);
    return s;
}

std::size_t GroundSet::size() const {
    return std::accumulate(words_.begin(), words_.end(), std::size_t{0},
                           [](std::size_t acc, std::uint64_t w) { return acc + std::popcount(w); });
}

void GroundSet::insert(Element x) {
    if (x < 1 || x > n_) {
        throw std::out_of_range("element " + std::to_string(x) + " outside [1," + std::to_string(n_) + "]");
    }
    words_[x >> 6] |= std::uint64_t{1} << (x & 63);
}

void GroundSet::erase(Element x) {
    if (x >= 1 && x <= n_) words_[x >> 6] &= ~(std::uint64_t{1} << (x & 63));
}

void GroundSet::check_same_universe(const GroundSet& other) const {
    if (n_ != other.n_) throw std::invalid_argument("ground sets over different universes");
}

bool GroundSet::is_subset_of(const GroundSet& other) const {
    check_same_universe(other);
    for (std::size_t w = 0; w < words_.size(); ++w) {
        if (words_[w] & ~other.words_[w]) return false;
    }
    return true;
}

GroundSet& GroundSet::operator|=(const GroundSet& other) {
    check_same_universe(other);
    for (std::size_t w = 0; w < words_.size(); ++w) words_[w] |= other.words_[w];
    return *this;
}

GroundSet& GroundSet::operator&=(const GroundSet& other) {
    check_same_universe(other);
    for (std::size_t w = 0; w < words_.size(); ++w) words_[w] &= other.words_[w];
    return *this;
}

GroundSet& GroundSet::operator-=(const GroundSet& other) {
    check_same_universe(other);
    for (std::size_t w = 0; w < words_.size(); ++w) words_[w] &= ~other.words_[w];
    return *this;
}

std::vector<Element> GroundSet::members() const {
    std::vector<Element> out;
    out.reserve(size());
    for_each([&](Element x) { out.push_back(x); });
    return out;
}

std::string GroundSet::to_string() const {
    std::string out = "{";
    bool first = true;
    for_each([&](Element x) {
        if (!first) out += ',';
        out += std::to_string(x);
        first = false;
    });
    return out + "}";
}

}  // namespace aplab
