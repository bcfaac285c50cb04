#pragma once

#include <cstdint>
#include <iterator>

#include "aplab/ground_set.hpp"

namespace aplab {

/// The k-term progression {a, a+d, ..., a+(k-1)d} with d >= 1.
struct Progression {
    Element a = 1;
    Element d = 1;
    unsigned k = 3;

    Element element(unsigned i) const { return a + i * d; }
    Element last() const { return a + (k - 1) * d; }
    bool contains(Element x) const { return x >= a && x <= last() && (x - a) % d == 0; }
    friend bool operator==(const Progression&, const Progression&) = default;
};

/// Lazily enumerates every k-AP inside [n] in (d, a) lexicographic order.
class ApRange {
public:
    class iterator {
    public:
        using iterator_category = std::forward_iterator_tag;
        using value_type = Progression;
        using difference_type = std::ptrdiff_t;
        using pointer = const Progression*;
        using reference = const Progression&;

        iterator() = default;
        iterator(Element n, unsigned k, bool at_end) : n_(n), current_{1, 1, k}, done_(at_end) {}

        reference operator*() const { return current_; }
        pointer operator->() const { return &current_; }
        iterator& operator++() {
            if (current_.last() < n_) {
                ++current_.a;
                return *this;
            }
            current_.a = 1;
            ++current_.d;
            done_ = current_.last() > n_;
            return *this;
        }
        iterator operator++(int) {
            iterator copy = *this;
            ++*this;
            return copy;
        }
        friend bool operator==(const iterator& l, const iterator& r) {
            if (l.done_ || r.done_) return l.done_ == r.done_;
            return l.current_ == r.current_;
        }

    private:
        Element n_ = 0;
        Progression current_{};
        bool done_ = true;
    };

    ApRange(Element n, unsigned k) : n_(n), k_(k) {}
    iterator begin() const { return iterator(n_, k_, n_ < k_); }
    iterator end() const { return iterator(n_, k_, true); }

private:
    Element n_;
    unsigned k_;
};

inline ApRange enumerate_aps(Element n, unsigned k) { return ApRange(n, k); }

/// Calls f(progression) for every k-AP of [n] containing x.
template <class F>
void for_each_ap_through(Element x, Element n, unsigned k, F&& f) {
    if (x < 1 || x > n || n < k) return;
    for (Element d = 1; (k - 1) * d <= n - 1; ++d) {
        for (unsigned i = 0; i < k; ++i) {
            if (i * d >= x) break;
            Element a = x - i * d;
            if (a + (k - 1) * d > n) continue;
            f(Progression{a, d, k});
        }
    }
}

}  // namespace aplab
