#include "aplab/apfree.hpp"

#include <algorithm>
#include <atomic>
#include <mutex>
#include <numeric>
#include <thread>
#include <vector>

#include "aplab/counting.hpp"

namespace aplab {

BudgetExceeded::BudgetExceeded(std::string budget_name, std::uint64_t budget, BigInt estimated_cost)
    : std::runtime_error(budget_name + " budget of " + std::to_string(budget) +
                         " exceeded (estimated cost " + estimated_cost.str() + ")"),
      budget_name_(std::move(budget_name)),
      budget_(budget),
      estimated_cost_(std::move(estimated_cost)) {}

Rational EnumerationResult::deficient_fraction() const {
    return total_msets == 0 ? Rational(0) : Rational(deficient_count, total_msets);
}

Rational EnumerationResult::beta_bound() const {
    return pow(params.beta, params.m) * Rational(total_msets);
}

namespace {

// ---------------------------------------------------------------------------
// Ordered DFS over m-subsets of [n]. Elements are added in increasing order, so a
// newly added x can only complete an AP as its largest term.

class SubsetWalker {
public:
    SubsetWalker(Element n, unsigned k, std::uint64_t min_nonzero_prune, std::atomic<std::uint64_t>& nodes,
                 std::uint64_t budget)
        : n_(n), k_(k), prune_at_(min_nonzero_prune), chosen_(n), nodes_(nodes), budget_(budget) {}

    struct Tally {
        BigInt apfree = 0;
        BigInt deficient = 0;
    };

    // Counts m-subsets whose smallest element is `first`.
    Tally run_from(Element first, Element m) {
        Tally tally;
        if (m == 0) return tally;
        visit(first, 1, m, 0, tally);
        return tally;
    }

private:
    // APs of the current chosen set (plus x) having x as largest term.
    std::uint64_t completed_by(Element x) const {
        std::uint64_t total = 0;
        for (Element y : stack_) {
            Element d = x - y;
            if (static_cast<std::uint64_t>(k_ - 1) * d >= x) continue;
            bool all = true;
            for (unsigned i = 2; i < k_ && all; ++i) all = chosen_.contains(x - i * d);
            total += all;
        }
        return total;
    }

    void visit(Element x, Element depth, Element m, std::uint64_t aps, Tally& tally) {
        if (nodes_.fetch_add(1, std::memory_order_relaxed) + 1 > budget_) {
            throw BudgetExceeded("node", budget_, BigInt(nodes_.load()));
        }
        aps += completed_by(x);
        // Subtrees with a positive AP count already at the deficiency threshold contribute nothing.
        if (aps > 0 && aps >= prune_at_) return;
        if (depth == m) {
            if (aps == 0) tally.apfree += 1;
            if (aps < prune_at_) tally.deficient += 1;
            return;
        }
        chosen_.insert(x);
        stack_.push_back(x);
        for (Element y = x + 1; y + (m - depth - 1) <= n_; ++y) visit(y, depth + 1, m, aps, tally);
        stack_.pop_back();
        chosen_.erase(x);
    }

    Element n_;
    unsigned k_;
    std::uint64_t prune_at_;
    GroundSet chosen_;
    std::vector<Element> stack_;
    std::atomic<std::uint64_t>& nodes_;
    std::uint64_t budget_;
};

SubsetWalker::Tally walk_msets(Element n, unsigned k, Element m, std::uint64_t prune_at,
                               const EnumerationOptions& options, std::uint64_t& nodes_out) {
    SubsetWalker::Tally total;
    std::atomic<std::uint64_t> nodes{0};
    if (m == 0) {
        total.apfree = 1;
        total.deficient = prune_at > 0 ? 1 : 0;
        return total;
    }
    if (m > n) return total;

    // Work is split by the smallest element; partial tallies combine by addition.
    const Element last_first = n - m + 1;
    std::atomic<Element> next{1};
    std::mutex merge;
    std::exception_ptr failure;
    auto worker = [&] {
        SubsetWalker walker(n, k, prune_at, nodes, options.node_budget);
        try {
            for (Element first = next++; first <= last_first; first = next++) {
                SubsetWalker::Tally part = walker.run_from(first, m);
                std::lock_guard lock(merge);
                total.apfree += part.apfree;
                total.deficient += part.deficient;
            }
        } catch (...) {
            std::lock_guard lock(merge);
            if (!failure) failure = std::current_exception();
            next = last_first + 1;
        }
    };
    unsigned threads = std::max(1U, options.threads);
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);
    nodes_out = nodes.load();
    return total;
}

void check_binomial_budget(Element n, Element m, const EnumerationOptions& options) {
    if (!options.enforce_binomial_budget) return;
    BigInt cost = binomial(n, m);
    if (cost > options.node_budget) throw BudgetExceeded("node", options.node_budget, cost);
}

// ---------------------------------------------------------------------------
// Branch-and-bound over the k-uniform hypergraph whose vertices are the members of S and
// whose edges are the k-APs inside S. An independent set is an AP-free subset.

class ApHypergraph {
public:
    ApHypergraph(const GroundSet& S, unsigned k) : k_(k), vertices_(S.members()) {
        std::vector<std::uint32_t> index(static_cast<std::size_t>(S.universe()) + 1, 0);
        for (std::uint32_t i = 0; i < vertices_.size(); ++i) index[vertices_[i]] = i;
        incident_.resize(vertices_.size());
        // Each AP is found once, from its two smallest terms.
        for (std::size_t i = 0; i < vertices_.size(); ++i) {
            for (std::size_t j = i + 1; j < vertices_.size(); ++j) {
                const Element a = vertices_[i];
                const Element d = vertices_[j] - a;
                if (a + static_cast<std::uint64_t>(k - 1) * d > S.universe()) break;
                bool inside = true;
                for (unsigned t = 2; t < k && inside; ++t) inside = S.contains(a + t * d);
                if (!inside) continue;
                const auto e = static_cast<std::uint32_t>(edge_count());
                for (unsigned t = 0; t < k; ++t) {
                    std::uint32_t v = index[a + t * d];
                    members_.push_back(v);
                    incident_[v].push_back(e);
                }
            }
        }
    }

    unsigned k() const { return k_; }
    std::size_t vertex_count() const { return vertices_.size(); }
    std::size_t edge_count() const { return members_.size() / k_; }
    Element label(std::uint32_t v) const { return vertices_[v]; }
    std::span<const std::uint32_t> edge(std::size_t e) const {
        return std::span<const std::uint32_t>(members_).subspan(e * k_, k_);
    }
    std::span<const std::uint32_t> incident(std::uint32_t v) const { return incident_[v]; }

private:
    unsigned k_;
    std::vector<Element> vertices_;
    std::vector<std::uint32_t> members_;
    std::vector<std::vector<std::uint32_t>> incident_;
};

enum Status : std::uint8_t { kUndecided = 0, kIn = 1, kOut = 2 };

struct SearchState {
    std::vector<std::uint8_t> status;
    std::vector<std::uint8_t> open;  // undecided vertices of a live edge
    std::vector<std::uint8_t> dead;  // edge has an excluded vertex
    std::vector<std::uint32_t> live;  // superset of the edges that are not dead
    std::size_t in_count = 0;
    std::size_t undecided = 0;
};

struct BudgetHit {};

class ApFreeSearch {
public:
    explicit ApFreeSearch(const ApHypergraph& graph, std::uint64_t budget) : g_(graph), budget_(budget) {}

    SearchState root() const {
        SearchState s;
        s.status.assign(g_.vertex_count(), kUndecided);
        s.open.assign(g_.edge_count(), static_cast<std::uint8_t>(g_.k()));
        s.dead.assign(g_.edge_count(), 0);
        s.live.resize(g_.edge_count());
        std::iota(s.live.begin(), s.live.end(), 0U);
        s.undecided = g_.vertex_count();
        return s;
    }

    // Both return false when the assignment forces a fully included AP.
    bool include(SearchState& s, std::uint32_t v) const {
        if (s.status[v] == kIn) return true;
        if (s.status[v] == kOut) return false;
        std::vector<std::uint32_t> pending;
        s.status[v] = kIn;
        ++s.in_count;
        --s.undecided;
        for (std::uint32_t e : g_.incident(v)) {
            if (s.dead[e]) continue;
            if (--s.open[e] == 0) return false;
            if (s.open[e] == 1) {
                for (std::uint32_t u : g_.edge(e)) {
                    if (s.status[u] == kUndecided) pending.push_back(u);
                }
            }
        }
        for (std::uint32_t u : pending) exclude(s, u);
        return true;
    }

    void exclude(SearchState& s, std::uint32_t v) const {
        if (s.status[v] != kUndecided) return;
        s.status[v] = kOut;
        --s.undecided;
        for (std::uint32_t e : g_.incident(v)) s.dead[e] = 1;
    }

    // |in| + |undecided| minus a greedy packing of live edges with disjoint undecided parts:
    // each packed edge must lose at least one of its undecided vertices.
    std::size_t upper_bound(const SearchState& s) const {
        used_.assign(g_.vertex_count(), 0);
        std::size_t packed = 0;
        for (unsigned width = 2; width <= g_.k(); ++width) {
            for (std::uint32_t e : s.live) {
                if (s.dead[e] || s.open[e] != width) continue;
                bool free = true;
                for (std::uint32_t u : g_.edge(e)) {
                    if (s.status[u] == kUndecided && used_[u]) {
                        free = false;
                        break;
                    }
                }
                if (!free) continue;
                for (std::uint32_t u : g_.edge(e)) {
                    if (s.status[u] == kUndecided) used_[u] = 1;
                }
                ++packed;
            }
        }
        return s.in_count + s.undecided - packed;
    }

    // Live edge with the fewest undecided vertices, ties broken toward the edge whose undecided
    // vertices meet the most live edges; -1 when every live constraint is gone.
    std::ptrdiff_t branch_edge(const SearchState& s) const {
        live_degree_.assign(g_.vertex_count(), 0);
        unsigned best_open = g_.k() + 1;
        for (std::uint32_t e : s.live) {
            if (s.dead[e]) continue;
            best_open = std::min<unsigned>(best_open, s.open[e]);
            for (std::uint32_t u : g_.edge(e)) ++live_degree_[u];
        }
        std::ptrdiff_t best = -1;
        std::uint64_t best_weight = 0;
        for (std::uint32_t e : s.live) {
            if (s.dead[e] || s.open[e] != best_open) continue;
            std::uint64_t weight = 0;
            for (std::uint32_t u : g_.edge(e)) {
                if (s.status[u] == kUndecided) weight += live_degree_[u];
            }
            if (best < 0 || weight > best_weight) {
                best = static_cast<std::ptrdiff_t>(e);
                best_weight = weight;
            }
        }
        return best;
    }

    std::vector<std::uint32_t> greedy(SearchState s) const {
        std::vector<std::uint32_t> order(g_.vertex_count());
        std::iota(order.begin(), order.end(), 0U);
        std::stable_sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
            return g_.incident(a).size() < g_.incident(b).size();
        });
        for (std::uint32_t v : order) {
            if (s.status[v] != kUndecided) continue;
            SearchState trial = s;
            if (include(trial, v)) s = std::move(trial);
            else exclude(s, v);
        }
        return chosen(s);
    }

    std::vector<std::uint32_t> chosen(const SearchState& s) const {
        std::vector<std::uint32_t> out;
        for (std::uint32_t v = 0; v < s.status.size(); ++v) {
            if (s.status[v] != kOut) out.push_back(v);
        }
        return out;
    }

    // Depth-first search for an independent set larger than `best` and at least `floor`;
    // stops once one of size >= stop_at is found. Throws BudgetHit past the node budget.
    void search(SearchState s, std::size_t floor, std::size_t stop_at) {
        floor_ = floor;
        stop_at_ = stop_at;
        stopped_ = false;
        dfs(s);
    }

    std::size_t best = 0;
    std::vector<std::uint32_t> best_set;
    std::uint64_t nodes = 0;

private:
    void dfs(SearchState& s) {
        if (++nodes > budget_) throw BudgetHit{};
        std::erase_if(s.live, [&](std::uint32_t e) { return s.dead[e] != 0; });
        const std::size_t need = std::max(best + 1, floor_);
        if (upper_bound(s) < need) return;
        const std::ptrdiff_t e = branch_edge(s);
        if (e < 0) {
            best = s.in_count + s.undecided;
            best_set = chosen(s);
            stopped_ = best >= stop_at_;
            return;
        }
        std::vector<std::uint32_t> open;
        for (std::uint32_t u : g_.edge(static_cast<std::size_t>(e))) {
            if (s.status[u] == kUndecided) open.push_back(u);
        }
        // Branch i excludes open[i] and includes every open vertex after it, so the branches
        // partition the feasible completions. Larger inclusions go first.
        for (std::size_t i = open.size(); i-- > 0;) {
            SearchState child = s;
            bool ok = true;
            for (std::size_t j = i + 1; j < open.size() && ok; ++j) ok = include(child, open[j]);
            if (!ok) continue;
            exclude(child, open[i]);
            dfs(child);
            if (stopped_) return;
        }
    }

    const ApHypergraph& g_;
    std::uint64_t budget_;
    mutable std::vector<std::uint8_t> used_;
    mutable std::vector<std::uint32_t> live_degree_;
    std::size_t floor_ = 0;
    std::size_t stop_at_ = 0;
    bool stopped_ = false;
};

GroundSet to_ground_set(const ApHypergraph& g, Element n, const std::vector<std::uint32_t>& vs) {
    GroundSet out(n);
    for (std::uint32_t v : vs) out.insert(g.label(v));
    return out;
}

}  // namespace

BigInt count_apfree_msets(Element n, unsigned k, Element m, const EnumerationOptions& options) {
    if (k < 3) throw std::invalid_argument("k must be at least 3");
    if (m > n) return 0;
    check_binomial_budget(n, m, options);
    std::uint64_t nodes = 0;
    // prune_at = 1: any AP ends the subtree.
    return walk_msets(n, k, m, 1, options, nodes).apfree;
}

EnumerationResult count_deficient_msets(const ProblemParams& params, const Rational& gamma,
                                        const EnumerationOptions& options) {
    params.validate();
    if (gamma < 0) throw std::invalid_argument("gamma must be nonnegative");
    check_binomial_budget(params.n, params.m, options);

    EnumerationResult result;
    result.params = params;
    result.total_msets = binomial(params.n, params.m);
    const Rational n(params.n);
    result.threshold = params.n == 0 ? Rational(0) : gamma * n * n * pow(Rational(params.m) / n, params.k);
    // count < threshold  <=>  count < ceil(threshold) for integer counts.
    const BigInt cut = ceil(result.threshold);
    const std::uint64_t prune_at =
        cut > BigInt(std::numeric_limits<std::uint64_t>::max()) ? std::numeric_limits<std::uint64_t>::max()
                                                                : cut.convert_to<std::uint64_t>();
    auto tally = walk_msets(params.n, params.k, params.m, prune_at, options, result.nodes);
    result.apfree_count = tally.apfree;
    result.deficient_count = tally.deficient;
    result.exhaustive = true;
    return result;
}

BigInt count_apfree_subsets(Element n, unsigned k, const EnumerationOptions& options) {
    BigInt total = 0;
    for (Element m = 0; m <= n; ++m) total += count_apfree_msets(n, k, m, {options.node_budget, false, options.threads});
    return total;
}

ExtremalResult max_apfree_subset(const GroundSet& S, unsigned k, const ExtremalOptions& options) {
    if (k < 3) throw std::invalid_argument("k must be at least 3");
    const ApHypergraph graph(S, k);
    ApFreeSearch search(graph, options.node_budget);
    const SearchState root = search.root();

    ExtremalResult result;
    std::vector<std::uint32_t> lower = search.greedy(root);
    search.best = lower.size();
    search.best_set = lower;

    if (S.size() > options.exact_limit) {
        result.exact = false;
        result.size = lower.size();
        result.upper_bound = search.upper_bound(root);
        result.witness = to_ground_set(graph, S.universe(), lower);
        return result;
    }

    try {
        search.search(root, 0, graph.vertex_count() + 1);
    } catch (const BudgetHit&) {
        result.exact = false;
        result.size = search.best;
        result.upper_bound = std::max(search.best, search.upper_bound(root));
        result.witness = to_ground_set(graph, S.universe(), search.best_set);
        result.nodes = search.nodes;
        return result;
    }
    const std::size_t optimum = search.best;

    // Lexicographically smallest optimum: fix vertices in increasing order, keeping a vertex
    // whenever some optimum consistent with the decisions so far contains it.
    SearchState decided = root;
    std::vector<std::uint8_t> in_witness(graph.vertex_count(), 0);
    for (std::uint32_t v : search.best_set) in_witness[v] = 1;
    try {
        for (std::uint32_t v = 0; v < graph.vertex_count(); ++v) {
            if (decided.status[v] != kUndecided) continue;
            SearchState trial = decided;
            if (!search.include(trial, v)) {
                search.exclude(decided, v);
                continue;
            }
            if (in_witness[v]) {
                decided = std::move(trial);
                continue;
            }
            search.best = optimum - 1;
            search.search(trial, optimum, optimum);
            if (search.best >= optimum) {
                decided = std::move(trial);
                std::fill(in_witness.begin(), in_witness.end(), 0);
                for (std::uint32_t u : search.best_set) in_witness[u] = 1;
            } else {
                search.exclude(decided, v);
            }
        }
    } catch (const BudgetHit&) {
        // The optimum is known; only the tie-break is incomplete.
    }
    std::vector<std::uint32_t> witness;
    for (std::uint32_t v = 0; v < graph.vertex_count(); ++v) {
        if (in_witness[v]) witness.push_back(v);
    }
    result.size = optimum;
    result.upper_bound = optimum;
    result.witness = to_ground_set(graph, S.universe(), witness);
    result.nodes = search.nodes;
    return result;
}

DecisionResult has_apfree_subset_of_size(const GroundSet& S, unsigned k, std::size_t target,
                                         std::uint64_t node_budget) {
    if (k < 3) throw std::invalid_argument("k must be at least 3");
    DecisionResult result;
    if (target == 0) {
        result.decision = Decision::yes;
        result.witness = GroundSet(S.universe());
        return result;
    }
    if (target > S.size()) {
        result.decision = Decision::no;
        return result;
    }
    const ApHypergraph graph(S, k);
    ApFreeSearch search(graph, node_budget);
    const SearchState root = search.root();
    std::vector<std::uint32_t> lower = search.greedy(root);
    if (lower.size() >= target) {
        result.decision = Decision::yes;
        result.witness = to_ground_set(graph, S.universe(), lower);
        return result;
    }
    try {
        search.best = 0;
        search.search(root, target, target);
    } catch (const BudgetHit&) {
        result.nodes = search.nodes;
        return result;
    }
    result.nodes = search.nodes;
    if (search.best >= target) {
        result.decision = Decision::yes;
        result.witness = to_ground_set(graph, S.universe(), search.best_set);
    } else {
        result.decision = Decision::no;
    }
    return result;
}

bool dense_ap_lower_bound_check(const GroundSet& D, unsigned k, const Rational& gamma) {
    const Rational n(D.universe());
    return Rational(count_aps(D, D, k, k)) >= gamma * n * n;
}

}  // namespace aplab
