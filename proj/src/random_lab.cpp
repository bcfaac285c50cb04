#include "aplab/random_lab.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "aplab/counting.hpp"

namespace aplab {
namespace {

constexpr double kZ95 = 1.959963984540054;

// Runs body(i) for i in [0, count); each index writes only its own slot.
template <class Body>
void parallel_for(std::uint64_t count, unsigned threads, Body&& body) {
    if (threads <= 1 || count <= 1) {
        for (std::uint64_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<std::uint64_t> next{0};
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (std::uint64_t i = next++; i < count; i = next++) body(i);
        });
    }
}

}  // namespace

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::mt19937_64 RngStream::engine() const {
    std::seed_seq seq{splitmix64(seed), splitmix64(seed ^ splitmix64(index + 1))};
    return std::mt19937_64(seq);
}

std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
    if (bound == 0) throw std::invalid_argument("uniform_below needs a positive bound");
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t x;
    do {
        x = rng();
    } while (x >= limit);
    return x % bound;
}

double uniform_unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

GroundSet sample_m_set(Element n, Element m, const RngStream& stream) {
    if (m > n) throw std::invalid_argument("m must not exceed n");
    auto rng = stream.engine();
    GroundSet out(n);
    // Floyd's algorithm: one draw per member.
    for (Element j = n - m + 1; j <= n && m > 0; ++j) {
        auto t = static_cast<Element>(1 + uniform_below(rng, j));
        out.insert(out.contains(t) ? j : t);
    }
    return out;
}

GroundSet sample_binomial_set(Element n, double p, const RngStream& stream) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("p must lie in [0,1]");
    GroundSet out(n);
    if (p == 0.0) return out;
    if (p == 1.0) return GroundSet::interval(n);
    auto rng = stream.engine();
    // Geometric gaps between successive members.
    const double log_q = std::log1p(-p);
    std::uint64_t x = 0;
    while (true) {
        const double u = 1.0 - uniform_unit(rng);  // (0,1]
        const double gap = std::floor(std::log(u) / log_q);
        if (gap >= static_cast<double>(n)) break;
        x += 1 + static_cast<std::uint64_t>(gap);
        if (x > n) break;
        out.insert(static_cast<Element>(x));
    }
    return out;
}

Rational expected_ap_count(Element n, unsigned k, Element m) {
    if (m < k || m > n) return 0;
    return Rational(ap_count_in_interval(n, k)) * Rational(binomial(n - k, m - k), binomial(n, m));
}

Interval wilson_interval(std::uint64_t successes, std::uint64_t trials) {
    if (trials == 0) return {0.0, 1.0};
    const double t = static_cast<double>(trials);
    const double phat = static_cast<double>(successes) / t;
    const double z2 = kZ95 * kZ95;
    const double denom = 1.0 + z2 / t;
    const double centre = (phat + z2 / (2.0 * t)) / denom;
    const double half = kZ95 * std::sqrt(phat * (1.0 - phat) / t + z2 / (4.0 * t * t)) / denom;
    const double lo = successes == 0 ? 0.0 : std::clamp(centre - half, 0.0, 1.0);
    const double hi = successes == trials ? 1.0 : std::clamp(centre + half, 0.0, 1.0);
    return {lo, hi};
}

DeficientEstimate estimate_deficient_fraction(Element n, unsigned k, Element m, const Rational& gamma,
                                              std::uint64_t trials, std::uint64_t seed, const Rational& beta,
                                              const ParallelOptions& parallel) {
    if (trials == 0) throw std::invalid_argument("trials must be positive");
    if (m > n) throw std::invalid_argument("m must not exceed n");
    DeficientEstimate est;
    est.trials = trials;
    const Rational nr(n);
    est.threshold = n == 0 ? Rational(0) : gamma * nr * nr * pow(Rational(m) / nr, k);
    const GroundSet universe = GroundSet::interval(n);
    std::vector<std::uint8_t> deficient(trials, 0);
    parallel_for(trials, parallel.threads, [&](std::uint64_t i) {
        GroundSet S = sample_m_set(n, m, {seed, i});
        deficient[i] = Rational(count_aps(S, universe, k, k)) < est.threshold;
    });
    for (auto d : deficient) est.deficient += d;
    est.fraction = Rational(est.deficient, trials);
    est.interval = wilson_interval(est.deficient, trials);
    est.below_beta_bound = est.fraction <= pow(beta, m);
    return est;
}

ConcentrationReport ap_count_concentration(Element n, unsigned k, Element m, std::uint64_t samples,
                                           std::uint64_t seed, const ParallelOptions& parallel) {
    if (samples < 2) throw std::invalid_argument("need at least two samples");
    ConcentrationReport report;
    report.samples = samples;
    report.expected = expected_ap_count(n, k, m);
    const GroundSet universe = GroundSet::interval(n);
    std::vector<std::uint64_t> counts(samples, 0);
    parallel_for(samples, parallel.threads, [&](std::uint64_t i) {
        counts[i] = count_aps(sample_m_set(n, m, {seed, i}), universe, k, k);
    });
    // Exact integer sums keep the statistic independent of summation order.
    BigInt sum = 0;
    BigInt sum_sq = 0;
    for (std::uint64_t c : counts) {
        sum += c;
        sum_sq += BigInt(c) * c;
    }
    const Rational mean(sum, samples);
    const Rational variance = (Rational(sum_sq) - Rational(sum) * mean) / Rational(samples - 1);
    report.sample_mean = to_double(mean);
    report.standard_error = std::sqrt(to_double(variance) / static_cast<double>(samples));
    report.z_score = report.standard_error > 0
                         ? to_double(mean - report.expected) / report.standard_error
                         : (mean == report.expected ? 0.0 : INFINITY);
    return report;
}

void SweepConfig::validate() const {
    if (n == 0) throw std::invalid_argument("n must be positive");
    if (k < 3) throw std::invalid_argument("k must be at least 3");
    if (alpha <= 0 || alpha > 1) throw std::invalid_argument("alpha must lie in (0,1]");
    if (trials == 0) throw std::invalid_argument("trials must be positive");
    for (const Rational& c : c_grid) {
        if (c <= 0) throw std::invalid_argument("grid constants must be positive");
        double p = probability(c);
        if (!(p > 0.0 && p <= 1.0)) {
            throw std::invalid_argument("grid constant " + to_string(c) + " gives p outside (0,1]");
        }
    }
}

double SweepConfig::probability(const Rational& c) const {
    return to_double(c) * std::pow(static_cast<double>(n), -1.0 / static_cast<double>(k - 1));
}

Decision every_dense_subset_has_ap(const GroundSet& S, unsigned k, const Rational& alpha,
                                   std::uint64_t node_budget) {
    // Subsets with |S'| >= alpha|S| all contain an AP iff no AP-free subset reaches ceil(alpha|S|).
    const auto target = ceil(alpha * Rational(S.size())).convert_to<std::size_t>();
    switch (has_apfree_subset_of_size(S, k, target, node_budget).decision) {
        case Decision::yes: return Decision::no;
        case Decision::no: return Decision::yes;
        default: return Decision::unresolved;
    }
}

SweepResult threshold_sweep(const SweepConfig& config) {
    config.validate();
    SweepResult result;
    result.config = config;
    for (std::size_t g = 0; g < config.c_grid.size(); ++g) {
        SweepPoint point;
        point.c = config.c_grid[g];
        point.p = config.probability(point.c);
        point.trials = config.trials;
        std::vector<Decision> outcome(config.trials, Decision::unresolved);
        std::vector<std::size_t> sizes(config.trials, 0);
        parallel_for(config.trials, config.threads, [&](std::uint64_t t) {
            const RngStream stream{config.seed, (static_cast<std::uint64_t>(g) << 32) | t};
            GroundSet S = sample_binomial_set(config.n, point.p, stream);
            sizes[t] = S.size();
            outcome[t] = every_dense_subset_has_ap(S, config.k, config.alpha, config.node_budget);
        });
        BigInt total_size = 0;
        for (std::uint64_t t = 0; t < config.trials; ++t) {
            total_size += sizes[t];
            point.successes += outcome[t] == Decision::yes;
            point.unresolved += outcome[t] == Decision::unresolved;
        }
        point.mean_set_size = Rational(total_size, config.trials);
        point.interval = wilson_interval(point.successes, point.trials - point.unresolved);
        result.points.push_back(point);
    }
    return result;
}

}  // namespace aplab
