#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "aplab/apfree.hpp"
#include "aplab/ground_set.hpp"
#include "aplab/numeric.hpp"

namespace aplab {

/// Counter-based stream identity: a trial's generator depends only on (seed, index).
struct RngStream {
    std::uint64_t seed = 0;
    std::uint64_t index = 0;

    std::mt19937_64 engine() const;
};

std::uint64_t splitmix64(std::uint64_t x);

/// Uniform on [0, bound) by rejection; bound must be positive.
std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound);
/// Uniform on [0, 1) with 53 random bits.
double uniform_unit(std::mt19937_64& rng);

GroundSet sample_m_set(Element n, Element m, const RngStream& stream);
GroundSet sample_binomial_set(Element n, double p, const RngStream& stream);

/// E[count_aps(S,[n],k,k)] for a uniform m-subset S of [n].
Rational expected_ap_count(Element n, unsigned k, Element m);

struct Interval {
    double lo = 0;
    double hi = 1;
};

/// 95% Wilson score interval for successes out of trials.
Interval wilson_interval(std::uint64_t successes, std::uint64_t trials);

struct DeficientEstimate {
    std::uint64_t trials = 0;
    std::uint64_t deficient = 0;
    Rational fraction = 0;
    Interval interval;
    Rational threshold = 0;
    bool below_beta_bound = false;  // fraction <= beta^m
};

struct ParallelOptions {
    unsigned threads = 1;
};

DeficientEstimate estimate_deficient_fraction(Element n, unsigned k, Element m, const Rational& gamma,
                                              std::uint64_t trials, std::uint64_t seed,
                                              const Rational& beta = Rational(1, 2),
                                              const ParallelOptions& parallel = {});

/// Sample mean of count_aps(S,[n],k,k) over uniform m-sets, against the exact expectation.
struct ConcentrationReport {
    std::uint64_t samples = 0;
    double sample_mean = 0;
    double standard_error = 0;
    Rational expected = 0;
    double z_score = 0;  // (sample_mean - expected) / standard_error
};

ConcentrationReport ap_count_concentration(Element n, unsigned k, Element m, std::uint64_t samples,
                                           std::uint64_t seed, const ParallelOptions& parallel = {});

struct SweepConfig {
    Element n = 0;
    unsigned k = 3;
    Rational alpha = Rational(1, 2);
    std::vector<Rational> c_grid;
    std::uint64_t trials = 1;
    std::uint64_t seed = 0;
    std::uint64_t node_budget = 2'000'000;  // per trial
    unsigned threads = 1;

    void validate() const;
    double probability(const Rational& c) const;  // C * n^(-1/(k-1))
};

struct SweepPoint {
    Rational c = 0;
    double p = 0;
    std::uint64_t trials = 0;
    std::uint64_t successes = 0;
    std::uint64_t unresolved = 0;
    Interval interval;  // over resolved trials
    Rational mean_set_size = 0;
};

struct SweepResult {
    SweepConfig config;
    std::vector<SweepPoint> points;
};

/// For every grid point, draws binomial sets and records whether every subset of density at
/// least alpha contains a k-AP (equivalently the largest AP-free subset is below alpha|S|).
SweepResult threshold_sweep(const SweepConfig& config);

/// Outcome of the sweep predicate on one set.
Decision every_dense_subset_has_ap(const GroundSet& S, unsigned k, const Rational& alpha,
                                   std::uint64_t node_budget);

}  // namespace aplab
