#pragma once

#include "aplab/ground_set.hpp"
#include "aplab/numeric.hpp"

namespace aplab {

/// Instance parameters (n, m, k, k', alpha, beta) shared by the counting statements.
struct ProblemParams {
    Element n = 0;
    Element m = 0;
    unsigned k = 3;
    unsigned k_prime = 3;
    Rational alpha = 1;
    Rational beta = Rational(1, 2);

    // Throws std::invalid_argument unless 0 <= k' <= k, k >= 3, 0 <= m <= n,
    // alpha in (0,1] and beta in (0,1).
    void validate() const;
};

}  // namespace aplab
