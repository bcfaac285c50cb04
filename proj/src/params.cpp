#include "aplab/params.hpp"

#include <stdexcept>

namespace aplab {

void ProblemParams::validate() const {
    if (k < 3) throw std::invalid_argument("k must be at least 3");
    if (k_prime > k) throw std::invalid_argument("k' must not exceed k");
    if (m > n) throw std::invalid_argument("m must not exceed n");
    if (n > kMaxUniverse) throw std::invalid_argument("n exceeds 2^20");
    if (alpha <= 0 || alpha > 1) throw std::invalid_argument("alpha must lie in (0,1]");
    if (beta <= 0 || beta >= 1) throw std::invalid_argument("beta must lie in (0,1)");
}

}  // namespace aplab
