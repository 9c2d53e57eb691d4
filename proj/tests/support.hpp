#pragma once

#include "sl3/exact.hpp"

#include <random>

namespace sl3::testing {

inline ExactScalar random_rational(std::mt19937_64& rng, int num_range = 5, int den_max = 4) {
    std::uniform_int_distribution<int> num(-num_range, num_range), den(1, den_max);
    ExactScalar r(num(rng), den(rng));
    r.canonicalize();
    return r;
}

inline ExactScalar random_nonzero(std::mt19937_64& rng, int num_range = 5, int den_max = 4) {
    ExactScalar r;
    while (r == 0) r = random_rational(rng, num_range, den_max);
    return r;
}

inline ExactMat3 random_upper_unipotent(std::mt19937_64& rng) {
    ExactMat3 n = ExactMat3::identity();
    n(0, 1) = random_rational(rng);
    n(0, 2) = random_rational(rng);
    n(1, 2) = random_rational(rng);
    return n;
}

inline ExactMat3 random_lower_unipotent(std::mt19937_64& rng) { return random_upper_unipotent(rng).transpose(); }

inline ExactMat3 random_diagonal_det1(std::mt19937_64& rng) {
    ExactScalar a = random_nonzero(rng), b = random_nonzero(rng);
    return ExactMat3::diag(a, b, 1 / (a * b));
}

}  // namespace sl3::testing
