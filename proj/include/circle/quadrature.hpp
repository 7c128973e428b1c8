#pragma once

#include <vector>

namespace circle {

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Cached rule of the given order (2 <= order <= 64).
const GaussRule& gauss_legendre(int order);

/// Radical inverse of i in the given prime base (Halton coordinate).
double radical_inverse(unsigned long long i, unsigned base);

}  // namespace circle
