#pragma once

#include <vector>

#include "sosreg/common.hpp"

namespace sosreg {

// One term of D^alpha (psi o g): coef * psi^(k)(g) * prod_j D^{factors[j]} g, k = factors.size().
struct CompositionTerm {
    double coef = 1.0;
    std::vector<MultiIndex> factors;  // sorted, each of order >= 1
};

// Terms of D^alpha (psi o g), generated by repeated differentiation of the
// composition and merging of equal terms. Results are cached per alpha.
const std::vector<CompositionTerm>& composition_terms(const MultiIndex& alpha);

// psi^(k)(u) for psi(u) = u^gamma, i.e. gamma (gamma-1) ... (gamma-k+1) u^(gamma-k).
double falling_factorial(double gamma, int k);

}  // namespace sosreg
