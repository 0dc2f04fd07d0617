#include "sosreg/faa_di_bruno.hpp"

#include <algorithm>
#include <map>
#include <mutex>

namespace sosreg {

namespace {

using Key = std::vector<MultiIndex>;

std::vector<CompositionTerm> differentiate_terms(const std::vector<CompositionTerm>& terms, std::size_t dim,
                                                 std::size_t i) {
    std::map<Key, double> merged;
    for (const auto& t : terms) {
        // derivative of psi^(k)(g): psi^(k+1)(g) * D_i g
        Key a = t.factors;
        a.push_back(unit_index(dim, i));
        std::sort(a.begin(), a.end());
        merged[a] += t.coef;
        // derivative of each factor
        for (std::size_t j = 0; j < t.factors.size(); ++j) {
            Key b = t.factors;
            b[j][i] += 1;
            std::sort(b.begin(), b.end());
            merged[b] += t.coef;
        }
    }
    std::vector<CompositionTerm> out;
    out.reserve(merged.size());
    for (auto& [k, c] : merged) out.push_back(CompositionTerm{c, k});
    return out;
}

}  // namespace

const std::vector<CompositionTerm>& composition_terms(const MultiIndex& alpha) {
    static std::mutex mu;
    static std::map<MultiIndex, std::vector<CompositionTerm>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(alpha);
    if (it != cache.end()) return it->second;
    std::vector<CompositionTerm> terms{CompositionTerm{1.0, {}}};
    for (std::size_t i = 0; i < alpha.size(); ++i) {
        for (int r = 0; r < alpha[i]; ++r) terms = differentiate_terms(terms, alpha.size(), i);
    }
    return cache.emplace(alpha, std::move(terms)).first->second;
}

double falling_factorial(double gamma, int k) {
    double c = 1.0;
    for (int j = 0; j < k; ++j) c *= gamma - j;
    return c;
}

}  // namespace sosreg
