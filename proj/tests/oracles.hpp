// Independent reference implementations used only to check the library.
// Everything here is deliberately brute force and shares no code with the
// paths under test.
#ifndef URA_TEST_ORACLES_HPP
#define URA_TEST_ORACLES_HPP

#include <algorithm>
#include <cstdint>
#include <complex>
#include <limits>
#include <vector>

#include "ura/gf.hpp"
#include "ura/grid.hpp"
#include "ura/ldpc.hpp"

namespace oracles {

// Schoolbook polynomial multiplication over GF(2)[x], reduced mod prim_poly.
inline int gf_mul_poly(int a, int b, int m, std::uint32_t prim_poly) {
    std::uint64_t prod = 0;
    for (int i = 0; i < m; ++i)
        if (b & (1 << i)) prod ^= static_cast<std::uint64_t>(a) << i;
    for (int bit = 2 * m - 2; bit >= m; --bit)
        if (prod & (1ull << bit)) prod ^= static_cast<std::uint64_t>(prim_poly) << (bit - m);
    return static_cast<int>(prod);
}

inline std::vector<double> xor_convolve(const std::vector<double>& u, const std::vector<double>& v) {
    std::vector<double> out(u.size(), 0.0);
    for (size_t a = 0; a < u.size(); ++a)
        for (size_t b = 0; b < v.size(); ++b) out[a ^ b] += u[a] * v[b];
    return out;
}

// Minimum-cost assignment over all K! permutations, lexicographically
// smallest among ties. perm[i] is the column matched to row i.
inline std::pair<std::vector<int>, double> brute_force_assignment(
    const std::vector<std::vector<double>>& cost) {
    const int n = static_cast<int>(cost.size());
    std::vector<int> perm(n), best;
    for (int i = 0; i < n; ++i) perm[i] = i;
    double best_cost = std::numeric_limits<double>::infinity();
    do {
        double c = 0.0;
        for (int i = 0; i < n; ++i) c += cost[i][perm[i]];
        if (c < best_cost - 1e-12) {
            best_cost = c;
            best = perm;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return {best, best_cost};
}

// All codewords of a small code by plain enumeration of [Q]^L.
inline std::vector<std::vector<int>> enumerate_codewords(const ura::GfContext& gf,
                                                         const ura::ParityCheckMatrix& h) {
    std::vector<std::vector<int>> words;
    std::vector<int> c(h.slots(), 0);
    for (;;) {
        auto syn = h.syndrome(gf, c);
        if (std::all_of(syn.begin(), syn.end(), [](int x) { return x == 0; })) words.push_back(c);
        int l = h.slots() - 1;
        while (l >= 0 && ++c[l] == gf.q()) c[l--] = 0;
        if (l < 0) break;
    }
    return words;
}

// Exact per-slot posteriors of a codeword drawn with independent per-slot
// priors lambda, conditioned on code membership.
inline std::vector<std::vector<double>> exact_posteriors(
    const ura::GfContext& gf, const ura::ParityCheckMatrix& h,
    const std::vector<std::vector<double>>& lambda) {
    auto words = enumerate_codewords(gf, h);
    std::vector<std::vector<double>> post(h.slots(), std::vector<double>(gf.q(), 0.0));
    double total = 0.0;
    for (const auto& w : words) {
        double weight = 1.0;
        for (int l = 0; l < h.slots(); ++l) weight *= lambda[l][w[l]];
        total += weight;
        for (int l = 0; l < h.slots(); ++l) post[l][w[l]] += weight;
    }
    for (auto& row : post)
        for (double& x : row) x /= total;
    return post;
}

} // namespace oracles

#endif
