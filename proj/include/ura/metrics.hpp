#ifndef URA_METRICS_HPP
#define URA_METRICS_HPP

#include <vector>

#include "ura/grid.hpp"

namespace ura {

struct MatchResult {
    std::vector<int> perm;       // predicted row k -> matched truth row perm[k]
    double total_cost = 0.0;
    std::vector<double> row_cost; // matched cost per predicted row
};

/// Minimum-cost assignment on a square non-negative matrix (O(K^3) potentials
/// method). Among cost-equal optima the lexicographically smallest
/// permutation wins, so results are deterministic across platforms.
MatchResult hungarian_match(const std::vector<std::vector<double>>& cost);

struct SerCer {
    double ser = 0.0;
    double cer = 0.0;
};

/// Permutation-invariant symbol / codeword error rates: Hamming cost matrix,
/// Hungarian match, then SER = mismatches/(K*L), CER = imperfect rows/K.
SerCer ser_cer(const SymbolGrid& truth, const SymbolGrid& pred);

} // namespace ura

#endif
