#ifndef URA_GRID_HPP
#define URA_GRID_HPP

#include <stdexcept>
#include <vector>

namespace ura {

// Mask token for partially revealed grids. Valid symbols are 0..Q-1.
constexpr int kMaskToken = -1;

// Dense K x L integer grid, row-major. Used for both fully revealed symbol
// grids and masked decoding state (entries in [0,Q) or kMaskToken).
struct SymbolGrid {
    int rows = 0;
    int cols = 0;
    std::vector<int> v;

    SymbolGrid() = default;
    SymbolGrid(int r, int c, int fill = 0) : rows(r), cols(c), v(static_cast<size_t>(r) * c, fill) {}

    int& at(int r, int c) { return v[static_cast<size_t>(r) * cols + c]; }
    int at(int r, int c) const { return v[static_cast<size_t>(r) * cols + c]; }

    bool operator==(const SymbolGrid& o) const { return rows == o.rows && cols == o.cols && v == o.v; }

    int masked_count() const {
        int n = 0;
        for (int x : v) n += (x == kMaskToken);
        return n;
    }
};

using MaskedGrid = SymbolGrid;

inline MaskedGrid all_masked_grid(int rows, int cols) { return MaskedGrid(rows, cols, kMaskToken); }

// L x Q table of log posterior activity scores, row-major. Entries are
// finite and <= 0 once floored by the detector.
struct EvidenceMatrix {
    int slots = 0;
    int q = 0;
    std::vector<double> v;

    EvidenceMatrix() = default;
    EvidenceMatrix(int l, int qq, double fill = 0.0)
        : slots(l), q(qq), v(static_cast<size_t>(l) * qq, fill) {}

    double& at(int l, int a) { return v[static_cast<size_t>(l) * q + a]; }
    double at(int l, int a) const { return v[static_cast<size_t>(l) * q + a]; }

    const double* row(int l) const { return v.data() + static_cast<size_t>(l) * q; }
    double* row(int l) { return v.data() + static_cast<size_t>(l) * q; }
};

} // namespace ura

#endif
