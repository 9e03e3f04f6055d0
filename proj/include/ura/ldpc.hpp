#ifndef URA_LDPC_HPP
#define URA_LDPC_HPP

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "ura/gf.hpp"
#include "ura/grid.hpp"

namespace ura {

struct ParityEdge {
    int check = 0;
    int slot = 0;
    int coeff = 0; // element of F_Q^x, never zero
};

/// Sparse parity-check matrix H over F_Q with Tanner neighbor lists.
/// Edges are stored sorted by (check, slot); neighbor lists index into the
/// edge array. Immutable after construction.
class ParityCheckMatrix {
public:
    // Validates: indices in range, coefficients nonzero, no duplicate (j,l).
    ParityCheckMatrix(int checks, int slots, int q, std::vector<ParityEdge> entries);

    int checks() const { return checks_; }
    int slots() const { return slots_; }
    int q() const { return q_; }
    const std::vector<ParityEdge>& entries() const { return entries_; }
    // Edge ids incident to check j / slot l.
    const std::vector<int>& check_edges(int j) const { return check_edges_[j]; }
    const std::vector<int>& slot_edges(int l) const { return slot_edges_[l]; }
    const ParityEdge& edge(int e) const { return entries_[e]; }
    int edge_count() const { return static_cast<int>(entries_.size()); }

    std::vector<int> syndrome(const GfContext& gf, const std::vector<int>& codeword) const;

private:
    int checks_ = 0;
    int slots_ = 0;
    int q_ = 0;
    std::vector<ParityEdge> entries_;
    std::vector<std::vector<int>> check_edges_;
    std::vector<std::vector<int>> slot_edges_;
};

/// Systematic encoder derived from H by Gaussian elimination over F_Q.
/// Info symbols sit at the non-pivot slots; parity slots are filled from the
/// reduced rows. Every generated codeword has zero syndrome.
class GeneratorForm {
public:
    GeneratorForm(int rank, int slots, int q,
                  std::vector<int> pivot_slots, std::vector<int> info_slots,
                  std::vector<std::vector<int>> reduced_rows);

    int rank() const { return rank_; }
    int info_length() const { return static_cast<int>(info_slots_.size()); }
    const std::vector<int>& info_positions() const { return info_slots_; }

    // Number of codewords Q^(L-rank), saturated at 2^63-1 to stay comparable.
    std::uint64_t codebook_size() const;

    std::vector<int> encode(const GfContext& gf, const std::vector<int>& info) const;

private:
    int rank_ = 0;
    int slots_ = 0;
    int q_ = 0;
    std::vector<int> pivot_slots_;
    std::vector<int> info_slots_;
    // reduced_rows[i][j]: coefficient of info symbol j in pivot equation i.
    std::vector<std::vector<int>> reduced_rows_;
};

int gf_matrix_rank(const GfContext& gf, const ParityCheckMatrix& h);

/// Regular-column random construction: every slot joins exactly col_weight
/// distinct checks, row degrees balanced greedily (checks with the smallest
/// current degree receive the next edge, ties drawn uniformly from the rng);
/// coefficients i.i.d. uniform on F_Q^x. Resamples until H has full row rank
/// (at most 64 tries). Identical seeds produce identical matrices.
ParityCheckMatrix build_random_ldpc(const GfContext& gf, int slots, int checks,
                                    int col_weight, std::mt19937_64& rng);

GeneratorForm derive_generator(const GfContext& gf, const ParityCheckMatrix& h);

/// K codewords from K distinct uniformly drawn info vectors (duplicates
/// rejected and redrawn). Throws std::domain_error if K exceeds the codebook.
SymbolGrid sample_codewords(const GfContext& gf, const GeneratorForm& gen, int k,
                            std::mt19937_64& rng);

/// Text parity file: header "P L Q col_weight prim_poly_bitmask seed", then
/// one "j l alpha" line per nonzero, all decimal.
struct LdpcFileMeta {
    int col_weight = 0;
    std::uint32_t prim_poly = 0;
    std::uint64_t seed = 0;
};

void save_parity_file(const std::string& path, const ParityCheckMatrix& h, const LdpcFileMeta& meta);
ParityCheckMatrix load_parity_file(const std::string& path, LdpcFileMeta* meta = nullptr);

} // namespace ura

#endif
