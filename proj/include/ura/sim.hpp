#ifndef URA_SIM_HPP
#define URA_SIM_HPP

#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include "ura/grid.hpp"
#include "ura/ldpc.hpp"

namespace ura {

using cplx = std::complex<double>;

/// Per-slot signature dictionary: n_s rows of the Q-point DFT, scaled by
/// 1/sqrt(n_s) so every column has unit norm. Column-major storage.
struct SensingMatrix {
    int slot = 0;
    int n_s = 0;
    int q = 0;
    std::vector<int> row_indices; // provenance: which DFT rows were kept
    std::vector<cplx> cols;       // n_s * q, column-major

    const cplx* col(int a) const { return cols.data() + static_cast<size_t>(a) * n_s; }
};

SensingMatrix partial_dft(int q, int n_s, int slot, std::mt19937_64& rng);

// U = sum_k basis(symbols[k]); colliding symbols accumulate integer counts.
std::vector<cplx> activity_vector(const std::vector<int>& symbols, int q);

// Y = sqrt(p_sym) * A * U + noise, noise circular complex Gaussian with
// variance noise_var per complex entry (two reals at noise_var/2 each).
std::vector<cplx> transmit(const SensingMatrix& a, const std::vector<cplx>& u,
                           double p_sym, double noise_var, std::mt19937_64& rng);

double symbol_power(double eb_db, int payload_bits, int slots);
double snr_db(double eb_db, int slots, int n_s, int payload_bits);

struct FrameConfig {
    int q = 64;
    int slots = 12;
    int k = 2;
    int n_s = 24;
    double eb_db = 10.0;
    double noise_var = 1.0;
    int payload_bits = 24; // B = m * L_info

    double p_sym() const { return symbol_power(eb_db, payload_bits, slots); }
};

struct FrameSample {
    SymbolGrid truth;
    std::vector<std::vector<cplx>> observations; // per slot, length n_s
    EvidenceMatrix evidence;                     // filled by the detector
    std::uint64_t seed = 0;
};

// One independent dictionary per slot from a single seed stream; fixed per
// dataset, not per frame.
std::vector<SensingMatrix> make_dictionaries(int q, int n_s, int slots, std::uint64_t seed);

// Samples K distinct codewords and transmits every slot through its own
// dictionary. (config, seed) fully determines the result.
FrameSample generate_frame(const FrameConfig& cfg, const GfContext& gf,
                           const GeneratorForm& gen,
                           const std::vector<SensingMatrix>& dicts,
                           std::uint64_t seed);

} // namespace ura

#endif
