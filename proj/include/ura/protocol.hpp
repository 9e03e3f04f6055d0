#ifndef URA_PROTOCOL_HPP
#define URA_PROTOCOL_HPP

#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "ura/amp.hpp"
#include "ura/gf.hpp"
#include "ura/grid.hpp"
#include "ura/ldpc.hpp"
#include "ura/sim.hpp"

namespace ura {

struct ProtocolConfig {
    int k_tot = 8;
    int zeta = 2;
    int k_max = 8;
};

// zeta = ceil(k_tot / 4), the scaled-bin rule.
int scaled_zeta(int k_tot);

// Uniform preamble selection: multinomial bin loads summing to k_tot.
std::vector<int> assign_bins(int k_tot, int zeta, std::mt19937_64& rng);

// Pr[Poisson(kappa) > k_max], evaluated by the stable partial sum.
double poisson_overflow(double kappa, int k_max);

struct BinTask {
    const GfContext& gf;
    const ParityCheckMatrix& h;
    const EvidenceMatrix& evidence;
    const SymbolGrid& truth; // for oracle decoders; regular decoders ignore it
    int load = 0;
};

using BinDecoder = std::function<SymbolGrid(const BinTask&)>;

/// Per-load decoder bank; bank[load-1] decodes bins of that load. Every load
/// up to k_max must be populated.
struct DecoderBank {
    std::vector<BinDecoder> by_load;

    static DecoderBank uniform(BinDecoder decoder, int k_max);
};

struct ProtocolFrameResult {
    double ser = 0.0;
    double cer = 0.0;
    int overflow_bins = 0;
    int overflow_users = 0;
    int decoded_users = 0;
};

/// One frame: assign users to bins, simulate and decode every non-empty bin
/// with load <= k_max, erase overflowing bins (their users count fully
/// errored). SER/CER aggregate per user over all k_tot users.
ProtocolFrameResult run_protocol_frame(const ProtocolConfig& cfg, const FrameConfig& base,
                                       const GfContext& gf, const ParityCheckMatrix& h,
                                       const GeneratorForm& gen,
                                       const std::vector<SensingMatrix>& dicts,
                                       const DecoderBank& bank, std::uint64_t seed);

struct ProtocolAggregate {
    double ser = 0.0;
    double cer = 0.0;
    double overflow_rate = 0.0; // erased-user fraction
    int frames = 0;
};

ProtocolAggregate run_protocol(const ProtocolConfig& cfg, const FrameConfig& base,
                               const GfContext& gf, const ParityCheckMatrix& h,
                               const GeneratorForm& gen, const std::vector<SensingMatrix>& dicts,
                               const DecoderBank& bank, int frames, std::uint64_t master_seed);

} // namespace ura

#endif
