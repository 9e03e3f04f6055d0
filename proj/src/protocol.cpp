#include "ura/protocol.hpp"

#include <cmath>
#include <stdexcept>

#include "ura/metrics.hpp"
#include "ura/parallel.hpp"
#include "ura/seeding.hpp"

namespace ura {

int scaled_zeta(int k_tot) { return (k_tot + 3) / 4; }

std::vector<int> assign_bins(int k_tot, int zeta, std::mt19937_64& rng) {
    if (k_tot < 0) throw std::domain_error("assign_bins: k_tot must be non-negative");
    if (zeta < 1) throw std::domain_error("assign_bins: need at least one bin");
    std::vector<int> loads(zeta, 0);
    std::uniform_int_distribution<int> pick(0, zeta - 1);
    for (int u = 0; u < k_tot; ++u) ++loads[pick(rng)];
    return loads;
}

double poisson_overflow(double kappa, int k_max) {
    if (kappa < 0.0) throw std::domain_error("poisson_overflow: kappa must be non-negative");
    if (kappa == 0.0) return 0.0;
    double term = std::exp(-kappa);
    double cum = term;
    for (int i = 1; i <= k_max; ++i) {
        term *= kappa / i;
        cum += term;
    }
    return cum >= 1.0 ? 0.0 : 1.0 - cum;
}

DecoderBank DecoderBank::uniform(BinDecoder decoder, int k_max) {
    DecoderBank bank;
    bank.by_load.assign(k_max, decoder);
    return bank;
}

ProtocolFrameResult run_protocol_frame(const ProtocolConfig& cfg, const FrameConfig& base,
                                       const GfContext& gf, const ParityCheckMatrix& h,
                                       const GeneratorForm& gen,
                                       const std::vector<SensingMatrix>& dicts,
                                       const DecoderBank& bank, std::uint64_t seed) {
    if (cfg.zeta < 1 || cfg.k_max < 1) throw std::domain_error("run_protocol_frame: bad config");
    if (static_cast<int>(bank.by_load.size()) < cfg.k_max)
        throw std::invalid_argument("run_protocol_frame: decoder bank does not cover k_max");
    for (int load = 1; load <= cfg.k_max; ++load)
        if (!bank.by_load[load - 1])
            throw std::invalid_argument("run_protocol_frame: no decoder for load " +
                                        std::to_string(load));

    auto rng = make_rng(seed);
    std::vector<int> loads = assign_bins(cfg.k_tot, cfg.zeta, rng);

    long long symbol_errors = 0;
    int row_errors = 0;
    ProtocolFrameResult res;
    for (int chi = 0; chi < cfg.zeta; ++chi) {
        const int load = loads[chi];
        if (load == 0) continue;
        if (load > cfg.k_max) {
            ++res.overflow_bins;
            res.overflow_users += load;
            continue;
        }
        FrameConfig bin_cfg = base;
        bin_cfg.k = load;
        FrameSample frame = generate_frame(bin_cfg, gf, gen, dicts, derive_seed(seed, chi + 1));
        EvidenceMatrix evidence =
            detect_frame(frame.observations, dicts, default_amp_config(bin_cfg));
        SymbolGrid decoded = bank.by_load[load - 1](BinTask{gf, h, evidence, frame.truth, load});
        SerCer m = ser_cer(frame.truth, decoded);
        symbol_errors += std::llround(m.ser * load * base.slots);
        row_errors += static_cast<int>(std::llround(m.cer * load));
        res.decoded_users += load;
    }

    if (res.decoded_users + res.overflow_users != cfg.k_tot)
        throw std::logic_error("run_protocol_frame: user conservation violated");

    const double denom_users = static_cast<double>(cfg.k_tot);
    res.ser = (symbol_errors + static_cast<long long>(res.overflow_users) * base.slots) /
              (denom_users * base.slots);
    res.cer = (row_errors + res.overflow_users) / denom_users;
    return res;
}

ProtocolAggregate run_protocol(const ProtocolConfig& cfg, const FrameConfig& base,
                               const GfContext& gf, const ParityCheckMatrix& h,
                               const GeneratorForm& gen, const std::vector<SensingMatrix>& dicts,
                               const DecoderBank& bank, int frames, std::uint64_t master_seed) {
    std::vector<ProtocolFrameResult> per_frame(frames);
    parallel_for(frames, [&](int i) {
        per_frame[i] = run_protocol_frame(cfg, base, gf, h, gen, dicts, bank,
                                          derive_seed(master_seed, 16 + i));
    });
    ProtocolAggregate agg;
    agg.frames = frames;
    long long overflow_users = 0;
    for (const auto& f : per_frame) {
        agg.ser += f.ser;
        agg.cer += f.cer;
        overflow_users += f.overflow_users;
    }
    if (frames > 0) {
        agg.ser /= frames;
        agg.cer /= frames;
        agg.overflow_rate = overflow_users / (static_cast<double>(frames) * cfg.k_tot);
    }
    return agg;
}

} // namespace ura
