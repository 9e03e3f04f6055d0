#include "ura/sim.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "ura/seeding.hpp"

namespace ura {

SensingMatrix partial_dft(int q, int n_s, int slot, std::mt19937_64& rng) {
    if (n_s > q) throw std::domain_error("partial_dft: n_s must not exceed Q");
    if (n_s < 1) throw std::domain_error("partial_dft: need n_s >= 1");

    SensingMatrix a;
    a.slot = slot;
    a.n_s = n_s;
    a.q = q;

    // Partial Fisher-Yates over the Q row indices.
    std::vector<int> idx(q);
    for (int i = 0; i < q; ++i) idx[i] = i;
    for (int i = 0; i < n_s; ++i) {
        std::uniform_int_distribution<int> pick(i, q - 1);
        std::swap(idx[i], idx[pick(rng)]);
    }
    a.row_indices.assign(idx.begin(), idx.begin() + n_s);

    const double scale = 1.0 / std::sqrt(static_cast<double>(n_s));
    a.cols.resize(static_cast<size_t>(n_s) * q);
    for (int col = 0; col < q; ++col) {
        cplx* dst = a.cols.data() + static_cast<size_t>(col) * n_s;
        for (int r = 0; r < n_s; ++r) {
            double phase = -2.0 * std::numbers::pi * a.row_indices[r] * col / q;
            dst[r] = scale * cplx(std::cos(phase), std::sin(phase));
        }
    }
    return a;
}

std::vector<cplx> activity_vector(const std::vector<int>& symbols, int q) {
    std::vector<cplx> u(q, cplx(0.0, 0.0));
    for (int s : symbols) u[s] += 1.0;
    return u;
}

std::vector<cplx> transmit(const SensingMatrix& a, const std::vector<cplx>& u,
                           double p_sym, double noise_var, std::mt19937_64& rng) {
    if (p_sym <= 0.0) throw std::domain_error("transmit: p_sym must be positive");
    const double amp = std::sqrt(p_sym);
    std::vector<cplx> y(a.n_s, cplx(0.0, 0.0));
    for (int col = 0; col < a.q; ++col) {
        if (u[col] == cplx(0.0, 0.0)) continue;
        const cplx w = amp * u[col];
        const cplx* src = a.col(col);
        for (int r = 0; r < a.n_s; ++r) y[r] += w * src[r];
    }
    if (noise_var > 0.0) {
        std::normal_distribution<double> g(0.0, std::sqrt(noise_var / 2.0));
        for (int r = 0; r < a.n_s; ++r) y[r] += cplx(g(rng), g(rng));
    }
    return y;
}

double symbol_power(double eb_db, int payload_bits, int slots) {
    if (slots <= 0) throw std::domain_error("symbol_power: need L > 0");
    return payload_bits * std::pow(10.0, eb_db / 10.0) / slots;
}

double snr_db(double eb_db, int slots, int n_s, int payload_bits) {
    return eb_db - 10.0 * std::log10(static_cast<double>(slots) * n_s / payload_bits);
}

std::vector<SensingMatrix> make_dictionaries(int q, int n_s, int slots, std::uint64_t seed) {
    auto rng = make_rng(seed);
    std::vector<SensingMatrix> dicts;
    dicts.reserve(slots);
    for (int l = 0; l < slots; ++l) dicts.push_back(partial_dft(q, n_s, l, rng));
    return dicts;
}

FrameSample generate_frame(const FrameConfig& cfg, const GfContext& gf,
                           const GeneratorForm& gen,
                           const std::vector<SensingMatrix>& dicts,
                           std::uint64_t seed) {
    if (static_cast<int>(dicts.size()) != cfg.slots)
        throw std::domain_error("generate_frame: dictionary count must equal slot count");

    FrameSample frame;
    frame.seed = seed;
    auto rng = make_rng(seed);
    frame.truth = sample_codewords(gf, gen, cfg.k, rng);

    const double p_sym = cfg.p_sym();
    frame.observations.reserve(cfg.slots);
    std::vector<int> column(cfg.k);
    for (int l = 0; l < cfg.slots; ++l) {
        for (int k = 0; k < cfg.k; ++k) column[k] = frame.truth.at(k, l);
        auto u = activity_vector(column, cfg.q);
        frame.observations.push_back(transmit(dicts[l], u, p_sym, cfg.noise_var, rng));
    }
    return frame;
}

} // namespace ura
