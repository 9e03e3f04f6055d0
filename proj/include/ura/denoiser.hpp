#ifndef URA_DENOISER_HPP
#define URA_DENOISER_HPP

#include <cstdint>
#include <vector>

#include "ura/gf.hpp"
#include "ura/grid.hpp"
#include "ura/ldpc.hpp"

namespace ura {

// K x L x D latent tensor, row-major.
struct LatentGrid {
    int rows = 0, cols = 0, dim = 0;
    std::vector<double> v;

    LatentGrid() = default;
    LatentGrid(int r, int c, int d, double fill = 0.0)
        : rows(r), cols(c), dim(d), v(static_cast<size_t>(r) * c * d, fill) {}

    double* at(int r, int c) { return v.data() + (static_cast<size_t>(r) * cols + c) * dim; }
    const double* at(int r, int c) const {
        return v.data() + (static_cast<size_t>(r) * cols + c) * dim;
    }
};

// K x L x Q logit tensor, row-major.
struct LogitGrid {
    int rows = 0, cols = 0, q = 0;
    std::vector<double> v;

    LogitGrid() = default;
    LogitGrid(int r, int c, int qq, double fill = 0.0)
        : rows(r), cols(c), q(qq), v(static_cast<size_t>(r) * c * qq, fill) {}

    double* at(int r, int c) { return v.data() + (static_cast<size_t>(r) * cols + c) * q; }
    const double* at(int r, int c) const {
        return v.data() + (static_cast<size_t>(r) * cols + c) * q;
    }
};

// y = W2 * act(W1 x + b1) + b2, applied with the activation the caller picks.
struct TwoLayerMap {
    int in = 0, hidden = 0, out = 0;
    std::vector<double> w1, b1, w2, b2;

    void apply_gelu(const double* x, double* y) const;
    void apply_sigmoid_out(const double* x, double* y) const; // gelu hidden, sigmoid output
};

/// Untrained forward-pass parameters of the structured denoiser. Everything
/// is row-shared so the forward pass is exactly equivariant to row
/// permutations. Weights initialize uniform in [-1/sqrt(D), 1/sqrt(D)].
struct DenoiserParams {
    int q = 0;
    int dim = 0;
    double tau_demix = 1.0;
    double evidence_scale = 1.0; // weight of S inside the demixing logits

    std::vector<double> embed;     // (Q+1) x D, row Q is the mask token
    std::vector<double> out_proj;  // Q x D, rows are the symbol vectors w_a
    std::vector<double> sym_embed; // Q x D, evidence embedding vectors v_a
    TwoLayerMap gate_a;            // [z; e] (2D) -> gate in [0,1]^D
    TwoLayerMap check_agg;         // aggregated neighbor latent -> message
    TwoLayerMap fuse_b;            // [z; m] (2D) -> residual update

    static DenoiserParams random_init(int q, int dim, std::uint64_t seed);

    const double* embed_row(int token) const { return embed.data() + static_cast<size_t>(token) * dim; }
    const double* w_row(int a) const { return out_proj.data() + static_cast<size_t>(a) * dim; }
    const double* v_row(int a) const { return sym_embed.data() + static_cast<size_t>(a) * dim; }
};

// Z_{k,l} = E[X_{k,l}] with the mask token mapped to row Q.
LatentGrid embed_grid(const MaskedGrid& x, const DenoiserParams& p);

// Demixing logits <Z, w_a> + beta_S * S, computed before Module A.
LogitGrid intermediate_logits(const LatentGrid& z, const EvidenceMatrix& s, const DenoiserParams& p);

/// Softmax over the row axis of logits/tau. The normalizer is accumulated in
/// descending value order, which keeps the result bit-identical under row
/// permutations.
LogitGrid demix_responsibilities(const LogitGrid& logits_bar, double tau);

// e_{k,l} = sum_a r_{k,l,a} * S_{l,a} * v_a.
LatentGrid evidence_embed(const LogitGrid& r, const EvidenceMatrix& s, const DenoiserParams& p);

// Gated fusion of the latent with the demixed evidence summary.
LatentGrid module_a(const LatentGrid& z, const EvidenceMatrix& s, const DenoiserParams& p);

// T_alpha(x) = W^T Pi_alpha W x; alpha must be nonzero.
std::vector<double> coeff_action(const GfContext& gf, const DenoiserParams& p,
                                 const double* x, int alpha);

/// Parity-aware propagation: coefficient-normalize neighbor latents, sum-pool
/// extrinsically per edge, map through the check aggregator, denormalize with
/// the inverse coefficient, scatter-add per slot, fuse residually. When
/// incoming_out is given it receives the per-slot aggregated check messages
/// (the scatter-add result before fusion).
LatentGrid module_b(const GfContext& gf, const LatentGrid& z_tilde, const ParityCheckMatrix& h,
                    const DenoiserParams& p, LatentGrid* incoming_out = nullptr);

// Lambda_{k,l,a} = w_a . Z_{k,l}.
LogitGrid final_logits(const LatentGrid& z_hat, const DenoiserParams& p);

/// The pluggable per-step denoiser. mask_ratio is the fraction of sites still
/// masked; implementations may ignore it.
class Denoiser {
public:
    virtual ~Denoiser() = default;
    virtual LogitGrid logits(const MaskedGrid& x, const EvidenceMatrix& s,
                             const ParityCheckMatrix& h, double mask_ratio) const = 0;
};

/// embed -> module_a -> module_b -> final_logits with fixed parameters. The
/// forward pass is time-homogeneous; the step index only shapes the engine's
/// reveal schedule.
class StructuredDenoiser : public Denoiser {
public:
    StructuredDenoiser(GfContext gf, DenoiserParams params);
    LogitGrid logits(const MaskedGrid& x, const EvidenceMatrix& s,
                     const ParityCheckMatrix& h, double mask_ratio) const override;
    const DenoiserParams& params() const { return params_; }

private:
    GfContext gf_;
    DenoiserParams params_;
};

/// Engine-test denoiser: +hot at the hidden truth symbol, 0 elsewhere, with
/// the truth's row order fixed by the caller.
class OracleDenoiser : public Denoiser {
public:
    explicit OracleDenoiser(SymbolGrid truth, double hot = 10.0);
    LogitGrid logits(const MaskedGrid& x, const EvidenceMatrix& s,
                     const ParityCheckMatrix& h, double mask_ratio) const override;

private:
    SymbolGrid truth_;
    double hot_;
};

} // namespace ura

#endif
