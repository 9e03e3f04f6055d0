#include "ura/denoiser.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ura/seeding.hpp"

namespace ura {

namespace {

double gelu(double x) { return 0.5 * x * (1.0 + std::erf(x / std::sqrt(2.0))); }

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

void affine(const std::vector<double>& w, const std::vector<double>& b, int rows, int cols,
            const double* x, double* y) {
    for (int r = 0; r < rows; ++r) {
        const double* wr = w.data() + static_cast<size_t>(r) * cols;
        double acc = b[r];
        for (int c = 0; c < cols; ++c) acc += wr[c] * x[c];
        y[r] = acc;
    }
}

} // namespace

void TwoLayerMap::apply_gelu(const double* x, double* y) const {
    std::vector<double> h(hidden);
    affine(w1, b1, hidden, in, x, h.data());
    for (double& v : h) v = gelu(v);
    affine(w2, b2, out, hidden, h.data(), y);
}

void TwoLayerMap::apply_sigmoid_out(const double* x, double* y) const {
    apply_gelu(x, y);
    for (int i = 0; i < out; ++i) y[i] = sigmoid(y[i]);
}

DenoiserParams DenoiserParams::random_init(int q, int dim, std::uint64_t seed) {
    if (q < 2 || dim < 1) throw std::domain_error("DenoiserParams: bad dimensions");
    DenoiserParams p;
    p.q = q;
    p.dim = dim;
    auto rng = make_rng(seed);
    const double bound = 1.0 / std::sqrt(static_cast<double>(dim));
    std::uniform_real_distribution<double> u(-bound, bound);
    auto fill = [&](std::vector<double>& v, size_t n) {
        v.resize(n);
        for (double& x : v) x = u(rng);
    };
    fill(p.embed, static_cast<size_t>(q + 1) * dim);
    fill(p.out_proj, static_cast<size_t>(q) * dim);
    fill(p.sym_embed, static_cast<size_t>(q) * dim);
    auto init_map = [&](TwoLayerMap& m, int in) {
        m.in = in;
        m.hidden = dim;
        m.out = dim;
        fill(m.w1, static_cast<size_t>(dim) * in);
        fill(m.b1, dim);
        fill(m.w2, static_cast<size_t>(dim) * dim);
        fill(m.b2, dim);
    };
    init_map(p.gate_a, 2 * dim);
    init_map(p.check_agg, dim);
    init_map(p.fuse_b, 2 * dim);
    return p;
}

LatentGrid embed_grid(const MaskedGrid& x, const DenoiserParams& p) {
    LatentGrid z(x.rows, x.cols, p.dim);
    for (int k = 0; k < x.rows; ++k) {
        for (int l = 0; l < x.cols; ++l) {
            int tok = x.at(k, l);
            if (tok != kMaskToken && (tok < 0 || tok >= p.q))
                throw std::domain_error("embed_grid: token out of range");
            int row = tok == kMaskToken ? p.q : tok;
            const double* src = p.embed_row(row);
            std::copy(src, src + p.dim, z.at(k, l));
        }
    }
    return z;
}

LogitGrid intermediate_logits(const LatentGrid& z, const EvidenceMatrix& s, const DenoiserParams& p) {
    LogitGrid bar(z.rows, z.cols, p.q);
    for (int k = 0; k < z.rows; ++k) {
        for (int l = 0; l < z.cols; ++l) {
            const double* zv = z.at(k, l);
            double* out = bar.at(k, l);
            for (int a = 0; a < p.q; ++a) {
                const double* w = p.w_row(a);
                double acc = 0.0;
                for (int i = 0; i < p.dim; ++i) acc += w[i] * zv[i];
                out[a] = acc + p.evidence_scale * s.at(l, a);
            }
        }
    }
    return bar;
}

LogitGrid demix_responsibilities(const LogitGrid& logits_bar, double tau) {
    if (tau <= 0.0) throw std::domain_error("demix_responsibilities: tau must be positive");
    const int rows = logits_bar.rows, cols = logits_bar.cols, q = logits_bar.q;
    LogitGrid r(rows, cols, q);
    std::vector<double> e(rows);
    for (int l = 0; l < cols; ++l) {
        for (int a = 0; a < q; ++a) {
            double m = logits_bar.at(0, l)[a];
            for (int k = 1; k < rows; ++k) m = std::max(m, logits_bar.at(k, l)[a]);
            for (int k = 0; k < rows; ++k) e[k] = std::exp((logits_bar.at(k, l)[a] - m) / tau);
            // Sum in descending value order: invariant to row permutations.
            std::vector<double> sorted = e;
            std::sort(sorted.begin(), sorted.end(), std::greater<double>());
            double den = 0.0;
            for (double x : sorted) den += x;
            for (int k = 0; k < rows; ++k) r.at(k, l)[a] = e[k] / den;
        }
    }
    return r;
}

LatentGrid evidence_embed(const LogitGrid& r, const EvidenceMatrix& s, const DenoiserParams& p) {
    LatentGrid e(r.rows, r.cols, p.dim);
    for (int k = 0; k < r.rows; ++k) {
        for (int l = 0; l < r.cols; ++l) {
            const double* rv = r.at(k, l);
            double* out = e.at(k, l);
            for (int a = 0; a < p.q; ++a) {
                double w = rv[a] * s.at(l, a);
                if (w == 0.0) continue;
                const double* v = p.v_row(a);
                for (int i = 0; i < p.dim; ++i) out[i] += w * v[i];
            }
        }
    }
    return e;
}

LatentGrid module_a(const LatentGrid& z, const EvidenceMatrix& s, const DenoiserParams& p) {
    LogitGrid bar = intermediate_logits(z, s, p);
    LogitGrid r = demix_responsibilities(bar, p.tau_demix);
    LatentGrid e = evidence_embed(r, s, p);

    LatentGrid out(z.rows, z.cols, p.dim);
    std::vector<double> cat(2 * p.dim), gate(p.dim);
    for (int k = 0; k < z.rows; ++k) {
        for (int l = 0; l < z.cols; ++l) {
            const double* zv = z.at(k, l);
            const double* ev = e.at(k, l);
            std::copy(zv, zv + p.dim, cat.data());
            std::copy(ev, ev + p.dim, cat.data() + p.dim);
            p.gate_a.apply_sigmoid_out(cat.data(), gate.data());
            double* ov = out.at(k, l);
            for (int i = 0; i < p.dim; ++i) ov[i] = gate[i] * zv[i] + (1.0 - gate[i]) * ev[i];
        }
    }
    return out;
}

std::vector<double> coeff_action(const GfContext& gf, const DenoiserParams& p,
                                 const double* x, int alpha) {
    if (alpha == 0) throw std::domain_error("coeff_action: alpha must be nonzero");
    std::vector<double> sym(p.q, 0.0), perm(p.q, 0.0), out(p.dim, 0.0);
    for (int a = 0; a < p.q; ++a) {
        const double* w = p.w_row(a);
        double acc = 0.0;
        for (int i = 0; i < p.dim; ++i) acc += w[i] * x[i];
        sym[a] = acc;
    }
    for (int a = 0; a < p.q; ++a) perm[gf.mul(alpha, a)] = sym[a];
    for (int a = 0; a < p.q; ++a) {
        if (perm[a] == 0.0) continue;
        const double* w = p.w_row(a);
        for (int i = 0; i < p.dim; ++i) out[i] += perm[a] * w[i];
    }
    return out;
}

LatentGrid module_b(const GfContext& gf, const LatentGrid& z_tilde, const ParityCheckMatrix& h,
                    const DenoiserParams& p, LatentGrid* incoming_out) {
    if (z_tilde.cols != h.slots()) throw std::domain_error("module_b: slot count mismatch");

    LatentGrid acc(z_tilde.rows, z_tilde.cols, p.dim);
    std::vector<double> pooled(p.dim), mapped(p.dim);
    for (int k = 0; k < z_tilde.rows; ++k) {
        for (int j = 0; j < h.checks(); ++j) {
            const auto& edges = h.check_edges(j);
            const int d = static_cast<int>(edges.size());
            std::vector<std::vector<double>> normalized(d);
            for (int i = 0; i < d; ++i) {
                const ParityEdge& e = h.edge(edges[i]);
                normalized[i] = coeff_action(gf, p, z_tilde.at(k, e.slot), e.coeff);
            }
            for (int i = 0; i < d; ++i) {
                // Extrinsic sum, accumulated without the target's own term.
                std::fill(pooled.begin(), pooled.end(), 0.0);
                for (int i2 = 0; i2 < d; ++i2) {
                    if (i2 == i) continue;
                    for (int t = 0; t < p.dim; ++t) pooled[t] += normalized[i2][t];
                }
                p.check_agg.apply_gelu(pooled.data(), mapped.data());
                const ParityEdge& e = h.edge(edges[i]);
                auto msg = coeff_action(gf, p, mapped.data(), gf.inv(e.coeff));
                double* dst = acc.at(k, e.slot);
                for (int t = 0; t < p.dim; ++t) dst[t] += msg[t];
            }
        }
    }

    if (incoming_out) *incoming_out = acc;

    LatentGrid out(z_tilde.rows, z_tilde.cols, p.dim);
    std::vector<double> cat(2 * p.dim), res(p.dim);
    for (int k = 0; k < z_tilde.rows; ++k) {
        for (int l = 0; l < z_tilde.cols; ++l) {
            const double* zv = z_tilde.at(k, l);
            const double* av = acc.at(k, l);
            std::copy(zv, zv + p.dim, cat.data());
            std::copy(av, av + p.dim, cat.data() + p.dim);
            p.fuse_b.apply_gelu(cat.data(), res.data());
            double* ov = out.at(k, l);
            for (int i = 0; i < p.dim; ++i) ov[i] = zv[i] + res[i];
        }
    }
    return out;
}

LogitGrid final_logits(const LatentGrid& z_hat, const DenoiserParams& p) {
    LogitGrid out(z_hat.rows, z_hat.cols, p.q);
    for (int k = 0; k < z_hat.rows; ++k) {
        for (int l = 0; l < z_hat.cols; ++l) {
            const double* zv = z_hat.at(k, l);
            double* ov = out.at(k, l);
            for (int a = 0; a < p.q; ++a) {
                const double* w = p.w_row(a);
                double acc = 0.0;
                for (int i = 0; i < p.dim; ++i) acc += w[i] * zv[i];
                ov[a] = acc;
            }
        }
    }
    return out;
}

StructuredDenoiser::StructuredDenoiser(GfContext gf, DenoiserParams params)
    : gf_(std::move(gf)), params_(std::move(params)) {
    if (gf_.q() != params_.q)
        throw std::domain_error("StructuredDenoiser: field size and parameter Q disagree");
}

LogitGrid StructuredDenoiser::logits(const MaskedGrid& x, const EvidenceMatrix& s,
                                     const ParityCheckMatrix& h, double /*mask_ratio*/) const {
    LatentGrid z = embed_grid(x, params_);
    LatentGrid zt = module_a(z, s, params_);
    LatentGrid zh = module_b(gf_, zt, h, params_);
    return final_logits(zh, params_);
}

OracleDenoiser::OracleDenoiser(SymbolGrid truth, double hot)
    : truth_(std::move(truth)), hot_(hot) {}

LogitGrid OracleDenoiser::logits(const MaskedGrid& x, const EvidenceMatrix& s,
                                 const ParityCheckMatrix& /*h*/, double /*mask_ratio*/) const {
    const int q = s.q;
    LogitGrid out(truth_.rows, truth_.cols, q, 0.0);
    (void)x;
    for (int k = 0; k < truth_.rows; ++k)
        for (int l = 0; l < truth_.cols; ++l) out.at(k, l)[truth_.at(k, l)] = hot_;
    return out;
}

} // namespace ura
