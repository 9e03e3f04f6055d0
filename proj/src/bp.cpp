#include "ura/bp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ura {

namespace {

void normalize_or_uniform(std::vector<double>& v) {
    double s = std::accumulate(v.begin(), v.end(), 0.0);
    if (s > 0.0) {
        double inv = 1.0 / s;
        for (double& x : v) x *= inv;
    } else {
        std::fill(v.begin(), v.end(), 1.0 / v.size());
    }
}

std::vector<double> xor_convolve(const std::vector<double>& u, const std::vector<double>& v) {
    const int q = static_cast<int>(u.size());
    std::vector<double> out(q, 0.0);
    for (int a = 0; a < q; ++a) {
        if (u[a] == 0.0) continue;
        const double ua = u[a];
        for (int b = 0; b < q; ++b) out[a ^ b] += ua * v[b];
    }
    return out;
}

// to_y[a] = coeff * a. Scatter turns a message over c into one over y = coeff*c;
// gather is the inverse direction.
std::vector<int> coeff_map(const GfContext& gf, int coeff) {
    std::vector<int> m(gf.q());
    for (int a = 0; a < gf.q(); ++a) m[a] = gf.mul(coeff, a);
    return m;
}

std::vector<double> scatter_by(const std::vector<double>& msg, const std::vector<int>& to_y) {
    std::vector<double> out(msg.size());
    for (size_t a = 0; a < msg.size(); ++a) out[to_y[a]] = msg[a];
    return out;
}

std::vector<double> gather_by(const std::vector<double>& msg, const std::vector<int>& to_y) {
    std::vector<double> out(msg.size());
    for (size_t a = 0; a < msg.size(); ++a) out[a] = msg[to_y[a]];
    return out;
}

int argmax_lowest(const std::vector<double>& v) {
    int best = 0;
    for (int i = 1; i < static_cast<int>(v.size()); ++i)
        if (v[i] > v[best]) best = i;
    return best;
}

} // namespace

std::vector<std::vector<double>> slot_beliefs(const EvidenceMatrix& s) {
    std::vector<std::vector<double>> lambda(s.slots, std::vector<double>(s.q));
    for (int l = 0; l < s.slots; ++l) {
        const double* row = s.row(l);
        double hi = row[0];
        for (int a = 1; a < s.q; ++a) hi = std::max(hi, row[a]);
        double sum = 0.0;
        for (int a = 0; a < s.q; ++a) {
            lambda[l][a] = std::exp(row[a] - hi);
            sum += lambda[l][a];
        }
        double inv = 1.0 / sum;
        for (int a = 0; a < s.q; ++a) lambda[l][a] *= inv;
    }
    return lambda;
}

void wht_inplace(std::vector<double>& v) {
    const size_t n = v.size();
    if (n == 0 || (n & (n - 1)) != 0)
        throw std::domain_error("wht: length must be a power of two");
    for (size_t len = 1; len < n; len <<= 1) {
        for (size_t i = 0; i < n; i += len << 1) {
            for (size_t j = i; j < i + len; ++j) {
                double a = v[j];
                double b = v[j + len];
                v[j] = a + b;
                v[j + len] = a - b;
            }
        }
    }
}

std::vector<double> wht(std::vector<double> v) {
    wht_inplace(v);
    return v;
}

std::vector<double> iwht(std::vector<double> v) {
    wht_inplace(v);
    const double inv = 1.0 / v.size();
    for (double& x : v) x *= inv;
    return v;
}

std::vector<double> check_update_direct(const GfContext& gf,
                                        const std::vector<std::vector<double>>& incoming,
                                        const std::vector<int>& incoming_coeffs,
                                        int target_coeff) {
    const int q = gf.q();
    // XOR-sum distribution of the coefficient-normalized extrinsic inputs.
    std::vector<double> acc(q, 0.0);
    acc[0] = 1.0;
    for (size_t i = 0; i < incoming.size(); ++i) {
        auto y = scatter_by(incoming[i], coeff_map(gf, incoming_coeffs[i]));
        acc = xor_convolve(acc, y);
    }
    // Parity demands target_coeff * c = sum of the others (characteristic 2).
    auto out = gather_by(acc, coeff_map(gf, target_coeff));
    normalize_or_uniform(out);
    return out;
}

namespace {
void wht_inplace_ld(long double* v, int n);
}

std::vector<double> check_update_wht(const GfContext& gf,
                                     const std::vector<std::vector<double>>& incoming,
                                     const std::vector<int>& incoming_coeffs,
                                     int target_coeff) {
    const int q = gf.q();
    std::vector<long double> acc(q, 1.0L); // WHT of the delta at 0
    std::vector<long double> y(q);
    for (size_t i = 0; i < incoming.size(); ++i) {
        auto map = coeff_map(gf, incoming_coeffs[i]);
        std::fill(y.begin(), y.end(), 0.0L);
        for (int a = 0; a < q; ++a) y[map[a]] = incoming[i][a];
        wht_inplace_ld(y.data(), q);
        for (int a = 0; a < q; ++a) acc[a] *= y[a];
    }
    wht_inplace_ld(acc.data(), q);
    auto map = coeff_map(gf, target_coeff);
    std::vector<double> out(q);
    const long double scale = 1.0L / q;
    for (int a = 0; a < q; ++a) out[a] = std::max(static_cast<double>(acc[map[a]] * scale), 0.0);
    normalize_or_uniform(out);
    return out;
}

namespace {

// Shared per-decode scratch for the all-outputs check update.
struct CheckScratch {
    std::vector<std::vector<double>> permuted;
    std::vector<std::vector<double>> prefix;
    std::vector<std::vector<double>> suffix;
};

// Fills c2v for every edge of check j from the current v2c messages.
void update_check_direct(const GfContext& gf, const ParityCheckMatrix& h,
                         const std::vector<std::vector<int>>& edge_maps, int j,
                         BeliefState& st, CheckScratch& scr) {
    const auto& edges = h.check_edges(j);
    const int d = static_cast<int>(edges.size());
    const int q = gf.q();

    scr.permuted.resize(d);
    for (int i = 0; i < d; ++i)
        scr.permuted[i] = scatter_by(st.v2c[edges[i]], edge_maps[edges[i]]);

    scr.prefix.assign(d + 1, {});
    scr.suffix.assign(d + 1, {});
    scr.prefix[0].assign(q, 0.0);
    scr.prefix[0][0] = 1.0;
    for (int i = 1; i <= d; ++i) scr.prefix[i] = xor_convolve(scr.prefix[i - 1], scr.permuted[i - 1]);
    scr.suffix[d].assign(q, 0.0);
    scr.suffix[d][0] = 1.0;
    for (int i = d - 1; i >= 0; --i) scr.suffix[i] = xor_convolve(scr.permuted[i], scr.suffix[i + 1]);

    for (int i = 0; i < d; ++i) {
        auto conv = xor_convolve(scr.prefix[i], scr.suffix[i + 1]);
        auto& out = st.c2v[edges[i]];
        const auto& map = edge_maps[edges[i]];
        for (int a = 0; a < q; ++a) out[a] = conv[map[a]];
        normalize_or_uniform(out);
    }
}

// Extended-precision spectral pipeline. The transform reconstructs small
// probabilities by cancellation of O(1) terms, so the spectra need more than
// double precision end to end; truncating anywhere in the middle leaves
// round-off that amplifies over long BP transients until the two backends'
// marginals visibly disagree.
void wht_inplace_ld(long double* v, int n) {
    for (int len = 1; len < n; len <<= 1) {
        for (int i = 0; i < n; i += len << 1) {
            for (int j = i; j < i + len; ++j) {
                long double a = v[j];
                long double b = v[j + len];
                v[j] = a + b;
                v[j + len] = a - b;
            }
        }
    }
}

// Flat reusable buffers; one row of q entries per neighbor.
struct CheckScratchWht {
    std::vector<long double> permuted, prefix, suffix, spec;

    void ensure(int d, int q) {
        if (static_cast<int>(permuted.size()) < d * q) {
            permuted.resize(static_cast<size_t>(d) * q);
            prefix.resize(static_cast<size_t>(d + 1) * q);
            suffix.resize(static_cast<size_t>(d + 1) * q);
            spec.resize(q);
        }
    }
};

void update_check_wht(const GfContext& gf, const ParityCheckMatrix& h,
                      const std::vector<std::vector<int>>& edge_maps, int j,
                      BeliefState& st, CheckScratchWht& scr) {
    const auto& edges = h.check_edges(j);
    const int d = static_cast<int>(edges.size());
    const int q = gf.q();
    scr.ensure(d, q);

    for (int i = 0; i < d; ++i) {
        const auto& msg = st.v2c[edges[i]];
        const auto& map = edge_maps[edges[i]];
        long double* y = scr.permuted.data() + static_cast<size_t>(i) * q;
        for (int a = 0; a < q; ++a) y[map[a]] = msg[a];
        wht_inplace_ld(y, q);
    }

    long double* pre = scr.prefix.data();
    long double* suf = scr.suffix.data();
    for (int a = 0; a < q; ++a) pre[a] = 1.0L;
    for (int i = 1; i <= d; ++i) {
        const long double* src = pre + static_cast<size_t>(i - 1) * q;
        const long double* y = scr.permuted.data() + static_cast<size_t>(i - 1) * q;
        long double* dst = pre + static_cast<size_t>(i) * q;
        for (int a = 0; a < q; ++a) dst[a] = src[a] * y[a];
    }
    long double* suf_last = suf + static_cast<size_t>(d) * q;
    for (int a = 0; a < q; ++a) suf_last[a] = 1.0L;
    for (int i = d - 1; i >= 0; --i) {
        const long double* src = suf + static_cast<size_t>(i + 1) * q;
        const long double* y = scr.permuted.data() + static_cast<size_t>(i) * q;
        long double* dst = suf + static_cast<size_t>(i) * q;
        for (int a = 0; a < q; ++a) dst[a] = src[a] * y[a];
    }

    long double* spec = scr.spec.data();
    const long double scale = 1.0L / q;
    for (int i = 0; i < d; ++i) {
        const long double* pi = pre + static_cast<size_t>(i) * q;
        const long double* si = suf + static_cast<size_t>(i + 1) * q;
        for (int a = 0; a < q; ++a) spec[a] = pi[a] * si[a];
        wht_inplace_ld(spec, q);
        auto& out = st.c2v[edges[i]];
        const auto& map = edge_maps[edges[i]];
        for (int a = 0; a < q; ++a)
            out[a] = std::max(static_cast<double>(spec[map[a]] * scale), 0.0);
        normalize_or_uniform(out);
    }
}

} // namespace

BpResult bp_decode(const std::vector<std::vector<double>>& lambda, const GfContext& gf,
                   const ParityCheckMatrix& h, const BpConfig& cfg, BeliefState* final_state) {
    if (static_cast<int>(lambda.size()) != h.slots())
        throw std::domain_error("bp_decode: belief count must equal slot count");
    if (cfg.max_iters < 1) throw std::domain_error("bp_decode: need max_iters >= 1");
    if (cfg.message_floor <= 0.0) throw std::domain_error("bp_decode: message_floor must be positive");
    const int q = gf.q();
    const int n_edges = h.edge_count();

    std::vector<std::vector<int>> edge_maps(n_edges);
    for (int e = 0; e < n_edges; ++e) edge_maps[e] = coeff_map(gf, h.edge(e).coeff);

    BeliefState st;
    st.v2c.assign(n_edges, {});
    st.c2v.assign(n_edges, std::vector<double>(q, 1.0 / q));
    st.beliefs.assign(h.slots(), std::vector<double>(q));
    for (int e = 0; e < n_edges; ++e) st.v2c[e] = lambda[h.edge(e).slot];

    BpResult res;
    res.hard.assign(h.slots(), 0);

    CheckScratch scr;
    CheckScratchWht scr_wht;
    std::vector<std::vector<double>> pre, suf;
    for (int iter = 1; iter <= cfg.max_iters; ++iter) {
        res.iters_used = iter;
        for (int j = 0; j < h.checks(); ++j) {
            if (cfg.backend == CheckBackend::direct)
                update_check_direct(gf, h, edge_maps, j, st, scr);
            else
                update_check_wht(gf, h, edge_maps, j, st, scr_wht);
        }

        for (int l = 0; l < h.slots(); ++l) {
            auto& b = st.beliefs[l];
            b = lambda[l];
            for (int e : h.slot_edges(l))
                for (int a = 0; a < q; ++a) b[a] *= st.c2v[e][a];
            normalize_or_uniform(b);
            res.hard[l] = argmax_lowest(b);
        }

        auto syn = h.syndrome(gf, res.hard);
        res.converged = std::all_of(syn.begin(), syn.end(), [](int x) { return x == 0; });
        if (res.converged && cfg.early_exit) break;
        if (iter == cfg.max_iters) break;

        // Variable update with extrinsic prefix/suffix products per slot.
        for (int l = 0; l < h.slots(); ++l) {
            const auto& edges = h.slot_edges(l);
            const int d = static_cast<int>(edges.size());
            if (d == 0) continue;
            pre.assign(d + 1, {});
            suf.assign(d + 1, {});
            pre[0] = lambda[l];
            for (int i = 1; i <= d; ++i) {
                pre[i] = pre[i - 1];
                const auto& m = st.c2v[edges[i - 1]];
                for (int a = 0; a < q; ++a) pre[i][a] *= m[a];
            }
            suf[d].assign(q, 1.0);
            for (int i = d - 1; i >= 0; --i) {
                suf[i] = suf[i + 1];
                const auto& m = st.c2v[edges[i]];
                for (int a = 0; a < q; ++a) suf[i][a] *= m[a];
            }
            for (int i = 0; i < d; ++i) {
                auto& out = st.v2c[edges[i]];
                for (int a = 0; a < q; ++a) {
                    double x = pre[i][a] * suf[i + 1][a];
                    out[a] = x < cfg.message_floor ? cfg.message_floor : x;
                }
                normalize_or_uniform(out);
            }
        }
    }

    res.marginals = st.beliefs;
    if (final_state) *final_state = std::move(st);
    return res;
}

SicResult sic_decode(const EvidenceMatrix& s, const GfContext& gf, const ParityCheckMatrix& h,
                     int k, const BpConfig& cfg, double cancel_value) {
    if (k < 1) throw std::domain_error("sic_decode: need K >= 1");
    if (std::isnan(cancel_value))
        cancel_value = std::log(static_cast<double>(k) / s.q);
    SicResult out;
    out.grid = SymbolGrid(k, s.slots);
    EvidenceMatrix residual = s;
    for (int stage = 0; stage < k; ++stage) {
        auto lambda = slot_beliefs(residual);
        BpResult r = bp_decode(lambda, gf, h, cfg);
        for (int l = 0; l < s.slots; ++l) {
            out.grid.at(stage, l) = r.hard[l];
            residual.at(l, r.hard[l]) = cancel_value;
        }
        out.stages.push_back({r.converged, r.iters_used});
    }
    return out;
}

TopJBudgetError::TopJBudgetError(double estimated, std::uint64_t b)
    : std::runtime_error("topj_decode: estimated " + std::to_string(estimated) +
                         " candidates exceed the enumeration budget of " + std::to_string(b)),
      estimated_candidates(estimated), budget(b) {}

TopJResult topj_decode(const EvidenceMatrix& s, const GfContext& gf, const ParityCheckMatrix& h,
                       int k, int j, std::uint64_t budget) {
    if (k < 1) throw std::domain_error("topj_decode: need K >= 1");
    if (j < 1) throw std::domain_error("topj_decode: need J >= 1");
    const int slots = s.slots;
    const int j_eff = std::min(j, s.q);

    double estimate = std::pow(static_cast<double>(j_eff), slots);
    if (estimate > static_cast<double>(budget)) throw TopJBudgetError(estimate, budget);
    const std::uint64_t total = static_cast<std::uint64_t>(estimate + 0.5);

    // Per-slot top-J symbols, highest evidence first, ties to the lower index.
    std::vector<std::vector<int>> shortlist(slots);
    for (int l = 0; l < slots; ++l) {
        std::vector<int> idx(s.q);
        std::iota(idx.begin(), idx.end(), 0);
        std::stable_sort(idx.begin(), idx.end(),
                         [&](int a, int b) { return s.at(l, a) > s.at(l, b); });
        shortlist[l].assign(idx.begin(), idx.begin() + j_eff);
    }

    struct Candidate {
        double score;
        std::vector<int> seq;
    };
    auto better = [](const Candidate& a, const Candidate& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.seq < b.seq;
    };
    auto push_topk = [&](std::vector<Candidate>& heap, Candidate c) {
        auto pos = std::lower_bound(heap.begin(), heap.end(), c, better);
        if (pos == heap.end() && static_cast<int>(heap.size()) >= k) return;
        heap.insert(pos, std::move(c));
        if (static_cast<int>(heap.size()) > k) heap.pop_back();
    };

    std::vector<Candidate> valid, invalid;
    std::vector<int> digits(slots, 0);
    std::vector<int> seq(slots);
    std::vector<int> syn(h.checks());
    for (std::uint64_t n = 0; n < total; ++n) {
        double score = 0.0;
        for (int l = 0; l < slots; ++l) {
            seq[l] = shortlist[l][digits[l]];
            score += s.at(l, seq[l]);
        }
        std::fill(syn.begin(), syn.end(), 0);
        for (const ParityEdge& e : h.entries()) syn[e.check] ^= gf.mul(e.coeff, seq[e.slot]);
        bool ok = std::all_of(syn.begin(), syn.end(), [](int x) { return x == 0; });
        push_topk(ok ? valid : invalid, Candidate{score, seq});

        for (int l = slots - 1; l >= 0; --l) {
            if (++digits[l] < j_eff) break;
            digits[l] = 0;
        }
    }

    if (static_cast<int>(valid.size() + invalid.size()) < k)
        throw std::domain_error("topj_decode: fewer candidates than K");

    TopJResult res;
    res.grid = SymbolGrid(k, slots);
    res.valid_found = std::min<int>(k, static_cast<int>(valid.size()));
    for (int r = 0; r < k; ++r) {
        const auto& c = r < static_cast<int>(valid.size()) ? valid[r]
                                                           : invalid[r - valid.size()];
        for (int l = 0; l < slots; ++l) res.grid.at(r, l) = c.seq[l];
    }
    return res;
}

} // namespace ura
