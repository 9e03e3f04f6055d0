#include "ura/refine.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace ura {

double cosine_fraction(int t, int steps) {
    if (steps < 1) throw std::domain_error("cosine_fraction: need T >= 1");
    if (t < 0 || t > steps) throw std::domain_error("cosine_fraction: t outside [0, T]");
    return 0.5 * (1.0 - std::cos(std::numbers::pi * t / steps));
}

double infer_temperature(int t, int steps, double tau_max, double tau_min) {
    if (steps <= 1) return tau_min;
    double w = 0.5 * (1.0 + std::cos(std::numbers::pi * (t - 1) / (steps - 1)));
    return tau_max * w + tau_min * (1.0 - w);
}

int remask_steps(int steps, int k_low, int k) {
    int t = static_cast<int>((static_cast<long long>(steps) * k_low) / k);
    return t < 1 ? 1 : t;
}

int default_steps_for_load(int k) {
    switch (k) {
        case 2: return 12;
        case 3: return 24;
        case 4: return 42;
        case 5: return 60;
        case 6: return 50;
        case 7: return 62;
        case 8: return 74;
        default: return k <= 1 ? 12 : 74;
    }
}

std::vector<double> default_remask_thresholds(int k) {
    if (k == 6) return {0.97};
    if (k == 7) return {0.96, 0.90};
    if (k >= 8) return {0.96, 0.90, 0.85};
    return {};
}

void validate_remask_config(const RemaskConfig& cfg) {
    double prev = 1.0;
    for (double t : cfg.thresholds) {
        if (t <= 0.0 || t >= 1.0)
            throw std::domain_error("remask thresholds must lie in (0,1)");
        if (t >= prev)
            throw std::domain_error("remask thresholds must be strictly descending");
        prev = t;
    }
}

namespace {

int argmax_symbol(const double* logits, int q) {
    int best = 0;
    for (int a = 1; a < q; ++a)
        if (logits[a] > logits[best]) best = a;
    return best;
}

double site_confidence(const double* logits, int q, double tau) {
    double m = logits[0];
    for (int a = 1; a < q; ++a) m = std::max(m, logits[a]);
    double sum = 0.0;
    for (int a = 0; a < q; ++a) sum += std::exp((logits[a] - m) / tau);
    return 1.0 / sum; // exp(0) over the softmax denominator
}

struct SiteScore {
    double kappa;
    int row, col;
};

} // namespace

MaskedGrid reveal_step(const MaskedGrid& x, const LogitGrid& logits, int target_revealed,
                       double tau, bool first) {
    if (tau <= 0.0) throw std::domain_error("reveal_step: tau must be positive");
    MaskedGrid out = x;
    const int q = logits.q;

    if (first) {
        for (int l = 0; l < x.cols; ++l) {
            int best_row = -1;
            double best_kappa = 0.0;
            for (int k = 0; k < x.rows; ++k) {
                if (x.at(k, l) != kMaskToken) continue;
                double kap = site_confidence(logits.at(k, l), q, tau);
                if (best_row < 0 || kap > best_kappa) {
                    best_row = k;
                    best_kappa = kap;
                }
            }
            if (best_row >= 0)
                out.at(best_row, l) = argmax_symbol(logits.at(best_row, l), q);
        }
        return out;
    }

    int revealed = x.rows * x.cols - x.masked_count();
    if (revealed >= target_revealed) return out;

    std::vector<SiteScore> sites;
    for (int k = 0; k < x.rows; ++k)
        for (int l = 0; l < x.cols; ++l)
            if (x.at(k, l) == kMaskToken)
                sites.push_back({site_confidence(logits.at(k, l), q, tau), k, l});
    std::sort(sites.begin(), sites.end(), [](const SiteScore& a, const SiteScore& b) {
        if (a.kappa != b.kappa) return a.kappa > b.kappa;
        if (a.row != b.row) return a.row < b.row;
        return a.col < b.col;
    });

    for (const SiteScore& s : sites) {
        if (revealed >= target_revealed) break;
        out.at(s.row, s.col) = argmax_symbol(logits.at(s.row, s.col), q);
        ++revealed;
    }
    return out;
}

namespace {

// Shared engine: runs a reveal loop from an arbitrary start grid. Only rows
// flagged updatable are written by the final argmax pass; masked sites can
// only exist in updatable rows by construction of the callers.
SymbolGrid run_masked_loop(const Denoiser& den, const EvidenceMatrix& s,
                           const ParityCheckMatrix& h, const RevealSchedule& sched,
                           MaskedGrid x, const std::vector<char>& updatable_row,
                           RefineTrace* trace, LogitGrid* final_pass_logits) {
    if (sched.steps < 1) throw std::domain_error("run_refinement: need T >= 1");
    if (sched.tau_min <= 0.0 || sched.tau_max < sched.tau_min)
        throw std::domain_error("run_refinement: need tau_max >= tau_min > 0");

    const int total = x.rows * x.cols;
    const int initially_masked = x.masked_count();
    const int base_revealed = total - initially_masked;
    if (trace) trace->reveal_counts.clear();

    LogitGrid logits;
    for (int t = 1; t <= sched.steps; ++t) {
        double gamma = 1.0 - cosine_fraction(t, sched.steps);
        try {
            logits = den.logits(x, s, h, gamma);
        } catch (const std::exception& e) {
            throw std::runtime_error("denoiser failed at step " + std::to_string(t) + ": " + e.what());
        }
        double tau = infer_temperature(t, sched.steps, sched.tau_max, sched.tau_min);
        int target = base_revealed +
                     static_cast<int>(std::lround(cosine_fraction(t, sched.steps) * initially_masked));
        bool first = (t == 1) && sched.first_reveal;
        int before = x.masked_count();
        MaskedGrid next = reveal_step(x, logits, target, tau, first);
        if (trace) {
            trace->reveal_counts.push_back(before - next.masked_count());
            if (t == 1) {
                trace->pass_first_reveals.push_back(before - next.masked_count());
                trace->first_step_sites.clear();
                for (int k = 0; k < x.rows; ++k)
                    for (int l = 0; l < x.cols; ++l)
                        if (x.at(k, l) == kMaskToken && next.at(k, l) != kMaskToken)
                            trace->first_step_sites.emplace_back(k, l);
            }
        }
        x = std::move(next);
    }

    // Residual masks (rounding slack) forced to the last step's argmax.
    for (int k = 0; k < x.rows; ++k)
        for (int l = 0; l < x.cols; ++l)
            if (x.at(k, l) == kMaskToken) x.at(k, l) = argmax_symbol(logits.at(k, l), logits.q);

    LogitGrid final_logits_local;
    try {
        final_logits_local = den.logits(x, s, h, 0.0);
    } catch (const std::exception& e) {
        throw std::runtime_error(std::string("denoiser failed at the final pass: ") + e.what());
    }

    SymbolGrid out = x;
    for (int k = 0; k < x.rows; ++k) {
        if (!updatable_row[k]) continue;
        for (int l = 0; l < x.cols; ++l)
            out.at(k, l) = argmax_symbol(final_logits_local.at(k, l), final_logits_local.q);
    }
    if (final_pass_logits) *final_pass_logits = std::move(final_logits_local);
    return out;
}

} // namespace

SymbolGrid run_refinement(const Denoiser& den, const EvidenceMatrix& s, const ParityCheckMatrix& h,
                          const RevealSchedule& sched, int k, int l,
                          RefineTrace* trace, LogitGrid* final_pass_logits) {
    std::vector<char> updatable(k, 1);
    return run_masked_loop(den, s, h, sched, all_masked_grid(k, l), updatable, trace,
                           final_pass_logits);
}

std::vector<double> row_confidence(const std::vector<std::vector<double>>& per_token_scores) {
    std::vector<double> out;
    out.reserve(per_token_scores.size());
    for (const auto& row : per_token_scores) {
        double sum = 0.0;
        for (double x : row) sum += x;
        out.push_back(row.empty() ? 0.0 : sum / row.size());
    }
    return out;
}

std::vector<double> MaxProbScorer::score_rows(const SymbolGrid& grid,
                                              const LogitGrid& final_pass_logits) const {
    std::vector<std::vector<double>> scores(grid.rows, std::vector<double>(grid.cols));
    for (int k = 0; k < grid.rows; ++k)
        for (int l = 0; l < grid.cols; ++l)
            scores[k][l] = site_confidence(final_pass_logits.at(k, l), final_pass_logits.q, 1.0);
    return row_confidence(scores);
}

std::vector<double> OracleRowScorer::score_rows(const SymbolGrid& grid,
                                                const LogitGrid& /*final_pass_logits*/) const {
    std::vector<double> out(grid.rows, 0.0);
    for (int k = 0; k < grid.rows; ++k) {
        bool ok = true;
        for (int l = 0; l < grid.cols; ++l) ok = ok && grid.at(k, l) == truth_.at(k, l);
        out[k] = ok ? 1.0 : 0.0;
    }
    return out;
}

SymbolGrid remask_pass(const SymbolGrid& grid, const std::vector<double>& confidences,
                       double threshold, const Denoiser& den, const EvidenceMatrix& s,
                       const ParityCheckMatrix& h, const RevealSchedule& sched,
                       RefineTrace* trace, LogitGrid* final_pass_logits) {
    if (static_cast<int>(confidences.size()) != grid.rows)
        throw std::domain_error("remask_pass: one confidence per row required");

    std::vector<char> low(grid.rows, 0);
    int n_low = 0;
    for (int k = 0; k < grid.rows; ++k) {
        if (confidences[k] < threshold) {
            low[k] = 1;
            ++n_low;
        }
    }
    if (n_low == 0) return grid;

    MaskedGrid x0 = grid;
    for (int k = 0; k < grid.rows; ++k)
        if (low[k])
            for (int l = 0; l < grid.cols; ++l) x0.at(k, l) = kMaskToken;

    RevealSchedule rm = sched;
    rm.steps = remask_steps(sched.steps, n_low, grid.rows);
    if (trace) {
        trace->remask_rows_per_stage.push_back(n_low);
        trace->remask_steps_per_stage.push_back(rm.steps);
    }

    SymbolGrid redone = run_masked_loop(den, s, h, rm, std::move(x0), low, trace, final_pass_logits);

    // Clamped rows stay bit-identical no matter what the engine produced.
    SymbolGrid merged = grid;
    for (int k = 0; k < grid.rows; ++k)
        if (low[k])
            for (int l = 0; l < grid.cols; ++l) merged.at(k, l) = redone.at(k, l);
    return merged;
}

SymbolGrid run_with_remasking(const Denoiser& den, const ConfidenceScorer& scorer,
                              const EvidenceMatrix& s, const ParityCheckMatrix& h,
                              const RevealSchedule& sched, const RemaskConfig& remask,
                              int k, int l, RefineTrace* trace) {
    validate_remask_config(remask);
    LogitGrid final_logits;
    SymbolGrid grid = run_refinement(den, s, h, sched, k, l, trace, &final_logits);
    for (double threshold : remask.thresholds) {
        auto conf = scorer.score_rows(grid, final_logits);
        bool any_low = std::any_of(conf.begin(), conf.end(),
                                   [&](double c) { return c < threshold; });
        if (!any_low) break;
        grid = remask_pass(grid, conf, threshold, den, s, h, sched, trace, &final_logits);
    }
    return grid;
}

} // namespace ura
