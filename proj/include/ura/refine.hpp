#ifndef URA_REFINE_HPP
#define URA_REFINE_HPP

#include <utility>
#include <vector>

#include "ura/denoiser.hpp"
#include "ura/grid.hpp"

namespace ura {

struct RevealSchedule {
    int steps = 12;
    double tau_max = 1.0;
    double tau_min = 1.0;
    bool first_reveal = true;
};

// rho(t) = (1 - cos(pi t / T)) / 2; the mask-ratio conditioning value is
// 1 - rho(t). t outside [0, T] is a domain error.
double cosine_fraction(int t, int steps);

// Cosine annealing from tau_max at t=1 to tau_min at t=T; constant tau_min
// when T = 1.
double infer_temperature(int t, int steps, double tau_max, double tau_min);

// Remask pass length: max(1, floor(T * k_low / K)).
int remask_steps(int steps, int k_low, int k);

// Refinement steps used per per-bin load in the higher-load presets.
int default_steps_for_load(int k);
// Remask threshold schedule per load; empty below K=6.
std::vector<double> default_remask_thresholds(int k);

struct RemaskConfig {
    std::vector<double> thresholds; // strictly descending, each in (0,1)
};
void validate_remask_config(const RemaskConfig& cfg);

/// Reveals masked sites by confidence kappa = max_a softmax(logits/tau).
/// With first=true reveals exactly one site per slot (the most confident
/// masked one) regardless of the target; otherwise reveals highest-kappa
/// sites until the grid's revealed count reaches target_revealed. Revealed
/// values are argmax logits; all ties break by (row, slot) or lowest symbol.
MaskedGrid reveal_step(const MaskedGrid& x, const LogitGrid& logits, int target_revealed,
                       double tau, bool first);

struct RefineTrace {
    std::vector<int> reveal_counts; // per step of the most recent pass
    std::vector<std::pair<int, int>> first_step_sites;
    std::vector<int> pass_first_reveals; // first-step reveal count of every pass run
    std::vector<int> remask_rows_per_stage;
    std::vector<int> remask_steps_per_stage;
};

/// Full pass from the all-mask grid: T reveal steps along the cosine
/// schedule, any residual masks forced to argmax after step T, then one extra
/// forward pass at mask ratio 0 whose per-site argmax is the final grid.
/// Denoiser failures rethrow with the step index attached.
SymbolGrid run_refinement(const Denoiser& den, const EvidenceMatrix& s, const ParityCheckMatrix& h,
                          const RevealSchedule& sched, int k, int l,
                          RefineTrace* trace = nullptr, LogitGrid* final_pass_logits = nullptr);

// Mean of per-token scores across slots, one value per row.
std::vector<double> row_confidence(const std::vector<std::vector<double>>& per_token_scores);

/// Row-confidence source for remasking decisions. The default scorer stands
/// in for a trained quality head: mean per-site max-softmax probability of
/// the final-pass logits.
class ConfidenceScorer {
public:
    virtual ~ConfidenceScorer() = default;
    virtual std::vector<double> score_rows(const SymbolGrid& grid,
                                           const LogitGrid& final_pass_logits) const = 0;
};

class MaxProbScorer : public ConfidenceScorer {
public:
    std::vector<double> score_rows(const SymbolGrid& grid,
                                   const LogitGrid& final_pass_logits) const override;
};

// Test scorer: 1 for rows equal to the matching truth row, 0 otherwise.
class OracleRowScorer : public ConfidenceScorer {
public:
    explicit OracleRowScorer(SymbolGrid truth) : truth_(std::move(truth)) {}
    std::vector<double> score_rows(const SymbolGrid& grid,
                                   const LogitGrid& final_pass_logits) const override;

private:
    SymbolGrid truth_;
};

/// One remask stage: rows with confidence below the threshold are re-masked
/// and re-decoded over remask_steps(...) steps while every other row stays
/// clamped; returns the merged grid (unchanged when no row falls below).
SymbolGrid remask_pass(const SymbolGrid& grid, const std::vector<double>& confidences,
                       double threshold, const Denoiser& den, const EvidenceMatrix& s,
                       const ParityCheckMatrix& h, const RevealSchedule& sched,
                       RefineTrace* trace = nullptr, LogitGrid* final_pass_logits = nullptr);

/// First pass plus up to one remask pass per threshold, re-scoring after each
/// pass and stopping early once every row clears the current threshold.
SymbolGrid run_with_remasking(const Denoiser& den, const ConfidenceScorer& scorer,
                              const EvidenceMatrix& s, const ParityCheckMatrix& h,
                              const RevealSchedule& sched, const RemaskConfig& remask,
                              int k, int l, RefineTrace* trace = nullptr);

} // namespace ura

#endif
