#ifndef URA_BP_HPP
#define URA_BP_HPP

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "ura/amp.hpp"
#include "ura/gf.hpp"
#include "ura/grid.hpp"
#include "ura/ldpc.hpp"

namespace ura {

enum class CheckBackend { direct, wht };

struct BpConfig {
    int max_iters = 50;
    CheckBackend backend = CheckBackend::wht;
    double message_floor = 1e-30;
    bool early_exit = true;
};

/// Per-edge message state: variable-to-check and check-to-variable
/// distributions over [Q], plus the per-slot beliefs of the last iteration.
/// One decode owns its state exclusively.
struct BeliefState {
    std::vector<std::vector<double>> v2c;
    std::vector<std::vector<double>> c2v;
    std::vector<std::vector<double>> beliefs;
};

// Per-slot softmax of evidence rows.
std::vector<std::vector<double>> slot_beliefs(const EvidenceMatrix& s);

// Unnormalized fast Walsh-Hadamard butterfly; iwht divides by the length.
// Length must be a power of two.
void wht_inplace(std::vector<double>& v);
std::vector<double> wht(std::vector<double> v);
std::vector<double> iwht(std::vector<double> v);

/// One check-to-variable message by exact marginalization of the parity
/// constraint: coefficient-normalize the extrinsic inputs, fold their
/// XOR-convolutions pairwise (O(Q^2) per pair), undo the target coefficient,
/// renormalize.
std::vector<double> check_update_direct(const GfContext& gf,
                                        const std::vector<std::vector<double>>& incoming,
                                        const std::vector<int>& incoming_coeffs,
                                        int target_coeff);

/// Same message through the transform domain: pointwise products of WHTs.
/// Negative round-off is clamped to zero before renormalization; agrees with
/// the direct update to 1e-8.
std::vector<double> check_update_wht(const GfContext& gf,
                                     const std::vector<std::vector<double>>& incoming,
                                     const std::vector<int>& incoming_coeffs,
                                     int target_coeff);

struct BpResult {
    std::vector<int> hard;
    std::vector<std::vector<double>> marginals;
    bool converged = false;
    int iters_used = 0;
};

/// Flooding-schedule joint BP. The variable update multiplies the local
/// belief with extrinsic check messages, floors every entry at message_floor
/// and renormalizes; the hard decision is the slot-wise argmax with ties to
/// the lowest symbol index. converged means the hard decision had zero
/// syndrome before the iteration cap. Non-convergence is reported, never
/// raised.
BpResult bp_decode(const std::vector<std::vector<double>>& lambda, const GfContext& gf,
                   const ParityCheckMatrix& h, const BpConfig& cfg,
                   BeliefState* final_state = nullptr);

struct SicStageStats {
    bool converged = false;
    int iters_used = 0;
};

struct SicResult {
    SymbolGrid grid; // rows in decode order
    std::vector<SicStageStats> stages;
};

/// Successive cancellation wrapper: decode one row with BP, reset the decoded
/// symbol's residual evidence in every slot to cancel_value, repeat K times.
/// Parity-invalid rows are still emitted.
///
/// The default cancel_value (NaN sentinel) resolves to log(K/Q), the activity
/// prior: one decoded user explains the observed activity, so the canceled
/// coordinate drops back to prior odds for the remaining users. Flooring it
/// to the evidence floor instead destroys collision slots outright (a shared
/// symbol becomes ~e^37 less likely than detector false alarms), which makes
/// every colliding frame undecodable for the second user.
SicResult sic_decode(const EvidenceMatrix& s, const GfContext& gf, const ParityCheckMatrix& h,
                     int k, const BpConfig& cfg,
                     double cancel_value = std::numeric_limits<double>::quiet_NaN());

class TopJBudgetError : public std::runtime_error {
public:
    TopJBudgetError(double estimated_candidates, std::uint64_t budget);
    double estimated_candidates = 0.0;
    std::uint64_t budget = 0;
};

struct TopJResult {
    SymbolGrid grid;
    int valid_found = 0; // parity-valid candidates among the K returned rows
};

constexpr std::uint64_t kDefaultTopJBudget = 1ull << 21;

/// Exhaustive search over per-slot top-J candidates: keep parity-valid
/// sequences, score each by the summed evidence of its symbols, return the K
/// best (ties lexicographic), padding with the best invalid candidates when
/// fewer than K are valid. Refuses with a candidate-count estimate when J^L
/// exceeds the budget.
TopJResult topj_decode(const EvidenceMatrix& s, const GfContext& gf, const ParityCheckMatrix& h,
                       int k, int j, std::uint64_t budget = kDefaultTopJBudget);

} // namespace ura

#endif
