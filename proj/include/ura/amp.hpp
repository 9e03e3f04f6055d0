#ifndef URA_AMP_HPP
#define URA_AMP_HPP

#include <complex>
#include <vector>

#include "ura/grid.hpp"
#include "ura/sim.hpp"

namespace ura {

constexpr double kDefaultEvidenceFloor = -40.0; // natural log

struct AmpConfig {
    int iters = 20;
    double rho_bg = 0.03125; // activity prior
    double sigma_u2 = 20.0;  // active-component variance
    double evidence_floor = kDefaultEvidenceFloor;
};

// rho_bg = K/Q, sigma_u2 = P_sym; both stay exposed as knobs.
AmpConfig default_amp_config(const FrameConfig& cfg);

/// Posterior activity probability of the Bernoulli-Gaussian scalar channel,
/// evaluated in the log domain for stability. nu must be positive.
double bg_posterior(cplx r, double nu, const AmpConfig& cfg);
double log_bg_posterior(cplx r, double nu, const AmpConfig& cfg);

struct MmseOut {
    cplx mean{0.0, 0.0};
    double divergence = 0.0; // Wirtinger sensitivity of the mean
};

MmseOut mmse_denoise(cplx r, double nu, const AmpConfig& cfg);

struct AmpOutput {
    std::vector<cplx> pseudo; // final pseudo-observation, length Q
    double nu = 0.0;          // matching effective-variance estimate
};

/// AMP iterations with the Onsager-corrected residual update. The effective
/// variance is re-estimated as |residual|^2 / n_s every iteration (floored at
/// 1e-12). Throws std::runtime_error naming the iteration on non-finite
/// intermediates.
AmpOutput amp_detect(const std::vector<cplx>& y, const SensingMatrix& a, const AmpConfig& cfg);

// S_{l,a} = log p_hat(R_a; nu), floored at cfg.evidence_floor.
std::vector<double> evidence_row(const std::vector<cplx>& pseudo, double nu, const AmpConfig& cfg);

// Runs the detector on every slot of a frame.
EvidenceMatrix detect_frame(const std::vector<std::vector<cplx>>& observations,
                            const std::vector<SensingMatrix>& dicts, const AmpConfig& cfg);

} // namespace ura

#endif
