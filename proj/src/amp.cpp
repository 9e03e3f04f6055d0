#include "ura/amp.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace ura {

namespace {

constexpr double kNuFloor = 1e-12;

// log( exp(a) + exp(b) ) without overflow.
double log_sum_exp(double a, double b) {
    double hi = a > b ? a : b;
    double lo = a > b ? b : a;
    return hi + std::log1p(std::exp(lo - hi));
}

void check_cfg(double nu, const AmpConfig& cfg) {
    if (nu <= 0.0) throw std::domain_error("amp: effective variance must be positive");
    if (cfg.rho_bg <= 0.0 || cfg.rho_bg >= 1.0)
        throw std::domain_error("amp: rho_bg must lie in (0,1)");
    if (cfg.sigma_u2 <= 0.0) throw std::domain_error("amp: sigma_u2 must be positive");
}

} // namespace

AmpConfig default_amp_config(const FrameConfig& cfg) {
    AmpConfig a;
    a.iters = 20;
    a.rho_bg = static_cast<double>(cfg.k) / cfg.q;
    a.sigma_u2 = cfg.p_sym();
    a.evidence_floor = kDefaultEvidenceFloor;
    return a;
}

double log_bg_posterior(cplx r, double nu, const AmpConfig& cfg) {
    check_cfg(nu, cfg);
    const double r2 = std::norm(r);
    const double v1 = nu + cfg.sigma_u2;
    // Circular complex Gaussian densities, log domain.
    const double log_active = std::log(cfg.rho_bg) - std::log(v1) - r2 / v1;
    const double log_inactive = std::log1p(-cfg.rho_bg) - std::log(nu) - r2 / nu;
    return log_active - log_sum_exp(log_active, log_inactive);
}

double bg_posterior(cplx r, double nu, const AmpConfig& cfg) {
    return std::exp(log_bg_posterior(r, nu, cfg));
}

MmseOut mmse_denoise(cplx r, double nu, const AmpConfig& cfg) {
    check_cfg(nu, cfg);
    const double gain = cfg.sigma_u2 / (nu + cfg.sigma_u2);
    const double delta = cfg.sigma_u2 / (nu * (nu + cfg.sigma_u2));
    const double p = bg_posterior(r, nu, cfg);
    MmseOut out;
    out.mean = p * gain * r;
    out.divergence = gain * (p + std::norm(r) * p * (1.0 - p) * delta);
    return out;
}

AmpOutput amp_detect(const std::vector<cplx>& y, const SensingMatrix& a, const AmpConfig& cfg) {
    if (static_cast<int>(y.size()) != a.n_s)
        throw std::domain_error("amp_detect: observation length mismatch");
    if (cfg.iters < 1) throw std::domain_error("amp_detect: need at least one iteration");

    const int q = a.q;
    const int n_s = a.n_s;
    std::vector<cplx> u(q, cplx(0.0, 0.0));
    std::vector<cplx> resid = y;
    std::vector<cplx> pseudo(q);

    auto residual_nu = [&](const std::vector<cplx>& res) {
        double e = 0.0;
        for (const cplx& x : res) e += std::norm(x);
        double nu = e / n_s;
        return nu < kNuFloor ? kNuFloor : nu;
    };

    for (int it = 0; it < cfg.iters; ++it) {
        const double nu = residual_nu(resid);
        // pseudo = u + A^H resid
        for (int col = 0; col < q; ++col) {
            const cplx* ac = a.col(col);
            cplx acc(0.0, 0.0);
            for (int r = 0; r < n_s; ++r) acc += std::conj(ac[r]) * resid[r];
            pseudo[col] = u[col] + acc;
        }
        double div_sum = 0.0;
        for (int col = 0; col < q; ++col) {
            MmseOut d = mmse_denoise(pseudo[col], nu, cfg);
            u[col] = d.mean;
            div_sum += d.divergence;
        }
        // Onsager-corrected residual.
        std::vector<cplx> next = y;
        for (int col = 0; col < q; ++col) {
            if (u[col] == cplx(0.0, 0.0)) continue;
            const cplx* ac = a.col(col);
            for (int r = 0; r < n_s; ++r) next[r] -= u[col] * ac[r];
        }
        const double onsager = div_sum / n_s;
        for (int r = 0; r < n_s; ++r) next[r] += resid[r] * onsager;
        resid.swap(next);

        for (int r = 0; r < n_s; ++r) {
            if (!std::isfinite(resid[r].real()) || !std::isfinite(resid[r].imag()))
                throw std::runtime_error("amp_detect: non-finite residual at iteration " +
                                         std::to_string(it));
        }
    }

    AmpOutput out;
    out.nu = residual_nu(resid);
    out.pseudo.resize(q);
    for (int col = 0; col < q; ++col) {
        const cplx* ac = a.col(col);
        cplx acc(0.0, 0.0);
        for (int r = 0; r < n_s; ++r) acc += std::conj(ac[r]) * resid[r];
        out.pseudo[col] = u[col] + acc;
    }
    return out;
}

std::vector<double> evidence_row(const std::vector<cplx>& pseudo, double nu, const AmpConfig& cfg) {
    std::vector<double> row(pseudo.size());
    for (size_t i = 0; i < pseudo.size(); ++i) {
        double s = log_bg_posterior(pseudo[i], nu, cfg);
        row[i] = s < cfg.evidence_floor ? cfg.evidence_floor : s;
    }
    return row;
}

EvidenceMatrix detect_frame(const std::vector<std::vector<cplx>>& observations,
                            const std::vector<SensingMatrix>& dicts, const AmpConfig& cfg) {
    if (observations.size() != dicts.size())
        throw std::domain_error("detect_frame: slot count mismatch");
    const int slots = static_cast<int>(observations.size());
    const int q = slots ? dicts[0].q : 0;
    EvidenceMatrix s(slots, q);
    for (int l = 0; l < slots; ++l) {
        AmpOutput out = amp_detect(observations[l], dicts[l], cfg);
        auto row = evidence_row(out.pseudo, out.nu, cfg);
        for (int a = 0; a < q; ++a) s.at(l, a) = row[a];
    }
    return s;
}

} // namespace ura
