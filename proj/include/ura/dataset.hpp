#ifndef URA_DATASET_HPP
#define URA_DATASET_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "ura/amp.hpp"
#include "ura/grid.hpp"
#include "ura/sim.hpp"

namespace ura {

inline constexpr const char* kToolVersion = "uradec 0.1.0";

/// Resolved run configuration. Presets expand to the four benchmark scales
/// (rate-1/3 GF(64) codes); negative AMP priors mean "derive the default"
/// (rho_bg = K/Q, sigma_u2 = P_sym).
struct RunConfig {
    std::string scale = "tiny";
    int q = 64;
    int l = 12;
    int p = 8;
    int col_weight = 3;
    int k = 2;
    int n_s = 24;
    double eb_db = 10.0;
    double noise_var = 1.0;
    int amp_iters = 20;
    double rho_bg = -1.0;
    double sigma_u2 = -1.0;
    double evidence_floor = kDefaultEvidenceFloor;
    std::uint64_t seed = 1;
    int frames = 100;

    int field_degree() const; // log2(q); throws if q is not a power of two in 2..256
    int payload_bits() const { return field_degree() * (l - p); }
    FrameConfig frame_config() const;
    AmpConfig amp_config() const;
};

RunConfig preset_config(const std::string& name);

std::string config_to_json(const RunConfig& cfg);
RunConfig config_from_json_text(const std::string& text);

// FNV-1a 64 over the canonical JSON dump, hex encoded.
std::string config_fingerprint(const RunConfig& cfg);
std::string fnv1a_hex(const std::string& data);
std::string file_fingerprint(const std::string& path);

// Shortest round-trip decimal form of a double.
std::string format_double(double x);

struct DatasetFrame {
    std::uint64_t seed = 0;
    SymbolGrid truth;
    EvidenceMatrix evidence;
    double snr_db = 0.0;
};

struct Dataset {
    RunConfig config;
    std::string fingerprint;
    std::string h_fingerprint;
    std::vector<DatasetFrame> frames;
};

/// JSON Lines: a header record carrying the resolved config, tool version and
/// parity-file fingerprint, then one record per frame with seed, truth grid,
/// evidence table (row-major) and snr_db.
void write_dataset(const std::string& path, const RunConfig& cfg,
                   const std::string& h_fingerprint, const std::vector<DatasetFrame>& frames);
Dataset load_dataset(const std::string& path);

// Interleaved little-endian float32 (re, im) per sample, frames x slots x n_s.
void write_observations(const std::string& path,
                        const std::vector<std::vector<std::vector<cplx>>>& observations);

} // namespace ura

#endif
