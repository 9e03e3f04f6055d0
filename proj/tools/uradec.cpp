// Command-line front end: dataset generation, decoder runs, sweeps,
// benchmarks, and the stochastic-binning protocol. All outputs embed the
// resolved config and master seed; exit codes are 0 success, 2 usage,
// 3 data/config validation, 4 runtime failure.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "ura/amp.hpp"
#include "ura/bp.hpp"
#include "ura/dataset.hpp"
#include "ura/denoiser.hpp"
#include "ura/metrics.hpp"
#include "ura/parallel.hpp"
#include "ura/protocol.hpp"
#include "ura/refine.hpp"
#include "ura/seeding.hpp"

using namespace ura;

namespace {

struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CodeBundle {
    GfContext gf;
    ParityCheckMatrix h;
    GeneratorForm gen;
    std::vector<SensingMatrix> dicts;
};

CodeBundle build_code(const RunConfig& cfg) {
    GfContext gf = GfContext::with_default_poly(cfg.field_degree());
    auto rng = make_rng(derive_seed(cfg.seed, 1));
    ParityCheckMatrix h = build_random_ldpc(gf, cfg.l, cfg.p, cfg.col_weight, rng);
    GeneratorForm gen = derive_generator(gf, h);
    auto dicts = make_dictionaries(cfg.q, cfg.n_s, cfg.l, derive_seed(cfg.seed, 2));
    return CodeBundle{std::move(gf), std::move(h), std::move(gen), std::move(dicts)};
}

std::uint64_t frame_seed(const RunConfig& cfg, int i) { return derive_seed(cfg.seed, 16 + i); }

// ---- decoder plumbing ------------------------------------------------------

struct DecoderOptions {
    std::string name = "sic-bp";
    std::string backend = "wht";
    int bp_iters = 50;
    bool early_exit = true;
    int top_j = 2;
    std::uint64_t budget = kDefaultTopJBudget;
    int steps = 0; // 0: per-load default
    double tau_max = 1.0;
    double tau_min = 1.0;
    bool first_reveal = true;
    std::vector<double> remask_thresholds;
    std::string scorer = "maxprob";
    std::uint64_t param_seed = 1;
    int latent_dim = 128;
};

BpConfig bp_config(const DecoderOptions& opt) {
    BpConfig cfg;
    cfg.max_iters = opt.bp_iters;
    cfg.early_exit = opt.early_exit;
    if (opt.backend == "direct")
        cfg.backend = CheckBackend::direct;
    else if (opt.backend == "wht")
        cfg.backend = CheckBackend::wht;
    else
        throw DataError("unknown check backend: " + opt.backend);
    return cfg;
}

RevealSchedule schedule_for(const DecoderOptions& opt, int k) {
    RevealSchedule s;
    s.steps = opt.steps > 0 ? opt.steps : default_steps_for_load(k);
    s.tau_max = opt.tau_max;
    s.tau_min = opt.tau_min;
    s.first_reveal = opt.first_reveal;
    return s;
}

struct FrameDecode {
    SymbolGrid grid;
    bool converged = true;
    int iters = 0;
    double ms = 0.0;
    // refinement telemetry (zero for classical decoders)
    int first_reveal = 0;
    int remask_stages = 0;
    int remask_rows = 0;
    int remask_steps_total = 0;
};

struct FrameJob {
    const EvidenceMatrix& evidence;
    const SymbolGrid& truth;
};

class FrameDecoder {
public:
    virtual ~FrameDecoder() = default;
    virtual FrameDecode decode(const FrameJob& job) const = 0;
    virtual bool reports_convergence() const { return false; }
    virtual bool reports_telemetry() const { return false; }
};

class SicBpDecoder : public FrameDecoder {
public:
    SicBpDecoder(const CodeBundle& code, int k, const DecoderOptions& opt)
        : code_(code), k_(k), cfg_(bp_config(opt)) {}
    FrameDecode decode(const FrameJob& job) const override {
        auto t0 = std::chrono::steady_clock::now();
        auto res = sic_decode(job.evidence, code_.gf, code_.h, k_, cfg_);
        auto t1 = std::chrono::steady_clock::now();
        FrameDecode out;
        out.grid = std::move(res.grid);
        out.converged = true;
        for (const auto& st : res.stages) {
            out.converged = out.converged && st.converged;
            out.iters += st.iters_used;
        }
        out.ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
        return out;
    }
    bool reports_convergence() const override { return true; }

private:
    const CodeBundle& code_;
    int k_;
    BpConfig cfg_;
};

class TopJDecoder : public FrameDecoder {
public:
    TopJDecoder(const CodeBundle& code, int k, const DecoderOptions& opt)
        : code_(code), k_(k), j_(opt.top_j), budget_(opt.budget) {}
    FrameDecode decode(const FrameJob& job) const override {
        auto t0 = std::chrono::steady_clock::now();
        auto res = topj_decode(job.evidence, code_.gf, code_.h, k_, j_, budget_);
        auto t1 = std::chrono::steady_clock::now();
        FrameDecode out;
        out.grid = std::move(res.grid);
        out.ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
        return out;
    }

private:
    const CodeBundle& code_;
    int k_;
    int j_;
    std::uint64_t budget_;
};

class RefineDecoder : public FrameDecoder {
public:
    RefineDecoder(const CodeBundle& code, int k, int l, const DecoderOptions& opt, bool oracle)
        : code_(code), k_(k), l_(l), opt_(opt), oracle_(oracle),
          sched_(schedule_for(opt, k)) {
        if (!oracle_) {
            auto params = DenoiserParams::random_init(code.gf.q(), opt.latent_dim, opt.param_seed);
            structured_ = std::make_unique<StructuredDenoiser>(code.gf, std::move(params));
        }
        remask_.thresholds = opt.remask_thresholds;
        validate_remask_config(remask_);
    }

    FrameDecode decode(const FrameJob& job) const override {
        std::unique_ptr<Denoiser> local;
        const Denoiser* den = structured_.get();
        if (oracle_) {
            local = std::make_unique<OracleDenoiser>(job.truth);
            den = local.get();
        }
        std::unique_ptr<ConfidenceScorer> scorer;
        if (opt_.scorer == "oracle")
            scorer = std::make_unique<OracleRowScorer>(job.truth);
        else if (opt_.scorer == "maxprob")
            scorer = std::make_unique<MaxProbScorer>();
        else
            throw DataError("unknown scorer: " + opt_.scorer);

        RefineTrace trace;
        auto t0 = std::chrono::steady_clock::now();
        SymbolGrid grid = remask_.thresholds.empty()
                              ? run_refinement(*den, job.evidence, code_.h, sched_, k_, l_, &trace)
                              : run_with_remasking(*den, *scorer, job.evidence, code_.h, sched_,
                                                   remask_, k_, l_, &trace);
        auto t1 = std::chrono::steady_clock::now();
        FrameDecode out;
        out.grid = std::move(grid);
        out.ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
        out.first_reveal = trace.pass_first_reveals.empty() ? 0 : trace.pass_first_reveals.front();
        out.remask_stages = static_cast<int>(trace.remask_rows_per_stage.size());
        for (int r : trace.remask_rows_per_stage) out.remask_rows += r;
        for (int t : trace.remask_steps_per_stage) out.remask_steps_total += t;
        return out;
    }
    bool reports_telemetry() const override { return true; }

private:
    const CodeBundle& code_;
    int k_;
    int l_;
    DecoderOptions opt_;
    bool oracle_;
    RevealSchedule sched_;
    RemaskConfig remask_;
    std::unique_ptr<StructuredDenoiser> structured_;
};

std::unique_ptr<FrameDecoder> make_decoder(const std::string& name, const CodeBundle& code,
                                           const RunConfig& cfg, const DecoderOptions& opt) {
    if (name == "sic-bp") return std::make_unique<SicBpDecoder>(code, cfg.k, opt);
    if (name == "topj") return std::make_unique<TopJDecoder>(code, cfg.k, opt);
    if (name == "refine-oracle") return std::make_unique<RefineDecoder>(code, cfg.k, cfg.l, opt, true);
    if (name == "refine-structured")
        return std::make_unique<RefineDecoder>(code, cfg.k, cfg.l, opt, false);
    throw DataError("unknown decoder: " + name);
}

// ---- output helpers --------------------------------------------------------

class OutputFile {
public:
    explicit OutputFile(const std::string& path) {
        if (!path.empty()) {
            file_.open(path);
            if (!file_) throw DataError("cannot open output file " + path);
        }
    }
    std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

private:
    std::ofstream file_;
};

void write_preamble(std::ostream& os, const RunConfig& cfg) {
    os << "# " << kToolVersion << "\n";
    os << "# config: " << config_to_json(cfg) << "\n";
}

const char* kDecodeHeader =
    "decoder,backend,scale,q,l,p,k,eb_db,snr_db,seed,samples,ser,cer,ms_per_sample,"
    "converged_frac,mean_iters,telemetry,status,config_fp";

struct DecodeRowStats {
    int samples = 0;
    double ser = 0.0, cer = 0.0, ms = 0.0, converged = 0.0, iters = 0.0;
    std::string status = "ok";
    bool has_convergence = false;
    std::string telemetry;
};

void write_decode_row(std::ostream& os, const std::string& decoder, const std::string& backend,
                      const RunConfig& cfg, const DecodeRowStats& st) {
    double snr = snr_db(cfg.eb_db, cfg.l, cfg.n_s, cfg.payload_bits());
    os << decoder << ',' << backend << ',' << cfg.scale << ',' << cfg.q << ',' << cfg.l << ','
       << cfg.p << ',' << cfg.k << ',' << format_double(cfg.eb_db) << ',' << format_double(snr)
       << ',' << cfg.seed << ',' << st.samples << ',';
    if (st.status == "ok")
        os << format_double(st.ser) << ',' << format_double(st.cer) << ','
           << format_double(st.ms);
    else
        os << ",,";
    os << ',';
    if (st.status == "ok" && st.has_convergence)
        os << format_double(st.converged) << ',' << format_double(st.iters);
    else
        os << ',';
    os << ',' << st.telemetry << ',' << st.status << ',' << config_fingerprint(cfg) << "\n";
}

DecodeRowStats run_decoder_over_frames(const FrameDecoder& dec,
                                       const std::vector<DatasetFrame>& frames,
                                       bool parallel = true,
                                       std::ostream* per_frame = nullptr) {
    const int n = static_cast<int>(frames.size());
    std::vector<FrameDecode> results(n);
    auto work = [&](int i) {
        results[i] = dec.decode(FrameJob{frames[i].evidence, frames[i].truth});
    };
    parallel_for(n, work, parallel ? 0 : 1);

    if (per_frame) {
        *per_frame << "frame,seed,ser,cer,ms,converged,iters\n";
        for (int i = 0; i < n; ++i) {
            auto m = ser_cer(frames[i].truth, results[i].grid);
            *per_frame << i << ',' << frames[i].seed << ',' << format_double(m.ser) << ','
                       << format_double(m.cer) << ',' << format_double(results[i].ms) << ','
                       << (results[i].converged ? 1 : 0) << ',' << results[i].iters << "\n";
        }
    }

    DecodeRowStats st;
    st.samples = n;
    st.has_convergence = dec.reports_convergence();
    double first_reveal = 0.0, stages = 0.0, rows = 0.0, trm = 0.0;
    for (int i = 0; i < n; ++i) {
        auto m = ser_cer(frames[i].truth, results[i].grid);
        st.ser += m.ser;
        st.cer += m.cer;
        st.ms += results[i].ms;
        st.converged += results[i].converged;
        st.iters += results[i].iters;
        first_reveal += results[i].first_reveal;
        stages += results[i].remask_stages;
        rows += results[i].remask_rows;
        trm += results[i].remask_steps_total;
    }
    if (n > 0) {
        st.ser /= n;
        st.cer /= n;
        st.ms /= n;
        st.converged /= n;
        st.iters /= n;
    }
    if (dec.reports_telemetry() && n > 0) {
        std::ostringstream tel;
        tel << "first_reveal=" << format_double(first_reveal / n)
            << ";remask_stages=" << format_double(stages / n)
            << ";remask_rows=" << format_double(rows / n)
            << ";t_rm=" << format_double(trm / n);
        st.telemetry = tel.str();
    }
    return st;
}

// ---- config resolution -----------------------------------------------------

struct ConfigFlags {
    std::string config_path;
    std::string preset;
    std::optional<int> q, l, p, col_weight, k, n_s, frames, amp_iters;
    std::optional<double> eb_db, noise_var, rho_bg, sigma_u2;
    std::optional<std::uint64_t> seed;

    void attach(CLI::App* cmd) {
        cmd->add_option("--config", config_path, "JSON config file; flags override its fields");
        cmd->add_option("--preset", preset, "scale preset: tiny|small|moderate|large");
        add_opt(cmd, "--q", q, "alphabet size (power of two up to 256)");
        add_opt(cmd, "--l", l, "slots per frame");
        add_opt(cmd, "--p", p, "parity checks");
        add_opt(cmd, "--col-weight", col_weight, "checks per slot");
        add_opt(cmd, "--k", k, "active users");
        add_opt(cmd, "--ns", n_s, "channel uses per slot");
        add_opt(cmd, "--frames", frames, "frame count");
        add_opt(cmd, "--amp-iters", amp_iters, "detector iterations");
        add_opt(cmd, "--eb-db", eb_db, "per-bit energy in dB");
        add_opt(cmd, "--noise-var", noise_var, "complex noise variance");
        add_opt(cmd, "--rho-bg", rho_bg, "detector activity prior (default K/Q)");
        add_opt(cmd, "--sigma-u2", sigma_u2, "detector active variance (default P_sym)");
        add_opt(cmd, "--seed", seed, "master seed");
    }

    RunConfig resolve() const {
        RunConfig cfg;
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            if (!in) throw DataError("cannot open config file " + config_path);
            std::stringstream ss;
            ss << in.rdbuf();
            try {
                cfg = config_from_json_text(ss.str());
            } catch (const std::exception& e) {
                throw DataError("invalid config file " + config_path + ": " + e.what());
            }
        }
        if (!preset.empty()) {
            RunConfig pre;
            try {
                pre = preset_config(preset);
            } catch (const std::domain_error& e) {
                throw CLI::ValidationError("--preset", e.what());
            }
            cfg.scale = pre.scale;
            cfg.l = pre.l;
            cfg.p = pre.p;
        }
        apply(q, cfg.q);
        if (l || p) cfg.scale = "custom";
        apply(l, cfg.l);
        apply(p, cfg.p);
        apply(col_weight, cfg.col_weight);
        apply(k, cfg.k);
        apply(n_s, cfg.n_s);
        apply(frames, cfg.frames);
        apply(amp_iters, cfg.amp_iters);
        apply(eb_db, cfg.eb_db);
        apply(noise_var, cfg.noise_var);
        apply(rho_bg, cfg.rho_bg);
        apply(sigma_u2, cfg.sigma_u2);
        apply(seed, cfg.seed);
        validate(cfg);
        return cfg;
    }

private:
    template <typename T>
    static void add_opt(CLI::App* cmd, const std::string& flag, std::optional<T>& slot,
                        const std::string& help) {
        cmd->add_option_function<T>(flag, [&slot](const T& v) { slot = v; }, help);
    }
    template <typename T, typename U>
    static void apply(const std::optional<T>& src, U& dst) {
        if (src) dst = static_cast<U>(*src);
    }
    static void validate(const RunConfig& cfg) {
        if (cfg.p >= cfg.l) throw DataError("need P < L");
        if (cfg.k < 1) throw DataError("need K >= 1");
        if (cfg.frames < 1) throw DataError("need at least one frame");
        if (cfg.n_s < 1 || cfg.n_s > cfg.q) throw DataError("need 1 <= n_s <= Q");
        cfg.field_degree(); // throws when Q is not a supported power of two
    }
};

void attach_decoder_flags(CLI::App* cmd, DecoderOptions& opt, bool with_name) {
    if (with_name)
        cmd->add_option("--decoder", opt.name,
                        "sic-bp | topj | refine-oracle | refine-structured");
    cmd->add_option("--backend", opt.backend, "check update backend: wht | direct");
    cmd->add_option("--bp-iters", opt.bp_iters, "BP iteration cap");
    cmd->add_flag("--no-early-exit", [&opt](std::int64_t) { opt.early_exit = false; },
                  "run BP to the iteration cap");
    cmd->add_option("--top-j", opt.top_j, "per-slot shortlist size");
    cmd->add_option("--budget", opt.budget, "candidate enumeration budget");
    cmd->add_option("--steps", opt.steps, "refinement steps (default: per-load preset)");
    cmd->add_option("--tau-max", opt.tau_max, "initial inference temperature");
    cmd->add_option("--tau-min", opt.tau_min, "final inference temperature");
    cmd->add_flag("--no-first-reveal", [&opt](std::int64_t) { opt.first_reveal = false; },
                  "disable the one-site-per-slot first reveal");
    cmd->add_option("--remask-thresholds", opt.remask_thresholds,
                    "descending quality thresholds enabling remask passes")
        ->delimiter(',');
    cmd->add_option("--scorer", opt.scorer, "row confidence source: maxprob | oracle");
    cmd->add_option("--param-seed", opt.param_seed, "structured denoiser parameter seed");
    cmd->add_option("--latent-dim", opt.latent_dim, "structured denoiser latent width");
}

struct LoadedRun {
    Dataset ds;
    CodeBundle code;
};

LoadedRun load_and_check(const std::string& dataset_path, const std::string& hfile) {
    Dataset ds;
    try {
        ds = load_dataset(dataset_path);
    } catch (const std::exception& e) {
        throw DataError(e.what());
    }
    LdpcFileMeta meta;
    std::unique_ptr<ParityCheckMatrix> h;
    try {
        h = std::make_unique<ParityCheckMatrix>(load_parity_file(hfile, &meta));
    } catch (const std::exception& e) {
        throw DataError(e.what());
    }
    if (h->slots() != ds.config.l || h->checks() != ds.config.p || h->q() != ds.config.q)
        throw DataError("parity file dimensions disagree with the dataset config");
    if (!ds.h_fingerprint.empty() && file_fingerprint(hfile) != ds.h_fingerprint)
        throw DataError("parity file fingerprint disagrees with the dataset header");

    GfContext gf(ds.config.field_degree(), meta.prim_poly);
    GeneratorForm gen = derive_generator(gf, *h);
    auto dicts = make_dictionaries(ds.config.q, ds.config.n_s, ds.config.l,
                                   derive_seed(ds.config.seed, 2));
    return LoadedRun{std::move(ds),
                     CodeBundle{std::move(gf), std::move(*h), std::move(gen), std::move(dicts)}};
}

// ---- subcommands -----------------------------------------------------------

int cmd_simulate(const ConfigFlags& flags, const std::string& out_path,
                 const std::string& hfile, const std::string& obs_path) {
    RunConfig cfg = flags.resolve();
    CodeBundle code = build_code(cfg);

    save_parity_file(hfile, code.h, LdpcFileMeta{cfg.col_weight, code.gf.prim_poly(), cfg.seed});

    FrameConfig fc = cfg.frame_config();
    AmpConfig amp = cfg.amp_config();
    const double snr = snr_db(cfg.eb_db, cfg.l, cfg.n_s, cfg.payload_bits());

    std::vector<DatasetFrame> frames(cfg.frames);
    std::vector<std::vector<std::vector<cplx>>> dumps;
    if (!obs_path.empty()) dumps.resize(cfg.frames);
    parallel_for(cfg.frames, [&](int i) {
        auto frame = generate_frame(fc, code.gf, code.gen, code.dicts, frame_seed(cfg, i));
        DatasetFrame df;
        df.seed = frame.seed;
        df.truth = std::move(frame.truth);
        df.evidence = detect_frame(frame.observations, code.dicts, amp);
        df.snr_db = snr;
        frames[i] = std::move(df);
        if (!obs_path.empty()) dumps[i] = std::move(frame.observations);
    });

    write_dataset(out_path, cfg, file_fingerprint(hfile), frames);
    if (!obs_path.empty()) write_observations(obs_path, dumps);
    std::cerr << "wrote " << cfg.frames << " frames to " << out_path << "\n";
    return 0;
}

int cmd_decode(const std::string& dataset_path, const std::string& hfile,
               const DecoderOptions& opt, const std::string& out_path,
               const std::string& per_frame_path) {
    auto [ds, code] = load_and_check(dataset_path, hfile);

    OutputFile out(out_path);
    write_preamble(out.stream(), ds.config);
    out.stream() << kDecodeHeader << "\n";

    std::ofstream per_frame;
    if (!per_frame_path.empty()) {
        per_frame.open(per_frame_path);
        if (!per_frame) throw DataError("cannot open per-frame output " + per_frame_path);
        write_preamble(per_frame, ds.config);
    }

    DecodeRowStats st;
    try {
        auto dec = make_decoder(opt.name, code, ds.config, opt);
        st = run_decoder_over_frames(*dec, ds.frames, true,
                                     per_frame.is_open() ? &per_frame : nullptr);
    } catch (const TopJBudgetError& e) {
        st.samples = static_cast<int>(ds.frames.size());
        st.status = "DNF";
        std::cerr << e.what() << "\n";
    }
    write_decode_row(out.stream(), opt.name, opt.backend, ds.config, st);
    return 0;
}

int cmd_sweep(const std::vector<std::string>& scales, const std::vector<std::string>& decoders,
              const std::vector<double>& eb_list, const std::vector<int>& k_list, int frames,
              std::uint64_t master_seed, const DecoderOptions& base_opt,
              const std::string& out_path) {
    if (scales.empty() || decoders.empty() || eb_list.empty() || k_list.empty())
        throw CLI::ValidationError("sweep", "empty sweep grid");

    OutputFile out(out_path);
    out.stream() << "# " << kToolVersion << "\n";
    out.stream() << kDecodeHeader << "\n";

    int cell = 0;
    for (size_t si = 0; si < scales.size(); ++si) {
        RunConfig base = preset_config(scales[si]);
        base.seed = derive_seed(master_seed, 1 + 4 * si);
        base.frames = frames;
        CodeBundle code = build_code(base);

        for (double eb : eb_list) {
            for (int k : k_list) {
                RunConfig cfg = base;
                cfg.eb_db = eb;
                cfg.k = k;
                cfg.seed = derive_seed(master_seed, 1000 + cell);
                FrameConfig fc = cfg.frame_config();
                AmpConfig amp = cfg.amp_config();

                std::vector<DatasetFrame> cell_frames(frames);
                parallel_for(frames, [&](int i) {
                    auto frame =
                        generate_frame(fc, code.gf, code.gen, code.dicts, frame_seed(cfg, i));
                    DatasetFrame df;
                    df.seed = frame.seed;
                    df.truth = std::move(frame.truth);
                    df.evidence = detect_frame(frame.observations, code.dicts, amp);
                    df.snr_db = snr_db(eb, cfg.l, cfg.n_s, cfg.payload_bits());
                    cell_frames[i] = std::move(df);
                });

                for (const std::string& name : decoders) {
                    DecoderOptions opt = base_opt;
                    opt.name = name;
                    DecodeRowStats st;
                    st.samples = frames;
                    try {
                        auto dec = make_decoder(name, code, cfg, opt);
                        st = run_decoder_over_frames(*dec, cell_frames);
                    } catch (const TopJBudgetError&) {
                        st.status = "DNF";
                    } catch (const std::exception& e) {
                        st.status = std::string("error:") + e.what();
                    }
                    write_decode_row(out.stream(), name, opt.backend, cfg, st);
                }
                ++cell;
            }
        }
    }
    return 0;
}

int cmd_bench(const std::string& dataset_path, const std::string& hfile,
              const std::vector<std::string>& decoder_specs, int repeat, int warmup,
              const DecoderOptions& base_opt, const std::string& out_path) {
    auto [ds, code] = load_and_check(dataset_path, hfile);
    const int n = static_cast<int>(ds.frames.size());

    OutputFile out(out_path);
    write_preamble(out.stream(), ds.config);
    out.stream() << "# env: workers=1 hardware_threads=" << std::thread::hardware_concurrency()
#if defined(__VERSION__)
                 << " compiler=\"" << __VERSION__ << "\""
#endif
                 << "\n";
    out.stream() << "decoder,samples,repeats,mean_ms,median_ms,deterministic,low_confidence\n";

    for (const std::string& spec : decoder_specs) {
        DecoderOptions opt = base_opt;
        std::string name = spec;
        auto colon = spec.find(':');
        if (colon != std::string::npos) {
            name = spec.substr(0, colon);
            std::string arg = spec.substr(colon + 1);
            if (name == "sic-bp")
                opt.backend = arg;
            else if (name == "topj")
                opt.top_j = std::stoi(arg);
            else
                throw DataError("unknown decoder spec: " + spec);
        }
        opt.name = name;

        std::string status = "ok";
        std::vector<double> times;
        bool deterministic = true;
        try {
            auto dec = make_decoder(name, code, ds.config, opt);
            for (int w = 0; w < warmup && w < n; ++w)
                dec->decode(FrameJob{ds.frames[w].evidence, ds.frames[w].truth});

            std::vector<SymbolGrid> reference(n);
            times.reserve(static_cast<size_t>(repeat) * n);
            for (int r = 0; r < repeat; ++r) {
                for (int i = 0; i < n; ++i) {
                    auto res = dec->decode(FrameJob{ds.frames[i].evidence, ds.frames[i].truth});
                    times.push_back(res.ms);
                    if (r == 0)
                        reference[i] = std::move(res.grid);
                    else
                        deterministic = deterministic && reference[i] == res.grid;
                }
            }
        } catch (const TopJBudgetError&) {
            status = "DNF";
        }

        if (status != "ok") {
            out.stream() << spec << ',' << n << ',' << repeat << ",,,," << status << "\n";
            continue;
        }
        double mean = std::accumulate(times.begin(), times.end(), 0.0) / times.size();
        std::vector<double> sorted = times;
        std::sort(sorted.begin(), sorted.end());
        double median = sorted[sorted.size() / 2];
        out.stream() << spec << ',' << n << ',' << repeat << ',' << format_double(mean) << ','
                     << format_double(median) << ',' << (deterministic ? "true" : "false") << ','
                     << (static_cast<int>(times.size()) < 30 ? "true" : "false") << "\n";
    }
    return 0;
}

int cmd_protocol(const ConfigFlags& flags, int k_tot, int zeta, bool zeta_scaled, int k_max,
                 const DecoderOptions& opt, const std::string& out_path) {
    RunConfig cfg = flags.resolve();
    CodeBundle code = build_code(cfg);

    ProtocolConfig pc;
    pc.k_tot = k_tot;
    pc.zeta = zeta_scaled ? scaled_zeta(k_tot) : zeta;
    pc.k_max = k_max;
    if (pc.zeta < 1) throw DataError("need at least one bin (set --zeta or --zeta-rule scaled)");

    BinDecoder per_bin;
    if (opt.name == "sic-bp") {
        BpConfig bp = bp_config(opt);
        per_bin = [&code, bp](const BinTask& t) {
            return sic_decode(t.evidence, t.gf, t.h, t.load, bp).grid;
        };
    } else if (opt.name == "refine-oracle") {
        DecoderOptions ropt = opt;
        per_bin = [ropt](const BinTask& t) {
            OracleDenoiser den(t.truth);
            return run_refinement(den, t.evidence, t.h, schedule_for(ropt, t.load), t.load,
                                  t.evidence.slots);
        };
    } else {
        throw DataError("protocol decoder must be sic-bp or refine-oracle");
    }

    auto agg = run_protocol(pc, cfg.frame_config(), code.gf, code.h, code.gen, code.dicts,
                            DecoderBank::uniform(per_bin, pc.k_max), cfg.frames, cfg.seed);

    OutputFile out(out_path);
    write_preamble(out.stream(), cfg);
    out.stream() << "k_tot,zeta,k_max,frames,ser,cer,overflow_rate,config_fp\n";
    out.stream() << pc.k_tot << ',' << pc.zeta << ',' << pc.k_max << ',' << agg.frames << ','
                 << format_double(agg.ser) << ',' << format_double(agg.cer) << ','
                 << format_double(agg.overflow_rate) << ',' << config_fingerprint(cfg) << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"multiuser random-access decoding toolkit"};
    app.require_subcommand(1);

    // simulate
    auto* sim_cmd = app.add_subcommand("simulate", "generate a dataset with detector evidence");
    ConfigFlags sim_flags;
    sim_flags.attach(sim_cmd);
    std::string sim_out, sim_hfile, sim_obs;
    sim_cmd->add_option("--out", sim_out, "dataset output path (JSON Lines)")->required();
    sim_cmd->add_option("--hfile", sim_hfile, "parity matrix output path")->required();
    sim_cmd->add_option("--dump-observations", sim_obs, "raw observation dump (float32 re,im)");

    // decode
    auto* dec_cmd = app.add_subcommand("decode", "run one decoder over a dataset");
    std::string dec_dataset, dec_hfile, dec_out, dec_per_frame;
    DecoderOptions dec_opt;
    dec_cmd->add_option("--dataset", dec_dataset, "dataset path")->required();
    dec_cmd->add_option("--hfile", dec_hfile, "parity matrix path")->required();
    dec_cmd->add_option("--out", dec_out, "results CSV (stdout when omitted)");
    dec_cmd->add_option("--per-frame", dec_per_frame, "per-decode telemetry CSV");
    attach_decoder_flags(dec_cmd, dec_opt, true);

    // sweep
    auto* sweep_cmd = app.add_subcommand("sweep", "grid of scales x decoders x eb x k");
    std::vector<std::string> sweep_scales, sweep_decoders;
    std::vector<double> sweep_eb{10.0};
    std::vector<int> sweep_k{2};
    int sweep_frames = 200;
    std::uint64_t sweep_seed = 1;
    std::string sweep_out;
    DecoderOptions sweep_opt;
    sweep_cmd->add_option("--scales", sweep_scales, "scale presets")->delimiter(',')->required();
    sweep_cmd->add_option("--decoders", sweep_decoders, "decoder names")->delimiter(',')->required();
    sweep_cmd->add_option("--eb-list", sweep_eb, "Eb values in dB")->delimiter(',');
    sweep_cmd->add_option("--k-list", sweep_k, "user counts")->delimiter(',');
    sweep_cmd->add_option("--frames", sweep_frames, "frames per cell");
    sweep_cmd->add_option("--seed", sweep_seed, "master seed");
    sweep_cmd->add_option("--out", sweep_out, "results CSV (stdout when omitted)");
    attach_decoder_flags(sweep_cmd, sweep_opt, false);

    // bench
    auto* bench_cmd = app.add_subcommand("bench", "wall-time comparison on one dataset");
    std::string bench_dataset, bench_hfile, bench_out;
    std::vector<std::string> bench_decoders;
    int bench_repeat = 3, bench_warmup = 2;
    DecoderOptions bench_opt;
    bench_cmd->add_option("--dataset", bench_dataset, "dataset path")->required();
    bench_cmd->add_option("--hfile", bench_hfile, "parity matrix path")->required();
    bench_cmd->add_option("--decoders", bench_decoders,
                          "specs like sic-bp:wht, sic-bp:direct, topj:2")
        ->delimiter(',')
        ->required();
    bench_cmd->add_option("--repeat", bench_repeat, "timed passes over the dataset");
    bench_cmd->add_option("--warmup", bench_warmup, "untimed warmup decodes");
    bench_cmd->add_option("--out", bench_out, "report CSV (stdout when omitted)");
    attach_decoder_flags(bench_cmd, bench_opt, false);

    // protocol
    auto* proto_cmd = app.add_subcommand("protocol", "stochastic-binning wrapper");
    ConfigFlags proto_flags;
    proto_flags.attach(proto_cmd);
    int proto_ktot = 8, proto_zeta = 0, proto_kmax = 8;
    std::string proto_zeta_rule = "scaled", proto_out;
    DecoderOptions proto_opt;
    proto_cmd->add_option("--k-tot", proto_ktot, "total users per frame");
    proto_cmd->add_option("--zeta", proto_zeta, "fixed bin count");
    proto_cmd->add_option("--zeta-rule", proto_zeta_rule, "scaled (ceil(k_tot/4)) or fixed");
    proto_cmd->add_option("--k-max", proto_kmax, "per-bin load cap");
    proto_cmd->add_option("--out", proto_out, "results CSV (stdout when omitted)");
    attach_decoder_flags(proto_cmd, proto_opt, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (sim_cmd->parsed()) return cmd_simulate(sim_flags, sim_out, sim_hfile, sim_obs);
        if (dec_cmd->parsed())
            return cmd_decode(dec_dataset, dec_hfile, dec_opt, dec_out, dec_per_frame);
        if (sweep_cmd->parsed())
            return cmd_sweep(sweep_scales, sweep_decoders, sweep_eb, sweep_k, sweep_frames,
                             sweep_seed, sweep_opt, sweep_out);
        if (bench_cmd->parsed())
            return cmd_bench(bench_dataset, bench_hfile, bench_decoders, bench_repeat,
                             bench_warmup, bench_opt, bench_out);
        if (proto_cmd->parsed())
            return cmd_protocol(proto_flags, proto_ktot, proto_zeta,
                                proto_zeta_rule == "scaled" && proto_zeta == 0, proto_kmax,
                                proto_opt, proto_out);
    } catch (const CLI::ValidationError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const DataError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 3;
    } catch (const std::domain_error& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "runtime failure: " << e.what() << "\n";
        return 4;
    }
    return 2;
}
