#include "ura/dataset.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace ura {

using nlohmann::json;

int RunConfig::field_degree() const {
    for (int m = 1; m <= 8; ++m)
        if ((1 << m) == q) return m;
    throw std::domain_error("RunConfig: Q must be a power of two in 2..256");
}

FrameConfig RunConfig::frame_config() const {
    FrameConfig f;
    f.q = q;
    f.slots = l;
    f.k = k;
    f.n_s = n_s;
    f.eb_db = eb_db;
    f.noise_var = noise_var;
    f.payload_bits = payload_bits();
    return f;
}

AmpConfig RunConfig::amp_config() const {
    AmpConfig a = default_amp_config(frame_config());
    a.iters = amp_iters;
    if (rho_bg > 0.0) a.rho_bg = rho_bg;
    if (sigma_u2 > 0.0) a.sigma_u2 = sigma_u2;
    a.evidence_floor = evidence_floor;
    return a;
}

RunConfig preset_config(const std::string& name) {
    RunConfig c;
    c.scale = name;
    if (name == "tiny") {
        c.l = 12;
        c.p = 8;
    } else if (name == "small") {
        c.l = 18;
        c.p = 12;
    } else if (name == "moderate") {
        c.l = 24;
        c.p = 16;
    } else if (name == "large") {
        c.l = 48;
        c.p = 32;
    } else {
        throw std::domain_error("unknown scale preset: " + name);
    }
    return c;
}

std::string format_double(double x) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

namespace {

json config_json_obj(const RunConfig& c) {
    return json{{"scale", c.scale},
                {"q", c.q},
                {"l", c.l},
                {"p", c.p},
                {"col_weight", c.col_weight},
                {"k", c.k},
                {"n_s", c.n_s},
                {"eb_db", c.eb_db},
                {"noise_var", c.noise_var},
                {"amp_iters", c.amp_iters},
                {"rho_bg", c.rho_bg},
                {"sigma_u2", c.sigma_u2},
                {"evidence_floor", c.evidence_floor},
                {"seed", c.seed},
                {"frames", c.frames}};
}

RunConfig config_from_json_obj(const json& j) {
    RunConfig c;
    if (j.contains("scale")) c.scale = j.at("scale").get<std::string>();
    auto get = [&](const char* key, auto& field) {
        if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
    };
    get("q", c.q);
    get("l", c.l);
    get("p", c.p);
    get("col_weight", c.col_weight);
    get("k", c.k);
    get("n_s", c.n_s);
    get("eb_db", c.eb_db);
    get("noise_var", c.noise_var);
    get("amp_iters", c.amp_iters);
    get("rho_bg", c.rho_bg);
    get("sigma_u2", c.sigma_u2);
    get("evidence_floor", c.evidence_floor);
    get("seed", c.seed);
    get("frames", c.frames);
    return c;
}

} // namespace

std::string config_to_json(const RunConfig& cfg) { return config_json_obj(cfg).dump(); }

RunConfig config_from_json_text(const std::string& text) {
    return config_from_json_obj(json::parse(text));
}

std::string fnv1a_hex(const std::string& data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

std::string config_fingerprint(const RunConfig& cfg) { return fnv1a_hex(config_to_json(cfg)); }

std::string file_fingerprint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("file_fingerprint: cannot open " + path);
    std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return fnv1a_hex(data);
}

void write_dataset(const std::string& path, const RunConfig& cfg,
                   const std::string& h_fingerprint, const std::vector<DatasetFrame>& frames) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_dataset: cannot open " + path);

    json header{{"type", "header"},
                {"version", kToolVersion},
                {"config", config_json_obj(cfg)},
                {"fingerprint", config_fingerprint(cfg)},
                {"h_fingerprint", h_fingerprint},
                {"frames", frames.size()}};
    out << header.dump() << '\n';

    const std::string fp = config_fingerprint(cfg);
    for (const DatasetFrame& f : frames) {
        json truth = json::array();
        for (int k = 0; k < f.truth.rows; ++k) {
            json row = json::array();
            for (int l = 0; l < f.truth.cols; ++l) row.push_back(f.truth.at(k, l));
            truth.push_back(std::move(row));
        }
        json evidence = json::array();
        for (int l = 0; l < f.evidence.slots; ++l) {
            json row = json::array();
            for (int a = 0; a < f.evidence.q; ++a) row.push_back(f.evidence.at(l, a));
            evidence.push_back(std::move(row));
        }
        json rec{{"seed", f.seed},
                 {"truth", std::move(truth)},
                 {"evidence", std::move(evidence)},
                 {"snr_db", f.snr_db},
                 {"config_fp", fp}};
        out << rec.dump() << '\n';
    }
    if (!out) throw std::runtime_error("write_dataset: write failed for " + path);
}

Dataset load_dataset(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_dataset: cannot open " + path);

    Dataset ds;
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("load_dataset: empty file " + path);
    json header = json::parse(line);
    if (!header.contains("type") || header.at("type") != "header")
        throw std::runtime_error("load_dataset: missing header record in " + path);
    ds.config = config_from_json_obj(header.at("config"));
    ds.fingerprint = header.at("fingerprint").get<std::string>();
    ds.h_fingerprint = header.value("h_fingerprint", std::string());
    if (ds.fingerprint != config_fingerprint(ds.config))
        throw std::runtime_error("load_dataset: config fingerprint mismatch in " + path);

    while (std::getline(in, line)) {
        if (line.empty()) continue;
        json rec = json::parse(line);
        DatasetFrame f;
        f.seed = rec.at("seed").get<std::uint64_t>();
        f.snr_db = rec.at("snr_db").get<double>();
        if (rec.at("config_fp").get<std::string>() != ds.fingerprint)
            throw std::runtime_error("load_dataset: frame/config fingerprint mismatch in " + path);

        const json& truth = rec.at("truth");
        f.truth = SymbolGrid(static_cast<int>(truth.size()),
                             static_cast<int>(truth.at(0).size()));
        for (int k = 0; k < f.truth.rows; ++k)
            for (int l = 0; l < f.truth.cols; ++l) f.truth.at(k, l) = truth.at(k).at(l).get<int>();

        const json& evidence = rec.at("evidence");
        f.evidence = EvidenceMatrix(static_cast<int>(evidence.size()),
                                    static_cast<int>(evidence.at(0).size()));
        for (int l = 0; l < f.evidence.slots; ++l)
            for (int a = 0; a < f.evidence.q; ++a)
                f.evidence.at(l, a) = evidence.at(l).at(a).get<double>();

        if (f.truth.cols != ds.config.l || f.evidence.slots != ds.config.l ||
            f.evidence.q != ds.config.q)
            throw std::runtime_error("load_dataset: frame dimensions disagree with config");
        ds.frames.push_back(std::move(f));
    }
    return ds;
}

void write_observations(const std::string& path,
                        const std::vector<std::vector<std::vector<cplx>>>& observations) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_observations: cannot open " + path);
    for (const auto& frame : observations) {
        for (const auto& slot : frame) {
            for (const cplx& x : slot) {
                float re = static_cast<float>(x.real());
                float im = static_cast<float>(x.imag());
                out.write(reinterpret_cast<const char*>(&re), sizeof(float));
                out.write(reinterpret_cast<const char*>(&im), sizeof(float));
            }
        }
    }
    if (!out) throw std::runtime_error("write_observations: write failed for " + path);
}

} // namespace ura
