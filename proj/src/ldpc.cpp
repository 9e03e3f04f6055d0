#include "ura/ldpc.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace ura {

ParityCheckMatrix::ParityCheckMatrix(int checks, int slots, int q, std::vector<ParityEdge> entries)
    : checks_(checks), slots_(slots), q_(q), entries_(std::move(entries)) {
    if (checks <= 0 || slots <= 0) throw std::domain_error("ParityCheckMatrix: empty dimensions");
    std::sort(entries_.begin(), entries_.end(), [](const ParityEdge& a, const ParityEdge& b) {
        return a.check != b.check ? a.check < b.check : a.slot < b.slot;
    });
    check_edges_.assign(checks_, {});
    slot_edges_.assign(slots_, {});
    for (int e = 0; e < static_cast<int>(entries_.size()); ++e) {
        const ParityEdge& pe = entries_[e];
        if (pe.check < 0 || pe.check >= checks_ || pe.slot < 0 || pe.slot >= slots_)
            throw std::domain_error("ParityCheckMatrix: edge index out of range");
        if (pe.coeff <= 0 || pe.coeff >= q_)
            throw std::domain_error("ParityCheckMatrix: coefficient must be a nonzero field element");
        if (e > 0 && entries_[e - 1].check == pe.check && entries_[e - 1].slot == pe.slot)
            throw std::domain_error("ParityCheckMatrix: duplicate (check, slot) entry");
        check_edges_[pe.check].push_back(e);
        slot_edges_[pe.slot].push_back(e);
    }
}

std::vector<int> ParityCheckMatrix::syndrome(const GfContext& gf, const std::vector<int>& codeword) const {
    if (static_cast<int>(codeword.size()) != slots_)
        throw std::domain_error("syndrome: codeword length mismatch");
    std::vector<int> s(checks_, 0);
    for (const ParityEdge& e : entries_) s[e.check] ^= gf.mul(e.coeff, codeword[e.slot]);
    return s;
}

namespace {

// Dense row reduction over F_Q. Returns rank; when pivots/reduced are given,
// also leaves the matrix in reduced row echelon form and reports pivot columns.
int row_reduce(const GfContext& gf, std::vector<std::vector<int>>& m, std::vector<int>* pivots) {
    const int rows = static_cast<int>(m.size());
    const int cols = rows ? static_cast<int>(m[0].size()) : 0;
    int r = 0;
    for (int c = 0; c < cols && r < rows; ++c) {
        int pivot = -1;
        for (int i = r; i < rows; ++i)
            if (m[i][c] != 0) { pivot = i; break; }
        if (pivot < 0) continue;
        std::swap(m[r], m[pivot]);
        int scale = gf.inv(m[r][c]);
        for (int j = 0; j < cols; ++j) m[r][j] = gf.mul(scale, m[r][j]);
        for (int i = 0; i < rows; ++i) {
            if (i == r || m[i][c] == 0) continue;
            int f = m[i][c];
            for (int j = 0; j < cols; ++j) m[i][j] ^= gf.mul(f, m[r][j]);
        }
        if (pivots) pivots->push_back(c);
        ++r;
    }
    return r;
}

std::vector<std::vector<int>> dense_h(const ParityCheckMatrix& h) {
    std::vector<std::vector<int>> m(h.checks(), std::vector<int>(h.slots(), 0));
    for (const ParityEdge& e : h.entries()) m[e.check][e.slot] = e.coeff;
    return m;
}

} // namespace

int gf_matrix_rank(const GfContext& gf, const ParityCheckMatrix& h) {
    auto m = dense_h(h);
    return row_reduce(gf, m, nullptr);
}

ParityCheckMatrix build_random_ldpc(const GfContext& gf, int slots, int checks,
                                    int col_weight, std::mt19937_64& rng) {
    if (checks >= slots) throw std::domain_error("build_random_ldpc: need P < L");
    if (col_weight < 2) throw std::domain_error("build_random_ldpc: col_weight must be >= 2");
    if (col_weight > checks) throw std::domain_error("build_random_ldpc: col_weight exceeds check count");
    if (static_cast<long long>(col_weight) * slots < checks)
        throw std::domain_error("build_random_ldpc: some checks would stay unreachable");

    std::uniform_int_distribution<int> coeff_dist(1, gf.q() - 1);
    std::vector<int> candidates;
    constexpr int kMaxTries = 64;
    for (int attempt = 0; attempt < kMaxTries; ++attempt) {
        std::vector<int> degree(checks, 0);
        std::vector<ParityEdge> edges;
        edges.reserve(static_cast<size_t>(slots) * col_weight);
        for (int l = 0; l < slots; ++l) {
            std::vector<char> used(checks, 0);
            for (int w = 0; w < col_weight; ++w) {
                // Minimum-degree checks first; the tie is drawn uniformly.
                // A deterministic tie rule would hand slot l the checks
                // {cl, cl+1, cl+2} mod P and shatter the Tanner graph into
                // disconnected duplicated components whenever col_weight
                // divides into P.
                int min_deg = checks + 1;
                for (int j = 0; j < checks; ++j)
                    if (!used[j] && degree[j] < min_deg) min_deg = degree[j];
                candidates.clear();
                for (int j = 0; j < checks; ++j)
                    if (!used[j] && degree[j] == min_deg) candidates.push_back(j);
                std::uniform_int_distribution<size_t> pick(0, candidates.size() - 1);
                int chosen = candidates[pick(rng)];
                used[chosen] = 1;
                ++degree[chosen];
                edges.push_back({chosen, l, coeff_dist(rng)});
            }
        }
        ParityCheckMatrix h(checks, slots, gf.q(), std::move(edges));
        if (gf_matrix_rank(gf, h) == checks) return h;
    }
    throw std::runtime_error("build_random_ldpc: no full-rank matrix within the retry budget");
}

GeneratorForm::GeneratorForm(int rank, int slots, int q,
                             std::vector<int> pivot_slots, std::vector<int> info_slots,
                             std::vector<std::vector<int>> reduced_rows)
    : rank_(rank), slots_(slots), q_(q),
      pivot_slots_(std::move(pivot_slots)), info_slots_(std::move(info_slots)),
      reduced_rows_(std::move(reduced_rows)) {}

std::uint64_t GeneratorForm::codebook_size() const {
    std::uint64_t n = 1;
    for (size_t i = 0; i < info_slots_.size(); ++i) {
        if (n > (~0ULL >> 1) / static_cast<std::uint64_t>(q_)) return ~0ULL >> 1;
        n *= static_cast<std::uint64_t>(q_);
    }
    return n;
}

std::vector<int> GeneratorForm::encode(const GfContext& gf, const std::vector<int>& info) const {
    if (static_cast<int>(info.size()) != info_length())
        throw std::domain_error("GeneratorForm::encode: info length mismatch");
    std::vector<int> c(slots_, 0);
    for (size_t j = 0; j < info_slots_.size(); ++j) c[info_slots_[j]] = info[j];
    // Pivot equation i: c[pivot_i] + sum_j R[i][j] * info_j = 0, char 2.
    for (int i = 0; i < rank_; ++i) {
        int acc = 0;
        for (size_t j = 0; j < info_slots_.size(); ++j)
            acc ^= gf.mul(reduced_rows_[i][j], info[j]);
        c[pivot_slots_[i]] = acc;
    }
    return c;
}

GeneratorForm derive_generator(const GfContext& gf, const ParityCheckMatrix& h) {
    auto m = dense_h(h);
    std::vector<int> pivots;
    int rank = row_reduce(gf, m, &pivots);
    if (rank != h.checks())
        throw std::runtime_error("derive_generator: H is rank deficient");

    std::vector<char> is_pivot(h.slots(), 0);
    for (int c : pivots) is_pivot[c] = 1;
    std::vector<int> info_slots;
    for (int c = 0; c < h.slots(); ++c)
        if (!is_pivot[c]) info_slots.push_back(c);

    std::vector<std::vector<int>> reduced(rank, std::vector<int>(info_slots.size(), 0));
    for (int i = 0; i < rank; ++i)
        for (size_t j = 0; j < info_slots.size(); ++j)
            reduced[i][j] = m[i][info_slots[j]];

    return GeneratorForm(rank, h.slots(), h.q(), pivots, info_slots, std::move(reduced));
}

SymbolGrid sample_codewords(const GfContext& gf, const GeneratorForm& gen, int k,
                            std::mt19937_64& rng) {
    if (k < 1) throw std::domain_error("sample_codewords: need K >= 1");
    if (static_cast<std::uint64_t>(k) > gen.codebook_size())
        throw std::domain_error("sample_codewords: K exceeds codebook size");

    std::uniform_int_distribution<int> sym(0, gf.q() - 1);
    std::set<std::vector<int>> seen;
    SymbolGrid grid;
    std::vector<std::vector<int>> rows;
    while (static_cast<int>(rows.size()) < k) {
        std::vector<int> info(gen.info_length());
        for (int& x : info) x = sym(rng);
        if (!seen.insert(info).second) continue;
        rows.push_back(gen.encode(gf, info));
    }
    grid.rows = k;
    grid.cols = static_cast<int>(rows[0].size());
    grid.v.reserve(static_cast<size_t>(k) * grid.cols);
    for (const auto& r : rows) grid.v.insert(grid.v.end(), r.begin(), r.end());
    return grid;
}

void save_parity_file(const std::string& path, const ParityCheckMatrix& h, const LdpcFileMeta& meta) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_parity_file: cannot open " + path);
    out << h.checks() << ' ' << h.slots() << ' ' << h.q() << ' '
        << meta.col_weight << ' ' << meta.prim_poly << ' ' << meta.seed << '\n';
    for (const ParityEdge& e : h.entries())
        out << e.check << ' ' << e.slot << ' ' << e.coeff << '\n';
    if (!out) throw std::runtime_error("save_parity_file: write failed for " + path);
}

ParityCheckMatrix load_parity_file(const std::string& path, LdpcFileMeta* meta) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_parity_file: cannot open " + path);
    int p = 0, l = 0, q = 0, w = 0;
    std::uint32_t poly = 0;
    std::uint64_t seed = 0;
    if (!(in >> p >> l >> q >> w >> poly >> seed))
        throw std::runtime_error("load_parity_file: malformed header in " + path);
    std::vector<ParityEdge> edges;
    ParityEdge e;
    while (in >> e.check >> e.slot >> e.coeff) edges.push_back(e);
    if (!in.eof())
        throw std::runtime_error("load_parity_file: malformed entry line in " + path);
    if (meta) *meta = LdpcFileMeta{w, poly, seed};
    try {
        return ParityCheckMatrix(p, l, q, std::move(edges));
    } catch (const std::domain_error& err) {
        throw std::runtime_error("load_parity_file: invalid matrix in " + path + ": " + err.what());
    }
}

} // namespace ura
