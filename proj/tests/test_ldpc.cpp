#include <doctest.h>

#include <cstdio>
#include <set>

#include "ura/ldpc.hpp"
#include "ura/seeding.hpp"

#include "oracles.hpp"

using namespace ura;

TEST_SUITE("ldpc") {

TEST_CASE("tiny scale construction: degrees, rank, rate") {
    GfContext gf = GfContext::with_default_poly(6);
    auto rng = make_rng(7);
    auto h = build_random_ldpc(gf, 12, 8, 3, rng);

    CHECK(h.slots() == 12);
    CHECK(h.checks() == 8);
    CHECK(h.edge_count() == 36);
    for (int l = 0; l < 12; ++l) CHECK(h.slot_edges(l).size() == 3);
    for (int j = 0; j < 8; ++j) CHECK(h.check_edges(j).size() >= 4); // 36 edges over 8 checks
    CHECK(gf_matrix_rank(gf, h) == 8);

    auto gen = derive_generator(gf, h);
    CHECK(gen.info_length() == 4); // rate 1/3, payload 24 bits
}

TEST_CASE("seeded constructions are full rank, deterministic, and distinct across seeds") {
    GfContext gf = GfContext::with_default_poly(6);
    std::set<std::vector<int>> coeff_sets;
    for (int s = 0; s < 100; ++s) {
        auto rng = make_rng(1000 + s);
        auto h = build_random_ldpc(gf, 12, 8, 3, rng);
        CHECK(gf_matrix_rank(gf, h) == 8);
        std::vector<int> coeffs;
        for (const auto& e : h.entries()) coeffs.push_back(e.coeff);
        coeff_sets.insert(coeffs);

        auto rng2 = make_rng(1000 + s);
        auto h2 = build_random_ldpc(gf, 12, 8, 3, rng2);
        CHECK(h2.entries().size() == h.entries().size());
        for (size_t i = 0; i < h.entries().size(); ++i) {
            CHECK(h.entries()[i].check == h2.entries()[i].check);
            CHECK(h.entries()[i].slot == h2.entries()[i].slot);
            CHECK(h.entries()[i].coeff == h2.entries()[i].coeff);
        }
    }
    CHECK(coeff_sets.size() == 100);
}

TEST_CASE("infeasible degree parameters are rejected") {
    GfContext gf = GfContext::with_default_poly(6);
    auto rng = make_rng(1);
    CHECK_THROWS_AS(build_random_ldpc(gf, 8, 8, 3, rng), std::domain_error);  // P >= L
    CHECK_THROWS_AS(build_random_ldpc(gf, 12, 8, 1, rng), std::domain_error); // weight < 2
    CHECK_THROWS_AS(build_random_ldpc(gf, 12, 8, 9, rng), std::domain_error); // weight > P
}

TEST_CASE("syndrome: zero codeword, linearity, single flips") {
    GfContext gf = GfContext::with_default_poly(6);
    auto rng = make_rng(21);
    auto h = build_random_ldpc(gf, 12, 8, 3, rng);
    auto gen = derive_generator(gf, h);

    std::vector<int> zero(12, 0);
    auto s0 = h.syndrome(gf, zero);
    for (int x : s0) CHECK(x == 0);

    auto grid = sample_codewords(gf, gen, 2, rng);
    std::vector<int> c1(12), c2(12);
    for (int l = 0; l < 12; ++l) {
        c1[l] = grid.at(0, l);
        c2[l] = grid.at(1, l);
    }

    // syndrome(c + c') = syndrome(c) + syndrome(c') slot/check-wise
    std::vector<int> sum(12);
    for (int l = 0; l < 12; ++l) sum[l] = gf.add(c1[l], c2[l]);
    auto sa = h.syndrome(gf, c1);
    auto sb = h.syndrome(gf, c2);
    auto sc = h.syndrome(gf, sum);
    for (int j = 0; j < 8; ++j) CHECK(sc[j] == gf.add(sa[j], sb[j]));

    // flipping one symbol disturbs exactly the incident checks
    for (int l = 0; l < 12; ++l) {
        auto bent = c1;
        bent[l] = gf.add(bent[l], 5);
        auto s = h.syndrome(gf, bent);
        int nonzero = 0;
        for (int x : s) nonzero += x != 0;
        CHECK(nonzero == 3);
    }

    CHECK_THROWS_AS(h.syndrome(gf, std::vector<int>(5, 0)), std::domain_error);
}

TEST_CASE("generator: zero info maps to zero, random encodes are valid") {
    GfContext gf = GfContext::with_default_poly(6);
    auto rng = make_rng(33);
    auto h = build_random_ldpc(gf, 12, 8, 3, rng);
    auto gen = derive_generator(gf, h);

    auto zero = gen.encode(gf, std::vector<int>(4, 0));
    for (int x : zero) CHECK(x == 0);

    std::uniform_int_distribution<int> sym(0, 63);
    for (int trial = 0; trial < 1000; ++trial) {
        std::vector<int> info(4);
        for (int& x : info) x = sym(rng);
        auto c = gen.encode(gf, info);
        auto s = h.syndrome(gf, c);
        for (int x : s) CHECK(x == 0);
    }
}

TEST_CASE("distinct info vectors give distinct codewords (exhaustive, reduced field)") {
    GfContext gf = GfContext::with_default_poly(2); // Q = 4
    auto rng = make_rng(5);
    auto h = build_random_ldpc(gf, 6, 3, 2, rng);
    auto gen = derive_generator(gf, h);
    REQUIRE(gen.info_length() == 3);

    std::set<std::vector<int>> words;
    std::vector<int> info(3, 0);
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
            for (int c = 0; c < 4; ++c) {
                info = {a, b, c};
                words.insert(gen.encode(gf, info));
            }
    CHECK(words.size() == 64); // Q^(L-P)

    auto listed = oracles::enumerate_codewords(gf, h);
    CHECK(listed.size() == 64);
    for (const auto& w : listed) CHECK(words.count(w) == 1);
}

TEST_CASE("sample_codewords: validity, distinctness, bounds") {
    GfContext gf = GfContext::with_default_poly(6);
    auto rng = make_rng(44);
    auto h = build_random_ldpc(gf, 12, 8, 3, rng);
    auto gen = derive_generator(gf, h);

    auto one = sample_codewords(gf, gen, 1, rng);
    CHECK(one.rows == 1);
    std::vector<int> row(12);
    for (int l = 0; l < 12; ++l) row[l] = one.at(0, l);
    auto s = h.syndrome(gf, row);
    for (int x : s) CHECK(x == 0);

    for (int trial = 0; trial < 200; ++trial) {
        auto grid = sample_codewords(gf, gen, 4, rng);
        std::set<std::vector<int>> rows;
        for (int k = 0; k < 4; ++k) {
            std::vector<int> r(12);
            for (int l = 0; l < 12; ++l) r[l] = grid.at(k, l);
            auto syn = h.syndrome(gf, r);
            for (int x : syn) CHECK(x == 0);
            rows.insert(r);
        }
        CHECK(rows.size() == 4);
    }

    // independent uniform draws collide at the birthday rate 1/2^24: with
    // 10^4 trials the expected count is ~0.0006, so none should show up
    std::uniform_int_distribution<int> sym(0, 63);
    int collisions = 0;
    for (int t = 0; t < 10000; ++t) {
        std::vector<int> u(4), v(4);
        for (int& x : u) x = sym(rng);
        for (int& x : v) x = sym(rng);
        collisions += u == v;
    }
    CHECK(collisions <= 1);

    GfContext gf2 = GfContext::with_default_poly(2);
    auto rng2 = make_rng(9);
    auto h2 = build_random_ldpc(gf2, 6, 3, 2, rng2);
    auto gen2 = derive_generator(gf2, h2);
    CHECK_THROWS_AS(sample_codewords(gf2, gen2, 65, rng2), std::domain_error);
}

TEST_CASE("parity file round trip and loader validation") {
    GfContext gf = GfContext::with_default_poly(6);
    auto rng = make_rng(55);
    auto h = build_random_ldpc(gf, 12, 8, 3, rng);

    const std::string path = "test_parity.txt";
    save_parity_file(path, h, LdpcFileMeta{3, gf.prim_poly(), 55});
    LdpcFileMeta meta;
    auto loaded = load_parity_file(path, &meta);
    CHECK(meta.col_weight == 3);
    CHECK(meta.prim_poly == gf.prim_poly());
    CHECK(meta.seed == 55);
    CHECK(loaded.checks() == h.checks());
    CHECK(loaded.slots() == h.slots());
    REQUIRE(loaded.entries().size() == h.entries().size());
    for (size_t i = 0; i < h.entries().size(); ++i) {
        CHECK(loaded.entries()[i].check == h.entries()[i].check);
        CHECK(loaded.entries()[i].slot == h.entries()[i].slot);
        CHECK(loaded.entries()[i].coeff == h.entries()[i].coeff);
    }
    std::remove(path.c_str());

    // zero coefficients and duplicate entries are rejected
    CHECK_THROWS(ParityCheckMatrix(2, 3, 64, {{0, 0, 0}}));
    CHECK_THROWS(ParityCheckMatrix(2, 3, 64, {{0, 0, 1}, {0, 0, 2}}));
    CHECK_THROWS(ParityCheckMatrix(2, 3, 64, {{0, 5, 1}}));
}

TEST_CASE("benchmark-scale constructions give connected Tanner graphs") {
    GfContext gf = GfContext::with_default_poly(6);
    struct Dims {
        int l, p;
    };
    for (Dims d : {Dims{12, 8}, Dims{18, 12}, Dims{24, 16}, Dims{48, 32}}) {
        for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
            auto rng = make_rng(seed);
            auto h = build_random_ldpc(gf, d.l, d.p, 3, rng);

            // BFS over the bipartite graph: a disconnected code factors into
            // independent subcodes and decodes far worse than its rate says
            std::vector<char> slot_seen(d.l, 0), check_seen(d.p, 0);
            std::vector<int> queue{0};
            slot_seen[0] = 1;
            while (!queue.empty()) {
                int l = queue.back();
                queue.pop_back();
                for (int e : h.slot_edges(l)) {
                    int j = h.edge(e).check;
                    if (check_seen[j]) continue;
                    check_seen[j] = 1;
                    for (int e2 : h.check_edges(j)) {
                        int l2 = h.edge(e2).slot;
                        if (!slot_seen[l2]) {
                            slot_seen[l2] = 1;
                            queue.push_back(l2);
                        }
                    }
                }
            }
            int reached = 0;
            for (char c : slot_seen) reached += c;
            CHECK(reached == d.l);
        }
    }
}

TEST_CASE("rank-deficient matrices are rejected by derive_generator") {
    GfContext gf = GfContext::with_default_poly(2);
    // two proportional rows over GF(4): rank 1 < 2
    ParityCheckMatrix h(2, 3, 4, {{0, 0, 1}, {0, 1, 1}, {1, 0, 2}, {1, 1, 2}});
    CHECK(gf_matrix_rank(gf, h) == 1);
    CHECK_THROWS_AS(derive_generator(gf, h), std::runtime_error);
}

} // TEST_SUITE
