#include <doctest.h>

#include <cmath>

#include "ura/bp.hpp"
#include "ura/protocol.hpp"
#include "ura/seeding.hpp"

using namespace ura;

namespace {

struct Fixture {
    GfContext gf = GfContext::with_default_poly(6);
    ParityCheckMatrix h;
    GeneratorForm gen;
    std::vector<SensingMatrix> dicts;
    FrameConfig base;

    Fixture() : h(make_h()), gen(derive_generator(gf, h)),
                dicts(make_dictionaries(64, 24, 12, 2)) {}

    ParityCheckMatrix make_h() {
        auto rng = make_rng(1);
        return build_random_ldpc(gf, 12, 8, 3, rng);
    }
};

BinDecoder oracle_decoder() {
    return [](const BinTask& task) { return task.truth; };
}

// Poisson tail by an independent route: per-term lgamma evaluation.
double poisson_tail_lgamma(double kappa, int k_max) {
    double cum = 0.0;
    for (int i = 0; i <= k_max; ++i)
        cum += std::exp(-kappa + i * std::log(kappa) - std::lgamma(i + 1.0));
    return 1.0 - cum;
}

} // namespace

TEST_SUITE("protocol") {

TEST_CASE("bin assignment conserves users and hits the mean load") {
    auto rng = make_rng(3);
    auto single = assign_bins(9, 1, rng);
    CHECK(single == std::vector<int>{9});

    double mean = 0.0;
    const int trials = 100000;
    for (int t = 0; t < trials; ++t) {
        auto loads = assign_bins(12, 5, rng);
        int sum = 0;
        for (int x : loads) sum += x;
        CHECK(sum == 12);
        mean += loads[2];
    }
    mean /= trials;
    CHECK(mean == doctest::Approx(12.0 / 5).epsilon(0.01));
}

TEST_CASE("scaled bin rule") {
    CHECK(scaled_zeta(4) == 1);
    CHECK(scaled_zeta(5) == 2);
    CHECK(scaled_zeta(100) == 25);
}

TEST_CASE("poisson overflow: zero load, series oracle, monotonicity") {
    CHECK(poisson_overflow(0.0, 8) == 0.0);
    for (double kappa : {0.3, 1.0, 4.0, 7.5, 12.0})
        for (int kmax : {1, 4, 8, 12})
            CHECK(std::abs(poisson_overflow(kappa, kmax) - poisson_tail_lgamma(kappa, kmax)) < 1e-12);

    double prev = -1.0;
    for (double kappa = 0.1; kappa < 12.0; kappa += 0.4) {
        double p = poisson_overflow(kappa, 8);
        CHECK(p > prev);
        prev = p;
    }
}

TEST_CASE("single oversized bin reduces to one decode; oracle gives zero error") {
    Fixture f;
    ProtocolConfig cfg{6, 1, 8};
    auto bank = DecoderBank::uniform(oracle_decoder(), 8);
    auto res = run_protocol_frame(cfg, f.base, f.gf, f.h, f.gen, f.dicts, bank, 5);
    CHECK(res.overflow_users == 0);
    CHECK(res.decoded_users == 6);
    CHECK(res.ser == 0.0);
    CHECK(res.cer == 0.0);
}

TEST_CASE("oracle per-bin decoding makes frame CER exactly the overflow fraction") {
    Fixture f;
    ProtocolConfig cfg{20, 3, 4}; // k_max 4 forces frequent overflow
    auto bank = DecoderBank::uniform(oracle_decoder(), 4);
    for (int i = 0; i < 60; ++i) {
        auto res = run_protocol_frame(cfg, f.base, f.gf, f.h, f.gen, f.dicts, bank,
                                      derive_seed(77, i));
        CHECK(res.decoded_users + res.overflow_users == 20);
        double overflow_fraction = res.overflow_users / 20.0;
        CHECK(res.cer == overflow_fraction);
        CHECK(res.ser == overflow_fraction);
        CHECK(res.cer >= overflow_fraction); // erasures lower-bound the error
    }
}

TEST_CASE("empirical overflow matches the exact binomial expectation") {
    Fixture f;
    const int k_tot = 20, zeta = 3, k_max = 8;
    // exact per-user overflow fraction: zeta * E[K 1(K > k_max)] / k_tot with
    // K ~ Binomial(k_tot, 1/zeta)
    double expect = 0.0;
    const double p = 1.0 / zeta;
    for (int i = k_max + 1; i <= k_tot; ++i) {
        double logc = std::lgamma(k_tot + 1.0) - std::lgamma(i + 1.0) - std::lgamma(k_tot - i + 1.0);
        expect += i * std::exp(logc + i * std::log(p) + (k_tot - i) * std::log1p(-p));
    }
    expect = zeta * expect / k_tot;

    ProtocolConfig cfg{k_tot, zeta, k_max};
    auto bank = DecoderBank::uniform(oracle_decoder(), k_max);
    double acc = 0.0;
    const int frames = 10000;
    auto rng = make_rng(11);
    for (int i = 0; i < frames; ++i) {
        auto loads = assign_bins(k_tot, zeta, rng);
        int over = 0;
        for (int x : loads)
            if (x > k_max) over += x;
        acc += static_cast<double>(over) / k_tot;
    }
    (void)cfg;
    (void)bank;
    CHECK(acc / frames == doctest::Approx(expect).epsilon(0.05));
}

TEST_CASE("missing decoders for legal loads are a configuration error") {
    Fixture f;
    ProtocolConfig cfg{6, 2, 4};
    DecoderBank partial;
    partial.by_load.assign(4, oracle_decoder());
    partial.by_load[2] = nullptr; // no decoder for load 3
    CHECK_THROWS_AS(run_protocol_frame(cfg, f.base, f.gf, f.h, f.gen, f.dicts, partial, 1),
                    std::invalid_argument);

    DecoderBank too_small;
    too_small.by_load.assign(2, oracle_decoder());
    CHECK_THROWS_AS(run_protocol_frame(cfg, f.base, f.gf, f.h, f.gen, f.dicts, too_small, 1),
                    std::invalid_argument);
}

TEST_CASE("protocol aggregate with a real decoder stays consistent") {
    Fixture f;
    ProtocolConfig cfg{8, 2, 8};
    BinDecoder sic = [&](const BinTask& task) {
        return sic_decode(task.evidence, task.gf, task.h, task.load, BpConfig{}).grid;
    };
    auto agg = run_protocol(cfg, f.base, f.gf, f.h, f.gen, f.dicts,
                            DecoderBank::uniform(sic, 8), 40, 5);
    CHECK(agg.frames == 40);
    CHECK(agg.ser >= 0.0);
    CHECK(agg.cer >= agg.ser - 1e-12);
    CHECK(agg.overflow_rate == 0.0); // k_max = 8 >= any load of 8 users
}

} // TEST_SUITE
