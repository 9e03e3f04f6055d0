#include <doctest.h>

#include <cmath>
#include <set>

#include "ura/metrics.hpp"
#include "ura/refine.hpp"
#include "ura/seeding.hpp"

using namespace ura;

namespace {

struct Fixture {
    GfContext gf = GfContext::with_default_poly(6);
    ParityCheckMatrix h;
    EvidenceMatrix s;

    Fixture() : h(make_h()), s(12, 64, -1.0) {}

    ParityCheckMatrix make_h() {
        auto rng = make_rng(5);
        return build_random_ldpc(gf, 12, 8, 3, rng);
    }

    SymbolGrid random_truth(int k, std::uint64_t seed) const {
        SymbolGrid t(k, 12);
        auto rng = make_rng(seed);
        std::uniform_int_distribution<int> sym(0, 63);
        for (int& x : t.v) x = sym(rng);
        return t;
    }
};

// Denoiser that counts calls and then defers to the oracle.
class CountingDenoiser : public Denoiser {
public:
    CountingDenoiser(SymbolGrid truth) : oracle_(std::move(truth)) {}
    LogitGrid logits(const MaskedGrid& x, const EvidenceMatrix& s, const ParityCheckMatrix& h,
                     double mask_ratio) const override {
        ++calls;
        last_ratio = mask_ratio;
        return oracle_.logits(x, s, h, mask_ratio);
    }
    mutable int calls = 0;
    mutable double last_ratio = 1.0;

private:
    OracleDenoiser oracle_;
};

class ThrowingDenoiser : public Denoiser {
public:
    LogitGrid logits(const MaskedGrid&, const EvidenceMatrix&, const ParityCheckMatrix&,
                     double) const override {
        throw std::runtime_error("boom");
    }
};

} // namespace

TEST_SUITE("refine") {

TEST_CASE("cosine fraction endpoints and midpoint") {
    CHECK(cosine_fraction(0, 10) == 0.0);
    CHECK(cosine_fraction(10, 10) == doctest::Approx(1.0));
    CHECK(cosine_fraction(5, 10) == doctest::Approx(0.5));
    CHECK_THROWS_AS(cosine_fraction(-1, 10), std::domain_error);
    CHECK_THROWS_AS(cosine_fraction(11, 10), std::domain_error);
}

TEST_CASE("temperature annealing endpoints and degenerate cases") {
    CHECK(infer_temperature(1, 8, 2.0, 0.5) == doctest::Approx(2.0));
    CHECK(infer_temperature(8, 8, 2.0, 0.5) == doctest::Approx(0.5));
    CHECK(infer_temperature(1, 1, 2.0, 0.5) == doctest::Approx(0.5)); // T = 1
    for (int t = 1; t <= 6; ++t) CHECK(infer_temperature(t, 6, 0.9, 0.9) == doctest::Approx(0.9));
    // monotone non-increasing across steps
    double prev = 1e9;
    for (int t = 1; t <= 12; ++t) {
        double tau = infer_temperature(t, 12, 3.0, 0.25);
        CHECK(tau <= prev + 1e-12);
        prev = tau;
    }
}

TEST_CASE("remask step count formula") {
    CHECK(remask_steps(74, 3, 8) == 27);
    CHECK(remask_steps(12, 0, 4) == 1);
    CHECK(remask_steps(12, 4, 4) == 12);
    CHECK(remask_steps(5, 1, 8) == 1);
    for (int t : {1, 12, 24, 50, 62, 74})
        for (int k = 1; k <= 8; ++k)
            for (int low = 0; low <= k; ++low)
                CHECK(remask_steps(t, low, k) == std::max(1, (t * low) / k));
}

TEST_CASE("remask config validation and per-load presets") {
    validate_remask_config(RemaskConfig{{0.96, 0.90, 0.85}});
    CHECK_THROWS_AS(validate_remask_config(RemaskConfig{{0.9, 0.9}}), std::domain_error);
    CHECK_THROWS_AS(validate_remask_config(RemaskConfig{{0.5, 0.7}}), std::domain_error);
    CHECK_THROWS_AS(validate_remask_config(RemaskConfig{{1.2}}), std::domain_error);

    CHECK(default_remask_thresholds(7) == std::vector<double>{0.96, 0.90});
    CHECK(default_remask_thresholds(6) == std::vector<double>{0.97});
    CHECK(default_remask_thresholds(2).empty());
    CHECK(default_steps_for_load(8) == 74);
    CHECK(default_steps_for_load(2) == 12);
}

TEST_CASE("first reveal anchors exactly one site per slot") {
    Fixture f;
    auto truth = f.random_truth(4, 1);
    OracleDenoiser den(truth);
    auto x0 = all_masked_grid(4, 12);
    auto lam = den.logits(x0, f.s, f.h, 1.0);

    auto x1 = reveal_step(x0, lam, 0, 1.0, true);
    CHECK(x1.masked_count() == 4 * 12 - 12);
    for (int l = 0; l < 12; ++l) {
        int revealed = 0;
        for (int k = 0; k < 4; ++k) revealed += x1.at(k, l) != kMaskToken;
        CHECK(revealed == 1);
    }
}

TEST_CASE("reveal step honors the target and keeps already-revealed sites") {
    Fixture f;
    auto truth = f.random_truth(2, 2);
    OracleDenoiser den(truth);
    auto x0 = all_masked_grid(2, 12);
    auto lam = den.logits(x0, f.s, f.h, 1.0);

    auto same = reveal_step(x0, lam, 0, 1.0, false);
    CHECK(same.masked_count() == 24);

    auto x1 = reveal_step(x0, lam, 7, 1.0, false);
    CHECK(x1.masked_count() == 24 - 7);
    auto x2 = reveal_step(x1, lam, 7, 1.0, false);
    CHECK(x2.v == x1.v); // target already met

    auto x3 = reveal_step(x1, lam, 20, 1.0, false);
    CHECK(x3.masked_count() == 4);
    for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 12; ++l)
            if (x1.at(k, l) != kMaskToken) CHECK(x3.at(k, l) == x1.at(k, l));
}

TEST_CASE("oracle refinement recovers the truth for every tested shape") {
    Fixture f;
    for (auto [k, t] : std::vector<std::pair<int, int>>{{1, 4}, {2, 12}, {4, 42}, {8, 74}}) {
        int failures = 0;
        for (int trial = 0; trial < 50; ++trial) {
            auto truth = f.random_truth(k, 100 + trial);
            OracleDenoiser den(truth);
            RevealSchedule sched;
            sched.steps = t;
            auto out = run_refinement(den, f.s, f.h, sched, k, 12);
            failures += !(out == truth);
        }
        CHECK(failures == 0);
    }
}

TEST_CASE("t=1 degenerates to a single-shot argmax decode") {
    Fixture f;
    auto truth = f.random_truth(3, 9);
    CountingDenoiser den(truth);
    RevealSchedule sched;
    sched.steps = 1;
    auto out = run_refinement(den, f.s, f.h, sched, 3, 12);
    CHECK(out == truth);
    CHECK(den.calls == 2); // one reveal step + the mask-ratio-0 pass
    CHECK(den.last_ratio == 0.0);
}

TEST_CASE("reveal counts follow the cosine targets within rounding") {
    Fixture f;
    const int k = 4, t_steps = 16;
    auto truth = f.random_truth(k, 77);
    OracleDenoiser den(truth);
    RevealSchedule sched;
    sched.steps = t_steps;
    RefineTrace trace;
    auto out = run_refinement(den, f.s, f.h, sched, k, 12, &trace);
    CHECK(out == truth);
    REQUIRE(static_cast<int>(trace.reveal_counts.size()) == t_steps);

    CHECK(trace.reveal_counts[0] == 12); // first-reveal: one per slot
    CHECK(trace.first_step_sites.size() == 12);

    int revealed = 0;
    for (int t = 1; t <= t_steps; ++t) {
        revealed += trace.reveal_counts[t - 1];
        int target = static_cast<int>(std::lround(cosine_fraction(t, t_steps) * k * 12));
        if (t == 1)
            CHECK(revealed == 12);
        else
            CHECK(std::abs(revealed - std::max(target, 12)) <= 1);
        CHECK(trace.reveal_counts[t - 1] >= 0);
    }
    CHECK(revealed == k * 12); // fully revealed at t = T
}

TEST_CASE("masked set shrinks monotonically and empties by step T") {
    Fixture f;
    auto truth = f.random_truth(4, 31);
    OracleDenoiser den(truth);
    RevealSchedule sched;
    sched.steps = 9;
    RefineTrace trace;
    run_refinement(den, f.s, f.h, sched, 4, 12, &trace);
    for (int c : trace.reveal_counts) CHECK(c >= 0);
    int total = 0;
    for (int c : trace.reveal_counts) total += c;
    CHECK(total == 48);
}

TEST_CASE("refinement is deterministic") {
    Fixture f;
    auto truth = f.random_truth(4, 5);
    StructuredDenoiser den(f.gf, DenoiserParams::random_init(64, 24, 3));
    RevealSchedule sched;
    sched.steps = 8;
    sched.tau_max = 1.7;
    sched.tau_min = 0.3;
    auto a = run_refinement(den, f.s, f.h, sched, 4, 12);
    auto b = run_refinement(den, f.s, f.h, sched, 4, 12);
    CHECK(a == b);
}

TEST_CASE("denoiser failures surface the step index") {
    Fixture f;
    ThrowingDenoiser den;
    RevealSchedule sched;
    sched.steps = 3;
    CHECK_THROWS_WITH_AS(run_refinement(den, f.s, f.h, sched, 2, 12),
                         "denoiser failed at step 1: boom", std::runtime_error);
}

TEST_CASE("row confidence averages per-token scores") {
    CHECK(row_confidence({{0.5, 0.5}, {1.0, 0.0}}) == std::vector<double>{0.5, 0.5});
    auto c = row_confidence({{1.0, 1.0, 1.0}, {0.0, 0.0, 0.0}});
    CHECK(c[0] == 1.0);
    CHECK(c[1] == 0.0);

    auto rng = make_rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<std::vector<double>> scores(3, std::vector<double>(9));
        for (auto& row : scores)
            for (double& x : row) x = u(rng);
        auto conf = row_confidence(scores);
        for (int k = 0; k < 3; ++k) {
            double mean = 0.0;
            for (double x : scores[k]) mean += x;
            mean /= 9.0;
            CHECK(std::abs(conf[k] - mean) < 1e-12);
        }
    }
}

TEST_CASE("remask pass repairs corrupted rows and clamps the rest bitwise") {
    Fixture f;
    auto truth = f.random_truth(8, 13);
    OracleDenoiser den(truth);

    SymbolGrid corrupted = truth;
    for (int l = 0; l < 12; ++l) {
        corrupted.at(2, l) = (truth.at(2, l) + 1 + l) % 64;
        corrupted.at(5, l) = (truth.at(5, l) + 7) % 64;
    }
    OracleRowScorer scorer(truth);
    auto conf = scorer.score_rows(corrupted, LogitGrid(8, 12, 64));
    CHECK(conf[2] == 0.0);
    CHECK(conf[5] == 0.0);
    CHECK(conf[0] == 1.0);

    RevealSchedule sched;
    sched.steps = 74;
    RefineTrace trace;
    auto merged = remask_pass(corrupted, conf, 0.5, den, f.s, f.h, sched, &trace);
    CHECK(merged == truth);
    REQUIRE(trace.remask_rows_per_stage.size() == 1);
    CHECK(trace.remask_rows_per_stage[0] == 2);
    CHECK(trace.remask_steps_per_stage[0] == remask_steps(74, 2, 8));

    // clamped rows bit-identical even against an adversarial denoiser: use a
    // denoiser whose truth DIFFERS on a clamped row
    SymbolGrid other = truth;
    for (int l = 0; l < 12; ++l) other.at(0, l) = (truth.at(0, l) + 3) % 64;
    OracleDenoiser den2(other);
    auto merged2 = remask_pass(corrupted, conf, 0.5, den2, f.s, f.h, sched);
    for (int l = 0; l < 12; ++l) CHECK(merged2.at(0, l) == corrupted.at(0, l));

    // all confidences above threshold: untouched grid
    auto noop = remask_pass(corrupted, std::vector<double>(8, 0.99), 0.5, den, f.s, f.h, sched);
    CHECK(noop == corrupted);
}

TEST_CASE("run_with_remasking drives the structured denoiser deterministically") {
    Fixture f;
    StructuredDenoiser den(f.gf, DenoiserParams::random_init(64, 24, 11));
    MaxProbScorer scorer;
    RevealSchedule sched;
    sched.steps = 10;
    RemaskConfig cfg{{0.96, 0.90}};
    RefineTrace t1, t2;
    auto a = run_with_remasking(den, scorer, f.s, f.h, sched, cfg, 6, 12, &t1);
    auto b = run_with_remasking(den, scorer, f.s, f.h, sched, cfg, 6, 12, &t2);
    CHECK(a == b);
    CHECK(a.rows == 6);
    CHECK(a.cols == 12);
    for (int x : a.v) {
        CHECK(x >= 0);
        CHECK(x < 64);
    }
    CHECK(t1.remask_rows_per_stage == t2.remask_rows_per_stage);
    // every remask stage obeys the step formula
    for (size_t i = 0; i < t1.remask_rows_per_stage.size(); ++i)
        CHECK(t1.remask_steps_per_stage[i] == remask_steps(10, t1.remask_rows_per_stage[i], 6));
}

TEST_CASE("run_with_remasking: zero stages equals plain refinement; oracle repairs in one stage") {
    Fixture f;
    auto truth = f.random_truth(7, 29);
    OracleDenoiser den(truth);
    OracleRowScorer scorer(truth);
    RevealSchedule sched;
    sched.steps = 62;

    auto plain = run_refinement(den, f.s, f.h, sched, 7, 12);
    auto none = run_with_remasking(den, scorer, f.s, f.h, sched, RemaskConfig{}, 7, 12);
    CHECK(none == plain);

    RemaskConfig cfg{{0.96, 0.90}};
    RefineTrace trace;
    auto out = run_with_remasking(den, scorer, f.s, f.h, sched, cfg, 7, 12, &trace);
    CHECK(out == truth);
    // oracle first pass is already perfect, so no stage should trigger
    CHECK(trace.remask_rows_per_stage.empty());
}

} // TEST_SUITE
