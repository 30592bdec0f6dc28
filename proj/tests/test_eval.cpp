#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "touchauth/error.hpp"
#include "touchauth/eval.hpp"
#include "touchauth/presets.hpp"

using namespace touchauth;

namespace {

LabeledScores scores(std::vector<double> valid, std::vector<double> invalid,
                     std::size_t valid_gated = 0, std::size_t invalid_gated = 0) {
    LabeledScores s;
    s.valid_scores = std::move(valid);
    s.invalid_scores = std::move(invalid);
    s.valid_gated = valid_gated;
    s.invalid_gated = invalid_gated;
    s.n_trials = std::max(s.n_valid(), s.n_invalid());
    return s;
}

ScenarioSpec ideal_pair() {
    ScenarioSpec s = presets::calibrated_default();
    for (auto& b : s.bodies) b.amplitude_log_sigma = 0.0;
    for (auto& p : s.placements) {
        p.noise_std = 0.0;
        if (p.role != Role::Invalid) p.coupling = 1.0;
    }
    return s;
}

}  // namespace

TEST_CASE("single noiseless coupled trial scores one") {
    const LabeledScores s = run_trials(ideal_pair(), DetectorConfig{}, 1, 9);
    REQUIRE(s.valid_scores.size() == 1);
    CHECK(s.valid_scores[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(s.n_trials == 1);
}

TEST_CASE("sub-gate bodies gate every trial") {
    ScenarioSpec sc = presets::calibrated_default();
    for (auto& b : sc.bodies) {
        b.amplitude_volts = 0.01;
        b.amplitude_log_sigma = 0.0;
    }
    for (auto& p : sc.placements) p.noise_std = 0.0;
    const LabeledScores s = run_trials(sc, DetectorConfig{}, 50, 1);
    CHECK(s.valid_scores.empty());
    CHECK(s.invalid_scores.empty());
    CHECK(s.valid_gated == 50);
    CHECK(s.invalid_gated == 50);
    CHECK_THROWS_AS(roc(s), InvalidArgument);
}

TEST_CASE("run_trials needs the labeled roles") {
    ScenarioSpec sc = presets::calibrated_default();
    sc.placements.pop_back();
    CHECK_THROWS_AS(run_trials(sc, DetectorConfig{}, 3, 1), InvalidArgument);
}

TEST_CASE("roc counts strictly above eta") {
    const LabeledScores s = scores({0.9, 0.95}, {0.1, 0.8});
    const std::vector<double> grid{0.05, 0.85, 0.99};
    const RocCurve c = roc(s, grid);
    REQUIRE(c.points.size() == 3);
    CHECK(c.points[0].alpha == 1.0);
    CHECK(c.points[0].beta == 1.0);
    CHECK(c.points[1].alpha == 0.0);
    CHECK(c.points[1].beta == 1.0);
    CHECK(c.points[2].alpha == 0.0);
    CHECK(c.points[2].beta == 0.0);
    const std::vector<double> at_score{0.9};
    CHECK(roc(s, at_score).points[0].beta == 0.5);
}

TEST_CASE("gated trials are rejections in both denominators") {
    const LabeledScores s = scores({0.9, 0.7}, {0.2}, 2, 1);
    const TrialTally t = tally(s, 0.5);
    CHECK(t.n_valid == 4);
    CHECK(t.n_invalid == 2);
    CHECK(t.n_true_accept == 2);
    CHECK(t.n_false_accept == 0);
    CHECK(t.beta() == 0.5);
    const RocCurve c = roc(s);
    CHECK(c.points.front().beta == 0.5);
    CHECK(c.points.front().alpha == 0.5);
}

TEST_CASE("empirical grid starts one ulp below the smallest score") {
    const LabeledScores s = scores({0.3, 0.9, 0.9}, {0.1, 0.3});
    const auto g = empirical_eta_grid(s);
    REQUIRE(g.size() == 4);
    CHECK(g[0] == std::nextafter(0.1, -1.0));
    CHECK(g[1] == 0.1);
    CHECK(g[2] == 0.3);
    CHECK(g[3] == 0.9);
}

TEST_CASE("np_threshold") {
    const LabeledScores s = scores({0.6, 0.7, 0.8, 0.9}, {0.1, 0.2, 0.65, 0.75});
    const RocCurve c = roc(s);
    SUBCASE("bound 1 returns the global maximum beta at the smallest eta") {
        const OperatingPoint op = np_threshold(c, 1.0);
        CHECK(op.beta == 1.0);
        CHECK(op.eta == c.points.front().eta);
    }
    SUBCASE("bound 0") {
        const OperatingPoint op = np_threshold(c, 0.0);
        CHECK(op.alpha == 0.0);
        CHECK(op.eta == 0.75);
        CHECK(op.beta == 0.5);
    }
    SUBCASE("bound 0.25") {
        const OperatingPoint op = np_threshold(c, 0.25);
        CHECK(op.eta == 0.65);
        CHECK(op.beta == 0.75);
    }
    SUBCASE("infeasible") {
        const std::vector<double> low{0.0, 0.05};
        CHECK_THROWS_AS(np_threshold(roc(s, low), 0.5), NoFeasibleThreshold);
    }
    SUBCASE("bad bound") { CHECK_THROWS_AS(np_threshold(c, 1.5), InvalidArgument); }
}

TEST_CASE("random score sets give well-formed curves and feasible thresholds") {
    std::mt19937_64 g(17);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int rep = 0; rep < 300; ++rep) {
        std::vector<double> v(1 + g() % 40), w(1 + g() % 40);
        for (auto& x : v) x = std::round(u(g) * 20) / 20;  // ties on purpose
        for (auto& x : w) x = std::round(u(g) * 20) / 20;
        const LabeledScores s = scores(v, w, g() % 3, g() % 3);
        const RocCurve c = roc(s);
        CHECK(is_well_formed(c));
        for (const RocPoint& p : c.points) {
            const TrialTally t = tally(s, p.eta);
            CHECK(p.beta == static_cast<double>(t.n_true_accept) / static_cast<double>(t.n_valid));
            CHECK(p.alpha == static_cast<double>(t.n_false_accept) / static_cast<double>(t.n_invalid));
        }
        const double bound = u(g);
        const OperatingPoint op = np_threshold(c, bound);
        CHECK(op.alpha <= bound);
    }
}

TEST_CASE("trials are schedule independent") {
    const ScenarioSpec sc = presets::mimicry();
    const LabeledScores a = run_trials(sc, DetectorConfig{}, 60, 3, 1);
    const LabeledScores b = run_trials(sc, DetectorConfig{}, 60, 3, 4);
    CHECK(a.valid_scores == b.valid_scores);
    CHECK(a.invalid_scores == b.invalid_scores);
    CHECK(a.attacker_scores == b.attacker_scores);
    CHECK(a.valid_gated == b.valid_gated);
}

TEST_CASE("calibrated defaults separate the classes") {
    const LabeledScores s = run_trials(presets::calibrated_default(), DetectorConfig{}, 500, 21);
    double mv = 0, mi = 0;
    for (double x : s.valid_scores) mv += x;
    for (double x : s.invalid_scores) mi += x;
    CHECK(mv / static_cast<double>(s.valid_scores.size()) >
          mi / static_cast<double>(s.invalid_scores.size()));
    const OperatingPoint op = np_threshold(roc(s), 0.02);
    CHECK(op.alpha <= 0.02);
    CHECK(op.beta >= 0.94);
}

TEST_CASE("beta_vs_length") {
    const ScenarioSpec sc = presets::calibrated_default();
    DetectorConfig cfg;
    SUBCASE("single length reproduces np_threshold") {
        const std::vector<double> one{1.0};
        const auto rows = beta_vs_length(sc, cfg, one, 0.02, 200, 4);
        const OperatingPoint op = np_threshold(roc(run_trials(sc, cfg, 200, 4)), 0.02);
        REQUIRE(rows.size() == 1);
        CHECK(rows[0].beta == op.beta);
        CHECK(rows[0].eta == op.eta);
    }
    SUBCASE("beta does not fall with length") {
        const std::vector<double> ls{1.0, 5.0};
        const auto rows = beta_vs_length(sc, cfg, ls, 0.02, 500, 8);
        CHECK(rows[1].beta >= rows[0].beta - 0.01);
    }
    SUBCASE("lengths must be positive") {
        const std::vector<double> bad{0.0};
        CHECK_THROWS_AS(beta_vs_length(sc, cfg, bad, 0.02, 10, 1), InvalidArgument);
    }
}

TEST_CASE("mimicry acceptance falls with signal length") {
    const std::vector<double> ls{0.1, 1.0};
    const auto rows = mimicry_sweep(presets::mimicry(), DetectorConfig{}, ls, 0.02, 500, 12);
    REQUIRE(rows.size() == 2);
    CHECK(rows[1].attack_far < rows[0].attack_far);
    CHECK(rows[0].baseline_alpha <= 0.02);
    CHECK(rows[1].baseline_alpha <= 0.02);
}

TEST_CASE("sdr report") {
    SUBCASE("identical pair hits the sentinel") {
        const auto r = sdr_report(ideal_pair(), 3, 1);
        REQUIRE(!r.empty());
        CHECK(r[0].pairing == "authenticator:valid_authenticatee");
        CHECK(r[0].mean_db < kScoreMax);  // 0.85 gain mismatch
        ScenarioSpec sc = ideal_pair();
        sc.placements[1].location_gain = 1.0;
        CHECK(sdr_report(sc, 3, 1)[0].mean_db == kScoreMax);
    }
    SUBCASE("noise-only difference matches the analytic power ratio") {
        ScenarioSpec sc = presets::calibrated_default();
        for (auto& b : sc.bodies) b.amplitude_log_sigma = 0.0;
        sc.placements[1].location_gain = 1.0;
        for (auto& p : sc.placements) {
            if (p.role != Role::Invalid) p.coupling = 1.0;
        }
        const double a = sc.field.base_amplitude_volts;
        const double d = sc.bodies[0].movement_envelope->envelope_depth;
        double h2 = 0.0;
        for (const auto& h : sc.field.harmonics) h2 += h.relative_amplitude * h.relative_amplitude;
        const double noise2 = 0.02 * 0.02;
        const double ps = a * a * (1.0 + d * d * 0.25) * h2 / 2.0 + noise2;
        const double expected_db = 10.0 * std::log10(ps / (2.0 * noise2));
        const auto r = sdr_report(sc, 200, 2);
        CHECK(r[0].mean_db == doctest::Approx(expected_db).epsilon(0.03));
        CHECK(std::fabs(r[0].mean_db - 17.5) <= 1.0);
    }
}

TEST_CASE("APCC is at least as good as reciprocal RMSE at two percent") {
    const ScenarioSpec sc = presets::calibrated_default();
    DetectorConfig apcc_cfg, rmse_cfg;
    rmse_cfg.metric = Metric::RmseRecip;
    const double b_apcc = np_threshold(roc(run_trials(sc, apcc_cfg, 500, 31)), 0.02).beta;
    const double b_rmse = np_threshold(roc(run_trials(sc, rmse_cfg, 500, 31)), 0.02).beta;
    CHECK(b_apcc >= b_rmse);
}

TEST_CASE("CSV writers emit the documented headers") {
    const RocCurve c = roc(scores({0.9}, {0.1}));
    std::ostringstream os;
    write_roc_csv(os, c);
    CHECK(os.str().rfind("eta,alpha,beta,frr\n", 0) == 0);
    std::ostringstream sw;
    const std::vector<LengthBeta> rows{{1.0, 0.02, 0.95, 0.5}};
    write_sweep_csv(sw, rows);
    CHECK(sw.str() == "length_s,alpha_bound,beta\n1,0.02,0.95\n");
    std::ostringstream sd;
    const std::vector<SdrSummary> srows{{"a:b", 17.5, 1.0, 10}};
    write_sdr_csv(sd, srows);
    CHECK(sd.str() == "pairing,mean_sdr_db,std_sdr_db\na:b,17.5,1\n");
}
