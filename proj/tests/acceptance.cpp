// Acceptance suite: one PASS/FAIL line per criterion, exit status 0 only
// when every criterion holds.
#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "touchauth/commitment.hpp"
#include "touchauth/detector.hpp"
#include "touchauth/error.hpp"
#include "touchauth/eval.hpp"
#include "touchauth/presets.hpp"
#include "touchauth/protocol.hpp"

using namespace touchauth;
namespace fs = std::filesystem;

namespace {

struct Check {
    bool ok = true;
    std::string note;
    void expect(bool cond, const std::string& what) {
        if (!cond && ok) note = what;
        ok = ok && cond;
    }
};

Trace make(std::vector<double> v) {
    Trace t;
    t.samples = std::move(v);
    return t;
}

std::vector<double> sine(std::size_t n, double f, double amp, double phase, double t0 = 0.0) {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) {
        v[i] = amp * std::sin(2.0 * M_PI * f * (t0 + static_cast<double>(i) / kDefaultSampleRate) + phase);
    }
    return v;
}

std::vector<double> noise(std::mt19937_64& g, std::size_t n, double sd) {
    std::normal_distribution<double> d(0.0, sd);
    std::vector<double> v(n);
    for (double& x : v) x = d(g);
    return v;
}

// Plain long-double references, independent of the library kernels.
double ref_apcc(const std::vector<double>& x, const std::vector<double>& y) {
    long double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) mx += x[i], my += y[i];
    mx /= x.size();
    my /= y.size();
    long double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    return static_cast<double>(std::fabs(sxy / std::sqrt(sxx * syy)));
}

double ref_rmse(const std::vector<double>& x, const std::vector<double>& y) {
    long double s = 0;
    for (std::size_t i = 0; i < x.size(); ++i) s += (long double)(x[i] - y[i]) * (x[i] - y[i]);
    return static_cast<double>(std::sqrt(s / x.size()));
}

Check metric_exactness() {
    Check c;
    std::mt19937_64 g(1);
    std::uniform_int_distribution<std::size_t> len(2, 700);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    for (int rep = 0; rep < 10000; ++rep) {
        const std::size_t n = len(g);
        const auto x = noise(g, n, std::exp(u(g) / 2));
        const auto y = noise(g, n, std::exp(u(g) / 2));
        const auto z = noise(g, n, std::exp(u(g) / 2));
        const Trace tx = make(x), ty = make(y), tz = make(z);
        const double r = apcc(tx, ty);
        c.expect(std::fabs(r - ref_apcc(x, y)) < 1e-9, "apcc differs from reference");
        c.expect(r >= 0.0 && r <= 1.0, "apcc outside [0, 1]");
        c.expect(std::fabs(r - apcc(ty, tx)) < 1e-9, "apcc not symmetric");
        double a = u(g);
        if (std::fabs(a) < 1e-3) a = 1.0;
        const double b = u(g);
        std::vector<double> ax(x);
        for (double& v : ax) v = a * v + b;
        c.expect(std::fabs(apcc(make(ax), ty) - r) < 1e-9, "apcc not affine invariant");

        const double dxy = rmse(tx, ty), dyx = rmse(ty, tx);
        c.expect(std::fabs(dxy - ref_rmse(x, y)) < 1e-9, "rmse differs from reference");
        c.expect(dxy >= 0.0 && std::fabs(dxy - dyx) < 1e-9, "rmse not symmetric");
        c.expect(rmse(tx, tx) == 0.0 && dxy > 0.0, "rmse identity");
        c.expect(rmse(tx, tz) <= dxy + rmse(ty, tz) + 1e-9, "rmse triangle inequality");
    }
    return c;
}

Check clock_offset_null() {
    Check c;
    const std::size_t n = samples_for(1.0, kDefaultSampleRate);
    const Trace s = make(sine(n, 50.0, 0.3, 0.0));
    for (double off : {-0.005, 0.005}) {
        const double r = apcc(s, make(sine(n, 50.0, 0.3, 0.0, off)));
        c.expect(r < 0.01, "quarter period offset not null");
    }
    c.expect(apcc(s, make(sine(n, 50.0, 0.3, 0.0, 0.010))) > 0.99, "half period offset not correlated");
    return c;
}

Check gate_behavior() {
    Check c;
    DetectorConfig cfg;
    cfg.threshold_eta = 0.5;
    const std::size_t n = samples_for(1.0, kDefaultSampleRate);
    std::size_t failures = 0;
    const Trace constant = make(std::vector<double>(n, 0.7));
    std::mt19937_64 g(3);
    std::uniform_real_distribution<double> ph(0.0, 2.0 * M_PI);
    for (int seed = 0; seed < 1000; ++seed) {
        const Trace quiet = make(noise(g, n, 0.01));
        const Trace tone = make(sine(n, 50.0, 0.3, ph(g)));
        failures += detect(cfg, constant, tone).outcome != Outcome::RejectGate;
        failures += detect(cfg, tone, quiet).outcome != Outcome::RejectGate;
        failures += !gate(tone, kDefaultGateStd);
    }
    c.expect(static_cast<double>(failures) / 3000.0 < 1e-3, std::to_string(failures) + " gate failures");
    return c;
}

Check roc_properties() {
    Check c;
    std::mt19937_64 g(4);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int k = 0; k < 100; ++k) {
        ScenarioSpec sc = presets::calibrated_default();
        for (auto& p : sc.placements) {
            p.coupling = 0.3 + 0.7 * u(g);
            p.noise_std = 0.005 + 0.15 * u(g);
            p.location_gain = 0.2 + 1.5 * u(g);
        }
        sc.length_seconds = 0.2 + 2.0 * u(g);
        DetectorConfig cfg;
        cfg.metric = u(g) < 0.5 ? Metric::Apcc : Metric::RmseRecip;
        cfg.signal_length_seconds = sc.length_seconds;
        const LabeledScores s = run_trials(sc, cfg, 60, g());
        if (s.valid_scores.empty() || s.invalid_scores.empty()) continue;
        const RocCurve curve = roc(s);
        c.expect(is_well_formed(curve), "malformed curve");
        for (std::size_t i = 1; i < curve.points.size(); ++i) {
            c.expect(curve.points[i].alpha <= curve.points[i - 1].alpha, "alpha increases");
            c.expect(curve.points[i].beta <= curve.points[i - 1].beta, "beta increases");
        }
        for (const auto& p : curve.points) c.expect(p.frr == 1.0 - p.beta, "frr != 1 - beta");
        for (double bound : {0.0, 0.01, 0.02, 0.1, 0.5, 1.0}) {
            try {
                const OperatingPoint op = np_threshold(curve, bound);
                c.expect(op.alpha <= bound, "np_threshold exceeds bound");
                c.expect(tally(s, op.eta).alpha() <= bound, "np_threshold eta exceeds bound on data");
            } catch (const NoFeasibleThreshold&) {
                c.expect(bound < 1.0, "alpha bound 1 infeasible");
            }
        }
    }
    return c;
}

Check calibrated_detection() {
    Check c;
    const double lengths[] = {1.0, 5.0};
    const auto rows = beta_vs_length(presets::calibrated_default(), DetectorConfig{}, lengths, 0.02, 500, 1);
    c.expect(rows[0].beta >= 0.92, "beta(1 s) = " + std::to_string(rows[0].beta));
    c.expect(rows[1].beta >= 0.97, "beta(5 s) = " + std::to_string(rows[1].beta));
    c.note = "beta(1 s)=" + std::to_string(rows[0].beta) + " beta(5 s)=" + std::to_string(rows[1].beta) +
             (c.ok ? "" : " " + c.note);
    return c;
}

Check metric_ordering() {
    Check c;
    // Both metrics score the same synthesized pairs: trial seeds do not
    // depend on the metric.
    DetectorConfig a;
    DetectorConfig r;
    r.metric = Metric::RmseRecip;
    const double ba = np_threshold(roc(run_trials(presets::calibrated_default(), a, 500, 1)), 0.02).beta;
    const double br = np_threshold(roc(run_trials(presets::calibrated_default(), r, 500, 1)), 0.02).beta;
    c.expect(ba >= br, "APCC below RMSE");
    c.note = "apcc beta=" + std::to_string(ba) + " rmse beta=" + std::to_string(br);
    return c;
}

Check mimicry_mitigation() {
    Check c;
    const double lengths[] = {0.1, 1.0};
    const auto rows = mimicry_sweep(presets::mimicry(), DetectorConfig{}, lengths, 0.02, 500, 1);
    c.expect(rows[1].attack_far <= rows[0].attack_far, "FAR does not fall with length");
    c.expect(rows[1].attack_far <= 0.05, "FAR(1 s) above 0.05");
    c.note = "far(0.1 s)=" + std::to_string(rows[0].attack_far) + " far(1 s)=" + std::to_string(rows[1].attack_far);
    return c;
}

double session_eta() {
    return np_threshold(roc(run_trials(presets::calibrated_default(), DetectorConfig{}, 500, 777)), 0.02).eta;
}

Check protocol_security() {
    Check c;
    DetectorConfig d;
    d.threshold_eta = session_eta();
    SessionConfig cfg = SessionConfig::for_length(d, 1.0);
    cfg.authenticatee_placement = "invalid_authenticatee";
    const ScenarioSpec sc = presets::calibrated_default();
    const SessionAdversary echo = adversary_from_name("echo-mitm");
    std::size_t naive_ok = 0, full_ok = 0;
    for (std::uint64_t i = 0; i < 500; ++i) {
        naive_ok += run_seeded(ProtocolVariant::Naive, cfg, sc, echo, derive_seed(8, i)).outcome ==
                    SessionOutcome::Accepted;
        full_ok += run_seeded(ProtocolVariant::Full, cfg, sc, echo, derive_seed(8, i)).outcome ==
                   SessionOutcome::Accepted;
    }
    c.expect(naive_ok >= 495, "naive echo accepted only " + std::to_string(naive_ok));
    c.expect(full_ok == 0, "committed protocol accepted an echo");

    Rng rng = make_rng(8);
    for (int rep = 0; rep < 20; ++rep) {
        std::vector<std::uint8_t> payload(1 + rep * 37);
        for (auto& b : payload) b = static_cast<std::uint8_t>(rng());
        const auto nonce = make_nonce(rng);
        const Commitment cm = commit(payload, nonce);
        c.expect(verify_commit(cm, payload, nonce), "commitment round trip");
        for (std::size_t bit = 0; bit < payload.size() * 8; ++bit) {
            auto p = payload;
            p[bit / 8] ^= static_cast<std::uint8_t>(1u << (bit % 8));
            c.expect(!verify_commit(cm, p, nonce), "payload bit flip accepted");
        }
        for (std::size_t bit = 0; bit < nonce.size() * 8; ++bit) {
            auto n = nonce;
            n[bit / 8] ^= static_cast<std::uint8_t>(1u << (bit % 8));
            c.expect(!verify_commit(cm, payload, n), "nonce bit flip accepted");
        }
    }
    c.note = "naive " + std::to_string(naive_ok) + "/500, full " + std::to_string(full_ok) + "/500" +
             (c.ok ? "" : " " + c.note);
    return c;
}

Check end_to_end_consistency() {
    Check c;
    DetectorConfig d;
    d.threshold_eta = session_eta();
    const SessionConfig cfg = SessionConfig::for_length(d, 1.0);
    const ScenarioSpec sc = presets::calibrated_default();
    const std::size_t n = samples_for(cfg.detector.signal_length_seconds, kDefaultSampleRate);
    std::size_t agree = 0, decided = 0;
    for (std::uint64_t i = 0; i < 500; ++i) {
        const std::uint64_t seed = derive_seed(9, i);
        const SessionResult r = run_seeded(ProtocolVariant::Full, cfg, sc, adversary_from_name("none"), seed);
        ScenarioSpec spec = sc;
        spec.seed = derive_seed(seed, stream::session);
        const TraceSet t = synthesize_scenario(session_scenario(spec, cfg));
        const Trace s = capture_window(t.at("authenticator"), {r.authenticator_offset, 0.0}, cfg.t1, n);
        const Trace sp = capture_window(t.at("valid_authenticatee"), {r.authenticatee_offset, 0.0}, cfg.t1, n);
        const Decision off = detect(cfg.detector, s, sp);
        const bool online = r.outcome == SessionOutcome::Accepted;
        decided += r.decision.has_value();
        // A session that aborted before deciding (no touch) must be one the
        // offline detector also refuses.
        agree += off.accepted() == online && (!r.decision || r.decision->score == off.score);
    }
    c.expect(agree == 500, std::to_string(agree) + "/500 agree");
    c.note = std::to_string(agree) + "/500 agree, " + std::to_string(decided) + " decided";
    return c;
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(TOUCHAUTH_CLI) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

Check reproducibility() {
    Check c;
    const fs::path root = fs::temp_directory_path() / "touchauth_acceptance_repro";
    fs::remove_all(root);
    const std::vector<std::string> manifests = {
        "synth --seed 11 --length 3",
        "roc --seed 11 --trials 200 --alpha-bound 0.02 0.05",
        "roc --seed 11 --trials 200 --metric rmse",
        "sweep --seed 11 --trials 100",
        "session --seed 11 --trials 20 --transcript",
        "session --seed 11 --trials 20 --mode lightweight --adversary passive --transcript",
        "attack --kind mimicry --seed 11 --trials 100",
        "attack --kind echo --seed 11 --trials 20",
    };
    for (std::size_t m = 0; m < manifests.size(); ++m) {
        const fs::path a = root / (std::to_string(m) + "a"), b = root / (std::to_string(m) + "b");
        const bool ran = run_cli(manifests[m] + " --out " + a.string()) == 0 &&
                         run_cli(manifests[m] + " --out " + b.string()) == 0;
        c.expect(ran, "run failed: " + manifests[m]);
        if (!ran) continue;
        std::size_t files = 0;
        for (const auto& e : fs::recursive_directory_iterator(a)) {
            if (!e.is_regular_file()) continue;
            ++files;
            const fs::path rel = fs::relative(e.path(), a);
            c.expect(slurp(e.path()) == slurp(b / rel), "differs: " + manifests[m] + " " + rel.string());
        }
        c.expect(files > 0, "no output: " + manifests[m]);
    }
    fs::remove_all(root);
    return c;
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Check()>>> criteria = {
        {"metric exactness", metric_exactness},
        {"clock offset null", clock_offset_null},
        {"gate behavior", gate_behavior},
        {"roc properties", roc_properties},
        {"calibrated detection", calibrated_detection},
        {"metric ordering", metric_ordering},
        {"mimicry mitigation", mimicry_mitigation},
        {"protocol security", protocol_security},
        {"end-to-end consistency", end_to_end_consistency},
        {"reproducibility", reproducibility},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        Check c;
        try {
            c = criteria[i].second();
        } catch (const std::exception& e) {
            c.ok = false;
            c.note = std::string("exception: ") + e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("[%s] %2zu %-24s %7.2fs  %s\n", c.ok ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                    secs, c.note.c_str());
        std::fflush(stdout);
        failed += !c.ok;
    }
    return failed == 0 ? 0 : 1;
}
