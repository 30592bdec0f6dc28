// SPDX-License-Identifier: Apache-2.0
//
// touchauth: synthesize traces, run detection, evaluate ROC / length sweeps,
// simulate authentication sessions and attacks. Every output is CSV and is
// a pure function of the scenario, the overrides and --seed.
#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "touchauth/error.hpp"
#include "touchauth/eval.hpp"
#include "touchauth/presets.hpp"
#include "touchauth/protocol.hpp"
#include "touchauth/rng.hpp"
#include "touchauth/scenario_io.hpp"

namespace fs = std::filesystem;
using namespace touchauth;

namespace {

// Seed streams private to the CLI.
constexpr std::uint64_t kCalibrationStream = 0xCA1;

struct Options {
    std::string scenario = "preset:default";
    std::optional<std::uint64_t> seed;
    std::string out = ".";
    std::size_t trials = kDefaultTrials;
    std::vector<double> alpha_bounds{0.02};
    std::optional<double> length;
    std::string metric = "apcc";
    bool transcript = false;
    std::vector<std::string> overrides;
    unsigned threads = 0;

    // per command
    std::optional<double> eta;
    std::string s_path, s_prime_path;
    std::string authenticatee;
    std::vector<double> lengths;
    std::string mode = "full-h2h";
    std::string adversary = "none";
    std::string attack = "mimicry";
};

ScenarioSpec load(const Options& o, const std::string& fallback_preset = "default") {
    std::string src = o.scenario;
    if (src == "preset:default" && fallback_preset != "default") src = "preset:" + fallback_preset;
    ScenarioSpec spec;
    if (src == "preset:default") {
        spec = presets::calibrated_default();
    } else if (src == "preset:mimicry") {
        spec = presets::mimicry();
    } else if (src == "preset:pure-tone") {
        spec = presets::pure_tone_pair();
    } else if (src.rfind("preset:", 0) == 0) {
        throw ConfigError("unknown preset: " + src);
    } else {
        spec = load_scenario(src);
    }
    std::vector<std::pair<std::string, std::string>> kv;
    for (const std::string& s : o.overrides) {
        const auto eq = s.find('=');
        if (eq == std::string::npos || eq == 0) throw ConfigError("override must be key=value: " + s);
        kv.emplace_back(s.substr(0, eq), s.substr(eq + 1));
    }
    if (!kv.empty()) spec = apply_overrides(spec, kv);
    if (o.seed) spec.seed = *o.seed;
    if (o.length) spec.length_seconds = *o.length;
    validate(spec);
    return spec;
}

DetectorConfig detector_for(const Options& o, const ScenarioSpec& spec) {
    DetectorConfig d;
    d.metric = metric_from_string(o.metric);
    d.signal_length_seconds = o.length.value_or(spec.length_seconds);
    d.sample_rate = spec.sample_rate;
    return d;
}

fs::path out_dir(const Options& o) {
    fs::path p(o.out);
    std::error_code ec;
    fs::create_directories(p, ec);
    if (ec || !fs::is_directory(p)) throw IoError("cannot create output directory: " + o.out);
    return p;
}

std::ofstream open_out(const fs::path& p) {
    std::ofstream f(p, std::ios::binary);
    if (!f) throw IoError("cannot write " + p.string());
    return f;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

/// Threshold at the first alpha bound, calibrated on a seed stream that no
/// evaluation or session run uses.
OperatingPoint calibrate(const Options& o, const ScenarioSpec& spec, const DetectorConfig& det) {
    ScenarioSpec s = spec;
    s.length_seconds = std::max(spec.length_seconds, det.signal_length_seconds);
    const LabeledScores scores =
        run_trials(s, det, o.trials, derive_seed(spec.seed, kCalibrationStream), o.threads);
    return np_threshold(roc(scores), o.alpha_bounds.front());
}

int cmd_synth(const Options& o) {
    const ScenarioSpec spec = load(o);
    const fs::path dir = out_dir(o);
    const TraceSet traces = synthesize_scenario(spec);
    for (const auto& [id, t] : traces) {
        auto f = open_out(dir / ("trace_" + id + ".csv"));
        write_csv(f, t);
    }
    std::cout << "wrote " << traces.size() << " traces to " << dir.string() << "\n";
    return 0;
}

int cmd_detect(const Options& o) {
    const fs::path dir = out_dir(o);
    DetectorConfig det;
    det.metric = metric_from_string(o.metric);
    Trace s, sp;
    if (!o.s_path.empty() || !o.s_prime_path.empty()) {
        if (o.s_path.empty() || o.s_prime_path.empty()) {
            throw InvalidArgument("--s and --s-prime must be given together");
        }
        s = read_csv(o.s_path);
        sp = read_csv(o.s_prime_path);
        det.sample_rate = s.sample_rate;
        det.signal_length_seconds = o.length.value_or(std::min(s.duration(), sp.duration()));
        if (!o.eta) throw InvalidArgument("--eta is required when detecting external traces");
        det.threshold_eta = *o.eta;
    } else {
        const ScenarioSpec spec = load(o);
        det = detector_for(o, spec);
        const PlacementSpec* a = first_with_role(spec, Role::Authenticator);
        const PlacementSpec* b = o.authenticatee.empty() ? first_with_role(spec, Role::Valid)
                                                         : find_placement(spec, o.authenticatee);
        if (a == nullptr || b == nullptr) throw InvalidArgument("scenario lacks the requested placements");
        det.threshold_eta = o.eta ? *o.eta : calibrate(o, spec, det).eta;
        const TraceSet traces = synthesize_scenario(spec);
        s = traces.at(a->placement_id);
        sp = traces.at(b->placement_id);
    }
    const Decision d = detect(det, s, sp);
    auto f = open_out(dir / "decisions.csv");
    f << decision_csv_header() << "\n" << to_csv_row(det, d) << "\n";
    std::cout << to_string(d.outcome) << " eta=" << fmt(det.threshold_eta)
              << " score=" << (d.score ? fmt(*d.score) : std::string("gated")) << "\n";
    return 0;
}

int cmd_roc(const Options& o) {
    const ScenarioSpec spec = load(o);
    const DetectorConfig det = detector_for(o, spec);
    const fs::path dir = out_dir(o);
    const LabeledScores scores = run_trials(spec, det, o.trials, spec.seed, o.threads);
    const RocCurve curve = roc(scores);
    {
        auto f = open_out(dir / "roc.csv");
        write_roc_csv(f, curve);
    }
    {
        const auto rows = sdr_report(spec, o.trials, spec.seed);
        auto f = open_out(dir / "sdr.csv");
        write_sdr_csv(f, rows);
    }
    for (double bound : o.alpha_bounds) {
        try {
            const OperatingPoint op = np_threshold(curve, bound);
            std::cout << "alpha_bound=" << fmt(bound) << " beta=" << fmt(op.beta)
                      << " alpha=" << fmt(op.alpha) << " eta=" << fmt(op.eta) << "\n";
        } catch (const NoFeasibleThreshold&) {
            std::cout << "alpha_bound=" << fmt(bound) << " infeasible\n";
        }
    }
    return 0;
}

int cmd_sweep(const Options& o) {
    const ScenarioSpec spec = load(o);
    const DetectorConfig det = detector_for(o, spec);
    const fs::path dir = out_dir(o);
    const std::vector<double> lengths =
        o.lengths.empty() ? std::vector<double>{0.5, 1.0, 2.0, 3.0, 4.0, 5.0} : o.lengths;
    std::vector<LengthBeta> rows;
    for (double bound : o.alpha_bounds) {
        const auto part = beta_vs_length(spec, det, lengths, bound, o.trials, spec.seed);
        rows.insert(rows.end(), part.begin(), part.end());
    }
    auto f = open_out(dir / "sweep.csv");
    write_sweep_csv(f, rows);
    for (const LengthBeta& r : rows) {
        std::cout << "length_s=" << fmt(r.length_s) << " alpha_bound=" << fmt(r.alpha_bound)
                  << " beta=" << fmt(r.beta) << "\n";
    }
    return 0;
}

int cmd_session(const Options& o) {
    const ScenarioSpec spec = load(o);
    DetectorConfig det = detector_for(o, spec);
    const fs::path dir = out_dir(o);
    det.threshold_eta = o.eta ? *o.eta : calibrate(o, spec, det).eta;
    SessionConfig cfg = SessionConfig::for_length(det, det.signal_length_seconds);
    cfg.authenticatee_placement = o.authenticatee;
    const ProtocolVariant variant = protocol_variant_from_string(o.mode);
    const SessionAdversary adv = adversary_from_name(o.adversary);

    if (o.transcript) fs::create_directories(dir / "transcripts");
    auto f = open_out(dir / "sessions.csv");
    f << session_csv_header() << "\n";
    std::map<std::string, std::size_t> counts;
    for (std::size_t i = 0; i < o.trials; ++i) {
        const std::uint64_t seed = derive_seed(spec.seed, i);
        const SessionResult r = run_seeded(variant, cfg, spec, adv, seed);
        f << to_csv_row(seed, variant, adv, r) << "\n";
        ++counts[to_string(r.outcome)];
        if (o.transcript) {
            auto t = open_out(dir / "transcripts" / ("run_" + std::to_string(i) + ".csv"));
            r.transcript.write(t);
        }
    }
    std::cout << "eta=" << fmt(det.threshold_eta);
    for (const auto& [k, v] : counts) std::cout << " " << k << "=" << v;
    std::cout << "\n";
    return 0;
}

int cmd_attack(const Options& o) {
    const fs::path dir = out_dir(o);
    if (o.attack == "mimicry") {
        const ScenarioSpec spec = load(o, "mimicry");
        const DetectorConfig det = detector_for(o, spec);
        const std::vector<double> lengths =
            o.lengths.empty() ? std::vector<double>{0.1, 0.2, 0.5, 1.0, 2.0} : o.lengths;
        const auto rows = mimicry_sweep(spec, det, lengths, o.alpha_bounds.front(), o.trials, spec.seed);
        auto f = open_out(dir / "mimicry.csv");
        write_mimicry_csv(f, rows);
        for (const MimicryPoint& r : rows) {
            std::cout << "length_s=" << fmt(r.length_s) << " eta=" << fmt(r.eta)
                      << " attack_far=" << fmt(r.attack_far) << "\n";
        }
        return 0;
    }
    if (o.attack == "echo") {
        const ScenarioSpec spec = load(o);
        DetectorConfig det = detector_for(o, spec);
        det.threshold_eta = o.eta ? *o.eta : calibrate(o, spec, det).eta;
        SessionConfig cfg = SessionConfig::for_length(det, det.signal_length_seconds);
        // The attacker is off-body: it answers with the invalid placement.
        if (o.authenticatee.empty()) {
            const PlacementSpec* inv = first_with_role(spec, Role::Invalid);
            if (inv == nullptr) throw InvalidArgument("echo attack needs an invalid placement");
            cfg.authenticatee_placement = inv->placement_id;
        } else {
            cfg.authenticatee_placement = o.authenticatee;
        }
        const SessionAdversary adv = adversary_from_name("echo-mitm");
        auto f = open_out(dir / "echo.csv");
        f << "mode,runs,accepted,aborted_security,rejected,aborted_timeout\n";
        for (ProtocolVariant v : {ProtocolVariant::Full, ProtocolVariant::Naive}) {
            std::map<SessionOutcome, std::size_t> c;
            for (std::size_t i = 0; i < o.trials; ++i) {
                ++c[run_seeded(v, cfg, spec, adv, derive_seed(spec.seed, i)).outcome];
            }
            f << to_string(v) << ',' << o.trials << ',' << c[SessionOutcome::Accepted] << ','
              << c[SessionOutcome::AbortedSecurity] << ',' << c[SessionOutcome::Rejected] << ','
              << c[SessionOutcome::AbortedTimeout] << "\n";
            std::cout << to_string(v) << " accepted=" << c[SessionOutcome::Accepted] << "/"
                      << o.trials << "\n";
        }
        return 0;
    }
    throw InvalidArgument("unknown attack: " + o.attack);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"touchauth: same-body contact authentication simulator"};
    app.require_subcommand(1);
    Options o;

    // Global flags are accepted before or after the subcommand.
    app.option_defaults()->always_capture_default();
    app.add_option("--scenario", o.scenario,
                   "Scenario JSON path or preset:default|preset:mimicry|preset:pure-tone");
    app.add_option("--seed", o.seed, "Master seed (replaces the scenario seed)");
    app.add_option("--out", o.out, "Output directory");
    app.add_option("--trials", o.trials, "Trials or session runs")->check(CLI::PositiveNumber);
    app.add_option("--alpha-bound", o.alpha_bounds, "False-acceptance bound(s)")
        ->check(CLI::Range(0.0, 1.0))
        ->take_all();
    app.add_option("--length", o.length, "Signal length in seconds")->check(CLI::PositiveNumber);
    app.add_option("--metric", o.metric, "apcc or rmse")->check(CLI::IsMember({"apcc", "rmse"}));
    app.add_flag("--transcript", o.transcript, "Write session transcripts");
    app.add_option("--set", o.overrides, "Scenario override key=value (dotted path)");
    app.add_option("--threads", o.threads, "Worker threads for trials (0 = all cores)");

    auto* synth = app.add_subcommand("synth", "Write one trace CSV per placement");
    auto* det = app.add_subcommand("detect", "Gate and score one pair of traces");
    det->add_option("--eta", o.eta, "Threshold (default: calibrated at the alpha bound)");
    det->add_option("--s", o.s_path, "Authenticator trace CSV");
    det->add_option("--s-prime", o.s_prime_path, "Authenticatee trace CSV");
    det->add_option("--authenticatee", o.authenticatee, "Placement scored against the authenticator");
    auto* roc_cmd = app.add_subcommand("roc", "Empirical ROC, SDR report and NP summary");
    auto* sweep = app.add_subcommand("sweep", "Beta versus signal length");
    sweep->add_option("--lengths", o.lengths, "Signal lengths in seconds")->take_all();
    auto* session = app.add_subcommand("session", "Run seeded authentication sessions");
    session->add_option("--mode", o.mode, "full-h2h, lightweight or naive")
        ->check(CLI::IsMember({"full-h2h", "lightweight", "naive"}));
    session->add_option("--adversary", o.adversary,
                        "none, passive, drop, modify, forge, replay or echo-mitm")
        ->check(CLI::IsMember({"none", "passive", "drop", "modify", "forge", "replay", "echo-mitm"}));
    session->add_option("--authenticatee", o.authenticatee, "Authenticatee placement id");
    session->add_option("--eta", o.eta, "Threshold (default: calibrated at the alpha bound)");
    auto* attack = app.add_subcommand("attack", "Mimicry sweep or echo man-in-the-middle");
    attack->add_option("--kind", o.attack, "mimicry or echo")->check(CLI::IsMember({"mimicry", "echo"}));
    attack->add_option("--lengths", o.lengths, "Signal lengths for mimicry")->take_all();
    attack->add_option("--authenticatee", o.authenticatee, "Attacker placement for echo");
    attack->add_option("--eta", o.eta, "Threshold (default: calibrated at the alpha bound)");
    for (auto* sub : {synth, det, roc_cmd, sweep, session, attack}) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*synth) return cmd_synth(o);
        if (*det) return cmd_detect(o);
        if (*roc_cmd) return cmd_roc(o);
        if (*sweep) return cmd_sweep(o);
        if (*session) return cmd_session(o);
        if (*attack) return cmd_attack(o);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
