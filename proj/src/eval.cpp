// SPDX-License-Identifier: Apache-2.0
#include "touchauth/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <ostream>
#include <thread>

#include "touchauth/error.hpp"
#include "touchauth/rng.hpp"

namespace touchauth {
namespace {

struct TrialResult {
    std::optional<double> valid;
    std::optional<double> invalid;
    std::optional<double> attacker;
};

std::optional<double> score_pair(const DetectorConfig& cfg, const Trace& s, const Trace& sp) {
    const Decision d = detect(cfg, s, sp);
    return d.score;
}

template <class Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(n, 1)));
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::exception_ptr> errors(threads);
    {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < threads; ++w) {
            pool.emplace_back([&, w] {
                try {
                    for (std::size_t i = w; i < n; i += threads) fn(i);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        }
    }
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

}  // namespace

double TrialTally::beta() const noexcept {
    return n_valid == 0 ? 0.0 : static_cast<double>(n_true_accept) / static_cast<double>(n_valid);
}

double TrialTally::alpha() const noexcept {
    return n_invalid == 0 ? 0.0
                          : static_cast<double>(n_false_accept) / static_cast<double>(n_invalid);
}

LabeledScores run_trials(const ScenarioSpec& scenario, const DetectorConfig& cfg,
                         std::size_t n_trials, std::uint64_t seed, unsigned threads) {
    validate(scenario);
    validate(cfg);
    const PlacementSpec* auth = first_with_role(scenario, Role::Authenticator);
    const PlacementSpec* valid = first_with_role(scenario, Role::Valid);
    const PlacementSpec* invalid = first_with_role(scenario, Role::Invalid);
    const PlacementSpec* attacker = first_with_role(scenario, Role::Attacker);
    if (auth == nullptr || valid == nullptr || invalid == nullptr) {
        throw InvalidArgument(
            "scenario needs authenticator, valid and invalid placements for trials");
    }
    if (scenario.length_seconds + 1e-12 < cfg.signal_length_seconds) {
        throw InvalidArgument("scenario length shorter than the detector signal length");
    }

    std::vector<TrialResult> results(n_trials);
    parallel_for(n_trials, threads, [&](std::size_t i) {
        ScenarioSpec spec = scenario;
        spec.seed = derive_seed(seed, stream::trial + i);
        const TraceSet traces = synthesize_scenario(spec);
        const Trace& s = traces.at(auth->placement_id);
        TrialResult r;
        r.valid = score_pair(cfg, s, traces.at(valid->placement_id));
        r.invalid = score_pair(cfg, s, traces.at(invalid->placement_id));
        if (attacker != nullptr) r.attacker = score_pair(cfg, s, traces.at(attacker->placement_id));
        results[i] = r;
    });

    LabeledScores out;
    out.n_trials = n_trials;
    for (const TrialResult& r : results) {
        if (r.valid) out.valid_scores.push_back(*r.valid); else ++out.valid_gated;
        if (r.invalid) out.invalid_scores.push_back(*r.invalid); else ++out.invalid_gated;
        if (attacker != nullptr) {
            if (r.attacker) out.attacker_scores.push_back(*r.attacker); else ++out.attacker_gated;
        }
    }
    return out;
}

TrialTally tally(const LabeledScores& scores, double eta) {
    TrialTally t;
    t.n_valid = scores.n_valid();
    t.n_invalid = scores.n_invalid();
    t.n_true_accept = static_cast<std::size_t>(std::count_if(
        scores.valid_scores.begin(), scores.valid_scores.end(), [eta](double s) { return s > eta; }));
    t.n_false_accept = static_cast<std::size_t>(
        std::count_if(scores.invalid_scores.begin(), scores.invalid_scores.end(),
                      [eta](double s) { return s > eta; }));
    return t;
}

std::vector<double> empirical_eta_grid(const LabeledScores& scores) {
    std::vector<double> grid;
    grid.reserve(scores.valid_scores.size() + scores.invalid_scores.size() + 1);
    grid.insert(grid.end(), scores.valid_scores.begin(), scores.valid_scores.end());
    grid.insert(grid.end(), scores.invalid_scores.begin(), scores.invalid_scores.end());
    if (grid.empty()) return grid;
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    grid.insert(grid.begin(), std::nextafter(grid.front(), -std::numeric_limits<double>::infinity()));
    return grid;
}

RocCurve roc(const LabeledScores& scores, std::span<const double> eta_grid) {
    if (scores.valid_scores.empty() || scores.invalid_scores.empty()) {
        throw InvalidArgument("ROC needs ungated scores in both classes");
    }
    std::vector<double> grid(eta_grid.begin(), eta_grid.end());
    std::sort(grid.begin(), grid.end());

    // Sorted copies turn each count into a binary search.
    std::vector<double> valid = scores.valid_scores;
    std::vector<double> invalid = scores.invalid_scores;
    std::sort(valid.begin(), valid.end());
    std::sort(invalid.begin(), invalid.end());
    auto above = [](const std::vector<double>& v, double eta) {
        return static_cast<std::size_t>(v.end() - std::upper_bound(v.begin(), v.end(), eta));
    };

    RocCurve curve;
    curve.trials_per_point = scores.n_trials;
    curve.points.reserve(grid.size());
    const auto n_l = static_cast<double>(scores.n_valid());
    const auto n_i = static_cast<double>(scores.n_invalid());
    for (double eta : grid) {
        RocPoint p;
        p.eta = eta;
        p.beta = static_cast<double>(above(valid, eta)) / n_l;
        p.alpha = static_cast<double>(above(invalid, eta)) / n_i;
        p.frr = 1.0 - p.beta;
        curve.points.push_back(p);
    }
    return curve;
}

RocCurve roc(const LabeledScores& scores) {
    const std::vector<double> grid = empirical_eta_grid(scores);
    return roc(scores, grid);
}

bool is_well_formed(const RocCurve& curve) {
    for (std::size_t i = 0; i < curve.points.size(); ++i) {
        const RocPoint& p = curve.points[i];
        if (p.frr != 1.0 - p.beta) return false;
        if (p.alpha < 0.0 || p.alpha > 1.0 || p.beta < 0.0 || p.beta > 1.0) return false;
        if (i == 0) continue;
        const RocPoint& q = curve.points[i - 1];
        if (p.eta < q.eta || p.alpha > q.alpha || p.beta > q.beta) return false;
    }
    return true;
}

OperatingPoint np_threshold(const RocCurve& curve, double alpha_bound) {
    if (curve.points.empty()) throw InvalidArgument("empty ROC curve");
    if (!(alpha_bound >= 0.0 && alpha_bound <= 1.0)) {
        throw InvalidArgument("alpha bound must be in [0, 1]");
    }
    const RocPoint* best = nullptr;
    for (const RocPoint& p : curve.points) {
        if (p.alpha > alpha_bound) continue;
        if (best == nullptr || p.beta > best->beta ||
            (p.beta == best->beta && p.eta < best->eta)) {
            best = &p;
        }
    }
    if (best == nullptr) throw NoFeasibleThreshold("no threshold meets the alpha bound");
    return {best->eta, best->alpha, best->beta};
}

std::vector<LengthBeta> beta_vs_length(const ScenarioSpec& scenario, const DetectorConfig& cfg,
                                       std::span<const double> lengths, double alpha_bound,
                                       std::size_t n_trials, std::uint64_t seed) {
    std::vector<LengthBeta> out;
    for (double len : lengths) {
        if (!(len > 0.0)) throw InvalidArgument("signal lengths must be positive");
        ScenarioSpec spec = scenario;
        spec.length_seconds = len;
        DetectorConfig c = cfg;
        c.signal_length_seconds = len;
        const LabeledScores scores = run_trials(spec, c, n_trials, seed);
        const OperatingPoint op = np_threshold(roc(scores), alpha_bound);
        out.push_back({len, alpha_bound, op.beta, op.eta});
    }
    return out;
}

std::vector<MimicryPoint> mimicry_sweep(const ScenarioSpec& scenario, const DetectorConfig& cfg,
                                        std::span<const double> lengths, double alpha_bound,
                                        std::size_t n_trials, std::uint64_t seed) {
    if (first_with_role(scenario, Role::Attacker) == nullptr) {
        throw InvalidArgument("mimicry sweep needs an attacker placement");
    }
    std::vector<MimicryPoint> out;
    for (double len : lengths) {
        if (!(len > 0.0)) throw InvalidArgument("signal lengths must be positive");
        ScenarioSpec spec = scenario;
        spec.length_seconds = len;
        DetectorConfig c = cfg;
        c.signal_length_seconds = len;
        const LabeledScores scores = run_trials(spec, c, n_trials, seed);
        const OperatingPoint op = np_threshold(roc(scores), alpha_bound);
        const auto accepted =
            std::count_if(scores.attacker_scores.begin(), scores.attacker_scores.end(),
                          [&](double s) { return s > op.eta; });
        MimicryPoint p;
        p.length_s = len;
        p.alpha_bound = alpha_bound;
        p.eta = op.eta;
        p.baseline_alpha = op.alpha;
        p.baseline_beta = op.beta;
        p.attack_far = static_cast<double>(accepted) / static_cast<double>(scores.n_attacker());
        out.push_back(p);
    }
    return out;
}

std::vector<SdrSummary> sdr_report(const ScenarioSpec& scenario, std::size_t n_trials,
                                   std::uint64_t seed) {
    validate(scenario);
    if (n_trials == 0) throw InvalidArgument("sdr_report needs at least one trial");
    const PlacementSpec* auth = first_with_role(scenario, Role::Authenticator);
    if (auth == nullptr) throw InvalidArgument("scenario has no authenticator placement");

    std::vector<std::string> others;
    for (const auto& p : scenario.placements) {
        if (p.placement_id != auth->placement_id) others.push_back(p.placement_id);
    }
    std::vector<std::vector<double>> values(others.size());
    for (std::size_t i = 0; i < n_trials; ++i) {
        ScenarioSpec spec = scenario;
        spec.seed = derive_seed(seed, stream::trial + i);
        const TraceSet traces = synthesize_scenario(spec);
        const Trace& s = traces.at(auth->placement_id);
        for (std::size_t k = 0; k < others.size(); ++k) {
            values[k].push_back(sdr(s, traces.at(others[k])));
        }
    }

    std::vector<SdrSummary> out;
    for (std::size_t k = 0; k < others.size(); ++k) {
        const auto& v = values[k];
        SdrSummary s;
        s.pairing = auth->placement_id + ":" + others[k];
        s.n = v.size();
        double sum = 0.0;
        for (double x : v) sum += x;
        s.mean_db = sum / static_cast<double>(v.size());
        double ss = 0.0;
        for (double x : v) ss += (x - s.mean_db) * (x - s.mean_db);
        s.std_db = v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1)) : 0.0;
        out.push_back(s);
    }
    return out;
}

void write_roc_csv(std::ostream& os, const RocCurve& curve) {
    os << "eta,alpha,beta,frr\n";
    char buf[128];
    for (const RocPoint& p : curve.points) {
        // eta needs full precision: the first grid point is one ulp below a score.
        std::snprintf(buf, sizeof buf, "%.17g,%.12g,%.12g,%.12g\n", p.eta, p.alpha, p.beta, p.frr);
        os << buf;
    }
}

void write_sweep_csv(std::ostream& os, std::span<const LengthBeta> rows) {
    os << "length_s,alpha_bound,beta\n";
    char buf[128];
    for (const LengthBeta& r : rows) {
        std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g\n", r.length_s, r.alpha_bound, r.beta);
        os << buf;
    }
}

void write_sdr_csv(std::ostream& os, std::span<const SdrSummary> rows) {
    os << "pairing,mean_sdr_db,std_sdr_db\n";
    char buf[160];
    for (const SdrSummary& r : rows) {
        std::snprintf(buf, sizeof buf, "%s,%.12g,%.12g\n", r.pairing.c_str(), r.mean_db, r.std_db);
        os << buf;
    }
}

void write_mimicry_csv(std::ostream& os, std::span<const MimicryPoint> rows) {
    os << "length_s,alpha_bound,eta,baseline_alpha,baseline_beta,attack_far\n";
    char buf[200];
    for (const MimicryPoint& r : rows) {
        std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g,%.12g,%.12g,%.12g\n", r.length_s,
                      r.alpha_bound, r.eta, r.baseline_alpha, r.baseline_beta, r.attack_far);
        os << buf;
    }
}

}  // namespace touchauth
