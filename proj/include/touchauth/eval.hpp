// SPDX-License-Identifier: Apache-2.0
//
// Experiment harness: seeded labeled trials, empirical ROC curves,
// Neyman-Pearson threshold selection, beta-vs-length sweeps, mimicry and
// SDR reports.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "touchauth/detector.hpp"
#include "touchauth/signal_model.hpp"

namespace touchauth {

inline constexpr std::size_t kDefaultTrials = 500;

/// Scores from n seeded trials. Gated trials are not in the score lists but
/// are counted; they are rejections for every threshold.
struct LabeledScores {
    std::vector<double> valid_scores;
    std::vector<double> invalid_scores;
    std::vector<double> attacker_scores;  // only for scenarios with an attacker placement
    std::size_t valid_gated = 0;
    std::size_t invalid_gated = 0;
    std::size_t attacker_gated = 0;
    std::size_t n_trials = 0;

    std::size_t n_valid() const noexcept { return valid_scores.size() + valid_gated; }
    std::size_t n_invalid() const noexcept { return invalid_scores.size() + invalid_gated; }
    std::size_t n_attacker() const noexcept { return attacker_scores.size() + attacker_gated; }
};

struct TrialTally {
    std::size_t n_valid = 0;         // N_L
    std::size_t n_invalid = 0;       // N_I
    std::size_t n_true_accept = 0;   // N_TA
    std::size_t n_false_accept = 0;  // N_FA

    double beta() const noexcept;
    double alpha() const noexcept;
};

struct RocPoint {
    double eta = 0.0;
    double alpha = 0.0;
    double beta = 0.0;
    double frr = 1.0;
};

struct RocCurve {
    std::vector<RocPoint> points;  // ascending eta
    std::size_t trials_per_point = 0;
};

struct OperatingPoint {
    double eta = 0.0;
    double alpha = 0.0;
    double beta = 0.0;
};

/// Requires authenticator, valid and invalid placements; an attacker
/// placement is scored too when present. Trial i uses
/// derive_seed(seed, stream::trial + i), so results do not depend on
/// `threads` (0 = hardware concurrency).
LabeledScores run_trials(const ScenarioSpec& scenario, const DetectorConfig& cfg,
                         std::size_t n_trials, std::uint64_t seed, unsigned threads = 0);

/// Counts at a single threshold; strict score > eta.
TrialTally tally(const LabeledScores& scores, double eta);

/// Just below the smallest observed score, then every distinct score.
std::vector<double> empirical_eta_grid(const LabeledScores& scores);

RocCurve roc(const LabeledScores& scores, std::span<const double> eta_grid);
RocCurve roc(const LabeledScores& scores);

/// alpha and beta non-increasing along ascending eta, frr == 1 - beta.
bool is_well_formed(const RocCurve& curve);

/// Max-beta point with alpha <= alpha_bound; ties go to the smallest eta.
/// Throws NoFeasibleThreshold when no point qualifies.
OperatingPoint np_threshold(const RocCurve& curve, double alpha_bound);

struct LengthBeta {
    double length_s = 0.0;
    double alpha_bound = 0.0;
    double beta = 0.0;
    double eta = 0.0;
};

std::vector<LengthBeta> beta_vs_length(const ScenarioSpec& scenario, const DetectorConfig& cfg,
                                       std::span<const double> lengths, double alpha_bound,
                                       std::size_t n_trials, std::uint64_t seed);

/// Attacker acceptance at a threshold calibrated on the non-attack classes.
struct MimicryPoint {
    double length_s = 0.0;
    double alpha_bound = 0.0;
    double eta = 0.0;
    double baseline_alpha = 0.0;
    double baseline_beta = 0.0;
    double attack_far = 0.0;
};

std::vector<MimicryPoint> mimicry_sweep(const ScenarioSpec& scenario, const DetectorConfig& cfg,
                                        std::span<const double> lengths, double alpha_bound,
                                        std::size_t n_trials, std::uint64_t seed);

struct SdrSummary {
    std::string pairing;  // "<authenticator id>:<other id>"
    double mean_db = 0.0;
    double std_db = 0.0;
    std::size_t n = 0;
};

/// Mean SDR of the authenticator against every other placement.
std::vector<SdrSummary> sdr_report(const ScenarioSpec& scenario, std::size_t n_trials,
                                   std::uint64_t seed);

// CSV emitters.
void write_roc_csv(std::ostream& os, const RocCurve& curve);
void write_sweep_csv(std::ostream& os, std::span<const LengthBeta> rows);
void write_sdr_csv(std::ostream& os, std::span<const SdrSummary> rows);
void write_mimicry_csv(std::ostream& os, std::span<const MimicryPoint> rows);

}  // namespace touchauth
