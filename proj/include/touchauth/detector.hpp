// SPDX-License-Identifier: Apache-2.0
//
// Same-body contact detection: a signal-strength gate followed by a
// thresholded similarity score between the authenticator's trace s and the
// authenticatee's trace s'.
#pragma once

#include <optional>
#include <string>

#include "touchauth/trace.hpp"

namespace touchauth {

/// Finite stand-in for an unbounded score (identical traces under
/// RMSE_RECIP, zero difference power in SDR). Keeps scores ordered and
/// serializable.
inline constexpr double kScoreMax = 1e12;

inline constexpr double kDefaultGateStd = 0.06;  // volts

enum class Metric { Apcc, RmseRecip };

struct DetectorConfig {
    Metric metric = Metric::Apcc;
    double threshold_eta = 0.0;
    double signal_length_seconds = 1.0;
    double gate_std_volts = kDefaultGateStd;
    double sample_rate = kDefaultSampleRate;
};

void validate(const DetectorConfig& cfg);

enum class Outcome { Accept, RejectGate, RejectScore };

struct Decision {
    Outcome outcome = Outcome::RejectGate;
    std::optional<double> score;  // empty when gated
    Metric metric = Metric::Apcc;

    bool accepted() const noexcept { return outcome == Outcome::Accept; }
};

/// Absolute Pearson correlation in [0, 1]. Throws ZeroVariance for a
/// constant input and LengthMismatch for unequal lengths or rates.
double apcc(const Trace& x, const Trace& y);

/// Root mean square of the samplewise difference, on raw samples.
double rmse(const Trace& x, const Trace& y);

/// APCC, or 1/RMSE with rmse == 0 mapped to kScoreMax.
double similarity(Metric metric, const Trace& x, const Trace& y);

/// Population standard deviation of the samples.
double population_std(const Trace& t);

/// True iff the trace is strong enough to be compared.
bool gate(const Trace& t, double gate_std_volts);

/// Gate then score the trailing signal_length_seconds of both traces.
/// Accepts iff score > threshold_eta.
Decision detect(const DetectorConfig& cfg, const Trace& s, const Trace& s_prime);

/// Signal-to-difference ratio 10 log10(P[s] / P[s - s']) in dB;
/// kScoreMax when the difference power is below eps * P[s].
double sdr(const Trace& s, const Trace& s_prime);

std::string to_string(Metric m);
Metric metric_from_string(const std::string& s);
std::string to_string(Outcome o);

/// `metric,eta,length_s,outcome,score` (score empty when gated).
std::string decision_csv_header();
std::string to_csv_row(const DetectorConfig& cfg, const Decision& d);

}  // namespace touchauth
