// SPDX-License-Identifier: Apache-2.0
//
// The authentication session between an on-body authenticator and a
// touching authenticatee, run over the simulated network.
//
// FULL_H2H: HELLO, key exchange, clock sync, window announcement, both
// parties sample [t1, t2] on their own clocks, authenticatee commits to s',
// authenticator discloses s, authenticatee reveals (s', nonce), authenticator
// verifies, detects and notifies.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "touchauth/detector.hpp"
#include "touchauth/netsim.hpp"
#include "touchauth/signal_model.hpp"

namespace touchauth {

inline constexpr double kTouchHeadSeconds = 0.2;
inline constexpr double kDefaultSyncResidualSeconds = 0.001;
inline constexpr double kDefaultWindowStart = 1.0;
/// Worst-case pre-sync clock error of the authenticatee.
inline constexpr double kMaxInitialOffsetSeconds = 0.25;

enum class SecurityMode { FullH2H, Lightweight };
enum class SessionOutcome { Accepted, Rejected, AbortedSecurity, AbortedTimeout };
enum class Phase { Idle, Handshake, Secured, Synced, Sampling, Committed, Revealed, Decided };

std::string to_string(SecurityMode m);
SecurityMode security_mode_from_string(const std::string& s);
std::string to_string(SessionOutcome o);
std::string to_string(Phase p);

struct SessionConfig {
    DetectorConfig detector;
    double t1 = kDefaultWindowStart;  // authenticator clock
    double t2 = kDefaultWindowStart + 1.0;
    SecurityMode security_mode = SecurityMode::FullH2H;
    std::size_t commitment_nonce_bits = 256;
    double sync_residual_seconds = kDefaultSyncResidualSeconds;
    double latency_seconds = net::kDefaultLatencySeconds;
    std::string authenticator_placement;  // empty: first authenticator role
    std::string authenticatee_placement;  // empty: first valid role

    /// Window [kDefaultWindowStart, +length] with a matching detector length.
    static SessionConfig for_length(const DetectorConfig& det, double length_seconds);
};

/// Throws InvalidArgument unless t2 > t1 >= 2 touch heads and
/// t2 - t1 equals the detector signal length.
void validate(const SessionConfig& cfg);

/// Who answers on the authenticatee side of the link.
struct SessionAdversary {
    std::string name = "none";
    net::AdversaryPolicy channel;
    /// No PKI means a man in the middle can terminate the link itself and
    /// act as the authenticatee: it echoes the authenticator's s as s'.
    bool echo_mitm = false;
};

/// none, passive, drop, modify, forge, replay, echo-mitm.
SessionAdversary adversary_from_name(const std::string& name);

struct SessionResult {
    SessionOutcome outcome = SessionOutcome::AbortedTimeout;
    std::optional<Decision> decision;  // set only when the authenticator decided
    std::string abort_reason;
    Trace s;        // authenticator's capture
    Trace s_prime;  // authenticatee's capture (its own, before any echo)
    double authenticator_offset = 0.0;
    double authenticatee_offset = 0.0;  // after sync
    Phase authenticator_phase = Phase::Idle;
    Phase authenticatee_phase = Phase::Idle;
    net::Transcript transcript;

    std::optional<double> score() const {
        return decision ? decision->score : std::nullopt;
    }
};

/// True iff the head is strong enough to indicate a touch. Throws
/// InvalidArgument when shorter than kTouchHeadSeconds.
bool touch_trigger(const Trace& trace_head, double gate_std_volts = kDefaultGateStd);

/// The scenario actually synthesized for a session: long enough to cover
/// the sampling window plus clock error.
ScenarioSpec session_scenario(const ScenarioSpec& scenario, const SessionConfig& cfg);

/// Captures [t1, t1 + n / rate) of clock-local time from an epoch trace.
Trace capture_window(const Trace& epoch_trace, const net::SimClock& clock, double t1,
                     std::size_t n);

SessionResult run_session(net::Simulator& sim, const SessionConfig& cfg,
                          const ScenarioSpec& scenario, const SessionAdversary& adversary);

/// Same flow over the secure channel, but s is disclosed and s' returned
/// without a prior commitment. Kept to demonstrate the echo attack.
SessionResult naive_session(net::Simulator& sim, const SessionConfig& cfg,
                            const ScenarioSpec& scenario, const SessionAdversary& adversary);

enum class ProtocolVariant { Full, Lightweight, Naive };
std::string to_string(ProtocolVariant v);
ProtocolVariant protocol_variant_from_string(const std::string& s);

/// One self-contained run: scenario seed and simulator seed both derive
/// from `seed`.
SessionResult run_seeded(ProtocolVariant variant, const SessionConfig& cfg,
                         const ScenarioSpec& scenario, const SessionAdversary& adversary,
                         std::uint64_t seed);

/// `seed,mode,adversary,outcome,score`.
std::string session_csv_header();
std::string to_csv_row(std::uint64_t seed, ProtocolVariant variant,
                       const SessionAdversary& adversary, const SessionResult& r);

}  // namespace touchauth
