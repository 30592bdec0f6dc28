// SPDX-License-Identifier: Apache-2.0
//
// Seeded synthesis of induced body potential traces. Every placement sees
//
//   trace(t) = gain * sign * [rho * common(body, t') + sqrt(1 - rho^2) * private(t')] + noise
//
// with t' = t - clock_offset. The common part is the body's mains carrier
// (harmonics of the grid frequency) whose amplitude and phase are modulated
// by the body's movement envelope; the private part is a narrowband process
// with the same harmonic spectrum that no other placement shares.
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "touchauth/trace.hpp"

namespace touchauth {

/// Which party a placement plays in trials and sessions.
enum class Role { None, Authenticator, Valid, Invalid, Attacker };

struct Harmonic {
    int index = 1;                    // k >= 1, multiple of the grid frequency
    double relative_amplitude = 1.0;  // >= 0
    bool operator==(const Harmonic&) const = default;
};

struct FieldSpec {
    double grid_frequency = 50.0;  // Hz
    std::vector<Harmonic> harmonics{{1, 1.0}, {2, 0.15}, {3, 0.08}};
    double base_amplitude_volts = 0.3;  // used by bodies without their own amplitude
    double private_bandwidth_hz = 3.0;  // half-width of the private process around k*f0
    bool operator==(const FieldSpec&) const = default;
};

/// Copy of another body's movements (mimicry attacker).
struct MimicSpec {
    std::string body_id;             // victim
    double delay_seconds = 0.2;      // attacker lags the victim
    double envelope_noise_std = 0.3;  // own movement mixed into the copy
    bool lock_field_phase = true;    // stands close enough to share the victim's field phase
    bool operator==(const MimicSpec&) const = default;
};

struct MovementSpec {
    double band_low_hz = 0.5;
    double band_high_hz = 2.0;
    double envelope_depth = 0.3;       // amplitude modulation, in [0, 1]
    double phase_depth_radians = 0.0;  // carrier phase swing per unit envelope
    std::optional<MimicSpec> mimic_of;
    bool operator==(const MovementSpec&) const = default;
};

struct BodySpec {
    std::string body_id;
    std::optional<double> amplitude_volts;  // defaults to field.base_amplitude_volts
    double carrier_phase = 0.0;             // radians
    double amplitude_log_sigma = 0.0;       // per-synthesis lognormal spread of the amplitude
    bool random_phase = false;              // draw carrier_phase uniformly per synthesis
    std::optional<MovementSpec> movement_envelope;
    bool operator==(const BodySpec&) const = default;
};

struct PlacementSpec {
    std::string placement_id;
    Role role = Role::None;
    std::string body_id;
    double location_gain = 1.0;
    double phase_offset = 0.0;  // radians
    bool phase_flip = false;
    double noise_std = 0.02;  // volts
    double coupling = 0.99;   // rho
    bool operator==(const PlacementSpec&) const = default;
};

enum class InterfererKind { AdditiveTone, BroadbandBurst };

struct InterfererSpec {
    InterfererKind kind = InterfererKind::AdditiveTone;
    // Tone frequency for additive_tone; burst repetition rate for broadband_burst.
    double frequency = 85.0;
    double amplitude_volts = 0.0;  // tone peak, or burst noise std
    double duty_cycle = 1.0;
    std::vector<std::string> targets;  // placement ids; empty means all
    bool operator==(const InterfererSpec&) const = default;
};

struct ScenarioSpec {
    FieldSpec field;
    std::vector<BodySpec> bodies;
    std::vector<PlacementSpec> placements;
    std::map<std::string, double> clock_offset_seconds;  // by placement id; missing = 0
    std::vector<InterfererSpec> interferers;
    std::uint64_t seed = 0;
    double length_seconds = 1.0;
    double sample_rate = kDefaultSampleRate;
    double start_time_seconds = 0.0;
    bool operator==(const ScenarioSpec&) const = default;
};

using TraceSet = std::map<std::string, Trace>;

/// Throws InvalidArgument on any violated invariant.
void validate(const ScenarioSpec& spec);

const PlacementSpec* find_placement(const ScenarioSpec& spec, const std::string& id);
const BodySpec* find_body(const ScenarioSpec& spec, const std::string& id);
/// First placement with the given role, or nullptr.
const PlacementSpec* first_with_role(const ScenarioSpec& spec, Role role);

/// One trace per placement. Bit-identical for identical specs.
TraceSet synthesize_scenario(const ScenarioSpec& spec);

/// Delays `trace` by `offset` seconds (output(t) = input(t - offset)) on the
/// original sample grid. Whole samples are shifted, sub-sample remainders are
/// linearly interpolated, and samples without source data are dropped.
Trace apply_clock_offset(const Trace& trace, double offset);

/// Adds seeded interference. The same seed always yields the same
/// interference samples, so applying it to several traces is common-mode.
Trace add_interferer(const Trace& trace, const InterfererSpec& interferer, std::uint64_t seed);

void validate(const InterfererSpec& interferer);

std::string to_string(Role r);
Role role_from_string(const std::string& s);
std::string to_string(InterfererKind k);
InterfererKind interferer_kind_from_string(const std::string& s);

}  // namespace touchauth
