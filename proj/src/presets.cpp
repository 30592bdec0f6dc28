// SPDX-License-Identifier: Apache-2.0
#include "touchauth/presets.hpp"

namespace touchauth::presets {

MovementSpec calibrated_movement() {
    MovementSpec m;
    m.band_low_hz = 0.5;
    m.band_high_hz = 2.0;
    m.envelope_depth = 0.3;
    m.phase_depth_radians = 6.0;
    return m;
}

ScenarioSpec calibrated_default() {
    ScenarioSpec s;
    s.seed = 1;
    s.length_seconds = 1.0;

    for (const char* id : {"wearer", "other"}) {
        BodySpec b;
        b.body_id = id;
        b.amplitude_log_sigma = 0.5;
        b.random_phase = true;
        b.movement_envelope = calibrated_movement();
        s.bodies.push_back(b);
    }

    PlacementSpec auth{.placement_id = "authenticator",
                       .role = Role::Authenticator,
                       .body_id = "wearer",
                       .location_gain = 1.0,
                       .noise_std = 0.02,
                       .coupling = 0.99};
    PlacementSpec valid = auth;
    valid.placement_id = "valid_authenticatee";
    valid.role = Role::Valid;
    valid.location_gain = 0.85;
    PlacementSpec invalid = auth;
    invalid.placement_id = "invalid_authenticatee";
    invalid.role = Role::Invalid;
    invalid.body_id = "other";
    invalid.coupling = 0.0;
    s.placements = {auth, valid, invalid};
    return s;
}

ScenarioSpec mimicry() {
    ScenarioSpec s = calibrated_default();
    BodySpec attacker;
    attacker.body_id = "mimic";
    attacker.amplitude_log_sigma = 0.5;
    attacker.random_phase = true;
    attacker.movement_envelope = calibrated_movement();
    attacker.movement_envelope->mimic_of = MimicSpec{.body_id = "wearer"};
    s.bodies.push_back(attacker);

    PlacementSpec p{.placement_id = "attacker",
                    .role = Role::Attacker,
                    .body_id = "mimic",
                    .location_gain = 1.0,
                    .noise_std = 0.02,
                    .coupling = 0.99};
    s.placements.push_back(p);
    return s;
}

ScenarioSpec pure_tone_pair() {
    ScenarioSpec s;
    s.seed = 1;
    s.length_seconds = 1.0;
    s.field.harmonics = {{1, 1.0}};
    BodySpec b;
    b.body_id = "wearer";
    b.amplitude_volts = 0.3;
    s.bodies.push_back(b);
    PlacementSpec auth{.placement_id = "authenticator",
                       .role = Role::Authenticator,
                       .body_id = "wearer",
                       .noise_std = 0.0,
                       .coupling = 1.0};
    PlacementSpec valid = auth;
    valid.placement_id = "valid_authenticatee";
    valid.role = Role::Valid;
    s.placements = {auth, valid};
    return s;
}

}  // namespace touchauth::presets
