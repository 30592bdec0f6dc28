// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "touchauth/signal_model.hpp"

namespace touchauth::presets {

/// Authenticator and valid authenticatee in one moving palm, invalid
/// authenticatee on a second moving person. Per-synthesis lognormal body
/// amplitudes (sigma 0.5) and uniform carrier phases.
ScenarioSpec calibrated_default();

/// calibrated_default plus an attacker body that copies the wearer's
/// movements 0.2 s late while standing in the same local field.
ScenarioSpec mimicry();

/// Two noiseless placements sharing one still body whose body potential is a pure
/// grid-frequency sinusoid (coupling 1). Reference for clock-offset checks.
ScenarioSpec pure_tone_pair();

/// Movement model shared by the calibrated presets.
MovementSpec calibrated_movement();

}  // namespace touchauth::presets
