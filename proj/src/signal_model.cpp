// SPDX-License-Identifier: Apache-2.0
#include "touchauth/signal_model.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <set>

#include "touchauth/error.hpp"
#include "touchauth/rng.hpp"

namespace touchauth {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr int kEnvelopeTones = 12;
constexpr int kPrivateTones = 24;
constexpr double kToneGatePeriod = 1.0;  // seconds, on/off cycle of a gated tone
// Re-anchor phasor recurrences this often to bound accumulated rounding.
constexpr std::size_t kReanchorEvery = 256;

struct Tone {
    double freq;   // Hz
    double phase;  // radians
};

/// out[i] += weight * sin(2 pi f (t0 + i dt) + phase) summed over tones,
/// via a rotating phasor per tone.
void accumulate_tones(std::vector<double>& out, const std::vector<Tone>& tones, double t0,
                      double dt, double weight) {
    const std::size_t n = out.size();
    for (const Tone& tone : tones) {
        const double w = kTwoPi * tone.freq;
        const std::complex<double> step = std::polar(1.0, w * dt);
        std::complex<double> z;
        for (std::size_t i = 0; i < n; ++i) {
            if (i % kReanchorEvery == 0) {
                z = std::polar(1.0, w * (t0 + static_cast<double>(i) * dt) + tone.phase);
            }
            out[i] += weight * z.imag();
            z *= step;
        }
    }
}

std::vector<Tone> draw_tones(Rng& rng, int count, double lo, double hi) {
    std::vector<Tone> tones(static_cast<std::size_t>(count));
    for (Tone& t : tones) {
        t.freq = uniform(rng, lo, hi);
        t.phase = uniform(rng, 0.0, kTwoPi);
    }
    return tones;
}

/// Unclipped movement process: 12 cosines in the movement band, scaled to
/// roughly 0.5 RMS so that clipping to [-1, 1] is rare.
std::vector<double> raw_envelope(const std::vector<Tone>& tones, double t0, double dt,
                                 std::size_t n) {
    std::vector<double> out(n, 0.0);
    if (tones.empty()) return out;
    // cos(x) = sin(x + pi/2)
    std::vector<Tone> shifted = tones;
    for (Tone& t : shifted) t.phase += std::numbers::pi / 2.0;
    accumulate_tones(out, shifted, t0, dt, 0.5 * std::sqrt(2.0 / static_cast<double>(tones.size())));
    return out;
}

struct BodyRealization {
    double amplitude = 0.0;
    double phase = 0.0;
    double depth = 0.0;
    double phase_depth = 0.0;
    std::vector<Tone> envelope_tones;  // empty when the body does not move
    const MimicSpec* mimic = nullptr;
    std::size_t victim = 0;
};

std::vector<BodyRealization> realize_bodies(const ScenarioSpec& spec) {
    std::vector<BodyRealization> out(spec.bodies.size());
    for (std::size_t b = 0; b < spec.bodies.size(); ++b) {
        const BodySpec& body = spec.bodies[b];
        Rng rng = make_rng(derive_seed(spec.seed, stream::body + b));
        BodyRealization& r = out[b];
        // Draw order is fixed so that toggling one option leaves the others' draws intact.
        const double z = gaussian(rng);
        const double u = uniform(rng, 0.0, kTwoPi);
        r.amplitude = body.amplitude_volts.value_or(spec.field.base_amplitude_volts) *
                      (body.amplitude_log_sigma > 0.0 ? std::exp(body.amplitude_log_sigma * z) : 1.0);
        r.phase = body.random_phase ? u : body.carrier_phase;
        if (body.movement_envelope) {
            const MovementSpec& m = *body.movement_envelope;
            r.depth = m.envelope_depth;
            r.phase_depth = m.phase_depth_radians;
            r.envelope_tones = draw_tones(rng, kEnvelopeTones, m.band_low_hz, m.band_high_hz);
            if (m.mimic_of) r.mimic = &*m.mimic_of;
        }
    }
    for (std::size_t b = 0; b < out.size(); ++b) {
        if (out[b].mimic == nullptr) continue;
        for (std::size_t v = 0; v < spec.bodies.size(); ++v) {
            if (spec.bodies[v].body_id == out[b].mimic->body_id) out[b].victim = v;
        }
        if (out[b].mimic->lock_field_phase) {
            out[b].phase = out[out[b].victim].phase + spec.bodies[b].carrier_phase;
        }
    }
    return out;
}

/// Clipped movement envelope of body `b` sampled on the grid t0 + i*dt.
std::vector<double> body_envelope(const std::vector<BodyRealization>& bodies, std::size_t b,
                                  double t0, double dt, std::size_t n) {
    const BodyRealization& r = bodies[b];
    std::vector<double> env;
    if (r.mimic != nullptr) {
        env = raw_envelope(bodies[r.victim].envelope_tones, t0 - r.mimic->delay_seconds, dt, n);
        const std::vector<double> own = raw_envelope(r.envelope_tones, t0, dt, n);
        for (std::size_t i = 0; i < n; ++i) env[i] += r.mimic->envelope_noise_std * own[i];
    } else {
        env = raw_envelope(r.envelope_tones, t0, dt, n);
    }
    for (double& e : env) e = std::clamp(e, -1.0, 1.0);
    return env;
}

std::size_t body_index(const ScenarioSpec& spec, const std::string& id) {
    for (std::size_t i = 0; i < spec.bodies.size(); ++i) {
        if (spec.bodies[i].body_id == id) return i;
    }
    throw InvalidArgument("unknown body: " + id);
}

void require(bool ok, const std::string& msg) {
    if (!ok) throw InvalidArgument(msg);
}

}  // namespace

void validate(const InterfererSpec& i) {
    require(i.amplitude_volts >= 0.0, "interferer amplitude_volts must be >= 0");
    require(i.duty_cycle > 0.0 && i.duty_cycle <= 1.0, "interferer duty_cycle must be in (0, 1]");
    require(i.frequency > 0.0, "interferer frequency must be > 0");
}

void validate(const ScenarioSpec& spec) {
    const FieldSpec& f = spec.field;
    require(f.grid_frequency > 0.0, "grid_frequency must be > 0");
    require(f.base_amplitude_volts >= 0.0, "base_amplitude_volts must be >= 0");
    require(f.private_bandwidth_hz >= 0.0, "private_bandwidth_hz must be >= 0");
    bool has_fundamental = false;
    for (const Harmonic& h : f.harmonics) {
        require(h.index >= 1, "harmonic index must be >= 1");
        require(h.relative_amplitude >= 0.0, "harmonic amplitude must be >= 0");
        has_fundamental = has_fundamental || h.index == 1;
    }
    require(has_fundamental, "harmonic index 1 must be present");
    require(spec.length_seconds > 0.0, "length_seconds must be > 0");
    require(spec.sample_rate > 0.0, "sample_rate must be > 0");

    std::set<std::string> body_ids;
    for (const BodySpec& b : spec.bodies) {
        require(!b.body_id.empty(), "body_id must be non-empty");
        require(body_ids.insert(b.body_id).second, "duplicate body_id: " + b.body_id);
        require(!b.amplitude_volts || *b.amplitude_volts >= 0.0, "amplitude_volts must be >= 0");
        require(b.amplitude_log_sigma >= 0.0, "amplitude_log_sigma must be >= 0");
    }
    for (const BodySpec& b : spec.bodies) {
        if (!b.movement_envelope) continue;
        const MovementSpec& m = *b.movement_envelope;
        require(m.envelope_depth >= 0.0 && m.envelope_depth <= 1.0,
                "envelope_depth must be in [0, 1]");
        require(m.band_low_hz >= 0.0 && m.band_low_hz < m.band_high_hz,
                "envelope_band must satisfy 0 <= low < high");
        require(m.phase_depth_radians >= 0.0, "phase_depth_radians must be >= 0");
        if (m.mimic_of) {
            const MimicSpec& mm = *m.mimic_of;
            require(mm.delay_seconds >= 0.0, "mimic delay_seconds must be >= 0");
            require(mm.envelope_noise_std >= 0.0, "mimic envelope_noise_std must be >= 0");
            require(body_ids.contains(mm.body_id), "mimic_of references unknown body: " + mm.body_id);
            require(mm.body_id != b.body_id, "a body cannot mimic itself");
            const BodySpec* victim = find_body(spec, mm.body_id);
            require(!(victim->movement_envelope && victim->movement_envelope->mimic_of),
                    "mimic_of cannot reference another mimic");
        }
    }

    std::set<std::string> placement_ids;
    for (const PlacementSpec& p : spec.placements) {
        require(!p.placement_id.empty(), "placement_id must be non-empty");
        require(placement_ids.insert(p.placement_id).second,
                "duplicate placement_id: " + p.placement_id);
        require(body_ids.contains(p.body_id),
                "placement " + p.placement_id + " references unknown body: " + p.body_id);
        require(p.location_gain > 0.0, "location_gain must be > 0");
        require(p.noise_std >= 0.0, "noise_std must be >= 0");
        require(p.coupling >= 0.0 && p.coupling <= 1.0, "coupling must be in [0, 1]");
    }
    for (const auto& [id, off] : spec.clock_offset_seconds) {
        require(placement_ids.contains(id), "clock offset for unknown placement: " + id);
        require(std::abs(off) < spec.length_seconds, "clock offset must be shorter than the trace");
    }
    for (const InterfererSpec& i : spec.interferers) {
        validate(i);
        for (const std::string& t : i.targets) {
            require(placement_ids.contains(t), "interferer targets unknown placement: " + t);
        }
    }
}

const PlacementSpec* find_placement(const ScenarioSpec& spec, const std::string& id) {
    for (const auto& p : spec.placements) {
        if (p.placement_id == id) return &p;
    }
    return nullptr;
}

const BodySpec* find_body(const ScenarioSpec& spec, const std::string& id) {
    for (const auto& b : spec.bodies) {
        if (b.body_id == id) return &b;
    }
    return nullptr;
}

const PlacementSpec* first_with_role(const ScenarioSpec& spec, Role role) {
    for (const auto& p : spec.placements) {
        if (p.role == role) return &p;
    }
    return nullptr;
}

TraceSet synthesize_scenario(const ScenarioSpec& spec) {
    validate(spec);
    const std::size_t n = samples_for(spec.length_seconds, spec.sample_rate);
    const double dt = 1.0 / spec.sample_rate;
    const double f0 = spec.field.grid_frequency;
    const double bandwidth = spec.field.private_bandwidth_hz;
    const std::vector<BodyRealization> bodies = realize_bodies(spec);

    TraceSet out;
    for (std::size_t p = 0; p < spec.placements.size(); ++p) {
        const PlacementSpec& pl = spec.placements[p];
        const std::size_t b = body_index(spec, pl.body_id);
        const BodyRealization& body = bodies[b];
        const auto off_it = spec.clock_offset_seconds.find(pl.placement_id);
        const double offset = off_it == spec.clock_offset_seconds.end() ? 0.0 : off_it->second;
        const double t0 = spec.start_time_seconds - offset;  // first sample, body time

        Rng rng = make_rng(derive_seed(spec.seed, stream::placement + p));

        std::vector<double> priv(n, 0.0);
        const double private_weight = std::sqrt(1.0 - pl.coupling * pl.coupling);
        for (const Harmonic& h : spec.field.harmonics) {
            const double centre = h.index * f0;
            std::vector<Tone> tones =
                draw_tones(rng, kPrivateTones, centre - bandwidth, centre + bandwidth);
            // sqrt(1/M) gives the private part the power of a unit sinusoid.
            accumulate_tones(priv, tones, t0, dt,
                             h.relative_amplitude / std::sqrt(static_cast<double>(kPrivateTones)));
        }

        const std::vector<double> env = body_envelope(bodies, b, t0, dt, n);
        const double sign = pl.phase_flip ? -1.0 : 1.0;

        Trace trace;
        trace.start_time = spec.start_time_seconds;
        trace.sample_rate = spec.sample_rate;
        trace.samples.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double t = t0 + static_cast<double>(i) * dt;
            const double e = env[i];
            const double phase = body.phase + pl.phase_offset + body.phase_depth * e;
            double carrier = 0.0;
            for (const Harmonic& h : spec.field.harmonics) {
                carrier += h.relative_amplitude * std::sin(kTwoPi * h.index * f0 * t + phase);
            }
            const double modulation = body.amplitude * (1.0 + body.depth * e);
            const double sig = modulation * (pl.coupling * carrier + private_weight * priv[i]);
            trace.samples[i] = pl.location_gain * (sign * sig);
        }
        if (pl.noise_std > 0.0) {
            std::normal_distribution<double> noise{0.0, pl.noise_std};
            for (double& s : trace.samples) s += noise(rng);
        }
        out.emplace(pl.placement_id, std::move(trace));
    }

    for (std::size_t k = 0; k < spec.interferers.size(); ++k) {
        const InterfererSpec& itf = spec.interferers[k];
        const std::uint64_t seed = derive_seed(spec.seed, stream::interferer + k);
        for (auto& [id, trace] : out) {
            const bool targeted = itf.targets.empty() ||
                                  std::find(itf.targets.begin(), itf.targets.end(), id) !=
                                      itf.targets.end();
            if (targeted) trace = add_interferer(trace, itf, seed);
        }
    }
    return out;
}

Trace apply_clock_offset(const Trace& trace, double offset) {
    validate(trace);
    if (!(std::abs(offset) < trace.duration())) {
        throw InvalidArgument("clock offset must be shorter than the trace");
    }
    if (offset == 0.0) return trace;

    const std::size_t n = trace.size();
    const double shift = offset * trace.sample_rate;  // in samples
    const auto drop = static_cast<std::size_t>(std::ceil(std::abs(shift)));
    if (drop >= n) throw InvalidArgument("clock offset leaves no samples");

    // Output index j sits at the original grid time of index j + first and
    // reads the input at fractional position (j + first) - shift.
    const std::size_t first = offset > 0.0 ? drop : 0;
    Trace out;
    out.sample_rate = trace.sample_rate;
    out.start_time = trace.time_at(first);
    out.samples.resize(n - drop);
    for (std::size_t j = 0; j < out.samples.size(); ++j) {
        const double pos = static_cast<double>(j + first) - shift;
        const double base = std::floor(pos);
        const double frac = pos - base;
        const auto i0 = static_cast<std::size_t>(std::max(0.0, base));
        if (frac == 0.0 || i0 + 1 >= n) {
            out.samples[j] = trace.samples[std::min(i0, n - 1)];
        } else {
            const double a = trace.samples[i0];
            const double b = trace.samples[i0 + 1];
            out.samples[j] = a + frac * (b - a);
        }
    }
    return out;
}

Trace add_interferer(const Trace& trace, const InterfererSpec& itf, std::uint64_t seed) {
    validate(trace);
    validate(itf);
    Trace out = trace;
    if (itf.amplitude_volts == 0.0) return out;

    Rng rng = make_rng(seed);
    const double tone_phase = uniform(rng, 0.0, kTwoPi);
    const double gate_phase = uniform(rng, 0.0, 1.0);
    const double period =
        itf.kind == InterfererKind::AdditiveTone ? kToneGatePeriod : 1.0 / itf.frequency;
    auto on = [&](double t) {
        if (itf.duty_cycle >= 1.0) return true;
        const double cycle = t / period + gate_phase;
        return cycle - std::floor(cycle) < itf.duty_cycle;
    };

    std::normal_distribution<double> noise{0.0, itf.amplitude_volts};
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double t = out.time_at(i);
        // Draw every sample so the noise sequence does not depend on the gate.
        const double burst = itf.kind == InterfererKind::BroadbandBurst ? noise(rng) : 0.0;
        if (!on(t)) continue;
        if (itf.kind == InterfererKind::AdditiveTone) {
            out.samples[i] += itf.amplitude_volts * std::sin(kTwoPi * itf.frequency * t + tone_phase);
        } else {
            out.samples[i] += burst;
        }
    }
    return out;
}

std::string to_string(Role r) {
    switch (r) {
        case Role::None: return "none";
        case Role::Authenticator: return "authenticator";
        case Role::Valid: return "valid";
        case Role::Invalid: return "invalid";
        case Role::Attacker: return "attacker";
    }
    return "none";
}

Role role_from_string(const std::string& s) {
    if (s == "none") return Role::None;
    if (s == "authenticator") return Role::Authenticator;
    if (s == "valid") return Role::Valid;
    if (s == "invalid") return Role::Invalid;
    if (s == "attacker") return Role::Attacker;
    throw ConfigError("unknown role: " + s);
}

std::string to_string(InterfererKind k) {
    return k == InterfererKind::AdditiveTone ? "additive_tone" : "broadband_burst";
}

InterfererKind interferer_kind_from_string(const std::string& s) {
    if (s == "additive_tone") return InterfererKind::AdditiveTone;
    if (s == "broadband_burst") return InterfererKind::BroadbandBurst;
    throw ConfigError("unknown interferer kind: " + s);
}

}  // namespace touchauth
