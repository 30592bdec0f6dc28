// SPDX-License-Identifier: Apache-2.0
#include "touchauth/scenario_io.hpp"

#include <fstream>
#include <initializer_list>
#include <json.hpp>
#include <sstream>

#include "touchauth/error.hpp"

namespace touchauth {
namespace {

using nlohmann::json;

void only_keys(const json& j, std::initializer_list<const char*> allowed, const char* where) {
    if (!j.is_object()) throw ConfigError(std::string(where) + " must be an object");
    for (const auto& [key, value] : j.items()) {
        bool ok = false;
        for (const char* a : allowed) ok = ok || key == a;
        if (!ok) throw ConfigError(std::string("unknown key '") + key + "' in " + where);
    }
}

template <class T>
void read_opt(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

FieldSpec field_from(const json& j) {
    only_keys(j,
              {"grid_frequency", "harmonic_amplitudes", "base_amplitude_volts",
               "private_bandwidth_hz"},
              "field");
    FieldSpec f;
    read_opt(j, "grid_frequency", f.grid_frequency);
    read_opt(j, "base_amplitude_volts", f.base_amplitude_volts);
    read_opt(j, "private_bandwidth_hz", f.private_bandwidth_hz);
    if (j.contains("harmonic_amplitudes")) {
        f.harmonics.clear();
        for (const json& h : j.at("harmonic_amplitudes")) {
            if (!h.is_array() || h.size() != 2) {
                throw ConfigError("harmonic_amplitudes entries must be [index, amplitude]");
            }
            f.harmonics.push_back({h[0].get<int>(), h[1].get<double>()});
        }
    }
    return f;
}

MovementSpec movement_from(const json& j) {
    only_keys(j, {"envelope_band", "envelope_depth", "phase_depth_radians", "mimic_of"},
              "movement_envelope");
    MovementSpec m;
    if (j.contains("envelope_band")) {
        const json& band = j.at("envelope_band");
        if (!band.is_array() || band.size() != 2) {
            throw ConfigError("envelope_band must be [low, high]");
        }
        m.band_low_hz = band[0].get<double>();
        m.band_high_hz = band[1].get<double>();
    }
    read_opt(j, "envelope_depth", m.envelope_depth);
    read_opt(j, "phase_depth_radians", m.phase_depth_radians);
    if (j.contains("mimic_of") && !j.at("mimic_of").is_null()) {
        const json& mj = j.at("mimic_of");
        only_keys(mj, {"body_id", "delay_seconds", "envelope_noise_std", "lock_field_phase"},
                  "mimic_of");
        MimicSpec mm;
        mm.body_id = mj.at("body_id").get<std::string>();
        read_opt(mj, "delay_seconds", mm.delay_seconds);
        read_opt(mj, "envelope_noise_std", mm.envelope_noise_std);
        read_opt(mj, "lock_field_phase", mm.lock_field_phase);
        m.mimic_of = mm;
    }
    return m;
}

BodySpec body_from(const json& j) {
    only_keys(j,
              {"body_id", "amplitude_volts", "carrier_phase", "amplitude_log_sigma",
               "random_phase", "movement_envelope"},
              "bodies[]");
    BodySpec b;
    b.body_id = j.at("body_id").get<std::string>();
    if (j.contains("amplitude_volts") && !j.at("amplitude_volts").is_null()) {
        b.amplitude_volts = j.at("amplitude_volts").get<double>();
    }
    read_opt(j, "carrier_phase", b.carrier_phase);
    read_opt(j, "amplitude_log_sigma", b.amplitude_log_sigma);
    read_opt(j, "random_phase", b.random_phase);
    if (j.contains("movement_envelope") && !j.at("movement_envelope").is_null()) {
        b.movement_envelope = movement_from(j.at("movement_envelope"));
    }
    return b;
}

PlacementSpec placement_from(const json& j) {
    only_keys(j,
              {"placement_id", "role", "body_id", "location_gain", "phase_offset", "phase_flip",
               "noise_std", "coupling"},
              "placements[]");
    PlacementSpec p;
    p.placement_id = j.at("placement_id").get<std::string>();
    p.body_id = j.at("body_id").get<std::string>();
    if (j.contains("role")) p.role = role_from_string(j.at("role").get<std::string>());
    read_opt(j, "location_gain", p.location_gain);
    read_opt(j, "phase_offset", p.phase_offset);
    read_opt(j, "phase_flip", p.phase_flip);
    read_opt(j, "noise_std", p.noise_std);
    read_opt(j, "coupling", p.coupling);
    return p;
}

InterfererSpec interferer_from(const json& j) {
    only_keys(j, {"kind", "frequency", "amplitude_volts", "duty_cycle", "targets"},
              "interferers[]");
    InterfererSpec i;
    i.kind = interferer_kind_from_string(j.at("kind").get<std::string>());
    read_opt(j, "frequency", i.frequency);
    read_opt(j, "amplitude_volts", i.amplitude_volts);
    read_opt(j, "duty_cycle", i.duty_cycle);
    read_opt(j, "targets", i.targets);
    return i;
}

ScenarioSpec scenario_from(const json& j) {
    only_keys(j,
              {"field", "bodies", "placements", "clock_offset_seconds", "interferers", "seed",
               "length_seconds", "sample_rate", "start_time_seconds"},
              "scenario");
    ScenarioSpec s;
    if (j.contains("field")) s.field = field_from(j.at("field"));
    if (j.contains("bodies")) {
        for (const json& b : j.at("bodies")) s.bodies.push_back(body_from(b));
    }
    if (j.contains("placements")) {
        for (const json& p : j.at("placements")) s.placements.push_back(placement_from(p));
    }
    if (j.contains("clock_offset_seconds")) {
        const json& c = j.at("clock_offset_seconds");
        if (!c.is_object()) throw ConfigError("clock_offset_seconds must be an object");
        for (const auto& [id, v] : c.items()) s.clock_offset_seconds[id] = v.get<double>();
    }
    if (j.contains("interferers")) {
        for (const json& i : j.at("interferers")) s.interferers.push_back(interferer_from(i));
    }
    read_opt(j, "seed", s.seed);
    read_opt(j, "length_seconds", s.length_seconds);
    read_opt(j, "sample_rate", s.sample_rate);
    read_opt(j, "start_time_seconds", s.start_time_seconds);
    return s;
}

json to_json(const ScenarioSpec& s) {
    json field = {
        {"grid_frequency", s.field.grid_frequency},
        {"harmonic_amplitudes", json::array()},
        {"base_amplitude_volts", s.field.base_amplitude_volts},
        {"private_bandwidth_hz", s.field.private_bandwidth_hz},
    };
    for (const Harmonic& h : s.field.harmonics) {
        field["harmonic_amplitudes"].push_back({h.index, h.relative_amplitude});
    }

    json bodies = json::array();
    for (const BodySpec& b : s.bodies) {
        json jb = {{"body_id", b.body_id},
                   {"carrier_phase", b.carrier_phase},
                   {"amplitude_log_sigma", b.amplitude_log_sigma},
                   {"random_phase", b.random_phase}};
        jb["amplitude_volts"] = b.amplitude_volts ? json(*b.amplitude_volts) : json(nullptr);
        if (b.movement_envelope) {
            const MovementSpec& m = *b.movement_envelope;
            json jm = {{"envelope_band", {m.band_low_hz, m.band_high_hz}},
                       {"envelope_depth", m.envelope_depth},
                       {"phase_depth_radians", m.phase_depth_radians}};
            if (m.mimic_of) {
                jm["mimic_of"] = {{"body_id", m.mimic_of->body_id},
                                  {"delay_seconds", m.mimic_of->delay_seconds},
                                  {"envelope_noise_std", m.mimic_of->envelope_noise_std},
                                  {"lock_field_phase", m.mimic_of->lock_field_phase}};
            } else {
                jm["mimic_of"] = nullptr;
            }
            jb["movement_envelope"] = jm;
        } else {
            jb["movement_envelope"] = nullptr;
        }
        bodies.push_back(jb);
    }

    json placements = json::array();
    for (const PlacementSpec& p : s.placements) {
        placements.push_back({{"placement_id", p.placement_id},
                              {"role", to_string(p.role)},
                              {"body_id", p.body_id},
                              {"location_gain", p.location_gain},
                              {"phase_offset", p.phase_offset},
                              {"phase_flip", p.phase_flip},
                              {"noise_std", p.noise_std},
                              {"coupling", p.coupling}});
    }

    json interferers = json::array();
    for (const InterfererSpec& i : s.interferers) {
        interferers.push_back({{"kind", to_string(i.kind)},
                               {"frequency", i.frequency},
                               {"amplitude_volts", i.amplitude_volts},
                               {"duty_cycle", i.duty_cycle},
                               {"targets", i.targets}});
    }

    json offsets = json::object();
    for (const auto& [id, v] : s.clock_offset_seconds) offsets[id] = v;

    return json{{"field", field},
                {"bodies", bodies},
                {"placements", placements},
                {"clock_offset_seconds", offsets},
                {"interferers", interferers},
                {"seed", s.seed},
                {"length_seconds", s.length_seconds},
                {"sample_rate", s.sample_rate},
                {"start_time_seconds", s.start_time_seconds}};
}

json parse_value(const std::string& text) {
    json v = json::parse(text, nullptr, /*allow_exceptions=*/false);
    if (v.is_discarded()) return json(text);
    return v;
}

}  // namespace

ScenarioSpec scenario_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("scenario is not valid JSON: ") + e.what());
    }
    ScenarioSpec s;
    try {
        s = scenario_from(j);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed scenario: ") + e.what());
    }
    validate(s);
    return s;
}

std::string scenario_to_json(const ScenarioSpec& spec) { return to_json(spec).dump(2) + "\n"; }

ScenarioSpec load_scenario(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open scenario file: " + path);
    std::stringstream ss;
    ss << is.rdbuf();
    return scenario_from_json(ss.str());
}

void save_scenario(const std::string& path, const ScenarioSpec& spec) {
    std::ofstream os(path);
    if (!os) throw IoError("cannot write scenario file: " + path);
    os << scenario_to_json(spec);
}

ScenarioSpec apply_overrides(const ScenarioSpec& spec,
                             const std::vector<std::pair<std::string, std::string>>& overrides) {
    json j = to_json(spec);
    for (const auto& [path, value] : overrides) {
        std::string pointer;
        std::stringstream ss(path);
        std::string part;
        while (std::getline(ss, part, '.')) pointer += "/" + part;
        json::json_pointer ptr;
        try {
            ptr = json::json_pointer(pointer);
        } catch (const json::exception&) {
            throw ConfigError("bad override path: " + path);
        }
        // Only existing keys, plus new clock offsets, may be set.
        const bool is_offset = path.rfind("clock_offset_seconds.", 0) == 0;
        if (!is_offset && !j.contains(ptr)) throw ConfigError("unknown override key: " + path);
        j[ptr] = parse_value(value);
    }
    try {
        ScenarioSpec out = scenario_from(j);
        validate(out);
        return out;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("override produced a malformed scenario: ") + e.what());
    }
}

}  // namespace touchauth
