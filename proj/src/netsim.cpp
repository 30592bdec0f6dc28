// SPDX-License-Identifier: Apache-2.0
#include "touchauth/netsim.hpp"

#include <cmath>
#include <cstdio>
#include <memory>
#include <ostream>

namespace touchauth::net {
namespace {

constexpr std::uint8_t kClientHello = 0xF0;
constexpr std::uint8_t kServerHello = 0xF1;

Bytes default_forge(const Envelope& e, Rng& rng) {
    Bytes out(e.payload.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = i == 0 ? e.payload[0] : static_cast<std::uint8_t>(rng() & 0xFF);
    }
    return out;
}

Bytes flip_one_bit(const Bytes& in, Rng& rng) {
    Bytes out = in;
    if (out.empty()) return out;
    // Leave the type byte alone when there is a body to corrupt.
    const std::size_t lo = out.size() > 1 ? 1 : 0;
    const std::size_t idx = lo + static_cast<std::size_t>(rng() % (out.size() - lo));
    out[idx] ^= static_cast<std::uint8_t>(1u << (rng() % 8));
    return out;
}

std::uint64_t read_u64(const Bytes& b, std::size_t at) {
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[at + i]) << (8 * i);
    return v;
}

Bytes hello(std::uint8_t tag, std::uint64_t key) {
    Bytes b{tag};
    for (int i = 0; i < 8; ++i) b.push_back(static_cast<std::uint8_t>(key >> (8 * i)));
    return b;
}

}  // namespace

std::string to_string(PartyId p) {
    return p == PartyId::Authenticator ? "authenticator" : "authenticatee";
}

PartyId peer_of(PartyId p) noexcept {
    return p == PartyId::Authenticator ? PartyId::Authenticatee : PartyId::Authenticator;
}

std::string to_string(AdversaryMode m) {
    switch (m) {
        case AdversaryMode::None: return "none";
        case AdversaryMode::PassiveEavesdrop: return "passive";
        case AdversaryMode::Drop: return "drop";
        case AdversaryMode::Modify: return "modify";
        case AdversaryMode::Forge: return "forge";
        case AdversaryMode::Replay: return "replay";
    }
    return "none";
}

AdversaryMode adversary_mode_from_string(const std::string& s) {
    if (s == "none") return AdversaryMode::None;
    if (s == "passive" || s == "eavesdrop") return AdversaryMode::PassiveEavesdrop;
    if (s == "drop") return AdversaryMode::Drop;
    if (s == "modify") return AdversaryMode::Modify;
    if (s == "forge") return AdversaryMode::Forge;
    if (s == "replay") return AdversaryMode::Replay;
    throw InvalidArgument("unknown adversary mode: " + s);
}

void validate(const SimClock& c) {
    if (!std::isfinite(c.offset_seconds)) throw InvalidArgument("clock offset must be finite");
    if (!(std::abs(c.drift) <= kMaxDrift)) throw InvalidArgument("clock drift out of range");
}

void Transcript::add(double time, std::string actor, std::string event, std::string detail) {
    events_.push_back({time, std::move(actor), std::move(event), std::move(detail)});
}

std::string Transcript::to_text() const {
    std::string out = "time,actor,event,detail\n";
    char buf[48];
    for (const TranscriptEvent& e : events_) {
        std::snprintf(buf, sizeof buf, "%.6f", e.time);
        out += buf;
        out += ',' + e.actor + ',' + e.event + ',' + e.detail + '\n';
    }
    return out;
}

void Transcript::write(std::ostream& os) const { os << to_text(); }

std::string to_hex(const Bytes& b) {
    static constexpr char digits[] = "0123456789abcdef";
    std::string s;
    s.reserve(b.size() * 2);
    for (std::uint8_t v : b) {
        s += digits[v >> 4];
        s += digits[v & 0xF];
    }
    return s;
}

Simulator::Simulator(std::uint64_t seed, double latency_seconds)
    : latency_(latency_seconds), rng_(make_rng(seed)) {
    if (!(latency_seconds >= 0.0)) throw InvalidArgument("latency must be non-negative");
}

Simulator::EventId Simulator::schedule(double delay, std::function<void()> fn) {
    return schedule_at(now_ + delay, std::move(fn));
}

Simulator::EventId Simulator::schedule_at(double time, std::function<void()> fn) {
    if (time < now_) throw InvalidArgument("cannot schedule in the past");
    const EventId id = next_id_++;
    queue_.push({time, id, std::move(fn)});
    return id;
}

void Simulator::cancel(EventId id) { cancelled_.insert(id); }

void Simulator::run(double until) {
    stopped_ = false;
    while (!stopped_ && !queue_.empty()) {
        if (queue_.top().time > until) break;
        Event ev = queue_.top();
        queue_.pop();
        if (cancelled_.erase(ev.id) != 0) continue;
        now_ = ev.time;
        ev.fn();
    }
}

void Simulator::sync_clocks(PartyId reference, PartyId follower, double residual_seconds) {
    if (!(residual_seconds >= 0.0)) throw InvalidArgument("residual must be non-negative");
    const double sign = (rng_() & 1u) ? 1.0 : -1.0;
    SimClock& f = clock(follower);
    f.offset_seconds = clock(reference).offset_seconds + sign * residual_seconds;
    f.drift = clock(reference).drift;
    char buf[96];
    std::snprintf(buf, sizeof buf, "follower=%s;residual=%.6g", to_string(follower).c_str(),
                  sign * residual_seconds);
    log("sim", "clock_sync", buf);
}

void Simulator::log(const std::string& actor, const std::string& event, const std::string& detail) {
    transcript_.add(now_, actor, event, detail);
}

Channel::Channel(Simulator& sim, AdversaryPolicy policy) : sim_(sim), policy_(std::move(policy)) {
    if (!policy_.forge_payload) policy_.forge_payload = default_forge;
}

void Channel::set_handler(PartyId receiver, Handler h) {
    handlers_[static_cast<int>(receiver)] = std::move(h);
}

std::string Channel::observed(const Envelope& e) const {
    std::string d = "from=" + to_string(e.sender) + ";len=" + std::to_string(e.payload.size());
    if (e.channel_secure) return d + ";secure=1";
    return d + ";secure=0;payload=" + to_hex(e.payload);
}

void Channel::deliver_later(PartyId receiver, Delivery d, double delay) {
    sim_.schedule(delay, [this, receiver, d = std::move(d)] {
        if (!open_) return;
        auto& h = handlers_[static_cast<int>(receiver)];
        if (h) h(d);
    });
}

void Channel::send(PartyId sender, Bytes payload) {
    if (!open_) throw ChannelClosed("send on closed channel");
    if (payload.size() > kMaxPayloadBytes) throw InvalidArgument("payload exceeds 64 KiB");

    Envelope env{sender, std::move(payload), sim_.clock(sender).local(sim_.now()), secure_};
    const PartyId receiver = peer_of(sender);
    const double lat = sim_.latency();
    // What any on-path observer can see, adversary or not.
    sim_.log("wire", "envelope", observed(env));

    if (policy_.mode == AdversaryMode::None || !policy_.applies_to(env)) {
        deliver_later(receiver, {std::move(env), true, {}}, lat);
        return;
    }

    const std::string seen = observed(env);
    switch (policy_.mode) {
        case AdversaryMode::PassiveEavesdrop:
            sim_.log("adversary", "observe", seen);
            deliver_later(receiver, {std::move(env), true, {}}, lat);
            break;
        case AdversaryMode::Drop:
            sim_.log("adversary", "drop", seen);
            break;
        case AdversaryMode::Modify:
        case AdversaryMode::Forge: {
            const bool forge = policy_.mode == AdversaryMode::Forge;
            sim_.log("adversary", forge ? "forge" : "modify", seen);
            Delivery d{env, true, {}};
            if (env.channel_secure) {
                // Without the session keys any change fails record authentication.
                d.envelope.payload = flip_one_bit(env.payload, sim_.rng());
                d.integrity_ok = false;
                d.failure = "record authentication failed";
            } else {
                d.envelope.payload = forge ? policy_.forge_payload(env, sim_.rng())
                                           : flip_one_bit(env.payload, sim_.rng());
            }
            deliver_later(receiver, std::move(d), lat);
            break;
        }
        case AdversaryMode::Replay: {
            sim_.log("adversary", "replay", seen);
            Delivery copy{env, true, {}};
            if (env.channel_secure) {
                copy.integrity_ok = false;
                copy.failure = "replayed record";
            }
            deliver_later(receiver, {std::move(env), true, {}}, lat);
            deliver_later(receiver, std::move(copy), 2.0 * lat);
            break;
        }
        case AdversaryMode::None:
            break;
    }
}

void establish_secure_channel(Simulator& sim, Channel& ch, PartyId initiator,
                              std::function<void(const HandshakeResult&)> done) {
    const PartyId responder = peer_of(initiator);
    const std::uint64_t initiator_key = sim.rng()();
    const std::uint64_t responder_key = sim.rng()();

    struct State {
        bool finished = false;
        Simulator::EventId timer = 0;
        std::function<void(const HandshakeResult&)> done;
    };
    auto st = std::make_shared<State>();
    st->done = std::move(done);

    auto finish = [&sim, st](HandshakeResult r) {
        if (st->finished) return;
        st->finished = true;
        sim.cancel(st->timer);
        st->done(r);
    };

    ch.set_handler(responder, [&sim, &ch, responder, responder_key](const Delivery& d) {
        if (!d.integrity_ok || d.envelope.payload.size() != 9 ||
            d.envelope.payload[0] != kClientHello) {
            sim.log(to_string(responder), "handshake_error", "unexpected message");
            return;
        }
        ch.send(responder, hello(kServerHello, responder_key));
    });
    ch.set_handler(initiator, [&sim, &ch, initiator, responder_key, finish](const Delivery& d) {
        if (!d.integrity_ok || d.envelope.payload.size() != 9 ||
            d.envelope.payload[0] != kServerHello) {
            sim.log(to_string(initiator), "handshake_error", "unexpected message");
            return;
        }
        HandshakeResult r;
        r.established = true;
        r.peer_authentic = read_u64(d.envelope.payload, 1) == responder_key;
        ch.mark_secure();
        sim.log(to_string(initiator), "secure_channel",
                r.peer_authentic ? "peer=genuine" : "peer=unauthenticated");
        finish(r);
    });

    st->timer = sim.schedule(kStepTimeoutSeconds, [&sim, initiator, finish] {
        sim.log(to_string(initiator), "timeout", "handshake");
        HandshakeResult r;
        r.timed_out = true;
        finish(r);
    });
    sim.log(to_string(initiator), "handshake", "start");
    ch.send(initiator, hello(kClientHello, initiator_key));
}

HandshakeResult establish_secure_channel(Simulator& sim, Channel& ch, PartyId initiator) {
    std::optional<HandshakeResult> out;
    establish_secure_channel(sim, ch, initiator, [&](const HandshakeResult& r) {
        out = r;
        sim.stop();
    });
    sim.run();
    return out.value_or(HandshakeResult{});
}

}  // namespace touchauth::net
