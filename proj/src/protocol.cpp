// SPDX-License-Identifier: Apache-2.0
#include "touchauth/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>

#include "touchauth/commitment.hpp"
#include "touchauth/error.hpp"
#include "touchauth/rng.hpp"

namespace touchauth {
namespace {

using net::Bytes;
using net::PartyId;

constexpr double kSetupBudgetSeconds = 0.1;  // head end to window start
constexpr double kMaxSyncResidual = 0.05;

enum Msg : std::uint8_t {
    kHello = 1,
    kSync = 2,
    kSyncAck = 3,
    kWindow = 4,
    kCommit = 5,
    kTraceS = 6,
    kReveal = 7,
    kTraceSPrime = 8,
    kNotify = 9,
};

const char* msg_name(std::uint8_t t) {
    switch (t) {
        case kHello: return "HELLO";
        case kSync: return "SYNC";
        case kSyncAck: return "SYNC_ACK";
        case kWindow: return "WINDOW";
        case kCommit: return "COMMIT";
        case kTraceS: return "S";
        case kReveal: return "REVEAL";
        case kTraceSPrime: return "S_PRIME";
        case kNotify: return "NOTIFY";
        default: return "UNKNOWN";
    }
}

class Malformed : public InvalidArgument {
public:
    using InvalidArgument::InvalidArgument;
};

class Writer {
public:
    explicit Writer(std::uint8_t type) { b_.push_back(type); }
    Writer& u8(std::uint8_t v) {
        b_.push_back(v);
        return *this;
    }
    Writer& u32(std::uint32_t v) {
        for (int i = 0; i < 4; ++i) b_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
        return *this;
    }
    Writer& f64(double v) {
        std::uint64_t bits;
        std::memcpy(&bits, &v, sizeof bits);
        for (int i = 0; i < 8; ++i) b_.push_back(static_cast<std::uint8_t>(bits >> (8 * i)));
        return *this;
    }
    Writer& bytes(std::span<const std::uint8_t> v) {
        u32(static_cast<std::uint32_t>(v.size()));
        b_.insert(b_.end(), v.begin(), v.end());
        return *this;
    }
    Writer& trace(const Trace& t) {
        f64(t.start_time).f64(t.sample_rate).u32(static_cast<std::uint32_t>(t.size()));
        for (double x : t.samples) f64(x);
        return *this;
    }
    Bytes take() { return std::move(b_); }

private:
    Bytes b_;
};

class Reader {
public:
    explicit Reader(const Bytes& b) : b_(b) {
        if (b_.empty()) throw Malformed("empty message");
    }
    std::uint8_t type() const { return b_[0]; }
    std::uint8_t u8() {
        need(1);
        return b_[pos_++];
    }
    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b_[pos_++]) << (8 * i);
        return v;
    }
    double f64() {
        need(8);
        std::uint64_t bits = 0;
        for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(b_[pos_++]) << (8 * i);
        double v;
        std::memcpy(&v, &bits, sizeof v);
        return v;
    }
    std::vector<std::uint8_t> bytes() {
        const std::uint32_t n = u32();
        need(n);
        std::vector<std::uint8_t> v(b_.begin() + static_cast<std::ptrdiff_t>(pos_),
                                    b_.begin() + static_cast<std::ptrdiff_t>(pos_ + n));
        pos_ += n;
        return v;
    }
    Trace trace() {
        Trace t;
        t.start_time = f64();
        t.sample_rate = f64();
        const std::uint32_t n = u32();
        need(static_cast<std::size_t>(n) * 8);
        t.samples.resize(n);
        for (auto& x : t.samples) x = f64();
        if (!std::isfinite(t.start_time) || !(t.sample_rate > 0.0) || n == 0) {
            throw Malformed("bad trace header");
        }
        for (double x : t.samples) {
            if (!std::isfinite(x)) throw Malformed("non-finite sample");
        }
        return t;
    }
    void finish() const {
        if (pos_ != b_.size()) throw Malformed("trailing bytes");
    }

private:
    void need(std::size_t n) const {
        if (b_.size() - pos_ < n) throw Malformed("truncated message");
    }
    const Bytes& b_;
    std::size_t pos_ = 1;
};

Bytes encode_trace_payload(const Trace& t) {
    Writer w(0);
    w.trace(t);
    Bytes b = w.take();
    b.erase(b.begin());
    return b;
}

const PlacementSpec& resolve(const ScenarioSpec& spec, const std::string& id, Role fallback) {
    const PlacementSpec* p = id.empty() ? first_with_role(spec, fallback) : find_placement(spec, id);
    if (p == nullptr) {
        throw InvalidArgument(id.empty() ? "scenario has no " + to_string(fallback) + " placement"
                                         : "unknown placement: " + id);
    }
    return *p;
}

class Session {
public:
    Session(net::Simulator& sim, const SessionConfig& cfg, const ScenarioSpec& scenario,
            const SessionAdversary& adversary, bool naive)
        : sim_(sim),
          cfg_(cfg),
          adversary_(adversary),
          naive_(naive),
          secure_(naive || cfg.security_mode == SecurityMode::FullH2H),
          commit_(!naive && cfg.security_mode == SecurityMode::FullH2H),
          ch_(sim, adversary.channel) {
        validate(cfg);
        const ScenarioSpec spec = session_scenario(scenario, cfg);
        const PlacementSpec& a = resolve(spec, cfg.authenticator_placement, Role::Authenticator);
        const PlacementSpec& b = resolve(spec, cfg.authenticatee_placement, Role::Valid);
        if (a.placement_id == b.placement_id) {
            throw InvalidArgument("authenticator and authenticatee must be distinct placements");
        }
        TraceSet traces = synthesize_scenario(spec);
        epoch_a_ = std::move(traces.at(a.placement_id));
        epoch_b_ = std::move(traces.at(b.placement_id));
        window_n_ = samples_for(cfg.t2 - cfg.t1, epoch_a_.sample_rate);
    }

    SessionResult run() {
        sim_.clock(PartyId::Authenticator) = {};
        sim_.clock(PartyId::Authenticatee) = {
            uniform(sim_.rng(), -kMaxInitialOffsetSeconds, kMaxInitialOffsetSeconds), 0.0};
        install_handlers();
        sim_.log("session", "start",
                 std::string("mode=") + (naive_ ? "naive" : to_string(cfg_.security_mode)) +
                     ";adversary=" + adversary_.name);
        poll_touch(0);
        sim_.run();

        if (!result_.decision && result_.abort_reason.empty()) {
            result_.outcome = SessionOutcome::AbortedTimeout;
            result_.abort_reason = "stalled";
        }
        result_.authenticator_offset = sim_.clock(PartyId::Authenticator).offset_seconds;
        result_.authenticatee_offset = sim_.clock(PartyId::Authenticatee).offset_seconds;
        result_.authenticator_phase = phase_[0];
        result_.authenticatee_phase = phase_[1];
        result_.transcript = sim_.transcript();
        return std::move(result_);
    }

private:
    static int idx(PartyId p) { return static_cast<int>(p); }
    static std::string name(PartyId p) { return net::to_string(p); }

    bool finished() const { return done_; }

    void set_phase(PartyId p, Phase ph) {
        Phase& cur = phase_[idx(p)];
        if (ph < cur) throw std::logic_error("phase regression");
        if (ph == cur) return;
        cur = ph;
        sim_.log(name(p), "phase", to_string(ph));
    }

    void arm(PartyId p, const char* waiting_for) {
        disarm(p);
        std::string what = waiting_for;
        timer_[idx(p)] = sim_.schedule(net::kStepTimeoutSeconds, [this, p, what] {
            armed_[idx(p)] = false;
            abort(p, SessionOutcome::AbortedTimeout, "timeout waiting for " + what);
        });
        armed_[idx(p)] = true;
    }

    void disarm(PartyId p) {
        if (armed_[idx(p)]) sim_.cancel(timer_[idx(p)]);
        armed_[idx(p)] = false;
    }

    void abort(PartyId p, SessionOutcome why, const std::string& reason) {
        if (done_) return;
        sim_.log(name(p), "abort", reason);
        disarm(PartyId::Authenticator);
        disarm(PartyId::Authenticatee);
        done_ = true;
        if (!result_.decision) {
            result_.outcome = why;
            result_.abort_reason = reason;
        }
        sim_.stop();
    }

    void send(PartyId from, Bytes payload) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "type=%s;len=%zu;secure=%d", msg_name(payload[0]),
                      payload.size(), ch_.secure() ? 1 : 0);
        sim_.log(name(from), "send", buf);
        ch_.send(from, std::move(payload));
    }

    void install_handlers() {
        ch_.set_handler(PartyId::Authenticator,
                        [this](const net::Delivery& d) { receive(PartyId::Authenticator, d); });
        ch_.set_handler(PartyId::Authenticatee,
                        [this](const net::Delivery& d) { receive(PartyId::Authenticatee, d); });
    }

    void receive(PartyId p, const net::Delivery& d) {
        if (done_ && p == PartyId::Authenticator) return;
        if (!d.integrity_ok) {
            abort(p, SessionOutcome::AbortedSecurity, "integrity: " + d.failure);
            return;
        }
        try {
            Reader r(d.envelope.payload);
            sim_.log(name(p), "recv", std::string("type=") + msg_name(r.type()));
            if (secure_ && phase_[idx(p)] >= Phase::Secured && !d.envelope.channel_secure) {
                throw Malformed("plaintext message on secure session");
            }
            if (p == PartyId::Authenticator) {
                authenticator_on(r);
            } else {
                authenticatee_on(r);
            }
        } catch (const InvalidArgument& e) {
            abort(p, SessionOutcome::AbortedSecurity, std::string("malformed: ") + e.what());
        }
    }

    // Authenticatee polls successive heads until one shows a touch.
    void poll_touch(std::size_t k) {
        const double head_end = static_cast<double>(k + 1) * kTouchHeadSeconds;
        if (head_end > cfg_.t1 - kSetupBudgetSeconds + 1e-9) {
            sim_.log(name(PartyId::Authenticatee), "no_touch", "");
            abort(PartyId::Authenticatee, SessionOutcome::AbortedTimeout, "no touch detected");
            return;
        }
        sim_.schedule_at(head_end, [this, k] {
            const std::size_t n = samples_for(kTouchHeadSeconds, epoch_b_.sample_rate);
            Trace head;
            head.sample_rate = epoch_b_.sample_rate;
            head.start_time = epoch_b_.time_at(k * n);
            head.samples.assign(epoch_b_.samples.begin() + static_cast<std::ptrdiff_t>(k * n),
                                epoch_b_.samples.begin() + static_cast<std::ptrdiff_t>((k + 1) * n));
            // A man in the middle needs no touch to start a session.
            if (!adversary_.echo_mitm && !touch_trigger(head, cfg_.detector.gate_std_volts)) {
                poll_touch(k + 1);
                return;
            }
            sim_.log(name(PartyId::Authenticatee), "touch", "head=" + std::to_string(k));
            send(PartyId::Authenticatee, Writer(kHello).take());
            set_phase(PartyId::Authenticatee, secure_ ? Phase::Handshake : Phase::Idle);
            arm(PartyId::Authenticatee, "SYNC");
        });
    }

    // ---- authenticator ----

    void authenticator_on(Reader& r) {
        const PartyId me = PartyId::Authenticator;
        switch (r.type()) {
            case kHello:
                r.finish();
                if (phase_[idx(me)] != Phase::Idle || hello_seen_) throw Malformed("unexpected HELLO");
                hello_seen_ = true;
                if (secure_) {
                    set_phase(me, Phase::Handshake);
                    net::establish_secure_channel(sim_, ch_, me, [this](const net::HandshakeResult& h) {
                        install_handlers();
                        if (!h.established) {
                            abort(PartyId::Authenticator, SessionOutcome::AbortedTimeout,
                                  "handshake timeout");
                            return;
                        }
                        set_phase(PartyId::Authenticator, Phase::Secured);
                        start_sync();
                    });
                } else {
                    start_sync();
                }
                return;
            case kSyncAck:
                r.finish();
                if (!sync_sent_ || phase_[idx(me)] >= Phase::Synced) throw Malformed("unexpected SYNC_ACK");
                disarm(me);
                set_phase(me, Phase::Synced);
                announce_window();
                return;
            case kCommit: {
                if (!commit_ || phase_[idx(me)] != Phase::Sampling || peer_commit_) {
                    throw Malformed("unexpected COMMIT");
                }
                const std::vector<std::uint8_t> d = r.bytes();
                r.finish();
                if (d.size() != kDigestBytes) throw Malformed("bad digest length");
                Commitment c;
                std::copy(d.begin(), d.end(), c.digest.begin());
                peer_commit_ = c;
                set_phase(me, Phase::Committed);
                maybe_disclose();
                return;
            }
            case kReveal: {
                if (!commit_ || phase_[idx(me)] != Phase::Committed || !s_sent_) {
                    throw Malformed("unexpected REVEAL");
                }
                Trace sp = r.trace();
                const std::vector<std::uint8_t> nonce = r.bytes();
                r.finish();
                if (nonce.size() * 8 != cfg_.commitment_nonce_bits) throw Malformed("bad nonce length");
                disarm(me);
                set_phase(me, Phase::Revealed);
                if (!verify_commit(*peer_commit_, encode_trace_payload(sp), nonce,
                                   cfg_.commitment_nonce_bits)) {
                    abort(me, SessionOutcome::AbortedSecurity, "commitment mismatch");
                    return;
                }
                decide(sp);
                return;
            }
            case kTraceSPrime: {
                if (commit_ || phase_[idx(me)] != Phase::Sampling || !s_captured_ ||
                    (naive_ && !s_sent_)) {
                    throw Malformed("unexpected S_PRIME");
                }
                Trace sp = r.trace();
                r.finish();
                disarm(me);
                set_phase(me, Phase::Revealed);
                decide(sp);
                return;
            }
            default:
                throw Malformed(std::string("unexpected ") + msg_name(r.type()));
        }
    }

    void start_sync() {
        const PartyId me = PartyId::Authenticator;
        sync_sent_ = true;
        send(me, Writer(kSync).f64(sim_.clock(me).local(sim_.now())).take());
        arm(me, "SYNC_ACK");
    }

    void announce_window() {
        const PartyId me = PartyId::Authenticator;
        if (sim_.clock(me).local(sim_.now()) + 2.0 * sim_.latency() >= cfg_.t1) {
            abort(me, SessionOutcome::AbortedTimeout, "sampling window already passed");
            return;
        }
        send(me, Writer(kWindow).f64(cfg_.t1).f64(cfg_.t2).take());
        set_phase(me, Phase::Sampling);
        sim_.schedule_at(sim_.clock(me).to_sim(cfg_.t2), [this] {
            if (done_) return;
            result_.s = capture_window(epoch_a_, sim_.clock(PartyId::Authenticator), cfg_.t1, window_n_);
            s_captured_ = true;
            sim_.log("authenticator", "sampled", "n=" + std::to_string(result_.s.size()));
            if (commit_) {
                if (peer_commit_) {
                    maybe_disclose();
                } else {
                    arm(PartyId::Authenticator, "COMMIT");
                }
            } else if (naive_) {
                disclose();
                arm(PartyId::Authenticator, "S_PRIME");
            } else {
                arm(PartyId::Authenticator, "S_PRIME");
            }
        });
    }

    // s goes out only once the peer's commitment is held.
    void maybe_disclose() {
        if (!s_captured_ || !peer_commit_ || s_sent_) return;
        disclose();
        arm(PartyId::Authenticator, "REVEAL");
    }

    void disclose() {
        s_sent_ = true;
        send(PartyId::Authenticator, Writer(kTraceS).trace(result_.s).take());
    }

    void decide(const Trace& sp) {
        const PartyId me = PartyId::Authenticator;
        Decision d;
        try {
            d = detect(cfg_.detector, result_.s, sp);
        } catch (const InvalidArgument& e) {
            abort(me, SessionOutcome::AbortedSecurity, std::string("malformed trace: ") + e.what());
            return;
        }
        result_.decision = d;
        result_.outcome = d.accepted() ? SessionOutcome::Accepted : SessionOutcome::Rejected;
        set_phase(me, Phase::Decided);
        char buf[96];
        if (d.score) {
            std::snprintf(buf, sizeof buf, "outcome=%s;score=%.12g", to_string(result_.outcome).c_str(),
                          *d.score);
        } else {
            std::snprintf(buf, sizeof buf, "outcome=%s;gated=1", to_string(result_.outcome).c_str());
        }
        sim_.log(name(me), "decision", buf);
        send(me, Writer(kNotify).u8(d.accepted() ? 1 : 0).take());
    }

    // ---- authenticatee ----

    void authenticatee_on(Reader& r) {
        const PartyId me = PartyId::Authenticatee;
        switch (r.type()) {
            case kSync: {
                const double t_ref = r.f64();
                r.finish();
                if (!std::isfinite(t_ref) || phase_[idx(me)] >= Phase::Synced) throw Malformed("unexpected SYNC");
                if (secure_) set_phase(me, Phase::Secured);
                sim_.sync_clocks(PartyId::Authenticator, me, cfg_.sync_residual_seconds);
                set_phase(me, Phase::Synced);
                send(me, Writer(kSyncAck).take());
                arm(me, "WINDOW");
                return;
            }
            case kWindow: {
                const double t1 = r.f64();
                const double t2 = r.f64();
                r.finish();
                if (phase_[idx(me)] != Phase::Synced) throw Malformed("unexpected WINDOW");
                if (!(std::isfinite(t1) && std::isfinite(t2) && t2 > t1) ||
                    std::abs((t2 - t1) - cfg_.detector.signal_length_seconds) > 1e-9) {
                    throw Malformed("bad sampling window");
                }
                const double at = sim_.clock(me).to_sim(t2);
                if (at < sim_.now()) throw Malformed("sampling window in the past");
                disarm(me);
                set_phase(me, Phase::Sampling);
                sim_.schedule_at(at, [this, t1] { authenticatee_sampled(t1); });
                return;
            }
            case kTraceS: {
                Trace s = r.trace();
                r.finish();
                const bool expected = commit_ ? phase_[idx(me)] == Phase::Committed
                                              : naive_ && phase_[idx(me)] == Phase::Sampling && sp_captured_;
                if (!expected) throw Malformed("unexpected S");
                disarm(me);
                // The echo attacker sends back what it was just shown.
                const Trace& reply = adversary_.echo_mitm ? s : result_.s_prime;
                if (commit_) {
                    send(me, Writer(kReveal).trace(reply).bytes(nonce_).take());
                } else {
                    send(me, Writer(kTraceSPrime).trace(reply).take());
                }
                set_phase(me, Phase::Revealed);
                arm(me, "NOTIFY");
                return;
            }
            case kNotify: {
                const std::uint8_t accepted = r.u8();
                r.finish();
                if (phase_[idx(me)] != Phase::Revealed || accepted > 1) throw Malformed("unexpected NOTIFY");
                disarm(me);
                set_phase(me, Phase::Decided);
                sim_.log(name(me), "notified", accepted ? "accepted" : "rejected");
                done_ = true;
                sim_.stop();
                return;
            }
            default:
                throw Malformed(std::string("unexpected ") + msg_name(r.type()));
        }
    }

    void authenticatee_sampled(double t1) {
        if (done_) return;
        const PartyId me = PartyId::Authenticatee;
        result_.s_prime = capture_window(epoch_b_, sim_.clock(me), t1, window_n_);
        sp_captured_ = true;
        sim_.log(name(me), "sampled", "n=" + std::to_string(result_.s_prime.size()));
        if (commit_) {
            nonce_ = make_nonce(sim_.rng(), cfg_.commitment_nonce_bits);
            const Commitment c =
                commit(encode_trace_payload(result_.s_prime), nonce_, cfg_.commitment_nonce_bits);
            send(me, Writer(kCommit).bytes(c.digest).take());
            set_phase(me, Phase::Committed);
            arm(me, "S");
        } else if (naive_) {
            arm(me, "S");
        } else {
            send(me, Writer(kTraceSPrime).trace(result_.s_prime).take());
            set_phase(me, Phase::Revealed);
            arm(me, "NOTIFY");
        }
    }

    net::Simulator& sim_;
    SessionConfig cfg_;
    SessionAdversary adversary_;
    bool naive_;
    bool secure_;
    bool commit_;
    net::Channel ch_;

    Trace epoch_a_, epoch_b_;
    std::size_t window_n_ = 0;

    Phase phase_[2] = {Phase::Idle, Phase::Idle};
    net::Simulator::EventId timer_[2] = {0, 0};
    bool armed_[2] = {false, false};
    bool done_ = false;

    bool hello_seen_ = false;
    bool sync_sent_ = false;
    bool s_captured_ = false;
    bool s_sent_ = false;
    bool sp_captured_ = false;
    std::optional<Commitment> peer_commit_;
    std::vector<std::uint8_t> nonce_;

    SessionResult result_;
};

}  // namespace

std::string to_string(SecurityMode m) {
    return m == SecurityMode::FullH2H ? "full-h2h" : "lightweight";
}

SecurityMode security_mode_from_string(const std::string& s) {
    if (s == "full-h2h" || s == "FULL_H2H" || s == "full") return SecurityMode::FullH2H;
    if (s == "lightweight" || s == "LIGHTWEIGHT") return SecurityMode::Lightweight;
    throw InvalidArgument("unknown security mode: " + s);
}

std::string to_string(SessionOutcome o) {
    switch (o) {
        case SessionOutcome::Accepted: return "ACCEPTED";
        case SessionOutcome::Rejected: return "REJECTED";
        case SessionOutcome::AbortedSecurity: return "ABORTED_SECURITY";
        case SessionOutcome::AbortedTimeout: return "ABORTED_TIMEOUT";
    }
    return "ABORTED_TIMEOUT";
}

std::string to_string(Phase p) {
    switch (p) {
        case Phase::Idle: return "IDLE";
        case Phase::Handshake: return "HANDSHAKE";
        case Phase::Secured: return "SECURED";
        case Phase::Synced: return "SYNCED";
        case Phase::Sampling: return "SAMPLING";
        case Phase::Committed: return "COMMITTED";
        case Phase::Revealed: return "REVEALED";
        case Phase::Decided: return "DECIDED";
    }
    return "IDLE";
}

SessionConfig SessionConfig::for_length(const DetectorConfig& det, double length_seconds) {
    SessionConfig c;
    c.detector = det;
    c.detector.signal_length_seconds = length_seconds;
    c.t1 = kDefaultWindowStart;
    c.t2 = kDefaultWindowStart + length_seconds;
    return c;
}

void validate(const SessionConfig& cfg) {
    validate(cfg.detector);
    if (!(std::isfinite(cfg.t1) && std::isfinite(cfg.t2) && cfg.t2 > cfg.t1)) {
        throw InvalidArgument("sampling window needs t2 > t1");
    }
    if (cfg.t1 < kTouchHeadSeconds + kSetupBudgetSeconds) {
        throw InvalidArgument("sampling window starts before a touch can be detected");
    }
    if (std::abs((cfg.t2 - cfg.t1) - cfg.detector.signal_length_seconds) > 1e-9) {
        throw InvalidArgument("t2 - t1 must equal the detector signal length");
    }
    if (cfg.commitment_nonce_bits == 0 || cfg.commitment_nonce_bits % 8 != 0) {
        throw InvalidArgument("nonce bits must be a positive multiple of 8");
    }
    if (!(cfg.sync_residual_seconds >= 0.0 && cfg.sync_residual_seconds <= kMaxSyncResidual)) {
        throw InvalidArgument("sync residual must be in [0, 0.05] s");
    }
    if (!(cfg.latency_seconds >= 0.0 && cfg.latency_seconds < 0.01)) {
        throw InvalidArgument("latency must be in [0, 10) ms");
    }
}

SessionAdversary adversary_from_name(const std::string& name) {
    SessionAdversary a;
    a.name = name;
    if (name == "echo-mitm") {
        a.echo_mitm = true;
        return a;
    }
    a.channel.mode = net::adversary_mode_from_string(name);
    return a;
}

bool touch_trigger(const Trace& trace_head, double gate_std_volts) {
    validate(trace_head);
    if (trace_head.size() < samples_for(kTouchHeadSeconds, trace_head.sample_rate)) {
        throw InvalidArgument("touch head shorter than 0.2 s");
    }
    return gate(trace_head, gate_std_volts);
}

ScenarioSpec session_scenario(const ScenarioSpec& scenario, const SessionConfig& cfg) {
    ScenarioSpec spec = scenario;
    spec.start_time_seconds = 0.0;
    spec.length_seconds = std::max(scenario.length_seconds, cfg.t2 + cfg.sync_residual_seconds + 0.05);
    return spec;
}

Trace capture_window(const Trace& epoch, const net::SimClock& clock, double t1, std::size_t n) {
    validate(epoch);
    const double fs = epoch.sample_rate;
    if (clock.drift == 0.0) {
        // Local time = epoch time + offset, so the local view is the epoch
        // trace delayed by the offset.
        const Trace local = apply_clock_offset(epoch, clock.offset_seconds);
        const double pos = (t1 - local.start_time) * fs;
        const double k0 = std::round(pos);
        if (std::abs(pos - k0) < 1e-6) {
            if (k0 < 0.0 || static_cast<std::size_t>(k0) + n > local.size()) {
                throw InvalidArgument("sampling window outside the synthesized trace");
            }
            Trace out;
            out.sample_rate = fs;
            out.start_time = t1;
            const auto first = local.samples.begin() + static_cast<std::ptrdiff_t>(k0);
            out.samples.assign(first, first + static_cast<std::ptrdiff_t>(n));
            return out;
        }
    }
    Trace out;
    out.sample_rate = fs;
    out.start_time = t1;
    out.samples.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double u = clock.to_sim(t1 + static_cast<double>(k) / fs);
        const double pos = (u - epoch.start_time) * fs;
        if (pos < 0.0 || pos > static_cast<double>(epoch.size() - 1)) {
            throw InvalidArgument("sampling window outside the synthesized trace");
        }
        const auto i0 = static_cast<std::size_t>(std::floor(pos));
        const double frac = pos - static_cast<double>(i0);
        const double a = epoch.samples[i0];
        const double b = i0 + 1 < epoch.size() ? epoch.samples[i0 + 1] : a;
        out.samples[k] = a + frac * (b - a);
    }
    return out;
}

SessionResult run_session(net::Simulator& sim, const SessionConfig& cfg,
                          const ScenarioSpec& scenario, const SessionAdversary& adversary) {
    Session s(sim, cfg, scenario, adversary, false);
    return s.run();
}

SessionResult naive_session(net::Simulator& sim, const SessionConfig& cfg,
                            const ScenarioSpec& scenario, const SessionAdversary& adversary) {
    Session s(sim, cfg, scenario, adversary, true);
    return s.run();
}

std::string to_string(ProtocolVariant v) {
    switch (v) {
        case ProtocolVariant::Full: return "full-h2h";
        case ProtocolVariant::Lightweight: return "lightweight";
        case ProtocolVariant::Naive: return "naive";
    }
    return "full-h2h";
}

ProtocolVariant protocol_variant_from_string(const std::string& s) {
    if (s == "full-h2h" || s == "FULL_H2H" || s == "full") return ProtocolVariant::Full;
    if (s == "lightweight" || s == "LIGHTWEIGHT") return ProtocolVariant::Lightweight;
    if (s == "naive") return ProtocolVariant::Naive;
    throw InvalidArgument("unknown protocol mode: " + s);
}

SessionResult run_seeded(ProtocolVariant variant, const SessionConfig& cfg,
                         const ScenarioSpec& scenario, const SessionAdversary& adversary,
                         std::uint64_t seed) {
    ScenarioSpec spec = scenario;
    spec.seed = derive_seed(seed, stream::session);
    net::Simulator sim(derive_seed(seed, stream::session + 1), cfg.latency_seconds);
    SessionConfig c = cfg;
    switch (variant) {
        case ProtocolVariant::Full:
            c.security_mode = SecurityMode::FullH2H;
            return run_session(sim, c, spec, adversary);
        case ProtocolVariant::Lightweight:
            c.security_mode = SecurityMode::Lightweight;
            return run_session(sim, c, spec, adversary);
        case ProtocolVariant::Naive:
            return naive_session(sim, c, spec, adversary);
    }
    throw InvalidArgument("unknown protocol mode");
}

std::string session_csv_header() { return "seed,mode,adversary,outcome,score"; }

std::string to_csv_row(std::uint64_t seed, ProtocolVariant variant,
                       const SessionAdversary& adversary, const SessionResult& r) {
    std::string row = std::to_string(seed) + ',' + to_string(variant) + ',' + adversary.name + ',' +
                      to_string(r.outcome) + ',';
    if (const auto s = r.score()) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.12g", *s);
        row += buf;
    }
    return row;
}

}  // namespace touchauth
