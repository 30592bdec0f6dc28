// SPDX-License-Identifier: Apache-2.0
//
// Discrete-event simulation of a two-party link under an adversary with
// full control of the channel. The secure channel is an ideal
// authenticated-encryption pipe: the adversary learns ciphertext lengths
// only, and any tampering is detected by the receiver.
#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <limits>
#include <optional>
#include <queue>
#include <string>
#include <unordered_set>
#include <vector>

#include "touchauth/error.hpp"
#include "touchauth/rng.hpp"

namespace touchauth::net {

using Bytes = std::vector<std::uint8_t>;

inline constexpr std::size_t kMaxPayloadBytes = 64 * 1024;
inline constexpr double kStepTimeoutSeconds = 2.0;
inline constexpr double kDefaultLatencySeconds = 0.005;
inline constexpr double kMaxDrift = 1e-3;

class ChannelClosed : public Error {
public:
    using Error::Error;
};

enum class PartyId { Authenticator, Authenticatee };
std::string to_string(PartyId p);
PartyId peer_of(PartyId p) noexcept;

struct Envelope {
    PartyId sender = PartyId::Authenticatee;
    Bytes payload;
    double sent_at = 0.0;  // sender's local clock
    bool channel_secure = false;
};

enum class AdversaryMode { None, PassiveEavesdrop, Drop, Modify, Forge, Replay };
std::string to_string(AdversaryMode m);
AdversaryMode adversary_mode_from_string(const std::string& s);

struct AdversaryPolicy {
    AdversaryMode mode = AdversaryMode::None;
    /// Which envelopes the policy acts on; empty means all of them.
    std::function<bool(const Envelope&)> target;
    /// Replacement payloads for FORGE (and MODIFY on plaintext). The default
    /// keeps the leading type byte and randomizes the rest.
    std::function<Bytes(const Envelope&, Rng&)> forge_payload;

    bool applies_to(const Envelope& e) const { return !target || target(e); }
};

/// Local time = offset + (1 + drift) * simulation time.
struct SimClock {
    double offset_seconds = 0.0;
    double drift = 0.0;

    double local(double sim_time) const noexcept {
        return offset_seconds + (1.0 + drift) * sim_time;
    }
    double to_sim(double local_time) const noexcept {
        return (local_time - offset_seconds) / (1.0 + drift);
    }
};

void validate(const SimClock& c);

struct TranscriptEvent {
    double time = 0.0;  // simulation time
    std::string actor;
    std::string event;
    std::string detail;

    bool operator==(const TranscriptEvent&) const = default;
};

/// Line-oriented log, one `time,actor,event,detail` line per event.
class Transcript {
public:
    void add(double time, std::string actor, std::string event, std::string detail);
    const std::vector<TranscriptEvent>& events() const noexcept { return events_; }
    std::string to_text() const;
    void write(std::ostream& os) const;

private:
    std::vector<TranscriptEvent> events_;
};

std::string to_hex(const Bytes& b);

class Simulator {
public:
    using EventId = std::uint64_t;

    explicit Simulator(std::uint64_t seed, double latency_seconds = kDefaultLatencySeconds);

    double now() const noexcept { return now_; }
    double latency() const noexcept { return latency_; }

    EventId schedule(double delay, std::function<void()> fn);
    EventId schedule_at(double time, std::function<void()> fn);
    void cancel(EventId id);

    /// Processes events in (time, insertion) order until the queue drains,
    /// stop() is called, or the next event lies beyond `until`.
    void run(double until = std::numeric_limits<double>::infinity());
    void stop() noexcept { stopped_ = true; }

    SimClock& clock(PartyId p) { return clocks_[static_cast<int>(p)]; }
    const SimClock& clock(PartyId p) const { return clocks_[static_cast<int>(p)]; }

    /// Sets the follower's offset to the reference offset plus or minus
    /// `residual_seconds`, sign drawn from the simulator RNG.
    void sync_clocks(PartyId reference, PartyId follower, double residual_seconds);

    Rng& rng() noexcept { return rng_; }
    Transcript& transcript() noexcept { return transcript_; }
    const Transcript& transcript() const noexcept { return transcript_; }
    void log(const std::string& actor, const std::string& event, const std::string& detail = {});

private:
    struct Event {
        double time;
        EventId id;
        std::function<void()> fn;
    };
    struct Later {
        bool operator()(const Event& a, const Event& b) const noexcept {
            return a.time != b.time ? a.time > b.time : a.id > b.id;
        }
    };

    double now_ = 0.0;
    double latency_;
    EventId next_id_ = 0;
    bool stopped_ = false;
    std::priority_queue<Event, std::vector<Event>, Later> queue_;
    std::unordered_set<EventId> cancelled_;
    SimClock clocks_[2];
    Rng rng_;
    Transcript transcript_;
};

/// What a receiver gets from the channel. integrity_ok is false when the
/// secure channel detected tampering, forgery or replay.
struct Delivery {
    Envelope envelope;
    bool integrity_ok = true;
    std::string failure;
};

/// Bidirectional link between the two parties with per-direction FIFO
/// delivery after a fixed latency.
class Channel {
public:
    using Handler = std::function<void(const Delivery&)>;

    Channel(Simulator& sim, AdversaryPolicy policy);

    void set_handler(PartyId receiver, Handler h);
    /// Throws ChannelClosed when closed, InvalidArgument when oversized.
    void send(PartyId sender, Bytes payload);

    void mark_secure() noexcept { secure_ = true; }
    bool secure() const noexcept { return secure_; }
    void close() noexcept { open_ = false; }
    bool is_open() const noexcept { return open_; }

private:
    void deliver_later(PartyId receiver, Delivery d, double delay);
    std::string observed(const Envelope& e) const;

    Simulator& sim_;
    AdversaryPolicy policy_;
    Handler handlers_[2];
    bool secure_ = false;
    bool open_ = true;
};

struct HandshakeResult {
    bool established = false;
    bool timed_out = false;
    /// False when the key the initiator accepted is not the responder's, i.e.
    /// someone else answered. Certificates are not validated.
    bool peer_authentic = true;
};

/// Two-message key exchange from `initiator`, then marks the channel
/// secure. Installs its own handlers; callers reinstall theirs in `done`.
void establish_secure_channel(Simulator& sim, Channel& ch, PartyId initiator,
                              std::function<void(const HandshakeResult&)> done);

/// Blocking form: runs the simulator until the handshake finishes.
HandshakeResult establish_secure_channel(Simulator& sim, Channel& ch, PartyId initiator);

}  // namespace touchauth::net
