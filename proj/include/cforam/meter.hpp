#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cforam/wire.hpp"

namespace cforam {

// ============================================================================
// Traffic accounting.
//
// The client attributes every frame it sends or receives to a phase and a
// server.  Two byte counts are kept side by side: payload bytes (message
// bodies only) and wire bytes (bodies plus the 5-byte frame header).  Cost
// statements in the benchmark are made on payload bytes; wire bytes are
// reported alongside for transparency.
// ============================================================================

enum class Phase : uint8_t { Setup = 0, Access = 1, Rebuild = 2 };
inline constexpr int kPhaseCount = 3;

const char* phase_name(Phase p);

struct FlowCounter {
    uint64_t frames = 0;
    uint64_t payload_bytes = 0;
    uint64_t wire_bytes = 0;

    void add(const Frame& f) {
        frames += 1;
        payload_bytes += f.payload.size();
        wire_bytes += f.payload.size() + kFrameHeaderLen;
    }
    FlowCounter& operator+=(const FlowCounter& o) {
        frames += o.frames;
        payload_bytes += o.payload_bytes;
        wire_bytes += o.wire_bytes;
        return *this;
    }
};

class BandwidthMeter {
  public:
    void set_phase(Phase p) { phase_ = p; }
    Phase phase() const { return phase_; }

    void on_send(int server, const Frame& f) { sent_[int(phase_)][server].add(f); }
    void on_recv(int server, const Frame& f) { recv_[int(phase_)][server].add(f); }

    const FlowCounter& sent(Phase p, int server) const {
        return sent_[int(p)][server];
    }
    const FlowCounter& received(Phase p, int server) const {
        return recv_[int(p)][server];
    }

    /// Both directions, both servers, one phase.
    FlowCounter phase_total(Phase p) const;
    /// Both directions, both servers, all phases.
    FlowCounter grand_total() const;
    /// Access + rebuild traffic: the steady-state cost basis.
    FlowCounter online_total() const;

    void reset();

  private:
    FlowCounter sent_[kPhaseCount][2];
    FlowCounter recv_[kPhaseCount][2];
    Phase phase_ = Phase::Setup;
};

// ----------------------------------------------------------------------------
// Transcript recording: per-frame (type, length) with direction and server,
// segmented by access index.  Payload capture is optional and off by default;
// it exists so tests can assert that key material never crosses the wire.
// ----------------------------------------------------------------------------

inline constexpr uint32_t kSetupAccessIndex = 0xFFFFFFFF;

struct TranscriptEntry {
    uint32_t access_index = kSetupAccessIndex;
    Phase phase = Phase::Setup;
    uint8_t server = 0;
    bool outgoing = false;
    MsgType type = MsgType::Error;
    uint32_t payload_len = 0;
    Bytes payload;  ///< only filled when capture_payloads is on
};

/// One frame's place in a shape comparison.
struct ShapeEntry {
    uint8_t server;
    bool outgoing;
    MsgType type;
    uint32_t payload_len;

    bool operator==(const ShapeEntry&) const = default;
};

class TranscriptRecorder {
  public:
    void enable(bool capture_payloads) {
        enabled_ = true;
        capture_ = capture_payloads;
    }
    bool enabled() const { return enabled_; }

    void begin_access(uint32_t index) { current_ = index; }
    void on_frame(int server, bool outgoing, Phase phase, const Frame& f);

    const std::vector<TranscriptEntry>& entries() const { return entries_; }

    /// Interleaved frame shape of one access, in client op order, restricted
    /// to one phase (rebuild traffic is judged separately from access
    /// traffic because its item counts follow the schedule, not the query).
    std::vector<ShapeEntry> access_shape(uint32_t index, Phase phase) const;

    /// Every recorded payload byte, concatenated (capture mode only).
    Bytes all_payload_bytes() const;

    void clear() { entries_.clear(); }

  private:
    bool enabled_ = false;
    bool capture_ = false;
    uint32_t current_ = kSetupAccessIndex;
    std::vector<TranscriptEntry> entries_;
};

}  // namespace cforam
