#include "cforam/meter.hpp"

namespace cforam {

const char* phase_name(Phase p) {
    switch (p) {
        case Phase::Setup: return "setup";
        case Phase::Access: return "access";
        case Phase::Rebuild: return "rebuild";
    }
    return "?";
}

FlowCounter BandwidthMeter::phase_total(Phase p) const {
    FlowCounter t;
    for (int s = 0; s < 2; ++s) {
        t += sent_[int(p)][s];
        t += recv_[int(p)][s];
    }
    return t;
}

FlowCounter BandwidthMeter::grand_total() const {
    FlowCounter t;
    for (int p = 0; p < kPhaseCount; ++p) {
        t += phase_total(Phase(p));
    }
    return t;
}

FlowCounter BandwidthMeter::online_total() const {
    FlowCounter t;
    t += phase_total(Phase::Access);
    t += phase_total(Phase::Rebuild);
    return t;
}

void BandwidthMeter::reset() {
    for (int p = 0; p < kPhaseCount; ++p) {
        for (int s = 0; s < 2; ++s) {
            sent_[p][s] = FlowCounter{};
            recv_[p][s] = FlowCounter{};
        }
    }
}

void TranscriptRecorder::on_frame(int server, bool outgoing, Phase phase,
                                  const Frame& f) {
    if (!enabled_) return;
    TranscriptEntry e;
    e.access_index = current_;
    e.phase = phase;
    e.server = uint8_t(server);
    e.outgoing = outgoing;
    e.type = f.type;
    e.payload_len = uint32_t(f.payload.size());
    if (capture_) e.payload = f.payload;
    entries_.push_back(std::move(e));
}

std::vector<ShapeEntry> TranscriptRecorder::access_shape(uint32_t index,
                                                         Phase phase) const {
    std::vector<ShapeEntry> out;
    for (const auto& e : entries_) {
        if (e.access_index != index || e.phase != phase) continue;
        out.push_back(ShapeEntry{e.server, e.outgoing, e.type, e.payload_len});
    }
    return out;
}

Bytes TranscriptRecorder::all_payload_bytes() const {
    Bytes out;
    for (const auto& e : entries_) {
        out.insert(out.end(), e.payload.begin(), e.payload.end());
    }
    return out;
}

}  // namespace cforam
