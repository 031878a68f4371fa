#pragma once

#include <cstdint>
#include <vector>

#include "cforam/channel.hpp"
#include "cforam/crypto.hpp"
#include "cforam/meter.hpp"
#include "cforam/params.hpp"

namespace cforam {

// ============================================================================
// Client side.
//
// The client keeps O(1) working memory: three 256-bit keys, the access
// counter, one occupancy bit per level, the current buffer/stash lengths and
// a PRG state.  Every element it touches is processed one at a time and
// released; the streaming rebuilds never materialize a level in client
// memory.
// ============================================================================

/// Which access path to run.  Base reads every level with two positioned
/// point-function queries; Plus folds one pair of bottom-length read vectors
/// across all lower levels and writes all level tags with a single key.
enum class Scheme : uint8_t { Base = 0, Plus = 1 };

const char* scheme_name(Scheme s);

/// One server endpoint as the client sees it: the channel plus optional
/// accounting (a null meter or recorder simply skips that bookkeeping).
struct PeerLink {
    Channel* ch = nullptr;
    int server_id = 0;
    BandwidthMeter* meter = nullptr;
    TranscriptRecorder* recorder = nullptr;

    void send(const Frame& f);
    /// Next frame; ERROR frames become typed exceptions, EOF throws.
    Frame recv_any();
    /// recv_any + type check (StreamMisalignment on anything else).
    Frame expect(MsgType t);
};

struct ClientConfig {
    Scheme scheme = Scheme::Base;
    uint64_t seed = 1;
    uint32_t latency_us = 0;
};

struct ClientStats {
    uint64_t accesses = 0;
    uint64_t rebuilds_top = 0;
    uint64_t rebuilds_mid = 0;
    uint64_t rebuilds_bottom = 0;
    /// Decrypted elements held simultaneously (constant-memory evidence).
    size_t resident_elems = 0;
    size_t peak_resident_elems = 0;
};

class Client {
  public:
    Client(const Params& params, PeerLink s0, PeerLink s1, ClientConfig cfg);

    /// Handshakes with both servers and streams the initial elements into
    /// the bottom level.  Addresses must be distinct and < n.
    void setup(const std::vector<Element>& initial);

    /// One oblivious access.  Returns the value as of *before* the access;
    /// absent addresses read as all-zero and materialize as zero blocks.
    Bytes access(bool is_write, uint64_t addr, const Bytes& value);

    Bytes read(uint64_t addr) { return access(false, addr, {}); }
    Bytes write(uint64_t addr, const Bytes& value) {
        return access(true, addr, value);
    }

    /// Round-trips a poll to both servers so every earlier one-way message
    /// has been applied.  Test aid; not part of the access protocol.
    void sync_barrier();

    const Params& params() const { return params_; }
    const ClientStats& stats() const { return stats_; }
    uint64_t ctr() const { return ctr_; }
    const std::vector<uint8_t>& full_flags() const { return full_; }
    uint32_t stash_slots() const { return len_stash_; }

  private:
    struct Locator {
        uint32_t pos = 0;
        uint32_t len = 0;
        uint8_t table = 0;
    };

    void handshake();
    void report_refresh();
    Tag fresh_mask();
    void insert_element(const Element& e, uint32_t level);
    Element open_or_throw(const Bytes& ct, const SecretKey& ek);

    void scan_region(uint8_t region, uint32_t used_len, uint64_t addr,
                     bool& found, Element& rec, uint32_t& found_pos);
    void tag_write(TagTarget target, uint8_t level, uint32_t table_len,
                   uint32_t pos, const Tag& delta);
    void level_read_base(uint32_t level, uint64_t addr, const Tag& tau,
                         const Tag& mask, bool& found, Element& rec);
    void search_levels_base(uint64_t addr, const Tag& tau, const Tag& mask,
                            bool& found, Element& rec);
    void search_levels_plus(uint64_t addr, const Tag& tau, const Tag& mask,
                            bool& found, Element& rec);

    void maybe_rebuild();
    void rebuild_into(uint32_t target, bool include_mid);
    void rebuild_bottom();
    /// Lock-step pull of one rebuild stream pair; calls fn per merged item.
    template <typename Fn>
    uint32_t pull_pairwise(Fn&& fn);

    Params params_;
    PeerLink s_[2];
    ClientConfig cfg_;

    SecretKey lk_, tk_, ek_;
    Rng rng_;
    uint64_t ctr_ = 0;
    uint64_t dummy_seq_ = 0;
    std::vector<uint8_t> full_;  ///< indexed by level - top_level
    uint32_t len_buffer_ = 1;
    uint32_t len_stash_ = 1;
    ClientStats stats_;
};

}  // namespace cforam
