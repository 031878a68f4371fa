#pragma once

#include <cstdint>
#include <vector>

#include "cforam/cuckoo.hpp"
#include "cforam/params.hpp"
#include "cforam/pir.hpp"

namespace cforam {

// ============================================================================
// One server's storage: the append buffer, the overflow stash, and one cuckoo
// level per hierarchy index.  Element and tag areas live in parallel arrays
// with mirrored layout; slot 0 of every array is reserved and never holds a
// real item, so position 0 can serve as the do-nothing target.
//
// The store is deterministic: replicas fed identical request streams hold
// byte-identical element areas.
// ============================================================================

/// One snapshot entry pulled for a rebuild.
struct StagedItem {
    Bytes ct;
    Tag tag_share{};
};

class ServerStore {
  public:
    explicit ServerStore(const Params& params);

    const Params& params() const { return params_; }

    // --- buffer (append area) -------------------------------------------
    void buffer_append(const Bytes& ct, const Tag& tag_share);
    uint32_t buffer_len() const { return buffer_used_; }  ///< slots incl. slot 0
    const BlockTable& buffer_elems() const { return buffer_elems_; }
    BlockTable& buffer_tags() { return buffer_tags_; }
    const BlockTable& buffer_tags() const { return buffer_tags_; }

    // --- stash (placement overflow) ---------------------------------------
    uint32_t stash_len() const { return stash_used_; }  ///< slots incl. slot 0
    const BlockTable& stash_elems() const { return stash_elems_; }
    BlockTable& stash_tags() { return stash_tags_; }
    const BlockTable& stash_tags() const { return stash_tags_; }

    // --- levels -------------------------------------------------------------
    /// Full placement chain: target level, then base-level fallback, then
    /// stash.  Throws StashOverflow when even the stash is full.
    void insert(SlotItem item, uint32_t level);

    CuckooLevel& level(uint32_t idx);
    const CuckooLevel& level(uint32_t idx) const;
    bool level_in_range(uint32_t idx) const {
        return idx >= params_.top_level && idx <= params_.bottom_level;
    }

    /// Occupancy summary for the client: top region holds anything at all?
    bool top_occupied() const;

    // --- rebuild support ----------------------------------------------------
    /// Snapshots the rebuild sources in canonical order (buffer ascending,
    /// stash ascending, then per level: table 0 ascending, table 1 ascending,
    /// levels ascending) and clears them.  Sources are the top region plus,
    /// when `include_mid`, every level strictly between the top and
    /// `target_level` — plus `target_level` itself when it is the bottom.
    std::vector<StagedItem> pull_and_clear(uint32_t target_level,
                                           bool include_mid);

    /// Clears everything (bottom rebuild barrier).
    void clear_all();

  private:
    void stash_put(const SlotItem& item);

    Params params_;
    BlockTable buffer_elems_, buffer_tags_;
    BlockTable stash_elems_, stash_tags_;
    uint32_t buffer_used_ = 1;
    uint32_t stash_used_ = 1;
    std::vector<CuckooLevel> levels_;  ///< index: level - top_level
};

}  // namespace cforam
