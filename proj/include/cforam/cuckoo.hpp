#pragma once

#include <cstdint>
#include <functional>
#include <optional>

#include "cforam/crypto.hpp"
#include "cforam/pir.hpp"

namespace cforam {

// ============================================================================
// Two-table cuckoo level with bounded eviction.
//
// Placement is fully deterministic — a pure function of the incoming item
// stream — so two replicas that feed it identical streams end up byte
// identical.  Each slot stores the element ciphertext, the local tag share
// and the item's candidate positions in plaintext, letting the server run
// eviction chains without being able to compute the hashes itself.  Items
// also carry their candidate pair for the base level so an overflow can be
// demoted without client help.
// ============================================================================

/// One stored record; an all-zero ciphertext slot is empty.
struct SlotItem {
    Bytes ct;
    Tag tag_share{};
    /// Candidates in the level this item is being placed into.
    uint32_t pos0 = 0, pos1 = 0;
    /// Candidates in the base level, kept as cargo for overflow demotion.
    uint32_t base_pos0 = 0, base_pos1 = 0;

    /// Rewrites the active pair with the base-level pair (used on demotion).
    void demote_to_base() {
        pos0 = base_pos0;
        pos1 = base_pos1;
    }
};

class CuckooLevel {
  public:
    CuckooLevel() = default;
    CuckooLevel(uint32_t table_len, size_t ct_width);

    uint32_t table_len() const { return table_len_; }
    size_t occupied() const { return occupied_[0] + occupied_[1]; }
    bool empty() const { return occupied() == 0; }

    /// Deterministic bounded placement.  Returns the homeless item after
    /// `max_evictions` displacements, or nullopt once placed.
    std::optional<SlotItem> place(SlotItem item, uint32_t max_evictions);

    bool slot_occupied(int table, uint32_t pos) const;
    SlotItem read_slot(int table, uint32_t pos) const;

    /// Visits occupied slots: table 0 ascending, then table 1 ascending.
    void for_each_occupied(
        const std::function<void(int table, uint32_t pos, const SlotItem&)>& fn)
        const;

    void clear();

    /// PIR views over this level's element and tag areas.
    BlockTable& elems(int table) { return elem_[table]; }
    const BlockTable& elems(int table) const { return elem_[table]; }
    BlockTable& tags(int table) { return tag_[table]; }
    const BlockTable& tags(int table) const { return tag_[table]; }

  private:
    void write_slot(int table, uint32_t pos, const SlotItem& item);
    SlotItem take_slot(int table, uint32_t pos);
    void check_pos(uint32_t pos) const;

    uint32_t table_len_ = 0;
    size_t ct_width_ = 0;
    BlockTable elem_[2];
    BlockTable tag_[2];
    std::vector<std::array<uint32_t, 4>> cand_[2];
    std::vector<uint8_t> used_[2];
    size_t occupied_[2] = {0, 0};
};

}  // namespace cforam
