#pragma once

#include <cstdint>
#include <vector>

#include "cforam/crypto.hpp"

namespace cforam {

// ============================================================================
// Geometry and rebuild schedule.
//
// The hierarchy runs from a small top level (backed by a scan buffer and a
// stash) down to a bottom level sized for the whole address space.  Every
// `period` accesses the buffer folds into the top level; every 2^(top+1)
// accesses the top region folds into the smallest empty middle level; every
// 2^bottom accesses everything is reshuffled into the bottom level and the
// keys rotate.  All table lengths are powers of two so middle levels divide
// the bottom length exactly.
// ============================================================================

struct Params {
    uint64_t n = 0;            ///< capacity; power of two in [2^8, 2^24]
    uint32_t block_bytes = 0;  ///< value width B
    uint32_t bottom_level = 0; ///< L = log2(n)
    uint32_t top_level = 0;    ///< smallest level; carries buffer and stash
    uint32_t period = 0;       ///< buffer capacity p (power of two)
    uint64_t top_capacity = 0; ///< item bound for the top level
    uint32_t max_evictions = 0;

    /// Per-table slot count at one level (slot 0 reserved).
    uint32_t table_len(uint32_t level) const;
    /// Buffer and stash array length (slot 0 reserved).
    uint32_t buffer_len() const { return period + 1; }
    /// Element ciphertext width for this block size.
    size_t ct_width() const { return ciphertext_width(block_bytes); }
    uint32_t level_count() const { return bottom_level - top_level + 1; }

    bool operator==(const Params&) const = default;

    /// Derives and validates the full geometry; UnsupportedN on a capacity
    /// outside the supported shape.
    static Params from_n(uint64_t n, uint32_t block_bytes);
};

/// Rebuild counter for a level at access counter `ctr` (counting a rebuild
/// triggered exactly at `ctr` as already done).  Resets to zero when the
/// bottom rebuild resets `ctr`.
uint64_t epoch_of(uint64_t ctr, uint32_t level, const Params& params);

struct RebuildAction {
    enum class Kind { None, Top, Mid, Bottom };
    Kind kind = Kind::None;
    uint32_t level = 0;  ///< target level for Kind::Mid
};

/// Which rebuild (if any) fires once the access counter reaches `ctr`.
/// `full` holds one flag per level, indexed by level - top_level.
RebuildAction rebuild_trigger(uint64_t ctr, const std::vector<uint8_t>& full,
                              const Params& params);

}  // namespace cforam
