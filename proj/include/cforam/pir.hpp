#pragma once

#include <cstdint>
#include <utility>

#include "cforam/bytes.hpp"
#include "cforam/dpf.hpp"

namespace cforam {

// ============================================================================
// Two-server PIR over fixed-width block tables.
//
// Read direction: each server XORs together the blocks its share vector
// selects; the two partial sums XOR to the addressed block because the share
// vectors XOR to a unit vector.  Write direction: each server XORs
// (delta AND share bit) into every block, so the reconstructed table changes
// only at the hidden index.  The inner products are branch-free: a whole-word
// mask derived from the share bit gates every byte.
// ============================================================================

/// Contiguous array of equal-width byte blocks; index 0 is reserved by the
/// layers above, the PIR code itself treats all indices alike.
struct BlockTable {
    size_t width = 0;
    size_t length = 0;
    Bytes data;

    BlockTable() = default;
    BlockTable(size_t width_, size_t length_)
        : width(width_), length(length_), data(width_ * length_, 0) {}

    uint8_t* block(size_t i) { return data.data() + i * width; }
    const uint8_t* block(size_t i) const { return data.data() + i * width; }

    bool slot_zero(size_t i) const { return all_zero(block(i), width); }
    void clear() { std::fill(data.begin(), data.end(), uint8_t(0)); }
};

/// Key pair addressing `index` in a table of `table_len` blocks.
std::pair<DpfKey, DpfKey> pir_read_query(uint32_t index, uint32_t table_len,
                                         Rng& rng);

/// One server's reply share: XOR of the blocks selected by this key.
Bytes pir_read_answer(const DpfKey& key, const BlockTable& table);

/// XOR of the two reply shares = the addressed block.
Bytes pir_read_combine(const Bytes& r0, const Bytes& r1);

/// Key pair for XOR-ing `delta` into a hidden index of a shared table.
std::pair<DpfKey, DpfKey> pir_write_query(uint32_t index, uint32_t table_len,
                                          Rng& rng);

/// Applies this server's half of a write; delta width must match the table.
void pir_write_apply(const DpfKey& key, const uint8_t* delta, size_t delta_len,
                     BlockTable& table);

/// Reconstructs a secret-shared table (used by tests and tooling).
BlockTable pir_build(const BlockTable& share0, const BlockTable& share1);

/// XOR of the blocks selected by an explicit share vector (the vector may
/// come from a key that was folded or rotated after expansion).
Bytes pir_inner_product(const BitVec& share, const BlockTable& table);

/// XORs delta into the first `limit` blocks, gated per block by the share
/// vector (which must be at least `limit` bits long).
void pir_apply_windowed(const BitVec& share, const uint8_t* delta,
                        size_t delta_len, BlockTable& table, size_t limit);

}  // namespace cforam
