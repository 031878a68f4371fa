#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "cforam/bitvec.hpp"
#include "cforam/bytes.hpp"
#include "cforam/rng.hpp"

namespace cforam {

// ============================================================================
// Distributed point function, single-bit payload.
//
// Two keys share a correction-word list and differ only in the party bit and
// the root seed.  Separately, each key expands to a pseudorandom bit vector
// over [0, domain_size); XORed together the two vectors form the unit vector
// at the hidden point.  Keys grow with the tree depth: 17 bytes per level
// plus a 22-byte fixed part.
// ============================================================================

struct DpfKey {
    struct CorrectionWord {
        Block16 seed{};
        bool t_left = false;
        bool t_right = false;
    };

    uint8_t party = 0;
    uint32_t domain_size = 0;
    Block16 root_seed{};
    std::vector<CorrectionWord> correction_words;
    uint8_t final_correction = 1;

    uint32_t levels() const { return uint32_t(correction_words.size()); }
};

/// Serialized prefix before the correction words: party byte, domain u32,
/// root seed.  Enough to recover the total key length from a byte stream.
inline constexpr size_t kDpfHeaderLen = 1 + 4 + 16;

/// Tree depth for a domain: smallest d with 2^d >= n.
uint32_t dpf_depth(uint32_t domain_size);

/// Exact size of a serialized key for this domain.
size_t dpf_serialized_size(uint32_t domain_size);

/// Two keys hiding `point` inside [0, domain_size).
std::pair<DpfKey, DpfKey> dpf_gen(uint32_t point, uint32_t domain_size,
                                  Rng& rng);

/// This key's share bit at one index.
bool dpf_eval(const DpfKey& key, uint32_t index);

/// This key's full share vector, exactly domain_size bits.
BitVec dpf_eval_full(const DpfKey& key);

/// party | domain (u32 LE) | root seed | per-level (seed, control byte) | final.
Bytes dpf_serialize(const DpfKey& key);
DpfKey dpf_deserialize(const uint8_t* data, size_t len);
DpfKey dpf_deserialize(const Bytes& data);

}  // namespace cforam
