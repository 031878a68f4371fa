#pragma once

#include <cstdint>
#include <optional>
#include <utility>

#include "cforam/bytes.hpp"
#include "cforam/rng.hpp"

namespace cforam {

// ============================================================================
// Keyed primitives.
//
// One 256-bit PRF (two AES-128 lanes in a fixed two-block MAC) underpins tag
// derivation, per-level/per-epoch hash keys and table position hashing, with
// a domain-separation byte keeping the streams disjoint.  Element payloads
// travel as authenticated ciphertexts sealed under a separate 256-bit key.
// ============================================================================

/// Long-lived client secrets (tag key, level master key, element key).
struct SecretKey {
    Key32 bytes{};
};

/// Per-(level, epoch) table hashing key, derived from the level master key.
struct HashKey {
    Key32 bytes{};
};

/// 128-bit element tag; the all-zero tag is reserved as the empty marker.
using Tag = Block16;

/// Domain-separation byte fed to every PRF call.
enum class Domain : uint8_t {
    Tag = 0x01,
    LevelKey = 0x02,
    Hash0 = 0x03,
    Hash1 = 0x04,
};

/// Keyed PRF: 256-bit output over a domain byte and up to three 64-bit words.
Key32 prf(const Key32& key, Domain sep, uint64_t m0, uint64_t m1 = 0,
          uint64_t m2 = 0);

/// Per-address tag; never returns the reserved all-zero tag.
Tag derive_tag(const SecretKey& tk, uint64_t addr);

/// Hash key for one (level, epoch) pair.
HashKey derive_level_key(const SecretKey& lk, uint32_t level, uint64_t epoch);

/// Two candidate slots in [1, table_len); slot 0 is reserved everywhere.
std::pair<uint32_t, uint32_t> hash_positions(const HashKey& hk, const Tag& tag,
                                             uint32_t table_len);

/// Splits a tag into two XOR shares using fresh randomness.
std::pair<Tag, Tag> share_tag(const Tag& tag, Rng& rng);

// ----------------------------------------------------------------------------
// Element encoding and sealing
// ----------------------------------------------------------------------------

/// Plaintext record: 64-bit address plus a fixed-width value.
struct Element {
    uint64_t addr = 0;
    Bytes value;
};

/// Addresses with the top bit set form the dummy namespace; real addresses
/// live in [0, N) and never collide with it.
inline constexpr uint64_t kDummyAddrBit = uint64_t(1) << 63;

inline bool is_dummy_addr(uint64_t addr) { return (addr & kDummyAddrBit) != 0; }

/// Fresh dummy address, unique per (access counter, sequence) pair.
inline uint64_t make_dummy_addr(uint64_t ctr, uint64_t seq) {
    return kDummyAddrBit | (ctr & 0x7FFFFFFF) << 32 | (seq & 0xFFFFFFFF);
}

/// Ciphertext layout: 12-byte nonce | body | 16-byte auth tag, where the body
/// encrypts (8-byte LE address | value).  All-zero ciphertexts mark empty
/// slots and are never produced by seal_element.
inline constexpr size_t kSealOverhead = 12 + 16;

inline size_t ciphertext_width(size_t value_width) {
    return kSealOverhead + 8 + value_width;
}

/// Seals (addr, value) under ek with a caller-supplied nonce source.
Bytes seal_element(const SecretKey& ek, const Element& elem, Rng& nonce_rng);

/// Opens a ciphertext; nullopt when authentication fails.
std::optional<Element> open_element(const SecretKey& ek, const uint8_t* ct,
                                    size_t ct_len);
std::optional<Element> open_element(const SecretKey& ek, const Bytes& ct);

}  // namespace cforam
