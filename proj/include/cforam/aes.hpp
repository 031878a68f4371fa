#pragma once

#include <cstddef>
#include <cstdint>

#include "cforam/bytes.hpp"

namespace cforam {

// ============================================================================
// AES-128, encrypt direction only.
//
// The expanded key schedule is computed portably; block encryption dispatches
// at runtime to AES-NI when the CPU offers it and to a table-free software
// implementation otherwise.  Encrypt-only is all the higher layers need: the
// seed expander and the keyed PRF are built from forward permutation calls.
// ============================================================================

class Aes128 {
  public:
    Aes128() = default;
    explicit Aes128(const Block16& key) { set_key(key); }

    void set_key(const Block16& key);

    /// out = AES(key, in); in/out may alias.
    void encrypt_block(const uint8_t in[16], uint8_t out[16]) const;

    /// Encrypts n contiguous 16-byte blocks; in/out may alias elementwise.
    void encrypt_blocks(const uint8_t* in, uint8_t* out, size_t n) const;

    /// True when block calls run on AES-NI.
    static bool hardware_backed();

  private:
    alignas(16) uint8_t round_keys_[11 * 16] = {};
};

namespace detail {
/// AES-NI body; defined in a translation unit compiled with -maes.
void aesni_encrypt_blocks(const uint8_t* round_keys, const uint8_t* in,
                          uint8_t* out, size_t n);
bool aesni_available();
}  // namespace detail

}  // namespace cforam
