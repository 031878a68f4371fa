#pragma once

#include <cstdint>

#include "cforam/aes.hpp"
#include "cforam/bytes.hpp"

namespace cforam {

// ============================================================================
// Seedable CSPRNG: AES-128 in counter mode.
//
// Every byte of randomness a run consumes (keys, nonces, shares, shuffle
// permutations, workload draws) flows through one of these, so a fixed seed
// reproduces a run byte for byte on any platform.
// ============================================================================

class Rng {
  public:
    /// Stream is fully determined by (seed, stream_id).
    explicit Rng(uint64_t seed, uint64_t stream_id = 0);

    void fill(uint8_t* out, size_t n);
    void fill(Bytes& out) { fill(out.data(), out.size()); }

    uint64_t next_u64();

    /// Uniform in [0, n) by rejection sampling; n must be nonzero.
    uint64_t below(uint64_t n);

    Block16 block16();
    Key32 key32();

    /// Fresh from the OS entropy pool, for unseeded contexts.
    static uint64_t os_seed();

  private:
    void refill();

    Aes128 cipher_;
    uint64_t counter_ = 0;
    uint8_t buf_[16 * 16];
    size_t avail_ = 0;
};

}  // namespace cforam
