#include "cforam/rng.hpp"

#include <cstring>
#include <random>
#include <stdexcept>

namespace cforam {

Rng::Rng(uint64_t seed, uint64_t stream_id) {
    Block16 key;
    store_le64(key.data(), seed);
    store_le64(key.data() + 8, stream_id ^ 0x5DEECE66DULL);
    cipher_.set_key(key);
}

void Rng::refill() {
    uint8_t ctr_blocks[sizeof(buf_)];
    for (size_t i = 0; i < sizeof(buf_) / 16; ++i) {
        std::memset(ctr_blocks + 16 * i, 0, 16);
        store_le64(ctr_blocks + 16 * i, counter_++);
    }
    cipher_.encrypt_blocks(ctr_blocks, buf_, sizeof(buf_) / 16);
    avail_ = sizeof(buf_);
}

void Rng::fill(uint8_t* out, size_t n) {
    while (n > 0) {
        if (avail_ == 0) refill();
        size_t take = n < avail_ ? n : avail_;
        std::memcpy(out, buf_ + (sizeof(buf_) - avail_), take);
        avail_ -= take;
        out += take;
        n -= take;
    }
}

uint64_t Rng::next_u64() {
    uint8_t tmp[8];
    fill(tmp, 8);
    return load_le64(tmp);
}

uint64_t Rng::below(uint64_t n) {
    if (n == 0) throw std::invalid_argument("Rng::below(0)");
    if ((n & (n - 1)) == 0) return next_u64() & (n - 1);
    uint64_t limit = ~uint64_t(0) - (~uint64_t(0) % n + 1) % n;
    uint64_t v;
    do {
        v = next_u64();
    } while (v > limit);
    return v % n;
}

Block16 Rng::block16() {
    Block16 b;
    fill(b.data(), b.size());
    return b;
}

Key32 Rng::key32() {
    Key32 k;
    fill(k.data(), k.size());
    return k;
}

uint64_t Rng::os_seed() {
    std::random_device rd;
    return uint64_t(rd()) << 32 | rd();
}

}  // namespace cforam
