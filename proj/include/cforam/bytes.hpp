#pragma once

#include <array>
#include <cstdint>
#include <cstring>
#include <string>
#include <vector>

namespace cforam {

using Bytes = std::vector<uint8_t>;

/// 128-bit value used for tags, PRG seeds and cipher blocks.
using Block16 = std::array<uint8_t, 16>;

/// 256-bit key material (secret keys and per-level hash keys).
using Key32 = std::array<uint8_t, 32>;

inline void store_le32(uint8_t* out, uint32_t v) {
    out[0] = uint8_t(v);
    out[1] = uint8_t(v >> 8);
    out[2] = uint8_t(v >> 16);
    out[3] = uint8_t(v >> 24);
}

inline void store_le64(uint8_t* out, uint64_t v) {
    for (int i = 0; i < 8; ++i) out[i] = uint8_t(v >> (8 * i));
}

inline uint32_t load_le32(const uint8_t* in) {
    return uint32_t(in[0]) | uint32_t(in[1]) << 8 | uint32_t(in[2]) << 16 |
           uint32_t(in[3]) << 24;
}

inline uint64_t load_le64(const uint8_t* in) {
    uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = v << 8 | in[i];
    return v;
}

inline void append_le32(Bytes& out, uint32_t v) {
    uint8_t tmp[4];
    store_le32(tmp, v);
    out.insert(out.end(), tmp, tmp + 4);
}

inline void append_le64(Bytes& out, uint64_t v) {
    uint8_t tmp[8];
    store_le64(tmp, v);
    out.insert(out.end(), tmp, tmp + 8);
}

inline void xor_into(uint8_t* dst, const uint8_t* src, size_t n) {
    for (size_t i = 0; i < n; ++i) dst[i] ^= src[i];
}

inline Block16 xor_blocks(const Block16& a, const Block16& b) {
    Block16 r;
    for (size_t i = 0; i < 16; ++i) r[i] = uint8_t(a[i] ^ b[i]);
    return r;
}

inline bool all_zero(const uint8_t* p, size_t n) {
    uint8_t acc = 0;
    for (size_t i = 0; i < n; ++i) acc |= p[i];
    return acc == 0;
}

inline bool is_zero_block(const Block16& b) { return all_zero(b.data(), b.size()); }

inline std::string to_hex(const uint8_t* p, size_t n) {
    static const char* digits = "0123456789abcdef";
    std::string s;
    s.reserve(2 * n);
    for (size_t i = 0; i < n; ++i) {
        s.push_back(digits[p[i] >> 4]);
        s.push_back(digits[p[i] & 0xf]);
    }
    return s;
}

inline std::string to_hex(const Bytes& b) { return to_hex(b.data(), b.size()); }

}  // namespace cforam
