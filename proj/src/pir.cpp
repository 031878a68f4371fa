#include "cforam/pir.hpp"

#include <cstring>

#include "cforam/errors.hpp"

namespace cforam {
namespace {

/// dst ^= src with every byte gated by an all-ones/all-zeros mask.
void xor_masked(uint8_t* dst, const uint8_t* src, size_t n, bool bit) {
    uint64_t mask64 = uint64_t(0) - uint64_t(bit);
    size_t k = 0;
    for (; k + 8 <= n; k += 8) {
        uint64_t d, s;
        std::memcpy(&d, dst + k, 8);
        std::memcpy(&s, src + k, 8);
        d ^= s & mask64;
        std::memcpy(dst + k, &d, 8);
    }
    uint8_t mask8 = uint8_t(mask64);
    for (; k < n; ++k) dst[k] = uint8_t(dst[k] ^ (src[k] & mask8));
}

void check_domain(const DpfKey& key, const BlockTable& table) {
    if (key.domain_size != table.length)
        throw DomainMismatch("key domain " + std::to_string(key.domain_size) +
                             " vs table length " + std::to_string(table.length));
}

}  // namespace

std::pair<DpfKey, DpfKey> pir_read_query(uint32_t index, uint32_t table_len,
                                         Rng& rng) {
    return dpf_gen(index, table_len, rng);
}

Bytes pir_read_answer(const DpfKey& key, const BlockTable& table) {
    check_domain(key, table);
    BitVec share = dpf_eval_full(key);
    Bytes acc(table.width, 0);
    for (size_t j = 0; j < table.length; ++j)
        xor_masked(acc.data(), table.block(j), table.width, share.get(j));
    return acc;
}

Bytes pir_read_combine(const Bytes& r0, const Bytes& r1) {
    if (r0.size() != r1.size())
        throw DomainMismatch("reply shares of different widths");
    Bytes out = r0;
    xor_into(out.data(), r1.data(), r1.size());
    return out;
}

std::pair<DpfKey, DpfKey> pir_write_query(uint32_t index, uint32_t table_len,
                                          Rng& rng) {
    return dpf_gen(index, table_len, rng);
}

void pir_write_apply(const DpfKey& key, const uint8_t* delta, size_t delta_len,
                     BlockTable& table) {
    check_domain(key, table);
    if (delta_len != table.width)
        throw DomainMismatch("write delta width " + std::to_string(delta_len) +
                             " vs table width " + std::to_string(table.width));
    BitVec share = dpf_eval_full(key);
    for (size_t j = 0; j < table.length; ++j)
        xor_masked(table.block(j), delta, table.width, share.get(j));
}

Bytes pir_inner_product(const BitVec& share, const BlockTable& table) {
    if (share.size() != table.length)
        throw DomainMismatch("share length " + std::to_string(share.size()) +
                             " vs table length " + std::to_string(table.length));
    Bytes acc(table.width, 0);
    for (size_t j = 0; j < table.length; ++j)
        xor_masked(acc.data(), table.block(j), table.width, share.get(j));
    return acc;
}

void pir_apply_windowed(const BitVec& share, const uint8_t* delta,
                        size_t delta_len, BlockTable& table, size_t limit) {
    if (delta_len != table.width)
        throw DomainMismatch("delta width " + std::to_string(delta_len) +
                             " vs table width " + std::to_string(table.width));
    if (share.size() < limit || table.length < limit)
        throw DomainMismatch("window larger than share or table");
    for (size_t j = 0; j < limit; ++j)
        xor_masked(table.block(j), delta, table.width, share.get(j));
}

BlockTable pir_build(const BlockTable& share0, const BlockTable& share1) {
    if (share0.width != share1.width || share0.length != share1.length)
        throw DomainMismatch("table shares of different shapes");
    BlockTable out(share0.width, share0.length);
    for (size_t i = 0; i < out.data.size(); ++i)
        out.data[i] = uint8_t(share0.data[i] ^ share1.data[i]);
    return out;
}

}  // namespace cforam
