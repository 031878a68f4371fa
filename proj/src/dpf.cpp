#include "cforam/dpf.hpp"

#include <cstring>

#include "cforam/aes.hpp"
#include "cforam/errors.hpp"

namespace cforam {
namespace {

// Seed expansion is a fixed-key Matyas-Meyer-Oseas pair: child = AES_K(s) ^ s
// under one constant key per direction.  The low bit of each child carries
// the control bit and is cleared from the seed.
const Aes128& prg_left() {
    static const Aes128 aes(Block16{0x8c, 0x6f, 0x3d, 0x5b, 0x1a, 0x02, 0x44,
                                    0x91, 0xe7, 0x55, 0x29, 0xc3, 0x70, 0x1f,
                                    0xb8, 0x0d});
    return aes;
}

const Aes128& prg_right() {
    static const Aes128 aes(Block16{0x21, 0xd9, 0x48, 0x6e, 0xaa, 0x93, 0x5c,
                                    0x07, 0x3f, 0xe0, 0x74, 0x12, 0xcb, 0x86,
                                    0x59, 0xfa});
    return aes;
}

struct Expanded {
    Block16 seed_left, seed_right;
    bool t_left, t_right;
};

Expanded expand(const Block16& seed) {
    Expanded e;
    prg_left().encrypt_block(seed.data(), e.seed_left.data());
    prg_right().encrypt_block(seed.data(), e.seed_right.data());
    for (int i = 0; i < 16; ++i) {
        e.seed_left[i] = uint8_t(e.seed_left[i] ^ seed[i]);
        e.seed_right[i] = uint8_t(e.seed_right[i] ^ seed[i]);
    }
    e.t_left = e.seed_left[0] & 1;
    e.t_right = e.seed_right[0] & 1;
    e.seed_left[0] &= 0xfe;
    e.seed_right[0] &= 0xfe;
    return e;
}

void xor_block(uint8_t* dst, const uint8_t* src) {
    for (int i = 0; i < 16; ++i) dst[i] = uint8_t(dst[i] ^ src[i]);
}

/// Nodes required at tree depth d when only the first n leaves matter.
uint32_t needed_at_depth(uint32_t n, uint32_t depth, uint32_t total_depth) {
    uint32_t shift = total_depth - depth;
    if (shift >= 32) return 1;
    return (n + ((uint32_t(1) << shift) - 1)) >> shift;
}

}  // namespace

uint32_t dpf_depth(uint32_t domain_size) {
    uint32_t d = 0;
    while ((uint64_t(1) << d) < domain_size) ++d;
    return d;
}

size_t dpf_serialized_size(uint32_t domain_size) {
    return 22 + size_t(17) * dpf_depth(domain_size);
}

std::pair<DpfKey, DpfKey> dpf_gen(uint32_t point, uint32_t domain_size,
                                  Rng& rng) {
    if (point >= domain_size)
        throw IndexOutOfDomain("point " + std::to_string(point) +
                               " outside domain of size " +
                               std::to_string(domain_size));
    uint32_t depth = dpf_depth(domain_size);

    DpfKey k0, k1;
    k0.party = 0;
    k1.party = 1;
    k0.domain_size = k1.domain_size = domain_size;
    k0.root_seed = rng.block16();
    k1.root_seed = rng.block16();
    k0.root_seed[0] &= 0xfe;
    k1.root_seed[0] &= 0xfe;
    k0.final_correction = k1.final_correction = 1;

    Block16 s0 = k0.root_seed, s1 = k1.root_seed;
    bool t0 = false, t1 = true;

    for (uint32_t j = 0; j < depth; ++j) {
        bool bit = (point >> (depth - 1 - j)) & 1;
        Expanded e0 = expand(s0), e1 = expand(s1);

        const Block16& lose0 = bit ? e0.seed_left : e0.seed_right;
        const Block16& lose1 = bit ? e1.seed_left : e1.seed_right;

        DpfKey::CorrectionWord cw;
        cw.seed = xor_blocks(lose0, lose1);
        cw.t_left = e0.t_left ^ e1.t_left ^ bit ^ 1;
        cw.t_right = e0.t_right ^ e1.t_right ^ bit;
        k0.correction_words.push_back(cw);
        k1.correction_words.push_back(cw);

        Block16 keep0 = bit ? e0.seed_right : e0.seed_left;
        Block16 keep1 = bit ? e1.seed_right : e1.seed_left;
        bool tkeep0 = bit ? e0.t_right : e0.t_left;
        bool tkeep1 = bit ? e1.t_right : e1.t_left;
        bool tcw_keep = bit ? cw.t_right : cw.t_left;

        if (t0) {
            xor_block(keep0.data(), cw.seed.data());
            tkeep0 = tkeep0 ^ tcw_keep;
        }
        if (t1) {
            xor_block(keep1.data(), cw.seed.data());
            tkeep1 = tkeep1 ^ tcw_keep;
        }
        s0 = keep0;
        s1 = keep1;
        t0 = tkeep0;
        t1 = tkeep1;
    }
    return {std::move(k0), std::move(k1)};
}

bool dpf_eval(const DpfKey& key, uint32_t index) {
    if (index >= key.domain_size)
        throw IndexOutOfDomain("index " + std::to_string(index) +
                               " outside domain of size " +
                               std::to_string(key.domain_size));
    uint32_t depth = key.levels();
    Block16 s = key.root_seed;
    bool t = key.party != 0;
    for (uint32_t j = 0; j < depth; ++j) {
        bool bit = (index >> (depth - 1 - j)) & 1;
        Expanded e = expand(s);
        Block16 next = bit ? e.seed_right : e.seed_left;
        bool t_next = bit ? e.t_right : e.t_left;
        if (t) {
            const auto& cw = key.correction_words[j];
            xor_block(next.data(), cw.seed.data());
            t_next = t_next ^ (bit ? cw.t_right : cw.t_left);
        }
        s = next;
        t = t_next;
    }
    return t && key.final_correction;
}

BitVec dpf_eval_full(const DpfKey& key) {
    uint32_t n = key.domain_size;
    uint32_t depth = key.levels();

    std::vector<uint8_t> seeds(16, 0);
    std::memcpy(seeds.data(), key.root_seed.data(), 16);
    std::vector<uint8_t> tbits(1, key.party != 0);
    uint32_t count = 1;

    std::vector<uint8_t> scratch_l, scratch_r, next_seeds, next_t;
    for (uint32_t j = 0; j < depth; ++j) {
        uint32_t child_count = needed_at_depth(n, j + 1, depth);
        scratch_l.resize(size_t(16) * count);
        scratch_r.resize(size_t(16) * count);
        prg_left().encrypt_blocks(seeds.data(), scratch_l.data(), count);
        prg_right().encrypt_blocks(seeds.data(), scratch_r.data(), count);

        next_seeds.resize(size_t(16) * child_count);
        next_t.resize(child_count);
        const auto& cw = key.correction_words[j];
        for (uint32_t i = 0; i < count; ++i) {
            const uint8_t* parent = seeds.data() + size_t(16) * i;
            bool t_parent = tbits[i];
            for (int side = 0; side < 2; ++side) {
                uint32_t child = 2 * i + side;
                if (child >= child_count) break;
                uint8_t* dst = next_seeds.data() + size_t(16) * child;
                const uint8_t* enc =
                    (side == 0 ? scratch_l : scratch_r).data() + size_t(16) * i;
                for (int b = 0; b < 16; ++b)
                    dst[b] = uint8_t(enc[b] ^ parent[b]);
                bool t_child = dst[0] & 1;
                dst[0] &= 0xfe;
                if (t_parent) {
                    xor_block(dst, cw.seed.data());
                    t_child = t_child ^ (side == 0 ? cw.t_left : cw.t_right);
                }
                next_t[child] = t_child;
            }
        }
        seeds.swap(next_seeds);
        tbits.swap(next_t);
        count = child_count;
    }

    BitVec out(n);
    for (uint32_t i = 0; i < n; ++i)
        out.set(i, tbits[i] && key.final_correction);
    return out;
}

Bytes dpf_serialize(const DpfKey& key) {
    Bytes out;
    out.reserve(dpf_serialized_size(key.domain_size));
    out.push_back(key.party);
    append_le32(out, key.domain_size);
    out.insert(out.end(), key.root_seed.begin(), key.root_seed.end());
    for (const auto& cw : key.correction_words) {
        out.insert(out.end(), cw.seed.begin(), cw.seed.end());
        out.push_back(uint8_t(cw.t_left | cw.t_right << 1));
    }
    out.push_back(key.final_correction);
    return out;
}

DpfKey dpf_deserialize(const uint8_t* data, size_t len) {
    if (len < 22) throw MalformedFrame("point-function key too short");
    DpfKey key;
    key.party = data[0];
    if (key.party > 1) throw MalformedFrame("bad party byte in key");
    key.domain_size = load_le32(data + 1);
    if (key.domain_size == 0) throw MalformedFrame("zero domain in key");
    std::memcpy(key.root_seed.data(), data + 5, 16);

    uint32_t depth = dpf_depth(key.domain_size);
    if (len != dpf_serialized_size(key.domain_size))
        throw MalformedFrame("key length " + std::to_string(len) +
                             " does not match domain " +
                             std::to_string(key.domain_size));
    size_t off = 21;
    for (uint32_t j = 0; j < depth; ++j) {
        DpfKey::CorrectionWord cw;
        std::memcpy(cw.seed.data(), data + off, 16);
        uint8_t bits = data[off + 16];
        if (bits > 3) throw MalformedFrame("bad control bits in key");
        cw.t_left = bits & 1;
        cw.t_right = (bits >> 1) & 1;
        key.correction_words.push_back(cw);
        off += 17;
    }
    key.final_correction = data[off];
    if (key.final_correction > 1) throw MalformedFrame("bad final correction");
    return key;
}

DpfKey dpf_deserialize(const Bytes& data) {
    return dpf_deserialize(data.data(), data.size());
}

}  // namespace cforam
