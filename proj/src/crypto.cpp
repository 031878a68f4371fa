#include "cforam/crypto.hpp"

#include <openssl/evp.h>

#include <cstring>
#include <stdexcept>

#include "cforam/aes.hpp"
#include "cforam/errors.hpp"

namespace cforam {
namespace {

// Two-block CBC-MAC under one AES-128 lane.  Message layout is fixed-width,
// so the MAC is a PRF on its domain.
Block16 mac_lane(const Aes128& aes, const uint8_t block0[16],
                 const uint8_t block1[16]) {
    Block16 t;
    aes.encrypt_block(block0, t.data());
    for (int i = 0; i < 16; ++i) t[i] = uint8_t(t[i] ^ block1[i]);
    aes.encrypt_block(t.data(), t.data());
    return t;
}

struct GcmContext {
    EVP_CIPHER_CTX* ctx;
    GcmContext() : ctx(EVP_CIPHER_CTX_new()) {
        if (!ctx) throw std::bad_alloc();
    }
    ~GcmContext() { EVP_CIPHER_CTX_free(ctx); }
    GcmContext(const GcmContext&) = delete;
    GcmContext& operator=(const GcmContext&) = delete;
};

}  // namespace

Key32 prf(const Key32& key, Domain sep, uint64_t m0, uint64_t m1, uint64_t m2) {
    uint8_t block0[16] = {};
    uint8_t block1[16] = {};
    block0[0] = uint8_t(sep);
    store_le64(block0 + 8, m0);
    store_le64(block1, m1);
    store_le64(block1 + 8, m2);

    Block16 k_lo, k_hi;
    std::memcpy(k_lo.data(), key.data(), 16);
    std::memcpy(k_hi.data(), key.data() + 16, 16);
    Aes128 lo(k_lo), hi(k_hi);

    Key32 out;
    Block16 t0 = mac_lane(lo, block0, block1);
    Block16 t1 = mac_lane(hi, block0, block1);
    std::memcpy(out.data(), t0.data(), 16);
    std::memcpy(out.data() + 16, t1.data(), 16);
    return out;
}

Tag derive_tag(const SecretKey& tk, uint64_t addr) {
    for (uint64_t retry = 0;; ++retry) {
        Key32 h = prf(tk.bytes, Domain::Tag, addr, retry);
        Tag tag;
        std::memcpy(tag.data(), h.data(), 16);
        if (!is_zero_block(tag)) return tag;
    }
}

HashKey derive_level_key(const SecretKey& lk, uint32_t level, uint64_t epoch) {
    HashKey hk;
    hk.bytes = prf(lk.bytes, Domain::LevelKey, level, epoch);
    return hk;
}

std::pair<uint32_t, uint32_t> hash_positions(const HashKey& hk, const Tag& tag,
                                             uint32_t table_len) {
    if (table_len < 2)
        throw IllegalPosition("hash_positions needs table_len >= 2, got " +
                              std::to_string(table_len));
    uint64_t lo = load_le64(tag.data());
    uint64_t hi = load_le64(tag.data() + 8);
    Key32 h0 = prf(hk.bytes, Domain::Hash0, lo, hi);
    Key32 h1 = prf(hk.bytes, Domain::Hash1, lo, hi);
    uint32_t span = table_len - 1;
    uint32_t p0 = uint32_t(1 + load_le64(h0.data()) % span);
    uint32_t p1 = uint32_t(1 + load_le64(h1.data()) % span);
    return {p0, p1};
}

std::pair<Tag, Tag> share_tag(const Tag& tag, Rng& rng) {
    Tag share0 = rng.block16();
    return {share0, xor_blocks(tag, share0)};
}

Bytes seal_element(const SecretKey& ek, const Element& elem, Rng& nonce_rng) {
    Bytes body(8 + elem.value.size());
    store_le64(body.data(), elem.addr);
    std::memcpy(body.data() + 8, elem.value.data(), elem.value.size());

    Bytes ct(ciphertext_width(elem.value.size()));
    nonce_rng.fill(ct.data(), 12);

    GcmContext gcm;
    int len = 0;
    if (EVP_EncryptInit_ex(gcm.ctx, EVP_aes_256_gcm(), nullptr,
                           ek.bytes.data(), ct.data()) != 1 ||
        EVP_EncryptUpdate(gcm.ctx, ct.data() + 12, &len, body.data(),
                          int(body.size())) != 1)
        throw Internal("authenticated encryption failed");
    int fin = 0;
    if (EVP_EncryptFinal_ex(gcm.ctx, ct.data() + 12 + len, &fin) != 1 ||
        EVP_CIPHER_CTX_ctrl(gcm.ctx, EVP_CTRL_GCM_GET_TAG, 16,
                            ct.data() + 12 + body.size()) != 1)
        throw Internal("authenticated encryption failed");
    return ct;
}

std::optional<Element> open_element(const SecretKey& ek, const uint8_t* ct,
                                    size_t ct_len) {
    if (ct_len < kSealOverhead + 8) return std::nullopt;
    size_t body_len = ct_len - kSealOverhead;

    GcmContext gcm;
    Bytes body(body_len);
    int len = 0;
    uint8_t auth[16];
    std::memcpy(auth, ct + 12 + body_len, 16);
    if (EVP_DecryptInit_ex(gcm.ctx, EVP_aes_256_gcm(), nullptr,
                           ek.bytes.data(), ct) != 1 ||
        EVP_DecryptUpdate(gcm.ctx, body.data(), &len, ct + 12,
                          int(body_len)) != 1 ||
        EVP_CIPHER_CTX_ctrl(gcm.ctx, EVP_CTRL_GCM_SET_TAG, 16, auth) != 1)
        return std::nullopt;
    int fin = 0;
    if (EVP_DecryptFinal_ex(gcm.ctx, body.data() + len, &fin) != 1)
        return std::nullopt;

    Element elem;
    elem.addr = load_le64(body.data());
    elem.value.assign(body.begin() + 8, body.end());
    return elem;
}

std::optional<Element> open_element(const SecretKey& ek, const Bytes& ct) {
    return open_element(ek, ct.data(), ct.size());
}

void throw_wire_error(uint16_t code, const std::string& context) {
    switch (ErrCode(code)) {
        case ErrCode::MalformedFrame: throw MalformedFrame(context);
        case ErrCode::UnknownType: throw UnknownType(context);
        case ErrCode::LengthOverflow: throw LengthOverflow(context);
        case ErrCode::StashOverflow: throw StashOverflow(context);
        case ErrCode::DomainMismatch: throw DomainMismatch(context);
        case ErrCode::IndexOutOfDomain: throw IndexOutOfDomain(context);
        case ErrCode::IllegalPosition: throw IllegalPosition(context);
        case ErrCode::StreamMisalignment: throw StreamMisalignment(context);
        case ErrCode::CountMismatch: throw CountMismatch(context);
        case ErrCode::ServerDisagreement: throw ServerDisagreement(context);
        case ErrCode::AuthFailure: throw AuthFailure(context);
        case ErrCode::UnsupportedN: throw UnsupportedN(context);
        case ErrCode::Busy: throw Busy(context);
        case ErrCode::BadRequest: throw BadRequest(context);
        default: throw Internal(context + " (code " + std::to_string(code) + ")");
    }
}

}  // namespace cforam
