#pragma once

#include <cstdint>
#include <vector>

#include "cforam/errors.hpp"

namespace cforam {

/// Packed bit vector with the two share-algebra operations the access path
/// needs: folding a long share down to a shorter table and cyclic rotation.
class BitVec {
  public:
    BitVec() = default;
    explicit BitVec(size_t n) : n_(n), words_((n + 63) / 64, 0) {}

    size_t size() const { return n_; }

    bool get(size_t i) const {
        return (words_[i >> 6] >> (i & 63)) & 1;
    }

    void set(size_t i, bool v) {
        uint64_t mask = uint64_t(1) << (i & 63);
        if (v)
            words_[i >> 6] |= mask;
        else
            words_[i >> 6] &= ~mask;
    }

    void xor_bit(size_t i, bool v) {
        words_[i >> 6] ^= uint64_t(v) << (i & 63);
    }

    void xor_with(const BitVec& other) {
        if (other.n_ != n_)
            throw DomainMismatch("BitVec xor over different lengths");
        for (size_t i = 0; i < words_.size(); ++i) words_[i] ^= other.words_[i];
    }

    /// XOR-fold onto the first `len` positions: out[k] = xor_j in[j*len + k].
    BitVec fold_to(size_t len) const {
        if (len == 0 || n_ % len != 0)
            throw DomainMismatch("fold target " + std::to_string(len) +
                                 " does not divide length " + std::to_string(n_));
        BitVec out(len);
        for (size_t j = 0; j < n_ / len; ++j)
            for (size_t k = 0; k < len; ++k)
                out.xor_bit(k, get(j * len + k));
        return out;
    }

    /// Copy of positions [start, start + len).
    BitVec slice(size_t start, size_t len) const {
        if (start + len > n_)
            throw DomainMismatch("slice beyond BitVec length");
        BitVec out(len);
        for (size_t k = 0; k < len; ++k) out.set(k, get(start + k));
        return out;
    }

    /// Cyclic left rotation: out[k] = in[(k + offset) mod n].
    BitVec rotate_left(size_t offset) const {
        BitVec out(n_);
        if (n_ == 0) return out;
        offset %= n_;
        for (size_t k = 0; k < n_; ++k) {
            size_t src = k + offset;
            if (src >= n_) src -= n_;
            out.set(k, get(src));
        }
        return out;
    }

    size_t popcount() const {
        size_t c = 0;
        for (size_t i = 0; i < n_; ++i) c += get(i);
        return c;
    }

    bool operator==(const BitVec& other) const {
        if (n_ != other.n_) return false;
        for (size_t i = 0; i < n_; ++i)
            if (get(i) != other.get(i)) return false;
        return true;
    }

  private:
    size_t n_ = 0;
    std::vector<uint64_t> words_;
};

}  // namespace cforam
