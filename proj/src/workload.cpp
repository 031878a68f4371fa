#include "cforam/workload.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "cforam/errors.hpp"

namespace cforam {

Bytes initial_value(uint64_t addr, uint32_t block_bytes) {
    // Byte j of the fill pattern mixes the address and the position so that
    // distinct addresses (and distinct offsets) disagree early.
    Bytes v(block_bytes);
    for (uint32_t j = 0; j < block_bytes; ++j) {
        v[j] = static_cast<uint8_t>((addr * 0x9E3779B97F4A7C15ULL + j * 0x100000001B3ULL) >> 17);
    }
    return v;
}

WorkloadGen::WorkloadGen(const WorkloadSpec& spec)
    : spec_(spec), rng_(spec.seed, /*stream_id=*/0x574C4F41) {
    if (spec_.n == 0 || spec_.block_bytes == 0) {
        throw BadRequest("workload: n and block_bytes must be nonzero");
    }
    if (spec_.write_fraction < 0.0 || spec_.write_fraction > 1.0) {
        throw BadRequest("workload: write_fraction outside [0, 1]");
    }
    if (spec_.dist == AddrDist::Zipf) {
        if (spec_.zipf_theta <= 0.0) {
            throw BadRequest("workload: zipf_theta must be positive");
        }
        // Exact inverse-CDF table: mass of rank k (0-based) is (k+1)^-theta,
        // normalized.  Sampling is a binary search over the cumulative sums.
        zipf_cdf_.resize(spec_.n);
        double acc = 0.0;
        for (uint64_t k = 0; k < spec_.n; ++k) {
            acc += std::pow(static_cast<double>(k + 1), -spec_.zipf_theta);
            zipf_cdf_[k] = acc;
        }
        for (uint64_t k = 0; k < spec_.n; ++k) zipf_cdf_[k] /= acc;
        zipf_cdf_.back() = 1.0;
    }
}

uint64_t WorkloadGen::draw_addr() {
    if (spec_.dist == AddrDist::Uniform) return rng_.below(spec_.n);
    // 53-bit uniform double in [0, 1).
    double u = static_cast<double>(rng_.next_u64() >> 11) * 0x1.0p-53;
    auto it = std::lower_bound(zipf_cdf_.begin(), zipf_cdf_.end(), u);
    if (it == zipf_cdf_.end()) --it;
    return static_cast<uint64_t>(it - zipf_cdf_.begin());
}

Op WorkloadGen::next() {
    Op op;
    op.addr = draw_addr();
    // Threshold compare on a 53-bit uniform draw; write_fraction 1.0 always
    // writes, 0.0 never does.
    double u = static_cast<double>(rng_.next_u64() >> 11) * 0x1.0p-53;
    op.is_write = u < spec_.write_fraction;
    if (op.is_write) {
        op.value.resize(spec_.block_bytes);
        rng_.fill(op.value);
    }
    return op;
}

std::vector<Element> WorkloadGen::initial_elements() const {
    std::vector<Element> out;
    out.reserve(spec_.n);
    for (uint64_t a = 0; a < spec_.n; ++a) {
        out.push_back(Element{a, initial_value(a, spec_.block_bytes)});
    }
    return out;
}

void oracle_replay(const WorkloadSpec& spec, const std::vector<Bytes>& returns) {
    if (returns.size() != spec.num_ops) {
        throw BadRequest("oracle_replay: expected " +
                         std::to_string(spec.num_ops) + " returns, got " +
                         std::to_string(returns.size()));
    }
    WorkloadGen gen(spec);
    OracleStore oracle(spec.n, spec.block_bytes);
    for (uint64_t a = 0; a < spec.n; ++a) {
        oracle.put_initial(a, initial_value(a, spec.block_bytes));
    }
    for (uint64_t i = 0; i < spec.num_ops; ++i) {
        Op op = gen.next();
        Bytes want = oracle.apply(op.is_write, op.addr, op.value);
        if (returns[i] != want) {
            throw MismatchAt(i, "returned value diverges from the reference");
        }
    }
}

OracleStore::OracleStore(uint64_t n, uint32_t block_bytes)
    : n_(n), block_bytes_(block_bytes) {}

void OracleStore::put_initial(uint64_t addr, const Bytes& value) {
    if (addr >= n_ || value.size() != block_bytes_) {
        throw BadRequest("oracle: bad initial element");
    }
    map_[addr] = value;
}

Bytes OracleStore::apply(bool is_write, uint64_t addr, const Bytes& value) {
    if (addr >= n_) throw BadRequest("oracle: address out of range");
    auto it = map_.find(addr);
    Bytes prev = (it != map_.end()) ? it->second : Bytes(block_bytes_, 0);
    if (is_write) {
        if (value.size() != block_bytes_) {
            throw BadRequest("oracle: bad write width");
        }
        map_[addr] = value;
    } else if (it == map_.end()) {
        // Reads materialize absent addresses as zero blocks, mirroring the
        // protocol's read-miss path.
        map_[addr] = prev;
    }
    return prev;
}

}  // namespace cforam
