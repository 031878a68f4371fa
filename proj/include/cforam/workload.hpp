#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "cforam/bytes.hpp"
#include "cforam/crypto.hpp"
#include "cforam/rng.hpp"

namespace cforam {

// ============================================================================
// Workload generation and the plaintext reference store.
//
// The generator draws a reproducible op stream from a seed: uniform or
// Zipf-distributed addresses (exact inverse-CDF sampling) and a configurable
// write fraction.  The reference store replays the same stream over a plain
// map; the benchmark and the differential tests require the protocol's
// returned value to match the reference at every step.
// ============================================================================

enum class AddrDist : uint8_t { Uniform = 0, Zipf = 1 };

struct WorkloadSpec {
    uint64_t n = 0;
    uint32_t block_bytes = 0;
    uint64_t num_ops = 0;
    double write_fraction = 0.5;
    AddrDist dist = AddrDist::Uniform;
    double zipf_theta = 0.99;
    uint64_t seed = 1;
};

struct Op {
    bool is_write = false;
    uint64_t addr = 0;
    Bytes value;  ///< filled for writes only
};

class WorkloadGen {
  public:
    explicit WorkloadGen(const WorkloadSpec& spec);

    /// The i-th op of the stream; call with i = 0,1,2,... in order.
    Op next();

    /// Initial contents: every address present, deterministic value.
    std::vector<Element> initial_elements() const;

  private:
    uint64_t draw_addr();

    WorkloadSpec spec_;
    Rng rng_;
    std::vector<double> zipf_cdf_;  ///< cumulative masses when dist == Zipf
};

/// Deterministic fill value for an address at setup time.
Bytes initial_value(uint64_t addr, uint32_t block_bytes);

/// Replays the workload named by `spec` against a fresh reference store and
/// checks one protocol-returned value per op.  Throws MismatchAt on the first
/// divergence, BadRequest if the stream length is wrong.
void oracle_replay(const WorkloadSpec& spec, const std::vector<Bytes>& returns);

/// Plain map with the same semantics as the oblivious store: reads of absent
/// addresses yield zeros and materialize them.
class OracleStore {
  public:
    OracleStore(uint64_t n, uint32_t block_bytes);

    void put_initial(uint64_t addr, const Bytes& value);

    /// Applies one op and returns the value as of before the op.
    Bytes apply(bool is_write, uint64_t addr, const Bytes& value);

  private:
    uint64_t n_;
    uint32_t block_bytes_;
    std::unordered_map<uint64_t, Bytes> map_;
};

}  // namespace cforam
