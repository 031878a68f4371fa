#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cforam/client.hpp"
#include "cforam/meter.hpp"
#include "cforam/workload.hpp"

namespace cforam {

// ============================================================================
// Workload driver and benchmark grid.
//
// Every run is also a correctness run: each returned value is checked against
// the plaintext reference store and any divergence aborts with MismatchAt.
// Cost statements are made on payload bytes (frame headers excluded); wall
// time is measured end to end at the client, simulated latency included.
// ============================================================================

enum class TransportKind : uint8_t { Inproc = 0, Tcp = 1 };

struct RunSpec {
    Scheme scheme = Scheme::Base;
    TransportKind transport = TransportKind::Inproc;
    std::string server0 = "127.0.0.1:7700";  ///< host:port, tcp only
    std::string server1 = "127.0.0.1:7701";  ///< host:port, tcp only
    uint64_t n = 256;
    uint32_t block_bytes = 32;
    uint64_t ops = 1024;
    uint64_t seed = 1;
    double write_fraction = 0.5;
    AddrDist dist = AddrDist::Uniform;
    double zipf_theta = 0.99;
    uint32_t latency_us = 0;
};

struct RunReport {
    RunSpec spec;
    FlowCounter phase_total[kPhaseCount];  ///< indexed by Phase
    FlowCounter online;                    ///< access + rebuild traffic
    double setup_seconds = 0.0;
    double run_seconds = 0.0;  ///< whole op stream, rebuilds included
    ClientStats stats;

    double amortized_bytes() const {
        return spec.ops ? double(online.payload_bytes) / double(spec.ops) : 0.0;
    }
    double amortized_ms() const {
        return spec.ops ? run_seconds * 1000.0 / double(spec.ops) : 0.0;
    }
};

/// Runs setup plus the full op stream, verifying every return against the
/// reference store.  When the ORAM_LOG environment variable names a file, a
/// frame-by-frame transcript of the whole session is written there.
RunReport run_workload(const RunSpec& spec);

/// Human-readable multi-line report for one run.
std::string format_report(const RunReport& r);

// ----------------------------------------------------------------------------
// Benchmark grid: the cross product of capacities, block sizes and schemes,
// one full bottom-epoch of accesses per point (override with ops_per_point).
// ----------------------------------------------------------------------------

struct BenchSpec {
    std::vector<uint64_t> n_list;
    std::vector<uint32_t> b_list;
    std::vector<Scheme> schemes;
    uint64_t seed = 1;
    std::optional<uint64_t> ops_per_point;
    uint32_t latency_us = 0;
};

struct BenchPoint {
    Scheme scheme = Scheme::Base;
    uint64_t n = 0;
    uint32_t block_bytes = 0;
    uint64_t ops = 0;
    double amortized_bytes = 0.0;
    double amortized_ms = 0.0;
    double setup_s = 0.0;
    double rebuild_share = 0.0;  ///< rebuild payload / online payload
};

std::vector<BenchPoint> bench_run(const BenchSpec& spec);

/// CSV with one row per grid point.  The ratio column relates each folded-
/// scheme row to the base-scheme row with the same (n, block_bytes); it is
/// empty elsewhere.  All seed-determined columns are byte-stable across runs.
std::string bench_csv(const std::vector<BenchPoint>& points);

}  // namespace cforam
