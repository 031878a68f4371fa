#include "cforam/params.hpp"

#include <string>

#include "cforam/errors.hpp"

namespace cforam {
namespace {

bool is_pow2(uint64_t v) { return v != 0 && (v & (v - 1)) == 0; }

uint32_t ceil_log2(uint64_t v) {
    uint32_t e = 0;
    while ((uint64_t(1) << e) < v) ++e;
    return e;
}

}  // namespace

Params Params::from_n(uint64_t n, uint32_t block_bytes) {
    if (!is_pow2(n))
        throw UnsupportedN("capacity must be a power of two, got " +
                           std::to_string(n));
    if (n < (uint64_t(1) << 8) || n > (uint64_t(1) << 24))
        throw UnsupportedN("capacity " + std::to_string(n) +
                           " outside [2^8, 2^24]");
    if (block_bytes == 0)
        throw UnsupportedN("block size must be positive");

    Params p;
    p.n = n;
    p.block_bytes = block_bytes;
    p.bottom_level = ceil_log2(n);

    uint64_t lg = p.bottom_level;
    p.top_level = ceil_log2(lg * lg);  // smallest e with 2^e >= (log2 n)^2
    if (p.top_level + 1 >= p.bottom_level)
        throw UnsupportedN("hierarchy degenerates at capacity " +
                           std::to_string(n));

    p.period = uint32_t(1) << ceil_log2(lg);
    p.top_capacity = (uint64_t(1) << (p.top_level + 1)) +
                     uint64_t(p.period) * (p.bottom_level - p.top_level);
    p.max_evictions = 4 * p.bottom_level;
    return p;
}

uint32_t Params::table_len(uint32_t level) const {
    if (level < top_level || level > bottom_level)
        throw IllegalPosition("no tables at level " + std::to_string(level));
    if (level == top_level)
        return uint32_t(1) << ceil_log2(2 * top_capacity);
    return uint32_t(1) << (level + 1);
}

uint64_t epoch_of(uint64_t ctr, uint32_t level, const Params& params) {
    if (level < params.top_level || level > params.bottom_level)
        throw IllegalPosition("no epoch for level " + std::to_string(level));
    if (level == params.top_level) return ctr / params.period;
    if (level == params.bottom_level) return ctr >> params.bottom_level;
    uint32_t k = level - params.top_level - 1;
    uint64_t merges = ctr >> (params.top_level + 1);
    return (merges + (uint64_t(1) << k)) >> (k + 1);
}

RebuildAction rebuild_trigger(uint64_t ctr, const std::vector<uint8_t>& full,
                              const Params& params) {
    RebuildAction act;
    if (ctr == 0) return act;
    if (ctr % (uint64_t(1) << params.bottom_level) == 0) {
        act.kind = RebuildAction::Kind::Bottom;
        return act;
    }
    if (ctr % (uint64_t(1) << (params.top_level + 1)) == 0) {
        for (uint32_t level = params.top_level + 1; level < params.bottom_level;
             ++level) {
            if (!full[level - params.top_level]) {
                act.kind = RebuildAction::Kind::Mid;
                act.level = level;
                return act;
            }
        }
        // Degenerate: every middle level occupied; fall through to a full
        // reshuffle rather than overfilling one.
        act.kind = RebuildAction::Kind::Bottom;
        return act;
    }
    if (ctr % params.period == 0) {
        act.kind = RebuildAction::Kind::Top;
        return act;
    }
    return act;
}

}  // namespace cforam
