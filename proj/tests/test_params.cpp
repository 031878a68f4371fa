#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cforam/errors.hpp"
#include "cforam/params.hpp"

using namespace cforam;

TEST_CASE("geometry for a 2^10 store") {
    Params p = Params::from_n(1 << 10, 32);
    CHECK(p.bottom_level == 10);
    CHECK(p.top_level == 7);
    CHECK(p.period == 16);
    CHECK(p.top_capacity == 304);  // 2^8 + 16 * (10 - 7)
    CHECK(p.buffer_len() == 17);
    CHECK(p.max_evictions == 40);
    CHECK(p.table_len(7) == 1024);  // smallest power of two >= 2 * 304
    CHECK(p.table_len(8) == 512);
    CHECK(p.table_len(9) == 1024);
    CHECK(p.table_len(10) == 2048);
    CHECK(p.ct_width() == 36 + 32);
}

TEST_CASE("geometry for a 2^8 store") {
    Params p = Params::from_n(1 << 8, 32);
    CHECK(p.bottom_level == 8);
    CHECK(p.top_level == 6);
    CHECK(p.period == 8);
    CHECK(p.top_capacity == 144);  // 2^7 + 8 * 2
    CHECK(p.table_len(6) == 512);
    CHECK(p.table_len(7) == 256);
    CHECK(p.table_len(8) == 512);
}

TEST_CASE("unsupported capacities are rejected") {
    CHECK_THROWS_AS(Params::from_n(1 << 7, 32), UnsupportedN);  // degenerate
    CHECK_THROWS_AS(Params::from_n(3 << 8, 32), UnsupportedN);  // not a power
    CHECK_THROWS_AS(Params::from_n(uint64_t(1) << 25, 32), UnsupportedN);
    CHECK_THROWS_AS(Params::from_n(0, 32), UnsupportedN);
    CHECK_THROWS_AS(Params::from_n(1 << 10, 0), UnsupportedN);
}

TEST_CASE("structural invariants hold across the whole supported range") {
    for (uint32_t lg = 8; lg <= 24; ++lg) {
        Params p = Params::from_n(uint64_t(1) << lg, 16);
        CAPTURE(lg);
        CHECK(p.top_level + 1 < p.bottom_level);
        // Buffer period divides the merge period.
        CHECK((uint64_t(1) << (p.top_level + 1)) % p.period == 0);
        // Middle and bottom table lengths divide the bottom length.
        for (uint32_t i = p.top_level + 1; i <= p.bottom_level; ++i)
            CHECK(p.table_len(p.bottom_level) % p.table_len(i) == 0);
        // Top tables hold twice the top capacity, rounded to a power of two.
        CHECK(p.table_len(p.top_level) >= 2 * p.top_capacity);
        CHECK((p.table_len(p.top_level) & (p.table_len(p.top_level) - 1)) == 0);
    }
}

TEST_CASE("epoch formula spot values") {
    Params p = Params::from_n(1 << 10, 32);  // top 7, bottom 10, period 16
    CHECK(epoch_of(0, 7, p) == 0);
    CHECK(epoch_of(15, 7, p) == 0);
    CHECK(epoch_of(16, 7, p) == 1);
    CHECK(epoch_of(255, 8, p) == 0);
    CHECK(epoch_of(256, 8, p) == 1);  // first merge targets level 8
    CHECK(epoch_of(512, 9, p) == 1);  // second merge targets level 9
    CHECK(epoch_of(512, 8, p) == 1);  // level 8 stays on its first epoch
    CHECK(epoch_of(768, 8, p) == 2);  // third merge targets level 8 again
    CHECK(epoch_of(1023, 10, p) == 0);
    CHECK(epoch_of(1024, 10, p) == 1);
}

namespace {

/// Explicit step-by-step schedule simulation: the ground truth the closed
/// forms must reproduce at every counter value.
void simulate_and_check(uint64_t n) {
    Params p = Params::from_n(n, 32);
    const uint32_t top = p.top_level, bottom = p.bottom_level;
    std::vector<uint8_t> full(p.level_count(), 0);
    std::vector<uint64_t> rebuilt(p.level_count(), 0);
    uint64_t ctr = 0;
    uint64_t merges = 0;

    uint64_t steps = uint64_t(2) << bottom;  // two full bottom epochs
    for (uint64_t step = 1; step <= steps; ++step) {
        ++ctr;
        RebuildAction act = rebuild_trigger(ctr, full, p);
        switch (act.kind) {
            case RebuildAction::Kind::None:
                break;
            case RebuildAction::Kind::Top:
                ++rebuilt[0];
                full[0] = 1;
                break;
            case RebuildAction::Kind::Mid: {
                ++merges;
                ++rebuilt[0];  // the top level is re-keyed by every merge
                ++rebuilt[act.level - top];
                for (uint32_t i = top; i < act.level; ++i) full[i - top] = 0;
                full[act.level - top] = 1;
                break;
            }
            case RebuildAction::Kind::Bottom:
                ctr = 0;
                merges = 0;
                std::fill(full.begin(), full.end(), 0);
                std::fill(rebuilt.begin(), rebuilt.end(), 0);
                full[bottom - top] = 1;
                break;
        }

        for (uint32_t level = top; level <= bottom; ++level) {
            CAPTURE(n);
            CAPTURE(step);
            CAPTURE(level);
            REQUIRE(epoch_of(ctr, level, p) == rebuilt[level - top]);
        }
        // Middle-level occupancy follows the binary digits of the merge count.
        for (uint32_t level = top + 1; level < bottom; ++level) {
            CAPTURE(level);
            REQUIRE(full[level - top] ==
                    ((merges >> (level - top - 1)) & 1));
        }
    }
}

}  // namespace

TEST_CASE("closed-form epochs match an explicit schedule simulation") {
    simulate_and_check(1 << 8);
    simulate_and_check(1 << 10);
}

TEST_CASE("trigger priority and the degenerate guard") {
    Params p = Params::from_n(1 << 10, 32);
    std::vector<uint8_t> none(p.level_count(), 0);

    CHECK(rebuild_trigger(1, none, p).kind == RebuildAction::Kind::None);
    CHECK(rebuild_trigger(16, none, p).kind == RebuildAction::Kind::Top);
    CHECK(rebuild_trigger(48, none, p).kind == RebuildAction::Kind::Top);

    RebuildAction merge = rebuild_trigger(256, none, p);
    CHECK(merge.kind == RebuildAction::Kind::Mid);
    CHECK(merge.level == 8);  // smallest empty middle level

    std::vector<uint8_t> l8_full(p.level_count(), 0);
    l8_full[8 - p.top_level] = 1;
    RebuildAction merge2 = rebuild_trigger(512, l8_full, p);
    CHECK(merge2.kind == RebuildAction::Kind::Mid);
    CHECK(merge2.level == 9);

    CHECK(rebuild_trigger(1024, none, p).kind == RebuildAction::Kind::Bottom);

    // All middle levels full at a merge boundary: fall back to the bottom.
    std::vector<uint8_t> all_full(p.level_count(), 1);
    CHECK(rebuild_trigger(256, all_full, p).kind ==
          RebuildAction::Kind::Bottom);
}
