#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cforam/cuckoo.hpp"
#include "cforam/errors.hpp"

using namespace cforam;

namespace {

constexpr size_t kCtWidth = 24;

SlotItem make_item(Rng& rng, uint32_t pos0, uint32_t pos1) {
    SlotItem item;
    item.ct.resize(kCtWidth);
    rng.fill(item.ct);
    item.ct[0] |= 1;  // never all-zero
    rng.fill(item.tag_share.data(), 16);
    item.pos0 = pos0;
    item.pos1 = pos1;
    item.base_pos0 = pos0;
    item.base_pos1 = pos1;
    return item;
}

}  // namespace

TEST_CASE("placement prefers table 0 then table 1") {
    Rng rng(301);
    CuckooLevel level(16, kCtWidth);

    SlotItem a = make_item(rng, 5, 9);
    CHECK(!level.place(a, 8).has_value());
    CHECK(level.slot_occupied(0, 5));
    CHECK(level.read_slot(0, 5).ct == a.ct);

    SlotItem b = make_item(rng, 5, 9);  // same candidates
    CHECK(!level.place(b, 8).has_value());
    CHECK(level.slot_occupied(1, 9));
    CHECK(level.read_slot(1, 9).ct == b.ct);
}

TEST_CASE("a third item on the same two slots overflows") {
    Rng rng(303);
    CuckooLevel level(16, kCtWidth);
    SlotItem a = make_item(rng, 5, 9);
    SlotItem b = make_item(rng, 5, 9);
    SlotItem c = make_item(rng, 5, 9);
    CHECK(!level.place(a, 6).has_value());
    CHECK(!level.place(b, 6).has_value());
    auto overflow = level.place(c, 6);
    REQUIRE(overflow.has_value());
    // Two slots hold two of the three items; the third came back out.
    CHECK(level.occupied() == 2);
    bool is_a = overflow->ct == a.ct;
    bool is_b = overflow->ct == b.ct;
    bool is_c = overflow->ct == c.ct;
    CHECK((is_a || is_b || is_c));
}

TEST_CASE("eviction chains preserve every stored item") {
    Rng rng(307);
    const uint32_t len = 64;
    CuckooLevel level(len, kCtWidth);
    std::vector<SlotItem> placed;
    size_t overflowed = 0;
    for (int i = 0; i < 40; ++i) {
        SlotItem item = make_item(rng, uint32_t(1 + rng.below(len - 1)),
                                  uint32_t(1 + rng.below(len - 1)));
        auto spill = level.place(item, 24);
        if (spill.has_value())
            ++overflowed;
        else
            placed.push_back(item);
    }
    // Conservation: everything placed is findable at one of its candidates.
    CHECK(level.occupied() + overflowed == 40);
    size_t findable = 0;
    for (const auto& item : placed) {
        bool at0 = level.slot_occupied(0, item.pos0) &&
                   level.read_slot(0, item.pos0).ct == item.ct;
        bool at1 = level.slot_occupied(1, item.pos1) &&
                   level.read_slot(1, item.pos1).ct == item.ct;
        if (at0 || at1) ++findable;
    }
    // An item may itself have been displaced into the overflow, but then it
    // would not be in `placed`; every placed item that stayed must be at one
    // of its two candidates.
    CHECK(findable >= placed.size() - overflowed);
}

TEST_CASE("tag shares and candidates move together with the ciphertext") {
    Rng rng(311);
    const uint32_t len = 32;
    CuckooLevel level(len, kCtWidth);
    for (int i = 0; i < 20; ++i) {
        SlotItem item = make_item(rng, uint32_t(1 + rng.below(len - 1)),
                                  uint32_t(1 + rng.below(len - 1)));
        level.place(item, 16);
    }
    level.for_each_occupied([&](int table, uint32_t pos, const SlotItem& item) {
        // The mirrored tag area holds this slot's share at the same index.
        CHECK(std::memcmp(level.tags(table).block(pos), item.tag_share.data(),
                          16) == 0);
        CHECK(std::memcmp(level.elems(table).block(pos), item.ct.data(),
                          kCtWidth) == 0);
    });
}

TEST_CASE("two replicas fed the same stream stay byte-identical") {
    Rng rng(313);
    const uint32_t len = 128;
    CuckooLevel a(len, kCtWidth), b(len, kCtWidth);
    for (int i = 0; i < 100; ++i) {
        SlotItem item = make_item(rng, uint32_t(1 + rng.below(len - 1)),
                                  uint32_t(1 + rng.below(len - 1)));
        auto spill_a = a.place(item, 28);
        auto spill_b = b.place(item, 28);
        CHECK(spill_a.has_value() == spill_b.has_value());
        if (spill_a && spill_b) CHECK(spill_a->ct == spill_b->ct);
    }
    for (int t = 0; t < 2; ++t) {
        CHECK(a.elems(t).data == b.elems(t).data);
        CHECK(a.tags(t).data == b.tags(t).data);
    }
}

TEST_CASE("reserved and out-of-range positions are rejected") {
    Rng rng(317);
    CuckooLevel level(16, kCtWidth);
    SlotItem zero = make_item(rng, 0, 5);
    CHECK_THROWS_AS(level.place(zero, 4), IllegalPosition);
    SlotItem high = make_item(rng, 3, 16);
    CHECK_THROWS_AS(level.place(high, 4), IllegalPosition);
}

TEST_CASE("top-level geometry keeps overflow within the stash bound") {
    // 1000 randomized builds at the top-level shape for a 2^10 store:
    // 304 items into two tables of 1024 slots, 40 displacements allowed,
    // stash bound 16.  None may exceed the bound.
    Rng rng(331);
    const uint32_t len = 1024;
    const int items = 304;
    const uint32_t max_evictions = 40;
    const size_t stash_bound = 16;

    size_t worst = 0;
    for (int build = 0; build < 1000; ++build) {
        CuckooLevel level(len, kCtWidth);
        size_t stash = 0;
        for (int i = 0; i < items; ++i) {
            SlotItem item = make_item(rng, uint32_t(1 + rng.below(len - 1)),
                                      uint32_t(1 + rng.below(len - 1)));
            if (level.place(item, max_evictions).has_value()) ++stash;
        }
        worst = std::max(worst, stash);
        CHECK(stash <= stash_bound);
    }
    MESSAGE("worst stash load over 1000 builds: ", worst);
}
