#include "cforam/store.hpp"

#include <cstring>

#include "cforam/errors.hpp"

namespace cforam {

ServerStore::ServerStore(const Params& params) : params_(params) {
    uint32_t blen = params_.buffer_len();
    size_t ctw = params_.ct_width();
    buffer_elems_ = BlockTable(ctw, blen);
    buffer_tags_ = BlockTable(16, blen);
    stash_elems_ = BlockTable(ctw, blen);
    stash_tags_ = BlockTable(16, blen);
    levels_.reserve(params_.level_count());
    for (uint32_t lvl = params_.top_level; lvl <= params_.bottom_level; ++lvl) {
        levels_.emplace_back(params_.table_len(lvl), ctw);
    }
}

CuckooLevel& ServerStore::level(uint32_t idx) {
    if (!level_in_range(idx))
        throw IllegalPosition("level " + std::to_string(idx) + " out of range");
    return levels_[idx - params_.top_level];
}

const CuckooLevel& ServerStore::level(uint32_t idx) const {
    if (!level_in_range(idx))
        throw IllegalPosition("level " + std::to_string(idx) + " out of range");
    return levels_[idx - params_.top_level];
}

void ServerStore::buffer_append(const Bytes& ct, const Tag& tag_share) {
    if (ct.size() != params_.ct_width())
        throw DomainMismatch("append ciphertext width");
    if (buffer_used_ >= params_.buffer_len())
        throw Internal("append buffer overrun");
    std::memcpy(buffer_elems_.block(buffer_used_), ct.data(), ct.size());
    std::memcpy(buffer_tags_.block(buffer_used_), tag_share.data(), 16);
    buffer_used_ += 1;
}

void ServerStore::stash_put(const SlotItem& item) {
    if (stash_used_ >= params_.buffer_len())
        throw StashOverflow("stash full at " + std::to_string(stash_used_ - 1) +
                            " items");
    std::memcpy(stash_elems_.block(stash_used_), item.ct.data(), item.ct.size());
    std::memcpy(stash_tags_.block(stash_used_), item.tag_share.data(), 16);
    stash_used_ += 1;
}

void ServerStore::insert(SlotItem item, uint32_t level_idx) {
    if (item.ct.size() != params_.ct_width())
        throw DomainMismatch("insert ciphertext width");
    CuckooLevel& target = level(level_idx);
    std::optional<SlotItem> spill = target.place(std::move(item), params_.max_evictions);
    if (!spill) return;
    if (level_idx != params_.top_level) {
        spill->demote_to_base();
        spill = level(params_.top_level).place(std::move(*spill),
                                               params_.max_evictions);
        if (!spill) return;
    }
    stash_put(*spill);
}

bool ServerStore::top_occupied() const {
    return buffer_used_ > 1 || stash_used_ > 1 ||
           !levels_[0].empty();
}

std::vector<StagedItem> ServerStore::pull_and_clear(uint32_t target_level,
                                                    bool include_mid) {
    if (!level_in_range(target_level))
        throw IllegalPosition("rebuild target out of range");
    std::vector<StagedItem> staged;

    auto take_flat = [&](BlockTable& elems, BlockTable& tags, uint32_t used) {
        for (uint32_t i = 1; i < used; ++i) {
            StagedItem it;
            it.ct.assign(elems.block(i), elems.block(i) + elems.width);
            std::memcpy(it.tag_share.data(), tags.block(i), 16);
            staged.push_back(std::move(it));
        }
        elems.clear();
        tags.clear();
    };

    take_flat(buffer_elems_, buffer_tags_, buffer_used_);
    buffer_used_ = 1;
    take_flat(stash_elems_, stash_tags_, stash_used_);
    stash_used_ = 1;

    auto take_level = [&](uint32_t lvl) {
        CuckooLevel& cl = level(lvl);
        cl.for_each_occupied([&](int, uint32_t, const SlotItem& item) {
            staged.push_back(StagedItem{item.ct, item.tag_share});
        });
        cl.clear();
    };

    take_level(params_.top_level);
    if (include_mid) {
        for (uint32_t lvl = params_.top_level + 1; lvl < target_level; ++lvl)
            take_level(lvl);
        if (target_level == params_.bottom_level) take_level(target_level);
    }
    return staged;
}

void ServerStore::clear_all() {
    buffer_elems_.clear();
    buffer_tags_.clear();
    stash_elems_.clear();
    stash_tags_.clear();
    buffer_used_ = 1;
    stash_used_ = 1;
    for (auto& lvl : levels_) lvl.clear();
}

}  // namespace cforam
