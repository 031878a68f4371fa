#include "cforam/cuckoo.hpp"

#include <cstring>

#include "cforam/errors.hpp"

namespace cforam {

CuckooLevel::CuckooLevel(uint32_t table_len, size_t ct_width)
    : table_len_(table_len), ct_width_(ct_width) {
    for (int t = 0; t < 2; ++t) {
        elem_[t] = BlockTable(ct_width, table_len);
        tag_[t] = BlockTable(16, table_len);
        cand_[t].assign(table_len, {0, 0, 0, 0});
        used_[t].assign(table_len, 0);
    }
}

void CuckooLevel::check_pos(uint32_t pos) const {
    if (pos == 0 || pos >= table_len_)
        throw IllegalPosition("position " + std::to_string(pos) +
                              " in table of length " +
                              std::to_string(table_len_));
}

void CuckooLevel::write_slot(int table, uint32_t pos, const SlotItem& item) {
    if (item.ct.size() != ct_width_)
        throw DomainMismatch("ciphertext width " +
                             std::to_string(item.ct.size()) + " vs slot width " +
                             std::to_string(ct_width_));
    std::memcpy(elem_[table].block(pos), item.ct.data(), ct_width_);
    std::memcpy(tag_[table].block(pos), item.tag_share.data(), 16);
    cand_[table][pos] = {item.pos0, item.pos1, item.base_pos0, item.base_pos1};
    if (!used_[table][pos]) {
        used_[table][pos] = 1;
        ++occupied_[table];
    }
}

SlotItem CuckooLevel::take_slot(int table, uint32_t pos) {
    SlotItem item = read_slot(table, pos);
    std::memset(elem_[table].block(pos), 0, ct_width_);
    std::memset(tag_[table].block(pos), 0, 16);
    cand_[table][pos] = {0, 0, 0, 0};
    if (used_[table][pos]) {
        used_[table][pos] = 0;
        --occupied_[table];
    }
    return item;
}

SlotItem CuckooLevel::read_slot(int table, uint32_t pos) const {
    SlotItem item;
    item.ct.assign(elem_[table].block(pos), elem_[table].block(pos) + ct_width_);
    std::memcpy(item.tag_share.data(), tag_[table].block(pos), 16);
    const auto& c = cand_[table][pos];
    item.pos0 = c[0];
    item.pos1 = c[1];
    item.base_pos0 = c[2];
    item.base_pos1 = c[3];
    return item;
}

bool CuckooLevel::slot_occupied(int table, uint32_t pos) const {
    return used_[table][pos] != 0;
}

std::optional<SlotItem> CuckooLevel::place(SlotItem item,
                                           uint32_t max_evictions) {
    check_pos(item.pos0);
    check_pos(item.pos1);
    if (!used_[0][item.pos0]) {
        write_slot(0, item.pos0, item);
        return std::nullopt;
    }
    if (!used_[1][item.pos1]) {
        write_slot(1, item.pos1, item);
        return std::nullopt;
    }
    // Both candidates taken: displace from table 0 first, then let the
    // homeless item chase its alternate slot, alternating tables.
    SlotItem cur = std::move(item);
    int table = 0;
    for (uint32_t e = 0; e < max_evictions; ++e) {
        uint32_t pos = table == 0 ? cur.pos0 : cur.pos1;
        check_pos(pos);
        SlotItem displaced = take_slot(table, pos);
        write_slot(table, pos, cur);
        cur = std::move(displaced);
        table ^= 1;
        uint32_t alt = table == 0 ? cur.pos0 : cur.pos1;
        check_pos(alt);
        if (!used_[table][alt]) {
            write_slot(table, alt, cur);
            return std::nullopt;
        }
    }
    return cur;
}

void CuckooLevel::for_each_occupied(
    const std::function<void(int, uint32_t, const SlotItem&)>& fn) const {
    for (int t = 0; t < 2; ++t)
        for (uint32_t pos = 1; pos < table_len_; ++pos)
            if (used_[t][pos]) fn(t, pos, read_slot(t, pos));
}

void CuckooLevel::clear() {
    for (int t = 0; t < 2; ++t) {
        elem_[t].clear();
        tag_[t].clear();
        cand_[t].assign(table_len_, {0, 0, 0, 0});
        used_[t].assign(table_len_, 0);
        occupied_[t] = 0;
    }
}

}  // namespace cforam
