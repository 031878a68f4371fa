#include "cforam/client.hpp"

#include <algorithm>
#include <utility>

#include "cforam/errors.hpp"
#include "cforam/pir.hpp"

namespace cforam {

namespace {

/// Tracks how many decrypted elements the client is holding at once.
struct ResidentGuard {
    ClientStats& stats;
    explicit ResidentGuard(ClientStats& s) : stats(s) {
        stats.resident_elems += 1;
        stats.peak_resident_elems =
            std::max(stats.peak_resident_elems, stats.resident_elems);
    }
    ~ResidentGuard() { stats.resident_elems -= 1; }
};

Tag random_nonzero_tag(Rng& rng) {
    Tag t{};
    do {
        t = rng.block16();
    } while (all_zero(t.data(), t.size()));
    return t;
}

}  // namespace

const char* scheme_name(Scheme s) {
    return s == Scheme::Base ? "cforam" : "cforam-plus";
}

// ----------------------------------------------------------------------------
// PeerLink
// ----------------------------------------------------------------------------

void PeerLink::send(const Frame& f) {
    if (meter) meter->on_send(server_id, f);
    if (recorder && meter)
        recorder->on_frame(server_id, true, meter->phase(), f);
    ch->send(f);
}

Frame PeerLink::recv_any() {
    auto f = ch->recv();
    if (!f)
        throw Internal("server " + std::to_string(server_id) +
                       " closed the connection");
    if (meter) meter->on_recv(server_id, *f);
    if (recorder && meter)
        recorder->on_frame(server_id, false, meter->phase(), *f);
    if (f->type == MsgType::Error) {
        ErrorMsg e = decode_error(*f);
        throw_wire_error(e.code,
                         "reported by server " + std::to_string(server_id));
    }
    return std::move(*f);
}

Frame PeerLink::expect(MsgType t) {
    Frame f = recv_any();
    if (f.type != t)
        throw StreamMisalignment(std::string("expected ") + msg_type_name(t) +
                                 " but received " + msg_type_name(f.type));
    return f;
}

// ----------------------------------------------------------------------------
// Client
// ----------------------------------------------------------------------------

Client::Client(const Params& params, PeerLink s0, PeerLink s1, ClientConfig cfg)
    : params_(params), s_{s0, s1}, cfg_(cfg), rng_(cfg.seed, 0xC11E57) {
    full_.assign(params_.level_count(), 0);
}

Tag Client::fresh_mask() { return random_nonzero_tag(rng_); }

Element Client::open_or_throw(const Bytes& ct, const SecretKey& ek) {
    auto e = open_element(ek, ct);
    if (!e) throw AuthFailure("stored ciphertext failed authentication");
    return std::move(*e);
}

void Client::handshake() {
    for (int b = 0; b < 2; ++b) s_[b].ch->set_latency(cfg_.latency_us);
    HelloMsg h;
    h.version = kProtocolVersion;
    h.latency_us = cfg_.latency_us;
    h.n = params_.n;
    h.block_bytes = params_.block_bytes;
    for (int b = 0; b < 2; ++b) {
        h.role = uint8_t(b);
        s_[b].send(encode(h));
    }
    for (int b = 0; b < 2; ++b) {
        HelloMsg r = decode_hello(s_[b].expect(MsgType::Hello));
        if (r.role != b || r.version != kProtocolVersion || r.n != params_.n ||
            r.block_bytes != params_.block_bytes)
            throw BadRequest("handshake reply does not match the session");
    }
}

void Client::report_refresh() {
    ReportMsg poll;
    for (int b = 0; b < 2; ++b) s_[b].send(encode(poll));
    ReportMsg r0 = decode_report(s_[0].expect(MsgType::Report));
    ReportMsg r1 = decode_report(s_[1].expect(MsgType::Report));
    if (r0.top_full != r1.top_full || r0.stash_len != r1.stash_len)
        throw ServerDisagreement("occupancy reports differ between servers");
    full_[0] = r0.top_full;
    len_stash_ = r0.stash_len;
}

void Client::sync_barrier() { report_refresh(); }

void Client::insert_element(const Element& e, uint32_t level) {
    Tag tau = derive_tag(tk_, e.addr);
    auto [share0, share1] = share_tag(tau, rng_);
    uint32_t len = params_.table_len(level);
    HashKey hk = derive_level_key(lk_, level, epoch_of(ctr_, level, params_));
    auto [p0, p1] = hash_positions(hk, tau, len);
    uint32_t b0 = p0, b1 = p1;
    if (level != params_.top_level) {
        HashKey bk = derive_level_key(
            lk_, params_.top_level,
            epoch_of(ctr_, params_.top_level, params_));
        std::tie(b0, b1) =
            hash_positions(bk, tau, params_.table_len(params_.top_level));
    }
    InsertMsg m;
    m.ct = seal_element(ek_, e, rng_);
    m.pos0 = p0;
    m.pos1 = p1;
    m.base_pos0 = b0;
    m.base_pos1 = b1;
    m.target_level = uint8_t(level);
    m.tag_share = share0;
    s_[0].send(encode(m));
    m.tag_share = share1;
    s_[1].send(encode(m));
}

void Client::setup(const std::vector<Element>& initial) {
    if (initial.size() != params_.n)
        throw BadRequest("setup needs exactly n elements");
    std::vector<uint8_t> seen(params_.n, 0);
    for (const Element& e : initial) {
        if (e.addr >= params_.n) throw BadRequest("setup address out of range");
        if (e.value.size() != params_.block_bytes)
            throw BadRequest("setup value width mismatch");
        if (seen[e.addr]) throw BadRequest("duplicate setup address");
        seen[e.addr] = 1;
    }

    s_[0].meter->set_phase(Phase::Setup);
    if (s_[0].recorder) s_[0].recorder->begin_access(kSetupAccessIndex);
    handshake();

    lk_.bytes = rng_.key32();
    tk_.bytes = rng_.key32();
    ek_.bytes = rng_.key32();
    ctr_ = 0;
    dummy_seq_ = 0;
    len_buffer_ = 1;
    std::fill(full_.begin(), full_.end(), 0);
    stats_ = ClientStats{};

    for (const Element& e : initial) insert_element(e, params_.bottom_level);
    full_[params_.bottom_level - params_.top_level] = 1;
    report_refresh();
}

// ----------------------------------------------------------------------------
// Access path
// ----------------------------------------------------------------------------

void Client::scan_region(uint8_t region, uint32_t used_len, uint64_t addr,
                         bool& found, Element& rec, uint32_t& found_pos) {
    found_pos = 0;
    s_[0].send(encode(ScanReqMsg{region}));
    for (uint32_t i = used_len; i-- > 1;) {
        ScanItemMsg item = decode_scan_item(s_[0].expect(MsgType::ScanItem));
        ResidentGuard guard(stats_);
        Element e = open_or_throw(item.ct, ek_);
        if (!found && !is_dummy_addr(e.addr) && e.addr == addr) {
            found = true;
            rec = std::move(e);
            found_pos = i;
        }
    }
    s_[0].expect(MsgType::ScanEnd);
}

void Client::tag_write(TagTarget target, uint8_t level, uint32_t table_len,
                       uint32_t pos, const Tag& delta) {
    auto [k0, k1] = pir_write_query(pos, table_len, rng_);
    PirWriteMsg m;
    m.target = uint8_t(target);
    m.level = level;
    m.delta.assign(delta.begin(), delta.end());
    m.key = dpf_serialize(k0);
    s_[0].send(encode(m));
    m.key = dpf_serialize(k1);
    s_[1].send(encode(m));
}

void Client::level_read_base(uint32_t level, uint64_t addr, const Tag& tau,
                             const Tag& mask, bool& found, Element& rec) {
    uint32_t len = params_.table_len(level);
    HashKey hk = derive_level_key(lk_, level, epoch_of(ctr_, level, params_));
    auto [q0, q1] = hash_positions(hk, tau, len);
    uint32_t q[2] = {q0, q1};

    for (int t = 0; t < 2; ++t) {
        auto [k0, k1] = pir_read_query(q[t], len, rng_);
        PirReadMsg m;
        m.level = uint8_t(level);
        m.table = uint8_t(t);
        m.key = dpf_serialize(k0);
        s_[0].send(encode(m));
        m.key = dpf_serialize(k1);
        s_[1].send(encode(m));
    }
    Bytes reply[2][2];
    for (int t = 0; t < 2; ++t) {
        for (int b = 0; b < 2; ++b) {
            reply[t][b] =
                decode_pir_read_resp(s_[b].expect(MsgType::PirReadResp)).block;
        }
    }

    uint32_t write_pos[2] = {0, 0};
    for (int t = 0; t < 2; ++t) {
        Bytes block = pir_read_combine(reply[t][0], reply[t][1]);
        if (block.size() != params_.ct_width())
            throw DomainMismatch("level read reply width");
        if (all_zero(block.data(), block.size())) continue;  // empty slot
        auto e = open_element(ek_, block);
        if (!e)
            throw ServerDisagreement(
                "combined level slot failed to authenticate");
        ResidentGuard guard(stats_);
        if (!found && !is_dummy_addr(e->addr) && e->addr == addr) {
            found = true;
            rec = std::move(*e);
            write_pos[t] = q[t];
        }
    }
    tag_write(TagTarget::LevelTags0, uint8_t(level), len, write_pos[0], mask);
    tag_write(TagTarget::LevelTags1, uint8_t(level), len, write_pos[1], mask);
}

void Client::search_levels_base(uint64_t addr, const Tag& tau, const Tag& mask,
                                bool& found, Element& rec) {
    for (uint32_t lvl = params_.top_level; lvl <= params_.bottom_level; ++lvl) {
        if (!full_[lvl - params_.top_level]) continue;
        level_read_base(lvl, addr, tau, mask, found, rec);
    }
}

void Client::search_levels_plus(uint64_t addr, const Tag& tau, const Tag& mask,
                                bool& found, Element& rec) {
    // The top level is read exactly as in the base scheme.
    if (full_[0]) level_read_base(params_.top_level, addr, tau, mask, found, rec);

    uint32_t bottom_len = params_.table_len(params_.bottom_level);
    uint64_t rpos[2] = {rng_.below(bottom_len), rng_.below(bottom_len)};
    auto key_pair0 = dpf_gen(uint32_t(rpos[0]), bottom_len, rng_);
    auto key_pair1 = dpf_gen(uint32_t(rpos[1]), bottom_len, rng_);
    OpReadInitMsg init;
    init.key0 = dpf_serialize(key_pair0.first);
    init.key1 = dpf_serialize(key_pair1.first);
    s_[0].send(encode(init));
    init.key0 = dpf_serialize(key_pair0.second);
    init.key1 = dpf_serialize(key_pair1.second);
    s_[1].send(encode(init));

    Locator loc;
    for (uint32_t lvl = params_.top_level + 1; lvl <= params_.bottom_level;
         ++lvl) {
        if (!full_[lvl - params_.top_level]) continue;
        uint32_t len = params_.table_len(lvl);
        uint32_t q[2];
        if (found) {
            // Position already served; draw fresh uniform decoys.
            q[0] = 1 + uint32_t(rng_.below(len - 1));
            q[1] = 1 + uint32_t(rng_.below(len - 1));
        } else {
            HashKey hk =
                derive_level_key(lk_, lvl, epoch_of(ctr_, lvl, params_));
            auto [h0, h1] = hash_positions(hk, tau, len);
            q[0] = h0;
            q[1] = h1;
        }
        OpReadLevelMsg ql;
        ql.level = uint8_t(lvl);
        ql.offset0 = uint32_t((rpos[0] + len - q[0]) % len);
        ql.offset1 = uint32_t((rpos[1] + len - q[1]) % len);
        s_[0].send(encode(ql));
        s_[1].send(encode(ql));
        OpReadRespMsg r0 =
            decode_op_read_resp(s_[0].expect(MsgType::OpReadResp));
        OpReadRespMsg r1 =
            decode_op_read_resp(s_[1].expect(MsgType::OpReadResp));
        const Bytes* halves0[2] = {&r0.r0, &r0.r1};
        const Bytes* halves1[2] = {&r1.r0, &r1.r1};
        for (int t = 0; t < 2; ++t) {
            Bytes block = pir_read_combine(*halves0[t], *halves1[t]);
            if (block.size() != params_.ct_width())
                throw DomainMismatch("vector read reply width");
            if (all_zero(block.data(), block.size())) continue;
            auto e = open_element(ek_, block);
            if (!e)
                throw ServerDisagreement(
                    "combined level slot failed to authenticate");
            ResidentGuard guard(stats_);
            if (!found && !is_dummy_addr(e->addr) && e->addr == addr) {
                found = true;
                rec = std::move(*e);
                loc = Locator{q[t], len, uint8_t(t)};
            }
        }
    }

    // One write covers every level below the top: the key addresses the found
    // slot through the per-level shift identity, or index 0 when untouched.
    uint64_t ind = 0;
    if (loc.len != 0)
        ind = uint64_t(loc.pos) + loc.len +
              uint64_t(loc.table) * 2 * uint64_t(bottom_len);
    auto key_pair = dpf_gen(uint32_t(ind), 4 * bottom_len, rng_);
    OpWriteMsg w;
    w.mask = mask;
    w.key = dpf_serialize(key_pair.first);
    s_[0].send(encode(w));
    w.key = dpf_serialize(key_pair.second);
    s_[1].send(encode(w));
}

Bytes Client::access(bool is_write, uint64_t addr, const Bytes& value) {
    if (addr >= params_.n) throw BadRequest("address out of range");
    if (is_write && value.size() != params_.block_bytes)
        throw BadRequest("value width mismatch");

    s_[0].meter->set_phase(Phase::Access);
    if (s_[0].recorder)
        s_[0].recorder->begin_access(uint32_t(stats_.accesses));

    Tag tau = derive_tag(tk_, addr);
    Tag mask = fresh_mask();
    bool found = false;
    Element rec;
    ResidentGuard guard(stats_);  // the in-flight record

    uint32_t pos_buffer = 0, pos_stash = 0;
    scan_region(0, len_buffer_, addr, found, rec, pos_buffer);
    scan_region(1, len_stash_, addr, found, rec, pos_stash);
    tag_write(TagTarget::BufferTags, 0, params_.buffer_len(), pos_buffer, mask);
    tag_write(TagTarget::StashTags, 0, params_.buffer_len(), pos_stash, mask);

    if (cfg_.scheme == Scheme::Base)
        search_levels_base(addr, tau, mask, found, rec);
    else
        search_levels_plus(addr, tau, mask, found, rec);

    Bytes prev = found ? rec.value : Bytes(params_.block_bytes, 0);
    Element fresh{addr, is_write ? value : prev};
    AppendMsg append;
    append.ct = seal_element(ek_, fresh, rng_);
    auto [share0, share1] = share_tag(tau, rng_);
    append.tag_share = share0;
    s_[0].send(encode(append));
    append.tag_share = share1;
    s_[1].send(encode(append));
    len_buffer_ += 1;

    ctr_ += 1;
    stats_.accesses += 1;
    maybe_rebuild();
    return prev;
}

// ----------------------------------------------------------------------------
// Rebuilds
// ----------------------------------------------------------------------------

template <typename Fn>
uint32_t Client::pull_pairwise(Fn&& fn) {
    uint32_t count = 0;
    for (;;) {
        Frame f0 = s_[0].recv_any();
        Frame f1 = s_[1].recv_any();
        if (f0.type != f1.type)
            throw StreamMisalignment("rebuild streams diverged");
        if (f0.type == MsgType::RebEnd) {
            RebEndMsg e0 = decode_reb_end(f0);
            RebEndMsg e1 = decode_reb_end(f1);
            if (e0.count != count || e1.count != count)
                throw StreamMisalignment("rebuild stream count mismatch");
            return count;
        }
        if (f0.type != MsgType::RebItem)
            throw StreamMisalignment("unexpected frame in rebuild stream");
        RebItemMsg m0 = decode_reb_item(f0);
        RebItemMsg m1 = decode_reb_item(f1);
        if (!m0.has_ct || m1.has_ct)
            throw StreamMisalignment("rebuild item roles inverted");
        fn(m0.ct, m0.tag_share, m1.tag_share);
        count += 1;
    }
}

void Client::maybe_rebuild() {
    RebuildAction act = rebuild_trigger(ctr_, full_, params_);
    if (act.kind == RebuildAction::Kind::None) return;
    s_[0].meter->set_phase(Phase::Rebuild);
    switch (act.kind) {
        case RebuildAction::Kind::Top:
            stats_.rebuilds_top += 1;
            rebuild_into(params_.top_level, false);
            break;
        case RebuildAction::Kind::Mid:
            stats_.rebuilds_mid += 1;
            rebuild_into(act.level, true);
            break;
        case RebuildAction::Kind::Bottom:
            stats_.rebuilds_bottom += 1;
            rebuild_bottom();
            break;
        case RebuildAction::Kind::None:
            break;
    }
}

void Client::rebuild_into(uint32_t target, bool include_mid) {
    RebuildPullMsg pull{uint8_t(target), uint8_t(include_mid ? 1 : 0)};
    s_[0].send(encode(pull));
    s_[1].send(encode(pull));
    pull_pairwise([&](const Bytes& ct, const Tag& t0, const Tag& t1) {
        ResidentGuard guard(stats_);
        Element e = open_or_throw(ct, ek_);
        Tag tau;
        for (size_t i = 0; i < 16; ++i) tau[i] = uint8_t(t0[i] ^ t1[i]);
        bool live = !is_dummy_addr(e.addr) && tau == derive_tag(tk_, e.addr);
        if (live) {
            insert_element(e, target);
        } else {
            // Stale or dummy: replaced by a fresh dummy so counts and the
            // placement stream stay data-independent.
            Element dummy{make_dummy_addr(ctr_, dummy_seq_++),
                          Bytes(params_.block_bytes, 0)};
            insert_element(dummy, target);
        }
    });
    ClearMsg barrier{uint8_t(target)};
    s_[0].send(encode(barrier));
    s_[1].send(encode(barrier));

    for (uint32_t lvl = params_.top_level; lvl < target; ++lvl)
        full_[lvl - params_.top_level] = 0;
    full_[target - params_.top_level] = 1;
    len_buffer_ = 1;
    report_refresh();
}

void Client::rebuild_bottom() {
    uint32_t bottom = params_.bottom_level;
    RebuildPullMsg pull{uint8_t(bottom), 1};
    s_[0].send(encode(pull));
    s_[1].send(encode(pull));

    // Pass 1: merge the two streams, refresh every record (stale and dummy
    // records become fresh dummies), and stage everything on server 0.
    pull_pairwise([&](const Bytes& ct, const Tag& t0, const Tag& t1) {
        ResidentGuard guard(stats_);
        Element e = open_or_throw(ct, ek_);
        Tag tau;
        for (size_t i = 0; i < 16; ++i) tau[i] = uint8_t(t0[i] ^ t1[i]);
        bool live = !is_dummy_addr(e.addr) && tau == derive_tag(tk_, e.addr);
        Element out = live ? std::move(e)
                           : Element{make_dummy_addr(ctr_, dummy_seq_++),
                                     Bytes(params_.block_bytes, 0)};
        s_[0].send(encode(ShufflePushMsg{seal_element(ek_, out, rng_)}));
    });

    // Pass 2: pull server 0's shuffle, drop dummies, re-encrypt the live
    // records and stage them on server 1.
    s_[0].send(encode_shuffle_pull_req());
    for (;;) {
        Frame f = s_[0].recv_any();
        if (f.type == MsgType::ShuffleEnd) break;
        if (f.type != MsgType::ShuffleItem)
            throw StreamMisalignment("unexpected frame in shuffle stream");
        ShuffleItemMsg item = decode_shuffle_item(f);
        ResidentGuard guard(stats_);
        Element e = open_or_throw(item.ct, ek_);
        if (is_dummy_addr(e.addr)) continue;
        s_[1].send(encode(ShufflePushMsg{seal_element(ek_, e, rng_)}));
    }

    // Pass 3: rotate every key, restart the epoch clock, then pull server 1's
    // shuffle and insert the live records into the fresh bottom level.
    SecretKey ek_old = ek_;
    lk_.bytes = rng_.key32();
    tk_.bytes = rng_.key32();
    ek_.bytes = rng_.key32();
    ctr_ = 0;
    dummy_seq_ = 0;
    len_buffer_ = 1;
    std::fill(full_.begin(), full_.end(), 0);

    s_[1].send(encode_shuffle_pull_req());
    uint64_t live = 0;
    for (;;) {
        Frame f = s_[1].recv_any();
        if (f.type == MsgType::ShuffleEnd) break;
        if (f.type != MsgType::ShuffleItem)
            throw StreamMisalignment("unexpected frame in shuffle stream");
        ShuffleItemMsg item = decode_shuffle_item(f);
        ResidentGuard guard(stats_);
        Element e = open_or_throw(item.ct, ek_old);
        if (is_dummy_addr(e.addr))
            throw CountMismatch("dummy survived the live-only pass");
        insert_element(e, bottom);
        live += 1;
    }
    if (live != params_.n)
        throw CountMismatch("rebuilt " + std::to_string(live) +
                            " live elements, expected " +
                            std::to_string(params_.n));
    full_[bottom - params_.top_level] = 1;

    ClearMsg barrier{0xFF};
    s_[0].send(encode(barrier));
    s_[1].send(encode(barrier));
    report_refresh();
}

}  // namespace cforam
