#include "cforam/server.hpp"

#include <algorithm>
#include <utility>

#include "cforam/errors.hpp"
#include "cforam/pir.hpp"

namespace cforam {

ServerSession::ServerSession(Channel& channel, Options options)
    : ch_(channel),
      opts_(std::move(options)),
      shuffle_rng_(opts_.shuffle_seed, uint64_t(opts_.role) + 0x5348) {}

void ServerSession::run() {
    while (auto f = ch_.recv()) {
        try {
            dispatch(*f);
        } catch (const OramError& e) {
            ch_.send(encode(ErrorMsg{uint16_t(e.code())}));
        }
    }
}

void ServerSession::dispatch(const Frame& f) {
    if (!msg_type_known(uint8_t(f.type)))
        throw UnknownType("message type " + std::to_string(unsigned(f.type)));
    switch (f.type) {
        case MsgType::Hello: return on_hello(f);
        case MsgType::Insert: return on_insert(f);
        case MsgType::ScanReq: return on_scan_req(f);
        case MsgType::PirRead: return on_pir_read(f);
        case MsgType::PirWrite: return on_pir_write(f);
        case MsgType::Append: return on_append(f);
        case MsgType::RebuildPull: return on_rebuild_pull(f);
        case MsgType::Clear: return on_clear(f);
        case MsgType::ShufflePush: return on_shuffle_push(f);
        case MsgType::ShufflePullReq: return on_shuffle_pull(f);
        case MsgType::OpReadInit: return on_op_read_init(f);
        case MsgType::OpReadLevel: return on_op_read_level(f);
        case MsgType::OpWrite: return on_op_write(f);
        case MsgType::Report: return on_report(f);
        case MsgType::Error:
            return;  // peer-reported failure; nothing sensible to do
        default:
            throw BadRequest(std::string("unexpected ") +
                             msg_type_name(f.type) + " from client");
    }
}

ServerStore& ServerSession::need_store() {
    if (!store_) throw BadRequest("request before HELLO");
    return *store_;
}

// ---------------------------------------------------------------------------

void ServerSession::on_hello(const Frame& f) {
    HelloMsg m = decode_hello(f);
    if (m.version != kProtocolVersion)
        throw BadRequest("protocol version mismatch");
    if (int(m.role) != opts_.role)
        throw BadRequest("client addressed the wrong server role");
    Params params = Params::from_n(m.n, m.block_bytes);
    if (opts_.expected && !(params == *opts_.expected))
        throw BadRequest("geometry differs from the served configuration");

    // A fresh HELLO resets the whole session.
    store_.emplace(params);
    shuffle_staging_.clear();
    opread_ready_ = false;
    ch_.set_latency(std::max(m.latency_us, opts_.min_latency_us));

    HelloMsg reply;
    reply.role = uint8_t(opts_.role);
    reply.version = kProtocolVersion;
    reply.latency_us = m.latency_us;
    reply.n = params.n;
    reply.block_bytes = params.block_bytes;
    ch_.send(encode(reply));
}

void ServerSession::on_insert(const Frame& f) {
    InsertMsg m = decode_insert(f);
    ServerStore& st = need_store();
    SlotItem item;
    item.ct = std::move(m.ct);
    item.tag_share = m.tag_share;
    item.pos0 = m.pos0;
    item.pos1 = m.pos1;
    item.base_pos0 = m.base_pos0;
    item.base_pos1 = m.base_pos1;
    st.insert(std::move(item), m.target_level);
}

void ServerSession::on_scan_req(const Frame& f) {
    ScanReqMsg m = decode_scan_req(f);
    ServerStore& st = need_store();
    const BlockTable& elems =
        m.region == 0 ? st.buffer_elems() : st.stash_elems();
    uint32_t used = m.region == 0 ? st.buffer_len() : st.stash_len();
    // Newest first, so the client's first match is the freshest copy.
    for (uint32_t i = used; i-- > 1;) {
        ScanItemMsg item;
        item.ct.assign(elems.block(i), elems.block(i) + elems.width);
        ch_.send(encode(item));
    }
    ch_.send(encode_scan_end());
}

void ServerSession::on_pir_read(const Frame& f) {
    PirReadMsg m = decode_pir_read(f);
    ServerStore& st = need_store();
    DpfKey key = dpf_deserialize(m.key);
    const BlockTable& table = st.level(m.level).elems(m.table);
    PirReadRespMsg resp;
    resp.block = pir_read_answer(key, table);
    ch_.send(encode(resp));
}

BlockTable& ServerSession::tag_table(uint8_t target, uint8_t level) {
    ServerStore& st = need_store();
    switch (TagTarget(target)) {
        case TagTarget::BufferTags: return st.buffer_tags();
        case TagTarget::StashTags: return st.stash_tags();
        case TagTarget::LevelTags0: return st.level(level).tags(0);
        case TagTarget::LevelTags1: return st.level(level).tags(1);
    }
    throw BadRequest("unknown tag write target");
}

void ServerSession::on_pir_write(const Frame& f) {
    PirWriteMsg m = decode_pir_write(f);
    DpfKey key = dpf_deserialize(m.key);
    pir_write_apply(key, m.delta.data(), m.delta.size(),
                    tag_table(m.target, m.level));
}

void ServerSession::on_append(const Frame& f) {
    AppendMsg m = decode_append(f);
    need_store().buffer_append(m.ct, m.tag_share);
}

void ServerSession::on_rebuild_pull(const Frame& f) {
    RebuildPullMsg m = decode_rebuild_pull(f);
    ServerStore& st = need_store();
    std::vector<StagedItem> staged =
        st.pull_and_clear(m.target_level, m.include_mid == 1);
    bool with_ct = opts_.role == 0;
    for (StagedItem& item : staged) {
        RebItemMsg out;
        out.has_ct = with_ct;
        if (with_ct) out.ct = std::move(item.ct);
        out.tag_share = item.tag_share;
        ch_.send(encode(out));
    }
    ch_.send(encode(RebEndMsg{uint32_t(staged.size())}));
}

void ServerSession::on_clear(const Frame& f) {
    ClearMsg m = decode_clear(f);
    ServerStore& st = need_store();
    // Sources were already wiped when they were pulled; this is the barrier
    // that drops any staging a rebuild left behind.
    if (m.range == 0xFF) {
        shuffle_staging_.clear();
    } else if (!st.level_in_range(m.range)) {
        throw IllegalPosition("clear of a level outside the hierarchy");
    }
}

void ServerSession::on_shuffle_push(const Frame& f) {
    ShufflePushMsg m = decode_shuffle_push(f);
    if (m.ct.size() != need_store().params().ct_width())
        throw DomainMismatch("staged ciphertext width");
    shuffle_staging_.push_back(std::move(m.ct));
}

void ServerSession::on_shuffle_pull(const Frame& f) {
    if (!f.payload.empty()) throw MalformedFrame("pull request carries bytes");
    need_store();
    // Fisher-Yates under the server's private randomness. The client never
    // learns the permutation; it only sees the re-ordered stream.
    for (size_t i = shuffle_staging_.size(); i > 1; --i) {
        size_t j = size_t(shuffle_rng_.below(uint64_t(i)));
        std::swap(shuffle_staging_[i - 1], shuffle_staging_[j]);
    }
    for (Bytes& ct : shuffle_staging_) {
        ch_.send(encode(ShuffleItemMsg{std::move(ct)}));
    }
    shuffle_staging_.clear();
    ch_.send(encode_shuffle_end());
}

void ServerSession::on_op_read_init(const Frame& f) {
    OpReadInitMsg m = decode_op_read_init(f);
    ServerStore& st = need_store();
    uint32_t bottom_len = st.params().table_len(st.params().bottom_level);
    DpfKey k0 = dpf_deserialize(m.key0);
    DpfKey k1 = dpf_deserialize(m.key1);
    if (k0.domain_size != bottom_len || k1.domain_size != bottom_len)
        throw DomainMismatch("read-vector domain is not the bottom length");
    opread_cache_[0] = dpf_eval_full(k0);
    opread_cache_[1] = dpf_eval_full(k1);
    opread_ready_ = true;
}

void ServerSession::on_op_read_level(const Frame& f) {
    OpReadLevelMsg m = decode_op_read_level(f);
    ServerStore& st = need_store();
    if (!opread_ready_) throw BadRequest("level query before vector init");
    if (m.level <= st.params().top_level || !st.level_in_range(m.level))
        throw IllegalPosition("level query outside the folded range");
    uint32_t len = st.params().table_len(m.level);
    if (m.offset0 >= len || m.offset1 >= len)
        throw IllegalPosition("rotation offset outside the level");
    OpReadRespMsg resp;
    BitVec w0 = opread_cache_[0].fold_to(len).rotate_left(m.offset0);
    resp.r0 = pir_inner_product(w0, st.level(m.level).elems(0));
    BitVec w1 = opread_cache_[1].fold_to(len).rotate_left(m.offset1);
    resp.r1 = pir_inner_product(w1, st.level(m.level).elems(1));
    ch_.send(encode(resp));
}

void ServerSession::on_op_write(const Frame& f) {
    OpWriteMsg m = decode_op_write(f);
    ServerStore& st = need_store();
    const Params& params = st.params();
    uint32_t bottom_len = params.table_len(params.bottom_level);
    DpfKey key = dpf_deserialize(m.key);
    if (key.domain_size != uint64_t(4) * bottom_len)
        throw DomainMismatch("write-vector domain is not four bottom lengths");
    BitVec all = dpf_eval_full(key);
    BitVec half[2] = {all.slice(0, size_t(2) * bottom_len),
                      all.slice(size_t(2) * bottom_len, size_t(2) * bottom_len)};
    // Every level below the top takes the same mask; the shifted windows are
    // disjoint across levels, so only the addressed slot (if any) changes
    // once the two servers' tag shares are recombined.
    for (uint32_t lvl = params.top_level + 1; lvl <= params.bottom_level;
         ++lvl) {
        uint32_t len = params.table_len(lvl);
        for (int t = 0; t < 2; ++t) {
            BitVec w = half[t].rotate_left(len);
            pir_apply_windowed(w, m.mask.data(), 16, st.level(lvl).tags(t), len);
        }
    }
}

void ServerSession::on_report(const Frame& f) {
    decode_report(f);  // validate shape; request fields are a poll
    ServerStore& st = need_store();
    ReportMsg out;
    out.top_full = st.level(st.params().top_level).empty() ? 0 : 1;
    out.stash_len = st.stash_len();
    ch_.send(encode(out));
}

// ----------------------------------------------------------------------------
// InprocServer
// ----------------------------------------------------------------------------

InprocServer::InprocServer(ServerSession::Options options) {
    auto [client_end, server_end] = make_inproc_pair();
    client_end_ = std::move(client_end);
    server_end_ = std::move(server_end);
    session_ = std::make_unique<ServerSession>(*server_end_, std::move(options));
    thread_ = std::thread([this] { session_->run(); });
}

InprocServer::~InprocServer() { stop(); }

void InprocServer::stop() {
    if (stopped_) return;
    stopped_ = true;
    client_end_->close();
    server_end_->close();
    if (thread_.joinable()) thread_.join();
}

// ----------------------------------------------------------------------------
// TcpServer
// ----------------------------------------------------------------------------

TcpServer::TcpServer(uint16_t port, ServerSession::Options options)
    : listener_(port), opts_(std::move(options)) {
    accept_thread_ = std::thread([this] { accept_loop(); });
}

TcpServer::~TcpServer() { stop(); }

void TcpServer::accept_loop() {
    while (auto ch = listener_.accept()) {
        if (session_active_.exchange(true)) {
            // One client at a time; turn the newcomer away politely.
            try {
                ch->send(encode(ErrorMsg{uint16_t(ErrCode::Busy)}));
            } catch (const OramError&) {
            }
            ch->close();
            continue;
        }
        if (session_thread_.joinable()) session_thread_.join();
        auto* channel = ch.release();
        session_thread_ = std::thread([this, channel] {
            std::unique_ptr<TcpChannel> owned(channel);
            owned->set_latency(opts_.min_latency_us);
            try {
                ServerSession session(*owned, opts_);
                session.run();
            } catch (const OramError&) {
                // transport-level failure; drop the connection
            }
            owned->close();
            session_active_.store(false);
        });
    }
}

void TcpServer::stop() {
    if (stopped_) return;
    stopped_ = true;
    listener_.close();
    if (accept_thread_.joinable()) accept_thread_.join();
    if (session_thread_.joinable()) session_thread_.join();
}

}  // namespace cforam
