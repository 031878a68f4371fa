#include "cforam/wire.hpp"

#include <cstring>

#include "cforam/errors.hpp"

namespace cforam {

namespace {

void require(bool ok, const char* what) {
    if (!ok) throw MalformedFrame(what);
}

/// Forward cursor over a payload; every read is bounds-checked.
struct Reader {
    const Bytes& buf;
    size_t off = 0;

    size_t remaining() const { return buf.size() - off; }

    uint8_t u8() {
        require(remaining() >= 1, "payload underflow (u8)");
        return buf[off++];
    }
    uint16_t u16() {
        require(remaining() >= 2, "payload underflow (u16)");
        uint16_t v = uint16_t(buf[off]) | uint16_t(buf[off + 1]) << 8;
        off += 2;
        return v;
    }
    uint32_t u32() {
        require(remaining() >= 4, "payload underflow (u32)");
        uint32_t v = load_le32(buf.data() + off);
        off += 4;
        return v;
    }
    uint64_t u64() {
        require(remaining() >= 8, "payload underflow (u64)");
        uint64_t v = load_le64(buf.data() + off);
        off += 8;
        return v;
    }
    Bytes take(size_t n) {
        require(remaining() >= n, "payload underflow (bytes)");
        Bytes out(buf.begin() + long(off), buf.begin() + long(off + n));
        off += n;
        return out;
    }
    Tag tag16() {
        require(remaining() >= 16, "payload underflow (tag)");
        Tag t;
        std::memcpy(t.data(), buf.data() + off, 16);
        off += 16;
        return t;
    }
    Bytes rest() { return take(remaining()); }

    /// A serialized point-function key embeds its own domain, which fixes
    /// its total length; consume exactly that many bytes.
    Bytes dpf_key() {
        require(remaining() >= kDpfHeaderLen, "short point-function key");
        uint32_t domain = load_le32(buf.data() + off + 1);
        require(domain >= 1, "point-function key with empty domain");
        size_t len = dpf_serialized_size(domain);
        return take(len);
    }

    void done() { require(off == buf.size(), "trailing bytes in payload"); }
};

void append_u16(Bytes& out, uint16_t v) {
    out.push_back(uint8_t(v & 0xFF));
    out.push_back(uint8_t(v >> 8));
}

void append_tag(Bytes& out, const Tag& t) { out.insert(out.end(), t.begin(), t.end()); }

void append_bytes(Bytes& out, const Bytes& b) { out.insert(out.end(), b.begin(), b.end()); }

Frame make_frame(MsgType t, Bytes payload) {
    if (payload.size() > kMaxPayloadLen) throw LengthOverflow("payload exceeds frame cap");
    return Frame{t, std::move(payload)};
}

void expect_type(const Frame& f, MsgType t) {
    if (f.type != t) throw MalformedFrame("frame type does not match decoder");
}

}  // namespace

bool msg_type_known(uint8_t t) {
    return t >= uint8_t(MsgType::Hello) && t <= uint8_t(MsgType::Error);
}

const char* msg_type_name(MsgType t) {
    switch (t) {
        case MsgType::Hello: return "HELLO";
        case MsgType::Insert: return "INSERT";
        case MsgType::ScanReq: return "SCAN_REQ";
        case MsgType::ScanItem: return "SCAN_ITEM";
        case MsgType::ScanEnd: return "SCAN_END";
        case MsgType::PirRead: return "PIR_READ";
        case MsgType::PirReadResp: return "PIR_READ_RESP";
        case MsgType::PirWrite: return "PIR_WRITE";
        case MsgType::Append: return "APPEND";
        case MsgType::RebuildPull: return "REBUILD_PULL";
        case MsgType::RebItem: return "REB_ITEM";
        case MsgType::RebEnd: return "REB_END";
        case MsgType::Clear: return "CLEAR";
        case MsgType::ShufflePush: return "SHUFFLE_PUSH";
        case MsgType::ShufflePullReq: return "SHUFFLE_PULL_REQ";
        case MsgType::ShuffleItem: return "SHUFFLE_ITEM";
        case MsgType::ShuffleEnd: return "SHUFFLE_END";
        case MsgType::OpReadInit: return "OPREAD_INIT";
        case MsgType::OpReadLevel: return "OPREAD_LEVEL";
        case MsgType::OpReadResp: return "OPREAD_RESP";
        case MsgType::OpWrite: return "OPWRITE";
        case MsgType::Report: return "REPORT";
        case MsgType::Error: return "ERROR";
    }
    return "UNKNOWN";
}

Bytes frame_encode(const Frame& f) {
    if (f.payload.size() > kMaxPayloadLen) throw LengthOverflow("payload exceeds frame cap");
    Bytes out(kFrameHeaderLen + f.payload.size());
    store_le32(out.data(), uint32_t(f.payload.size()));
    out[4] = uint8_t(f.type);
    if (!f.payload.empty())
        std::memcpy(out.data() + kFrameHeaderLen, f.payload.data(),
                    f.payload.size());
    return out;
}

// ---------------------------------------------------------------------------
// HELLO: role u8 | version u8 | latency_us u32 | n u64 | block_bytes u32
// ---------------------------------------------------------------------------

Frame encode(const HelloMsg& m) {
    Bytes p;
    p.push_back(m.role);
    p.push_back(m.version);
    append_le32(p, m.latency_us);
    append_le64(p, m.n);
    append_le32(p, m.block_bytes);
    return make_frame(MsgType::Hello, std::move(p));
}

HelloMsg decode_hello(const Frame& f) {
    expect_type(f, MsgType::Hello);
    Reader r{f.payload};
    HelloMsg m;
    m.role = r.u8();
    m.version = r.u8();
    m.latency_us = r.u32();
    m.n = r.u64();
    m.block_bytes = r.u32();
    r.done();
    require(m.role <= 1, "role out of range");
    return m;
}

// ---------------------------------------------------------------------------
// INSERT: ct | tag 16 | pos0 u32 | pos1 u32 | base_pos0 u32 | base_pos1 u32 |
//         target_level u8   (ct width inferred from the payload size)
// ---------------------------------------------------------------------------

Frame encode(const InsertMsg& m) {
    Bytes p;
    p.reserve(m.ct.size() + 33);
    append_bytes(p, m.ct);
    append_tag(p, m.tag_share);
    append_le32(p, m.pos0);
    append_le32(p, m.pos1);
    append_le32(p, m.base_pos0);
    append_le32(p, m.base_pos1);
    p.push_back(m.target_level);
    return make_frame(MsgType::Insert, std::move(p));
}

InsertMsg decode_insert(const Frame& f) {
    expect_type(f, MsgType::Insert);
    constexpr size_t kTail = 16 + 16 + 1;
    require(f.payload.size() > kTail, "insert payload too short");
    Reader r{f.payload};
    InsertMsg m;
    m.ct = r.take(f.payload.size() - kTail);
    m.tag_share = r.tag16();
    m.pos0 = r.u32();
    m.pos1 = r.u32();
    m.base_pos0 = r.u32();
    m.base_pos1 = r.u32();
    m.target_level = r.u8();
    r.done();
    return m;
}

// ---------------------------------------------------------------------------
// SCAN_REQ: region u8.  SCAN_ITEM: ct.  SCAN_END: empty.
// ---------------------------------------------------------------------------

Frame encode(const ScanReqMsg& m) {
    return make_frame(MsgType::ScanReq, Bytes{m.region});
}

ScanReqMsg decode_scan_req(const Frame& f) {
    expect_type(f, MsgType::ScanReq);
    Reader r{f.payload};
    ScanReqMsg m;
    m.region = r.u8();
    r.done();
    require(m.region <= 1, "scan region out of range");
    return m;
}

Frame encode(const ScanItemMsg& m) {
    return make_frame(MsgType::ScanItem, m.ct);
}

ScanItemMsg decode_scan_item(const Frame& f) {
    expect_type(f, MsgType::ScanItem);
    require(!f.payload.empty(), "empty scan item");
    return ScanItemMsg{f.payload};
}

Frame encode_scan_end() { return Frame{MsgType::ScanEnd, {}}; }

// ---------------------------------------------------------------------------
// PIR_READ: level u8 | table u8 | key.  RESP: block.
// ---------------------------------------------------------------------------

Frame encode(const PirReadMsg& m) {
    Bytes p;
    p.reserve(2 + m.key.size());
    p.push_back(m.level);
    p.push_back(m.table);
    append_bytes(p, m.key);
    return make_frame(MsgType::PirRead, std::move(p));
}

PirReadMsg decode_pir_read(const Frame& f) {
    expect_type(f, MsgType::PirRead);
    Reader r{f.payload};
    PirReadMsg m;
    m.level = r.u8();
    m.table = r.u8();
    m.key = r.dpf_key();
    r.done();
    require(m.table <= 1, "table index out of range");
    return m;
}

Frame encode(const PirReadRespMsg& m) {
    return make_frame(MsgType::PirReadResp, m.block);
}

PirReadRespMsg decode_pir_read_resp(const Frame& f) {
    expect_type(f, MsgType::PirReadResp);
    require(!f.payload.empty(), "empty read response");
    return PirReadRespMsg{f.payload};
}

// ---------------------------------------------------------------------------
// PIR_WRITE: target u8 | level u8 | key | delta (rest)
// ---------------------------------------------------------------------------

Frame encode(const PirWriteMsg& m) {
    Bytes p;
    p.reserve(2 + m.key.size() + m.delta.size());
    p.push_back(m.target);
    p.push_back(m.level);
    append_bytes(p, m.key);
    append_bytes(p, m.delta);
    return make_frame(MsgType::PirWrite, std::move(p));
}

PirWriteMsg decode_pir_write(const Frame& f) {
    expect_type(f, MsgType::PirWrite);
    Reader r{f.payload};
    PirWriteMsg m;
    m.target = r.u8();
    m.level = r.u8();
    m.key = r.dpf_key();
    m.delta = r.rest();
    require(m.target <= uint8_t(TagTarget::LevelTags1), "unknown write target");
    require(!m.delta.empty(), "empty write delta");
    return m;
}

// ---------------------------------------------------------------------------
// APPEND: ct | tag 16
// ---------------------------------------------------------------------------

Frame encode(const AppendMsg& m) {
    Bytes p;
    p.reserve(m.ct.size() + 16);
    append_bytes(p, m.ct);
    append_tag(p, m.tag_share);
    return make_frame(MsgType::Append, std::move(p));
}

AppendMsg decode_append(const Frame& f) {
    expect_type(f, MsgType::Append);
    require(f.payload.size() > 16, "append payload too short");
    Reader r{f.payload};
    AppendMsg m;
    m.ct = r.take(f.payload.size() - 16);
    m.tag_share = r.tag16();
    r.done();
    return m;
}

// ---------------------------------------------------------------------------
// REBUILD_PULL: target_level u8 | include_mid u8
// REB_ITEM: has_ct u8 | [ct] | tag 16      REB_END: count u32
// ---------------------------------------------------------------------------

Frame encode(const RebuildPullMsg& m) {
    return make_frame(MsgType::RebuildPull, Bytes{m.target_level, m.include_mid});
}

RebuildPullMsg decode_rebuild_pull(const Frame& f) {
    expect_type(f, MsgType::RebuildPull);
    Reader r{f.payload};
    RebuildPullMsg m;
    m.target_level = r.u8();
    m.include_mid = r.u8();
    r.done();
    require(m.include_mid <= 1, "include_mid out of range");
    return m;
}

Frame encode(const RebItemMsg& m) {
    Bytes p;
    p.reserve(1 + m.ct.size() + 16);
    p.push_back(m.has_ct ? 1 : 0);
    if (m.has_ct) append_bytes(p, m.ct);
    append_tag(p, m.tag_share);
    return make_frame(MsgType::RebItem, std::move(p));
}

RebItemMsg decode_reb_item(const Frame& f) {
    expect_type(f, MsgType::RebItem);
    Reader r{f.payload};
    RebItemMsg m;
    uint8_t has = r.u8();
    require(has <= 1, "has_ct flag out of range");
    m.has_ct = has == 1;
    if (m.has_ct) {
        require(f.payload.size() > 1 + 16, "item payload too short for ciphertext");
        m.ct = r.take(f.payload.size() - 1 - 16);
    }
    m.tag_share = r.tag16();
    r.done();
    return m;
}

Frame encode(const RebEndMsg& m) {
    Bytes p;
    append_le32(p, m.count);
    return make_frame(MsgType::RebEnd, std::move(p));
}

RebEndMsg decode_reb_end(const Frame& f) {
    expect_type(f, MsgType::RebEnd);
    Reader r{f.payload};
    RebEndMsg m;
    m.count = r.u32();
    r.done();
    return m;
}

// ---------------------------------------------------------------------------
// CLEAR: range u8 (level index, or 0xFF for everything)
// ---------------------------------------------------------------------------

Frame encode(const ClearMsg& m) {
    return make_frame(MsgType::Clear, Bytes{m.range});
}

ClearMsg decode_clear(const Frame& f) {
    expect_type(f, MsgType::Clear);
    Reader r{f.payload};
    ClearMsg m;
    m.range = r.u8();
    r.done();
    return m;
}

// ---------------------------------------------------------------------------
// SHUFFLE_*: push/item carry one ct; pull-req and end are empty.
// ---------------------------------------------------------------------------

Frame encode(const ShufflePushMsg& m) {
    require(!m.ct.empty(), "empty shuffle push");
    return make_frame(MsgType::ShufflePush, m.ct);
}

ShufflePushMsg decode_shuffle_push(const Frame& f) {
    expect_type(f, MsgType::ShufflePush);
    require(!f.payload.empty(), "empty shuffle push");
    return ShufflePushMsg{f.payload};
}

Frame encode_shuffle_pull_req() { return Frame{MsgType::ShufflePullReq, {}}; }

Frame encode(const ShuffleItemMsg& m) {
    require(!m.ct.empty(), "empty shuffle item");
    return make_frame(MsgType::ShuffleItem, m.ct);
}

ShuffleItemMsg decode_shuffle_item(const Frame& f) {
    expect_type(f, MsgType::ShuffleItem);
    require(!f.payload.empty(), "empty shuffle item");
    return ShuffleItemMsg{f.payload};
}

Frame encode_shuffle_end() { return Frame{MsgType::ShuffleEnd, {}}; }

// ---------------------------------------------------------------------------
// OPREAD_INIT: key0 | key1 (both self-delimiting)
// OPREAD_LEVEL: level u8 | offset0 u32 | offset1 u32
// OPREAD_RESP: r0 | r1 (equal halves)
// ---------------------------------------------------------------------------

Frame encode(const OpReadInitMsg& m) {
    Bytes p;
    p.reserve(m.key0.size() + m.key1.size());
    append_bytes(p, m.key0);
    append_bytes(p, m.key1);
    return make_frame(MsgType::OpReadInit, std::move(p));
}

OpReadInitMsg decode_op_read_init(const Frame& f) {
    expect_type(f, MsgType::OpReadInit);
    Reader r{f.payload};
    OpReadInitMsg m;
    m.key0 = r.dpf_key();
    m.key1 = r.dpf_key();
    r.done();
    return m;
}

Frame encode(const OpReadLevelMsg& m) {
    Bytes p;
    p.push_back(m.level);
    append_le32(p, m.offset0);
    append_le32(p, m.offset1);
    return make_frame(MsgType::OpReadLevel, std::move(p));
}

OpReadLevelMsg decode_op_read_level(const Frame& f) {
    expect_type(f, MsgType::OpReadLevel);
    Reader r{f.payload};
    OpReadLevelMsg m;
    m.level = r.u8();
    m.offset0 = r.u32();
    m.offset1 = r.u32();
    r.done();
    return m;
}

Frame encode(const OpReadRespMsg& m) {
    require(m.r0.size() == m.r1.size(), "response halves differ");
    Bytes p;
    p.reserve(m.r0.size() * 2);
    append_bytes(p, m.r0);
    append_bytes(p, m.r1);
    return make_frame(MsgType::OpReadResp, std::move(p));
}

OpReadRespMsg decode_op_read_resp(const Frame& f) {
    expect_type(f, MsgType::OpReadResp);
    require(!f.payload.empty() && f.payload.size() % 2 == 0,
            "response not two equal halves");
    Reader r{f.payload};
    OpReadRespMsg m;
    size_t half = f.payload.size() / 2;
    m.r0 = r.take(half);
    m.r1 = r.take(half);
    r.done();
    return m;
}

// ---------------------------------------------------------------------------
// OPWRITE: key | mask 16
// ---------------------------------------------------------------------------

Frame encode(const OpWriteMsg& m) {
    Bytes p;
    p.reserve(m.key.size() + 16);
    append_bytes(p, m.key);
    append_tag(p, m.mask);
    return make_frame(MsgType::OpWrite, std::move(p));
}

OpWriteMsg decode_op_write(const Frame& f) {
    expect_type(f, MsgType::OpWrite);
    Reader r{f.payload};
    OpWriteMsg m;
    m.key = r.dpf_key();
    m.mask = r.tag16();
    r.done();
    return m;
}

// ---------------------------------------------------------------------------
// REPORT: top_full u8 | stash_len u32.  ERROR: code u16.
// ---------------------------------------------------------------------------

Frame encode(const ReportMsg& m) {
    Bytes p;
    p.push_back(m.top_full);
    append_le32(p, m.stash_len);
    return make_frame(MsgType::Report, std::move(p));
}

ReportMsg decode_report(const Frame& f) {
    expect_type(f, MsgType::Report);
    Reader r{f.payload};
    ReportMsg m;
    m.top_full = r.u8();
    m.stash_len = r.u32();
    r.done();
    require(m.top_full <= 1, "occupancy flag out of range");
    return m;
}

Frame encode(const ErrorMsg& m) {
    Bytes p;
    append_u16(p, m.code);
    return make_frame(MsgType::Error, std::move(p));
}

ErrorMsg decode_error(const Frame& f) {
    expect_type(f, MsgType::Error);
    Reader r{f.payload};
    ErrorMsg m;
    m.code = r.u16();
    r.done();
    return m;
}

}  // namespace cforam
