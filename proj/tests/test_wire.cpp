#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cforam/dpf.hpp"
#include "cforam/errors.hpp"
#include "cforam/rng.hpp"
#include "cforam/wire.hpp"

using namespace cforam;

namespace {

Bytes some_bytes(size_t n, uint8_t start) {
    Bytes b(n);
    for (size_t i = 0; i < n; ++i) b[i] = uint8_t(start + i);
    return b;
}

Tag some_tag(uint8_t start) {
    Tag t;
    for (size_t i = 0; i < 16; ++i) t[i] = uint8_t(start + 3 * i);
    return t;
}

Bytes some_key(uint32_t point, uint32_t domain, uint8_t party) {
    Rng rng(42, point);
    auto [k0, k1] = dpf_gen(point, domain, rng);
    return dpf_serialize(party == 0 ? k0 : k1);
}

}  // namespace

TEST_CASE("frame encoding carries the header and payload verbatim") {
    Frame f{MsgType::Append, some_bytes(9, 0x30)};
    Bytes enc = frame_encode(f);
    REQUIRE(enc.size() == kFrameHeaderLen + 9);
    CHECK(load_le32(enc.data()) == 9);
    CHECK(enc[4] == uint8_t(MsgType::Append));
    CHECK(Bytes(enc.begin() + 5, enc.end()) == f.payload);
}

TEST_CASE("hello round-trips") {
    HelloMsg m;
    m.role = 1;
    m.latency_us = 12345;
    m.n = uint64_t(1) << 20;
    m.block_bytes = 4096;
    Frame f = encode(m);
    REQUIRE(f.payload.size() == 18);
    HelloMsg d = decode_hello(f);
    CHECK(d.role == m.role);
    CHECK(d.version == kProtocolVersion);
    CHECK(d.latency_us == m.latency_us);
    CHECK(d.n == m.n);
    CHECK(d.block_bytes == m.block_bytes);
}

TEST_CASE("insert round-trips and infers the ciphertext width") {
    InsertMsg m;
    m.ct = some_bytes(76, 0x11);
    m.tag_share = some_tag(0x40);
    m.pos0 = 7;
    m.pos1 = 1022;
    m.base_pos0 = 3;
    m.base_pos1 = 555;
    m.target_level = 10;
    InsertMsg d = decode_insert(encode(m));
    CHECK(d.ct == m.ct);
    CHECK(d.tag_share == m.tag_share);
    CHECK(d.pos0 == m.pos0);
    CHECK(d.pos1 == m.pos1);
    CHECK(d.base_pos0 == m.base_pos0);
    CHECK(d.base_pos1 == m.base_pos1);
    CHECK(d.target_level == m.target_level);
}

TEST_CASE("scan messages round-trip") {
    CHECK(decode_scan_req(encode(ScanReqMsg{1})).region == 1);
    ScanItemMsg item{some_bytes(68, 0x90)};
    CHECK(decode_scan_item(encode(item)).ct == item.ct);
    CHECK(encode_scan_end().type == MsgType::ScanEnd);
    CHECK(encode_scan_end().payload.empty());
}

TEST_CASE("point-function queries round-trip with self-delimiting keys") {
    PirReadMsg r;
    r.level = 9;
    r.table = 1;
    r.key = some_key(17, 1024, 0);
    PirReadMsg dr = decode_pir_read(encode(r));
    CHECK(dr.level == 9);
    CHECK(dr.table == 1);
    CHECK(dr.key == r.key);

    PirWriteMsg w;
    w.target = uint8_t(TagTarget::LevelTags1);
    w.level = 8;
    w.key = some_key(3, 512, 1);
    w.delta = some_bytes(16, 0x77);
    PirWriteMsg dw = decode_pir_write(encode(w));
    CHECK(dw.target == w.target);
    CHECK(dw.level == w.level);
    CHECK(dw.key == w.key);
    CHECK(dw.delta == w.delta);

    PirReadRespMsg resp{some_bytes(68, 0x05)};
    CHECK(decode_pir_read_resp(encode(resp)).block == resp.block);
}

TEST_CASE("append round-trips") {
    AppendMsg m;
    m.ct = some_bytes(44, 0x21);
    m.tag_share = some_tag(0x60);
    AppendMsg d = decode_append(encode(m));
    CHECK(d.ct == m.ct);
    CHECK(d.tag_share == m.tag_share);
}

TEST_CASE("rebuild stream messages round-trip") {
    RebuildPullMsg p{11, 1};
    RebuildPullMsg dp = decode_rebuild_pull(encode(p));
    CHECK(dp.target_level == 11);
    CHECK(dp.include_mid == 1);

    RebItemMsg with_ct;
    with_ct.has_ct = true;
    with_ct.ct = some_bytes(52, 0x13);
    with_ct.tag_share = some_tag(0x01);
    RebItemMsg d1 = decode_reb_item(encode(with_ct));
    CHECK(d1.has_ct);
    CHECK(d1.ct == with_ct.ct);
    CHECK(d1.tag_share == with_ct.tag_share);

    RebItemMsg tag_only;
    tag_only.has_ct = false;
    tag_only.tag_share = some_tag(0x0A);
    RebItemMsg d2 = decode_reb_item(encode(tag_only));
    CHECK(!d2.has_ct);
    CHECK(d2.ct.empty());
    CHECK(d2.tag_share == tag_only.tag_share);

    CHECK(decode_reb_end(encode(RebEndMsg{90210})).count == 90210);
    CHECK(decode_clear(encode(ClearMsg{0xFF})).range == 0xFF);
}

TEST_CASE("shuffle messages round-trip") {
    ShufflePushMsg push{some_bytes(40, 0x55)};
    CHECK(decode_shuffle_push(encode(push)).ct == push.ct);
    ShuffleItemMsg item{some_bytes(40, 0x66)};
    CHECK(decode_shuffle_item(encode(item)).ct == item.ct);
    CHECK(encode_shuffle_pull_req().type == MsgType::ShufflePullReq);
    CHECK(encode_shuffle_end().type == MsgType::ShuffleEnd);
}

TEST_CASE("vector read and write messages round-trip") {
    OpReadInitMsg init;
    init.key0 = some_key(100, 2048, 0);
    init.key1 = some_key(200, 2048, 1);
    OpReadInitMsg di = decode_op_read_init(encode(init));
    CHECK(di.key0 == init.key0);
    CHECK(di.key1 == init.key1);

    OpReadLevelMsg lvl{9, 77, 901};
    OpReadLevelMsg dl = decode_op_read_level(encode(lvl));
    CHECK(dl.level == 9);
    CHECK(dl.offset0 == 77);
    CHECK(dl.offset1 == 901);

    OpReadRespMsg resp{some_bytes(68, 1), some_bytes(68, 2)};
    OpReadRespMsg dr = decode_op_read_resp(encode(resp));
    CHECK(dr.r0 == resp.r0);
    CHECK(dr.r1 == resp.r1);

    OpWriteMsg w;
    w.key = some_key(4000, 8192, 0);
    w.mask = some_tag(0x7C);
    OpWriteMsg dw = decode_op_write(encode(w));
    CHECK(dw.key == w.key);
    CHECK(dw.mask == w.mask);
}

TEST_CASE("report and error round-trip") {
    ReportMsg r{1, 17};
    ReportMsg dr = decode_report(encode(r));
    CHECK(dr.top_full == 1);
    CHECK(dr.stash_len == 17);
    CHECK(decode_error(encode(ErrorMsg{uint16_t(ErrCode::Busy)})).code ==
          uint16_t(ErrCode::Busy));
}

TEST_CASE("decoders reject truncated and oversized payloads") {
    // Truncation below the fixed tail.
    Frame hello = encode(HelloMsg{});
    hello.payload.pop_back();
    CHECK_THROWS_AS(decode_hello(hello), MalformedFrame);

    // Trailing garbage.
    Frame report = encode(ReportMsg{});
    report.payload.push_back(0);
    CHECK_THROWS_AS(decode_report(report), MalformedFrame);

    // Insert too short to hold a ciphertext at all.
    Frame ins{MsgType::Insert, some_bytes(33, 0)};
    CHECK_THROWS_AS(decode_insert(ins), MalformedFrame);

    // Key truncated mid-way: the declared domain demands more bytes.
    PirReadMsg r;
    r.level = 9;
    r.table = 0;
    r.key = some_key(17, 1024, 0);
    Frame rf = encode(r);
    rf.payload.resize(rf.payload.size() / 2);
    CHECK_THROWS_AS(decode_pir_read(rf), MalformedFrame);

    // Odd-length vector response cannot be split into equal halves.
    Frame odd{MsgType::OpReadResp, some_bytes(7, 0)};
    CHECK_THROWS_AS(decode_op_read_resp(odd), MalformedFrame);

    // ERROR payload must be exactly two bytes.
    Frame err{MsgType::Error, some_bytes(1, 0)};
    CHECK_THROWS_AS(decode_error(err), MalformedFrame);
}

TEST_CASE("frames above the cap are refused before hitting any transport") {
    Frame f{MsgType::Append, Bytes(size_t(kMaxPayloadLen) + 1, 0)};
    CHECK_THROWS_AS(frame_encode(f), LengthOverflow);
}

TEST_CASE("decoders validate enum-like fields") {
    Frame f = encode(ScanReqMsg{0});
    f.payload[0] = 2;
    CHECK_THROWS_AS(decode_scan_req(f), MalformedFrame);

    HelloMsg hm;
    hm.role = 1;
    Frame h = encode(hm);
    h.payload[0] = 9;
    CHECK_THROWS_AS(decode_hello(h), MalformedFrame);

    PirWriteMsg w;
    w.target = 4;  // outside the tag-target catalog
    w.level = 8;
    w.key = some_key(3, 512, 1);
    w.delta = some_bytes(16, 0x77);
    CHECK_THROWS_AS(decode_pir_write(encode(w)), MalformedFrame);
}

TEST_CASE("message type catalog is dense and named") {
    for (uint8_t t = 0x01; t <= 0x17; ++t) {
        CHECK(msg_type_known(t));
        CHECK(std::string(msg_type_name(MsgType(t))) != "UNKNOWN");
    }
    CHECK(!msg_type_known(0x00));
    CHECK(!msg_type_known(0x18));
    CHECK(!msg_type_known(0xFF));
}
