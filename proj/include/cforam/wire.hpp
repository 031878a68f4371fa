#pragma once

#include <cstdint>
#include <optional>

#include "cforam/bytes.hpp"
#include "cforam/crypto.hpp"
#include "cforam/dpf.hpp"
#include "cforam/params.hpp"

namespace cforam {

// ============================================================================
// Framed wire protocol.
//
// Every message is one frame: u32-LE payload length, u8 message type, payload.
// All integers little-endian.  Payloads are hard-capped so a corrupt length
// cannot balloon allocations.  Variable-width fields (ciphertexts, keys) are
// self-delimiting: point-function keys embed their domain, ciphertext widths
// follow from the session parameters, and fixed-width tails are parsed from
// the end of the payload.
// ============================================================================

inline constexpr size_t kFrameHeaderLen = 5;
inline constexpr uint32_t kMaxPayloadLen = uint32_t(1) << 24;
inline constexpr uint8_t kProtocolVersion = 0x01;

enum class MsgType : uint8_t {
    Hello = 0x01,
    Insert = 0x02,
    ScanReq = 0x03,
    ScanItem = 0x04,
    ScanEnd = 0x05,
    PirRead = 0x06,
    PirReadResp = 0x07,
    PirWrite = 0x08,
    Append = 0x09,
    RebuildPull = 0x0A,
    RebItem = 0x0B,
    RebEnd = 0x0C,
    Clear = 0x0D,
    ShufflePush = 0x0E,
    ShufflePullReq = 0x0F,
    ShuffleItem = 0x10,
    ShuffleEnd = 0x11,
    OpReadInit = 0x12,
    OpReadLevel = 0x13,
    OpReadResp = 0x14,
    OpWrite = 0x15,
    Report = 0x16,
    Error = 0x17,
};

bool msg_type_known(uint8_t t);
const char* msg_type_name(MsgType t);

struct Frame {
    MsgType type = MsgType::Error;
    Bytes payload;
};

/// Full frame, header included, ready for a byte stream.
Bytes frame_encode(const Frame& f);

// ----------------------------------------------------------------------------
// Message payloads
// ----------------------------------------------------------------------------

/// Session opener; the reply echoes the server's own role.
struct HelloMsg {
    uint8_t role = 0;  ///< 0 or 1
    uint8_t version = kProtocolVersion;
    uint32_t latency_us = 0;  ///< simulated one-way delay from here on
    uint64_t n = 0;
    uint32_t block_bytes = 0;
};

/// Element + this server's tag share + placement candidates.
struct InsertMsg {
    Bytes ct;
    Tag tag_share{};
    uint32_t pos0 = 0, pos1 = 0;        ///< candidates at target_level
    uint32_t base_pos0 = 0, base_pos1 = 0;  ///< fallback candidates, top level
    uint8_t target_level = 0;
};

/// Which scan region: 0 = buffer, 1 = stash.
struct ScanReqMsg {
    uint8_t region = 0;
};

struct ScanItemMsg {
    Bytes ct;
};

/// Read one table with a point-function key share.
struct PirReadMsg {
    uint8_t level = 0;
    uint8_t table = 0;
    Bytes key;
};

struct PirReadRespMsg {
    Bytes block;
};

/// Tag-area write targets.
enum class TagTarget : uint8_t {
    BufferTags = 0,
    StashTags = 1,
    LevelTags0 = 2,
    LevelTags1 = 3,
};

struct PirWriteMsg {
    uint8_t target = 0;  ///< TagTarget
    uint8_t level = 0;   ///< meaningful for LevelTags*
    Bytes key;
    Bytes delta;
};

/// Append one fresh element to the buffer (element + tag share).
struct AppendMsg {
    Bytes ct;
    Tag tag_share{};
};

/// Snapshot-and-clear the rebuild sources, then stream them back.
struct RebuildPullMsg {
    uint8_t target_level = 0;
    uint8_t include_mid = 0;  ///< also stream the filled middle levels
};

struct RebItemMsg {
    bool has_ct = false;  ///< element server sends ciphertexts; tag server not
    Bytes ct;
    Tag tag_share{};
};

struct RebEndMsg {
    uint32_t count = 0;
};

/// Post-rebuild barrier; 0xFF covers everything (bottom rebuild).
struct ClearMsg {
    uint8_t range = 0;
};

struct ShufflePushMsg {
    Bytes ct;
};

struct ShuffleItemMsg {
    Bytes ct;
};

/// Two read keys over the bottom table length, evaluated once per access.
struct OpReadInitMsg {
    Bytes key0;
    Bytes key1;
};

/// Per-level rotation offsets for the cached share vectors.
struct OpReadLevelMsg {
    uint8_t level = 0;
    uint32_t offset0 = 0;
    uint32_t offset1 = 0;
};

/// This server's two inner-product shares (table 0, table 1).
struct OpReadRespMsg {
    Bytes r0;
    Bytes r1;
};

/// One write key over four bottom-lengths plus the tag mask.
struct OpWriteMsg {
    Bytes key;
    Tag mask{};
};

/// Top-level occupancy report; the client sends a zeroed one as a poll.
struct ReportMsg {
    uint8_t top_full = 0;
    uint32_t stash_len = 1;  ///< slots in use including the reserved slot
};

struct ErrorMsg {
    uint16_t code = 0;
};

// Encoders produce a complete Frame; decoders throw MalformedFrame on any
// structural violation.  Decoders that need the element width take it as a
// parameter (`ctw`).

Frame encode(const HelloMsg&);
Frame encode(const InsertMsg&);
Frame encode(const ScanReqMsg&);
Frame encode(const ScanItemMsg&);
Frame encode_scan_end();
Frame encode(const PirReadMsg&);
Frame encode(const PirReadRespMsg&);
Frame encode(const PirWriteMsg&);
Frame encode(const AppendMsg&);
Frame encode(const RebuildPullMsg&);
Frame encode(const RebItemMsg&);
Frame encode(const RebEndMsg&);
Frame encode(const ClearMsg&);
Frame encode(const ShufflePushMsg&);
Frame encode_shuffle_pull_req();
Frame encode(const ShuffleItemMsg&);
Frame encode_shuffle_end();
Frame encode(const OpReadInitMsg&);
Frame encode(const OpReadLevelMsg&);
Frame encode(const OpReadRespMsg&);
Frame encode(const OpWriteMsg&);
Frame encode(const ReportMsg&);
Frame encode(const ErrorMsg&);

HelloMsg decode_hello(const Frame&);
InsertMsg decode_insert(const Frame&);
ScanReqMsg decode_scan_req(const Frame&);
ScanItemMsg decode_scan_item(const Frame&);
PirReadMsg decode_pir_read(const Frame&);
PirReadRespMsg decode_pir_read_resp(const Frame&);
PirWriteMsg decode_pir_write(const Frame&);
AppendMsg decode_append(const Frame&);
RebuildPullMsg decode_rebuild_pull(const Frame&);
RebItemMsg decode_reb_item(const Frame&);
RebEndMsg decode_reb_end(const Frame&);
ClearMsg decode_clear(const Frame&);
ShufflePushMsg decode_shuffle_push(const Frame&);
ShuffleItemMsg decode_shuffle_item(const Frame&);
OpReadInitMsg decode_op_read_init(const Frame&);
OpReadLevelMsg decode_op_read_level(const Frame&);
OpReadRespMsg decode_op_read_resp(const Frame&);
OpWriteMsg decode_op_write(const Frame&);
ReportMsg decode_report(const Frame&);
ErrorMsg decode_error(const Frame&);

}  // namespace cforam
