#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace cforam {

// ============================================================================
// Error hierarchy
//
// Every failure mode that can cross a module boundary has a dedicated type so
// callers can react precisely; the wire layer maps each type to a stable
// numeric code carried inside ERROR frames.
// ============================================================================

/// Numeric identifiers carried in ERROR frames (u16, little-endian).
enum class ErrCode : uint16_t {
    None = 0,
    MalformedFrame = 1,
    UnknownType = 2,
    LengthOverflow = 3,
    StashOverflow = 4,
    DomainMismatch = 5,
    IndexOutOfDomain = 6,
    IllegalPosition = 7,
    StreamMisalignment = 8,
    CountMismatch = 9,
    ServerDisagreement = 10,
    AuthFailure = 11,
    UnsupportedN = 12,
    Busy = 13,
    BadRequest = 14,
    Internal = 15,
};

class OramError : public std::runtime_error {
  public:
    OramError(ErrCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}
    ErrCode code() const { return code_; }

  private:
    ErrCode code_;
};

#define CFORAM_DEFINE_ERROR(NAME)                                        \
    class NAME : public OramError {                                      \
      public:                                                            \
        explicit NAME(const std::string& what)                           \
            : OramError(ErrCode::NAME, std::string(#NAME ": ") + what) {} \
    }

/// A frame failed structural validation (short header, bad layout).
CFORAM_DEFINE_ERROR(MalformedFrame);
/// A frame carried a message type outside the catalog.
CFORAM_DEFINE_ERROR(UnknownType);
/// A frame declared a payload longer than the hard wire limit.
CFORAM_DEFINE_ERROR(LengthOverflow);
/// The bounded-eviction stash exceeded its capacity.
CFORAM_DEFINE_ERROR(StashOverflow);
/// A point-function key was evaluated against a table of a different size.
CFORAM_DEFINE_ERROR(DomainMismatch);
/// A point index lies outside the key's domain.
CFORAM_DEFINE_ERROR(IndexOutOfDomain);
/// A table position was zero (reserved) or past the end of the table.
CFORAM_DEFINE_ERROR(IllegalPosition);
/// Two server streams that must advance in lockstep diverged.
CFORAM_DEFINE_ERROR(StreamMisalignment);
/// A rebuild saw a different number of live elements than expected.
CFORAM_DEFINE_ERROR(CountMismatch);
/// Combined replies from the two servers failed to authenticate.
CFORAM_DEFINE_ERROR(ServerDisagreement);
/// A ciphertext failed authenticated decryption.
CFORAM_DEFINE_ERROR(AuthFailure);
/// The requested capacity is outside the supported range.
CFORAM_DEFINE_ERROR(UnsupportedN);
/// The server already has an active client session.
CFORAM_DEFINE_ERROR(Busy);
/// A structurally valid request was semantically invalid in this state.
CFORAM_DEFINE_ERROR(BadRequest);
/// Invariant violation inside a peer; not recoverable by the client.
CFORAM_DEFINE_ERROR(Internal);

#undef CFORAM_DEFINE_ERROR

/// Oracle replay found a divergence between the store and the reference map.
class MismatchAt : public OramError {
  public:
    MismatchAt(uint64_t op_index, const std::string& what)
        : OramError(ErrCode::Internal,
                    "MismatchAt op " + std::to_string(op_index) + ": " + what),
          op_index_(op_index) {}
    uint64_t op_index() const { return op_index_; }

  private:
    uint64_t op_index_;
};

/// Rebuilds a typed exception from a wire error code.
[[noreturn]] void throw_wire_error(uint16_t code, const std::string& context);

}  // namespace cforam
