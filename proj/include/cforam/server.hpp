#pragma once

#include <atomic>
#include <memory>
#include <optional>
#include <thread>
#include <vector>

#include "cforam/bitvec.hpp"
#include "cforam/channel.hpp"
#include "cforam/rng.hpp"
#include "cforam/store.hpp"
#include "cforam/wire.hpp"

namespace cforam {

// ============================================================================
// Server side: one session per connected client.
//
// The session is a strict in-order message-dispatch loop over the wire
// catalog, so replies always come back in request order.  Long reply streams
// (rebuild pulls, shuffle returns) cannot deadlock against concurrent client
// sends: every transport endpoint drains its inbound direction into an
// unbounded queue independently of this loop.
// ============================================================================

class ServerSession {
  public:
    struct Options {
        int role = 0;  ///< 0 = element-streaming side, 1 = tag-only side
        uint64_t shuffle_seed = 0;
        /// When set (daemon mode), HELLO must match this geometry.
        std::optional<Params> expected;
        /// Floor on the simulated inbound delay; the handshake can only
        /// raise the effective value above this, never lower it.
        uint32_t min_latency_us = 0;
    };

    ServerSession(Channel& channel, Options options);

    /// Serves until the peer disconnects.
    void run();

    /// Storage inspection for tests; null before the first HELLO.
    const ServerStore* store() const { return store_ ? &*store_ : nullptr; }

  private:
    void dispatch(const Frame& f);

    void on_hello(const Frame& f);
    void on_insert(const Frame& f);
    void on_scan_req(const Frame& f);
    void on_pir_read(const Frame& f);
    void on_pir_write(const Frame& f);
    void on_append(const Frame& f);
    void on_rebuild_pull(const Frame& f);
    void on_clear(const Frame& f);
    void on_shuffle_push(const Frame& f);
    void on_shuffle_pull(const Frame& f);
    void on_op_read_init(const Frame& f);
    void on_op_read_level(const Frame& f);
    void on_op_write(const Frame& f);
    void on_report(const Frame& f);

    ServerStore& need_store();
    BlockTable& tag_table(uint8_t target, uint8_t level);

    Channel& ch_;
    Options opts_;
    Rng shuffle_rng_;
    std::optional<ServerStore> store_;
    std::vector<Bytes> shuffle_staging_;
    // Cached share vectors between OPREAD_INIT and the per-level queries.
    BitVec opread_cache_[2];
    bool opread_ready_ = false;
};

// ----------------------------------------------------------------------------
// Harnesses
// ----------------------------------------------------------------------------

/// One in-process server: a session thread behind an in-memory channel.
class InprocServer {
  public:
    explicit InprocServer(ServerSession::Options options);
    ~InprocServer();

    InprocServer(const InprocServer&) = delete;
    InprocServer& operator=(const InprocServer&) = delete;

    Channel& client_channel() { return *client_end_; }
    const ServerSession& session() const { return *session_; }

    /// Closes the channel and joins the session thread.
    void stop();

  private:
    std::unique_ptr<Channel> client_end_;
    std::unique_ptr<Channel> server_end_;
    std::unique_ptr<ServerSession> session_;
    std::thread thread_;
    bool stopped_ = false;
};

/// TCP daemon: accepts one session at a time; a second concurrent client is
/// turned away with a Busy error.
class TcpServer {
  public:
    TcpServer(uint16_t port, ServerSession::Options options);
    ~TcpServer();

    TcpServer(const TcpServer&) = delete;
    TcpServer& operator=(const TcpServer&) = delete;

    uint16_t port() const { return listener_.port(); }

    /// Stops accepting; joins once the active session (if any) ends.
    void stop();

  private:
    void accept_loop();

    TcpListener listener_;
    ServerSession::Options opts_;
    std::thread accept_thread_;
    std::thread session_thread_;
    std::atomic<bool> session_active_{false};
    bool stopped_ = false;
};

}  // namespace cforam
