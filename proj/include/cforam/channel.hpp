#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <utility>

#include "cforam/wire.hpp"

namespace cforam {

// ============================================================================
// Frame transport.
//
// A Channel moves whole frames between one client endpoint and one server
// endpoint.  Both implementations deliver frames in order and support a
// simulated one-way delay: a frame becomes visible to the receiver only
// `latency_us` after it was enqueued, configured independently per endpoint
// (each endpoint delays its own inbound direction).
//
// recv() blocks; nullopt means the peer closed and everything was drained.
// try_recv() never blocks; nullopt means nothing is ready *yet*.
// ============================================================================

class Channel {
  public:
    virtual ~Channel() = default;

    virtual void send(const Frame& f) = 0;
    virtual std::optional<Frame> recv() = 0;
    virtual std::optional<Frame> try_recv() = 0;

    /// Delay applied to frames this endpoint receives from now on.
    virtual void set_latency(uint32_t us) = 0;

    virtual void close() = 0;
};

// ----------------------------------------------------------------------------
// In-process pair: two endpoints over two lock-protected queues.
// ----------------------------------------------------------------------------

namespace detail {

struct TimedFrame {
    Frame frame;
    std::chrono::steady_clock::time_point enqueued_at;
};

struct FrameQueue {
    std::mutex mu;
    std::condition_variable cv;
    std::deque<TimedFrame> frames;
    bool closed = false;

    void push(Frame f);
    void close();
    /// Blocking pop honoring the receiver's latency; nullopt on drained EOF.
    std::optional<Frame> pop(uint32_t latency_us);
    /// Non-blocking pop; nullopt when empty or the head is not ready yet.
    std::optional<Frame> try_pop(uint32_t latency_us);
};

}  // namespace detail

class InprocChannel final : public Channel {
  public:
    void send(const Frame& f) override;
    std::optional<Frame> recv() override;
    std::optional<Frame> try_recv() override;
    void set_latency(uint32_t us) override { latency_us_.store(us); }
    void close() override;

  private:
    friend std::pair<std::unique_ptr<Channel>, std::unique_ptr<Channel>>
    make_inproc_pair();

    std::shared_ptr<detail::FrameQueue> in_;
    std::shared_ptr<detail::FrameQueue> out_;
    std::atomic<uint32_t> latency_us_{0};
};

/// (client end, server end) over a fresh queue pair.
std::pair<std::unique_ptr<Channel>, std::unique_ptr<Channel>> make_inproc_pair();

// ----------------------------------------------------------------------------
// TCP: length-prefixed frames over a socket, with a reader thread that
// timestamps arrivals so latency simulation stays pipelined.
// ----------------------------------------------------------------------------

class TcpChannel final : public Channel {
  public:
    explicit TcpChannel(int fd);
    ~TcpChannel() override;

    TcpChannel(const TcpChannel&) = delete;
    TcpChannel& operator=(const TcpChannel&) = delete;

    void send(const Frame& f) override;
    std::optional<Frame> recv() override;
    std::optional<Frame> try_recv() override;
    void set_latency(uint32_t us) override { latency_us_.store(us); }
    void close() override;

  private:
    void reader_loop();
    void fail_stream(uint16_t code, std::string what);

    int fd_;
    std::thread reader_;
    detail::FrameQueue inbound_;
    std::mutex write_mu_;
    std::atomic<uint32_t> latency_us_{0};
    std::atomic<bool> closed_{false};

    // Set by the reader on a malformed stream; surfaced from recv().
    std::mutex err_mu_;
    uint16_t err_code_ = 0;
    std::string err_what_;
};

class TcpListener {
  public:
    /// Binds and listens on 127.0.0.1:port; port 0 picks an ephemeral port.
    explicit TcpListener(uint16_t port);
    ~TcpListener();

    TcpListener(const TcpListener&) = delete;
    TcpListener& operator=(const TcpListener&) = delete;

    uint16_t port() const { return port_; }

    /// Blocks for the next connection; nullptr once closed.
    std::unique_ptr<TcpChannel> accept();
    void close();

  private:
    int fd_ = -1;
    uint16_t port_ = 0;
};

std::unique_ptr<Channel> tcp_connect(const std::string& host, uint16_t port);

}  // namespace cforam
