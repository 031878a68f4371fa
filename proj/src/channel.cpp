#include "cforam/channel.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include "cforam/errors.hpp"

namespace cforam {

namespace detail {

void FrameQueue::push(Frame f) {
    {
        std::lock_guard<std::mutex> lk(mu);
        if (closed) return;  // receiver is gone; drop
        frames.push_back({std::move(f), std::chrono::steady_clock::now()});
    }
    cv.notify_all();
}

void FrameQueue::close() {
    {
        std::lock_guard<std::mutex> lk(mu);
        closed = true;
    }
    cv.notify_all();
}

std::optional<Frame> FrameQueue::pop(uint32_t latency_us) {
    std::unique_lock<std::mutex> lk(mu);
    for (;;) {
        if (!frames.empty()) {
            auto ready = frames.front().enqueued_at +
                         std::chrono::microseconds(latency_us);
            if (ready <= std::chrono::steady_clock::now()) {
                Frame f = std::move(frames.front().frame);
                frames.pop_front();
                return f;
            }
            cv.wait_until(lk, ready);
        } else if (closed) {
            return std::nullopt;
        } else {
            cv.wait(lk);
        }
    }
}

std::optional<Frame> FrameQueue::try_pop(uint32_t latency_us) {
    std::lock_guard<std::mutex> lk(mu);
    if (frames.empty()) return std::nullopt;
    auto ready =
        frames.front().enqueued_at + std::chrono::microseconds(latency_us);
    if (ready > std::chrono::steady_clock::now()) return std::nullopt;
    Frame f = std::move(frames.front().frame);
    frames.pop_front();
    return f;
}

}  // namespace detail

// ----------------------------------------------------------------------------
// InprocChannel
// ----------------------------------------------------------------------------

void InprocChannel::send(const Frame& f) {
    if (f.payload.size() > kMaxPayloadLen)
        throw LengthOverflow("payload exceeds frame cap");
    out_->push(f);
}

std::optional<Frame> InprocChannel::recv() { return in_->pop(latency_us_.load()); }

std::optional<Frame> InprocChannel::try_recv() {
    return in_->try_pop(latency_us_.load());
}

void InprocChannel::close() {
    out_->close();
    in_->close();
}

std::pair<std::unique_ptr<Channel>, std::unique_ptr<Channel>> make_inproc_pair() {
    auto a = std::make_shared<detail::FrameQueue>();
    auto b = std::make_shared<detail::FrameQueue>();
    auto client = std::make_unique<InprocChannel>();
    auto server = std::make_unique<InprocChannel>();
    client->in_ = a;
    client->out_ = b;
    server->in_ = b;
    server->out_ = a;
    return {std::move(client), std::move(server)};
}

// ----------------------------------------------------------------------------
// TcpChannel
// ----------------------------------------------------------------------------

namespace {

bool read_exact(int fd, uint8_t* dst, size_t n) {
    size_t got = 0;
    while (got < n) {
        ssize_t r = ::recv(fd, dst + got, n - got, 0);
        if (r == 0) return false;
        if (r < 0) {
            if (errno == EINTR) continue;
            return false;
        }
        got += size_t(r);
    }
    return true;
}

void write_all(int fd, const uint8_t* src, size_t n) {
    size_t put = 0;
    while (put < n) {
        ssize_t w = ::send(fd, src + put, n - put, MSG_NOSIGNAL);
        if (w < 0) {
            if (errno == EINTR) continue;
            throw Internal(std::string("socket write failed: ") +
                           std::strerror(errno));
        }
        put += size_t(w);
    }
}

void enable_nodelay(int fd) {
    int one = 1;
    ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
}

}  // namespace

TcpChannel::TcpChannel(int fd) : fd_(fd) {
    enable_nodelay(fd_);
    reader_ = std::thread([this] { reader_loop(); });
}

TcpChannel::~TcpChannel() { close(); }

void TcpChannel::fail_stream(uint16_t code, std::string what) {
    {
        std::lock_guard<std::mutex> lk(err_mu_);
        if (err_code_ == 0) {
            err_code_ = code;
            err_what_ = std::move(what);
        }
    }
    inbound_.close();
}

void TcpChannel::reader_loop() {
    for (;;) {
        uint8_t header[kFrameHeaderLen];
        if (!read_exact(fd_, header, sizeof(header))) {
            inbound_.close();
            return;
        }
        uint32_t len = load_le32(header);
        uint8_t type = header[4];
        if (len > kMaxPayloadLen) {
            fail_stream(uint16_t(ErrCode::LengthOverflow),
                        "frame length exceeds cap");
            return;
        }
        Frame f;
        f.type = MsgType(type);
        f.payload.resize(len);
        if (len > 0 && !read_exact(fd_, f.payload.data(), len)) {
            fail_stream(uint16_t(ErrCode::MalformedFrame),
                        "stream ended inside a frame");
            return;
        }
        inbound_.push(std::move(f));
    }
}

void TcpChannel::send(const Frame& f) {
    Bytes encoded = frame_encode(f);
    std::lock_guard<std::mutex> lk(write_mu_);
    if (closed_.load()) throw Internal("send on closed channel");
    write_all(fd_, encoded.data(), encoded.size());
}

std::optional<Frame> TcpChannel::recv() {
    auto f = inbound_.pop(latency_us_.load());
    if (!f) {
        std::lock_guard<std::mutex> lk(err_mu_);
        if (err_code_ != 0) throw_wire_error(err_code_, err_what_);
    }
    return f;
}

std::optional<Frame> TcpChannel::try_recv() {
    return inbound_.try_pop(latency_us_.load());
}

void TcpChannel::close() {
    bool expected = false;
    if (!closed_.compare_exchange_strong(expected, true)) return;
    ::shutdown(fd_, SHUT_RDWR);
    if (reader_.joinable()) reader_.join();
    ::close(fd_);
    inbound_.close();
}

// ----------------------------------------------------------------------------
// TcpListener / tcp_connect
// ----------------------------------------------------------------------------

TcpListener::TcpListener(uint16_t port) {
    fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd_ < 0) throw Internal("socket() failed");
    int one = 1;
    ::setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    addr.sin_port = htons(port);
    if (::bind(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
        ::close(fd_);
        fd_ = -1;
        throw Internal(std::string("bind failed: ") + std::strerror(errno));
    }
    if (::listen(fd_, 8) != 0) {
        ::close(fd_);
        fd_ = -1;
        throw Internal("listen failed");
    }
    sockaddr_in bound{};
    socklen_t len = sizeof(bound);
    if (::getsockname(fd_, reinterpret_cast<sockaddr*>(&bound), &len) != 0) {
        ::close(fd_);
        fd_ = -1;
        throw Internal("getsockname failed");
    }
    port_ = ntohs(bound.sin_port);
}

TcpListener::~TcpListener() { close(); }

std::unique_ptr<TcpChannel> TcpListener::accept() {
    if (fd_ < 0) return nullptr;
    for (;;) {
        int cfd = ::accept(fd_, nullptr, nullptr);
        if (cfd < 0) {
            if (errno == EINTR) continue;
            return nullptr;  // listener closed
        }
        return std::make_unique<TcpChannel>(cfd);
    }
}

void TcpListener::close() {
    if (fd_ >= 0) {
        ::shutdown(fd_, SHUT_RDWR);
        ::close(fd_);
        fd_ = -1;
    }
}

std::unique_ptr<Channel> tcp_connect(const std::string& host, uint16_t port) {
    addrinfo hints{};
    hints.ai_family = AF_INET;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo* res = nullptr;
    std::string port_str = std::to_string(port);
    int rc = ::getaddrinfo(host.c_str(), port_str.c_str(), &hints, &res);
    if (rc != 0)
        throw Internal(std::string("getaddrinfo failed: ") + gai_strerror(rc));
    int fd = -1;
    for (addrinfo* it = res; it != nullptr; it = it->ai_next) {
        fd = ::socket(it->ai_family, it->ai_socktype, it->ai_protocol);
        if (fd < 0) continue;
        if (::connect(fd, it->ai_addr, it->ai_addrlen) == 0) break;
        ::close(fd);
        fd = -1;
    }
    ::freeaddrinfo(res);
    if (fd < 0) throw Internal("connect failed");
    return std::make_unique<TcpChannel>(fd);
}

}  // namespace cforam
