#include "csi/gateway/tcp_server.hpp"

#include <spdlog/spdlog.h>

#include <boost/asio/post.hpp>
#include <boost/asio/read_until.hpp>
#include <boost/asio/streambuf.hpp>
#include <boost/asio/write.hpp>

#include "csi/errors.hpp"
#include "csi/gateway/envelope.hpp"

namespace asio = boost::asio;
using asio::ip::tcp;

namespace csi::gateway {

class TcpServer::Connection : public std::enable_shared_from_this<Connection> {
 public:
  Connection(TcpServer& server, tcp::socket socket, ChannelId id)
      : server_(server), socket_(std::move(socket)), id_(id), buffer_(kMaxLineBytes) {}

  void read() {
    asio::async_read_until(socket_, buffer_, '\n',
                           [self = shared_from_this()](const boost::system::error_code& ec, std::size_t n) {
                             self->on_read(ec, n);
                           });
  }

  void enqueue(std::string line) {
    if (closing_) return;
    line.push_back('\n');
    queue_.push_back(std::move(line));
    if (queue_.size() == 1) write();
  }

  void close() {
    if (closing_) return;
    closing_ = true;
    boost::system::error_code ignored;
    socket_.shutdown(tcp::socket::shutdown_both, ignored);
    socket_.close(ignored);
    server_.closed(id_);
  }

 private:
  void on_read(const boost::system::error_code& ec, std::size_t n) {
    if (ec == asio::error::not_found) {
      // Line longer than the buffer allows.
      enqueue(error_envelope("bad_envelope", "line too long"));
      flush_then_close();
      return;
    }
    if (ec) {
      close();
      return;
    }
    std::string line(asio::buffers_begin(buffer_.data()), asio::buffers_begin(buffer_.data()) + n - 1);
    buffer_.consume(n);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) {
      try {
        server_.handler_->on_line(id_, line);
      } catch (const std::exception& e) {
        spdlog::error("channel {}: {}", id_, e.what());
        enqueue(error_envelope("internal", "request failed"));
      }
    }
    if (!closing_) read();
  }

  void write() {
    asio::async_write(socket_, asio::buffer(queue_.front()),
                      [self = shared_from_this()](const boost::system::error_code& ec, std::size_t) {
                        if (ec) {
                          self->close();
                          return;
                        }
                        self->queue_.pop_front();
                        if (!self->queue_.empty())
                          self->write();
                        else if (self->close_after_flush_)
                          self->close();
                      });
  }

  void flush_then_close() {
    if (queue_.empty())
      close();
    else
      close_after_flush_ = true;
  }

  TcpServer& server_;
  tcp::socket socket_;
  ChannelId id_;
  asio::streambuf buffer_;
  std::deque<std::string> queue_;
  bool closing_ = false;
  bool close_after_flush_ = false;
};

TcpServer::TcpServer(const std::string& host, std::uint16_t port) : acceptor_(io_) {
  try {
    const tcp::endpoint endpoint(asio::ip::make_address(host), port);
    acceptor_.open(endpoint.protocol());
    acceptor_.set_option(tcp::acceptor::reuse_address(true));
    acceptor_.bind(endpoint);
    acceptor_.listen();
    port_ = acceptor_.local_endpoint().port();
  } catch (const boost::system::system_error& e) {
    throw ConfigError("cannot listen on " + host + ":" + std::to_string(port) + ": " + e.what());
  }
}

TcpServer::~TcpServer() { stop(); }

void TcpServer::start(LineHandler& handler) {
  if (running_.exchange(true)) throw ContractViolation("tcp server already started");
  handler_ = &handler;
  accept();
  thread_ = std::thread([this] { io_.run(); });
}

void TcpServer::stop() {
  if (!running_.exchange(false)) return;
  asio::post(io_, [this] {
    boost::system::error_code ignored;
    acceptor_.close(ignored);
    auto connections = connections_;
    for (auto& [id, c] : connections) c->close();
    io_.stop();
  });
  if (thread_.joinable()) thread_.join();
}

void TcpServer::accept() {
  acceptor_.async_accept([this](const boost::system::error_code& ec, tcp::socket socket) {
    if (ec) return;  // acceptor closed
    const auto id = next_channel_++;
    auto c = std::make_shared<Connection>(*this, std::move(socket), id);
    connections_.emplace(id, c);
    c->read();
    accept();
  });
}

void TcpServer::closed(ChannelId channel) {
  if (connections_.erase(channel) && handler_) handler_->on_disconnect(channel);
}

void TcpServer::send(ChannelId channel, std::string line) {
  asio::post(io_, [this, channel, line = std::move(line)]() mutable {
    auto it = connections_.find(channel);
    if (it != connections_.end()) it->second->enqueue(std::move(line));
  });
}

}  // namespace csi::gateway
