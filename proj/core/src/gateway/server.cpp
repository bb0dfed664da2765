#include "csi/gateway/server.hpp"

#include <charconv>
#include <cstdlib>

#include <spdlog/spdlog.h>

#include "csi/errors.hpp"

namespace csi::gateway {

std::pair<std::string, std::uint16_t> parse_bind(const std::string& text) {
  const auto colon = text.rfind(':');
  if (colon == std::string::npos || colon == 0) throw ConfigError("bind address must be host:port, got " + text);
  unsigned port = 0;
  const auto* first = text.data() + colon + 1;
  const auto* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, port);
  if (ec != std::errc{} || ptr != last || first == last || port > 65535)
    throw ConfigError("bad port in bind address " + text);
  return {text.substr(0, colon), static_cast<std::uint16_t>(port)};
}

ServeOptions serve_options_from_environment(ServeOptions base) {
  if (const char* v = std::getenv("CSI_BIND")) std::tie(base.client_host, base.client_port) = parse_bind(v);
  if (const char* v = std::getenv("CSI_OPERATOR_BIND"))
    std::tie(base.operator_host, base.operator_port) = parse_bind(v);
  if (const char* v = std::getenv("CSI_STORAGE_DIR"); v && *v) base.defaults.storage_dir = v;
  base.defaults.binding = DistillerBinding::from_environment();
  validate(base.defaults.binding);
  return base;
}

Server::Server(ServeOptions options)
    : options_(std::move(options)),
      tcp_(options_.client_host, options_.client_port),
      gateway_(tcp_),
      api_(gateway_, options_.defaults) {
  if (options_.tick <= Millis{0}) throw ConfigError("tick must be positive");
  operator_port_ = api_.start(options_.operator_host, options_.operator_port);
  tcp_.start(gateway_);
  ticker_ = std::thread([this] { tick_loop(); });
  spdlog::info("clients on {}:{}", options_.client_host, tcp_.port());
}

Server::~Server() { stop(); }

void Server::stop() {
  {
    std::lock_guard lock(stop_mutex_);
    if (stopping_) return;
    stopping_ = true;
  }
  stop_cv_.notify_all();
  if (ticker_.joinable()) ticker_.join();
  api_.stop();
  tcp_.stop();
}

void Server::tick_loop() {
  using clock = std::chrono::steady_clock;
  auto last = clock::now();
  std::unique_lock lock(stop_mutex_);
  while (!stop_cv_.wait_for(lock, options_.tick, [this] { return stopping_; })) {
    lock.unlock();
    const auto now = clock::now();
    const auto dt = std::chrono::duration_cast<Millis>(now - last);
    last += dt;
    gateway_.tick_all(dt);
    lock.lock();
  }
}

}  // namespace csi::gateway
