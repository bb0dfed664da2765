#include "csi/gateway/operator_api.hpp"

#include <httplib.h>
#include <spdlog/spdlog.h>

#include "csi/errors.hpp"

namespace csi::gateway {

namespace {

void reply(httplib::Response& res, int status, const nlohmann::json& body) {
  res.status = status;
  res.set_content(body.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace), "application/json");
}

void fail(httplib::Response& res, int status, std::string_view code, std::string_view detail) {
  reply(res, status, {{"error", code}, {"detail", detail}});
}

}  // namespace

OperatorApi::OperatorApi(Gateway& gateway, SessionDefaults defaults)
    : gateway_(gateway), defaults_(std::move(defaults)), server_(std::make_unique<httplib::Server>()) {
  routes();
}

OperatorApi::~OperatorApi() { stop(); }

void OperatorApi::routes() {
  server_->Post("/sessions", [this](const httplib::Request& req, httplib::Response& res) {
    nlohmann::json body;
    try {
      body = nlohmann::json::parse(req.body);
    } catch (const nlohmann::json::parse_error& e) {
      return fail(res, 400, "bad_request", e.what());
    }
    try {
      auto config = host_config_from_json(body);
      config.binding = defaults_.binding;
      config.storage_dir = defaults_.storage_dir;
      if (gateway_.find(config.session_id))
        return fail(res, 409, "session_exists", "session already exists: " + config.session_id);
      auto host = gateway_.create_session(std::move(config));
      reply(res, 201, host->status());
    } catch (const ConfigError& e) {
      fail(res, 400, "invalid_config", e.what());
    }
  });

  server_->Get("/sessions", [this](const httplib::Request&, httplib::Response& res) {
    auto list = nlohmann::json::array();
    for (const auto& host : gateway_.sessions()) list.push_back(host->status());
    reply(res, 200, list);
  });

  server_->Post(R"(/sessions/([^/]+)/start)", [this](const httplib::Request& req, httplib::Response& res) {
    auto host = gateway_.find(req.matches[1]);
    if (!host) return fail(res, 404, "unknown_session", "no session " + std::string(req.matches[1]));
    try {
      host->start();
    } catch (const ContractViolation& e) {
      return fail(res, 409, "cannot_start", e.what());
    } catch (const Error& e) {
      return fail(res, 409, "cannot_start", e.what());
    }
    reply(res, 200, host->status());
  });

  server_->Get(R"(/sessions/([^/]+)/status)", [this](const httplib::Request& req, httplib::Response& res) {
    auto host = gateway_.find(req.matches[1]);
    if (!host) return fail(res, 404, "unknown_session", "no session " + std::string(req.matches[1]));
    reply(res, 200, host->status());
  });

  server_->Get(R"(/sessions/([^/]+)/export)", [this](const httplib::Request& req, httplib::Response& res) {
    auto host = gateway_.find(req.matches[1]);
    if (!host) return fail(res, 404, "unknown_session", "no session " + std::string(req.matches[1]));
    reply(res, 200, host->export_json());
  });
}

std::uint16_t OperatorApi::start(const std::string& host, std::uint16_t port) {
  int bound = port;
  if (port == 0)
    bound = server_->bind_to_any_port(host);
  else if (!server_->bind_to_port(host, port))
    bound = -1;
  if (bound <= 0) throw ConfigError("cannot listen on " + host + ":" + std::to_string(port));
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  spdlog::info("operator api on {}:{}", host, bound);
  return static_cast<std::uint16_t>(bound);
}

void OperatorApi::stop() {
  if (!thread_.joinable()) return;
  server_->stop();
  thread_.join();
}

}  // namespace csi::gateway
