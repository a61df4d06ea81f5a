// Copyright 2026 The crm-active Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "crmactive/http_server.hpp"

#include <httplib.h>
#include <spdlog/spdlog.h>

namespace crmactive {

namespace {

void send(httplib::Response& res, const ApiResponse& r) {
  res.status = r.status;
  res.set_content(r.body.dump(), "application/json");
}

bool parse_body(const httplib::Request& req, httplib::Response& res, nlohmann::json& out) {
  out = nlohmann::json::parse(req.body, nullptr, false);
  if (out.is_discarded()) {
    send(res, {400, {{"error", "request body is not valid JSON"}}});
    return false;
  }
  return true;
}

}  // namespace

struct HttpServer::Impl {
  explicit Impl(SessionManager& m) : manager(m) {}
  SessionManager& manager;
  httplib::Server server;
};

HttpServer::HttpServer(SessionManager& manager) : impl_(std::make_unique<Impl>(manager)) {
  auto& srv = impl_->server;
  auto& mgr = impl_->manager;

  srv.Post("/sessions", [&mgr](const httplib::Request& req, httplib::Response& res) {
    nlohmann::json body;
    if (parse_body(req, res, body)) send(res, mgr.create_session(body));
  });
  srv.Get(R"(/sessions/([^/]+))", [&mgr](const httplib::Request& req, httplib::Response& res) {
    send(res, mgr.get_session(req.matches[1]));
  });
  srv.Get(R"(/sessions/([^/]+)/batch)", [&mgr](const httplib::Request& req, httplib::Response& res) {
    send(res, mgr.get_batch(req.matches[1]));
  });
  srv.Post(R"(/sessions/([^/]+)/labels)", [&mgr](const httplib::Request& req, httplib::Response& res) {
    nlohmann::json body;
    if (parse_body(req, res, body)) send(res, mgr.submit_label(req.matches[1], body));
  });
  srv.Post(R"(/sessions/([^/]+)/advance)", [&mgr](const httplib::Request& req, httplib::Response& res) {
    send(res, mgr.advance(req.matches[1]));
  });
  srv.Get(R"(/sessions/([^/]+)/metrics)", [&mgr](const httplib::Request& req, httplib::Response& res) {
    send(res, mgr.metrics(req.matches[1]));
  });
  srv.Get(R"(/sessions/([^/]+)/clusters)", [&mgr](const httplib::Request& req, httplib::Response& res) {
    send(res, mgr.clusters(req.matches[1]));
  });
  srv.Get("/vocabulary", [&mgr](const httplib::Request& req, httplib::Response& res) {
    if (!req.has_param("session")) {
      send(res, {400, {{"error", "missing 'session' query parameter"}}});
      return;
    }
    send(res, mgr.vocabulary(req.get_param_value("session")));
  });

  srv.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
    std::string what = "internal error";
    try {
      if (ep) std::rethrow_exception(ep);
    } catch (const std::exception& e) {
      what = e.what();
    } catch (...) {
    }
    spdlog::error("request failed: {}", what);
    send(res, {500, {{"error", what}}});
  });
}

HttpServer::~HttpServer() { stop(); }

bool HttpServer::listen(const std::string& host, int port) { return impl_->server.listen(host, port); }

bool HttpServer::bind(const std::string& host, int port) { return impl_->server.bind_to_port(host, port); }

int HttpServer::bind_any_port(const std::string& host) { return impl_->server.bind_to_any_port(host); }

bool HttpServer::listen_after_bind() { return impl_->server.listen_after_bind(); }

void HttpServer::stop() {
  if (impl_) impl_->server.stop();
}

bool HttpServer::is_running() const { return impl_->server.is_running(); }

}  // namespace crmactive
