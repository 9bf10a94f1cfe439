#include <httplib.h>

#include <thread>

#include "evoforge/api/service.hpp"
#include "evoforge/errors.hpp"

namespace evoforge::api {

struct ApiServer::Impl {
  explicit Impl(ApiService& s) : service(s) {}

  void dispatch(const httplib::Request& req, httplib::Response& res) {
    ApiRequest request;
    request.method = req.method;
    request.path = req.path;
    request.body = req.body;
    for (const auto& [k, v] : req.headers) request.headers.emplace(k, v);
    for (const auto& [k, v] : req.params) request.query.emplace(k, v);
    const ApiResponse response = service.handle(request);
    res.status = response.status;
    for (const auto& [k, v] : response.headers) res.set_header(k, v);
    res.set_content(response.body.dump(), "application/json");
  }

  ApiService& service;
  httplib::Server server;
  std::thread thread;
};

ApiServer::ApiServer(ApiService& service) : impl_(std::make_unique<Impl>(service)) {
  auto handler = [this](const httplib::Request& req, httplib::Response& res) {
    impl_->dispatch(req, res);
  };
  impl_->server.Get(R"(/.*)", handler);
  impl_->server.Post(R"(/.*)", handler);
}

ApiServer::~ApiServer() { stop(); }

int ApiServer::start(const std::string& host, int port) {
  const int bound = port == 0 ? impl_->server.bind_to_any_port(host)
                              : (impl_->server.bind_to_port(host, port) ? port : -1);
  if (bound < 0) {
    throw Error(ErrorCode::kInvalidConfig,
                "cannot listen on " + host + ":" + std::to_string(port));
  }
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return bound;
}

void ApiServer::stop() {
  if (!impl_) return;
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

}  // namespace evoforge::api
