#pragma once

// HTTP binding for the query API (cpp-httplib).

#include <filesystem>
#include <optional>
#include <string>

#include <httplib.h>

#include "coword/service.hpp"

namespace coword::service {

inline constexpr const char* kJsonContentType = "application/json; charset=utf-8";

inline constexpr const char* kFallbackIndex = R"(<!DOCTYPE html>
<html><head><meta charset="utf-8"><title>coword</title></head>
<body><h1>coword keyword service</h1>
<p>JSON API under <code>/api/v1/</code>: keywords, keywords/{keyword}, keywords/{keyword}/cooccurring,
keywords/{keyword}/trend, papers, clusters, clusters/{id}, strategic, meta.</p>
</body></html>
)";

class HttpServer {
 public:
  // `static_dir`, when given, holds a single-page UI; its index.html also
  // answers the client-side routes /k/..., /c/... and /diagram.
  explicit HttpServer(const SnapshotStore& store, std::optional<std::filesystem::path> static_dir = std::nullopt)
      : api_(store), static_dir_(std::move(static_dir)) {
    server_.Get(R"(/api/v1/.*)", [this](const httplib::Request& req, httplib::Response& res) {
      Params params;
      for (const auto& [key, value] : req.params) params.emplace(key, value);
      const auto out = api_.handle(req.path, params);
      res.status = out.status;
      res.set_content(out.body.dump(), kJsonContentType);
    });
    server_.Get(R"(/api/.*)", [](const httplib::Request&, httplib::Response& res) {
      res.status = 404;
      res.set_content(error_response(404, "not_found", "unknown API version").body.dump(), kJsonContentType);
    });
    if (static_dir_) {
      server_.set_mount_point("/static", static_dir_->string());
      server_.Get(R"(/(k/.*|c/.*|diagram)?)", [this](const httplib::Request&, httplib::Response& res) {
        try {
          res.set_content(read_file(*static_dir_ / "index.html"), "text/html; charset=utf-8");
        } catch (const Error&) {
          res.set_content(kFallbackIndex, "text/html; charset=utf-8");
        }
      });
    } else {
      server_.Get("/", [](const httplib::Request&, httplib::Response& res) {
        res.set_content(kFallbackIndex, "text/html; charset=utf-8");
      });
    }
  }

  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  // Blocks until stop() is called.
  bool listen(const std::string& host, int port) { return server_.listen(host, port); }

  int bind_to_any_port(const std::string& host) { return server_.bind_to_any_port(host); }
  bool listen_after_bind() { return server_.listen_after_bind(); }
  void wait_until_ready() const { server_.wait_until_ready(); }
  bool is_running() const { return server_.is_running(); }
  void stop() { server_.stop(); }

 private:
  Api api_;
  std::optional<std::filesystem::path> static_dir_;
  httplib::Server server_;
};

}  // namespace coword::service
