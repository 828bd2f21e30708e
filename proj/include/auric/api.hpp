// SPDX-License-Identifier: Apache-2.0
#pragma once

// HTTP API over a store.
//
//   GET  /api/days?from&to&threshold&agg
//   GET  /api/days/{date}/sessions?threshold&agg
//   GET  /api/sessions/{id}
//   GET  /api/sessions/{id}/captures/{n}      raw sample bytes
//   GET  /api/config     PUT /api/config       partial config object
//   POST /api/enroll                           {"owner_id", "portraits", "created_ts"?}
//   GET  /api/banner
//
// Errors are {"status", "code", "message"} with status 400, 404, 409 or 500.

#include "auric/error.hpp"
#include "auric/log_store.hpp"

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>

namespace auric {

struct ApiRequest {
    std::string method;
    std::string path;
    std::map<std::string, std::string> params;
    std::string body;
};

struct ApiResponse {
    int status = 200;
    std::string content_type = "application/json";
    std::string body;
};

struct ApiError {
    int status = 500;
    std::string code;
    std::string message;
};

/// Status for a domain error code.
int http_status(ErrorCode code) noexcept;
std::string serialize_api_error(const ApiError& error);

class ApiService {
public:
    explicit ApiService(Store& store) : store_(store) {}

    /// Transport-independent dispatch.
    ApiResponse handle(const ApiRequest& request);

private:
    ApiResponse route(const ApiRequest& request);

    Store& store_;
    std::mutex write_mutex_;  // serializes enroll/config writes
};

/// Serves the API until stop() is called from another thread. Port 0 picks a free port;
/// `on_ready` receives the bound port once listening.
class HttpServer {
public:
    explicit HttpServer(Store& store);
    ~HttpServer();

    HttpServer(const HttpServer&) = delete;
    HttpServer& operator=(const HttpServer&) = delete;

    /// Blocks. Returns false if the port cannot be bound.
    bool listen(const std::string& host, int port, const std::function<void(int)>& on_ready = {});
    void stop();

private:
    struct Impl;
    ApiService api_;
    std::unique_ptr<Impl> impl_;
};

}  // namespace auric
