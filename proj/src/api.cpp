// SPDX-License-Identifier: Apache-2.0
#include "auric/api.hpp"

#include "auric/codec.hpp"
#include "auric/error.hpp"
#include "auric/query.hpp"

#include <httplib.h>

#include <charconv>
#include <string_view>
#include <vector>

namespace auric {

using json = nlohmann::json;

namespace {

struct HttpFailure {
    ApiError error;
};

[[noreturn]] void bad_request(const std::string& message) { throw HttpFailure{{400, "bad_request", message}}; }

std::vector<std::string_view> split_path(std::string_view path) {
    std::vector<std::string_view> parts;
    while (!path.empty()) {
        if (path.front() == '/') {
            path.remove_prefix(1);
            continue;
        }
        const auto slash = path.find('/');
        parts.push_back(path.substr(0, slash));
        path = slash == std::string_view::npos ? std::string_view() : path.substr(slash);
    }
    return parts;
}

std::optional<std::string> param(const ApiRequest& req, const std::string& name) {
    auto it = req.params.find(name);
    if (it == req.params.end()) return std::nullopt;
    return it->second;
}

std::optional<double> threshold_param(const ApiRequest& req) {
    auto text = param(req, "threshold");
    if (!text) return std::nullopt;
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(text->data(), text->data() + text->size(), v);
    if (ec != std::errc() || ptr != text->data() + text->size()) bad_request("threshold must be a number");
    return v;
}

std::optional<Aggregation> agg_param(const ApiRequest& req) {
    auto text = param(req, "agg");
    if (!text) return std::nullopt;
    auto agg = parse_aggregation(*text);
    if (!agg) bad_request("agg must be any or majority");
    return agg;
}

json parse_body(const std::string& body) {
    auto j = json::parse(body, nullptr, false);
    if (j.is_discarded()) bad_request("request body is not valid JSON");
    return j;
}

ApiResponse json_response(const ordered_json& j, int status = 200) { return {status, "application/json", j.dump()}; }

}  // namespace

int http_status(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::NotFound: return 404;
        case ErrorCode::DuplicateSession: return 409;
        case ErrorCode::IoFailure: return 500;
        default: return 400;
    }
}

std::string serialize_api_error(const ApiError& error) {
    ordered_json j;
    j["status"] = error.status;
    j["code"] = error.code;
    j["message"] = error.message;
    return j.dump();
}

ApiResponse ApiService::handle(const ApiRequest& request) {
    ApiError error;
    try {
        return route(request);
    } catch (const HttpFailure& f) {
        error = f.error;
    } catch (const Error& e) {
        error = {http_status(e.code()), std::string(to_string(e.code())), e.what()};
    } catch (const std::exception& e) {
        error = {500, "internal", e.what()};
    }
    return {error.status, "application/json", serialize_api_error(error)};
}

ApiResponse ApiService::route(const ApiRequest& req) {
    const auto parts = split_path(req.path);
    const bool get = req.method == "GET";
    auto no_route = [&]() -> ApiResponse {
        throw HttpFailure{{404, "no_route", req.method + " " + req.path + " is not an endpoint"}};
    };
    if (parts.size() < 2 || parts[0] != "api") return no_route();

    const auto& resource = parts[1];
    if (resource == "days") {
        if (!get) return no_route();
        if (parts.size() == 2) {
            DaysQuery q{param(req, "from"), param(req, "to"), threshold_param(req), agg_param(req)};
            auto out = ordered_json::array();
            for (const auto& d : query_days(store_, q)) out.push_back(to_json(d));
            return json_response(out);
        }
        if (parts.size() == 4 && parts[3] == "sessions") {
            SessionsQuery q{std::string(parts[2]), threshold_param(req), agg_param(req)};
            auto out = ordered_json::array();
            for (const auto& s : query_sessions(store_, q)) out.push_back(to_json(s));
            return json_response(out);
        }
        return no_route();
    }
    if (resource == "sessions") {
        if (!get || parts.size() < 3) return no_route();
        const std::string id(parts[2]);
        if (parts.size() == 3) return json_response(to_json(store_.get_session(id)));
        if (parts.size() == 5 && parts[3] == "captures") {
            std::size_t n = 0;
            auto [ptr, ec] = std::from_chars(parts[4].data(), parts[4].data() + parts[4].size(), n);
            if (ec != std::errc() || ptr != parts[4].data() + parts[4].size()) bad_request("capture index must be an integer");
            const auto session = store_.get_session(id);
            if (n >= session.captures.size()) {
                throw Error(ErrorCode::NotFound, "session " + id + " has no capture " + std::to_string(n));
            }
            const auto& ref = session.captures[n].sample_ref;
            if (ref.empty()) throw Error(ErrorCode::NotFound, "capture " + std::to_string(n) + " has no sample");
            const auto bytes = store_.get_capture(ref);
            return {200, "application/octet-stream", std::string(bytes.begin(), bytes.end())};
        }
        return no_route();
    }
    if (parts.size() != 2) return no_route();
    if (resource == "config") {
        if (get) return json_response(to_json(store_.config()));
        if (req.method != "PUT") return no_route();
        const auto patch = parse_body(req.body);
        std::lock_guard lock(write_mutex_);
        const auto updated = apply_config_patch(store_.config(), patch);
        store_.save_config(updated);
        return json_response(to_json(updated));
    }
    if (resource == "enroll") {
        if (req.method != "POST") return no_route();
        const auto body = parse_body(req.body);
        EnrollmentProfile profile;
        try {
            profile = profile_from_json(body);
        } catch (const Error& e) {
            if (e.code() == ErrorCode::MalformedLine) bad_request(e.what());
            throw;
        }
        std::lock_guard lock(write_mutex_);
        store_.save_profile(profile);
        ordered_json out;
        out["owner_id"] = profile.owner_id;
        out["dimension"] = profile.dimension();
        out["created_ts"] = profile.created_ts;
        return json_response(out);
    }
    if (resource == "banner") {
        if (!get) return no_route();
        ordered_json out;
        out["visible"] = store_.config().notifications_visible;
        return json_response(out);
    }
    return no_route();
}

struct HttpServer::Impl {
    httplib::Server server;
};

HttpServer::HttpServer(Store& store) : api_(store), impl_(std::make_unique<Impl>()) {
    auto bridge = [this](const httplib::Request& req, httplib::Response& res) {
        ApiRequest request{req.method, req.path, {}, req.body};
        for (const auto& [k, v] : req.params) request.params.emplace(k, v);
        auto response = api_.handle(request);
        res.status = response.status;
        res.set_content(response.body, response.content_type);
    };
    auto& s = impl_->server;
    s.Get(R"(/.*)", bridge);
    s.Put(R"(/.*)", bridge);
    s.Post(R"(/.*)", bridge);
    s.Delete(R"(/.*)", bridge);
    s.Patch(R"(/.*)", bridge);
}

HttpServer::~HttpServer() = default;

bool HttpServer::listen(const std::string& host, int port, const std::function<void(int)>& on_ready) {
    auto& s = impl_->server;
    int bound = port;
    if (port == 0) {
        bound = s.bind_to_any_port(host);
    } else if (!s.bind_to_port(host, port)) {
        bound = -1;
    }
    if (bound < 0) return false;
    if (on_ready) on_ready(bound);
    return s.listen_after_bind();
}

void HttpServer::stop() { impl_->server.stop(); }

}  // namespace auric
