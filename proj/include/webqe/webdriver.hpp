#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "webqe/error.hpp"
#include "webqe/strings.hpp"
#include "webqe/url.hpp"

namespace webqe::webdriver {

using nlohmann::json;

inline std::string base64_decode(std::string_view in) {
    auto value_of = [](char c) -> int {
        if (c >= 'A' && c <= 'Z') return c - 'A';
        if (c >= 'a' && c <= 'z') return c - 'a' + 26;
        if (c >= '0' && c <= '9') return c - '0' + 52;
        if (c == '+') return 62;
        if (c == '/') return 63;
        return -1;
    };
    std::string out;
    int buffer = 0, bits = 0;
    for (char c : in) {
        int v = value_of(c);
        if (v < 0) continue;  // padding, whitespace
        buffer = (buffer << 6) | v;
        bits += 6;
        if (bits >= 8) {
            bits -= 8;
            out.push_back(static_cast<char>((buffer >> bits) & 0xFF));
        }
    }
    return out;
}

struct ElementHandle {
    std::string id;
};

// W3C WebDriver HTTP JSON wire protocol: session create/delete, navigation,
// CSS element lookup, element interaction, text, rect, screenshot.
class Client {
public:
    explicit Client(const std::string& endpoint)
        : endpoint_(endpoint), http_(url::origin(endpoint)) {
        auto parts = url::parse(endpoint);
        prefix_ = parts && !parts->path.empty() && parts->path != "/" ? parts->path : "";
        http_.set_read_timeout(120, 0);
    }

    void start_session(const json& capabilities = json::object()) {
        json body{{"capabilities", {{"alwaysMatch", capabilities}}}};
        json value = request("POST", "/session", body);
        if (value.contains("sessionId")) {
            session_id_ = value["sessionId"].get<std::string>();
        } else if (value.contains("value") && value["value"].contains("sessionId")) {
            session_id_ = value["value"]["sessionId"].get<std::string>();
        }
        if (session_id_.empty()) {
            throw Error(ErrorCode::SessionLost, "no sessionId in new-session response");
        }
    }

    void delete_session() {
        if (session_id_.empty()) return;
        request("DELETE", "/session/" + session_id_);
        session_id_.clear();
    }

    bool has_session() const { return !session_id_.empty(); }

    void navigate(const std::string& target) {
        request("POST", session_path("/url"), json{{"url", target}});
    }

    std::string current_url() { return request("GET", session_path("/url")).get<std::string>(); }

    std::string title() { return request("GET", session_path("/title")).get<std::string>(); }

    std::optional<ElementHandle> find_element(const std::string& css_selector) {
        json body{{"using", "css selector"}, {"value", css_selector}};
        httplib::Result res = raw("POST", session_path("/element"), body.dump());
        if (!res) throw Error(ErrorCode::SessionLost, "webdriver endpoint unreachable");
        json reply = json::parse(res->body, nullptr, false);
        if (res->status == 404 ||
            (reply.is_object() && reply.contains("value") && reply["value"].is_object() &&
             reply["value"].value("error", "") == "no such element")) {
            return std::nullopt;
        }
        check_status(*res, reply);
        for (const auto& [key, v] : reply["value"].items()) {
            (void)key;
            return ElementHandle{v.get<std::string>()};
        }
        return std::nullopt;
    }

    void click(const ElementHandle& el) {
        request("POST", element_path(el, "/click"), json::object());
    }

    void send_keys(const ElementHandle& el, const std::string& text) {
        request("POST", element_path(el, "/value"), json{{"text", text}});
    }

    void clear(const ElementHandle& el) {
        request("POST", element_path(el, "/clear"), json::object());
    }

    std::string text(const ElementHandle& el) {
        return request("GET", element_path(el, "/text")).get<std::string>();
    }

    bool displayed(const ElementHandle& el) {
        return request("GET", element_path(el, "/displayed")).get<bool>();
    }

    // {x, y, width, height}
    json rect(const ElementHandle& el) { return request("GET", element_path(el, "/rect")); }

    std::string screenshot_png() {
        std::string b64 = request("GET", session_path("/screenshot")).get<std::string>();
        return base64_decode(b64);
    }

private:
    std::string session_path(const std::string& suffix) const {
        return "/session/" + session_id_ + suffix;
    }
    std::string element_path(const ElementHandle& el, const std::string& suffix) const {
        return session_path("/element/" + el.id + suffix);
    }

    httplib::Result raw(const std::string& method, const std::string& path, const std::string& body) {
        std::string full = prefix_ + path;
        if (method == "POST") return http_.Post(full, body, "application/json");
        if (method == "DELETE") return http_.Delete(full);
        return http_.Get(full);
    }

    void check_status(const httplib::Response& res, const json& reply) {
        if (res.status >= 200 && res.status < 300) return;
        std::string detail = reply.is_object() && reply.contains("value") &&
                                     reply["value"].is_object()
                                 ? reply["value"].value("error", "") + ": " +
                                       reply["value"].value("message", "")
                                 : res.body;
        throw Error(ErrorCode::SessionLost,
                    strings::format("webdriver HTTP %d (%s)", res.status, detail.c_str()));
    }

    json request(const std::string& method, const std::string& path, const json& body = {}) {
        httplib::Result res = raw(method, path, body.is_null() ? "{}" : body.dump());
        if (!res) {
            throw Error(ErrorCode::SessionLost,
                        "webdriver endpoint unreachable: " + httplib::to_string(res.error()));
        }
        json reply = res->body.empty() ? json::object() : json::parse(res->body, nullptr, false);
        if (reply.is_discarded()) reply = json::object();
        check_status(*res, reply);
        return reply.contains("value") ? reply["value"] : reply;
    }

    std::string endpoint_;
    std::string prefix_;
    httplib::Client http_;
    std::string session_id_;
};

}  // namespace webqe::webdriver
