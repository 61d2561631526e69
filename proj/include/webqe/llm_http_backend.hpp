#pragma once

// Out-of-line body for HttpBackend::complete_text. Split from llm_gateway.hpp
// so hermetic consumers don't pull in the HTTP client; include this header in
// any binary that constructs a live backend.

#include <httplib.h>

#include "webqe/llm_gateway.hpp"
#include "webqe/url.hpp"

namespace webqe::llm {

inline std::string HttpBackend::complete_text(const PromptEnvelope& envelope) {
    auto parts = url::parse(endpoint_);
    if (!parts || parts->host.empty()) {
        throw Error(ErrorCode::BackendUnavailable, "bad endpoint: " + endpoint_);
    }
    std::string origin = url::origin(endpoint_);
    std::string path = parts->path.empty() ? "/" : parts->path;

    httplib::Client client(origin);
    client.set_read_timeout(120, 0);
    httplib::Headers headers;
    if (const char* key = std::getenv(api_key_env_.c_str()); key && *key) {
        headers.emplace("Authorization", std::string("Bearer ") + key);
    }
    json body{{"model", model_},
              {"messages", json::array({{{"role", "user"}, {"content", envelope.rendered_text}}})},
              {"temperature", 0}};
    auto res = client.Post(path, headers, body.dump(), "application/json");
    if (!res) {
        throw Error(ErrorCode::BackendUnavailable,
                    "request failed: " + httplib::to_string(res.error()));
    }
    if (res->status != 200) {
        throw Error(ErrorCode::BackendUnavailable,
                    strings::format("endpoint returned HTTP %d", res->status));
    }
    json reply = json::parse(res->body, nullptr, false);
    if (reply.is_discarded() || !reply.contains("choices") || reply["choices"].empty()) {
        throw Error(ErrorCode::BackendUnavailable, "malformed completion response");
    }
    const auto& first = reply["choices"][0];
    if (first.contains("message") && first["message"].contains("content")) {
        return first["message"]["content"].get<std::string>();
    }
    if (first.contains("text")) return first["text"].get<std::string>();
    throw Error(ErrorCode::BackendUnavailable, "completion response carries no content");
}

}  // namespace webqe::llm
