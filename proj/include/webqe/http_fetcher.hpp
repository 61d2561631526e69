#pragma once

#include <memory>
#include <string>

#include <httplib.h>

#include "webqe/crawler.hpp"
#include "webqe/url.hpp"

namespace webqe::crawl {

// Plain HTTP/1.1 GET fetcher. One client per origin, configurable
// User-Agent, per-request timeout. No cookies or authentication.
class HttpFetcher : public Fetcher {
public:
    explicit HttpFetcher(std::string user_agent = "webqe/0.1")
        : user_agent_(std::move(user_agent)) {}

    FetchResult fetch(const std::string& absolute_url, int timeout_ms) override {
        FetchResult out;
        std::string origin;
        try {
            origin = url::origin(absolute_url);
        } catch (const Error& e) {
            out.error = e.what();
            return out;
        }
        httplib::Client client(origin);
        client.set_connection_timeout(0, timeout_ms * 1000);
        client.set_read_timeout(0, timeout_ms * 1000);
        client.set_follow_location(true);
        httplib::Headers headers{{"User-Agent", user_agent_}};
        auto res = client.Get(url::path_and_query(absolute_url), headers);
        if (!res) {
            out.error = httplib::to_string(res.error());
            return out;
        }
        out.status = res->status;
        out.body = res->body;
        return out;
    }

private:
    std::string user_agent_;
};

}  // namespace webqe::crawl
