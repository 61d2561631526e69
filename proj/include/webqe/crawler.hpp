#pragma once

#include <algorithm>
#include <future>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "webqe/error.hpp"
#include "webqe/html.hpp"
#include "webqe/strings.hpp"
#include "webqe/url.hpp"

namespace webqe::crawl {

struct CrawlConfig {
    std::string base_url;
    int max_pages = 50;
    int max_depth = 3;
    bool same_origin_only = true;
    int fetch_timeout_ms = 5000;
    int parallelism = 1;
    std::string user_agent = "webqe/0.1";

    void validate() const {
        if (max_pages < 1) throw Error(ErrorCode::ConfigError, "max_pages must be >= 1");
        if (max_depth < 0) throw Error(ErrorCode::ConfigError, "max_depth must be >= 0");
        if (parallelism < 1) throw Error(ErrorCode::ConfigError, "parallelism must be >= 1");
        auto parts = url::parse(base_url);
        if (!parts || (parts->scheme != "http" && parts->scheme != "https") || parts->host.empty()) {
            throw Error(ErrorCode::ConfigError, "base_url must be absolute http(s): " + base_url);
        }
    }
};

struct FetchResult {
    int status = 0;        // 0 = transport failure
    std::string body;
    std::string error;     // non-empty on transport failure
};

class Fetcher {
public:
    virtual ~Fetcher() = default;
    virtual FetchResult fetch(const std::string& absolute_url, int timeout_ms) = 0;
};

struct PageCapture {
    std::string url;  // normalized absolute
    std::string fetched_at;
    int status = 0;
    std::string html;
    std::vector<std::string> discovered_links;  // normalized absolute, document order
    int depth = 0;
    std::string error;
};

// Anchors, form actions, and formaction attributes yield links; script-driven
// navigation is out of scope. Links are normalized against the page URL,
// deduplicated preserving first occurrence.
inline std::vector<std::string> extract_links(const std::string& page_url, std::string_view html_text) {
    std::vector<std::string> links;
    std::set<std::string> seen;
    html::Document doc;
    try {
        doc = html::parse(html_text);
    } catch (const Error&) {
        return links;
    }
    auto add = [&](const std::string& raw) {
        if (strings::trim(raw).empty()) return;
        try {
            std::string normalized = url::normalize(raw, page_url);
            if (seen.insert(normalized).second) links.push_back(normalized);
        } catch (const Error&) {
            // non-http(s) or unresolvable targets are skipped
        }
    };
    std::vector<const html::Node*> work{doc.root.get()};
    std::vector<const html::Node*> ordered;
    while (!work.empty()) {
        const html::Node* cur = work.back();
        work.pop_back();
        ordered.push_back(cur);
        for (auto it = cur->children.rbegin(); it != cur->children.rend(); ++it)
            work.push_back(it->get());
    }
    for (const html::Node* node : ordered) {
        if (node->tag == "a") {
            if (const auto* href = node->attr("href")) add(*href);
        } else if (node->tag == "form") {
            add(node->attr("action") ? *node->attr("action") : page_url);
        }
        if (const auto* fa = node->attr("formaction")) add(*fa);
    }
    return links;
}

// Breadth-first crawl from the base URL. Within a depth level URLs are
// fetched in lexicographic order, so the capture list is deterministic for
// identical server responses regardless of fetch completion order.
inline std::vector<PageCapture> crawl(const CrawlConfig& config, Fetcher& fetcher) {
    config.validate();
    const std::string base = url::normalize(config.base_url, config.base_url);
    const std::string base_origin = url::origin(base);

    std::vector<PageCapture> captures;
    std::set<std::string> visited{base};
    std::vector<std::string> frontier{base};
    int depth = 0;

    while (!frontier.empty() && static_cast<int>(captures.size()) < config.max_pages) {
        std::sort(frontier.begin(), frontier.end());
        std::vector<std::string> to_fetch;
        for (const auto& u : frontier) {
            if (static_cast<int>(captures.size() + to_fetch.size()) >= config.max_pages) break;
            to_fetch.push_back(u);
        }

        std::vector<FetchResult> results(to_fetch.size());
        for (size_t start = 0; start < to_fetch.size(); start += config.parallelism) {
            size_t end = std::min(to_fetch.size(), start + config.parallelism);
            std::vector<std::future<FetchResult>> batch;
            for (size_t i = start; i < end; ++i) {
                batch.push_back(std::async(std::launch::async, [&fetcher, &to_fetch, i, &config] {
                    return fetcher.fetch(to_fetch[i], config.fetch_timeout_ms);
                }));
            }
            for (size_t i = start; i < end; ++i) results[i] = batch[i - start].get();
        }

        std::vector<std::string> next_frontier;
        for (size_t i = 0; i < to_fetch.size(); ++i) {
            PageCapture capture;
            capture.url = to_fetch[i];
            capture.depth = depth;
            capture.fetched_at = strings::iso8601_utc_now();
            capture.status = results[i].status;
            capture.error = results[i].error;
            if (results[i].status == 0) {
                if (depth == 0 && capture.url == base) {
                    throw Error(ErrorCode::RootUnreachable,
                                base + " (" + (results[i].error.empty() ? "fetch failed" : results[i].error) + ")");
                }
            } else {
                capture.html = results[i].body;
                capture.discovered_links = extract_links(capture.url, capture.html);
            }
            for (const auto& link : capture.discovered_links) {
                if (config.same_origin_only && url::origin(link) != base_origin) continue;
                if (depth + 1 > config.max_depth) continue;
                if (visited.insert(link).second) next_frontier.push_back(link);
            }
            captures.push_back(std::move(capture));
        }
        frontier = std::move(next_frontier);
        ++depth;
    }
    return captures;
}

inline void to_json(nlohmann::json& j, const PageCapture& c) {
    j = nlohmann::json{{"url", c.url},
                       {"fetched_at", c.fetched_at},
                       {"status", c.status},
                       {"html", c.html},
                       {"discovered_links", c.discovered_links},
                       {"depth", c.depth},
                       {"error", c.error}};
}
inline void from_json(const nlohmann::json& j, PageCapture& c) {
    j.at("url").get_to(c.url);
    c.fetched_at = j.value("fetched_at", "");
    j.at("status").get_to(c.status);
    j.at("html").get_to(c.html);
    j.at("discovered_links").get_to(c.discovered_links);
    j.at("depth").get_to(c.depth);
    c.error = j.value("error", "");
}

}  // namespace webqe::crawl
