#include <webqe/crawler.hpp>

#include <gtest/gtest.h>

#include <map>

using namespace webqe;

namespace {

// Serves canned bodies keyed by normalized URL; unknown URLs 404.
class FakeFetcher : public crawl::Fetcher {
public:
    std::map<std::string, std::string> pages;
    std::map<std::string, int> hits;

    crawl::FetchResult fetch(const std::string& url, int) override {
        ++hits[url];
        auto it = pages.find(url);
        if (it == pages.end()) return {404, "<html><body>missing</body></html>", ""};
        return {200, it->second, ""};
    }
};

class DownFetcher : public crawl::Fetcher {
public:
    crawl::FetchResult fetch(const std::string&, int) override {
        return {0, "", "connection refused"};
    }
};

crawl::CrawlConfig config(const std::string& base) {
    crawl::CrawlConfig c;
    c.base_url = base;
    return c;
}

}  // namespace

TEST(ExtractLinks, AnchorsFormsAndFormaction) {
    auto links = crawl::extract_links("https://x.test/dir/page",
                                      R"(<html><body>
        <a href="/login">login</a>
        <a href="items">relative</a>
        <a href="https://other.test/x">offsite</a>
        <a href="mailto:a@b.c">mail</a>
        <form action="/submit"><button formaction="/alt">go</button></form>
        <a href="/login#section">dup after normalize</a>
      </body></html>)");
    EXPECT_EQ(links, (std::vector<std::string>{
                         "https://x.test/login",
                         "https://x.test/dir/items",
                         "https://other.test/x",
                         "https://x.test/submit",
                         "https://x.test/alt",
                     }));
}

TEST(Crawl, BreadthFirstWithDepths) {
    FakeFetcher fetcher;
    fetcher.pages["https://x.test/"] =
        R"(<html><body><a href="/login">l</a><a href="/items">i</a></body></html>)";
    fetcher.pages["https://x.test/login"] = "<html><body>login</body></html>";
    fetcher.pages["https://x.test/items"] = R"(<html><body><a href="/deep">d</a></body></html>)";
    fetcher.pages["https://x.test/deep"] = "<html><body>deep</body></html>";

    auto c = config("https://x.test/");
    c.max_depth = 1;
    auto captures = crawl::crawl(c, fetcher);
    ASSERT_EQ(captures.size(), 3u);
    EXPECT_EQ(captures[0].url, "https://x.test/");
    EXPECT_EQ(captures[0].depth, 0);
    // level 1 in lexicographic order
    EXPECT_EQ(captures[1].url, "https://x.test/items");
    EXPECT_EQ(captures[2].url, "https://x.test/login");
    EXPECT_EQ(captures[1].depth, 1);
    EXPECT_EQ(captures[2].depth, 1);
    // /deep is beyond max_depth: discovered but not fetched
    EXPECT_EQ(fetcher.hits.count("https://x.test/deep"), 0u);
    EXPECT_EQ(captures[1].discovered_links,
              std::vector<std::string>{"https://x.test/deep"});
}

TEST(Crawl, MaxPagesBudget) {
    FakeFetcher fetcher;
    fetcher.pages["https://x.test/"] =
        R"(<html><body><a href="/a">a</a><a href="/b">b</a></body></html>)";
    fetcher.pages["https://x.test/a"] = "<html><body>a</body></html>";
    fetcher.pages["https://x.test/b"] = "<html><body>b</body></html>";

    auto c = config("https://x.test/");
    c.max_pages = 1;
    auto captures = crawl::crawl(c, fetcher);
    ASSERT_EQ(captures.size(), 1u);
    EXPECT_EQ(captures[0].url, "https://x.test/");
}

TEST(Crawl, SameOriginClosure) {
    FakeFetcher fetcher;
    fetcher.pages["https://x.test/"] =
        R"(<html><body><a href="https://off.test/page">off</a><a href="/in">in</a></body></html>)";
    fetcher.pages["https://x.test/in"] = "<html><body>in</body></html>";
    fetcher.pages["https://off.test/page"] = "<html><body>offsite</body></html>";

    auto captures = crawl::crawl(config("https://x.test/"), fetcher);
    ASSERT_EQ(captures.size(), 2u);
    for (const auto& capture : captures) {
        EXPECT_EQ(url::origin(capture.url), "https://x.test");
    }
    // off-origin recorded in discovered_links but never fetched
    EXPECT_EQ(captures[0].discovered_links[0], "https://off.test/page");
    EXPECT_EQ(fetcher.hits.count("https://off.test/page"), 0u);
}

TEST(Crawl, RootUnreachableThrows) {
    DownFetcher down;
    EXPECT_THROW(crawl::crawl(config("https://x.test/"), down), Error);
}

TEST(Crawl, PerPageFailureRecordedNotFatal) {
    FakeFetcher fetcher;
    fetcher.pages["https://x.test/"] =
        R"(<html><body><a href="/gone">g</a></body></html>)";
    // /gone missing -> 404 capture, crawl continues
    auto captures = crawl::crawl(config("https://x.test/"), fetcher);
    ASSERT_EQ(captures.size(), 2u);
    EXPECT_EQ(captures[1].status, 404);
}

TEST(Crawl, DeterministicAcrossRunsAndParallelism) {
    FakeFetcher fetcher;
    fetcher.pages["https://x.test/"] =
        R"(<html><body><a href="/c">c</a><a href="/a">a</a><a href="/b">b</a></body></html>)";
    fetcher.pages["https://x.test/a"] = "<html><body>a</body></html>";
    fetcher.pages["https://x.test/b"] = "<html><body>b</body></html>";
    fetcher.pages["https://x.test/c"] = "<html><body>c</body></html>";

    auto c1 = config("https://x.test/");
    auto run1 = crawl::crawl(c1, fetcher);
    auto c2 = config("https://x.test/");
    c2.parallelism = 4;
    auto run2 = crawl::crawl(c2, fetcher);
    ASSERT_EQ(run1.size(), run2.size());
    for (size_t i = 0; i < run1.size(); ++i) {
        EXPECT_EQ(run1[i].url, run2[i].url);
        EXPECT_EQ(run1[i].html, run2[i].html);
        EXPECT_EQ(run1[i].depth, run2[i].depth);
    }
}

TEST(Crawl, CaptureJsonRoundTrip) {
    crawl::PageCapture c;
    c.url = "https://x.test/";
    c.fetched_at = "2024-01-01T00:00:00Z";
    c.status = 200;
    c.html = "<html><body>x</body></html>";
    c.discovered_links = {"https://x.test/a"};
    c.depth = 0;
    nlohmann::json j = c;
    auto back = j.get<crawl::PageCapture>();
    EXPECT_EQ(back.url, c.url);
    EXPECT_EQ(back.html, c.html);
    EXPECT_EQ(back.discovered_links, c.discovered_links);
}

TEST(CrawlConfig, Validation) {
    crawl::CrawlConfig c;
    c.base_url = "ftp://x.test/";
    EXPECT_THROW(c.validate(), Error);
    c.base_url = "https://x.test/";
    c.max_pages = 0;
    EXPECT_THROW(c.validate(), Error);
    c.max_pages = 10;
    c.parallelism = 0;
    EXPECT_THROW(c.validate(), Error);
    c.parallelism = 2;
    EXPECT_NO_THROW(c.validate());
}
