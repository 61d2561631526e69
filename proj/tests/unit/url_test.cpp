#include <webqe/url.hpp>

#include <gtest/gtest.h>

#include <random>

using namespace webqe;

TEST(UrlNormalize, ResolvesPathAgainstBase) {
    EXPECT_EQ(url::normalize("/UserSignup", "https://app.example.com"),
              "https://app.example.com/UserSignup");
}

TEST(UrlNormalize, RootSlashPreserved) {
    EXPECT_EQ(url::normalize("https://x.test/", "https://x.test"), "https://x.test/");
    EXPECT_EQ(url::normalize("https://x.test", "https://x.test"), "https://x.test/");
}

TEST(UrlNormalize, DotSegmentsAndFragment) {
    // RFC 3986 reference resolution: merge("/p/", "a/../b") -> "/p/b"
    EXPECT_EQ(url::normalize("a/../b#frag", "https://x.test/p/"), "https://x.test/p/b");
    EXPECT_EQ(url::normalize("../up", "https://x.test/a/b/c"), "https://x.test/a/up");
    EXPECT_EQ(url::normalize("./same", "https://x.test/a/"), "https://x.test/a/same");
}

TEST(UrlNormalize, DefaultPortRemoved) {
    EXPECT_EQ(url::normalize("http://x.test:80/a", "http://x.test"), "http://x.test/a");
    EXPECT_EQ(url::normalize("https://x.test:443/a", "https://x.test"), "https://x.test/a");
    EXPECT_EQ(url::normalize("http://x.test:8080/a", "http://x.test"), "http://x.test:8080/a");
}

TEST(UrlNormalize, TrailingSlashCollapsedExceptRoot) {
    EXPECT_EQ(url::normalize("https://x.test/path/", "https://x.test"), "https://x.test/path");
    EXPECT_EQ(url::normalize("/", "https://x.test/deep/page"), "https://x.test/");
}

TEST(UrlNormalize, QueryPreservedVerbatim) {
    EXPECT_EQ(url::normalize("/search?q=A+b&x=%2f", "https://x.test"),
              "https://x.test/search?q=A+b&x=%2f");
}

TEST(UrlNormalize, PercentEncodingCaseFoldedInPath) {
    EXPECT_EQ(url::normalize("/a%2fb", "https://x.test"), "https://x.test/a%2Fb");
}

TEST(UrlNormalize, HostAndSchemeLowercased) {
    EXPECT_EQ(url::normalize("HTTPS://X.Test/Path", "https://x.test"), "https://x.test/Path");
}

TEST(UrlNormalize, RejectsMalformed) {
    EXPECT_THROW(url::normalize("", "https://x.test"), Error);
    EXPECT_THROW(url::normalize("mailto:a@b.c", "https://x.test"), Error);
    EXPECT_THROW(url::normalize("javascript:void(0)", "https://x.test"), Error);
    EXPECT_THROW(url::normalize("/a", "not-a-url"), Error);
}

TEST(UrlNormalize, Idempotent) {
    std::mt19937 rng(7);
    const char* samples[] = {
        "https://x.test/a/b/../c?q=1#f", "HTTP://Y.TEST:80//double//slash/",
        "/rel/path/./x", "page?x=%2f", "https://x.test:8443/keep/port/",
    };
    for (const char* s : samples) {
        std::string once = url::normalize(s, "https://x.test/base/");
        EXPECT_EQ(url::normalize(once, once), once) << s;
    }
    // randomized paths
    for (int i = 0; i < 200; ++i) {
        std::string path = "/";
        int segs = static_cast<int>(rng() % 5);
        for (int k = 0; k < segs; ++k) {
            const char* pool[] = {"a", "b9", "..", ".", "x-y", "Z"};
            path += std::string(pool[rng() % 6]) + "/";
        }
        std::string once = url::normalize(path, "https://x.test");
        EXPECT_EQ(url::normalize(once, once), once) << path;
    }
}

TEST(UrlHelpers, OriginAndSegments) {
    EXPECT_EQ(url::origin("https://x.test:8080/a/b"), "https://x.test:8080");
    EXPECT_EQ(url::origin("https://x.test/a"), "https://x.test");
    EXPECT_TRUE(url::same_origin("https://x.test/a", "https://x.test/b?q=1"));
    EXPECT_FALSE(url::same_origin("https://x.test/a", "https://y.test/a"));
    auto segs = url::path_segments("/users/42/edit");
    ASSERT_EQ(segs.size(), 3u);
    EXPECT_EQ(segs[0], "users");
    EXPECT_EQ(segs[2], "edit");
    EXPECT_TRUE(url::path_segments("/").empty());
}
