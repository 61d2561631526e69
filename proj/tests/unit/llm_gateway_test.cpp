#include <webqe/llm_gateway.hpp>

#include <gtest/gtest.h>

#include <filesystem>
#include <random>

using namespace webqe;
namespace fs = std::filesystem;

namespace {

class ScriptedBackend : public llm::Backend {
public:
    std::vector<std::string> replies;
    size_t next = 0;
    int limit = 32768;

    std::string id() const override { return "scripted"; }
    int context_limit_tokens() const override { return limit; }
    std::string complete_text(const llm::PromptEnvelope&) override {
        if (next >= replies.size()) throw Error(ErrorCode::BackendUnavailable, "out of replies");
        return replies[next++];
    }
};

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("webqe_test_" + std::to_string(std::random_device{}()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST(TokenEstimate, CeilDivFour) {
    EXPECT_EQ(llm::estimate_tokens(""), 0);
    EXPECT_EQ(llm::estimate_tokens("abc"), 1);
    EXPECT_EQ(llm::estimate_tokens("abcd"), 1);
    EXPECT_EQ(llm::estimate_tokens("abcde"), 2);
}

TEST(Sha256, KnownVector) {
    EXPECT_EQ(llm::sha256_hex(""),
              "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    EXPECT_EQ(llm::sha256_hex("abc"),
              "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Complete, ContextOverflowBeforeAnyCall) {
    ScriptedBackend backend;
    backend.limit = 10;
    auto env = llm::PromptEnvelope::make("t", std::string(100, 'x'));
    EXPECT_THROW(llm::complete(env, backend), Error);
    EXPECT_EQ(backend.next, 0u);  // no call reached the backend
}

TEST(Complete, ParsesSchemaValidReply) {
    ScriptedBackend backend;
    backend.replies = {R"(Sure! Here you go: {"page_type": "login"} Hope that helps.)"};
    auto env = llm::PromptEnvelope::make("t", "classify", {}, "page_type_v1");
    auto response = llm::complete(env, backend);
    ASSERT_TRUE(response.parsed);
    EXPECT_EQ((*response.parsed)["page_type"], "login");
    EXPECT_TRUE(response.schema_errors.empty());
}

TEST(Complete, OneRepairRepromptThenGivesUp) {
    ScriptedBackend backend;
    backend.replies = {"not json at all", "still not json"};
    auto env = llm::PromptEnvelope::make("t", "classify", {}, "page_type_v1");
    auto response = llm::complete(env, backend);
    EXPECT_FALSE(response.parsed);
    EXPECT_FALSE(response.schema_errors.empty());
    EXPECT_EQ(backend.next, 2u);  // exactly one repair attempt
}

TEST(Complete, RepairRecoversValidReply) {
    ScriptedBackend backend;
    backend.replies = {"garbage", R"({"page_type": "form"})"};
    auto env = llm::PromptEnvelope::make("t", "classify", {}, "page_type_v1");
    auto response = llm::complete(env, backend);
    ASSERT_TRUE(response.parsed);
    EXPECT_EQ((*response.parsed)["page_type"], "form");
}

TEST(MockBackend, ProducesSchemaValidSuite) {
    llm::MockBackend mock;
    std::string chunk =
        "PAGE https://x.test/ [login]\n"
        "SUMMARY: login page\n"
        "NAV: 1->https://x.test/inventory.html(via e0005)\n"
        "SECTION form: 4 elements (4 interactive)\n"
        "  e0003 input loc=#user-name type=text name=user-name interactive\n"
        "  e0004 input loc=#password type=password name=password interactive\n"
        "  e0005 input loc=#login-button type=submit interactive\n";
    auto env = llm::PromptEnvelope::make("test_cases_v1", chunk, {}, "test_cases_v1");
    auto response = llm::complete(env, mock);
    ASSERT_TRUE(response.parsed);
    auto errors = llm::validate_schema("test_cases_v1", *response.parsed);
    EXPECT_TRUE(errors.empty()) << strings::join(errors, "; ");
    bool has_valid_credentials_case = false;
    for (const auto& c : (*response.parsed)["cases"]) {
        if (strings::icontains(c["name"].get<std::string>(), "valid credentials"))
            has_valid_credentials_case = true;
    }
    EXPECT_TRUE(has_valid_credentials_case);
}

TEST(Transcripts, RecordThenReplayRoundTrip) {
    TempDir dir;
    ScriptedBackend inner;
    inner.replies = {"first reply", "second reply", "third reply"};
    llm::RecordingBackend recorder(inner, dir.path.string());

    std::vector<llm::PromptEnvelope> envelopes = {
        llm::PromptEnvelope::make("a", "prompt one"),
        llm::PromptEnvelope::make("b", "prompt two"),
        llm::PromptEnvelope::make("c", "prompt three"),
    };
    std::vector<std::string> recorded;
    for (const auto& env : envelopes) recorded.push_back(llm::complete(env, recorder).raw_text);

    llm::ReplayBackend replay(dir.path.string());
    EXPECT_EQ(replay.size(), 3u);
    for (size_t i = 0; i < envelopes.size(); ++i) {
        EXPECT_EQ(llm::complete(envelopes[i], replay).raw_text, recorded[i]);
        EXPECT_EQ(llm::complete(envelopes[i], replay).latency_ms, 0);
    }
}

TEST(Transcripts, EmptySessionEmptyArchive) {
    TempDir dir;
    llm::ReplayBackend replay(dir.path.string());
    EXPECT_EQ(replay.size(), 0u);
    auto env = llm::PromptEnvelope::make("t", "anything");
    EXPECT_THROW(llm::complete(env, replay), Error);
}

TEST(Transcripts, DigestCollisionRefused) {
    TempDir dir;
    ScriptedBackend inner;
    for (int i = 0; i < 20; ++i) inner.replies.push_back("r" + std::to_string(i));
    // one-hex-char digests force a collision quickly
    llm::RecordingBackend recorder(inner, dir.path.string(), 1);
    std::vector<std::string> prompts = {"a", "b", "c", "d", "e", "f", "g", "h", "i",
                                        "j", "k", "l", "m", "n", "o", "p", "q"};
    bool collided = false;
    try {
        for (const auto& p : prompts) {
            recorder.complete_text(llm::PromptEnvelope::make("t", p));
        }
    } catch (const Error& e) {
        collided = true;
        EXPECT_EQ(e.code(), ErrorCode::DigestCollision);
    }
    EXPECT_TRUE(collided);  // 17 prompts into 16 buckets must collide
}

TEST(SchemaValidation, RejectsMalformedCases) {
    auto j = nlohmann::json::parse(R"({"cases": [{"name": "x"}]})");
    auto errors = llm::validate_schema("test_cases_v1", j);
    EXPECT_FALSE(errors.empty());

    auto ok = nlohmann::json::parse(R"({"cases": [{
        "name": "x", "test_type": "navigation", "target_page": "https://x.test/",
        "steps": [{"verb": "navigate", "target": "https://x.test/"}]}]})");
    EXPECT_TRUE(llm::validate_schema("test_cases_v1", ok).empty());

    auto bad_verb = nlohmann::json::parse(R"({"cases": [{
        "name": "x", "test_type": "navigation", "target_page": "https://x.test/",
        "steps": [{"verb": "teleport", "target": "https://x.test/"}]}]})");
    EXPECT_FALSE(llm::validate_schema("test_cases_v1", bad_verb).empty());
}

TEST(ExtractJson, HandlesFencesAndNesting) {
    auto j = llm::extract_json("```json\n{\"a\": {\"b\": \"}\"}}\n```");
    ASSERT_TRUE(j);
    EXPECT_EQ((*j)["a"]["b"], "}");
    EXPECT_FALSE(llm::extract_json("no json here"));
}
