#include <webqe/pipeline.hpp>

#include <gtest/gtest.h>

#include <filesystem>
#include <random>

using namespace webqe;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("webqe_pipe_" + std::to_string(std::random_device{}()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

pipeline::PipelineConfig fixture_config(const std::string& app, const fs::path& out) {
    pipeline::PipelineConfig config;
    config.fixture.app = app;
    config.fixture.failure_profile = "none";
    config.llm.backend = "canned";
    config.executor.mode = "simulated";
    config.executor.default_timeout_ms = 400;
    config.fixture.glitch_delay_ms = 600;
    config.fixture.registration_delay_ms = 600;
    config.artifact_dir = out.string();
    config.report.include_timings = false;
    return config;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

}  // namespace

TEST(Pipeline, FullHermeticRunProducesAllArtifacts) {
    TempDir dir;
    auto config = fixture_config("swag", dir.path / "out");
    pipeline::run_pipeline(config);
    EXPECT_TRUE(fs::is_directory(dir.path / "out" / "pages"));
    for (const char* artifact : {"site.json", "suite.json", "suite.md", "run.json", "report.json",
                                 "report.md"}) {
        EXPECT_TRUE(fs::exists(dir.path / "out" / artifact)) << artifact;
    }
    auto run = nlohmann::json::parse(slurp(dir.path / "out" / "run.json")).get<exec::RunResult>();
    EXPECT_EQ(run.case_status.size(), 10u);
    for (const auto& [id, status] : run.case_status) {
        EXPECT_EQ(status, exec::CaseStatus::passed) << id;  // profile "none": everything passes
    }
}

TEST(Pipeline, PhaseIsolationSynthesizeOnlyRewritesSiteJson) {
    TempDir dir;
    auto config = fixture_config("swag", dir.path / "out");
    pipeline::run_pipeline(config);

    auto pages_before = slurp(dir.path / "out" / "pages" / "0001.json");
    auto suite_before = slurp(dir.path / "out" / "suite.json");
    auto site_before = slurp(dir.path / "out" / "site.json");

    pipeline::run_phase(config, "synthesize");

    EXPECT_EQ(slurp(dir.path / "out" / "pages" / "0001.json"), pages_before);
    EXPECT_EQ(slurp(dir.path / "out" / "suite.json"), suite_before);
    EXPECT_EQ(slurp(dir.path / "out" / "site.json"), site_before);  // deterministic re-run
}

TEST(Pipeline, ResumabilityLaterPhasesConsumePriorArtifacts) {
    TempDir dir;
    auto config = fixture_config("medibox", dir.path / "out");
    for (const auto& phase : pipeline::phase_names()) {
        pipeline::run_phase(config, phase);
    }
    auto report = nlohmann::json::parse(slurp(dir.path / "out" / "report.json"));
    EXPECT_EQ(report["metrics"]["total_cases"], 10);
}

TEST(Pipeline, MissingInstructionIsConfigError) {
    pipeline::PipelineConfig config;
    config.crawl.base_url = "https://x.test/";
    try {
        config.validate();
        FAIL() << "expected ConfigError";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::ConfigError);
    }
}

TEST(Pipeline, ConfigValidationRules) {
    pipeline::PipelineConfig config;
    config.fixture.app = "swag";
    config.llm.backend = "replay";  // no transcript_dir
    EXPECT_THROW(config.validate(), Error);
    config.llm.backend = "live";  // no endpoint/model
    EXPECT_THROW(config.validate(), Error);
    config.llm.backend = "mock";
    config.executor.mode = "webdriver";  // no endpoint
    EXPECT_THROW(config.validate(), Error);
    config.executor.mode = "simulated";
    EXPECT_NO_THROW(config.validate());
}

TEST(Pipeline, ConfigFromJsonRoundTrip) {
    auto j = nlohmann::json::parse(R"({
      "crawl": {"base_url": "https://x.test/", "max_pages": 5, "max_depth": 2},
      "instruction_text": "check the form",
      "llm": {"backend": "mock"},
      "budget_tokens": 2048,
      "executor": {"mode": "simulated", "default_timeout_ms": 1234},
      "seed": 7,
      "artifact_dir": "artifacts"
    })");
    auto config = pipeline::config_from_json(j);
    EXPECT_EQ(config.crawl.base_url, "https://x.test/");
    EXPECT_EQ(config.crawl.max_pages, 5);
    EXPECT_EQ(config.budget_tokens, 2048);
    EXPECT_EQ(config.executor.default_timeout_ms, 1234);
    EXPECT_EQ(config.seed, 7u);
    EXPECT_EQ(config.artifact_dir, "artifacts");
    EXPECT_NO_THROW(config.validate());
}

TEST(Pipeline, RecordThenReplayRoundTrip) {
    TempDir dir;
    auto record_config = fixture_config("swag", dir.path / "out1");
    record_config.llm.record_dir = (dir.path / "transcripts").string();
    pipeline::run_pipeline(record_config);

    auto replay_config = fixture_config("swag", dir.path / "out2");
    replay_config.llm.backend = "replay";
    replay_config.llm.transcript_dir = (dir.path / "transcripts").string();
    pipeline::run_pipeline(replay_config);

    EXPECT_EQ(slurp(dir.path / "out1" / "suite.json"), slurp(dir.path / "out2" / "suite.json"));
    EXPECT_EQ(slurp(dir.path / "out1" / "site.json"), slurp(dir.path / "out2" / "site.json"));
}
