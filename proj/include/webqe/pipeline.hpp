#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "webqe/crawler.hpp"
#include "webqe/data_forge.hpp"
#include "webqe/dom_model.hpp"
#include "webqe/error.hpp"
#include "webqe/executor.hpp"
#include "webqe/fixtures.hpp"
#include "webqe/http_fetcher.hpp"
#include "webqe/llm_gateway.hpp"
#include "webqe/llm_http_backend.hpp"
#include "webqe/reporting.hpp"
#include "webqe/site_synthesis.hpp"
#include "webqe/strings.hpp"
#include "webqe/testgen.hpp"
#include "webqe/webdriver_session.hpp"

namespace webqe::pipeline {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

struct PipelineConfig {
    crawl::CrawlConfig crawl;
    std::string instruction_path;
    std::string instruction_text;  // wins over the path when non-empty
    std::string dataset_path;

    struct Llm {
        std::string backend = "mock";  // mock | replay | live | canned
        std::string endpoint;
        std::string model;
        std::string transcript_dir;
        std::string record_dir;  // non-empty: archive every prompt/response
        std::string api_key_env = "WEBQE_API_KEY";
        int context_limit_tokens = 32768;
    } llm;

    int budget_tokens = 4096;

    struct Executor {
        std::string mode = "simulated";  // simulated | webdriver
        std::string endpoint;
        int default_timeout_ms = 10000;
        int slow_timeout_ms = 30000;
        std::vector<std::string> slow_pages;
    } executor;

    struct Fixture {
        std::string app;  // "" | swag | medibox
        std::string failure_profile = "none";
        int glitch_delay_ms = 12000;
        int registration_delay_ms = 12000;
        int port = 0;  // webdriver mode: fixture server port (0 = ephemeral)
    } fixture;

    struct Report {
        bool llm_profile = false;
        bool include_timings = true;
    } report;

    uint64_t seed = 42;
    std::string artifact_dir = "out";
    std::string application;  // suite label; defaults to fixture/app host

    void validate() const {
        if (llm.backend == "replay" && llm.transcript_dir.empty()) {
            throw Error(ErrorCode::ConfigError, "replay backend requires transcript_dir");
        }
        if (llm.backend == "live" && (llm.endpoint.empty() || llm.model.empty())) {
            throw Error(ErrorCode::ConfigError, "live backend requires endpoint and model");
        }
        if (llm.backend == "canned" && fixture.app.empty()) {
            throw Error(ErrorCode::ConfigError, "canned backend requires a fixture app");
        }
        if (executor.mode == "webdriver" && executor.endpoint.empty()) {
            throw Error(ErrorCode::ConfigError, "webdriver mode requires an endpoint");
        }
        if (executor.mode != "webdriver" && executor.mode != "simulated") {
            throw Error(ErrorCode::ConfigError, "unknown executor mode: " + executor.mode);
        }
        if (fixture.app.empty()) {
            crawl.validate();
        }
        if (instruction_text.empty() && instruction_path.empty() && fixture.app.empty()) {
            throw Error(ErrorCode::ConfigError, "no instruction source configured");
        }
    }

    std::string base_url() const {
        return fixture.app.empty() ? url::normalize(crawl.base_url, crawl.base_url)
                                   : fixture::kFixtureBase;
    }

    std::string app_label() const {
        if (!application.empty()) return application;
        if (!fixture.app.empty()) return fixture.app == "swag" ? "Swag Labs" : "MediBox";
        return url::origin(base_url());
    }

    fixture::FixtureOptions fixture_options() const {
        fixture::FixtureOptions o;
        o.failure_profile = fixture.failure_profile;
        o.glitch_delay_ms = fixture.glitch_delay_ms;
        o.registration_delay_ms = fixture.registration_delay_ms;
        return o;
    }
};

inline PipelineConfig config_from_json(const json& j) {
    PipelineConfig c;
    if (j.contains("crawl")) {
        const auto& cj = j["crawl"];
        c.crawl.base_url = cj.value("base_url", "");
        c.crawl.max_pages = cj.value("max_pages", 50);
        c.crawl.max_depth = cj.value("max_depth", 3);
        c.crawl.same_origin_only = cj.value("same_origin_only", true);
        c.crawl.fetch_timeout_ms = cj.value("fetch_timeout_ms", 5000);
        c.crawl.parallelism = cj.value("parallelism", 1);
        c.crawl.user_agent = cj.value("user_agent", c.crawl.user_agent);
    }
    c.instruction_path = j.value("instruction_path", "");
    c.instruction_text = j.value("instruction_text", "");
    c.dataset_path = j.value("dataset_path", "");
    if (j.contains("llm")) {
        const auto& lj = j["llm"];
        c.llm.backend = lj.value("backend", "mock");
        c.llm.endpoint = lj.value("endpoint", "");
        c.llm.model = lj.value("model", "");
        c.llm.transcript_dir = lj.value("transcript_dir", "");
        c.llm.record_dir = lj.value("record_dir", "");
        c.llm.api_key_env = lj.value("api_key_env", "WEBQE_API_KEY");
        c.llm.context_limit_tokens = lj.value("context_limit_tokens", 32768);
    }
    c.budget_tokens = j.value("budget_tokens", 4096);
    if (j.contains("executor")) {
        const auto& ej = j["executor"];
        c.executor.mode = ej.value("mode", "simulated");
        c.executor.endpoint = ej.value("endpoint", "");
        c.executor.default_timeout_ms = ej.value("default_timeout_ms", 10000);
        c.executor.slow_timeout_ms = ej.value("slow_timeout_ms", 30000);
        c.executor.slow_pages = ej.value("slow_pages", std::vector<std::string>{});
    }
    if (j.contains("fixture")) {
        const auto& fj = j["fixture"];
        c.fixture.app = fj.value("app", "");
        c.fixture.failure_profile = fj.value("failure_profile", "none");
        c.fixture.glitch_delay_ms = fj.value("glitch_delay_ms", 12000);
        c.fixture.registration_delay_ms = fj.value("registration_delay_ms", 12000);
        c.fixture.port = fj.value("port", 0);
    }
    if (j.contains("report")) {
        c.report.llm_profile = j["report"].value("llm_profile", false);
        c.report.include_timings = j["report"].value("include_timings", true);
    }
    c.seed = j.value("seed", 42);
    c.artifact_dir = j.value("artifact_dir", "out");
    c.application = j.value("application", "");
    return c;
}

// ---------------------------------------------------------------------------
// Backend assembly
// ---------------------------------------------------------------------------

struct BackendStack {
    std::unique_ptr<llm::Backend> inner;
    std::unique_ptr<llm::Backend> wrapper;  // optional recorder
    llm::Backend& active() { return wrapper ? *wrapper : *inner; }
};

inline BackendStack make_backend(const PipelineConfig& config) {
    BackendStack stack;
    const auto& l = config.llm;
    if (l.backend == "mock") {
        stack.inner = std::make_unique<llm::MockBackend>();
    } else if (l.backend == "replay") {
        stack.inner = std::make_unique<llm::ReplayBackend>(l.transcript_dir);
    } else if (l.backend == "live") {
        stack.inner = std::make_unique<llm::HttpBackend>(l.endpoint, l.model, l.api_key_env,
                                                         l.context_limit_tokens);
    } else if (l.backend == "canned") {
        stack.inner =
            std::make_unique<fixture::CannedSuiteBackend>(config.fixture.app, config.base_url());
    } else {
        throw Error(ErrorCode::ConfigError, "unknown llm backend: " + l.backend);
    }
    if (!l.record_dir.empty()) {
        stack.wrapper = std::make_unique<llm::RecordingBackend>(*stack.inner, l.record_dir);
    }
    return stack;
}

// ---------------------------------------------------------------------------
// Artifact I/O
// ---------------------------------------------------------------------------

namespace detail {

namespace fs = std::filesystem;

inline void write_text(const fs::path& path, const std::string& text) {
    fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
    out << text;
}

inline std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot read " + path.string());
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

inline json read_json(const fs::path& path) {
    json j = json::parse(read_text(path), nullptr, false);
    if (j.is_discarded()) throw Error(ErrorCode::IoError, "malformed JSON in " + path.string());
    return j;
}

inline std::vector<crawl::PageCapture> read_captures(const fs::path& pages_dir) {
    if (!fs::is_directory(pages_dir)) {
        throw Error(ErrorCode::IoError, "missing pages/ artifact: " + pages_dir.string());
    }
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(pages_dir)) {
        if (entry.path().extension() == ".json") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    std::vector<crawl::PageCapture> captures;
    for (const auto& f : files) captures.push_back(read_json(f).get<crawl::PageCapture>());
    return captures;
}

inline std::string instruction_of(const PipelineConfig& config) {
    if (!config.instruction_text.empty()) return config.instruction_text;
    if (!config.instruction_path.empty()) return read_text(config.instruction_path);
    if (config.fixture.app == "swag") return fixture::swag_instruction();
    if (config.fixture.app == "medibox") return fixture::medibox_instruction();
    throw Error(ErrorCode::ConfigError, "no instruction source configured");
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Phases. Each one reads its inputs from the artifact directory and writes
// exactly one artifact, so later phases can be re-run against prior output.
// ---------------------------------------------------------------------------

inline void phase_crawl(const PipelineConfig& config) {
    namespace fs = std::filesystem;
    std::vector<crawl::PageCapture> captures;
    if (!config.fixture.app.empty()) {
        fixture::FixtureApp app = fixture::make_app(config.fixture.app, config.fixture_options());
        fixture::FixtureFetcher fetcher(app);
        crawl::CrawlConfig cc = config.crawl;
        cc.base_url = fixture::kFixtureBase;
        captures = crawl::crawl(cc, fetcher);
    } else {
        crawl::HttpFetcher fetcher(config.crawl.user_agent);
        captures = crawl::crawl(config.crawl, fetcher);
    }
    fs::path dir = fs::path(config.artifact_dir) / "pages";
    fs::remove_all(dir);
    fs::create_directories(dir);
    for (size_t i = 0; i < captures.size(); ++i) {
        detail::write_text(dir / (strings::padded_id("", static_cast<int>(i) + 1, 4) + ".json"),
                           json(captures[i]).dump(2) + "\n");
    }
}

inline void phase_synthesize(const PipelineConfig& config) {
    namespace fs = std::filesystem;
    auto captures = detail::read_captures(fs::path(config.artifact_dir) / "pages");
    std::vector<dom::PageModel> models;
    for (const auto& capture : captures) {
        if (capture.status != 200 || strings::trim(capture.html).empty()) continue;
        models.push_back(dom::build_page_model(capture.url, capture.html));
    }
    if (models.empty()) {
        throw Error(ErrorCode::UnparseableDocument, "no parseable pages in the crawl output");
    }
    auto backend = make_backend(config);
    site::SynthesisOptions options;
    options.budget_tokens = config.budget_tokens;
    options.gateway = &backend.active();
    auto representation = site::synthesize(models, config.base_url(), options);
    detail::write_text(fs::path(config.artifact_dir) / "site.json",
                       json(representation).dump(2) + "\n");
}

inline void phase_generate(const PipelineConfig& config) {
    namespace fs = std::filesystem;
    auto site_rep =
        detail::read_json(fs::path(config.artifact_dir) / "site.json").get<site::SiteRepresentation>();
    auto backend = make_backend(config);
    testgen::GenerationOptions options;
    options.application = config.app_label();
    auto suite =
        testgen::generate_suite(site_rep, detail::instruction_of(config), backend.active(), options);
    detail::write_text(fs::path(config.artifact_dir) / "suite.json", json(suite).dump(2) + "\n");
    detail::write_text(fs::path(config.artifact_dir) / "suite.md",
                       testgen::render_suite_markdown(suite));
}

inline void phase_bind(const PipelineConfig& config) {
    namespace fs = std::filesystem;
    fs::path suite_path = fs::path(config.artifact_dir) / "suite.json";
    json suite_json = detail::read_json(suite_path);
    auto suite = suite_json.get<testgen::TestSuite>();
    auto site_rep =
        detail::read_json(fs::path(config.artifact_dir) / "site.json").get<site::SiteRepresentation>();

    std::optional<data::Dataset> dataset;
    if (!config.dataset_path.empty()) {
        dataset = data::Dataset::from_csv_text(detail::read_text(config.dataset_path));
    } else if (config.fixture.app == "swag") {
        dataset = data::Dataset::from_csv_text(fixture::swag_dataset_csv());
    }
    auto backend = make_backend(config);
    auto bindings = data::bind_suite(suite, site_rep, dataset ? &*dataset : nullptr,
                                     &backend.active(), config.seed);
    suite_json["bindings"] = bindings;
    detail::write_text(suite_path, suite_json.dump(2) + "\n");
}

inline exec::RunResult phase_execute(const PipelineConfig& config) {
    namespace fs = std::filesystem;
    json suite_json = detail::read_json(fs::path(config.artifact_dir) / "suite.json");
    auto suite = suite_json.get<testgen::TestSuite>();
    auto bindings = suite_json.value("bindings", std::vector<data::DataBinding>{});
    auto site_rep =
        detail::read_json(fs::path(config.artifact_dir) / "site.json").get<site::SiteRepresentation>();

    exec::ExecOptions exec_options;
    exec_options.default_timeout_ms = config.executor.default_timeout_ms;
    exec_options.slow_timeout_ms = config.executor.slow_timeout_ms;
    exec_options.slow_pages.insert(config.executor.slow_pages.begin(),
                                   config.executor.slow_pages.end());
    exec_options.artifact_dir = config.artifact_dir;

    std::map<std::string, std::vector<exec::ActionCommand>> commands;
    for (const auto& testcase : suite.cases) {
        commands[testcase.id] = exec::interpret(testcase, bindings, site_rep, exec_options);
    }

    exec::RunOptions run_options;
    run_options.exec = exec_options;
    run_options.site_base_url = site_rep.base_url;

    exec::RunResult run;
    if (config.executor.mode == "simulated") {
        std::unique_ptr<exec::SimulatedApp> app;
        if (!config.fixture.app.empty()) {
            auto fixture_app = std::make_unique<fixture::FixtureApp>(
                fixture::make_app(config.fixture.app, config.fixture_options()));
            fixture_app->reset_state();
            app = std::move(fixture_app);
        } else {
            auto captures = detail::read_captures(fs::path(config.artifact_dir) / "pages");
            app = std::make_unique<exec::CaptureApp>(captures);
        }
        exec::SimulatedSession session(*app, site_rep.base_url);
        run_options.session_base_url = site_rep.base_url;
        run = exec::run_suite(suite, commands, session, run_options);
    } else {
        std::unique_ptr<fixture::FixtureServer> server;
        std::string live_base = site_rep.base_url;
        if (!config.fixture.app.empty()) {
            server = std::make_unique<fixture::FixtureServer>(
                fixture::make_app(config.fixture.app, config.fixture_options()));
            live_base = server->start(config.fixture.port);
        }
        exec::WebDriverSession session(config.executor.endpoint);
        run_options.session_base_url = live_base;
        run = exec::run_suite(suite, commands, session, run_options);
    }
    run.suite_ref = suite.application;
    detail::write_text(fs::path(config.artifact_dir) / "run.json", json(run).dump(2) + "\n");
    return run;
}

inline void phase_report(const PipelineConfig& config) {
    namespace fs = std::filesystem;
    auto run = detail::read_json(fs::path(config.artifact_dir) / "run.json").get<exec::RunResult>();
    auto suite =
        detail::read_json(fs::path(config.artifact_dir) / "suite.json").get<testgen::TestSuite>();
    auto site_rep =
        detail::read_json(fs::path(config.artifact_dir) / "site.json").get<site::SiteRepresentation>();

    auto metrics = report::compute_metrics(run, site_rep, suite);
    auto categories = report::categorize_failures(run);

    report::ReportOptions options;
    options.llm_profile = config.report.llm_profile;
    options.include_timings = config.report.include_timings;
    BackendStack backend;
    if (options.llm_profile) {
        backend = make_backend(config);
        options.gateway = &backend.active();
    }
    auto rendered = report::render_report(metrics, categories, run, site_rep, suite, options);
    detail::write_text(fs::path(config.artifact_dir) / "report.json",
                       report::report_json(rendered).dump(2) + "\n");
    detail::write_text(fs::path(config.artifact_dir) / "report.md",
                       report::report_markdown(rendered, suite));
}

// ---------------------------------------------------------------------------

inline const std::vector<std::string>& phase_names() {
    static const std::vector<std::string> names = {"crawl",   "synthesize", "generate",
                                                   "bind",    "execute",    "report"};
    return names;
}

inline void run_phase(const PipelineConfig& config, const std::string& phase) {
    if (phase == "crawl") phase_crawl(config);
    else if (phase == "synthesize") phase_synthesize(config);
    else if (phase == "generate") phase_generate(config);
    else if (phase == "bind") phase_bind(config);
    else if (phase == "execute") phase_execute(config);
    else if (phase == "report") phase_report(config);
    else throw Error(ErrorCode::ConfigError, "unknown phase: " + phase);
}

// Full flow. Each phase persists its artifact before the next starts, so a
// failure leaves prior artifacts intact.
inline void run_pipeline(const PipelineConfig& config) {
    config.validate();
    for (const auto& phase : phase_names()) run_phase(config, phase);
}

}  // namespace webqe::pipeline
