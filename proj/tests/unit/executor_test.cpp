#include <webqe/executor.hpp>

#include <webqe/fixtures.hpp>

#include <gtest/gtest.h>

using namespace webqe;

namespace {

struct SwagWorld {
    fixture::FixtureApp app;
    site::SiteRepresentation site;

    explicit SwagWorld(const fixture::FixtureOptions& options = {}) : app(fixture::swag_labs_app(options)) {
        std::vector<dom::PageModel> models;
        for (const auto& [path, html] : app.routes) {
            std::string page_url = url::normalize(path, fixture::kFixtureBase);
            models.push_back(dom::build_page_model(page_url, html));
        }
        site::SynthesisOptions so;
        site = site::synthesize(models, fixture::kFixtureBase, so);
    }

    std::string eid(const std::string& page_path, const std::string& css) const {
        std::string page_url = url::normalize(page_path, fixture::kFixtureBase);
        auto model = dom::build_page_model(page_url, *const_cast<fixture::FixtureApp&>(app).page_html(page_path));
        return dom::select_unique(model, css)->element_id;
    }
};

testgen::TestCase login_case(const SwagWorld& w, const std::string& user, const std::string& pass) {
    testgen::TestCase c;
    c.id = "TC01";
    c.name = "login";
    c.test_type = "navigation";
    c.target_page = fixture::kFixtureBase;
    c.steps = {{1, "type", w.eid("/", "#user-name"), user},
               {2, "type", w.eid("/", "#password"), pass},
               {3, "click", w.eid("/", "#login-button"), ""},
               {4, "assert_url", url::normalize("/inventory.html", fixture::kFixtureBase), ""}};
    return c;
}

exec::RunResult run_one(SwagWorld& w, const testgen::TestCase& c, int timeout_ms = 500) {
    testgen::TestSuite suite;
    suite.application = "swag";
    suite.cases = {c};
    exec::ExecOptions opts;
    opts.default_timeout_ms = timeout_ms;
    std::map<std::string, std::vector<exec::ActionCommand>> commands;
    commands[c.id] = exec::interpret(c, {}, w.site, opts);
    exec::SimulatedSession session(w.app, fixture::kFixtureBase);
    exec::RunOptions ro;
    ro.exec = opts;
    ro.site_base_url = fixture::kFixtureBase;
    return exec::run_suite(suite, commands, session, ro);
}

}  // namespace

TEST(Interpret, ResolvesLocatorsAndSlots) {
    SwagWorld w;
    testgen::TestCase c;
    c.id = "TC01";
    c.target_page = fixture::kFixtureBase;
    c.steps = {{1, "type", w.eid("/", "#user-name"), "slot:username"},
               {2, "navigate", fixture::kFixtureBase, ""}};
    std::vector<data::DataBinding> bindings = {
        {"TC01", "username", w.eid("/", "#user-name"), "provided", "standard_user", true, ""}};
    auto commands = exec::interpret(c, bindings, w.site);
    ASSERT_EQ(commands.size(), 2u);
    EXPECT_EQ(commands[0].resolved_locator, "#user-name");
    EXPECT_EQ(commands[0].payload, "standard_user");
    EXPECT_EQ(commands[1].target_url, fixture::kFixtureBase);
    EXPECT_TRUE(commands[1].resolved_locator.empty());
}

TEST(Interpret, ZeroStepCaseYieldsNoCommands) {
    SwagWorld w;
    testgen::TestCase c;
    c.id = "TC01";
    c.target_page = fixture::kFixtureBase;
    EXPECT_TRUE(exec::interpret(c, {}, w.site).empty());
}

TEST(Interpret, UnboundSlotAndUnknownElementThrow) {
    SwagWorld w;
    testgen::TestCase c;
    c.id = "TC01";
    c.target_page = fixture::kFixtureBase;
    c.steps = {{1, "type", w.eid("/", "#user-name"), "slot:missing"}};
    EXPECT_THROW(exec::interpret(c, {}, w.site), Error);
    c.steps = {{1, "click", "e9999", ""}};
    EXPECT_THROW(exec::interpret(c, {}, w.site), Error);
}

TEST(SimulatedSession, ValidLoginNavigates) {
    SwagWorld w;
    auto run = run_one(w, login_case(w, "standard_user", "secret_sauce"));
    EXPECT_EQ(run.case_status.at("TC01"), exec::CaseStatus::passed);
}

TEST(SimulatedSession, InvalidLoginShowsError) {
    SwagWorld w;
    testgen::TestCase c;
    c.id = "TC01";
    c.name = "bad login";
    c.target_page = fixture::kFixtureBase;
    c.steps = {{1, "type", w.eid("/", "#user-name"), "nope"},
               {2, "type", w.eid("/", "#password"), "wrong"},
               {3, "click", w.eid("/", "#login-button"), ""},
               {4, "assert_visible", w.eid("/", "#error-text"), ""},
               {5, "assert_text", w.eid("/", "#error-text"), "do not match"}};
    auto run = run_one(w, c);
    EXPECT_EQ(run.case_status.at("TC01"), exec::CaseStatus::passed);
}

TEST(SimulatedSession, ErrorContainerHiddenUntilMessage) {
    SwagWorld w;
    exec::SimulatedSession session(w.app, fixture::kFixtureBase);
    session.navigate(fixture::kFixtureBase);
    auto before = session.query("#error-text", 100);
    EXPECT_FALSE(before.visible);
    session.type_text("#user-name", "x", 100);
    session.type_text("#password", "y", 100);
    session.click("#login-button", 100);
    auto after = session.query("#error-text", 100);
    EXPECT_TRUE(after.visible);
    EXPECT_TRUE(strings::contains(after.text, "do not match"));
}

TEST(SimulatedSession, GlitchDelayTimesOutAndFailsStep) {
    fixture::FixtureOptions options;
    options.failure_profile = "swag";
    options.glitch_delay_ms = 300;
    SwagWorld w(options);
    auto c = login_case(w, "performance_glitch_user", "secret_sauce");
    auto run = run_one(w, c, /*timeout_ms=*/100);
    EXPECT_EQ(run.case_status.at("TC01"), exec::CaseStatus::failed);
    // the click step carries the timeout message; the assert is skipped
    bool saw_timeout = false, saw_skipped = false;
    for (const auto& o : run.outcomes) {
        if (o.status == exec::StepStatus::failed) saw_timeout = strings::contains(o.message, "timeout");
        if (o.status == exec::StepStatus::skipped) saw_skipped = true;
    }
    EXPECT_TRUE(saw_timeout);
    EXPECT_TRUE(saw_skipped);
}

TEST(SimulatedSession, HiddenElementNotInteractable) {
    fixture::FixtureOptions options;
    options.failure_profile = "medibox";
    auto app = fixture::medibox_app(options);
    exec::SimulatedSession session(app, fixture::kFixtureBase);
    session.navigate(fixture::kFixtureBase);
    EXPECT_THROW(session.click("#signup-link", 100), exec::StepFailure);
}

TEST(SimulatedSession, GeometryBackfill) {
    SwagWorld w;
    exec::SimulatedSession session(w.app, fixture::kFixtureBase);
    session.navigate(fixture::kFixtureBase);
    auto model = dom::build_page_model(fixture::kFixtureBase, *w.app.page_html("/"));
    for (const auto& e : model.elements) EXPECT_FALSE(e.geometry.has_value());
    session.backfill_geometry(model);
    int with_geometry = 0;
    for (const auto& e : model.elements) with_geometry += e.geometry.has_value() ? 1 : 0;
    EXPECT_EQ(with_geometry, static_cast<int>(model.elements.size()));
    for (const auto& e : model.elements) {
        if (!e.geometry) continue;
        EXPECT_GE(e.geometry->width, 0);
        EXPECT_GE(e.geometry->height, 0);
    }
}

TEST(RunSuite, StatusAlgebraAndSkips) {
    SwagWorld w;
    testgen::TestCase c;
    c.id = "TC01";
    c.name = "fails midway";
    c.target_page = fixture::kFixtureBase;
    c.steps = {{1, "assert_text", w.eid("/", "#user-name"), "not-the-text"},
               {2, "click", w.eid("/", "#login-button"), ""}};
    auto run = run_one(w, c);
    EXPECT_EQ(run.case_status.at("TC01"), exec::CaseStatus::failed);
    ASSERT_EQ(run.outcomes.size(), 2u);
    EXPECT_EQ(run.outcomes[0].status, exec::StepStatus::failed);
    EXPECT_EQ(run.outcomes[1].status, exec::StepStatus::skipped);
}

TEST(RunSuite, EmptySuiteVacuouslyConsistent) {
    SwagWorld w;
    testgen::TestSuite suite;
    suite.application = "swag";
    exec::SimulatedSession session(w.app, fixture::kFixtureBase);
    exec::RunOptions ro;
    ro.site_base_url = fixture::kFixtureBase;
    auto run = exec::run_suite(suite, {}, session, ro);
    EXPECT_TRUE(run.outcomes.empty());
    EXPECT_TRUE(run.case_status.empty());
}

TEST(RunSuite, TimingMonotonicity) {
    SwagWorld w;
    auto run = run_one(w, login_case(w, "standard_user", "secret_sauce"));
    EXPECT_LE(run.started_at, run.finished_at);
    for (const auto& o : run.outcomes) EXPECT_GE(o.duration_ms, 0);
}

TEST(RunSuite, JsonRoundTrip) {
    SwagWorld w;
    auto run = run_one(w, login_case(w, "standard_user", "secret_sauce"));
    nlohmann::json j = run;
    auto back = j.get<exec::RunResult>();
    EXPECT_EQ(nlohmann::json(back).dump(), j.dump());
}

TEST(CaptureApp, FormsNavigateToAction) {
    std::vector<crawl::PageCapture> captures(2);
    captures[0].url = "https://x.test/";
    captures[0].html = R"(<html><body><form action="/next"><input type="submit" id="go"></form></body></html>)";
    captures[1].url = "https://x.test/next";
    captures[1].html = "<html><body><p>next page</p></body></html>";
    exec::CaptureApp app(captures);
    exec::SimulatedSession session(app, "https://x.test/");
    session.navigate("https://x.test/");
    session.click("#go", 100);
    EXPECT_EQ(session.current_url(), "https://x.test/next");
}
