#include <webqe/reporting.hpp>

#include <gtest/gtest.h>

#include <regex>

using namespace webqe;

namespace {

exec::RunResult make_run(int total, int passed, int failed_with_timeout = 0) {
    exec::RunResult run;
    run.suite_ref = "app";
    for (int i = 1; i <= total; ++i) {
        std::string id = strings::padded_id("TC", i, 2);
        exec::StepOutcome o;
        o.case_id = id;
        o.ordinal = 1;
        o.verb = "assert_text";
        if (i <= passed) {
            o.status = exec::StepStatus::passed;
            run.case_status[id] = exec::CaseStatus::passed;
        } else if (failed_with_timeout > 0) {
            o.status = exec::StepStatus::failed;
            o.message = "timeout after 500ms waiting for response";
            o.verb = "click";
            run.case_status[id] = exec::CaseStatus::failed;
            --failed_with_timeout;
        } else {
            o.status = exec::StepStatus::failed;
            o.message = "assertion failed: expected text 'x'";
            run.case_status[id] = exec::CaseStatus::failed;
        }
        o.duration_ms = 10 + i;
        run.outcomes.push_back(o);
    }
    return run;
}

testgen::TestSuite make_suite(int total) {
    testgen::TestSuite suite;
    suite.application = "app";
    for (int i = 1; i <= total; ++i) {
        testgen::TestCase c;
        c.id = strings::padded_id("TC", i, 2);
        c.name = "case " + std::to_string(i);
        c.priority = i % 3 == 0 ? testgen::Priority::Low : testgen::Priority::High;
        c.target_page = "https://x.test/";
        suite.cases.push_back(c);
    }
    return suite;
}

site::SiteRepresentation make_site() {
    auto model = dom::build_page_model("https://x.test/", "<html><body><p>x</p></body></html>");
    site::SynthesisOptions so;
    return site::synthesize({model}, "https://x.test/", so);
}

}  // namespace

TEST(Metrics, TableRowsReproduced) {
    auto s = make_site();
    auto m1 = report::compute_metrics(make_run(10, 9), s, make_suite(10));
    EXPECT_EQ(m1.success_rate_percent, "90.00");
    EXPECT_EQ(m1.passed, 9);
    EXPECT_EQ(m1.failed, 1);

    auto m2 = report::compute_metrics(make_run(10, 7), s, make_suite(10));
    EXPECT_EQ(m2.success_rate_percent, "70.00");
}

TEST(Metrics, IdentitiesAndEdgeCases) {
    auto s = make_site();
    auto m = report::compute_metrics(make_run(7, 7), s, make_suite(7));
    EXPECT_EQ(m.success_rate_percent, "100.00");
    EXPECT_EQ(m.passed + m.failed + m.errored, m.total_cases);

    auto zero = report::compute_metrics(exec::RunResult{}, s, testgen::TestSuite{});
    EXPECT_EQ(zero.success_rate_percent, "0.00");
    EXPECT_EQ(zero.total_cases, 0);
}

TEST(Metrics, RoundingHalfUp) {
    EXPECT_EQ(report::success_rate(1, 3), "33.33");
    EXPECT_EQ(report::success_rate(2, 3), "66.67");
    EXPECT_EQ(report::success_rate(1, 8), "12.50");
    EXPECT_EQ(report::success_rate(1, 16000), "0.01");  // 0.00625 rounds to 0.01
}

TEST(Categorize, RuleOrderAndDefaults) {
    bool defaulted = false;
    EXPECT_EQ(report::categorize_message("timeout after 500ms", "click", &defaulted),
              report::ErrorCategory::timeout);
    EXPECT_EQ(report::categorize_message("no such element: #x", "click", &defaulted),
              report::ErrorCategory::ui_element);
    EXPECT_EQ(report::categorize_message("element not interactable: #x", "click", &defaulted),
              report::ErrorCategory::ui_element);
    EXPECT_EQ(report::categorize_message("endpoint returned HTTP 503", "navigate", &defaulted),
              report::ErrorCategory::server);
    EXPECT_EQ(report::categorize_message("slot 'email' has no binding", "type", &defaulted),
              report::ErrorCategory::data);
    EXPECT_EQ(report::categorize_message("expected text missing", "assert_text", &defaulted),
              report::ErrorCategory::assertion);
    EXPECT_EQ(report::categorize_message("session lost: connection reset", "click", &defaulted),
              report::ErrorCategory::session);
    // timeout beats ui_element when both keywords appear (first match wins)
    EXPECT_EQ(report::categorize_message("timeout: element not found", "click", &defaulted),
              report::ErrorCategory::timeout);
    defaulted = false;
    EXPECT_EQ(report::categorize_message("mystery failure", "click", &defaulted),
              report::ErrorCategory::assertion);
    EXPECT_TRUE(defaulted);
}

TEST(Categorize, PassedRunHasEmptyMap) {
    auto run = make_run(5, 5);
    EXPECT_TRUE(report::categorize_failures(run).empty());
}

TEST(Categorize, EachFailedCaseExactlyOnce) {
    auto run = make_run(10, 7, 1);
    auto categories = report::categorize_failures(run);
    EXPECT_EQ(categories.size(), 3u);
    int timeouts = 0;
    for (const auto& [id, c] : categories) timeouts += c == report::ErrorCategory::timeout ? 1 : 0;
    EXPECT_EQ(timeouts, 1);
}

TEST(Report, NarrativeNumbersMatchMetrics) {
    auto s = make_site();
    auto suite = make_suite(10);
    auto run = make_run(10, 9, 1);
    auto metrics = report::compute_metrics(run, s, suite);
    auto categories = report::categorize_failures(run);
    auto r = report::render_report(metrics, categories, run, s, suite);

    EXPECT_TRUE(strings::contains(r.summary_text, "9 of 10 passed (90.00%)"));
    // extract the numbers back out of the narrative and compare
    std::smatch m;
    static const std::regex re(R"((\d+) of (\d+) passed \((\d+\.\d{2})%\))");
    ASSERT_TRUE(std::regex_search(r.summary_text, m, re));
    EXPECT_EQ(std::stoi(m[1]), metrics.passed);
    EXPECT_EQ(std::stoi(m[2]), metrics.total_cases);
    EXPECT_EQ(m[3], metrics.success_rate_percent);
    EXPECT_TRUE(strings::contains(r.summary_text, "timeout"));
}

TEST(Report, EmptyRunStatesZeroCases) {
    auto s = make_site();
    auto r = report::render_report(report::compute_metrics(exec::RunResult{}, s, {}), {},
                                   exec::RunResult{}, s, {});
    EXPECT_TRUE(strings::contains(r.summary_text, "0 of 0 passed"));
}

namespace {
class FailingBackend : public llm::Backend {
public:
    std::string id() const override { return "down"; }
    std::string complete_text(const llm::PromptEnvelope&) override {
        throw Error(ErrorCode::BackendUnavailable, "no route to host");
    }
};
}  // namespace

TEST(Report, LlmProfileDegradesGracefully) {
    auto s = make_site();
    auto suite = make_suite(3);
    auto run = make_run(3, 3);
    auto metrics = report::compute_metrics(run, s, suite);
    FailingBackend down;
    report::ReportOptions options;
    options.llm_profile = true;
    options.gateway = &down;
    auto r = report::render_report(metrics, {}, run, s, suite, options);
    EXPECT_TRUE(r.llm_summary.empty());
    ASSERT_FALSE(r.notices.empty());
    EXPECT_FALSE(r.summary_text.empty());  // deterministic sections intact

    llm::MockBackend mock;
    options.gateway = &mock;
    auto r2 = report::render_report(metrics, {}, run, s, suite, options);
    EXPECT_FALSE(r2.llm_summary.empty());
}

TEST(Report, TimingFieldsToggle) {
    auto s = make_site();
    auto suite = make_suite(2);
    auto run = make_run(2, 2);
    auto metrics = report::compute_metrics(run, s, suite);
    report::ReportOptions options;
    options.include_timings = false;
    auto r = report::render_report(metrics, {}, run, s, suite, options);
    auto j = report::report_json(r);
    EXPECT_FALSE(j["metrics"].contains("mean_step_ms"));
    options.include_timings = true;
    auto r2 = report::render_report(metrics, {}, run, s, suite, options);
    EXPECT_TRUE(report::report_json(r2)["metrics"].contains("mean_step_ms"));
}

TEST(Report, MarkdownMirrorsTableLayout) {
    auto s = make_site();
    auto suite = make_suite(10);
    auto run = make_run(10, 9, 1);
    auto metrics = report::compute_metrics(run, s, suite);
    auto categories = report::categorize_failures(run);
    auto r = report::render_report(metrics, categories, run, s, suite);
    auto md = report::report_markdown(r, suite);
    EXPECT_TRUE(strings::contains(
        md, "| Application | Total Test Cases | Passed Test Cases | Failed Test Cases | Success Rate (%) |"));
    EXPECT_TRUE(strings::contains(md, "| app | 10 | 9 | 1 | 90.00 |"));
    EXPECT_TRUE(strings::contains(md, "| Criteria | Value |"));
}
