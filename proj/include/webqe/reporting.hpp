#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "webqe/executor.hpp"
#include "webqe/llm_gateway.hpp"
#include "webqe/site_synthesis.hpp"
#include "webqe/strings.hpp"
#include "webqe/testgen.hpp"

namespace webqe::report {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Metrics
// ---------------------------------------------------------------------------

struct Metrics {
    int total_cases = 0;
    int passed = 0;
    int failed = 0;
    int errored = 0;
    std::string success_rate_percent = "0.00";  // fixed two decimals, half-up
    double coverage = 0;                        // pages touched / pages known
    int pages_touched = 0;
    int pages_total = 0;
    std::map<std::string, int> per_priority_total;
    std::map<std::string, int> per_priority_passed;
    double mean_step_ms = 0;
    double p50_step_ms = 0;
    double p95_step_ms = 0;
};

// 100 * passed / total, rounded half-up to two decimals ("90.00", "70.00").
inline std::string success_rate(int passed, int total) {
    if (total <= 0) return "0.00";
    long long scaled = std::llround(10000.0 * passed / total);
    return strings::format("%lld.%02lld", scaled / 100, scaled % 100);
}

inline Metrics compute_metrics(const exec::RunResult& run, const site::SiteRepresentation& site,
                               const testgen::TestSuite& suite) {
    Metrics m;
    m.total_cases = static_cast<int>(run.case_status.size());
    for (const auto& [id, status] : run.case_status) {
        switch (status) {
            case exec::CaseStatus::passed: ++m.passed; break;
            case exec::CaseStatus::failed: ++m.failed; break;
            case exec::CaseStatus::error: ++m.errored; break;
        }
    }
    m.success_rate_percent = success_rate(m.passed, m.total_cases);

    std::set<std::string> touched;
    for (const auto& c : suite.cases) {
        if (run.case_status.count(c.id)) touched.insert(c.target_page);
        std::string priority = testgen::to_string(c.priority);
        ++m.per_priority_total[priority];
        auto it = run.case_status.find(c.id);
        if (it != run.case_status.end() && it->second == exec::CaseStatus::passed)
            ++m.per_priority_passed[priority];
    }
    m.pages_touched = static_cast<int>(touched.size());
    m.pages_total = static_cast<int>(site.pages.size());
    m.coverage = m.pages_total > 0 ? static_cast<double>(m.pages_touched) / m.pages_total : 0;

    std::vector<long> durations;
    for (const auto& o : run.outcomes) {
        if (o.status == exec::StepStatus::skipped) continue;
        durations.push_back(o.duration_ms);
    }
    if (!durations.empty()) {
        std::sort(durations.begin(), durations.end());
        double sum = 0;
        for (long d : durations) sum += static_cast<double>(d);
        m.mean_step_ms = sum / static_cast<double>(durations.size());
        m.p50_step_ms = static_cast<double>(durations[durations.size() / 2]);
        m.p95_step_ms = static_cast<double>(durations[std::min(durations.size() - 1,
                                                               durations.size() * 95 / 100)]);
    }
    return m;
}

// ---------------------------------------------------------------------------
// Error categorization
// ---------------------------------------------------------------------------

enum class ErrorCategory { ui_element, timeout, assertion, server, data, session };

inline const char* to_string(ErrorCategory c) {
    switch (c) {
        case ErrorCategory::ui_element: return "ui_element";
        case ErrorCategory::timeout: return "timeout";
        case ErrorCategory::assertion: return "assertion";
        case ErrorCategory::server: return "server";
        case ErrorCategory::data: return "data";
        case ErrorCategory::session: return "session";
    }
    return "assertion";
}

// First-match-wins rules over the failing step's message and verb:
// timeout keywords, locator misses, HTTP 5xx, data constraints, assertion
// verbs, session loss. Unmatched failures default to assertion and are
// counted so the report can flag them.
inline ErrorCategory categorize_message(const std::string& message, const std::string& verb,
                                        bool* defaulted = nullptr) {
    std::string m = strings::to_lower(message);
    if (strings::contains(m, "timeout") || strings::contains(m, "timed out"))
        return ErrorCategory::timeout;
    if (strings::contains(m, "no such element") || strings::contains(m, "not interactable") ||
        strings::contains(m, "not found") || strings::contains(m, "inaccessible"))
        return ErrorCategory::ui_element;
    if (strings::contains(m, "http 5") || strings::contains(m, "server error") ||
        strings::contains(m, "status 5"))
        return ErrorCategory::server;
    if (strings::contains(m, "constraint") || strings::contains(m, "unbound") ||
        strings::contains(m, "binding"))
        return ErrorCategory::data;
    if (verb.rfind("assert", 0) == 0) return ErrorCategory::assertion;
    if (strings::contains(m, "session")) return ErrorCategory::session;
    if (defaulted) *defaulted = true;
    return ErrorCategory::assertion;
}

// Primary category per failed/errored case, decided by its first non-passed
// step.
inline std::map<std::string, ErrorCategory> categorize_failures(const exec::RunResult& run,
                                                                int* defaulted_count = nullptr) {
    std::map<std::string, ErrorCategory> categories;
    for (const auto& [case_id, status] : run.case_status) {
        if (status == exec::CaseStatus::passed) continue;
        for (const auto& o : run.outcomes) {
            if (o.case_id != case_id) continue;
            if (o.status != exec::StepStatus::failed && o.status != exec::StepStatus::error) continue;
            bool defaulted = false;
            categories[case_id] = categorize_message(o.message, o.verb, &defaulted);
            if (defaulted && defaulted_count) ++(*defaulted_count);
            break;
        }
    }
    return categories;
}

// ---------------------------------------------------------------------------
// Report
// ---------------------------------------------------------------------------

struct Report {
    Metrics metrics;
    std::map<std::string, std::string> categorized_failures;  // case_id -> category
    std::vector<json> failure_rows;  // case, step, message, screenshot
    std::string summary_text;        // deterministic narrative
    std::string llm_summary;         // appended in the llm profile
    std::vector<std::string> notices;
    std::vector<std::string> artifact_index;
    std::string suite_ref;
    std::string run_ref;
    bool include_timings = true;
};

struct ReportOptions {
    bool llm_profile = false;
    llm::Backend* gateway = nullptr;
    bool include_timings = true;  // off for byte-stable artifacts
};

namespace detail {

inline std::string deterministic_narrative(const Metrics& m,
                                           const std::map<std::string, ErrorCategory>& categories,
                                           const testgen::TestSuite& suite,
                                           const site::SiteRepresentation& site,
                                           const exec::RunResult& run) {
    std::string out;
    out += strings::format("%d of %d passed (%s%%). %d failed, %d errored.\n", m.passed,
                           m.total_cases, m.success_rate_percent.c_str(), m.failed, m.errored);
    out += strings::format("Coverage: %d of %d pages touched.\n", m.pages_touched, m.pages_total);

    if (!categories.empty()) {
        std::map<std::string, std::vector<std::string>> by_category;
        for (const auto& [case_id, category] : categories) {
            by_category[to_string(category)].push_back(case_id);
        }
        out += "Failures by category:\n";
        for (const auto& [category, ids] : by_category) {
            out += "  " + category + ": " + strings::join(ids, ", ") + "\n";
        }
    }

    // per-page rollup, cross-referenced with the site summaries
    std::map<std::string, std::pair<int, int>> per_page;  // url -> {cases, passed}
    for (const auto& c : suite.cases) {
        auto it = run.case_status.find(c.id);
        if (it == run.case_status.end()) continue;
        auto& entry = per_page[c.target_page];
        ++entry.first;
        if (it->second == exec::CaseStatus::passed) ++entry.second;
    }
    out += "Per-page results:\n";
    for (const auto& [page_url, counts] : per_page) {
        out += strings::format("  %s: %d of %d passed", page_url.c_str(), counts.second,
                               counts.first);
        auto pit = site.pages.find(page_url);
        if (pit != site.pages.end()) out += " [" + pit->second.summary + "]";
        out += "\n";
    }
    if (suite.priority_overrides > 0) {
        out += strings::format("Priority overrides applied during generation: %d.\n",
                               suite.priority_overrides);
    }
    return out;
}

}  // namespace detail

// The deterministic narrative is always present; the llm profile appends a
// gateway summary after it, and gateway trouble degrades to the hermetic
// output with a notice.
inline Report render_report(const Metrics& metrics,
                            const std::map<std::string, ErrorCategory>& categories,
                            const exec::RunResult& run, const site::SiteRepresentation& site,
                            const testgen::TestSuite& suite, const ReportOptions& options = {}) {
    Report report;
    report.metrics = metrics;
    report.suite_ref = suite.application;
    report.run_ref = run.suite_ref;
    report.include_timings = options.include_timings;
    for (const auto& [case_id, category] : categories) {
        report.categorized_failures[case_id] = to_string(category);
    }
    for (const auto& o : run.outcomes) {
        if (o.status != exec::StepStatus::failed && o.status != exec::StepStatus::error) continue;
        json row{{"case_id", o.case_id},
                 {"ordinal", o.ordinal},
                 {"message", o.message},
                 {"screenshot_ref", o.screenshot_ref}};
        report.failure_rows.push_back(row);
        if (!o.screenshot_ref.empty()) report.artifact_index.push_back(o.screenshot_ref);
    }
    report.summary_text = detail::deterministic_narrative(metrics, categories, suite, site, run);

    if (options.llm_profile && options.gateway) {
        std::string prompt =
            "Summarize this web test run for a non-testing audience in 3 sentences.\n\nRESULTS:\n" +
            report.summary_text + "\nSITE CONTEXT:\n";
        for (const auto& [page_url, digest] : site.pages) {
            prompt += "  " + page_url + ": " + digest.summary + "\n";
        }
        prompt += "\nReturn JSON {\"summary\": \"...\"}.";
        try {
            auto response = llm::complete(
                llm::PromptEnvelope::make("summary_v1", prompt, {run.suite_ref}, "summary_v1"),
                *options.gateway);
            if (response.parsed) {
                report.llm_summary = (*response.parsed)["summary"].get<std::string>();
            } else {
                report.notices.push_back("llm summary skipped: reply failed schema validation");
            }
        } catch (const Error& e) {
            report.notices.push_back(std::string("llm summary unavailable: ") + e.what());
        }
    }
    return report;
}

inline json report_json(const Report& r) {
    json metrics{{"total_cases", r.metrics.total_cases},
                 {"passed", r.metrics.passed},
                 {"failed", r.metrics.failed},
                 {"errored", r.metrics.errored},
                 {"success_rate_percent", r.metrics.success_rate_percent},
                 {"coverage", r.metrics.coverage},
                 {"pages_touched", r.metrics.pages_touched},
                 {"pages_total", r.metrics.pages_total},
                 {"per_priority_total", r.metrics.per_priority_total},
                 {"per_priority_passed", r.metrics.per_priority_passed}};
    if (r.include_timings) {
        metrics["mean_step_ms"] = r.metrics.mean_step_ms;
        metrics["p50_step_ms"] = r.metrics.p50_step_ms;
        metrics["p95_step_ms"] = r.metrics.p95_step_ms;
    }
    return json{{"metrics", metrics},
                {"categorized_failures", r.categorized_failures},
                {"failures", r.failure_rows},
                {"summary_text", r.summary_text},
                {"llm_summary", r.llm_summary},
                {"notices", r.notices},
                {"artifact_index", r.artifact_index},
                {"suite_ref", r.suite_ref},
                {"run_ref", r.run_ref}};
}

inline std::string report_markdown(const Report& r, const testgen::TestSuite& suite) {
    std::string out = "# Test Report: " + r.suite_ref + "\n\n";
    out += "## Execution Success Rate\n\n";
    out += "| Application | Total Test Cases | Passed Test Cases | Failed Test Cases | Success Rate (%) |\n";
    out += "|---|---|---|---|---|\n";
    out += strings::format("| %s | %d | %d | %d | %s |\n\n", r.suite_ref.c_str(),
                           r.metrics.total_cases, r.metrics.passed,
                           r.metrics.failed + r.metrics.errored,
                           r.metrics.success_rate_percent.c_str());
    out += "## Summary\n\n";
    out += "| Criteria | Value |\n|---|---|\n";
    out += strings::format("| Execution success rate | %s%% |\n", r.metrics.success_rate_percent.c_str());
    out += strings::format("| Page coverage | %d of %d |\n", r.metrics.pages_touched,
                           r.metrics.pages_total);
    out += strings::format("| Priority overrides during generation | %d |\n", suite.priority_overrides);
    out += "\n## Narrative\n\n```\n" + r.summary_text + "```\n";
    if (!r.llm_summary.empty()) out += "\n## Plain-language summary\n\n" + r.llm_summary + "\n";
    if (!r.categorized_failures.empty()) {
        out += "\n## Failures\n\n| Case | Category | Step | Message | Screenshot |\n|---|---|---|---|---|\n";
        for (const auto& row : r.failure_rows) {
            std::string case_id = row.value("case_id", "");
            std::string category;
            auto it = r.categorized_failures.find(case_id);
            if (it != r.categorized_failures.end()) category = it->second;
            out += strings::format("| %s | %s | %d | %s | %s |\n", case_id.c_str(), category.c_str(),
                                   row.value("ordinal", 0), row.value("message", "").c_str(),
                                   row.value("screenshot_ref", "").c_str());
        }
    }
    if (!r.notices.empty()) {
        out += "\n## Notices\n\n";
        for (const auto& n : r.notices) out += "- " + n + "\n";
    }
    if (r.include_timings) {
        out += strings::format("\nStep timing: mean %.1fms, p50 %.0fms, p95 %.0fms.\n",
                               r.metrics.mean_step_ms, r.metrics.p50_step_ms, r.metrics.p95_step_ms);
    }
    return out;
}

}  // namespace webqe::report
