#pragma once

#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "webqe/crawler.hpp"
#include "webqe/data_forge.hpp"
#include "webqe/dom_model.hpp"
#include "webqe/error.hpp"
#include "webqe/site_synthesis.hpp"
#include "webqe/strings.hpp"
#include "webqe/testgen.hpp"
#include "webqe/url.hpp"

namespace webqe::exec {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Commands and outcomes
// ---------------------------------------------------------------------------

struct ActionCommand {
    int ordinal = 0;
    std::string verb;
    std::string resolved_locator;  // element verbs only
    std::string element_id;
    std::string target_url;  // navigate / assert_url
    std::string payload;     // typed text, expected text, select value
    int timeout_ms = 10000;
};

enum class StepStatus { passed, failed, error, skipped };
inline const char* to_string(StepStatus s) {
    switch (s) {
        case StepStatus::passed: return "passed";
        case StepStatus::failed: return "failed";
        case StepStatus::error: return "error";
        case StepStatus::skipped: return "skipped";
    }
    return "error";
}

enum class CaseStatus { passed, failed, error };
inline const char* to_string(CaseStatus s) {
    switch (s) {
        case CaseStatus::passed: return "passed";
        case CaseStatus::failed: return "failed";
        case CaseStatus::error: return "error";
    }
    return "error";
}

struct StepOutcome {
    std::string case_id;
    int ordinal = 0;
    std::string verb;
    StepStatus status = StepStatus::passed;
    std::string message;
    long duration_ms = 0;
    std::string screenshot_ref;
};

struct RunResult {
    std::string suite_ref;
    std::string started_at;
    std::string finished_at;
    std::string environment;
    std::vector<StepOutcome> outcomes;
    std::map<std::string, CaseStatus> case_status;
};

struct ExecOptions {
    int default_timeout_ms = 10000;
    int slow_timeout_ms = 30000;
    std::set<std::string> slow_pages;
    std::string artifact_dir;  // screenshots land under <artifact_dir>/screenshots
    bool capture_screenshots = true;
};

// ---------------------------------------------------------------------------
// interpret: test steps -> tool-specific action commands
// ---------------------------------------------------------------------------

// One command per step: slot references substituted with binding values,
// element ids resolved to locators through the page digests.
inline std::vector<ActionCommand> interpret(const testgen::TestCase& testcase,
                                            const std::vector<data::DataBinding>& bindings,
                                            const site::SiteRepresentation& site,
                                            const ExecOptions& options = {}) {
    auto page_it = site.pages.find(testcase.target_page);
    const site::PageDigest* page = page_it == site.pages.end() ? nullptr : &page_it->second;

    int timeout = options.default_timeout_ms;
    if (options.slow_pages.count(testcase.target_page)) timeout = options.slow_timeout_ms;

    auto slot_value = [&](const std::string& name) -> const std::string& {
        for (const auto& b : bindings) {
            if (b.case_id == testcase.id && b.slot == name) return b.value;
        }
        throw Error(ErrorCode::UnboundSlot, testcase.id + ": slot '" + name + "' has no binding");
    };

    std::vector<ActionCommand> commands;
    for (const auto& step : testcase.steps) {
        ActionCommand cmd;
        cmd.ordinal = step.ordinal;
        cmd.verb = step.verb;
        cmd.timeout_ms = timeout;
        if (step.verb == "navigate" || step.verb == "assert_url") {
            cmd.target_url = step.target;
        } else {
            if (!page) throw Error(ErrorCode::UnknownElement, "unknown page " + testcase.target_page);
            const auto* digest = page->find_element(step.target);
            if (!digest) {
                throw Error(ErrorCode::UnknownElement,
                            testcase.id + ": element " + step.target + " not on " +
                                testcase.target_page);
            }
            cmd.element_id = step.target;
            cmd.resolved_locator = digest->locator;
        }
        if (!step.argument.empty()) {
            cmd.payload = step.argument.rfind("slot:", 0) == 0 ? slot_value(step.argument.substr(5))
                                                               : step.argument;
        }
        commands.push_back(std::move(cmd));
    }
    return commands;
}

// ---------------------------------------------------------------------------
// Sessions
// ---------------------------------------------------------------------------

// Thrown by sessions for a step-level failure (element missing, timeout,
// interaction refused). Mapped to StepStatus::failed.
struct StepFailure : std::runtime_error {
    explicit StepFailure(const std::string& message) : std::runtime_error(message) {}
};

struct ElementState {
    bool visible = false;
    bool interactive = false;
    std::string text;
    std::optional<dom::Geometry> geometry;
};

class Session {
public:
    virtual ~Session() = default;
    virtual std::string id() const = 0;
    // Navigation; throws StepFailure when the target cannot be reached.
    virtual void navigate(const std::string& absolute_url) = 0;
    virtual std::string current_url() = 0;
    // Element interaction by CSS locator; StepFailure on missing elements.
    virtual ElementState query(const std::string& locator, int timeout_ms) = 0;
    virtual void click(const std::string& locator, int timeout_ms) = 0;
    virtual void type_text(const std::string& locator, const std::string& text, int timeout_ms) = 0;
    virtual void clear_text(const std::string& locator, int timeout_ms) = 0;
    virtual void select_option(const std::string& locator, const std::string& value,
                               int timeout_ms) = 0;
    // PNG bytes in live mode; nullopt when the session cannot capture.
    virtual std::optional<std::string> screenshot() { return std::nullopt; }
    // Best-effort geometry backfill for the page model matching current_url.
    virtual void backfill_geometry(dom::PageModel&) {}
};

// ---------------------------------------------------------------------------
// Simulated session: a headless form-semantics engine over page models
// ---------------------------------------------------------------------------

struct SubmitOutcome {
    enum class Kind { navigate, error } kind = Kind::navigate;
    std::string target_path;     // navigate
    std::string error_message;   // error
    std::string error_locator;   // where the page surfaces the message
    int delay_ms = 0;            // server-side processing delay before the outcome
};

// Behavior contract a simulated session drives: page bodies by path plus
// form-submission semantics. The bundled fixture apps implement this; a
// capture-backed adapter gives plain static semantics for crawled sites.
class SimulatedApp {
public:
    virtual ~SimulatedApp() = default;
    virtual const std::string* page_html(const std::string& path) = 0;
    virtual SubmitOutcome submit(const std::string& page_path, const std::string& action_path,
                                 const std::map<std::string, std::string>& fields) = 0;
    virtual void reset_state() {}
};

class SimulatedSession : public Session {
public:
    SimulatedSession(SimulatedApp& app, std::string base_url)
        : app_(app), base_(url::normalize(base_url, base_url)) {}

    std::string id() const override { return "simulated"; }

    void navigate(const std::string& absolute_url) override {
        std::string target = url::normalize(absolute_url, base_);
        std::string path = url::path_and_query(target);
        const std::string* html = app_.page_html(url::path_of(target));
        if (!html) throw StepFailure("page not found: " + path);
        page_ = dom::build_page_model(target, *html);
        current_url_ = target;
        field_values_.clear();
        overlay_.clear();
        synthesize_geometry();
    }

    std::string current_url() override { return current_url_; }

    ElementState query(const std::string& locator, int) override {
        const auto* e = find(locator);
        if (!e) throw StepFailure("no such element: " + locator);
        return state_of(*e);
    }

    void click(const std::string& locator, int timeout_ms) override {
        const auto* e = find(locator);
        if (!e) throw StepFailure("no such element: " + locator);
        if (!state_of(*e).visible) throw StepFailure("element not interactable: " + locator);

        // anchor navigation
        if (e->tag == "a") {
            if (const auto* href = e->attr("href")) navigate(url::normalize(*href, current_url_));
            return;
        }
        // form submission via the submit control or the form itself
        const dom::ElementNode* form = enclosing_form(*e);
        bool is_submit = e->tag == "form" ||
                         (e->attr("type") && strings::to_lower(*e->attr("type")) == "submit") ||
                         (e->tag == "button" && form);
        if (e->tag == "form") form = e;
        if (!is_submit || !form) return;  // inert click

        std::map<std::string, std::string> fields;
        collect_fields(*form, fields);
        std::string action = form->attr("action") ? *form->attr("action") : current_url_;
        std::string action_url = url::normalize(action, current_url_);
        auto outcome = app_.submit(url::path_of(current_url_), url::path_of(action_url), fields);

        if (outcome.delay_ms > 0) {
            int wait = std::min(outcome.delay_ms, timeout_ms);
            std::this_thread::sleep_for(std::chrono::milliseconds(wait));
            if (outcome.delay_ms > timeout_ms) {
                throw StepFailure(strings::format("timeout after %dms waiting for response to %s",
                                                  timeout_ms, action_url.c_str()));
            }
        }
        if (outcome.kind == SubmitOutcome::Kind::navigate) {
            navigate(url::normalize(outcome.target_path, current_url_));
        } else {
            overlay_[outcome.error_locator] = outcome.error_message;
        }
    }

    void type_text(const std::string& locator, const std::string& text, int) override {
        const auto* e = find(locator);
        if (!e) throw StepFailure("no such element: " + locator);
        field_values_[e->element_id] = text;
    }

    void clear_text(const std::string& locator, int) override {
        const auto* e = find(locator);
        if (!e) throw StepFailure("no such element: " + locator);
        field_values_.erase(e->element_id);
    }

    void select_option(const std::string& locator, const std::string& value, int) override {
        const auto* e = find(locator);
        if (!e) throw StepFailure("no such element: " + locator);
        field_values_[e->element_id] = value;
    }

    void backfill_geometry(dom::PageModel& model) override {
        if (model.url != current_url_ || !page_) return;
        for (auto& e : model.elements) {
            if (const auto* mine = page_->find(e.element_id); mine && mine->geometry) {
                e.geometry = mine->geometry;
            }
        }
    }

    const dom::PageModel* current_page() const { return page_ ? &*page_ : nullptr; }

private:
    const dom::ElementNode* find(const std::string& locator) {
        if (!page_) throw StepFailure("no page loaded");
        auto matches = dom::select(*page_, locator);
        return matches.size() == 1 ? matches.front() : nullptr;
    }

    ElementState state_of(const dom::ElementNode& e) {
        ElementState s;
        s.interactive = e.interactive;
        s.geometry = e.geometry;
        // feedback containers become visible once a message lands in them
        auto it = overlay_.find(e.locator);
        if (it == overlay_.end() && e.parent) {
            const auto* parent = page_->find(*e.parent);
            if (parent) it = overlay_.find(parent->locator);
        }
        if (it != overlay_.end()) {
            s.visible = true;
            s.text = it->second;
        } else {
            s.visible = e.visible;
            auto fit = field_values_.find(e.element_id);
            s.text = fit != field_values_.end() ? fit->second : e.text;
        }
        return s;
    }

    const dom::ElementNode* enclosing_form(const dom::ElementNode& e) {
        const dom::ElementNode* cur = &e;
        while (cur) {
            if (cur->tag == "form") return cur;
            cur = cur->parent ? page_->find(*cur->parent) : nullptr;
        }
        return nullptr;
    }

    void collect_fields(const dom::ElementNode& form, std::map<std::string, std::string>& fields) {
        std::vector<const dom::ElementNode*> work{&form};
        while (!work.empty()) {
            const auto* cur = work.back();
            work.pop_back();
            for (const auto& cid : cur->children) {
                const auto* child = page_->find(cid);
                work.push_back(child);
                if (child->tag != "input" && child->tag != "select" && child->tag != "textarea")
                    continue;
                const auto* name = child->attr("name");
                if (!name) continue;
                auto it = field_values_.find(child->element_id);
                fields[*name] = it != field_values_.end()
                                    ? it->second
                                    : (child->attr("value") ? *child->attr("value") : "");
            }
        }
    }

    // Deterministic synthetic layout: elements flow top-down in document
    // order, indented by tree depth. Stands in for a renderer so geometry
    // backfill has real values to carry.
    void synthesize_geometry() {
        int y = 0;
        for (auto& e : page_->elements) {
            int depth = 0;
            const auto* cur = &e;
            while (cur->parent) {
                cur = page_->find(*cur->parent);
                ++depth;
            }
            if (!e.visible) {
                e.geometry = dom::Geometry{0, 0, 0, 0};
                continue;
            }
            e.geometry = dom::Geometry{8.0 * depth, 24.0 * y, 320, 20};
            ++y;
        }
    }

    SimulatedApp& app_;
    std::string base_;
    std::string current_url_;
    std::optional<dom::PageModel> page_;
    std::map<std::string, std::string> field_values_;  // element_id -> typed value
    std::map<std::string, std::string> overlay_;       // error locator -> message
};

// Static semantics over crawled captures: pages render, forms navigate to
// their action target, nothing is validated server-side.
class CaptureApp : public SimulatedApp {
public:
    explicit CaptureApp(const std::vector<crawl::PageCapture>& captures) {
        for (const auto& c : captures) pages_[url::path_of(c.url)] = c.html;
    }

    const std::string* page_html(const std::string& path) override {
        auto it = pages_.find(path);
        return it == pages_.end() ? nullptr : &it->second;
    }

    SubmitOutcome submit(const std::string&, const std::string& action_path,
                         const std::map<std::string, std::string>&) override {
        SubmitOutcome out;
        out.kind = SubmitOutcome::Kind::navigate;
        out.target_path = action_path;
        return out;
    }

private:
    std::map<std::string, std::string> pages_;
};

// ---------------------------------------------------------------------------
// Run loop
// ---------------------------------------------------------------------------

namespace detail {

inline std::string resolve_against(const std::string& target, const std::string& site_base,
                                   const std::string& session_base) {
    if (site_base == session_base) return target;
    if (target.rfind(url::origin(site_base), 0) == 0) {
        return url::normalize(url::path_and_query(target), session_base);
    }
    return target;
}

}  // namespace detail

struct RunOptions {
    ExecOptions exec;
    std::string site_base_url;     // URLs in the suite are relative to this
    std::string session_base_url;  // live server may sit elsewhere
};

inline void execute_command(const ActionCommand& cmd, Session& session,
                            const std::function<std::string(const std::string&)>& resolve);
inline std::string save_screenshot(Session& session, const ExecOptions& options,
                                   const std::string& case_id, int ordinal);

// Executes cases in suite order with fresh navigation to the base URL
// between cases. A failed or errored step skips the rest of its case;
// a lost session marks every remaining case error.
inline RunResult run_suite(const testgen::TestSuite& suite,
                           const std::map<std::string, std::vector<ActionCommand>>& commands,
                           Session& session, const RunOptions& options,
                           std::map<std::string, dom::PageModel>* models = nullptr) {
    RunResult run;
    run.suite_ref = suite.application;
    run.environment = session.id();
    run.started_at = strings::iso8601_utc_now();

    const std::string session_base =
        options.session_base_url.empty() ? options.site_base_url : options.session_base_url;
    auto resolve = [&](const std::string& u) {
        return detail::resolve_against(u, options.site_base_url, session_base);
    };

    bool session_lost = false;
    std::string session_lost_reason;

    for (const auto& testcase : suite.cases) {
        if (session_lost) {
            run.case_status[testcase.id] = CaseStatus::error;
            StepOutcome skip;
            skip.case_id = testcase.id;
            skip.ordinal = 0;
            skip.status = StepStatus::error;
            skip.message = "session lost: " + session_lost_reason;
            run.outcomes.push_back(skip);
            continue;
        }
        auto it = commands.find(testcase.id);
        const std::vector<ActionCommand> empty;
        const auto& case_commands = it == commands.end() ? empty : it->second;

        CaseStatus status = CaseStatus::passed;
        bool skip_rest = false;
        try {
            session.navigate(resolve(options.site_base_url));  // between-case isolation
        } catch (const StepFailure& f) {
            status = CaseStatus::error;
            skip_rest = true;
            StepOutcome outcome;
            outcome.case_id = testcase.id;
            outcome.ordinal = 0;
            outcome.status = StepStatus::error;
            outcome.message = std::string("reset navigation failed: ") + f.what();
            run.outcomes.push_back(outcome);
        }

        for (const auto& cmd : case_commands) {
            StepOutcome outcome;
            outcome.case_id = testcase.id;
            outcome.ordinal = cmd.ordinal;
            outcome.verb = cmd.verb;
            if (skip_rest) {
                outcome.status = StepStatus::skipped;
                run.outcomes.push_back(outcome);
                continue;
            }
            auto step_start = std::chrono::steady_clock::now();
            try {
                execute_command(cmd, session, resolve);
                outcome.status = StepStatus::passed;
            } catch (const StepFailure& f) {
                outcome.status = StepStatus::failed;
                outcome.message = f.what();
                status = status == CaseStatus::passed ? CaseStatus::failed : status;
                skip_rest = true;
                bool element_assertion = cmd.verb == "assert_text" || cmd.verb == "assert_visible";
                if (element_assertion && options.exec.capture_screenshots) {
                    outcome.screenshot_ref = save_screenshot(session, options.exec, testcase.id,
                                                             cmd.ordinal);
                }
            } catch (const Error& e) {
                outcome.status = StepStatus::error;
                outcome.message = e.what();
                status = CaseStatus::error;
                skip_rest = true;
                if (e.code() == ErrorCode::SessionLost) {
                    session_lost = true;
                    session_lost_reason = e.what();
                }
            }
            outcome.duration_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                                      std::chrono::steady_clock::now() - step_start)
                                      .count();
            run.outcomes.push_back(outcome);
        }
        run.case_status[testcase.id] = status;

        if (models) {
            auto mit = models->find(session.current_url());
            if (mit != models->end()) session.backfill_geometry(mit->second);
        }
    }

    run.finished_at = strings::iso8601_utc_now();
    return run;
}

inline void execute_command(const ActionCommand& cmd, Session& session,
                            const std::function<std::string(const std::string&)>& resolve) {
    if (cmd.verb == "navigate") {
        session.navigate(resolve(cmd.target_url));
        return;
    }
    if (cmd.verb == "assert_url") {
        std::string current = session.current_url();
        std::string expected = resolve(cmd.target_url);
        std::string current_norm = url::normalize(current, current);
        if (current_norm != url::normalize(expected, expected)) {
            throw StepFailure("assertion failed: expected url " + expected + ", got " + current);
        }
        return;
    }
    if (cmd.verb == "click") {
        session.click(cmd.resolved_locator, cmd.timeout_ms);
        return;
    }
    if (cmd.verb == "type") {
        session.type_text(cmd.resolved_locator, cmd.payload, cmd.timeout_ms);
        return;
    }
    if (cmd.verb == "clear") {
        session.clear_text(cmd.resolved_locator, cmd.timeout_ms);
        return;
    }
    if (cmd.verb == "select") {
        session.select_option(cmd.resolved_locator, cmd.payload, cmd.timeout_ms);
        return;
    }
    if (cmd.verb == "assert_text") {
        auto state = session.query(cmd.resolved_locator, cmd.timeout_ms);
        if (!strings::contains(state.text, cmd.payload)) {
            throw StepFailure("assertion failed: expected text '" + cmd.payload + "' in " +
                              cmd.resolved_locator + ", got '" + state.text + "'");
        }
        return;
    }
    if (cmd.verb == "assert_visible") {
        auto state = session.query(cmd.resolved_locator, cmd.timeout_ms);
        if (!state.visible) {
            throw StepFailure("assertion failed: element not visible: " + cmd.resolved_locator);
        }
        return;
    }
    if (cmd.verb == "wait") {
        auto deadline = std::chrono::steady_clock::now() + std::chrono::milliseconds(cmd.timeout_ms);
        while (true) {
            try {
                if (session.query(cmd.resolved_locator, cmd.timeout_ms).visible) return;
            } catch (const StepFailure&) {
                // not present yet
            }
            if (std::chrono::steady_clock::now() >= deadline) {
                throw StepFailure(strings::format("timeout after %dms waiting for %s",
                                                  cmd.timeout_ms, cmd.resolved_locator.c_str()));
            }
            std::this_thread::sleep_for(std::chrono::milliseconds(25));
        }
    }
    throw StepFailure("unknown verb: " + cmd.verb);
}

inline std::string save_screenshot(Session& session, const ExecOptions& options,
                                   const std::string& case_id, int ordinal) {
    auto png = session.screenshot();
    if (!png || options.artifact_dir.empty()) return "";
    namespace fs = std::filesystem;
    fs::path dir = fs::path(options.artifact_dir) / "screenshots";
    fs::create_directories(dir);
    fs::path file = dir / strings::format("%s_step%d.png", case_id.c_str(), ordinal);
    std::ofstream out(file, std::ios::binary);
    out.write(png->data(), static_cast<std::streamsize>(png->size()));
    return "screenshots/" + file.filename().string();
}

// ---------------------------------------------------------------------------
// run.json
// ---------------------------------------------------------------------------

inline void to_json(json& j, const StepOutcome& o) {
    j = json{{"case_id", o.case_id},   {"ordinal", o.ordinal},
             {"verb", o.verb},         {"status", to_string(o.status)},
             {"message", o.message},   {"duration_ms", o.duration_ms},
             {"screenshot_ref", o.screenshot_ref}};
}
inline void from_json(const json& j, StepOutcome& o) {
    j.at("case_id").get_to(o.case_id);
    j.at("ordinal").get_to(o.ordinal);
    o.verb = j.value("verb", "");
    std::string s = j.at("status").get<std::string>();
    o.status = s == "passed"  ? StepStatus::passed
               : s == "failed" ? StepStatus::failed
               : s == "skipped" ? StepStatus::skipped
                                : StepStatus::error;
    o.message = j.value("message", "");
    o.duration_ms = j.value("duration_ms", 0L);
    o.screenshot_ref = j.value("screenshot_ref", "");
}

inline void to_json(json& j, const RunResult& r) {
    json statuses = json::object();
    for (const auto& [id, s] : r.case_status) statuses[id] = to_string(s);
    j = json{{"suite_ref", r.suite_ref},   {"started_at", r.started_at},
             {"finished_at", r.finished_at}, {"environment", r.environment},
             {"outcomes", r.outcomes},     {"case_status", statuses}};
}
inline void from_json(const json& j, RunResult& r) {
    j.at("suite_ref").get_to(r.suite_ref);
    r.started_at = j.value("started_at", "");
    r.finished_at = j.value("finished_at", "");
    r.environment = j.value("environment", "");
    j.at("outcomes").get_to(r.outcomes);
    r.case_status.clear();
    for (const auto& [id, s] : j.at("case_status").items()) {
        std::string status = s.get<std::string>();
        r.case_status[id] = status == "passed"  ? CaseStatus::passed
                            : status == "failed" ? CaseStatus::failed
                                                 : CaseStatus::error;
    }
}

}  // namespace webqe::exec
