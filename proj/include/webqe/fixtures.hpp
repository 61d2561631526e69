#pragma once

#include <atomic>
#include <functional>
#include <map>
#include <memory>
#include <regex>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "webqe/crawler.hpp"
#include "webqe/dom_model.hpp"
#include "webqe/error.hpp"
#include "webqe/executor.hpp"
#include "webqe/llm_gateway.hpp"
#include "webqe/strings.hpp"
#include "webqe/url.hpp"

namespace webqe::fixture {

using nlohmann::json;

// Sentinel origin used by the in-process fetcher so hermetic artifacts carry
// stable URLs with no port in them.
inline const char* kFixtureBase = "http://fixture.local/";

struct FixtureOptions {
    std::string failure_profile = "none";  // none | swag | medibox
    int glitch_delay_ms = 12000;           // swag: performance-glitch login delay
    int registration_delay_ms = 12000;     // medibox: first successful registration delay
};

// ---------------------------------------------------------------------------
// Fixture application
// ---------------------------------------------------------------------------

struct AppState {
    std::set<std::string> taken_emails;
    std::set<std::string> taken_mobiles;
    bool registration_delay_fired = false;
};

class FixtureApp : public exec::SimulatedApp {
public:
    using Handler = std::function<exec::SubmitOutcome(const std::map<std::string, std::string>&,
                                                      AppState&)>;

    std::string name;
    FixtureOptions options;
    std::map<std::string, std::string> routes;        // path -> html
    std::map<std::string, Handler> form_handlers;     // action path -> handler
    std::map<std::string, std::string> form_sources;  // action path -> page path (server re-render)
    std::function<AppState()> initial_state = [] { return AppState{}; };
    AppState state;

    const std::string* page_html(const std::string& path) override {
        auto it = routes.find(path);
        return it == routes.end() ? nullptr : &it->second;
    }

    exec::SubmitOutcome submit(const std::string&, const std::string& action_path,
                               const std::map<std::string, std::string>& fields) override {
        auto it = form_handlers.find(action_path);
        if (it == form_handlers.end()) {
            exec::SubmitOutcome out;
            out.kind = exec::SubmitOutcome::Kind::navigate;
            out.target_path = action_path;
            return out;
        }
        return it->second(fields, state);
    }

    void reset_state() override { state = initial_state(); }
};

namespace detail {

inline bool valid_email(const std::string& v) {
    static const std::regex re(R"(^[^@\s]+@[^@\s]+\.[^@\s]+$)");
    return std::regex_match(v, re);
}
inline bool valid_mobile(const std::string& v) {
    static const std::regex re(R"(^[0-9]{10}$)");
    return std::regex_match(v, re);
}
inline bool strong_password(const std::string& v) {
    if (v.size() < 8) return false;
    bool lower = false, upper = false, digit = false, symbol = false;
    for (unsigned char c : v) {
        if (std::islower(c)) lower = true;
        else if (std::isupper(c)) upper = true;
        else if (std::isdigit(c)) digit = true;
        else symbol = true;
    }
    return lower + upper + digit + symbol >= 3;
}

inline exec::SubmitOutcome error_outcome(const std::string& locator, const std::string& message) {
    exec::SubmitOutcome out;
    out.kind = exec::SubmitOutcome::Kind::error;
    out.error_locator = locator;
    out.error_message = message;
    return out;
}

inline std::string get_field(const std::map<std::string, std::string>& fields,
                             const std::string& name) {
    auto it = fields.find(name);
    return it == fields.end() ? "" : it->second;
}

}  // namespace detail

// Login flow modeled on an e-commerce demo shop: username/password inputs,
// submit button, error container, persona accounts with distinct behavior.
inline FixtureApp swag_labs_app(const FixtureOptions& options = {}) {
    FixtureApp app;
    app.name = "swag-labs";
    app.options = options;

    app.routes["/"] = R"(<!DOCTYPE html>
<html>
<head><title>Swag Labs</title></head>
<body>
  <div class="login_logo">Swag Labs</div>
  <div class="login_wrapper">
    <form id="login-form" action="/inventory.html" method="post" novalidate>
      <input type="text" id="user-name" name="user-name" placeholder="Username">
      <input type="password" id="password" name="password" placeholder="Password">
      <input type="submit" id="login-button" name="login-button" value="Login">
      <div class="error-message-container" hidden><h3 id="error-text"></h3></div>
    </form>
  </div>
</body>
</html>
)";
    app.routes["/inventory.html"] = R"(<!DOCTYPE html>
<html>
<head><title>Swag Labs - Inventory</title></head>
<body>
  <header><div class="app_logo">Swag Labs</div><a href="/" id="logout-link">Logout</a></header>
  <div class="inventory_list" id="inventory-list">
    <div class="inventory_item"><span class="item_name">Backpack</span><span class="item_price">$29.99</span></div>
    <div class="inventory_item"><span class="item_name">Bike Light</span><span class="item_price">$9.99</span></div>
    <div class="inventory_item"><span class="item_name">Bolt T-Shirt</span><span class="item_price">$15.99</span></div>
  </div>
</body>
</html>
)";
    app.form_sources["/inventory.html"] = "/";

    const int glitch_delay = options.failure_profile == "swag" ? options.glitch_delay_ms : 0;
    app.form_handlers["/inventory.html"] = [glitch_delay](
                                               const std::map<std::string, std::string>& fields,
                                               AppState&) -> exec::SubmitOutcome {
        std::string user = detail::get_field(fields, "user-name");
        std::string pass = detail::get_field(fields, "password");
        if (user.empty())
            return detail::error_outcome("#error-text", "Epic sadface: Username is required");
        if (pass.empty())
            return detail::error_outcome("#error-text", "Epic sadface: Password is required");
        if (pass == "secret_sauce") {
            if (user == "locked_out_user") {
                return detail::error_outcome(
                    "#error-text", "Epic sadface: Sorry, this user has been locked out.");
            }
            if (user == "standard_user" || user == "problem_user" ||
                user == "performance_glitch_user") {
                exec::SubmitOutcome out;
                out.kind = exec::SubmitOutcome::Kind::navigate;
                out.target_path = "/inventory.html";
                if (user == "performance_glitch_user") out.delay_ms = glitch_delay;
                return out;
            }
        }
        return detail::error_outcome(
            "#error-text",
            "Epic sadface: Username and password do not match any user in this service");
    };
    app.reset_state();
    return app;
}

// Signup flow modeled on a healthcare portal form: full name, contact
// number, email, password and confirmation, uniqueness rules, and a
// profile-switchable set of failure injections.
inline FixtureApp medibox_app(const FixtureOptions& options = {}) {
    FixtureApp app;
    app.name = "medibox";
    app.options = options;
    const bool inject = options.failure_profile == "medibox";

    std::string signup_link = inject
        ? R"(<a href="/UserSignup" id="signup-link" hidden>User Signup</a>)"
        : R"(<a href="/UserSignup" id="signup-link">User Signup</a>)";
    app.routes["/"] = R"(<!DOCTYPE html>
<html>
<head><title>MediBox</title></head>
<body>
  <header><h1 id="app-title">MediBox</h1></header>
  <nav>)" + signup_link + R"(<a href="/signin" id="signin-link">Sign In</a></nav>
  <div class="content"><p>Care management for clinics and patients.</p></div>
</body>
</html>
)";
    app.routes["/UserSignup"] = R"(<!DOCTYPE html>
<html>
<head><title>MediBox - User Signup</title></head>
<body>
  <header><h1 id="page-heading">User Signup</h1></header>
  <form id="signup-form" action="/signin" method="post" novalidate>
    <label for="fullname">Full Name</label>
    <input type="text" id="fullname" name="fullname" required>
    <label for="contact">Contact Number</label>
    <input type="tel" id="contact" name="contact" pattern="[0-9]{10}" required>
    <label for="email">Email</label>
    <input type="email" id="email" name="email" required>
    <label for="password">Password</label>
    <input type="password" id="password" name="password" minlength="8" required>
    <label for="confirm-password">Confirm Password</label>
    <input type="password" id="confirm-password" name="confirm-password" required>
    <button type="submit" id="register-button">Register</button>
    <div class="error-message-container" hidden><h3 id="form-error"></h3></div>
  </form>
</body>
</html>
)";
    app.routes["/signin"] = R"(<!DOCTYPE html>
<html>
<head><title>MediBox - Sign In</title></head>
<body>
  <header><h1 id="page-title">Sign In</h1></header>
  <div class="content"><p>Welcome back. Use your registered email to continue.</p></div>
  <nav><a href="/" id="home-link">Home</a></nav>
</body>
</html>
)";
    app.form_sources["/signin"] = "/UserSignup";

    const int delay = options.registration_delay_ms;
    app.form_handlers["/signin"] = [inject, delay](const std::map<std::string, std::string>& fields,
                                                   AppState& state) -> exec::SubmitOutcome {
        std::string fullname = detail::get_field(fields, "fullname");
        std::string contact = detail::get_field(fields, "contact");
        std::string email = detail::get_field(fields, "email");
        std::string password = detail::get_field(fields, "password");
        std::string confirm = detail::get_field(fields, "confirm-password");
        if (fullname.empty() || contact.empty() || email.empty() || password.empty() ||
            confirm.empty()) {
            return detail::error_outcome("#form-error", "All required fields must be filled");
        }
        if (!detail::valid_email(email)) {
            return detail::error_outcome("#form-error", "Invalid email address format");
        }
        if (!detail::valid_mobile(contact)) {
            return detail::error_outcome("#form-error", "Invalid mobile number format");
        }
        if (!detail::strong_password(password)) {
            return detail::error_outcome("#form-error",
                                         "Password does not meet the strength requirements");
        }
        if (password != confirm) {
            return detail::error_outcome("#form-error", "Passwords do not match");
        }
        if (state.taken_emails.count(email)) {
            return detail::error_outcome("#form-error", "Email address is already registered");
        }
        if (state.taken_mobiles.count(contact)) {
            return detail::error_outcome("#form-error", "Mobile number is already registered");
        }
        state.taken_emails.insert(email);
        state.taken_mobiles.insert(contact);
        exec::SubmitOutcome out;
        out.kind = exec::SubmitOutcome::Kind::navigate;
        out.target_path = "/signin";
        if (inject && !state.registration_delay_fired) {
            state.registration_delay_fired = true;
            out.delay_ms = delay;  // delayed registration response
        } else if (inject) {
            out.target_path = "/";  // wrong post-registration landing page
        }
        return out;
    };
    app.initial_state = [] {
        AppState s;
        s.taken_emails.insert("taken@medibox.test");
        s.taken_mobiles.insert("0400000000");
        return s;
    };
    app.reset_state();
    return app;
}

inline FixtureApp make_app(const std::string& name, const FixtureOptions& options = {}) {
    if (name == "swag") return swag_labs_app(options);
    if (name == "medibox") return medibox_app(options);
    throw Error(ErrorCode::ConfigError, "unknown fixture app: " + name);
}

// ---------------------------------------------------------------------------
// In-process fetcher (zero sockets; canonical fixture.local URLs)
// ---------------------------------------------------------------------------

class FixtureFetcher : public crawl::Fetcher {
public:
    explicit FixtureFetcher(FixtureApp& app) : app_(app) {}

    crawl::FetchResult fetch(const std::string& absolute_url, int) override {
        const std::string* html = app_.page_html(url::path_of(absolute_url));
        if (!html) return {404, "<html><body>not found</body></html>", ""};
        return {200, *html, ""};
    }

private:
    FixtureApp& app_;
};

// ---------------------------------------------------------------------------
// Loopback HTTP server speaking the same semantics as the simulated app
// ---------------------------------------------------------------------------

inline std::map<std::string, std::string> parse_form_body(const std::string& body) {
    std::map<std::string, std::string> fields;
    auto decode = [](const std::string& s) {
        std::string out;
        for (size_t i = 0; i < s.size(); ++i) {
            if (s[i] == '+') out.push_back(' ');
            else if (s[i] == '%' && i + 2 < s.size()) {
                out.push_back(static_cast<char>(std::strtol(s.substr(i + 1, 2).c_str(), nullptr, 16)));
                i += 2;
            } else out.push_back(s[i]);
        }
        return out;
    };
    for (const auto& pair : strings::split(body, '&')) {
        if (pair.empty()) continue;
        size_t eq = pair.find('=');
        if (eq == std::string::npos) fields[decode(pair)] = "";
        else fields[decode(pair.substr(0, eq))] = decode(pair.substr(eq + 1));
    }
    return fields;
}

// Injects an error message into a form page the way the live app would
// re-render it: message text in the container, hidden attribute dropped.
inline std::string render_with_error(std::string html, const std::string& error_locator,
                                     const std::string& message) {
    std::string id = error_locator.rfind('#', 0) == 0 ? error_locator.substr(1) : error_locator;
    size_t anchor = html.find("id=\"" + id + "\"");
    if (anchor == std::string::npos) return html;
    size_t gt = html.find('>', anchor);
    if (gt != std::string::npos) html.insert(gt + 1, message);
    size_t hidden = html.rfind(" hidden", anchor);
    if (hidden != std::string::npos) html.erase(hidden, 7);
    return html;
}

class FixtureServer {
public:
    explicit FixtureServer(FixtureApp app) : app_(std::move(app)) {}
    ~FixtureServer() { stop(); }

    // Binds the loopback port (0 = ephemeral) and serves in a background
    // thread. Deterministic responses per profile.
    std::string start(int port = 0) {
        server_ = std::make_unique<httplib::Server>();
        for (const auto& [path, html] : app_.routes) {
            server_->Get(path == "/" ? std::string("/") : path,
                         [this, path](const httplib::Request&, httplib::Response& res) {
                             res.set_content(*app_.page_html(path), "text/html");
                         });
        }
        for (const auto& [action, handler] : app_.form_handlers) {
            std::string source = app_.form_sources.count(action) ? app_.form_sources[action] : "/";
            server_->Post(action, [this, action, source](const httplib::Request& req,
                                                         httplib::Response& res) {
                auto fields = parse_form_body(req.body);
                auto outcome = app_.submit(source, action, fields);
                if (outcome.delay_ms > 0) {
                    std::this_thread::sleep_for(std::chrono::milliseconds(outcome.delay_ms));
                }
                if (outcome.kind == exec::SubmitOutcome::Kind::navigate) {
                    res.status = 303;
                    res.set_header("Location", outcome.target_path);
                } else {
                    res.set_content(render_with_error(*app_.page_html(source),
                                                      outcome.error_locator, outcome.error_message),
                                    "text/html");
                }
            });
        }
        if (port == 0) {
            port_ = server_->bind_to_any_port("127.0.0.1");
            if (port_ <= 0) throw Error(ErrorCode::PortUnavailable, "no free loopback port");
        } else {
            if (!server_->bind_to_port("127.0.0.1", port)) {
                throw Error(ErrorCode::PortUnavailable, "port busy: " + std::to_string(port));
            }
            port_ = port;
        }
        thread_ = std::thread([this] { server_->listen_after_bind(); });
        server_->wait_until_ready();
        return base_url();
    }

    void stop() {
        if (server_) server_->stop();
        if (thread_.joinable()) thread_.join();
        server_.reset();
    }

    std::string base_url() const { return "http://127.0.0.1:" + std::to_string(port_) + "/"; }
    FixtureApp& app() { return app_; }

private:
    FixtureApp app_;
    std::unique_ptr<httplib::Server> server_;
    std::thread thread_;
    int port_ = 0;
};

// ---------------------------------------------------------------------------
// Instructions and datasets bundled with the fixtures
// ---------------------------------------------------------------------------

inline std::string swag_instruction() {
    return "Fetch all input fields, buttons, and labels from the login page and provide the "
           "details for each element, including their id, class, and attributes. Generate a "
           "detailed test plan for logging in with valid credentials (standard_user/secret_sauce) "
           "and invalid credentials. Include preconditions, steps, expected outcomes, and "
           "priority for each test. The suite should test both successful and failed login "
           "attempts and validate error messages. Execute the suite and provide a detailed test "
           "summary, including pass/fail results, screenshots of failures, and execution time "
           "for each test.\n";
}

inline std::string medibox_instruction() {
    return "Create and execute a minimum of 10 functional test scripts specifically for the user "
           "signup process. User Signup Endpoint URL: /UserSignup. Ensure the test cases cover a "
           "wide range of scenarios for comprehensive validation, including unique registration "
           "data, format checks, and navigation after signup.\n";
}

inline std::string swag_dataset_csv() {
    return "username,password\nstandard_user,secret_sauce\n";
}

// ---------------------------------------------------------------------------
// Canned generation backend: the deterministic source the bundled replay
// transcripts are recorded from.
// ---------------------------------------------------------------------------

class CannedSuiteBackend : public llm::Backend {
public:
    CannedSuiteBackend(const std::string& app_name, const std::string& base_url)
        : app_name_(app_name), base_(url::normalize(base_url, base_url)) {
        FixtureOptions options;
        options.failure_profile = app_name == "swag" ? "swag" : "medibox";
        FixtureApp app = make_app(app_name, options);
        for (const auto& [path, html] : app.routes) {
            models_[path] = dom::build_page_model(page_url(path), html);
        }
    }

    std::string id() const override { return "canned:" + app_name_; }

    std::string complete_text(const llm::PromptEnvelope& envelope) override {
        if (envelope.expected_schema == "page_type_v1") return page_type_reply(envelope);
        if (envelope.expected_schema == "test_cases_v1") return cases_reply(envelope);
        if (envelope.expected_schema == "summary_v1") return llm::MockBackend{}.complete_text(envelope);
        if (envelope.expected_schema == "data_mapping_v1")
            return llm::MockBackend{}.complete_text(envelope);
        return "{}";
    }

private:
    std::string page_url(const std::string& path) const {
        return path == "/" ? base_ : url::normalize(path, base_);
    }

    std::string prompt_page_path(const std::string& prompt) const {
        static const std::regex re(R"(PAGE (\S+))");
        std::smatch m;
        if (std::regex_search(prompt, m, re)) return url::path_of(m[1].str());
        return "/";
    }

    std::string page_type_reply(const llm::PromptEnvelope& envelope) const {
        std::string path = prompt_page_path(envelope.rendered_text);
        std::string type = "static";
        if (path == "/signin") type = "login";
        return json{{"page_type", type}}.dump();
    }

    // element id by CSS locator in the fixture page, resolved through the
    // same parser the pipeline uses, so ids always line up
    std::string eid(const std::string& path, const std::string& css) const {
        const auto& model = models_.at(path);
        const auto* e = dom::select_unique(model, css);
        if (!e) throw Error(ErrorCode::UnknownElement, css + " not unique in fixture " + path);
        return e->element_id;
    }

    static json step(const char* verb, const std::string& target, const std::string& argument = "") {
        json s{{"verb", verb}, {"target", target}};
        if (!argument.empty()) s["argument"] = argument;
        return s;
    }

    json swag_case(const std::string& name, const char* priority, const std::string& desc,
                   const char* type, json steps, json slots = json::array()) const {
        return json{{"name", name},           {"priority", priority}, {"description", desc},
                    {"test_type", type},      {"target_page", base_}, {"steps", steps},
                    {"expected", json::array({desc})}, {"data_slots", slots}};
    }

    std::string cases_reply(const llm::PromptEnvelope& envelope) const {
        std::string path = prompt_page_path(envelope.rendered_text);
        json cases = json::array();
        if (app_name_ == "swag" && path == "/") {
            cases = swag_cases();
        } else if (app_name_ == "medibox" && path == "/") {
            cases = medibox_home_cases();
        } else if (app_name_ == "medibox" && path == "/UserSignup") {
            cases = medibox_signup_cases();
        }
        return json{{"cases", cases}}.dump();
    }

    json swag_cases() const {
        const std::string user = eid("/", "#user-name");
        const std::string pass = eid("/", "#password");
        const std::string button = eid("/", "#login-button");
        const std::string error = eid("/", "#error-text");
        const std::string inventory = url::normalize("/inventory.html", base_);
        json cases = json::array();
        cases.push_back(swag_case(
            "Login with valid credentials", "High",
            "Test login functionality using valid username/password.", "navigation",
            json::array({step("navigate", base_), step("type", user, "slot:username"),
                         step("type", pass, "slot:password"), step("click", button),
                         step("assert_url", inventory)}),
            json::array({{{"element_id", user}, {"slot", "username"}, {"scenario", "valid"}},
                         {{"element_id", pass}, {"slot", "password"}, {"scenario", "valid"}}})));
        cases.push_back(swag_case(
            "Login with invalid username", "High",
            "Test login with invalid username and valid password.", "error_handling",
            json::array({step("type", user, "wrong_user"), step("type", pass, "secret_sauce"),
                         step("click", button), step("assert_visible", error),
                         step("assert_text", error, "do not match")})));
        cases.push_back(swag_case(
            "Login with invalid password", "High",
            "Test login with valid username and invalid password.", "error_handling",
            json::array({step("type", user, "standard_user"), step("type", pass, "wrong_password"),
                         step("click", button), step("assert_visible", error),
                         step("assert_text", error, "do not match")})));
        cases.push_back(swag_case(
            "Login with empty username", "Medium", "Validate login error when username is empty.",
            "field_validation",
            json::array({step("type", pass, "secret_sauce"), step("click", button),
                         step("assert_text", error, "Username is required")})));
        cases.push_back(swag_case(
            "Login with empty password", "Medium", "Validate login error when password is empty.",
            "field_validation",
            json::array({step("type", user, "standard_user"), step("click", button),
                         step("assert_text", error, "Password is required")})));
        cases.push_back(swag_case(
            "Login with locked-out user", "Low",
            "Test locked-out user credentials return proper error.", "error_handling",
            json::array({step("type", user, "locked_out_user"), step("type", pass, "secret_sauce"),
                         step("click", button), step("assert_text", error, "locked out")})));
        cases.push_back(swag_case(
            "Login with performance glitch user", "Medium",
            "Test login using performance_glitch_user.", "navigation",
            json::array({step("type", user, "performance_glitch_user"),
                         step("type", pass, "secret_sauce"), step("click", button),
                         step("assert_url", inventory)})));
        cases.push_back(swag_case(
            "Login with all fields empty", "Low",
            "Validate error messages for empty username/password.", "error_handling",
            json::array({step("click", button),
                         step("assert_text", error, "Username is required")})));
        cases.push_back(swag_case(
            "Verify error message for invalid input", "Medium",
            "Validate error message when credentials are invalid.", "error_handling",
            json::array({step("type", user, "bad_user"), step("type", pass, "bad_password"),
                         step("click", button), step("assert_visible", error),
                         step("assert_text", error, "do not match")})));
        cases.push_back(swag_case(
            "Login with problem user", "Low",
            "Test login using problem_user and validate issues.", "navigation",
            json::array({step("type", user, "problem_user"), step("type", pass, "secret_sauce"),
                         step("click", button), step("assert_url", inventory)})));
        return cases;
    }

    json medibox_home_cases() const {
        const std::string link = eid("/", "#signup-link");
        const std::string signup_url = url::normalize("/UserSignup", base_);
        json cases = json::array();
        cases.push_back(json{
            {"name", "Verify navigation to User Signup page"},
            {"priority", "High"},
            {"description", "Check if the User Signup page is navigable from the homepage."},
            {"test_type", "navigation"},
            {"target_page", base_},
            {"steps", json::array({step("navigate", base_), step("click", link),
                                   step("assert_url", signup_url)})},
            {"expected", json::array({"User Signup page opens"})},
            {"data_slots", json::array()}});
        return cases;
    }

    json medibox_signup_cases() const {
        const std::string page = url::normalize("/UserSignup", base_);
        const std::string signin = url::normalize("/signin", base_);
        const std::string fullname = eid("/UserSignup", "#fullname");
        const std::string contact = eid("/UserSignup", "#contact");
        const std::string email = eid("/UserSignup", "#email");
        const std::string password = eid("/UserSignup", "#password");
        const std::string confirm = eid("/UserSignup", "#confirm-password");
        const std::string button = eid("/UserSignup", "#register-button");
        const std::string error = eid("/UserSignup", "#form-error");

        auto slot = [](const std::string& element_id, const char* name, const char* scenario,
                       const char* pair_with = "") {
            json s{{"element_id", element_id}, {"slot", name}, {"scenario", scenario}};
            if (*pair_with) s["pair_with"] = pair_with;
            return s;
        };
        auto fill_steps = [&](const std::string& contact_arg, const std::string& email_arg) {
            return std::vector<json>{
                step("navigate", page),
                step("type", fullname, "slot:fullname"),
                step("type", contact, contact_arg),
                step("type", email, email_arg),
                step("type", password, "slot:password"),
                step("type", confirm, "slot:confirm_password"),
            };
        };
        auto with_suffix = [](std::vector<json> steps, std::initializer_list<json> tail) {
            for (const auto& s : tail) steps.push_back(s);
            return json(steps);
        };
        auto make_case = [&](const std::string& name, const char* priority, const std::string& desc,
                             const char* type, json steps, json slots) {
            return json{{"name", name},      {"priority", priority}, {"description", desc},
                        {"test_type", type}, {"target_page", page},  {"steps", steps},
                        {"expected", json::array({desc})}, {"data_slots", slots}};
        };
        json standard_slots = json::array({slot(fullname, "fullname", "valid"),
                                           slot(email, "email", "valid"),
                                           slot(password, "password", "valid"),
                                           slot(confirm, "confirm_password", "match", "password")});
        json cases = json::array();
        cases.push_back(make_case(
            "Verify unique mobile number registration", "High",
            "Ensure that the mobile number is unique for each user during the registration "
            "process.",
            "data_consistency",
            with_suffix(fill_steps("0400000000", "slot:email"),
                        {step("click", button), step("assert_text", error, "already registered")}),
            standard_slots));
        cases.push_back(make_case(
            "Verify unique email address registration", "High",
            "Validate that the email address is unique for each user during registration.",
            "data_consistency",
            with_suffix(fill_steps("slot:contact", "taken@medibox.test"),
                        {step("click", button), step("assert_text", error, "already registered")}),
            json::array({slot(fullname, "fullname", "valid"), slot(contact, "contact", "valid"),
                         slot(password, "password", "valid"),
                         slot(confirm, "confirm_password", "match", "password")})));
        cases.push_back(make_case(
            "Verify password and confirm password match", "High",
            "Check if the password and confirm password fields match before form submission.",
            "data_consistency",
            with_suffix(fill_steps("slot:contact", "slot:email"),
                        {step("click", button), step("assert_text", error, "do not match")}),
            json::array({slot(fullname, "fullname", "valid"), slot(contact, "contact", "valid"),
                         slot(email, "email", "valid"), slot(password, "password", "valid"),
                         slot(confirm, "confirm_password", "mismatch", "password")})));
        cases.push_back(make_case(
            "Verify required fields on User Signup form", "High",
            "Test if Email field accepts valid input.", "field_validation",
            json::array({step("navigate", page), step("click", button),
                         step("assert_text", error, "required")}),
            json::array()));
        cases.push_back(make_case(
            "Verify successful user registration", "High",
            "Ensure all required fields must be filled before form submission.", "field_validation",
            with_suffix(fill_steps("slot:contact", "slot:email"),
                        {step("click", button), step("assert_url", signin)}),
            json::array({slot(fullname, "fullname", "valid"), slot(contact, "contact", "valid"),
                         slot(email, "email", "valid"), slot(password, "password", "valid"),
                         slot(confirm, "confirm_password", "match", "password")})));
        cases.push_back(make_case(
            "Verify password strength requirement", "Medium",
            "Ensure the password meets the required strength criteria.", "field_validation",
            with_suffix(fill_steps("slot:contact", "slot:email"),
                        {step("click", button), step("assert_text", error, "strength")}),
            json::array({slot(fullname, "fullname", "valid"), slot(contact, "contact", "valid"),
                         slot(email, "email", "valid"), slot(password, "password", "invalid"),
                         slot(confirm, "confirm_password", "match", "password")})));
        cases.push_back(make_case(
            "Verify email address format validation", "High",
            "Check if the email address entered follows the correct format.", "field_validation",
            with_suffix(fill_steps("slot:contact", "slot:email"),
                        {step("click", button), step("assert_text", error, "Invalid email")}),
            json::array({slot(fullname, "fullname", "valid"), slot(contact, "contact", "valid"),
                         slot(email, "email", "invalid"), slot(password, "password", "valid"),
                         slot(confirm, "confirm_password", "match", "password")})));
        cases.push_back(make_case(
            "Verify mobile number format validation", "Medium",
            "Check if the mobile number entered follows the correct format.", "field_validation",
            with_suffix(fill_steps("slot:contact", "slot:email"),
                        {step("click", button), step("assert_text", error, "Invalid mobile")}),
            json::array({slot(fullname, "fullname", "valid"), slot(contact, "contact", "invalid"),
                         slot(email, "email", "valid"), slot(password, "password", "valid"),
                         slot(confirm, "confirm_password", "match", "password")})));
        cases.push_back(make_case(
            "Verify navigation to Sign In page after registration", "High",
            "Check if the user can navigate to the Sign In page after registration.", "navigation",
            with_suffix([&] {
                std::vector<json> steps{step("navigate", base_)};
                for (auto& s : fill_steps("slot:contact", "slot:email")) steps.push_back(s);
                return steps;
            }(),
                        {step("click", button), step("assert_url", signin)}),
            json::array({slot(fullname, "fullname", "valid"), slot(contact, "contact", "valid"),
                         slot(email, "email", "valid"), slot(password, "password", "valid"),
                         slot(confirm, "confirm_password", "match", "password")})));
        return cases;
    }

    std::string app_name_;
    std::string base_;
    std::map<std::string, dom::PageModel> models_;
};

}  // namespace webqe::fixture
