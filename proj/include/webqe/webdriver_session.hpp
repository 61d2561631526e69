#pragma once

#include <chrono>
#include <thread>

#include "webqe/executor.hpp"
#include "webqe/webdriver.hpp"

namespace webqe::exec {

// Session implementation speaking the WebDriver wire protocol. Element
// lookups poll until the timeout so slow pages get a fair wait.
class WebDriverSession : public Session {
public:
    explicit WebDriverSession(const std::string& endpoint, int poll_interval_ms = 50)
        : client_(endpoint), poll_interval_ms_(poll_interval_ms) {
        client_.start_session();
    }
    ~WebDriverSession() override {
        try {
            client_.delete_session();
        } catch (...) {
        }
    }

    std::string id() const override { return "webdriver"; }

    void navigate(const std::string& absolute_url) override { client_.navigate(absolute_url); }

    std::string current_url() override { return client_.current_url(); }

    ElementState query(const std::string& locator, int timeout_ms) override {
        auto el = wait_for(locator, timeout_ms);
        ElementState s;
        s.visible = client_.displayed(el);
        s.interactive = true;
        s.text = client_.text(el);
        auto r = client_.rect(el);
        if (r.is_object()) {
            s.geometry = dom::Geometry{r.value("x", 0.0), r.value("y", 0.0), r.value("width", 0.0),
                                       r.value("height", 0.0)};
        }
        return s;
    }

    void click(const std::string& locator, int timeout_ms) override {
        auto el = wait_for(locator, timeout_ms);
        if (!client_.displayed(el)) throw StepFailure("element not interactable: " + locator);
        auto deadline =
            std::chrono::steady_clock::now() + std::chrono::milliseconds(timeout_ms);
        client_.click(el);
        // navigation triggered by the click must settle within the timeout
        while (std::chrono::steady_clock::now() < deadline) {
            try {
                client_.current_url();
                return;
            } catch (const Error&) {
                std::this_thread::sleep_for(std::chrono::milliseconds(poll_interval_ms_));
            }
        }
        throw StepFailure(strings::format("timeout after %dms waiting for response to click %s",
                                          timeout_ms, locator.c_str()));
    }

    void type_text(const std::string& locator, const std::string& text, int timeout_ms) override {
        auto el = wait_for(locator, timeout_ms);
        client_.clear(el);
        client_.send_keys(el, text);
    }

    void clear_text(const std::string& locator, int timeout_ms) override {
        client_.clear(wait_for(locator, timeout_ms));
    }

    void select_option(const std::string& locator, const std::string& value,
                       int timeout_ms) override {
        auto el = wait_for(locator, timeout_ms);
        client_.send_keys(el, value);
    }

    std::optional<std::string> screenshot() override {
        try {
            return client_.screenshot_png();
        } catch (const Error&) {
            return std::nullopt;
        }
    }

    void backfill_geometry(dom::PageModel& model) override {
        for (auto& e : model.elements) {
            if (!e.interactive) continue;  // keep the request count proportional
            try {
                auto el = client_.find_element(e.locator);
                if (!el) continue;
                auto r = client_.rect(*el);
                e.geometry = dom::Geometry{r.value("x", 0.0), r.value("y", 0.0),
                                           r.value("width", 0.0), r.value("height", 0.0)};
            } catch (const Error&) {
                return;
            }
        }
    }

private:
    webdriver::ElementHandle wait_for(const std::string& locator, int timeout_ms) {
        auto deadline = std::chrono::steady_clock::now() + std::chrono::milliseconds(timeout_ms);
        while (true) {
            auto el = client_.find_element(locator);
            if (el) return *el;
            if (std::chrono::steady_clock::now() >= deadline) {
                throw StepFailure("no such element: " + locator);
            }
            std::this_thread::sleep_for(std::chrono::milliseconds(poll_interval_ms_));
        }
    }

    webdriver::Client client_;
    int poll_interval_ms_;
};

}  // namespace webqe::exec
