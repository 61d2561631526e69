#include <webqe/dom_model.hpp>

#include <gtest/gtest.h>

#include <set>

using namespace webqe;

namespace {

const char* kLoginHtml = R"(<!DOCTYPE html>
<html>
<head><title>Swag Labs</title></head>
<body>
  <div class="login_wrapper">
    <form id="login-form" action="/inventory.html" method="post">
      <input type="text" id="user-name" name="user-name" placeholder="Username">
      <input type="password" id="password" name="password" placeholder="Password">
      <input type="submit" id="login-button" value="Login">
      <div class="error-message-container" hidden><h3 data-test="error"></h3></div>
    </form>
  </div>
</body>
</html>)";

const char* kSignupHtml = R"(<html><head><title>Signup</title></head><body>
<form id="signup-form" action="/signin" method="post">
  <input type="text" id="fullname" name="fullname" required>
  <input type="tel" id="contact" name="contact" pattern="[0-9]{10}" required>
  <input type="email" id="email" name="email" required>
  <input type="password" id="password" name="password" minlength="8" required>
  <input type="password" id="confirm-password" name="confirm-password" required>
  <button type="submit" id="submit">Register</button>
</form>
</body></html>)";

dom::PageModel build(const char* html) {
    return dom::build_page_model("https://app.test/", html);
}

}  // namespace

TEST(DomModel, LoginPageCapturesInteractiveElements) {
    auto page = build(kLoginHtml);
    const auto* username = dom::select_unique(page, "#user-name");
    const auto* password = dom::select_unique(page, "#password");
    const auto* button = dom::select_unique(page, "#login-button");
    ASSERT_TRUE(username && password && button);
    EXPECT_TRUE(username->interactive);
    EXPECT_TRUE(password->interactive);
    EXPECT_TRUE(button->interactive);

    // error container present, hidden, labeled feedback
    bool found_error = false;
    for (const auto& e : page.elements) {
        if (e.attr("class") && strings::contains(*e.attr("class"), "error-message")) {
            found_error = true;
            EXPECT_FALSE(e.visible);
            EXPECT_EQ(e.section, dom::Section::feedback);
        }
    }
    EXPECT_TRUE(found_error);
    EXPECT_EQ(page.title, "Swag Labs");
}

TEST(DomModel, EmptyPageIsTwoNodeTree) {
    auto page = build("<html><body></body></html>");
    ASSERT_EQ(page.elements.size(), 2u);
    EXPECT_EQ(page.elements[0].element_id, "e0001");
    EXPECT_EQ(page.elements[0].tag, "html");
    EXPECT_EQ(page.elements[1].element_id, "e0002");
    EXPECT_EQ(page.elements[1].tag, "body");
    for (const auto& e : page.elements) EXPECT_FALSE(e.interactive);
}

TEST(DomModel, SignupFormFieldKinds) {
    auto page = build(kSignupHtml);
    ASSERT_EQ(page.form_fields.size(), 5u);
    std::vector<std::string> kinds;
    for (const auto& f : page.form_fields) kinds.push_back(f.input_kind);
    EXPECT_EQ(kinds, (std::vector<std::string>{"text", "tel", "email", "password", "password"}));
    EXPECT_TRUE(page.form_fields[0].required);
    EXPECT_EQ(page.form_fields[1].constraints.at("pattern"), "[0-9]{10}");
    EXPECT_EQ(page.form_fields[3].constraints.at("minlength"), "8");
}

TEST(DomModel, TreePropertyHolds) {
    auto page = build(kLoginHtml);
    size_t child_sum = 0;
    int roots = 0;
    for (const auto& e : page.elements) {
        child_sum += e.children.size();
        if (!e.parent) ++roots;
        for (const auto& cid : e.children) {
            const auto* child = page.find(cid);
            ASSERT_TRUE(child);
            EXPECT_EQ(*child->parent, e.element_id);
        }
    }
    EXPECT_EQ(roots, 1);
    EXPECT_EQ(page.elements.size(), 1 + child_sum);
}

TEST(DomModel, LocatorRoundTrip) {
    auto page = build(kLoginHtml);
    for (const auto& e : page.elements) {
        const auto* resolved = dom::select_unique(page, e.locator);
        ASSERT_TRUE(resolved) << e.locator;
        EXPECT_EQ(resolved->element_id, e.element_id) << e.locator;
    }
}

TEST(DomModel, DuplicateIdsFallBackToPath) {
    auto page = build("<div><span id=dup>a</span><span id=dup>b</span></div>");
    for (const auto& e : page.elements) {
        if (e.tag != "span") continue;
        EXPECT_NE(e.locator, "#dup");
        const auto* resolved = dom::select_unique(page, e.locator);
        ASSERT_TRUE(resolved);
        EXPECT_EQ(resolved->element_id, e.element_id);
    }
}

TEST(DomModel, SectionRules) {
    auto page = build(R"(<html><body>
      <nav><a href="/a">A</a></nav>
      <header><span>logo</span></header>
      <form><input type="text" name="q"></form>
      <div role="alert">problem</div>
      <p>plain content</p>
      <script>var x;</script>
    </body></html>)");
    auto section_of = [&](const char* tag) {
        for (const auto& e : page.elements)
            if (e.tag == tag) return e.section;
        return dom::Section::other;
    };
    EXPECT_EQ(section_of("a"), dom::Section::navigation);
    EXPECT_EQ(section_of("input"), dom::Section::form);
    EXPECT_EQ(section_of("p"), dom::Section::content);
    EXPECT_EQ(section_of("script"), dom::Section::other);
    for (const auto& e : page.elements) {
        if (e.attr("role") && *e.attr("role") == "alert") {
            EXPECT_EQ(e.section, dom::Section::feedback);
        }
    }
}

TEST(DomModel, SectionsPartitionAllElements) {
    auto page = build(kLoginHtml);
    std::set<std::string> seen;
    size_t total = 0;
    for (const auto& [label, ids] : page.sections) {
        total += ids.size();
        for (const auto& id : ids) EXPECT_TRUE(seen.insert(id).second) << "duplicate " << id;
    }
    EXPECT_EQ(total, page.elements.size());
}

TEST(DomModel, SiblingOrderPreserved) {
    auto page = build("<ul><li>1</li><li>2</li><li>3</li></ul>");
    const auto& root = page.root();
    ASSERT_EQ(root.children.size(), 3u);
    for (size_t i = 0; i < 3; ++i) {
        EXPECT_EQ(page.find(root.children[i])->text, std::to_string(i + 1));
    }
}

TEST(DomModel, TextTruncatedAt200) {
    std::string longtext(500, 'x');
    auto page = build(("<p>" + longtext + "</p>").c_str());
    EXPECT_EQ(page.root().text.size(), 200u);
}

TEST(DomModel, ThrowsOnEmptyDocument) {
    EXPECT_THROW(dom::build_page_model("https://app.test/", ""), Error);
}
