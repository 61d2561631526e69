#include <webqe/testgen.hpp>

#include <webqe/fixtures.hpp>

#include <gtest/gtest.h>

using namespace webqe;

namespace {

// small two-page site: login at the base, confirmation page behind the form
site::SiteRepresentation tiny_site() {
    std::vector<dom::PageModel> models = {
        dom::build_page_model("https://x.test/", R"(<html><body>
            <form id="f" action="/done">
              <input type="text" id="user" name="user">
              <input type="password" id="pass" name="pass">
              <input type="submit" id="go">
            </form></body></html>)"),
        dom::build_page_model("https://x.test/done", "<html><body><p>done</p></body></html>"),
    };
    site::SynthesisOptions options;
    return site::synthesize(models, "https://x.test/", options);
}

testgen::TestCase valid_case(const site::SiteRepresentation& s) {
    testgen::TestCase c;
    c.name = "Submit the form";
    c.test_type = "field_validation";
    c.target_page = "https://x.test/";
    const auto& digest = s.pages.at(c.target_page);
    std::string user_id, go_id;
    for (const auto& e : digest.element_digests) {
        if (e.attrs.count("id") && e.attrs.at("id") == "user") user_id = e.element_id;
        if (e.attrs.count("id") && e.attrs.at("id") == "go") go_id = e.element_id;
    }
    c.steps = {{1, "type", user_id, "alice"}, {2, "click", go_id, ""}};
    return c;
}

}  // namespace

TEST(RequiredTypes, EmptyInstructionYieldsPredefinedOnly) {
    auto r = testgen::derive_required_types("");
    EXPECT_TRUE(r.extracted.empty());
    EXPECT_EQ(r.required, r.predefined);
    EXPECT_EQ(r.predefined, testgen::predefined_types());
}

TEST(RequiredTypes, SwagInstructionExtractsErrorHandling) {
    auto r = testgen::derive_required_types(fixture::swag_instruction());
    EXPECT_TRUE(r.extracted.count("error_handling"));
    for (const auto& t : r.predefined) EXPECT_TRUE(r.required.count(t));
    for (const auto& t : r.extracted) EXPECT_TRUE(r.required.count(t));
}

TEST(RequiredTypes, UnionIsIdempotentWhenExtractedEqualsPredefined) {
    auto r = testgen::derive_required_types("signup navigation error message unique");
    EXPECT_EQ(r.required.size(), r.predefined.size());  // extracted is a subset here
    EXPECT_EQ(r.required, r.predefined);
}

TEST(RequiredTypes, MonotoneUnderConcatenation) {
    std::string a = "validate error messages";
    std::string b = a + " and check performance under load test";
    auto ra = testgen::derive_required_types(a);
    auto rb = testgen::derive_required_types(b);
    for (const auto& t : ra.extracted) EXPECT_TRUE(rb.extracted.count(t)) << t;
}

TEST(RequiredTypes, InstructionMinimum) {
    EXPECT_EQ(testgen::instruction_minimum("Create a minimum of 10 scripts"), 10);
    EXPECT_EQ(testgen::instruction_minimum("at least 3 cases"), 3);
    EXPECT_FALSE(testgen::instruction_minimum("plenty of tests"));
}

TEST(ValidateCase, AcceptsWellFormedCase) {
    auto s = tiny_site();
    auto c = valid_case(s);
    auto verdict = testgen::validate_case(c, s, {}, testgen::derive_required_types(""));
    EXPECT_TRUE(verdict.accepted) << strings::join(verdict.reasons, "; ");
}

TEST(ValidateCase, RejectsDanglingElement) {
    auto s = tiny_site();
    auto c = valid_case(s);
    c.steps[0].target = "e9999";
    auto verdict = testgen::validate_case(c, s, {}, testgen::derive_required_types(""));
    ASSERT_FALSE(verdict.accepted);
    bool contextual = false;
    for (const auto& r : verdict.reasons) contextual |= r.rfind("contextual:", 0) == 0;
    EXPECT_TRUE(contextual) << strings::join(verdict.reasons, "; ");
}

TEST(ValidateCase, RejectsDuplicateName) {
    auto s = tiny_site();
    auto c = valid_case(s);
    auto prior = c;
    prior.id = "TC01";
    prior.steps[0].argument = "different";
    auto verdict = testgen::validate_case(c, s, {prior}, testgen::derive_required_types(""));
    ASSERT_FALSE(verdict.accepted);
    bool uniqueness = false;
    for (const auto& r : verdict.reasons) uniqueness |= r.rfind("uniqueness:", 0) == 0;
    EXPECT_TRUE(uniqueness);
}

TEST(ValidateCase, RejectsDuplicateStepSequence) {
    auto s = tiny_site();
    auto c = valid_case(s);
    auto prior = c;
    prior.id = "TC01";
    prior.name = "A different name";
    auto verdict = testgen::validate_case(c, s, {prior}, testgen::derive_required_types(""));
    ASSERT_FALSE(verdict.accepted);
    bool uniqueness = false;
    for (const auto& r : verdict.reasons) uniqueness |= strings::contains(r, "step sequence");
    EXPECT_TRUE(uniqueness);
}

TEST(ValidateCase, RejectsUnreachableFlow) {
    auto s = tiny_site();
    auto c = valid_case(s);
    c.steps.push_back({3, "navigate", "https://x.test/orphan", ""});
    auto verdict = testgen::validate_case(c, s, {}, testgen::derive_required_types(""));
    ASSERT_FALSE(verdict.accepted);
    bool flow = false;
    for (const auto& r : verdict.reasons) flow |= r.rfind("flow:", 0) == 0;
    EXPECT_TRUE(flow);
}

TEST(ValidateCase, RejectsTypeOutsideRequiredSet) {
    auto s = tiny_site();
    auto c = valid_case(s);
    c.test_type = "chaos_monkey";
    auto verdict = testgen::validate_case(c, s, {}, testgen::derive_required_types(""));
    ASSERT_FALSE(verdict.accepted);
}

TEST(ValidateCase, AccumulatesAllFailures) {
    auto s = tiny_site();
    testgen::TestCase c;
    c.name = "";                                    // structural
    c.test_type = "chaos";                          // contextual
    c.target_page = "https://x.test/";
    c.steps = {{1, "teleport", "e0001", ""},        // structural
               {2, "navigate", "https://y.test/", ""}};  // flow
    auto verdict = testgen::validate_case(c, s, {}, testgen::derive_required_types(""));
    EXPECT_GE(verdict.reasons.size(), 4u) << strings::join(verdict.reasons, "; ");
}

TEST(AssignPriority, RetainsValidProposals) {
    testgen::TestCase c;
    c.proposed_priority = "Low";
    c.name = "Verify successful user registration";
    EXPECT_EQ(testgen::assign_priority(c), testgen::Priority::Low);
}

TEST(AssignPriority, CoercesInvalidProposals) {
    testgen::TestCase c;
    c.proposed_priority = "Critical";
    c.name = "Verify successful user registration";
    EXPECT_EQ(testgen::assign_priority(c), testgen::Priority::High);

    c.name = "Login with problem user";
    EXPECT_EQ(testgen::assign_priority(c), testgen::Priority::Low);

    c.name = "Login with invalid password";
    EXPECT_EQ(testgen::assign_priority(c), testgen::Priority::Medium);
}

TEST(GenerateSuite, MockBackendProducesValidatedSuite) {
    auto s = tiny_site();
    llm::MockBackend mock;
    auto suite = testgen::generate_suite(s, "exercise the form", mock);
    ASSERT_FALSE(suite.cases.empty());
    // self-consistency: every accepted case re-validates against the suite
    for (size_t i = 0; i < suite.cases.size(); ++i) {
        std::vector<testgen::TestCase> others;
        for (size_t k = 0; k < suite.cases.size(); ++k) {
            if (k != i) others.push_back(suite.cases[k]);
        }
        auto verdict = testgen::validate_case(suite.cases[i], s, {}, suite.required);
        EXPECT_TRUE(verdict.accepted) << strings::join(verdict.reasons, "; ");
    }
    // ids numbered in acceptance order
    for (size_t i = 0; i < suite.cases.size(); ++i) {
        EXPECT_EQ(suite.cases[i].id, strings::padded_id("TC", static_cast<int>(i) + 1, 2));
    }
    EXPECT_EQ(suite.provenance.size(), suite.cases.size());
}

TEST(GenerateSuite, EmptySiteExhausts) {
    site::SiteRepresentation s;
    s.base_url = "https://x.test/";
    llm::MockBackend mock;
    EXPECT_THROW(testgen::generate_suite(s, "", mock), Error);
}

TEST(GenerateSuite, MinimumEnforced) {
    auto s = tiny_site();
    llm::MockBackend mock;
    EXPECT_THROW(testgen::generate_suite(s, "create a minimum of 50 cases", mock), Error);
}

TEST(SuiteSerialization, RoundTrips) {
    auto s = tiny_site();
    llm::MockBackend mock;
    auto suite = testgen::generate_suite(s, "exercise the form", mock);
    nlohmann::json j = suite;
    auto back = j.get<testgen::TestSuite>();
    EXPECT_EQ(nlohmann::json(back).dump(2), j.dump(2));
    auto md = testgen::render_suite_markdown(suite);
    EXPECT_TRUE(strings::contains(md, "| Test Case ID | Test Case Name | Priority | Description |"));
    EXPECT_TRUE(strings::contains(md, suite.cases[0].id));
}
