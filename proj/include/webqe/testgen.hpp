#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <regex>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "webqe/error.hpp"
#include "webqe/llm_gateway.hpp"
#include "webqe/site_synthesis.hpp"
#include "webqe/strings.hpp"

namespace webqe::testgen {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Required test types: predefined set united with instruction-extracted labels
// ---------------------------------------------------------------------------

inline const std::set<std::string>& predefined_types() {
    static const std::set<std::string> e = {"field_validation", "error_handling", "navigation",
                                            "data_consistency"};
    return e;
}

struct RequiredTypes {
    std::set<std::string> predefined;  // E
    std::set<std::string> extracted;   // A
    std::set<std::string> required;    // R = E ∪ A

    bool contains(const std::string& t) const { return required.count(t) > 0; }
};

// Versioned phrase lexicon for instruction extraction. Matching is a
// monotone keyword scan: adding sentences can only add members to A.
inline const std::vector<std::pair<std::string, std::vector<std::string>>>& extraction_lexicon() {
    static const std::vector<std::pair<std::string, std::vector<std::string>>> lexicon = {
        {"error message", {"error_handling"}},
        {"validate error", {"error_handling"}},
        {"failed login", {"error_handling"}},
        {"invalid", {"error_handling"}},
        {"signup", {"field_validation", "data_consistency"}},
        {"sign up", {"field_validation", "data_consistency"}},
        {"registration", {"field_validation", "data_consistency"}},
        {"register", {"field_validation", "data_consistency"}},
        {"navigate", {"navigation"}},
        {"navigation", {"navigation"}},
        {"redirect", {"navigation"}},
        {"password strength", {"field_validation"}},
        {"unique", {"data_consistency"}},
        {"performance", {"performance"}},
        {"load test", {"performance"}},
        {"security", {"security"}},
        {"accessibility", {"accessibility"}},
        {"usability", {"usability"}},
    };
    return lexicon;
}

inline RequiredTypes derive_required_types(const std::string& instruction_text,
                                           const std::set<std::string>& predefined =
                                               predefined_types()) {
    RequiredTypes out;
    out.predefined = predefined;
    std::string folded = strings::to_lower(instruction_text);
    for (const auto& [phrase, labels] : extraction_lexicon()) {
        if (strings::contains(folded, phrase)) {
            for (const auto& label : labels) out.extracted.insert(label);
        }
    }
    out.required = out.predefined;
    out.required.insert(out.extracted.begin(), out.extracted.end());
    return out;
}

// "minimum of N" / "at least N" in the instruction sets a floor on |cases|.
inline std::optional<int> instruction_minimum(const std::string& instruction_text) {
    static const std::regex re(R"((?:minimum of|at least)\s+(\d+))", std::regex::icase);
    std::smatch m;
    if (std::regex_search(instruction_text, m, re)) return std::stoi(m[1]);
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Suite model
// ---------------------------------------------------------------------------

enum class Priority { High, Medium, Low };

inline const char* to_string(Priority p) {
    switch (p) {
        case Priority::High: return "High";
        case Priority::Medium: return "Medium";
        case Priority::Low: return "Low";
    }
    return "Medium";
}

inline std::optional<Priority> priority_from_string(std::string_view s) {
    if (s == "High") return Priority::High;
    if (s == "Medium") return Priority::Medium;
    if (s == "Low") return Priority::Low;
    return std::nullopt;
}

struct TestStep {
    int ordinal = 0;
    std::string verb;      // member of the closed action set
    std::string target;    // element_id, or URL for navigate/assert_url
    std::string argument;  // literal, or "slot:<name>" data reference
};

struct DataSlot {
    std::string element_id;
    std::string slot;
    std::string scenario;   // valid | invalid | match | mismatch
    std::string pair_with;  // slot name this one must match/mismatch against
};

struct TestCase {
    std::string id;  // "TC01"... assigned in acceptance order
    std::string name;
    Priority priority = Priority::Medium;
    std::string proposed_priority;  // as returned by the generator, pre-coercion
    std::string description;
    std::string test_type;
    std::string target_page;
    std::vector<TestStep> steps;
    std::vector<std::string> expected;
    std::vector<DataSlot> data_slots;
};

struct CaseProvenance {
    std::string case_id;
    std::string chunk_id;
    std::string prompt_digest;
};

struct TestSuite {
    std::string application;
    std::string instruction_text;
    RequiredTypes required;
    std::vector<TestCase> cases;
    std::vector<CaseProvenance> provenance;
    int priority_overrides = 0;  // generator priorities outside the closed set
};

inline bool url_like(const std::string& s) { return strings::contains(s, "://"); }

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

struct Verdict {
    bool accepted = false;
    std::vector<std::string> reasons;  // prefixed structural:/uniqueness:/contextual:/flow:
};

inline std::set<std::string> reachable_pages(const site::SiteRepresentation& site) {
    std::set<std::string> reachable{site.base_url};
    std::vector<std::string> frontier{site.base_url};
    while (!frontier.empty()) {
        std::string current = frontier.back();
        frontier.pop_back();
        for (const auto& e : site.nav_edges) {
            if (e.from_url == current && reachable.insert(e.to_url).second)
                frontier.push_back(e.to_url);
        }
    }
    return reachable;
}

// Ordered checks, all failures accumulated: structural integrity,
// uniqueness against accepted cases, contextual fit (type in R, elements
// exist on the target page), and page-flow reachability of URL targets.
inline Verdict validate_case(const TestCase& candidate, const site::SiteRepresentation& site,
                             const std::vector<TestCase>& accepted, const RequiredTypes& required) {
    Verdict verdict;
    auto& reasons = verdict.reasons;

    // (1) structural
    if (candidate.name.empty()) reasons.push_back("structural: empty name");
    if (candidate.steps.empty()) reasons.push_back("structural: no steps");
    for (const auto& step : candidate.steps) {
        if (!llm::known_step_verbs().count(step.verb)) {
            reasons.push_back("structural: unknown verb '" + step.verb + "'");
            continue;
        }
        bool wants_url = step.verb == "navigate" || step.verb == "assert_url";
        if (wants_url && !url_like(step.target)) {
            reasons.push_back("structural: verb " + step.verb + " needs a URL target, got '" +
                              step.target + "'");
        }
        if (!wants_url && url_like(step.target)) {
            reasons.push_back("structural: verb " + step.verb + " needs an element target, got URL");
        }
        if (step.verb == "type" && step.argument.empty()) {
            reasons.push_back("structural: type step without argument");
        }
    }

    // (2) uniqueness
    auto signature = [](const TestCase& c) {
        std::string sig;
        for (const auto& s : c.steps) sig += s.verb + "|" + s.target + "|" + s.argument + ";";
        return sig;
    };
    for (const auto& prior : accepted) {
        if (prior.name == candidate.name) {
            reasons.push_back("uniqueness: name duplicates accepted case " + prior.id);
            break;
        }
    }
    for (const auto& prior : accepted) {
        if (!candidate.steps.empty() && signature(prior) == signature(candidate)) {
            reasons.push_back("uniqueness: step sequence duplicates accepted case " + prior.id);
            break;
        }
    }

    // (3) contextual
    if (!required.contains(candidate.test_type)) {
        reasons.push_back("contextual: test_type '" + candidate.test_type +
                          "' not in required set R");
    }
    auto page_it = site.pages.find(candidate.target_page);
    if (page_it == site.pages.end()) {
        reasons.push_back("contextual: unknown target_page " + candidate.target_page);
    } else {
        const auto& digest = page_it->second;
        for (const auto& step : candidate.steps) {
            if (url_like(step.target) || !llm::known_step_verbs().count(step.verb)) continue;
            if (!digest.find_element(step.target)) {
                reasons.push_back("contextual: element " + step.target + " not on " +
                                  candidate.target_page);
            }
        }
        for (const auto& slot : candidate.data_slots) {
            if (!digest.find_element(slot.element_id)) {
                reasons.push_back("contextual: data slot element " + slot.element_id + " not on " +
                                  candidate.target_page);
            }
        }
    }

    // (4) flow
    auto reachable = reachable_pages(site);
    for (const auto& step : candidate.steps) {
        if (step.verb != "navigate" && step.verb != "assert_url") continue;
        if (!url_like(step.target)) continue;
        if (!reachable.count(step.target)) {
            reasons.push_back("flow: " + step.target + " unreachable from the base page");
        }
    }

    verdict.accepted = reasons.empty();
    return verdict;
}

// ---------------------------------------------------------------------------
// Priority
// ---------------------------------------------------------------------------

// Generator-proposed priorities survive when inside the closed set;
// otherwise a rule pass decides: exotic personas and rare states rank Low,
// negative/edge variants Medium, core flows High.
inline Priority assign_priority(const TestCase& candidate) {
    if (auto proposed = priority_from_string(candidate.proposed_priority)) return *proposed;
    std::string text = strings::to_lower(candidate.name + " " + candidate.description);
    for (const char* persona : {"locked", "problem", "glitch", "rare", "exotic"}) {
        if (strings::contains(text, persona)) return Priority::Low;
    }
    for (const char* negative : {"invalid", "empty", "mismatch", "weak", "wrong", "error",
                                 "missing"}) {
        if (strings::contains(text, negative)) return Priority::Medium;
    }
    return Priority::High;
}

// ---------------------------------------------------------------------------
// Generation
// ---------------------------------------------------------------------------

inline TestCase case_from_json(const json& j) {
    TestCase c;
    c.name = j.value("name", "");
    c.proposed_priority = j.value("priority", "");
    c.description = j.value("description", "");
    c.test_type = j.value("test_type", "");
    c.target_page = j.value("target_page", "");
    int ordinal = 1;
    for (const auto& s : j.value("steps", json::array())) {
        TestStep step;
        step.ordinal = ordinal++;
        step.verb = s.value("verb", "");
        step.target = s.value("target", "");
        step.argument = s.value("argument", "");
        c.steps.push_back(std::move(step));
    }
    for (const auto& e : j.value("expected", json::array())) {
        if (e.is_string()) c.expected.push_back(e.get<std::string>());
    }
    for (const auto& d : j.value("data_slots", json::array())) {
        DataSlot slot;
        slot.element_id = d.value("element_id", "");
        slot.slot = d.value("slot", "");
        slot.scenario = d.value("scenario", "valid");
        slot.pair_with = d.value("pair_with", "");
        c.data_slots.push_back(std::move(slot));
    }
    return c;
}

struct GenerationOptions {
    std::string application = "webapp";
};

namespace detail {

inline std::string generation_prompt(const site::SiteRepresentation& site,
                                     const std::string& instruction,
                                     const RequiredTypes& required, const site::Chunk& chunk,
                                     const std::vector<TestCase>& accepted,
                                     const std::vector<std::string>& rejection_notes) {
    std::string prompt =
        "You are a senior QA engineer generating functional web test cases.\n\n"
        "INSTRUCTION:\n" + instruction + "\n\n";
    prompt += "REQUIRED TEST TYPES: " +
              strings::join({required.required.begin(), required.required.end()}, ", ") + "\n";
    prompt += "URL PATTERNS:";
    for (const auto& p : site.patterns) prompt += " " + p.template_;
    prompt += "\n\nALREADY GENERATED (do not duplicate names or step sequences):\n";
    if (accepted.empty()) prompt += "  none\n";
    for (const auto& c : accepted) prompt += "  " + c.id + " " + c.name + "\n";
    prompt += "\nPAGE CONTEXT:\n" + chunk.rendered_text;
    if (!rejection_notes.empty()) {
        prompt += "\nYOUR PREVIOUS CASES WERE REJECTED:\n";
        for (const auto& note : rejection_notes) prompt += "  - " + note + "\n";
        prompt += "Regenerate corrected cases addressing every rejection.\n";
    }
    prompt +=
        "\nReturn JSON: {\"cases\": [{\"name\", \"priority\" (High|Medium|Low), \"description\", "
        "\"test_type\", \"target_page\", \"steps\": [{\"verb\", \"target\", \"argument\"?}], "
        "\"expected\": [..], \"data_slots\": [{\"element_id\", \"slot\", \"scenario\", "
        "\"pair_with\"?}]}]}.\n"
        "Verbs: navigate, click, type, clear, select, assert_text, assert_visible, assert_url, "
        "wait. Element targets use the element ids listed above; navigate/assert_url take URLs.";
    return prompt;
}

}  // namespace detail

// Visits pages in chunk-plan order, one generation prompt per chunk; every
// response batch passes through validate_case; rejected cases trigger one
// refinement re-prompt carrying the rejection reasons; accepted cases are
// renumbered TC01... in acceptance order.
inline TestSuite generate_suite(const site::SiteRepresentation& site,
                                const std::string& instruction_text, llm::Backend& backend,
                                const GenerationOptions& options = {}) {
    TestSuite suite;
    suite.application = options.application;
    suite.instruction_text = instruction_text;
    suite.required = derive_required_types(instruction_text);

    if (site.chunk_plan.empty()) {
        throw Error(ErrorCode::GenerationExhausted, "site has no pages to generate against");
    }

    auto run_batch = [&](const site::Chunk& chunk, const std::vector<std::string>& notes)
        -> std::pair<std::vector<TestCase>, std::vector<std::string>> {
        std::string prompt =
            detail::generation_prompt(site, instruction_text, suite.required, chunk, suite.cases, notes);
        auto envelope = llm::PromptEnvelope::make("test_cases_v1", prompt, {chunk.chunk_id},
                                                  "test_cases_v1");
        std::string digest = llm::sha256_hex(prompt);
        auto response = llm::complete(envelope, backend);
        std::vector<TestCase> batch_accepted;
        std::vector<std::string> batch_rejections;
        if (!response.parsed) return {batch_accepted, batch_rejections};
        for (const auto& cj : (*response.parsed)["cases"]) {
            TestCase candidate = case_from_json(cj);
            auto verdict = validate_case(candidate, site, suite.cases, suite.required);
            if (!verdict.accepted) {
                for (const auto& r : verdict.reasons)
                    batch_rejections.push_back("'" + candidate.name + "': " + r);
                continue;
            }
            candidate.id = strings::padded_id("TC", static_cast<int>(suite.cases.size()) + 1, 2);
            if (!priority_from_string(candidate.proposed_priority)) ++suite.priority_overrides;
            candidate.priority = assign_priority(candidate);
            suite.provenance.push_back({candidate.id, chunk.chunk_id, digest.substr(0, 16)});
            suite.cases.push_back(candidate);
            batch_accepted.push_back(std::move(candidate));
        }
        return {batch_accepted, batch_rejections};
    };

    for (const auto& chunk : site.chunk_plan) {
        auto [accepted, rejections] = run_batch(chunk, {});
        if (!rejections.empty()) {
            run_batch(chunk, rejections);  // one refinement round per chunk
        }
    }

    int min_cases = instruction_minimum(instruction_text).value_or(1);
    if (static_cast<int>(suite.cases.size()) < min_cases) {
        throw Error(ErrorCode::GenerationExhausted,
                    strings::format("%d valid cases generated, instruction requires %d",
                                    static_cast<int>(suite.cases.size()), min_cases));
    }
    return suite;
}

// ---------------------------------------------------------------------------
// Serialization (suite.json + markdown table)
// ---------------------------------------------------------------------------

inline void to_json(json& j, const TestStep& s) {
    j = json{{"ordinal", s.ordinal}, {"verb", s.verb}, {"target", s.target}, {"argument", s.argument}};
}
inline void from_json(const json& j, TestStep& s) {
    j.at("ordinal").get_to(s.ordinal);
    j.at("verb").get_to(s.verb);
    j.at("target").get_to(s.target);
    s.argument = j.value("argument", "");
}

inline void to_json(json& j, const DataSlot& d) {
    j = json{{"element_id", d.element_id},
             {"slot", d.slot},
             {"scenario", d.scenario},
             {"pair_with", d.pair_with}};
}
inline void from_json(const json& j, DataSlot& d) {
    j.at("element_id").get_to(d.element_id);
    j.at("slot").get_to(d.slot);
    d.scenario = j.value("scenario", "valid");
    d.pair_with = j.value("pair_with", "");
}

inline void to_json(json& j, const TestCase& c) {
    j = json{{"id", c.id},
             {"name", c.name},
             {"priority", to_string(c.priority)},
             {"description", c.description},
             {"test_type", c.test_type},
             {"target_page", c.target_page},
             {"steps", c.steps},
             {"expected", c.expected},
             {"data_slots", c.data_slots}};
}
inline void from_json(const json& j, TestCase& c) {
    j.at("id").get_to(c.id);
    j.at("name").get_to(c.name);
    c.priority = priority_from_string(j.at("priority").get<std::string>()).value_or(Priority::Medium);
    c.proposed_priority = j.at("priority").get<std::string>();
    c.description = j.value("description", "");
    j.at("test_type").get_to(c.test_type);
    j.at("target_page").get_to(c.target_page);
    j.at("steps").get_to(c.steps);
    c.expected = j.value("expected", std::vector<std::string>{});
    c.data_slots = j.value("data_slots", std::vector<DataSlot>{});
}

inline void to_json(json& j, const CaseProvenance& p) {
    j = json{{"case_id", p.case_id}, {"chunk_id", p.chunk_id}, {"prompt_digest", p.prompt_digest}};
}
inline void from_json(const json& j, CaseProvenance& p) {
    j.at("case_id").get_to(p.case_id);
    j.at("chunk_id").get_to(p.chunk_id);
    j.at("prompt_digest").get_to(p.prompt_digest);
}

inline void to_json(json& j, const RequiredTypes& r) {
    j = json{{"predefined", std::vector<std::string>(r.predefined.begin(), r.predefined.end())},
             {"extracted", std::vector<std::string>(r.extracted.begin(), r.extracted.end())},
             {"required", std::vector<std::string>(r.required.begin(), r.required.end())}};
}
inline void from_json(const json& j, RequiredTypes& r) {
    auto p = j.at("predefined").get<std::vector<std::string>>();
    auto a = j.at("extracted").get<std::vector<std::string>>();
    auto req = j.at("required").get<std::vector<std::string>>();
    r.predefined.insert(p.begin(), p.end());
    r.extracted.insert(a.begin(), a.end());
    r.required.insert(req.begin(), req.end());
}

inline void to_json(json& j, const TestSuite& s) {
    j = json{{"application", s.application},
             {"instruction_text", s.instruction_text},
             {"required_types", s.required},
             {"cases", s.cases},
             {"provenance", s.provenance},
             {"priority_overrides", s.priority_overrides}};
}
inline void from_json(const json& j, TestSuite& s) {
    j.at("application").get_to(s.application);
    s.instruction_text = j.value("instruction_text", "");
    j.at("required_types").get_to(s.required);
    j.at("cases").get_to(s.cases);
    s.provenance = j.value("provenance", std::vector<CaseProvenance>{});
    s.priority_overrides = j.value("priority_overrides", 0);
}

inline std::string render_suite_markdown(const TestSuite& suite) {
    std::string out = "# Generated Test Suite for " + suite.application + "\n\n";
    out += "| Test Case ID | Test Case Name | Priority | Description |\n";
    out += "|---|---|---|---|\n";
    for (const auto& c : suite.cases) {
        out += "| " + c.id + " | " + c.name + " | " + to_string(c.priority) + " | " +
               c.description + " |\n";
    }
    return out;
}

}  // namespace webqe::testgen
