#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <regex>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "webqe/error.hpp"
#include "webqe/llm_gateway.hpp"
#include "webqe/site_synthesis.hpp"
#include "webqe/strings.hpp"
#include "webqe/testgen.hpp"

namespace webqe::data {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Constraints
// ---------------------------------------------------------------------------

struct FieldConstraint {
    std::string kind;      // email | phone | password | text | name | choice
    std::string pattern;   // full-match regex; for choice: options joined with '|'
    int min_length = 0;    // 0 = unset
    int max_length = 0;    // 0 = unset
    int strength_min_length = 0;  // password: minimum length (default 8)
    int strength_classes = 0;     // password: required character classes (default 3)

    void validate() const {
        if (min_length > 0 && max_length > 0 && min_length > max_length) {
            throw Error(ErrorCode::UnsatisfiableConstraint, "min_length exceeds max_length");
        }
        if (!pattern.empty() && kind != "choice") {
            try {
                std::regex re(pattern);
            } catch (const std::regex_error&) {
                throw Error(ErrorCode::UnsatisfiableConstraint, "bad pattern: " + pattern);
            }
        }
    }

    int effective_password_min() const {
        int m = strength_min_length > 0 ? strength_min_length : min_length;
        return m > 0 ? m : 8;
    }
    int effective_password_classes() const { return strength_classes > 0 ? strength_classes : 3; }
};

inline int char_class_count(const std::string& value) {
    bool lower = false, upper = false, digit = false, symbol = false;
    for (unsigned char c : value) {
        if (std::islower(c)) lower = true;
        else if (std::isupper(c)) upper = true;
        else if (std::isdigit(c)) digit = true;
        else symbol = true;
    }
    return lower + upper + digit + symbol;
}

// Independent rule evaluation; returns the names of every violated rule.
// Synthesis never calls this to build values, so the two stay cross-checks
// of each other.
inline std::vector<std::string> check_constraint(const std::string& value,
                                                 const FieldConstraint& c) {
    std::vector<std::string> violated;
    const int len = static_cast<int>(value.size());

    if (c.kind == "password") {
        if (len < c.effective_password_min()) violated.push_back("min_length");
        if (c.max_length > 0 && len > c.max_length) violated.push_back("max_length");
        if (char_class_count(value) < c.effective_password_classes())
            violated.push_back("char_classes");
        return violated;
    }
    if (c.kind == "choice") {
        bool member = false;
        for (const auto& opt : strings::split(c.pattern, '|')) member = member || opt == value;
        if (!member) violated.push_back("choice");
        return violated;
    }

    if (c.min_length > 0 && len < c.min_length) violated.push_back("min_length");
    if (c.max_length > 0 && len > c.max_length) violated.push_back("max_length");

    if (c.kind == "email") {
        static const std::regex email_re(R"(^[^@\s]+@[^@\s]+\.[^@\s]+$)");
        if (!std::regex_match(value, email_re)) violated.push_back("format");
    } else if (c.kind == "phone") {
        std::string pat = c.pattern.empty() ? "[0-9]{10}" : c.pattern;
        if (!std::regex_match(value, std::regex(pat))) violated.push_back("pattern");
    } else if (c.kind == "name") {
        static const std::regex name_re(R"(^[A-Za-z][A-Za-z .'-]*$)");
        if (!std::regex_match(value, name_re)) violated.push_back("format");
    } else {  // text
        if (!c.pattern.empty() && !std::regex_match(value, std::regex(c.pattern)))
            violated.push_back("pattern");
    }
    return violated;
}

// ---------------------------------------------------------------------------
// Synthesis
// ---------------------------------------------------------------------------

struct Synthesis {
    std::string value;
    std::string violated_rule;  // empty for valid scenarios
};

namespace detail {

inline uint64_t fnv1a(std::string_view s, uint64_t seed = 1469598103934665603ULL) {
    uint64_t h = seed;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

inline const std::vector<std::string>& first_names() {
    static const std::vector<std::string> v = {"asha", "liam",  "maya",  "noah", "ines",
                                               "ravi", "sofia", "tomas", "yuki", "zoe"};
    return v;
}
inline const std::vector<std::string>& last_names() {
    static const std::vector<std::string> v = {"patel", "okafor", "silva",  "novak", "haddad",
                                               "kim",   "lopez",  "muller", "rossi", "tanaka"};
    return v;
}
inline const std::vector<std::string>& mail_domains() {
    static const std::vector<std::string> v = {"example.com", "example.org", "mailbox.test",
                                               "inbox.test",  "post.example"};
    return v;
}
inline const std::vector<std::string>& lorem_words() {
    static const std::vector<std::string> v = {"amber", "delta", "crisp", "moss", "ridge",
                                               "quiet", "lumen", "prism", "vale", "north"};
    return v;
}

inline std::string pick(std::mt19937_64& rng, const std::vector<std::string>& pool) {
    return pool[rng() % pool.size()];
}

inline std::string digits(std::mt19937_64& rng, int count) {
    std::string out;
    for (int i = 0; i < count; ++i) out.push_back(static_cast<char>('0' + rng() % 10));
    return out;
}

// digit-count grammars like "[0-9]{10}" or "\d{6}"
inline std::optional<int> digit_count_of_pattern(const std::string& pattern) {
    static const std::regex re(R"(^\^?(?:\[0-9\]|\\d)\{(\d+)\}\$?$)");
    std::smatch m;
    if (std::regex_match(pattern, m, re)) return std::stoi(m[1]);
    return std::nullopt;
}

inline std::string fit_length(std::string value, int min_len, int max_len, char pad) {
    while (min_len > 0 && static_cast<int>(value.size()) < min_len) value.push_back(pad);
    if (max_len > 0 && static_cast<int>(value.size()) > max_len) value.resize(max_len);
    return value;
}

}  // namespace detail

// Deterministic value generation per (constraint, scenario, seed). Valid
// values satisfy every rule; invalid values violate exactly one and record
// which. Throws UnsatisfiableConstraint when the rules conflict or no rule
// can be violated.
inline Synthesis synthesize_value(const FieldConstraint& constraint, const std::string& scenario,
                                  uint64_t seed) {
    constraint.validate();
    std::mt19937_64 rng(detail::fnv1a(constraint.kind + "|" + scenario, seed * 0x9E3779B97F4A7C15ULL + 0xD1B54A32D192ED03ULL));
    const bool want_valid = scenario != "invalid";

    Synthesis out;
    if (constraint.kind == "email") {
        std::string local = detail::pick(rng, detail::first_names()) + "." +
                            detail::pick(rng, detail::last_names()) + detail::digits(rng, 2);
        std::string value = local + "@" + detail::pick(rng, detail::mail_domains());
        if (constraint.max_length > 0 && constraint.max_length < 7) {
            throw Error(ErrorCode::UnsatisfiableConstraint, "email cannot fit max_length");
        }
        if (constraint.max_length > 0 && static_cast<int>(value.size()) > constraint.max_length) {
            value = std::string(1, static_cast<char>('a' + rng() % 26)) + detail::digits(rng, 1) +
                    "@x.tt";
        }
        while (constraint.min_length > 0 && static_cast<int>(value.size()) < constraint.min_length) {
            value.insert(value.find('@'), detail::digits(rng, 1));
        }
        if (want_valid) {
            out.value = value;
            return out;
        }
        std::vector<std::string> options = {"format"};
        if (constraint.min_length > 7) options.push_back("min_length");
        if (constraint.max_length > 0) options.push_back("max_length");
        out.violated_rule = options[rng() % options.size()];
        if (out.violated_rule == "format") {
            size_t at = value.find('@');
            value[at] = '.';
            out.value = value;
        } else if (out.violated_rule == "min_length") {
            out.value = "a@b.cc";  // format-valid, shorter than any min > 7
        } else {
            while (static_cast<int>(value.size()) <= constraint.max_length) {
                value.insert(value.find('@'), "0");
            }
            out.value = value;
        }
        return out;
    }

    if (constraint.kind == "phone") {
        int count = detail::digit_count_of_pattern(
                        constraint.pattern.empty() ? "[0-9]{10}" : constraint.pattern)
                        .value_or(-1);
        if (count < 0) {
            // unsupported grammar: try a plain 10-digit value, verify, else give up
            std::string candidate = detail::digits(rng, 10);
            if (!check_constraint(candidate, constraint).empty()) {
                throw Error(ErrorCode::UnsatisfiableConstraint,
                            "unsupported phone pattern: " + constraint.pattern);
            }
            count = 10;
        }
        std::string value = detail::digits(rng, count);
        if (want_valid) {
            out.value = value;
            return out;
        }
        out.violated_rule = "pattern";
        if (rng() % 2 == 0) {
            value[rng() % value.size()] = static_cast<char>('a' + rng() % 26);
        } else {
            value.pop_back();  // wrong digit count
        }
        out.value = value;
        return out;
    }

    if (constraint.kind == "password") {
        const int min_len = constraint.effective_password_min();
        const int classes = constraint.effective_password_classes();
        if (constraint.max_length > 0 && min_len > constraint.max_length) {
            throw Error(ErrorCode::UnsatisfiableConstraint, "password bounds conflict");
        }
        static const std::string pools[4] = {"abcdefghjkmnpqrstuvwxyz", "ABCDEFGHJKMNPQRSTUVWXYZ",
                                             "23456789", "!#%&*+-?@"};
        auto build = [&](int length, int class_count) {
            std::string value;
            for (int i = 0; i < length; ++i) {
                const std::string& pool = pools[i < class_count ? i : rng() % class_count];
                value.push_back(pool[rng() % pool.size()]);
            }
            // deterministic shuffle so required classes are not clustered
            for (size_t i = value.size(); i > 1; --i) std::swap(value[i - 1], value[rng() % i]);
            return value;
        };
        if (want_valid) {
            int length = min_len + static_cast<int>(rng() % 4);
            if (constraint.max_length > 0) length = std::min(length, constraint.max_length);
            out.value = build(length, classes);
            return out;
        }
        std::vector<std::string> options;
        if (min_len >= 2) options.push_back("min_length");
        if (classes >= 2) options.push_back("char_classes");
        if (options.empty()) {
            throw Error(ErrorCode::UnsatisfiableConstraint, "no violable password rule");
        }
        out.violated_rule = options[rng() % options.size()];
        if (out.violated_rule == "min_length") {
            out.value = build(min_len - 1, std::min(classes, min_len - 1));
        } else {
            int length = std::max(min_len, 8);
            if (constraint.max_length > 0) length = std::min(length, constraint.max_length);
            std::string value;
            for (int i = 0; i < length; ++i) value.push_back(pools[0][rng() % pools[0].size()]);
            out.value = value;  // single class only
        }
        return out;
    }

    if (constraint.kind == "name") {
        auto cap = [](std::string s) {
            if (!s.empty()) s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
            return s;
        };
        std::string value = cap(detail::pick(rng, detail::first_names())) + " " +
                            cap(detail::pick(rng, detail::last_names()));
        value = detail::fit_length(value, constraint.min_length, constraint.max_length, 'a');
        if (want_valid) {
            out.value = value;
            return out;
        }
        out.violated_rule = "format";
        value[value.size() / 2] = static_cast<char>('0' + rng() % 10);
        out.value = value;
        return out;
    }

    if (constraint.kind == "choice") {
        std::vector<std::string> options = strings::split(constraint.pattern, '|');
        options.erase(std::remove_if(options.begin(), options.end(),
                                     [&](const std::string& o) {
                                         int len = static_cast<int>(o.size());
                                         if (o.empty()) return true;
                                         if (constraint.min_length > 0 && len < constraint.min_length)
                                             return true;
                                         if (constraint.max_length > 0 && len > constraint.max_length)
                                             return true;
                                         return false;
                                     }),
                      options.end());
        if (options.empty()) {
            throw Error(ErrorCode::UnsatisfiableConstraint, "no choice option fits the bounds");
        }
        if (want_valid) {
            out.value = options[rng() % options.size()];
            return out;
        }
        out.violated_rule = "choice";
        std::string value;
        do {
            value = "none-of-the-above-" + detail::digits(rng, 3);
        } while (std::find(options.begin(), options.end(), value) != options.end());
        out.value = value;
        return out;
    }

    // text
    std::string value = detail::pick(rng, detail::lorem_words()) + " " +
                        detail::pick(rng, detail::lorem_words());
    if (!constraint.pattern.empty()) {
        if (!check_constraint(value, FieldConstraint{"text", constraint.pattern, 0, 0, 0, 0}).empty()) {
            throw Error(ErrorCode::UnsatisfiableConstraint,
                        "unsupported text pattern: " + constraint.pattern);
        }
    }
    value = detail::fit_length(value, constraint.min_length, constraint.max_length, 'x');
    if (want_valid) {
        out.value = value;
        return out;
    }
    std::vector<std::string> options;
    if (constraint.min_length > 1) options.push_back("min_length");
    if (constraint.max_length > 0) options.push_back("max_length");
    if (options.empty()) {
        throw Error(ErrorCode::UnsatisfiableConstraint, "text constraint has no violable rule");
    }
    out.violated_rule = options[rng() % options.size()];
    if (out.violated_rule == "min_length") {
        out.value = value.substr(0, constraint.min_length - 1);
    } else {
        out.value = value + std::string(constraint.max_length + 1 - value.size() > 0
                                            ? constraint.max_length + 1 - value.size()
                                            : 1,
                                        'x');
    }
    return out;
}

// ---------------------------------------------------------------------------
// Constraint resolution for suite slots
// ---------------------------------------------------------------------------

// Field markup wins (kind from input type, pattern/minlength attributes);
// slot-name heuristics cover slots without a backing form field.
inline FieldConstraint constraint_for_slot(const testgen::DataSlot& slot,
                                           const site::PageDigest* page) {
    FieldConstraint c;
    const dom::FormField* field = nullptr;
    const site::ElementDigest* element = nullptr;
    if (page) {
        for (const auto& f : page->form_fields) {
            if (f.element_id == slot.element_id) { field = &f; break; }
        }
        element = page->find_element(slot.element_id);
    }
    std::string hint = strings::to_lower(slot.slot);
    if (element) {
        if (auto it = element->attrs.find("name"); it != element->attrs.end())
            hint += "|" + strings::to_lower(it->second);
    }

    std::string kind;
    if (field) {
        if (field->input_kind == "email") kind = "email";
        else if (field->input_kind == "tel") kind = "phone";
        else if (field->input_kind == "password") kind = "password";
        else if (field->input_kind == "choice") kind = "choice";
    }
    if (kind.empty()) {
        if (strings::contains(hint, "email")) kind = "email";
        else if (strings::contains(hint, "phone") || strings::contains(hint, "mobile") ||
                 strings::contains(hint, "contact") || strings::contains(hint, "tel"))
            kind = "phone";
        else if (strings::contains(hint, "password")) kind = "password";
        else if (strings::contains(hint, "name")) kind = "name";
        else kind = "text";
    }
    c.kind = kind;
    if (field) {
        auto get_int = [&](const char* key) {
            auto it = field->constraints.find(key);
            return it == field->constraints.end() ? 0 : std::atoi(it->second.c_str());
        };
        if (auto it = field->constraints.find("pattern"); it != field->constraints.end())
            c.pattern = it->second;
        if (auto it = field->constraints.find("options"); it != field->constraints.end())
            c.pattern = it->second;
        c.min_length = get_int("minlength");
        c.max_length = get_int("maxlength");
        if (kind == "password") c.strength_min_length = c.min_length;
    }
    return c;
}

// ---------------------------------------------------------------------------
// Datasets (CSV with a header row)
// ---------------------------------------------------------------------------

struct Dataset {
    std::vector<std::string> columns;
    std::vector<std::map<std::string, std::string>> rows;

    static Dataset from_csv_text(const std::string& text) {
        Dataset d;
        std::vector<std::vector<std::string>> records;
        std::vector<std::string> current;
        std::string cell;
        bool in_quotes = false;
        auto end_cell = [&] { current.push_back(cell); cell.clear(); };
        auto end_record = [&] {
            end_cell();
            if (current.size() > 1 || !current[0].empty()) records.push_back(current);
            current.clear();
        };
        for (size_t i = 0; i < text.size(); ++i) {
            char ch = text[i];
            if (in_quotes) {
                if (ch == '"' && i + 1 < text.size() && text[i + 1] == '"') { cell += '"'; ++i; }
                else if (ch == '"') in_quotes = false;
                else cell += ch;
            } else if (ch == '"') {
                in_quotes = true;
            } else if (ch == ',') {
                end_cell();
            } else if (ch == '\n') {
                if (!cell.empty() || !current.empty()) end_record();
            } else if (ch != '\r') {
                cell += ch;
            }
        }
        if (!cell.empty() || !current.empty()) end_record();
        if (records.empty()) throw Error(ErrorCode::ConfigError, "dataset has no header row");
        d.columns = records[0];
        for (size_t r = 1; r < records.size(); ++r) {
            std::map<std::string, std::string> row;
            for (size_t cidx = 0; cidx < d.columns.size() && cidx < records[r].size(); ++cidx) {
                row[d.columns[cidx]] = records[r][cidx];
            }
            d.rows.push_back(std::move(row));
        }
        return d;
    }
};

// ---------------------------------------------------------------------------
// Bindings
// ---------------------------------------------------------------------------

struct DataBinding {
    std::string case_id;
    std::string slot;
    std::string element_id;
    std::string source;  // provided | synthetic
    std::string value;
    bool constraint_checked = false;
    std::string violated_rule;  // recorded for deliberately invalid values
};

inline void to_json(json& j, const DataBinding& b) {
    j = json{{"case_id", b.case_id},
             {"slot", b.slot},
             {"element_id", b.element_id},
             {"source", b.source},
             {"value", b.value},
             {"constraint_checked", b.constraint_checked},
             {"violated_rule", b.violated_rule}};
}
inline void from_json(const json& j, DataBinding& b) {
    j.at("case_id").get_to(b.case_id);
    j.at("slot").get_to(b.slot);
    b.element_id = j.value("element_id", "");
    j.at("source").get_to(b.source);
    j.at("value").get_to(b.value);
    b.constraint_checked = j.value("constraint_checked", false);
    b.violated_rule = j.value("violated_rule", "");
}

namespace detail {

inline std::string normalize_column(const std::string& s) {
    std::string out;
    for (char c : strings::to_lower(s)) {
        if (std::isalnum(static_cast<unsigned char>(c))) out.push_back(c);
    }
    return out;
}

}  // namespace detail

// Deterministic mapping first: exact column name, then case/underscore-folded
// match. Unresolved slots optionally go to the gateway, whose proposals are
// accepted only when the mapped value satisfies the slot constraint.
inline std::vector<DataBinding> map_provided_data(const testgen::TestSuite& suite,
                                                  const Dataset& dataset,
                                                  const site::SiteRepresentation& site,
                                                  llm::Backend* gateway = nullptr,
                                                  bool require_all = true) {
    if (dataset.rows.empty()) throw Error(ErrorCode::ConfigError, "dataset has no data rows");
    const auto& row = dataset.rows.front();

    std::vector<DataBinding> bindings;
    std::vector<std::string> unresolved;
    for (const auto& testcase : suite.cases) {
        auto page_it = site.pages.find(testcase.target_page);
        const site::PageDigest* page = page_it == site.pages.end() ? nullptr : &page_it->second;
        for (const auto& slot : testcase.data_slots) {
            if (slot.scenario != "valid") continue;  // provided rows carry valid data
            std::string column;
            for (const auto& c : dataset.columns) {
                if (c == slot.slot) { column = c; break; }
            }
            if (column.empty()) {
                for (const auto& c : dataset.columns) {
                    if (detail::normalize_column(c) == detail::normalize_column(slot.slot)) {
                        column = c;
                        break;
                    }
                }
            }
            if (column.empty() && gateway) {
                std::string prompt = "Map each test-data slot to one dataset column.\n";
                prompt += "slots needing a column:\n  slot: " + slot.slot + "\n";
                prompt += "available columns:\n";
                for (const auto& c : dataset.columns) prompt += "  column: " + c + "\n";
                prompt += "Case context: " + json(testcase).dump() +
                          "\nReturn JSON {\"mappings\": {\"<slot>\": \"<column>\"}}.";
                try {
                    auto response = llm::complete(
                        llm::PromptEnvelope::make("data_mapping_v1", prompt, {testcase.id},
                                                  "data_mapping_v1"),
                        *gateway);
                    if (response.parsed) {
                        auto& mappings = (*response.parsed)["mappings"];
                        if (mappings.contains(slot.slot) && mappings[slot.slot].is_string()) {
                            std::string proposed = mappings[slot.slot].get<std::string>();
                            if (row.count(proposed)) {
                                auto constraint = constraint_for_slot(slot, page);
                                if (check_constraint(row.at(proposed), constraint).empty())
                                    column = proposed;
                            }
                        }
                    }
                } catch (const Error&) {
                    // gateway trouble leaves the slot unresolved
                }
            }
            if (column.empty()) {
                unresolved.push_back(testcase.id + "/" + slot.slot);
                continue;
            }
            DataBinding b;
            b.case_id = testcase.id;
            b.slot = slot.slot;
            b.element_id = slot.element_id;
            b.source = "provided";
            b.value = row.at(column);
            b.constraint_checked = check_constraint(b.value, constraint_for_slot(slot, page)).empty();
            bindings.push_back(std::move(b));
        }
    }
    if (require_all && !unresolved.empty()) {
        throw Error(ErrorCode::UnmappableSlot, strings::join(unresolved, ", "));
    }
    return bindings;
}

// Full binding pass: provided data first, synthesis for the rest, paired
// slots kept consistent (equal for match scenarios, differing for mismatch).
inline std::vector<DataBinding> bind_suite(const testgen::TestSuite& suite,
                                           const site::SiteRepresentation& site,
                                           const Dataset* dataset, llm::Backend* gateway,
                                           uint64_t seed) {
    std::vector<DataBinding> bindings;
    if (dataset) {
        bindings = map_provided_data(suite, *dataset, site, gateway, /*require_all=*/false);
    }
    auto find_binding = [&](const std::string& case_id, const std::string& slot) -> DataBinding* {
        for (auto& b : bindings) {
            if (b.case_id == case_id && b.slot == slot) return &b;
        }
        return nullptr;
    };

    for (const auto& testcase : suite.cases) {
        auto page_it = site.pages.find(testcase.target_page);
        const site::PageDigest* page = page_it == site.pages.end() ? nullptr : &page_it->second;

        // non-paired slots first so pair targets exist
        for (int phase = 0; phase < 2; ++phase) {
            for (const auto& slot : testcase.data_slots) {
                bool paired = !slot.pair_with.empty();
                if ((phase == 0) == paired) continue;
                if (find_binding(testcase.id, slot.slot)) continue;

                auto constraint = constraint_for_slot(slot, page);
                uint64_t slot_seed = detail::fnv1a(testcase.id + "|" + slot.slot, seed);
                DataBinding b;
                b.case_id = testcase.id;
                b.slot = slot.slot;
                b.element_id = slot.element_id;
                b.source = "synthetic";

                if (paired && (slot.scenario == "match" || slot.scenario == "mismatch")) {
                    DataBinding* partner = find_binding(testcase.id, slot.pair_with);
                    if (!partner) {
                        throw Error(ErrorCode::UnboundSlot,
                                    testcase.id + ": pair target '" + slot.pair_with + "' unbound");
                    }
                    if (slot.scenario == "match") {
                        b.value = partner->value;
                    } else {
                        auto alt = synthesize_value(constraint, "valid", slot_seed);
                        b.value = alt.value == partner->value ? alt.value + "X" : alt.value;
                    }
                    b.constraint_checked = check_constraint(b.value, constraint).empty();
                } else {
                    auto synthesized = synthesize_value(
                        constraint, slot.scenario == "invalid" ? "invalid" : "valid", slot_seed);
                    b.value = synthesized.value;
                    b.violated_rule = synthesized.violated_rule;
                    b.constraint_checked =
                        slot.scenario != "invalid" && check_constraint(b.value, constraint).empty();
                }
                bindings.push_back(std::move(b));
            }
        }
    }
    std::sort(bindings.begin(), bindings.end(), [](const DataBinding& a, const DataBinding& b) {
        return a.case_id != b.case_id ? a.case_id < b.case_id : a.slot < b.slot;
    });
    return bindings;
}

}  // namespace webqe::data
