#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "webqe/error.hpp"
#include "webqe/html.hpp"
#include "webqe/strings.hpp"

namespace webqe::dom {

struct Geometry {
    double x = 0, y = 0, width = 0, height = 0;
};

enum class Section { navigation, form, content, feedback, other };

inline const char* to_string(Section s) {
    switch (s) {
        case Section::navigation: return "navigation";
        case Section::form: return "form";
        case Section::content: return "content";
        case Section::feedback: return "feedback";
        case Section::other: return "other";
    }
    return "other";
}

inline Section section_from_string(std::string_view s) {
    if (s == "navigation") return Section::navigation;
    if (s == "form") return Section::form;
    if (s == "feedback") return Section::feedback;
    if (s == "other") return Section::other;
    return Section::content;
}

struct ElementNode {
    std::string element_id;  // "e0001", assigned in document order
    std::string tag;
    std::string locator;  // CSS selector resolving to exactly this node
    std::vector<std::pair<std::string, std::string>> attributes;
    std::string text;  // subtree visible text, collapsed, truncated
    std::optional<Geometry> geometry;
    bool interactive = false;
    bool visible = true;
    std::optional<std::string> parent;
    std::vector<std::string> children;
    Section section = Section::content;

    const std::string* attr(std::string_view name) const {
        for (const auto& [k, v] : attributes) {
            if (k == name) return &v;
        }
        return nullptr;
    }
    bool has_attr(std::string_view name) const { return attr(name) != nullptr; }
};

struct FormField {
    std::string element_id;
    std::string input_kind;  // text, email, tel, password, choice, ...
    bool required = false;
    std::map<std::string, std::string> constraints;  // pattern, minlength, maxlength, options
};

struct PageModel {
    std::string url;
    std::string title;
    std::vector<ElementNode> elements;  // document order; elements[0] is the root
    std::map<std::string, std::vector<std::string>> sections;  // label -> element_ids
    std::vector<FormField> form_fields;

    std::unordered_map<std::string, size_t> id_index;

    const ElementNode* find(std::string_view element_id) const {
        auto it = id_index.find(std::string(element_id));
        return it == id_index.end() ? nullptr : &elements[it->second];
    }
    ElementNode* find_mut(std::string_view element_id) {
        auto it = id_index.find(std::string(element_id));
        return it == id_index.end() ? nullptr : &elements[it->second];
    }
    const ElementNode& root() const { return elements.front(); }

    void rebuild_index() {
        id_index.clear();
        for (size_t i = 0; i < elements.size(); ++i) id_index[elements[i].element_id] = i;
    }
};

namespace detail {

inline const std::set<std::string>& interactive_tags() {
    static const std::set<std::string> v = {"a", "button", "input", "select", "textarea", "form"};
    return v;
}

inline const std::set<std::string>& structural_tags() {
    static const std::set<std::string> v = {"script", "style", "meta",  "link",    "head",
                                            "title",  "base",  "noscript", "template"};
    return v;
}

inline bool is_interactive(const ElementNode& e) {
    if (interactive_tags().count(e.tag)) return true;
    if (e.tag == "label" && e.has_attr("for")) return true;
    if (e.has_attr("onclick") || e.has_attr("href") || e.has_attr("formaction")) return true;
    if (const auto* type = e.attr("type"); type && strings::to_lower(*type) == "submit") return true;
    return false;
}

inline bool self_hidden(const ElementNode& e) {
    if (structural_tags().count(e.tag)) return true;
    if (e.has_attr("hidden")) return true;
    if (const auto* type = e.attr("type"); type && strings::to_lower(*type) == "hidden") return true;
    if (const auto* style = e.attr("style")) {
        std::string folded = strings::to_lower(*style);
        folded.erase(std::remove(folded.begin(), folded.end(), ' '), folded.end());
        if (strings::contains(folded, "display:none") || strings::contains(folded, "visibility:hidden"))
            return true;
    }
    return false;
}

inline bool css_safe_ident(std::string_view s) {
    if (s.empty() || std::isdigit(static_cast<unsigned char>(s[0]))) return false;
    for (char c : s) {
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_')) return false;
    }
    return true;
}

struct SimpleSelector {
    std::string tag;       // empty = any
    std::string id;        // without '#'
    std::vector<std::string> classes;
    int nth_child = 0;     // 0 = unconstrained, else 1-based position among element siblings
};

struct CompoundSelector {
    std::vector<SimpleSelector> parts;  // left to right
    std::vector<char> combinators;      // between parts: '>' child, ' ' descendant
};

inline CompoundSelector parse_selector(std::string_view sel) {
    CompoundSelector out;
    size_t i = 0;
    const size_t n = sel.size();
    auto skip_ws = [&] { while (i < n && sel[i] == ' ') ++i; };
    skip_ws();
    bool expect_part = true;
    char pending = ' ';
    while (i < n) {
        if (!expect_part) {
            skip_ws();
            pending = ' ';
            if (i < n && sel[i] == '>') {
                pending = '>';
                ++i;
                skip_ws();
            }
            expect_part = true;
            continue;
        }
        SimpleSelector part;
        while (i < n && sel[i] != ' ' && sel[i] != '>') {
            if (sel[i] == '#') {
                size_t start = ++i;
                while (i < n && sel[i] != ' ' && sel[i] != '>' && sel[i] != '.' && sel[i] != ':') ++i;
                part.id = std::string(sel.substr(start, i - start));
            } else if (sel[i] == '.') {
                size_t start = ++i;
                while (i < n && sel[i] != ' ' && sel[i] != '>' && sel[i] != '.' && sel[i] != ':' &&
                       sel[i] != '#')
                    ++i;
                part.classes.emplace_back(sel.substr(start, i - start));
            } else if (sel[i] == ':') {
                size_t start = i;
                size_t open = sel.find('(', i);
                size_t close = open == std::string_view::npos ? std::string_view::npos : sel.find(')', open);
                if (sel.substr(i, 11) == ":nth-child(" && close != std::string_view::npos) {
                    part.nth_child = std::atoi(std::string(sel.substr(open + 1, close - open - 1)).c_str());
                    i = close + 1;
                } else {
                    // unsupported pseudo-class: skip to end of token
                    i = start;
                    while (i < n && sel[i] != ' ' && sel[i] != '>') ++i;
                }
            } else {
                size_t start = i;
                while (i < n && sel[i] != ' ' && sel[i] != '>' && sel[i] != '.' && sel[i] != ':' &&
                       sel[i] != '#')
                    ++i;
                part.tag = strings::to_lower(sel.substr(start, i - start));
            }
        }
        if (!out.parts.empty()) out.combinators.push_back(pending);
        out.parts.push_back(std::move(part));
        expect_part = false;
    }
    return out;
}

inline int sibling_position(const PageModel& page, const ElementNode& e) {
    if (!e.parent) return 1;
    const ElementNode* parent = page.find(*e.parent);
    for (size_t i = 0; i < parent->children.size(); ++i) {
        if (parent->children[i] == e.element_id) return static_cast<int>(i) + 1;
    }
    return 1;
}

inline bool matches_simple(const PageModel& page, const ElementNode& e, const SimpleSelector& s) {
    if (!s.tag.empty() && s.tag != e.tag) return false;
    if (!s.id.empty()) {
        const auto* id = e.attr("id");
        if (!id || *id != s.id) return false;
    }
    for (const auto& cls : s.classes) {
        const auto* attr = e.attr("class");
        if (!attr) return false;
        bool found = false;
        for (const auto& token : strings::split(*attr, ' ')) {
            if (token == cls) { found = true; break; }
        }
        if (!found) return false;
    }
    if (s.nth_child > 0 && sibling_position(page, e) != s.nth_child) return false;
    return true;
}

inline bool matches_compound(const PageModel& page, const ElementNode& e, const CompoundSelector& sel,
                             size_t part_idx) {
    if (!matches_simple(page, e, sel.parts[part_idx])) return false;
    if (part_idx == 0) return true;
    char comb = sel.combinators[part_idx - 1];
    const ElementNode* cur = e.parent ? page.find(*e.parent) : nullptr;
    if (comb == '>') {
        return cur && matches_compound(page, *cur, sel, part_idx - 1);
    }
    while (cur) {
        if (matches_compound(page, *cur, sel, part_idx - 1)) return true;
        cur = cur->parent ? page.find(*cur->parent) : nullptr;
    }
    return false;
}

}  // namespace detail

// Evaluates the supported CSS-selector subset (tag, #id, .class, :nth-child,
// descendant and child combinators) against the page tree.
inline std::vector<const ElementNode*> select(const PageModel& page, std::string_view selector) {
    auto sel = detail::parse_selector(selector);
    std::vector<const ElementNode*> out;
    if (sel.parts.empty()) return out;
    for (const auto& e : page.elements) {
        if (detail::matches_compound(page, e, sel, sel.parts.size() - 1)) out.push_back(&e);
    }
    return out;
}

inline const ElementNode* select_unique(const PageModel& page, std::string_view selector) {
    auto matches = select(page, selector);
    return matches.size() == 1 ? matches.front() : nullptr;
}

namespace detail {

// id attribute when unique and CSS-safe, else the shortest suffix of the
// nth-child path that resolves uniquely. Sibling locators come out distinct
// because the nth-child index is part of every path segment.
inline std::string make_locator(const PageModel& page, const ElementNode& e,
                                const std::map<std::string, int>& id_counts) {
    if (const auto* id = e.attr("id");
        id && css_safe_ident(*id) && id_counts.at(*id) == 1) {
        return "#" + *id;
    }
    std::vector<std::string> segments;
    const ElementNode* cur = &e;
    while (cur) {
        if (!cur->parent) {
            segments.push_back(cur->tag);
        } else {
            segments.push_back(cur->tag + ":nth-child(" + std::to_string(sibling_position(page, *cur)) +
                               ")");
        }
        cur = cur->parent ? page.find(*cur->parent) : nullptr;
    }
    // segments are element..root; try the shortest unique suffix
    std::string candidate;
    for (size_t len = 1; len <= segments.size(); ++len) {
        candidate.clear();
        for (size_t k = len; k-- > 0;) {
            candidate += segments[k];
            if (k > 0) candidate += " > ";
        }
        auto matches = select(page, candidate);
        if (matches.size() == 1 && matches.front() == &e) return candidate;
    }
    return candidate;  // full root path, unique by construction
}

inline std::string subtree_text(const html::Node& node) {
    if (node.tag == "script" || node.tag == "style") return "";
    std::string out = node.own_text;
    for (const auto& child : node.children) {
        std::string t = subtree_text(*child);
        if (t.empty()) continue;
        if (!out.empty()) out += ' ';
        out += t;
    }
    return out;
}

inline std::string truncate_utf8(std::string s, size_t limit) {
    if (s.size() <= limit) return s;
    size_t cut = limit;
    while (cut > 0 && (static_cast<unsigned char>(s[cut]) & 0xC0) == 0x80) --cut;
    s.resize(cut);
    return s;
}

inline void collect_form_fields(PageModel& page) {
    static const std::set<std::string> skip_types = {"submit", "button", "reset", "image", "hidden"};
    for (const auto& e : page.elements) {
        std::string kind;
        if (e.tag == "input") {
            std::string type = e.attr("type") ? strings::to_lower(*e.attr("type")) : "text";
            if (skip_types.count(type)) continue;
            kind = type;
        } else if (e.tag == "select") {
            kind = "choice";
        } else if (e.tag == "textarea") {
            kind = "text";
        } else {
            continue;
        }
        FormField field;
        field.element_id = e.element_id;
        field.input_kind = kind;
        field.required = e.has_attr("required");
        for (const char* name : {"pattern", "minlength", "maxlength", "min", "max"}) {
            if (const auto* v = e.attr(name)) field.constraints[name] = *v;
        }
        if (e.tag == "select") {
            // option values joined as a choice alternation
            std::vector<std::string> options;
            std::vector<const ElementNode*> work{&e};
            while (!work.empty()) {
                const ElementNode* cur = work.back();
                work.pop_back();
                for (const auto& cid : cur->children) {
                    const ElementNode* child = page.find(cid);
                    if (child->tag == "option") {
                        options.push_back(child->attr("value") ? *child->attr("value") : child->text);
                    }
                    work.push_back(child);
                }
            }
            std::sort(options.begin(), options.end());
            field.constraints["options"] = strings::join(options, "|");
        }
        page.form_fields.push_back(std::move(field));
    }
}

}  // namespace detail

// Assigns every element exactly one semantic section. Pure function of tag,
// attributes, and ancestry; precedence: structural -> feedback -> navigation
// -> form -> content.
inline PageModel& segment_sections(PageModel& page) {
    page.sections.clear();

    auto has_feedback_marker = [](const ElementNode& e) {
        if (const auto* role = e.attr("role")) {
            std::string r = strings::to_lower(*role);
            if (r == "alert" || r == "alertdialog" || r == "status") return true;
        }
        if (e.has_attr("aria-live")) return true;
        if (const auto* cls = e.attr("class")) {
            for (const auto& token : strings::split(strings::to_lower(*cls), ' ')) {
                if (strings::contains(token, "error") || strings::contains(token, "alert") ||
                    strings::contains(token, "flash") || strings::contains(token, "feedback"))
                    return true;
            }
        }
        return false;
    };

    for (auto& e : page.elements) {
        Section label = Section::content;
        if (detail::structural_tags().count(e.tag)) {
            label = Section::other;
        } else {
            bool feedback = false, navigation = false, form = false;
            const ElementNode* cur = &e;
            while (cur) {
                if (has_feedback_marker(*cur)) { feedback = true; break; }
                if (cur->tag == "nav" || cur->tag == "header") navigation = true;
                if (cur->tag == "form") form = true;
                if (const auto* role = cur->attr("role")) {
                    std::string r = strings::to_lower(*role);
                    if (r == "navigation" || r == "menubar") navigation = true;
                    if (r == "form" || r == "search") form = true;
                }
                cur = cur->parent ? page.find(*cur->parent) : nullptr;
            }
            if (feedback) label = Section::feedback;
            else if (navigation) label = Section::navigation;
            else if (form) label = Section::form;
        }
        e.section = label;
        page.sections[to_string(label)].push_back(e.element_id);
    }
    return page;
}

// Parses a capture's HTML into the page's element tree: ids in document
// order, locator per element, interaction/visibility flags, form fields.
// Geometry stays empty here; the execution session backfills it.
inline PageModel build_page_model(const std::string& page_url, std::string_view html_text) {
    if (strings::trim(html_text).empty()) {
        throw Error(ErrorCode::UnparseableDocument, "empty document: " + page_url);
    }
    html::Document doc = html::parse(html_text);

    PageModel page;
    page.url = page_url;
    page.title = doc.title;
    page.elements.reserve(doc.element_count);

    // flatten in document order (pre-order)
    int counter = 0;
    struct Walker {
        PageModel& page;
        int& counter;
        void walk(const html::Node& node, const std::optional<std::string>& parent_id) {
            std::string id = strings::padded_id("e", ++counter, 4);
            ElementNode e;
            e.element_id = id;
            e.tag = node.tag;
            for (const auto& a : node.attrs) e.attributes.emplace_back(a.name, a.value);
            e.text = detail::truncate_utf8(strings::collapse_ws(detail::subtree_text(node)), 200);
            e.parent = parent_id;
            page.elements.push_back(std::move(e));
            if (parent_id) page.find_mut(*parent_id)->children.push_back(id);
            page.id_index[id] = page.elements.size() - 1;
            for (const auto& child : node.children) walk(*child, id);
        }
    } walker{page, counter};
    walker.walk(*doc.root, std::nullopt);

    // visibility: self rules plus inherited invisibility
    for (auto& e : page.elements) {
        bool hidden = detail::self_hidden(e);
        if (!hidden && e.parent) hidden = !page.find(*e.parent)->visible;
        e.visible = !hidden;
        e.interactive = detail::is_interactive(e);
    }

    std::map<std::string, int> id_counts;
    for (const auto& e : page.elements) {
        if (const auto* id = e.attr("id")) ++id_counts[*id];
    }
    for (auto& e : page.elements) {
        e.locator = detail::make_locator(page, e, id_counts);
    }

    detail::collect_form_fields(page);
    segment_sections(page);
    return page;
}

inline void to_json(nlohmann::json& j, const Geometry& g) {
    j = nlohmann::json{{"x", g.x}, {"y", g.y}, {"width", g.width}, {"height", g.height}};
}
inline void from_json(const nlohmann::json& j, Geometry& g) {
    j.at("x").get_to(g.x);
    j.at("y").get_to(g.y);
    j.at("width").get_to(g.width);
    j.at("height").get_to(g.height);
}

inline void to_json(nlohmann::json& j, const FormField& f) {
    j = nlohmann::json{{"element_id", f.element_id},
                       {"input_kind", f.input_kind},
                       {"required", f.required},
                       {"constraints", f.constraints}};
}
inline void from_json(const nlohmann::json& j, FormField& f) {
    j.at("element_id").get_to(f.element_id);
    j.at("input_kind").get_to(f.input_kind);
    j.at("required").get_to(f.required);
    f.constraints = j.value("constraints", std::map<std::string, std::string>{});
}

}  // namespace webqe::dom
