#pragma once

#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "webqe/error.hpp"
#include "webqe/strings.hpp"

namespace webqe::html {

struct Attr {
    std::string name;   // lowercase
    std::string value;  // entity-decoded
};

struct Node {
    std::string tag;  // lowercase
    std::vector<Attr> attrs;
    std::string own_text;  // direct text children, concatenated
    Node* parent = nullptr;
    std::vector<std::unique_ptr<Node>> children;

    const std::string* attr(std::string_view name) const {
        for (const auto& a : attrs) {
            if (a.name == name) return &a.value;
        }
        return nullptr;
    }
    bool has_attr(std::string_view name) const { return attr(name) != nullptr; }
};

struct Document {
    std::unique_ptr<Node> root;
    std::string title;
    size_t element_count = 0;
};

namespace detail {

inline const std::set<std::string>& void_elements() {
    static const std::set<std::string> v = {"area", "base", "br",    "col",  "embed",
                                            "hr",   "img",  "input", "link", "meta",
                                            "param", "source", "track", "wbr"};
    return v;
}

inline const std::set<std::string>& raw_text_elements() {
    static const std::set<std::string> v = {"script", "style", "textarea", "title"};
    return v;
}

inline std::string decode_entities(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (size_t i = 0; i < s.size(); ++i) {
        if (s[i] != '&') {
            out.push_back(s[i]);
            continue;
        }
        size_t semi = s.find(';', i + 1);
        if (semi == std::string_view::npos || semi - i > 10) {
            out.push_back('&');
            continue;
        }
        std::string_view name = s.substr(i + 1, semi - i - 1);
        if (name == "amp") out.push_back('&');
        else if (name == "lt") out.push_back('<');
        else if (name == "gt") out.push_back('>');
        else if (name == "quot") out.push_back('"');
        else if (name == "apos") out.push_back('\'');
        else if (name == "nbsp") out.push_back(' ');
        else if (!name.empty() && name[0] == '#') {
            long code = 0;
            bool ok = false;
            if (name.size() > 1 && (name[1] == 'x' || name[1] == 'X')) {
                code = std::strtol(std::string(name.substr(2)).c_str(), nullptr, 16);
                ok = name.size() > 2;
            } else {
                code = std::strtol(std::string(name.substr(1)).c_str(), nullptr, 10);
                ok = name.size() > 1;
            }
            if (ok && code > 0 && code < 0x110000) {
                // UTF-8 encode
                unsigned cp = static_cast<unsigned>(code);
                if (cp < 0x80) out.push_back(static_cast<char>(cp));
                else if (cp < 0x800) {
                    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
                    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
                } else if (cp < 0x10000) {
                    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
                    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
                    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
                } else {
                    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
                    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
                    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
                    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
                }
            } else {
                out.append(s.substr(i, semi - i + 1));
            }
        } else {
            out.append(s.substr(i, semi - i + 1));
            i = semi;
            continue;
        }
        i = semi;
    }
    return out;
}

// Tags implicitly closed when the same tag (or a sibling-kind tag) opens.
inline bool implies_close(const std::string& open, const std::string& incoming) {
    if (open == incoming &&
        (open == "li" || open == "p" || open == "tr" || open == "option" || open == "dt" ||
         open == "dd"))
        return true;
    if ((open == "td" || open == "th") && (incoming == "td" || incoming == "th" || incoming == "tr"))
        return true;
    if (open == "p" && (incoming == "div" || incoming == "ul" || incoming == "ol" ||
                        incoming == "table" || incoming == "form" || incoming == "section"))
        return true;
    return false;
}

}  // namespace detail

// Error-recovering parse of an HTML fragment or document. Multiple top-level
// elements are wrapped in a synthetic <html> root so the result is always a
// single tree. Throws UnparseableDocument when no element can be recovered.
inline Document parse(std::string_view input) {
    using namespace detail;

    Document doc;
    std::vector<std::unique_ptr<Node>> top_level;
    std::vector<Node*> stack;

    auto append_node = [&](std::unique_ptr<Node> node) -> Node* {
        Node* raw = node.get();
        if (stack.empty()) {
            top_level.push_back(std::move(node));
        } else {
            raw->parent = stack.back();
            stack.back()->children.push_back(std::move(node));
        }
        return raw;
    };
    auto append_text = [&](std::string_view text) {
        std::string decoded = decode_entities(text);
        if (strings::trim(decoded).empty()) return;
        if (!stack.empty()) {
            auto& t = stack.back()->own_text;
            if (!t.empty()) t += ' ';
            t += strings::collapse_ws(decoded);
        }
    };

    size_t i = 0;
    const size_t n = input.size();
    while (i < n) {
        if (input[i] != '<') {
            size_t lt = input.find('<', i);
            if (lt == std::string_view::npos) lt = n;
            append_text(input.substr(i, lt - i));
            i = lt;
            continue;
        }
        if (input.compare(i, 4, "<!--") == 0) {
            size_t end = input.find("-->", i + 4);
            i = end == std::string_view::npos ? n : end + 3;
            continue;
        }
        if (i + 1 < n && (input[i + 1] == '!' || input[i + 1] == '?')) {  // doctype, PI
            size_t end = input.find('>', i);
            i = end == std::string_view::npos ? n : end + 1;
            continue;
        }
        if (i + 1 < n && input[i + 1] == '/') {  // end tag
            size_t end = input.find('>', i);
            if (end == std::string_view::npos) break;
            std::string tag = strings::to_lower(strings::trim(input.substr(i + 2, end - i - 2)));
            for (size_t d = stack.size(); d-- > 0;) {
                if (stack[d]->tag == tag) {
                    stack.resize(d);
                    break;
                }
            }
            i = end + 1;
            continue;
        }
        if (i + 1 >= n || !(std::isalpha(static_cast<unsigned char>(input[i + 1])))) {
            append_text(input.substr(i, 1));
            ++i;
            continue;
        }

        // start tag
        size_t j = i + 1;
        while (j < n && (std::isalnum(static_cast<unsigned char>(input[j])) || input[j] == '-')) ++j;
        std::string tag = strings::to_lower(input.substr(i + 1, j - i - 1));

        auto node = std::make_unique<Node>();
        node->tag = tag;

        bool self_closing = false;
        while (j < n && input[j] != '>') {
            while (j < n && strings::is_space(input[j])) ++j;
            if (j >= n || input[j] == '>') break;
            if (input[j] == '/') {
                self_closing = true;
                ++j;
                continue;
            }
            size_t name_start = j;
            while (j < n && input[j] != '=' && input[j] != '>' && input[j] != '/' &&
                   !strings::is_space(input[j]))
                ++j;
            std::string name = strings::to_lower(input.substr(name_start, j - name_start));
            std::string value;
            while (j < n && strings::is_space(input[j])) ++j;
            if (j < n && input[j] == '=') {
                ++j;
                while (j < n && strings::is_space(input[j])) ++j;
                if (j < n && (input[j] == '"' || input[j] == '\'')) {
                    char q = input[j++];
                    size_t vstart = j;
                    while (j < n && input[j] != q) ++j;
                    value = decode_entities(input.substr(vstart, j - vstart));
                    if (j < n) ++j;
                } else {
                    size_t vstart = j;
                    while (j < n && input[j] != '>' && !strings::is_space(input[j])) ++j;
                    value = decode_entities(input.substr(vstart, j - vstart));
                }
            }
            if (!name.empty()) node->attrs.push_back({name, value});
        }
        if (j < n) ++j;  // consume '>'
        i = j;

        while (!stack.empty() && implies_close(stack.back()->tag, tag)) stack.pop_back();

        const bool is_void = void_elements().count(tag) > 0 || self_closing;
        const bool is_raw = raw_text_elements().count(tag) > 0;
        Node* raw = append_node(std::move(node));
        ++doc.element_count;

        if (is_raw && !is_void) {
            std::string close = "</" + tag;
            size_t end = strings::to_lower(std::string(input.substr(i))).find(close);
            size_t abs_end = end == std::string::npos ? n : i + end;
            std::string content(input.substr(i, abs_end - i));
            raw->own_text = tag == "script" || tag == "style"
                                ? content
                                : strings::collapse_ws(decode_entities(content));
            if (tag == "title" && doc.title.empty()) raw->own_text = strings::collapse_ws(decode_entities(content));
            size_t gt = input.find('>', abs_end);
            i = gt == std::string_view::npos ? n : gt + 1;
        } else if (!is_void) {
            stack.push_back(raw);
        }
    }

    if (top_level.empty()) {
        throw Error(ErrorCode::UnparseableDocument, "no elements recovered from input");
    }
    if (top_level.size() == 1) {
        doc.root = std::move(top_level.front());
    } else {
        auto wrapper = std::make_unique<Node>();
        wrapper->tag = "html";
        for (auto& child : top_level) {
            child->parent = wrapper.get();
            wrapper->children.push_back(std::move(child));
        }
        doc.root = std::move(wrapper);
        ++doc.element_count;
    }

    // first <title> wins
    std::vector<const Node*> work{doc.root.get()};
    while (!work.empty() && doc.title.empty()) {
        const Node* cur = work.back();
        work.pop_back();
        if (cur->tag == "title") {
            doc.title = strings::trim(cur->own_text);
            break;
        }
        for (auto it = cur->children.rbegin(); it != cur->children.rend(); ++it)
            work.push_back(it->get());
    }
    return doc;
}

}  // namespace webqe::html
