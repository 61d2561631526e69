#pragma once

#include <cctype>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "webqe/error.hpp"
#include "webqe/strings.hpp"

namespace webqe::url {

struct Parts {
    std::string scheme;     // lowercase when parsed
    std::string userinfo;   // without trailing '@'
    std::string host;       // lowercase
    std::string port;       // digits only, empty when absent
    std::string path;       // as written, possibly empty
    std::string query;      // without '?', meaningful only when has_query
    std::string fragment;   // without '#'
    bool has_authority = false;
    bool has_query = false;
    bool has_fragment = false;
};

inline bool is_scheme_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '+' || c == '-' || c == '.';
}

inline std::optional<Parts> parse(std::string_view input) {
    Parts p;
    std::string_view rest = input;

    // scheme
    size_t colon = rest.find(':');
    if (colon != std::string_view::npos && colon > 0 &&
        std::isalpha(static_cast<unsigned char>(rest[0]))) {
        bool ok = true;
        for (size_t i = 1; i < colon; ++i) {
            if (!is_scheme_char(rest[i])) { ok = false; break; }
        }
        // Avoid mistaking "a/b:c" style relative paths for schemes.
        size_t slash = rest.find('/');
        if (ok && (slash == std::string_view::npos || colon < slash)) {
            p.scheme = strings::to_lower(rest.substr(0, colon));
            rest = rest.substr(colon + 1);
        }
    }

    size_t hash = rest.find('#');
    if (hash != std::string_view::npos) {
        p.has_fragment = true;
        p.fragment = std::string(rest.substr(hash + 1));
        rest = rest.substr(0, hash);
    }
    size_t qmark = rest.find('?');
    if (qmark != std::string_view::npos) {
        p.has_query = true;
        p.query = std::string(rest.substr(qmark + 1));
        rest = rest.substr(0, qmark);
    }

    if (rest.substr(0, 2) == "//") {
        p.has_authority = true;
        rest = rest.substr(2);
        size_t path_start = rest.find('/');
        std::string_view authority = path_start == std::string_view::npos ? rest : rest.substr(0, path_start);
        rest = path_start == std::string_view::npos ? std::string_view{} : rest.substr(path_start);

        size_t at = authority.rfind('@');
        if (at != std::string_view::npos) {
            p.userinfo = std::string(authority.substr(0, at));
            authority = authority.substr(at + 1);
        }
        size_t pcolon = authority.rfind(':');
        if (pcolon != std::string_view::npos && authority.find(']') == std::string_view::npos) {
            std::string_view port = authority.substr(pcolon + 1);
            bool digits = !port.empty();
            for (char c : port) digits = digits && std::isdigit(static_cast<unsigned char>(c));
            if (digits || port.empty()) {
                p.port = std::string(port);
                authority = authority.substr(0, pcolon);
            }
        }
        p.host = strings::to_lower(authority);
        if (p.host.empty()) return std::nullopt;
    }
    p.path = std::string(rest);
    return p;
}

// RFC 3986 §5.2.4.
inline std::string remove_dot_segments(std::string_view path) {
    std::string input(path);
    std::string output;
    while (!input.empty()) {
        if (input.rfind("../", 0) == 0) {
            input.erase(0, 3);
        } else if (input.rfind("./", 0) == 0) {
            input.erase(0, 2);
        } else if (input.rfind("/./", 0) == 0) {
            input.erase(0, 2);
        } else if (input == "/.") {
            input = "/";
        } else if (input.rfind("/../", 0) == 0) {
            input.erase(0, 3);
            size_t slash = output.rfind('/');
            output.erase(slash == std::string::npos ? 0 : slash);
        } else if (input == "/..") {
            input = "/";
            size_t slash = output.rfind('/');
            output.erase(slash == std::string::npos ? 0 : slash);
        } else if (input == "." || input == "..") {
            input.clear();
        } else {
            size_t next = input.find('/', input[0] == '/' ? 1 : 0);
            output += input.substr(0, next);
            input.erase(0, next == std::string::npos ? input.size() : next);
        }
    }
    return output;
}

inline std::string merge_paths(const Parts& base, std::string_view ref_path) {
    if (base.has_authority && base.path.empty()) return "/" + std::string(ref_path);
    size_t slash = base.path.rfind('/');
    if (slash == std::string::npos) return std::string(ref_path);
    return base.path.substr(0, slash + 1) + std::string(ref_path);
}

// RFC 3986 §5.2.2 transform-references.
inline Parts resolve(const Parts& base, const Parts& ref) {
    Parts t;
    if (!ref.scheme.empty()) {
        t = ref;
        t.path = remove_dot_segments(ref.path);
        return t;
    }
    t.scheme = base.scheme;
    if (ref.has_authority) {
        t.has_authority = true;
        t.userinfo = ref.userinfo;
        t.host = ref.host;
        t.port = ref.port;
        t.path = remove_dot_segments(ref.path);
        t.has_query = ref.has_query;
        t.query = ref.query;
    } else {
        t.has_authority = base.has_authority;
        t.userinfo = base.userinfo;
        t.host = base.host;
        t.port = base.port;
        if (ref.path.empty()) {
            t.path = base.path;
            t.has_query = ref.has_query ? true : base.has_query;
            t.query = ref.has_query ? ref.query : base.query;
        } else {
            t.path = ref.path[0] == '/' ? remove_dot_segments(ref.path)
                                        : remove_dot_segments(merge_paths(base, ref.path));
            t.has_query = ref.has_query;
            t.query = ref.query;
        }
    }
    t.has_fragment = ref.has_fragment;
    t.fragment = ref.fragment;
    return t;
}

inline std::string fold_percent_encoding(std::string_view s) {
    std::string out(s);
    for (size_t i = 0; i + 2 < out.size(); ++i) {
        if (out[i] == '%' && std::isxdigit(static_cast<unsigned char>(out[i + 1])) &&
            std::isxdigit(static_cast<unsigned char>(out[i + 2]))) {
            out[i + 1] = static_cast<char>(std::toupper(static_cast<unsigned char>(out[i + 1])));
            out[i + 2] = static_cast<char>(std::toupper(static_cast<unsigned char>(out[i + 2])));
        }
    }
    return out;
}

inline bool is_default_port(const std::string& scheme, const std::string& port) {
    return (scheme == "http" && port == "80") || (scheme == "https" && port == "443");
}

inline std::string serialize(const Parts& p) {
    std::string out = p.scheme + "://";
    if (!p.userinfo.empty()) out += p.userinfo + "@";
    out += p.host;
    if (!p.port.empty()) out += ":" + p.port;
    out += p.path;
    if (p.has_query) out += "?" + p.query;
    return out;
}

// Resolves `raw` against `base` and applies the canonical form: http(s) only,
// fragment dropped, default port dropped, dot segments removed, percent
// escapes upper-cased in the path, trailing slash collapsed except at the
// root, query kept verbatim.
inline std::string normalize(std::string_view raw, std::string_view base) {
    if (strings::trim(raw).empty()) throw Error(ErrorCode::MalformedUrl, "empty URL");
    auto base_parts = parse(strings::trim(base));
    if (!base_parts || base_parts->scheme.empty() || !base_parts->has_authority) {
        throw Error(ErrorCode::MalformedUrl, "base is not an absolute URL: " + std::string(base));
    }
    auto ref = parse(strings::trim(raw));
    if (!ref) throw Error(ErrorCode::MalformedUrl, "cannot parse: " + std::string(raw));

    Parts target = resolve(*base_parts, *ref);
    if (target.scheme != "http" && target.scheme != "https") {
        throw Error(ErrorCode::MalformedUrl, "unsupported scheme: " + target.scheme);
    }
    if (target.host.empty()) throw Error(ErrorCode::MalformedUrl, "no host: " + std::string(raw));

    target.has_fragment = false;
    target.fragment.clear();
    if (is_default_port(target.scheme, target.port)) target.port.clear();
    if (target.path.empty()) target.path = "/";
    target.path = fold_percent_encoding(target.path);
    while (target.path.size() > 1 && target.path.back() == '/') target.path.pop_back();
    return serialize(target);
}

inline std::string origin(std::string_view absolute) {
    auto p = parse(absolute);
    if (!p || p->scheme.empty() || p->host.empty()) {
        throw Error(ErrorCode::MalformedUrl, "not absolute: " + std::string(absolute));
    }
    std::string out = p->scheme + "://" + p->host;
    if (!p->port.empty() && !is_default_port(p->scheme, p->port)) out += ":" + p->port;
    return out;
}

inline bool same_origin(std::string_view a, std::string_view b) {
    return origin(a) == origin(b);
}

inline std::string path_of(std::string_view absolute) {
    auto p = parse(absolute);
    if (!p) return "/";
    return p->path.empty() ? "/" : p->path;
}

inline std::string path_and_query(std::string_view absolute) {
    auto p = parse(absolute);
    if (!p) return "/";
    std::string out = p->path.empty() ? "/" : p->path;
    if (p->has_query) out += "?" + p->query;
    return out;
}

// Segments of a path, excluding the empty leading segment ("/a/b" -> {a, b}).
inline std::vector<std::string> path_segments(std::string_view path) {
    std::vector<std::string> segs;
    size_t i = 0;
    while (i < path.size()) {
        if (path[i] == '/') { ++i; continue; }
        size_t next = path.find('/', i);
        segs.emplace_back(path.substr(i, next == std::string_view::npos ? path.size() - i : next - i));
        i = next == std::string_view::npos ? path.size() : next;
    }
    return segs;
}

}  // namespace webqe::url
