#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <regex>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "webqe/dom_model.hpp"
#include "webqe/error.hpp"
#include "webqe/llm_gateway.hpp"
#include "webqe/strings.hpp"
#include "webqe/url.hpp"

namespace webqe::site {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Page types (closed set PT)
// ---------------------------------------------------------------------------

enum class PageType { login, signup, account, listing, detail, form, static_page };

inline const char* to_string(PageType t) {
    switch (t) {
        case PageType::login: return "login";
        case PageType::signup: return "signup";
        case PageType::account: return "account";
        case PageType::listing: return "listing";
        case PageType::detail: return "detail";
        case PageType::form: return "form";
        case PageType::static_page: return "static";
    }
    return "static";
}

inline std::optional<PageType> page_type_from_string(std::string_view s) {
    if (s == "login") return PageType::login;
    if (s == "signup") return PageType::signup;
    if (s == "account") return PageType::account;
    if (s == "listing") return PageType::listing;
    if (s == "detail") return PageType::detail;
    if (s == "form") return PageType::form;
    if (s == "static") return PageType::static_page;
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// URL patterns
// ---------------------------------------------------------------------------

struct DynamicSegment {
    int position = 0;
    std::string inferred_kind;  // numeric | uuid | slug | opaque
};

struct UrlPattern {
    std::string template_;  // path template with {kind} placeholders
    std::vector<std::string> member_urls;
    std::vector<DynamicSegment> dynamic_segments;
};

namespace detail {

inline std::string segment_kind(const std::string& seg) {
    if (seg.empty()) return "opaque";
    bool all_digits = true, has_digit = false, has_lower = false, has_hyphen = false, plain = true;
    for (char c : seg) {
        unsigned char u = static_cast<unsigned char>(c);
        if (std::isdigit(u)) has_digit = true;
        else all_digits = false;
        if (std::islower(u)) has_lower = true;
        if (c == '-') has_hyphen = true;
        if (!(std::islower(u) || std::isdigit(u) || c == '-')) plain = false;
    }
    if (all_digits) return "numeric";
    static const std::regex uuid_re(
        R"([0-9a-fA-F]{8}-[0-9a-fA-F]{4}-[0-9a-fA-F]{4}-[0-9a-fA-F]{4}-[0-9a-fA-F]{12})");
    if (std::regex_match(seg, uuid_re)) return "uuid";
    if (plain && ((has_hyphen && has_lower) || (has_digit && has_lower))) return "slug";
    return "opaque";
}

struct SplitUrl {
    std::string origin;  // "" for path-only inputs
    std::vector<std::string> segments;
};

inline SplitUrl split_url(const std::string& u) {
    SplitUrl out;
    if (strings::contains(u, "://")) {
        out.origin = url::origin(u);
        out.segments = url::path_segments(url::path_of(u));
    } else {
        std::string path = u;
        size_t q = path.find('?');
        if (q != std::string::npos) path.resize(q);
        out.segments = url::path_segments(path);
    }
    return out;
}

// Two same-length URLs merge when every differing segment position carries
// the same inferred kind, and either some position matched literally or the
// differing kind is evidently dynamic (not opaque). Pure path words like
// "/login" vs "/signup" stay separate patterns.
inline bool mergeable(const SplitUrl& a, const SplitUrl& b) {
    if (a.origin != b.origin || a.segments.size() != b.segments.size()) return false;
    bool any_static_match = a.segments.empty();
    bool strong_dynamic = false;
    bool any_diff = false;
    for (size_t i = 0; i < a.segments.size(); ++i) {
        if (a.segments[i] == b.segments[i]) {
            any_static_match = true;
            continue;
        }
        any_diff = true;
        std::string ka = segment_kind(a.segments[i]);
        if (ka != segment_kind(b.segments[i])) return false;
        if (ka != "opaque") strong_dynamic = true;
    }
    if (!any_diff) return true;  // same path, e.g. differing queries
    return any_static_match || strong_dynamic;
}

}  // namespace detail

// Groups normalized URLs into path templates with classified dynamic
// segments. Every input URL lands in exactly one pattern.
inline std::vector<UrlPattern> extract_url_patterns(const std::vector<std::string>& urls) {
    std::vector<std::string> distinct = urls;
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());

    std::vector<detail::SplitUrl> split;
    split.reserve(distinct.size());
    for (const auto& u : distinct) split.push_back(detail::split_url(u));

    // union-find over the pairwise merge relation
    std::vector<size_t> parent(distinct.size());
    std::iota(parent.begin(), parent.end(), 0);
    std::function<size_t(size_t)> find = [&](size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (size_t i = 0; i < distinct.size(); ++i) {
        for (size_t j = i + 1; j < distinct.size(); ++j) {
            if (detail::mergeable(split[i], split[j])) parent[find(i)] = find(j);
        }
    }

    std::map<size_t, std::vector<size_t>> groups;
    for (size_t i = 0; i < distinct.size(); ++i) groups[find(i)].push_back(i);

    std::vector<UrlPattern> patterns;
    for (const auto& [root, members] : groups) {
        UrlPattern p;
        const auto& first = split[members.front()];
        size_t seg_count = first.segments.size();
        for (size_t pos = 0; pos < seg_count; ++pos) {
            std::set<std::string> values;
            for (size_t m : members) values.insert(split[m].segments[pos]);
            if (values.size() > 1) {
                p.dynamic_segments.push_back(
                    {static_cast<int>(pos), detail::segment_kind(*values.begin())});
            }
        }
        auto dynamic_at = [&](size_t pos) -> const DynamicSegment* {
            for (const auto& d : p.dynamic_segments)
                if (d.position == static_cast<int>(pos)) return &d;
            return nullptr;
        };
        std::string tmpl;
        for (size_t pos = 0; pos < seg_count; ++pos) {
            tmpl += "/";
            if (const auto* d = dynamic_at(pos)) tmpl += "{" + d->inferred_kind + "}";
            else tmpl += first.segments[pos];
        }
        if (tmpl.empty()) tmpl = "/";
        p.template_ = tmpl;
        for (size_t m : members) p.member_urls.push_back(distinct[m]);
        std::sort(p.member_urls.begin(), p.member_urls.end());
        patterns.push_back(std::move(p));
    }
    std::sort(patterns.begin(), patterns.end(),
              [](const UrlPattern& a, const UrlPattern& b) { return a.template_ < b.template_; });
    return patterns;
}

// ---------------------------------------------------------------------------
// Navigation
// ---------------------------------------------------------------------------

struct NavEdge {
    std::string from_url;
    std::string to_url;
    std::string via_element;
    int priority = 1;  // 1 = highest, gapless per page
};

// One edge per navigation-bearing interactive element: anchors with href,
// forms (action defaults to the page itself), and formaction carriers.
// Priority ranks navigation-section elements first, then document order.
inline std::vector<NavEdge> rank_navigation(const std::vector<dom::PageModel>& models) {
    std::vector<NavEdge> edges;
    for (const auto& page : models) {
        struct Candidate {
            std::string to_url, via;
            bool in_nav;
            size_t doc_pos;
        };
        std::vector<Candidate> candidates;
        for (size_t i = 0; i < page.elements.size(); ++i) {
            const auto& e = page.elements[i];
            if (!e.interactive) continue;
            std::string raw_target;
            if (e.tag == "a" && e.attr("href")) raw_target = *e.attr("href");
            else if (e.tag == "form") raw_target = e.attr("action") ? *e.attr("action") : page.url;
            else if (e.attr("formaction")) raw_target = *e.attr("formaction");
            else continue;
            try {
                std::string to = url::normalize(raw_target, page.url);
                candidates.push_back({to, e.element_id, e.section == dom::Section::navigation, i});
            } catch (const Error&) {
                // mailto:, javascript:, malformed: not navigation
            }
        }
        std::stable_sort(candidates.begin(), candidates.end(),
                         [](const Candidate& a, const Candidate& b) {
                             if (a.in_nav != b.in_nav) return a.in_nav;
                             return a.doc_pos < b.doc_pos;
                         });
        int rank = 1;
        for (const auto& c : candidates) {
            edges.push_back({page.url, c.to_url, c.via, rank++});
        }
    }
    return edges;
}

// ---------------------------------------------------------------------------
// Site representation
// ---------------------------------------------------------------------------

struct ElementDigest {
    std::string element_id;
    std::string tag;
    std::string locator;
    std::string section;
    bool interactive = false;
    bool visible = true;
    std::string text;
    std::map<std::string, std::string> attrs;  // the prompt-relevant subset
};

struct PageDigest {
    std::string url;
    std::string title;
    std::string summary;
    PageType page_type = PageType::static_page;
    std::map<std::string, std::string> section_digests;  // label -> one-line digest
    std::vector<ElementDigest> element_digests;
    std::vector<dom::FormField> form_fields;

    const ElementDigest* find_element(std::string_view element_id) const {
        for (const auto& e : element_digests)
            if (e.element_id == element_id) return &e;
        return nullptr;
    }
};

struct Chunk {
    std::string chunk_id;
    std::string page_url;
    std::string section_scope;  // "" = whole page
    int part = 0;               // >0 when one section needs several pieces
    std::string rendered_text;
    int estimated_tokens = 0;
    std::string ancestor_context;  // breadcrumb; non-empty for page subsets
};

struct SiteRepresentation {
    std::string base_url;
    std::map<std::string, PageDigest> pages;
    std::vector<UrlPattern> patterns;
    std::vector<NavEdge> nav_edges;
    std::map<std::string, std::string> hierarchy;  // child url -> parent url
    std::vector<std::string> external_urls;        // edge targets outside the crawl
    std::vector<Chunk> chunk_plan;
};

// ---------------------------------------------------------------------------
// Classification
// ---------------------------------------------------------------------------

namespace detail {

// Documented rule constants; the account/detail boundary is delegated to the
// gateway because no deterministic rule separates them reliably.
constexpr int kSignupFieldThreshold = 4;
constexpr int kListingRepeatThreshold = 3;

inline bool looks_like_confirm(const dom::PageModel& page, const dom::FormField& f) {
    const auto* e = page.find(f.element_id);
    if (!e) return false;
    for (const char* key : {"name", "id", "placeholder"}) {
        if (const auto* v = e->attr(key)) {
            std::string folded = strings::to_lower(*v);
            if (strings::contains(folded, "confirm") || strings::contains(folded, "repeat"))
                return true;
        }
    }
    return false;
}

inline bool has_repeated_structures(const dom::PageModel& page) {
    static const std::set<std::string> container_tags = {"li", "tr", "article", "div", "section"};
    for (const auto& e : page.elements) {
        std::map<std::string, int> shape_counts;
        for (const auto& cid : e.children) {
            const auto* child = page.find(cid);
            if (!container_tags.count(child->tag) || child->children.empty()) continue;
            std::string cls = child->attr("class") ? *child->attr("class") : "";
            ++shape_counts[child->tag + "|" + cls];
        }
        for (const auto& [shape, count] : shape_counts) {
            if (count >= kListingRepeatThreshold) return true;
        }
    }
    return false;
}

inline std::string render_element_line(const ElementDigest& e) {
    std::string line = "  " + e.element_id + " " + e.tag + " loc=" + e.locator;
    for (const auto& [k, v] : e.attrs) {
        line += " " + k + "=" + (v.empty() ? "''" : v);
    }
    if (!e.interactive && !e.visible) line += " hidden";
    else if (!e.visible) line += " hidden";
    if (e.interactive) line += " interactive";
    if (!e.text.empty()) line += " text='" + e.text + "'";
    return line;
}

inline std::string render_digest_text(const PageDigest& digest) {
    static const char* section_order[] = {"navigation", "form", "feedback", "content", "other"};
    std::string out;
    for (const char* label : section_order) {
        auto it = digest.section_digests.find(label);
        if (it == digest.section_digests.end()) continue;
        out += "SECTION " + std::string(label) + ": " + it->second + "\n";
        for (const auto& e : digest.element_digests) {
            if (e.section == label) out += render_element_line(e) + "\n";
        }
    }
    return out;
}

}  // namespace detail

// Deterministic rules first; the gateway is consulted only when the rules
// cannot decide, and any non-member reply is coerced back into PT.
inline PageType classify_page(const dom::PageModel& page, llm::Backend* gateway = nullptr,
                              const std::string& digest_text = "") {
    bool any_interactive = false;
    for (const auto& e : page.elements) any_interactive = any_interactive || e.interactive;
    if (!any_interactive) return PageType::static_page;

    int password_fields = 0;
    bool confirm = false;
    int registration_style = 0;
    for (const auto& f : page.form_fields) {
        if (f.input_kind == "password") {
            ++password_fields;
            if (detail::looks_like_confirm(page, f)) confirm = true;
        }
        if (f.input_kind == "text" || f.input_kind == "email" || f.input_kind == "tel" ||
            f.input_kind == "password" || f.input_kind == "name")
            ++registration_style;
    }
    if (password_fields >= 2) confirm = true;

    if (password_fields >= 1 && confirm) return PageType::signup;
    if (password_fields >= 1) return PageType::login;
    if (registration_style >= detail::kSignupFieldThreshold) return PageType::signup;
    if (detail::has_repeated_structures(page)) return PageType::listing;

    bool has_form = false;
    for (const auto& e : page.elements) has_form = has_form || e.tag == "form";
    if (has_form) return PageType::form;

    // interactive page without forms or listings: rules are inconclusive
    if (gateway) {
        std::string prompt =
            "Classify the web page below into exactly one of: login, signup, account, listing, "
            "detail, form, static.\n\nPAGE " +
            page.url + "\nTITLE: " + page.title + "\n" + digest_text +
            "\nReply with JSON {\"page_type\": \"<type>\"}.";
        try {
            auto response = llm::complete(
                llm::PromptEnvelope::make("page_type_v1", prompt, {page.url}, "page_type_v1"),
                *gateway);
            if (response.parsed) {
                auto proposed =
                    page_type_from_string((*response.parsed)["page_type"].get<std::string>());
                if (proposed) return *proposed;
            }
        } catch (const Error&) {
            // unavailable gateway falls through to the rule fallback
        }
    }
    return PageType::static_page;
}

// ---------------------------------------------------------------------------
// Synthesis
// ---------------------------------------------------------------------------

namespace detail {

inline ElementDigest digest_element(const dom::ElementNode& e) {
    ElementDigest d;
    d.element_id = e.element_id;
    d.tag = e.tag;
    d.locator = e.locator;
    d.section = dom::to_string(e.section);
    d.interactive = e.interactive;
    d.visible = e.visible;
    d.text = e.text.substr(0, 80);
    static const char* kept[] = {"id",   "name",     "type",   "href",    "action",
                                 "role", "placeholder", "value", "for",     "required",
                                 "pattern", "minlength", "maxlength", "formaction", "class"};
    for (const char* key : kept) {
        if (const auto* v = e.attr(key)) d.attrs[key] = *v;
    }
    return d;
}

// Keep the representation focused: interactive elements, form fields,
// headings, and visible text carriers. Pure structure nodes stay out of the
// prompt-facing digests.
inline bool digest_worthy(const dom::ElementNode& e) {
    if (e.interactive) return true;
    static const std::set<std::string> headings = {"h1", "h2", "h3", "h4", "title"};
    if (headings.count(e.tag)) return true;
    if (e.section == dom::Section::feedback) return true;
    if (e.visible && !e.text.empty() && e.children.empty()) return true;
    return false;
}

inline std::string summarize_page(const PageDigest& digest, const std::vector<NavEdge>& edges) {
    int interactive = 0;
    for (const auto& e : digest.element_digests) interactive += e.interactive ? 1 : 0;
    std::string summary = std::string(to_string(digest.page_type)) + " page";
    if (!digest.title.empty()) summary += " '" + digest.title + "'";
    summary += strings::format(": %d digest elements (%d interactive), %d form fields",
                               static_cast<int>(digest.element_digests.size()), interactive,
                               static_cast<int>(digest.form_fields.size()));
    std::vector<const NavEdge*> outgoing;
    for (const auto& e : edges)
        if (e.from_url == digest.url) outgoing.push_back(&e);
    std::sort(outgoing.begin(), outgoing.end(),
              [](const NavEdge* a, const NavEdge* b) { return a->priority < b->priority; });
    if (!outgoing.empty()) {
        summary += "; top nav:";
        for (size_t i = 0; i < outgoing.size() && i < 3; ++i) {
            summary += " " + outgoing[i]->to_url;
        }
    }
    return summary;
}

inline std::string nav_digest_line(const SiteRepresentation& site, const std::string& page_url) {
    std::vector<const NavEdge*> outgoing;
    for (const auto& e : site.nav_edges)
        if (e.from_url == page_url) outgoing.push_back(&e);
    std::sort(outgoing.begin(), outgoing.end(),
              [](const NavEdge* a, const NavEdge* b) { return a->priority < b->priority; });
    std::string out = "NAV:";
    if (outgoing.empty()) return out + " none";
    for (const auto* e : outgoing) {
        out += strings::format(" %d->%s(via %s)", e->priority, e->to_url.c_str(), e->via_element.c_str());
    }
    return out;
}

inline std::string page_header(const SiteRepresentation& site, const PageDigest& digest) {
    std::string out = "PAGE " + digest.url + " [" + to_string(digest.page_type) + "]\n";
    out += "SUMMARY: " + digest.summary + "\n";
    out += nav_digest_line(site, digest.url) + "\n";
    return out;
}

inline std::vector<std::string> page_visit_order(const SiteRepresentation& site) {
    std::vector<std::string> order;
    std::set<std::string> seen;
    std::vector<std::string> frontier;
    if (site.pages.count(site.base_url)) {
        frontier.push_back(site.base_url);
        seen.insert(site.base_url);
    }
    while (!frontier.empty()) {
        std::string current = frontier.front();
        frontier.erase(frontier.begin());
        order.push_back(current);
        std::vector<const NavEdge*> outgoing;
        for (const auto& e : site.nav_edges)
            if (e.from_url == current) outgoing.push_back(&e);
        std::sort(outgoing.begin(), outgoing.end(),
                  [](const NavEdge* a, const NavEdge* b) { return a->priority < b->priority; });
        for (const auto* e : outgoing) {
            if (site.pages.count(e->to_url) && seen.insert(e->to_url).second)
                frontier.push_back(e->to_url);
        }
    }
    for (const auto& [url, digest] : site.pages) {
        if (seen.insert(url).second) order.push_back(url);
    }
    return order;
}

}  // namespace detail

// Splits the representation into prompt-sized pieces. Whole pages by
// default; oversized pages split by section with the page breadcrumb
// replicated so hierarchy survives; oversized sections split into parts.
inline std::vector<Chunk> build_chunk_plan(const SiteRepresentation& site, int budget_tokens) {
    if (budget_tokens < 256) {
        throw Error(ErrorCode::ConfigError, "budget_tokens must be >= 256");
    }
    std::vector<Chunk> plan;
    int counter = 0;
    auto next_id = [&] { return strings::padded_id("c", ++counter, 4); };

    for (const auto& page_url : detail::page_visit_order(site)) {
        const PageDigest& digest = site.pages.at(page_url);
        std::string header = detail::page_header(site, digest);
        std::string full = header + detail::render_digest_text(digest);
        if (llm::estimate_tokens(full) <= budget_tokens) {
            Chunk c;
            c.chunk_id = next_id();
            c.page_url = page_url;
            c.rendered_text = full;
            c.estimated_tokens = llm::estimate_tokens(full);
            plan.push_back(std::move(c));
            continue;
        }

        // split by section, breadcrumb replicated in every piece
        static const char* section_order[] = {"navigation", "form", "feedback", "content", "other"};
        for (const char* label : section_order) {
            auto it = digest.section_digests.find(label);
            if (it == digest.section_digests.end()) continue;
            std::vector<std::string> lines;
            for (const auto& e : digest.element_digests) {
                if (e.section == label) lines.push_back(detail::render_element_line(e));
            }
            std::string section_head = "SECTION " + std::string(label) + ": " + it->second + "\n";
            auto flush = [&](const std::vector<std::string>& body, int part) {
                Chunk c;
                c.chunk_id = next_id();
                c.page_url = page_url;
                c.section_scope = label;
                c.part = part;
                c.ancestor_context = header;
                c.rendered_text = header + section_head + strings::join(body, "\n") +
                                  (body.empty() ? "" : "\n");
                c.estimated_tokens = llm::estimate_tokens(c.rendered_text);
                plan.push_back(std::move(c));
            };
            std::string whole = header + section_head + strings::join(lines, "\n") + (lines.empty() ? "" : "\n");
            if (llm::estimate_tokens(whole) <= budget_tokens) {
                flush(lines, 0);
                continue;
            }
            std::vector<std::string> body;
            int part = 1;
            for (const auto& line : lines) {
                std::string single = header + section_head + line + "\n";
                if (llm::estimate_tokens(single) > budget_tokens) {
                    throw Error(ErrorCode::ChunkUnderflow,
                                "one element rendering exceeds the budget on " + page_url);
                }
                std::string candidate = header + section_head + strings::join(body, "\n") +
                                        (body.empty() ? "" : "\n") + line + "\n";
                if (!body.empty() && llm::estimate_tokens(candidate) > budget_tokens) {
                    flush(body, part++);
                    body.clear();
                }
                body.push_back(line);
            }
            if (!body.empty() || lines.empty()) flush(body, part);
        }
    }
    return plan;
}

struct SynthesisOptions {
    int budget_tokens = 4096;
    llm::Backend* gateway = nullptr;  // consulted for inconclusive page types
};

// Fuses per-page models into the hierarchical representation: patterns,
// classified page digests, ranked navigation, URL-prefix hierarchy, and the
// context-budgeted chunk plan.
inline SiteRepresentation synthesize(const std::vector<dom::PageModel>& models,
                                     const std::string& base_url, const SynthesisOptions& options) {
    SiteRepresentation site;
    site.base_url = url::normalize(base_url, base_url);

    std::vector<std::string> urls;
    for (const auto& m : models) urls.push_back(m.url);
    site.patterns = extract_url_patterns(urls);
    site.nav_edges = rank_navigation(models);

    std::set<std::string> page_urls(urls.begin(), urls.end());
    std::set<std::string> externals;
    for (const auto& e : site.nav_edges) {
        if (!page_urls.count(e.to_url)) externals.insert(e.to_url);
    }
    site.external_urls.assign(externals.begin(), externals.end());

    for (const auto& model : models) {
        PageDigest digest;
        digest.url = model.url;
        digest.title = model.title;
        for (const auto& e : model.elements) {
            if (detail::digest_worthy(e)) digest.element_digests.push_back(detail::digest_element(e));
        }
        for (const auto& [label, ids] : model.sections) {
            int interactive = 0;
            for (const auto& id : ids) interactive += model.find(id)->interactive ? 1 : 0;
            digest.section_digests[label] =
                strings::format("%d elements (%d interactive)", static_cast<int>(ids.size()), interactive);
        }
        digest.form_fields = model.form_fields;
        digest.page_type = classify_page(model, options.gateway, detail::render_digest_text(digest));
        site.pages[model.url] = std::move(digest);
    }
    for (auto& [page_url, digest] : site.pages) {
        digest.summary = detail::summarize_page(digest, site.nav_edges);
    }

    // hierarchy: parent = longest proper path prefix present in the crawl
    for (const auto& child_url : urls) {
        auto child_segs = url::path_segments(url::path_of(child_url));
        std::string best;
        size_t best_len = 0;
        for (const auto& candidate : urls) {
            if (candidate == child_url) continue;
            if (url::origin(candidate) != url::origin(child_url)) continue;
            auto segs = url::path_segments(url::path_of(candidate));
            if (segs.size() >= child_segs.size()) continue;
            if (!std::equal(segs.begin(), segs.end(), child_segs.begin())) continue;
            if (segs.size() + 1 > best_len) {
                best_len = segs.size() + 1;
                best = candidate;
            }
        }
        if (!best.empty()) site.hierarchy[child_url] = best;
    }

    site.chunk_plan = build_chunk_plan(site, options.budget_tokens);
    return site;
}

// ---------------------------------------------------------------------------
// Canonical JSON (site.json)
// ---------------------------------------------------------------------------

inline void to_json(json& j, const DynamicSegment& d) {
    j = json{{"position", d.position}, {"inferred_kind", d.inferred_kind}};
}
inline void from_json(const json& j, DynamicSegment& d) {
    j.at("position").get_to(d.position);
    j.at("inferred_kind").get_to(d.inferred_kind);
}

inline void to_json(json& j, const UrlPattern& p) {
    j = json{{"template", p.template_},
             {"member_urls", p.member_urls},
             {"dynamic_segments", p.dynamic_segments}};
}
inline void from_json(const json& j, UrlPattern& p) {
    j.at("template").get_to(p.template_);
    j.at("member_urls").get_to(p.member_urls);
    j.at("dynamic_segments").get_to(p.dynamic_segments);
}

inline void to_json(json& j, const NavEdge& e) {
    j = json{{"from_url", e.from_url},
             {"to_url", e.to_url},
             {"via_element", e.via_element},
             {"priority", e.priority}};
}
inline void from_json(const json& j, NavEdge& e) {
    j.at("from_url").get_to(e.from_url);
    j.at("to_url").get_to(e.to_url);
    j.at("via_element").get_to(e.via_element);
    j.at("priority").get_to(e.priority);
}

inline void to_json(json& j, const ElementDigest& e) {
    j = json{{"element_id", e.element_id},
             {"tag", e.tag},
             {"locator", e.locator},
             {"section", e.section},
             {"interactive", e.interactive},
             {"visible", e.visible},
             {"text", e.text},
             {"attrs", e.attrs}};
}
inline void from_json(const json& j, ElementDigest& e) {
    j.at("element_id").get_to(e.element_id);
    j.at("tag").get_to(e.tag);
    j.at("locator").get_to(e.locator);
    j.at("section").get_to(e.section);
    j.at("interactive").get_to(e.interactive);
    j.at("visible").get_to(e.visible);
    j.at("text").get_to(e.text);
    e.attrs = j.value("attrs", std::map<std::string, std::string>{});
}

inline void to_json(json& j, const PageDigest& p) {
    j = json{{"url", p.url},
             {"title", p.title},
             {"summary", p.summary},
             {"page_type", to_string(p.page_type)},
             {"section_digests", p.section_digests},
             {"element_digests", p.element_digests},
             {"form_fields", p.form_fields}};
}
inline void from_json(const json& j, PageDigest& p) {
    j.at("url").get_to(p.url);
    j.at("title").get_to(p.title);
    j.at("summary").get_to(p.summary);
    p.page_type = page_type_from_string(j.at("page_type").get<std::string>())
                      .value_or(PageType::static_page);
    p.section_digests = j.value("section_digests", std::map<std::string, std::string>{});
    j.at("element_digests").get_to(p.element_digests);
    p.form_fields = j.value("form_fields", std::vector<dom::FormField>{});
}

inline void to_json(json& j, const Chunk& c) {
    j = json{{"chunk_id", c.chunk_id},
             {"page_url", c.page_url},
             {"section_scope", c.section_scope},
             {"part", c.part},
             {"rendered_text", c.rendered_text},
             {"estimated_tokens", c.estimated_tokens},
             {"ancestor_context", c.ancestor_context}};
}
inline void from_json(const json& j, Chunk& c) {
    j.at("chunk_id").get_to(c.chunk_id);
    j.at("page_url").get_to(c.page_url);
    c.section_scope = j.value("section_scope", "");
    c.part = j.value("part", 0);
    j.at("rendered_text").get_to(c.rendered_text);
    j.at("estimated_tokens").get_to(c.estimated_tokens);
    c.ancestor_context = j.value("ancestor_context", "");
}

inline void to_json(json& j, const SiteRepresentation& s) {
    j = json{{"base_url", s.base_url},   {"pages", s.pages},
             {"patterns", s.patterns},   {"nav_edges", s.nav_edges},
             {"hierarchy", s.hierarchy}, {"external_urls", s.external_urls},
             {"chunk_plan", s.chunk_plan}};
}
inline void from_json(const json& j, SiteRepresentation& s) {
    j.at("base_url").get_to(s.base_url);
    s.pages.clear();
    for (const auto& [k, v] : j.at("pages").items()) s.pages[k] = v.get<PageDigest>();
    j.at("patterns").get_to(s.patterns);
    j.at("nav_edges").get_to(s.nav_edges);
    s.hierarchy = j.value("hierarchy", std::map<std::string, std::string>{});
    s.external_urls = j.value("external_urls", std::vector<std::string>{});
    j.at("chunk_plan").get_to(s.chunk_plan);
}

}  // namespace webqe::site
