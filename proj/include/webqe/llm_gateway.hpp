#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <regex>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include "webqe/error.hpp"
#include "webqe/strings.hpp"

namespace webqe::llm {

using nlohmann::json;

// ceil(characters / 4); provider-agnostic token estimate shared by the
// chunker and the prompt budget guard.
inline int estimate_tokens(std::string_view text) {
    return static_cast<int>((text.size() + 3) / 4);
}

inline std::string sha256_hex(std::string_view data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr);
    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(len * 2);
    for (unsigned i = 0; i < len; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 0xF]);
    }
    return out;
}

struct PromptEnvelope {
    std::string template_id;
    std::string rendered_text;
    int estimated_tokens = 0;
    std::vector<std::string> context_refs;
    std::string expected_schema;  // empty = free text

    static PromptEnvelope make(std::string template_id, std::string text,
                               std::vector<std::string> refs = {}, std::string schema = "") {
        PromptEnvelope env;
        env.template_id = std::move(template_id);
        env.rendered_text = std::move(text);
        env.estimated_tokens = estimate_tokens(env.rendered_text);
        env.context_refs = std::move(refs);
        env.expected_schema = std::move(schema);
        return env;
    }
};

struct LlmResponse {
    std::string raw_text;
    std::optional<json> parsed;  // present iff it validates against expected_schema
    std::vector<std::string> schema_errors;  // non-empty when parsing gave up
    std::string backend_id;
    long latency_ms = 0;
};

// ---------------------------------------------------------------------------
// Structured response schemas. Hand-rolled checks; identifiers are the
// replay-transcript contract.
// ---------------------------------------------------------------------------

inline const std::set<std::string>& known_step_verbs() {
    static const std::set<std::string> v = {"navigate", "click",       "type",
                                            "clear",    "select",      "assert_text",
                                            "assert_visible", "assert_url", "wait"};
    return v;
}

inline std::vector<std::string> validate_schema(const std::string& schema_id, const json& j) {
    std::vector<std::string> errors;
    auto require_string = [&](const json& obj, const char* key, const std::string& where) {
        if (!obj.contains(key) || !obj[key].is_string() || obj[key].get<std::string>().empty())
            errors.push_back(where + ": missing string field '" + key + "'");
    };
    if (schema_id == "page_type_v1") {
        if (!j.is_object()) { errors.push_back("page_type_v1: not an object"); return errors; }
        require_string(j, "page_type", "page_type_v1");
    } else if (schema_id == "test_cases_v1") {
        if (!j.is_object() || !j.contains("cases") || !j["cases"].is_array()) {
            errors.push_back("test_cases_v1: expected object with 'cases' array");
            return errors;
        }
        int idx = 0;
        for (const auto& c : j["cases"]) {
            std::string where = "cases[" + std::to_string(idx++) + "]";
            if (!c.is_object()) { errors.push_back(where + ": not an object"); continue; }
            require_string(c, "name", where);
            require_string(c, "test_type", where);
            require_string(c, "target_page", where);
            if (!c.contains("steps") || !c["steps"].is_array() || c["steps"].empty()) {
                errors.push_back(where + ": missing non-empty 'steps' array");
                continue;
            }
            int sidx = 0;
            for (const auto& s : c["steps"]) {
                std::string swhere = where + ".steps[" + std::to_string(sidx++) + "]";
                if (!s.is_object()) { errors.push_back(swhere + ": not an object"); continue; }
                require_string(s, "verb", swhere);
                if (s.contains("verb") && s["verb"].is_string() &&
                    !known_step_verbs().count(s["verb"].get<std::string>()))
                    errors.push_back(swhere + ": unknown verb '" + s["verb"].get<std::string>() + "'");
                require_string(s, "target", swhere);
            }
        }
    } else if (schema_id == "data_mapping_v1") {
        if (!j.is_object() || !j.contains("mappings") || !j["mappings"].is_object())
            errors.push_back("data_mapping_v1: expected object with 'mappings' object");
    } else if (schema_id == "summary_v1") {
        if (!j.is_object()) { errors.push_back("summary_v1: not an object"); return errors; }
        require_string(j, "summary", "summary_v1");
    } else {
        errors.push_back("unknown schema: " + schema_id);
    }
    return errors;
}

// Extracts the first JSON object from a reply, tolerating markdown fences
// and prose around it.
inline std::optional<json> extract_json(const std::string& raw) {
    size_t start = raw.find('{');
    if (start == std::string::npos) return std::nullopt;
    int depth = 0;
    bool in_string = false;
    for (size_t i = start; i < raw.size(); ++i) {
        char c = raw[i];
        if (in_string) {
            if (c == '\\') ++i;
            else if (c == '"') in_string = false;
            continue;
        }
        if (c == '"') in_string = true;
        else if (c == '{') ++depth;
        else if (c == '}') {
            if (--depth == 0) {
                auto parsed = json::parse(raw.substr(start, i - start + 1), nullptr, false);
                if (parsed.is_discarded()) return std::nullopt;
                return parsed;
            }
        }
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Backends
// ---------------------------------------------------------------------------

class Backend {
public:
    virtual ~Backend() = default;
    virtual std::string id() const = 0;
    virtual int context_limit_tokens() const { return 32768; }
    // Returns raw completion text; throws BackendUnavailable on failure.
    virtual std::string complete_text(const PromptEnvelope& envelope) = 0;
};

// Deterministic heuristic stand-in so the pipeline runs fully offline.
// Produces schema-valid replies derived from the prompt text alone.
class MockBackend : public Backend {
public:
    std::string id() const override { return "mock"; }

    std::string complete_text(const PromptEnvelope& envelope) override {
        if (envelope.expected_schema == "page_type_v1") return page_type_reply(envelope.rendered_text);
        if (envelope.expected_schema == "test_cases_v1") return test_cases_reply(envelope.rendered_text);
        if (envelope.expected_schema == "data_mapping_v1") return mapping_reply(envelope.rendered_text);
        if (envelope.expected_schema == "summary_v1") return summary_reply(envelope.rendered_text);
        return "{}";
    }

private:
    static std::string page_type_reply(const std::string& prompt) {
        std::string p = strings::to_lower(prompt);
        const char* type = "static";
        if (strings::contains(p, "confirm") && strings::contains(p, "password")) type = "signup";
        else if (strings::contains(p, "signup") || strings::contains(p, "sign up") ||
                 strings::contains(p, "register")) type = "signup";
        else if (strings::contains(p, "password")) type = "login";
        else if (strings::contains(p, "sign in") || strings::contains(p, "login")) type = "login";
        else if (strings::contains(p, "cart") || strings::contains(p, "item") ||
                 strings::contains(p, "product")) type = "listing";
        else if (strings::contains(p, "account") || strings::contains(p, "profile")) type = "account";
        return json{{"page_type", type}}.dump();
    }

    struct DigestElement {
        std::string id, tag, type, name;
    };

    // Digest lines look like "  e0005 input loc=#user-name type=text ...".
    static std::vector<DigestElement> parse_elements(const std::string& prompt) {
        std::vector<DigestElement> out;
        static const std::regex line_re(R"(^\s+(e\d{4}) (\w+) loc=(\S+)(.*)$)");
        for (const auto& line : strings::split(prompt, '\n')) {
            std::smatch m;
            if (!std::regex_match(line, m, line_re)) continue;
            DigestElement el;
            el.id = m[1];
            el.tag = m[2];
            std::string rest = m[4];
            std::smatch tm;
            static const std::regex type_re(R"(type=(\S+))");
            if (std::regex_search(rest, tm, type_re)) el.type = tm[1];
            static const std::regex name_re(R"(name=(\S+))");
            if (std::regex_search(rest, tm, name_re)) el.name = tm[1];
            out.push_back(std::move(el));
        }
        return out;
    }

    static std::string test_cases_reply(const std::string& prompt) {
        auto elements = parse_elements(prompt);
        std::string page_url;
        {
            static const std::regex page_re(R"(PAGE (\S+))");
            std::smatch m;
            if (std::regex_search(prompt, m, page_re)) page_url = m[1];
        }
        std::string password_id, text_id, submit_id;
        for (const auto& el : elements) {
            if (el.tag == "input" && el.type == "password" && password_id.empty()) password_id = el.id;
            if (el.tag == "input" && (el.type.empty() || el.type == "text" || el.type == "email") &&
                text_id.empty())
                text_id = el.id;
            if ((el.type == "submit" || el.tag == "button") && submit_id.empty()) submit_id = el.id;
        }
        json cases = json::array();
        if (!password_id.empty() && !text_id.empty() && !submit_id.empty()) {
            cases.push_back(
                {{"name", "Submit form with valid credentials"},
                 {"priority", "High"},
                 {"description", "Fill the form with valid values and submit."},
                 {"test_type", "field_validation"},
                 {"target_page", page_url},
                 {"steps",
                  json::array({{{"verb", "type"}, {"target", text_id}, {"argument", "slot:username"}},
                               {{"verb", "type"}, {"target", password_id}, {"argument", "slot:password"}},
                               {{"verb", "click"}, {"target", submit_id}}})},
                 {"expected", json::array({"form accepts valid input"})},
                 {"data_slots", json::array({{{"element_id", text_id}, {"slot", "username"}, {"scenario", "valid"}},
                                             {{"element_id", password_id}, {"slot", "password"}, {"scenario", "valid"}}})}});
            cases.push_back(
                {{"name", "Submit form with empty required fields"},
                 {"priority", "Medium"},
                 {"description", "Submit without filling required fields and expect an error."},
                 {"test_type", "error_handling"},
                 {"target_page", page_url},
                 {"steps", json::array({{{"verb", "click"}, {"target", submit_id}}})},
                 {"expected", json::array({"an error is reported"})},
                 {"data_slots", json::array()}});
        } else if (!submit_id.empty() || !text_id.empty()) {
            std::string target = submit_id.empty() ? text_id : submit_id;
            cases.push_back({{"name", "Exercise primary interactive element"},
                             {"priority", "Medium"},
                             {"description", "Interact with the page's primary control."},
                             {"test_type", "navigation"},
                             {"target_page", page_url},
                             {"steps", json::array({{{"verb", "assert_visible"}, {"target", target}}})},
                             {"expected", json::array({"control is present"})},
                             {"data_slots", json::array()}});
        }
        return json{{"cases", cases}}.dump();
    }

    static std::string mapping_reply(const std::string& prompt) {
        // slot and column lists are rendered one per line as "slot: x" / "column: y"
        std::vector<std::string> slots, columns;
        for (const auto& line : strings::split(prompt, '\n')) {
            auto t = strings::trim(line);
            if (t.rfind("slot: ", 0) == 0) slots.push_back(t.substr(6));
            if (t.rfind("column: ", 0) == 0) columns.push_back(t.substr(8));
        }
        auto fold = [](const std::string& s) {
            std::string out;
            for (char c : strings::to_lower(s))
                if (std::isalnum(static_cast<unsigned char>(c))) out.push_back(c);
            return out;
        };
        json mappings = json::object();
        for (const auto& slot : slots) {
            for (const auto& col : columns) {
                std::string fs = fold(slot), fc = fold(col);
                if (strings::contains(fs, fc) || strings::contains(fc, fs)) {
                    mappings[slot] = col;
                    break;
                }
            }
        }
        return json{{"mappings", mappings}}.dump();
    }

    static std::string summary_reply(const std::string& prompt) {
        std::smatch m;
        static const std::regex rate_re(R"((\d+) of (\d+) passed)");
        std::string line = "Execution completed.";
        if (std::regex_search(prompt, m, rate_re)) {
            line = "Of the " + m[2].str() + " generated checks, " + m[1].str() +
                   " behaved as expected; the remainder point at concrete page-level issues worth a look.";
        }
        return json{{"summary", line}}.dump();
    }
};

struct TranscriptEntry {
    std::string prompt_digest;
    std::string template_id;
    std::string prompt_text;
    std::string response;
};

inline void to_json(json& j, const TranscriptEntry& e) {
    j = json{{"prompt_digest", e.prompt_digest},
             {"template_id", e.template_id},
             {"prompt_text", e.prompt_text},
             {"response", e.response}};
}
inline void from_json(const json& j, TranscriptEntry& e) {
    j.at("prompt_digest").get_to(e.prompt_digest);
    e.template_id = j.value("template_id", "");
    e.prompt_text = j.value("prompt_text", "");
    j.at("response").get_to(e.response);
}

// Returns recorded responses keyed by the digest of the rendered prompt.
// Replaying an archive reproduces a recorded session byte-identically.
class ReplayBackend : public Backend {
public:
    explicit ReplayBackend(const std::string& transcript_dir, size_t digest_chars = 64)
        : digest_chars_(digest_chars) {
        namespace fs = std::filesystem;
        if (!fs::is_directory(transcript_dir)) {
            throw Error(ErrorCode::BackendUnavailable, "transcript dir missing: " + transcript_dir);
        }
        for (const auto& entry : fs::directory_iterator(transcript_dir)) {
            if (entry.path().extension() != ".json") continue;
            std::ifstream in(entry.path());
            json j = json::parse(in, nullptr, false);
            if (j.is_discarded()) {
                throw Error(ErrorCode::BackendUnavailable, "bad transcript file: " + entry.path().string());
            }
            TranscriptEntry te = j.get<TranscriptEntry>();
            entries_[te.prompt_digest] = std::move(te);
        }
    }

    std::string id() const override { return "replay"; }

    std::string complete_text(const PromptEnvelope& envelope) override {
        std::string digest = sha256_hex(envelope.rendered_text).substr(0, digest_chars_);
        auto it = entries_.find(digest);
        if (it == entries_.end()) {
            throw Error(ErrorCode::BackendUnavailable,
                        "no transcript entry for prompt digest " + digest + " (template " +
                            envelope.template_id + ")");
        }
        return it->second.response;
    }

    size_t size() const { return entries_.size(); }

private:
    std::map<std::string, TranscriptEntry> entries_;
    size_t digest_chars_;
};

// Wraps another backend and archives every (prompt digest, response) pair as
// one JSON file per prompt. Refuses ambiguous entries when two distinct
// prompts collide on a digest.
class RecordingBackend : public Backend {
public:
    RecordingBackend(Backend& inner, std::string transcript_dir, size_t digest_chars = 64)
        : inner_(inner), dir_(std::move(transcript_dir)), digest_chars_(digest_chars) {
        std::filesystem::create_directories(dir_);
    }

    std::string id() const override { return inner_.id(); }
    int context_limit_tokens() const override { return inner_.context_limit_tokens(); }

    std::string complete_text(const PromptEnvelope& envelope) override {
        std::string response = inner_.complete_text(envelope);
        std::string digest = sha256_hex(envelope.rendered_text).substr(0, digest_chars_);
        std::string path = dir_ + "/" + digest + ".json";
        if (std::filesystem::exists(path)) {
            std::ifstream in(path);
            TranscriptEntry existing = json::parse(in).get<TranscriptEntry>();
            if (existing.prompt_text != envelope.rendered_text) {
                throw Error(ErrorCode::DigestCollision,
                            "two distinct prompts share digest " + digest);
            }
            return response;  // same prompt replayed within the session
        }
        TranscriptEntry entry{digest, envelope.template_id, envelope.rendered_text, response};
        std::ofstream out(path);
        out << json(entry).dump(2) << "\n";
        return response;
    }

private:
    Backend& inner_;
    std::string dir_;
    size_t digest_chars_;
};

// Chat-completion HTTP backend. Request/response bodies use the common JSON
// chat shape: {"model", "messages":[{"role","content"}], "temperature": 0}.
// The API key is read from the named environment variable, never from config.
class HttpBackend : public Backend {
public:
    HttpBackend(std::string endpoint, std::string model, std::string api_key_env = "WEBQE_API_KEY",
                int context_limit = 32768)
        : endpoint_(std::move(endpoint)),
          model_(std::move(model)),
          api_key_env_(std::move(api_key_env)),
          context_limit_(context_limit) {}

    std::string id() const override { return "live:" + model_; }
    int context_limit_tokens() const override { return context_limit_; }

    std::string complete_text(const PromptEnvelope& envelope) override;

private:
    std::string endpoint_;
    std::string model_;
    std::string api_key_env_;
    int context_limit_;
};

// ---------------------------------------------------------------------------

// Dispatches one prompt. Guards the context budget before any network call,
// attempts structured parsing once, re-prompts once with the validation
// error appended, then gives up with parsed absent and schema_errors set.
inline LlmResponse complete(const PromptEnvelope& envelope, Backend& backend) {
    if (envelope.estimated_tokens > backend.context_limit_tokens()) {
        throw Error(ErrorCode::ContextOverflow,
                    strings::format("prompt of ~%d tokens exceeds limit %d", envelope.estimated_tokens,
                                    backend.context_limit_tokens()));
    }
    auto started = std::chrono::steady_clock::now();
    LlmResponse response;
    response.backend_id = backend.id();
    response.raw_text = backend.complete_text(envelope);

    if (!envelope.expected_schema.empty()) {
        auto try_parse = [&](const std::string& raw) -> std::vector<std::string> {
            auto parsed = extract_json(raw);
            if (!parsed) return {"no JSON object found in reply"};
            auto errors = validate_schema(envelope.expected_schema, *parsed);
            if (errors.empty()) response.parsed = std::move(*parsed);
            return errors;
        };
        auto errors = try_parse(response.raw_text);
        if (!errors.empty()) {
            PromptEnvelope repair = PromptEnvelope::make(
                envelope.template_id + "/repair",
                envelope.rendered_text + "\n\nThe previous reply failed validation: " +
                    strings::join(errors, "; ") + "\nReply again with corrected JSON only.",
                envelope.context_refs, envelope.expected_schema);
            if (repair.estimated_tokens <= backend.context_limit_tokens()) {
                response.raw_text = backend.complete_text(repair);
                errors = try_parse(response.raw_text);
            }
            if (!errors.empty()) response.schema_errors = errors;
        }
    }
    response.latency_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                              std::chrono::steady_clock::now() - started)
                              .count();
    if (backend.id() == "replay") response.latency_ms = 0;
    return response;
}

}  // namespace webqe::llm
