#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "roadlaw/embedding.hpp"
#include "roadlaw/error.hpp"
#include "roadlaw/llm.hpp"
#include "roadlaw/prompts.hpp"
#include "roadlaw/tokenize.hpp"
#include "roadlaw/util.hpp"

namespace roadlaw {

/// Deterministic bag-of-tokens embedder: each token is FNV-1a hashed into
/// one of `dimension` buckets, counts are L2-normalized. No external calls.
class HashEmbedder : public EmbeddingBackend {
public:
    explicit HashEmbedder(int dimension = 64) : dimension_(dimension) {
        if (dimension < 1) {
            throw ValidationError("embedding dimension must be positive");
        }
    }

    std::size_t dimension() const override {
        return static_cast<std::size_t>(dimension_);
    }

    std::vector<double> embed(const std::string& text) override {
        std::vector<double> vec(static_cast<std::size_t>(dimension_), 0.0);
        for (const auto& token : tokenize(text)) {
            const std::uint64_t h = fnv1a64(token);
            vec[static_cast<std::size_t>(
                h % static_cast<std::uint64_t>(dimension_))] += 1.0;
        }
        double norm_sq = 0.0;
        for (double v : vec) {
            norm_sq += v * v;
        }
        if (norm_sq > 0.0) {
            const double inv = 1.0 / std::sqrt(norm_sq);
            for (double& v : vec) {
                v *= inv;
            }
        }
        return vec;  // all-zero for empty or token-free text
    }

private:
    int dimension_;
};

// ---------------------------------------------------------------------------
// Scripted chat backend

struct MockScriptEntry {
    std::string role;      // role_name() of the target agent
    std::string match;     // substring of the user message; "" matches all
    std::string response;  // template, may use the placeholders below
};

inline void to_json(Json& j, const MockScriptEntry& e) {
    j = Json{{"role", e.role}, {"match", e.match}, {"response", e.response}};
}

inline void from_json(const Json& j, MockScriptEntry& e) {
    j.at("role").get_to(e.role);
    e.match = j.value("match", "");
    j.at("response").get_to(e.response);
}

/// Ordered response script: the first entry whose role matches the prompt
/// marker and whose `match` occurs in the user message wins. Roles without
/// a matching entry fall back to a built-in schema-valid template.
struct MockScript {
    std::vector<MockScriptEntry> entries;

    void validate() const {
        for (const auto& e : entries) {
            bool known = false;
            for (Role role : all_roles()) {
                known = known || role_name(role) == e.role;
            }
            if (!known) {
                throw ValidationError("mock script entry has unknown role '" +
                                      e.role + "'");
            }
        }
    }

    static MockScript load(const std::string& path) {
        const Json j = Json::parse(read_text_file(path), nullptr,
                                   /*allow_exceptions=*/false);
        if (j.is_discarded() || !j.is_object() || !j.contains("entries") ||
            !j["entries"].is_array()) {
            throw ValidationError("mock script " + path +
                                  " must be {\"entries\": [...]}");
        }
        MockScript script;
        script.entries = j["entries"].get<std::vector<MockScriptEntry>>();
        script.validate();
        return script;
    }
};

namespace detail {

// Escapes for embedding inside a JSON string literal. Harmless in the one
// plain-text role since briefing values rarely carry quotes.
inline std::string json_escape_fragment(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            case '\t': out += "\\t"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof(buf), "\\u%04x",
                                  static_cast<unsigned>(c));
                    out += buf;
                } else {
                    out += c;
                }
        }
    }
    return out;
}

// Returns the value of the first "NAME: value" line in the message.
inline std::string field_from_message(std::string_view message,
                                      std::string_view name) {
    const std::string prefix = std::string(name) + ": ";
    std::size_t pos = 0;
    while (pos <= message.size()) {
        std::size_t eol = message.find('\n', pos);
        if (eol == std::string_view::npos) {
            eol = message.size();
        }
        const auto line = message.substr(pos, eol - pos);
        if (line.substr(0, prefix.size()) == prefix) {
            return std::string(line.substr(prefix.size()));
        }
        pos = eol + 1;
    }
    return "";
}

inline std::string fill_template(std::string_view tpl,
                                 const std::string& user_message) {
    std::string out;
    out.reserve(tpl.size());
    std::size_t pos = 0;
    while (pos < tpl.size()) {
        const std::size_t open = tpl.find("{{", pos);
        if (open == std::string_view::npos) {
            out.append(tpl.substr(pos));
            break;
        }
        out.append(tpl.substr(pos, open - pos));
        const std::size_t close = tpl.find("}}", open);
        if (close == std::string_view::npos) {
            out.append(tpl.substr(open));
            break;
        }
        const auto inner = tpl.substr(open + 2, close - open - 2);
        if (inner == "user_snippet") {
            out += json_escape_fragment(
                utf8_prefix(flatten_line(user_message), 120));
        } else if (inner.substr(0, 6) == "field:") {
            out += json_escape_fragment(
                field_from_message(user_message, inner.substr(6)));
        } else {
            out.append(tpl.substr(open, close + 2 - open));  // not a placeholder
        }
        pos = close + 2;
    }
    return out;
}

inline std::string default_mock_response(Role role) {
    switch (role) {
        case Role::fact_aggregation:
            return R"({"narrative": "{{field:ACCIDENT_TEXT}}", "elements": [], "conflicts": []})";
        case Role::issue_judge:
            return R"({"liability_allocation": "Party A bears full responsibility.", "predicted_mode": "RM1", "statute_ids": ["unverified-general-duty"], "reasoning": "Template classification from: {{user_snippet}}"})";
        case Role::law_precedent_judge:
            return R"({"statute_additions": [], "statute_removals": [], "liability_revision": null, "mode_override": null, "rationale": "No changes proposed."})";
        case Role::deliberation_judge:
            return R"({"final_mode": "{{field:EFFECTIVE_MODE}}", "final_statute_ids": [], "report": {"facts": "{{field:FACT_STATEMENT}}", "issues": "Disputed: allocation of responsibility between the parties.", "statute_analysis": "Provisions considered: {{field:PRELIMINARY_STATUTES}}.", "precedent_analysis": "No controlling precedent distinguishes this case.", "liability_determination": "{{field:LIABILITY_ALLOCATION}}", "decision": "Responsibility mode {{field:EFFECTIVE_MODE}} is entered."}, "deviation_justification": ""})";
        case Role::judge_assistant:
            return "Briefing note. Reviewed material: {{user_snippet}}";
        case Role::ara_selector:
            return R"({"selected_index": 0})";
    }
    return "{}";
}

}  // namespace detail

inline constexpr const char* kMockErrorDirective = "[[backend_error";

/// Offline LlmBackend driven by a MockScript. Dispatches on the role marker
/// in the system prompt's first line; a response equal to
/// "[[backend_error:reason]]" raises BackendError instead of returning.
class MockLlmBackend : public LlmBackend {
public:
    MockLlmBackend() = default;
    explicit MockLlmBackend(MockScript script) : script_(std::move(script)) {
        script_.validate();
    }

    std::string complete(const ChatExchange& exchange) override {
        const Role role = role_from_prompt(exchange.system_prompt);
        const std::string name = role_name(role);
        for (const auto& entry : script_.entries) {
            if (entry.role != name) {
                continue;
            }
            if (!entry.match.empty() &&
                exchange.user_message.find(entry.match) == std::string::npos) {
                continue;
            }
            return render(entry.response, exchange.user_message);
        }
        return render(detail::default_mock_response(role),
                      exchange.user_message);
    }

private:
    static Role role_from_prompt(const std::string& system_prompt) {
        for (Role role : all_roles()) {
            const std::string marker = role_marker(role);
            if (system_prompt.substr(0, marker.size()) == marker) {
                return role;
            }
        }
        throw BackendError(
            "system prompt does not begin with a known role marker");
    }

    static std::string render(const std::string& tpl,
                              const std::string& user_message) {
        const std::string filled = detail::fill_template(tpl, user_message);
        if (filled.rfind(kMockErrorDirective, 0) == 0) {
            throw BackendError("scripted failure: " + filled);
        }
        return filled;
    }

    MockScript script_;
};

}  // namespace roadlaw
