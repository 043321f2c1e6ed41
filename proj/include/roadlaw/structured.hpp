#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "roadlaw/artifacts.hpp"
#include "roadlaw/corpus.hpp"
#include "roadlaw/error.hpp"
#include "roadlaw/util.hpp"

namespace roadlaw {

enum class SchemaKind {
    fact_statement,
    preliminary_judgment,
    revision_suggestions,
    final_deliberation,
    ara_selection,
};

/// Human-readable schema sketch, echoed back to the model on repair prompts.
inline std::string schema_description(SchemaKind kind) {
    switch (kind) {
        case SchemaKind::fact_statement:
            return R"({"narrative": string, "elements": [{"kind": "vehicle_role|road_type|key_behavior|collision_type|environment_detail", "value": string, "source": "Ta|Tv|merged"}], "conflicts": [{"element_kind": string, "ta_value": string, "tv_value": string}]})";
        case SchemaKind::preliminary_judgment:
            return R"({"liability_allocation": string, "predicted_mode": "RM1..RM6", "statute_ids": [string], "reasoning": string})";
        case SchemaKind::revision_suggestions:
            return R"({"statute_additions": [string], "statute_removals": [string], "liability_revision": string|null, "mode_override": "RM1..RM6"|null, "rationale": string})";
        case SchemaKind::final_deliberation:
            return R"({"final_mode": "RM1..RM6", "final_statute_ids": [string], "report": {"facts": string, "issues": string, "statute_analysis": string, "precedent_analysis": string, "liability_determination": string, "decision": string}, "deviation_justification": string})";
        case SchemaKind::ara_selection:
            return R"({"selected_index": integer})";
    }
    return "{}";
}

namespace detail {

// Scans for the matching close brace of the object starting at `open`,
// honouring string literals and escapes. Returns one past the close brace,
// or npos when the object never closes.
inline std::size_t find_object_end(std::string_view text, std::size_t open) {
    int depth = 0;
    bool in_string = false;
    bool escaped = false;
    for (std::size_t i = open; i < text.size(); ++i) {
        const char c = text[i];
        if (in_string) {
            if (escaped) {
                escaped = false;
            } else if (c == '\\') {
                escaped = true;
            } else if (c == '"') {
                in_string = false;
            }
            continue;
        }
        if (c == '"') {
            in_string = true;
        } else if (c == '{') {
            ++depth;
        } else if (c == '}') {
            if (--depth == 0) {
                return i + 1;
            }
        }
    }
    return std::string_view::npos;
}

inline bool is_string_array(const Json& j) {
    if (!j.is_array()) {
        return false;
    }
    for (const auto& item : j) {
        if (!item.is_string()) {
            return false;
        }
    }
    return true;
}

}  // namespace detail

/// Returns the first balanced, parseable JSON object embedded in `text`,
/// or nullopt when none exists. Surrounding prose is ignored.
inline std::optional<Json> extract_first_json_object(std::string_view text) {
    std::size_t pos = 0;
    while ((pos = text.find('{', pos)) != std::string_view::npos) {
        const std::size_t end = detail::find_object_end(text, pos);
        if (end != std::string_view::npos) {
            const Json parsed = Json::parse(text.substr(pos, end - pos),
                                            nullptr,
                                            /*allow_exceptions=*/false);
            if (!parsed.is_discarded() && parsed.is_object()) {
                return parsed;
            }
        }
        // An unclosed opener can still contain a later, well-formed object.
        ++pos;
    }
    return std::nullopt;
}

/// Returns an empty string when `j` conforms to the schema, otherwise a
/// one-line description of the first violation found.
inline std::string schema_violation(SchemaKind kind, const Json& j) {
    if (!j.is_object()) {
        return "output is not a JSON object";
    }
    auto need_string = [&j](const char* field) -> std::string {
        if (!j.contains(field) || !j[field].is_string()) {
            return std::string("missing string field '") + field + "'";
        }
        return "";
    };
    switch (kind) {
        case SchemaKind::fact_statement: {
            if (auto v = need_string("narrative"); !v.empty()) return v;
            if (!j.contains("elements") || !j["elements"].is_array()) {
                return "missing array field 'elements'";
            }
            for (const auto& e : j["elements"]) {
                if (!e.is_object() || !e.contains("kind") ||
                    !e["kind"].is_string() || !e.contains("value") ||
                    !e["value"].is_string() || !e.contains("source") ||
                    !e["source"].is_string()) {
                    return "element entries need string kind/value/source";
                }
                if (!is_element_kind(e["kind"].get<std::string>())) {
                    return "unknown element kind '" +
                           e["kind"].get<std::string>() + "'";
                }
                const std::string src = e["source"].get<std::string>();
                if (src != "Ta" && src != "Tv" && src != "merged") {
                    return "element source must be Ta, Tv, or merged";
                }
            }
            if (!j.contains("conflicts") || !j["conflicts"].is_array()) {
                return "missing array field 'conflicts'";
            }
            for (const auto& c : j["conflicts"]) {
                if (!c.is_object() || !c.contains("element_kind") ||
                    !c["element_kind"].is_string()) {
                    return "conflict entries need a string element_kind";
                }
                if (!is_element_kind(c["element_kind"].get<std::string>())) {
                    return "unknown conflict element_kind '" +
                           c["element_kind"].get<std::string>() + "'";
                }
            }
            return "";
        }
        case SchemaKind::preliminary_judgment: {
            if (auto v = need_string("liability_allocation"); !v.empty()) return v;
            if (auto v = need_string("predicted_mode"); !v.empty()) return v;
            if (!is_mode_label(j["predicted_mode"].get<std::string>())) {
                return "predicted_mode must be one of RM1..RM6";
            }
            if (!j.contains("statute_ids") ||
                !detail::is_string_array(j["statute_ids"])) {
                return "statute_ids must be an array of strings";
            }
            if (auto v = need_string("reasoning"); !v.empty()) return v;
            return "";
        }
        case SchemaKind::revision_suggestions: {
            for (const char* field : {"statute_additions", "statute_removals"}) {
                if (!j.contains(field) || !detail::is_string_array(j[field])) {
                    return std::string(field) + " must be an array of strings";
                }
            }
            for (const char* field : {"liability_revision", "mode_override"}) {
                if (j.contains(field) && !j[field].is_null() &&
                    !j[field].is_string()) {
                    return std::string(field) + " must be a string or null";
                }
            }
            if (j.contains("mode_override") && j["mode_override"].is_string() &&
                !is_mode_label(j["mode_override"].get<std::string>())) {
                return "mode_override must be one of RM1..RM6";
            }
            if (auto v = need_string("rationale"); !v.empty()) return v;
            return "";
        }
        case SchemaKind::final_deliberation: {
            if (auto v = need_string("final_mode"); !v.empty()) return v;
            if (!is_mode_label(j["final_mode"].get<std::string>())) {
                return "final_mode must be one of RM1..RM6";
            }
            if (!j.contains("final_statute_ids") ||
                !detail::is_string_array(j["final_statute_ids"])) {
                return "final_statute_ids must be an array of strings";
            }
            if (!j.contains("report") || !j["report"].is_object()) {
                return "missing object field 'report'";
            }
            const Json& r = j["report"];
            for (const char* sec :
                 {"facts", "issues", "statute_analysis", "precedent_analysis",
                  "liability_determination", "decision"}) {
                if (!r.contains(sec) || !r[sec].is_string()) {
                    return std::string("report needs string section '") + sec +
                           "'";
                }
            }
            if (auto v = need_string("deviation_justification"); !v.empty()) {
                return v;
            }
            return "";
        }
        case SchemaKind::ara_selection: {
            if (!j.contains("selected_index") ||
                !j["selected_index"].is_number_integer()) {
                return "missing integer field 'selected_index'";
            }
            if (j["selected_index"].get<long long>() < 0) {
                return "selected_index must be non-negative";
            }
            return "";
        }
    }
    return "unknown schema";
}

/// Extracts and validates the first schema-conformant JSON object in `raw`.
/// Throws StructuredOutputError (carrying `raw`) when extraction or
/// validation fails; the caller owns the repair loop.
inline Json parse_structured(SchemaKind kind, const std::string& raw) {
    const auto extracted = extract_first_json_object(raw);
    if (!extracted) {
        throw StructuredOutputError("no JSON object found in model output", raw);
    }
    const std::string violation = schema_violation(kind, *extracted);
    if (!violation.empty()) {
        throw StructuredOutputError(violation, raw);
    }
    return *extracted;
}

}  // namespace roadlaw
