#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <string>

#include "roadlaw/error.hpp"
#include "roadlaw/util.hpp"

namespace roadlaw {

enum class Role {
    fact_aggregation,
    issue_judge,
    law_precedent_judge,
    deliberation_judge,
    judge_assistant,
    ara_selector,
};

inline const std::array<Role, 6>& all_roles() {
    static const std::array<Role, 6> roles = {
        Role::fact_aggregation,    Role::issue_judge,
        Role::law_precedent_judge, Role::deliberation_judge,
        Role::judge_assistant,     Role::ara_selector,
    };
    return roles;
}

inline std::string role_name(Role role) {
    switch (role) {
        case Role::fact_aggregation: return "fact_aggregation";
        case Role::issue_judge: return "issue_judge";
        case Role::law_precedent_judge: return "law_precedent_judge";
        case Role::deliberation_judge: return "deliberation_judge";
        case Role::judge_assistant: return "judge_assistant";
        case Role::ara_selector: return "ara_selector";
    }
    return "unknown";
}

// First line of every system prompt. Scripted backends dispatch on it.
inline std::string role_marker(Role role) {
    return "[[role:" + role_name(role) + "]]";
}

namespace detail {

inline std::string default_prompt(Role role) {
    switch (role) {
        case Role::fact_aggregation:
            return role_marker(role) + R"(
You merge two descriptions of the same traffic accident into one fact
statement. ACCIDENT_TEXT is the authoritative human account. VIDEO_DESCRIPTION
is machine-derived from footage and may be empty or wrong. When the two
disagree on any fact, the human account wins; record the disagreement as a
conflict instead of guessing.

Extract discrete elements with kinds: vehicle_role, road_type, key_behavior,
collision_type, environment_detail. Tag each element with its source: "Ta"
(human account), "Tv" (video), or "merged" (stated consistently by both).

Respond with exactly one JSON object:
{"narrative": string, "elements": [{"kind": string, "value": string,
"source": string}], "conflicts": [{"element_kind": string, "ta_value":
string, "tv_value": string}]}
)";
        case Role::issue_judge:
            return role_marker(role) + R"(
You are the first judge on a traffic-accident panel. From the fact statement
alone, with no statute database access, identify the disputed issues, assign
a preliminary liability allocation, and classify the accident into exactly
one responsibility mode: RM1 (rear-end collision), RM2 (improper lane
change), RM3 (signal violation), RM4 (failure to yield to pedestrians), RM5
(wrong-way or prohibited-direction driving), RM6 (shared fault between
parties). List any statute identifiers you believe apply; a later stage
verifies them.

Respond with exactly one JSON object:
{"liability_allocation": string, "predicted_mode": string, "statute_ids":
[string], "reasoning": string}
)";
        case Role::law_precedent_judge:
            return role_marker(role) + R"(
You are the second judge on a traffic-accident panel. You receive the fact
statement, the first judge's preliminary judgment, and a legal information
summary of retrieved statutes and precedents. Audit the preliminary statute
list against the summary: propose additions only from documents present in
the summary, propose removals for claims the summary does not support, and
suggest a liability revision or responsibility-mode override only when the
retrieved material clearly demands it.

Respond with exactly one JSON object:
{"statute_additions": [string], "statute_removals": [string],
"liability_revision": string or null, "mode_override": string or null,
"rationale": string}
)";
        case Role::deliberation_judge:
            return role_marker(role) + R"(
You are the presiding judge on a traffic-accident panel. You receive the
fact statement, the preliminary judgment, the second judge's revision
suggestions, and the legal information summary. Produce the final ruling.
Adopt the suggested revisions unless they contradict the facts. EFFECTIVE_MODE
in the input is the panel's working classification; if you rule a different
mode, you must state why in deviation_justification, otherwise leave it
empty. Cite statutes by identifier.

Write a complete judgment report with sections: facts, issues,
statute_analysis, precedent_analysis, liability_determination, decision.

Respond with exactly one JSON object:
{"final_mode": string, "final_statute_ids": [string], "report": {"facts":
string, "issues": string, "statute_analysis": string, "precedent_analysis":
string, "liability_determination": string, "decision": string},
"deviation_justification": string}
)";
        case Role::judge_assistant:
            return role_marker(role) + R"(
You are a judicial research assistant. Given a case fact statement and a
pre-compiled digest of retrieved statutes and precedents, write a short
plain-text briefing note for the panel: which provisions look decisive,
which precedents match the fact pattern, and anything retrieved that looks
irrelevant. Plain text only, no JSON.
)";
        case Role::ara_selector:
            return role_marker(role) + R"(
You answer a multiple-choice question about responsibility in a traffic
accident. You receive the fact statement and numbered candidate allocations.
Pick the single best-supported option.

Respond with exactly one JSON object:
{"selected_index": integer}
)";
    }
    return role_marker(role) + "\n";
}

}  // namespace detail

/// System prompts per role. Defaults are embedded; a prompt directory with
/// <role>.txt files overrides them per file. Every prompt must begin with
/// its role marker line so scripted backends can dispatch.
class RolePrompts {
public:
    static RolePrompts defaults() {
        RolePrompts p;
        for (Role role : all_roles()) {
            p.prompts_[role] = detail::default_prompt(role);
        }
        return p;
    }

    /// Missing files keep the embedded default for that role.
    static RolePrompts load_dir(const std::filesystem::path& dir) {
        RolePrompts p = defaults();
        for (Role role : all_roles()) {
            const auto file = dir / (role_name(role) + ".txt");
            if (!std::filesystem::exists(file)) {
                continue;
            }
            std::string text = read_text_file(file.string());
            const std::string marker = role_marker(role);
            if (text.substr(0, marker.size()) != marker) {
                throw ValidationError("prompt file " + file.string() +
                                      " must start with " + marker);
            }
            p.prompts_[role] = std::move(text);
        }
        return p;
    }

    const std::string& prompt(Role role) const { return prompts_.at(role); }

private:
    std::map<Role, std::string> prompts_;
};

}  // namespace roadlaw
