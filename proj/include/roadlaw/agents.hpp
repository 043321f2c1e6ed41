#pragma once

#include <algorithm>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "roadlaw/artifacts.hpp"
#include "roadlaw/corpus.hpp"
#include "roadlaw/llm.hpp"
#include "roadlaw/mock.hpp"
#include "roadlaw/prompts.hpp"
#include "roadlaw/structured.hpp"
#include "roadlaw/util.hpp"

namespace roadlaw {

/// Raw deliberation output before structural finalization.
struct DeliberationDraft {
    std::string final_mode;
    std::vector<std::string> final_statute_ids;
    ReportSections report;
    std::string deviation_justification;
};

struct AgentOptions {
    int repair_budget = 2;     // re-prompts after a malformed reply
    int backend_attempts = 2;  // total tries per call on BackendError
    int max_output_tokens = 1024;
};

namespace detail {

inline std::vector<std::string> dedup_preserve_order(
    const std::vector<std::string>& ids) {
    std::vector<std::string> out;
    for (const auto& id : ids) {
        if (std::find(out.begin(), out.end(), id) == out.end()) {
            out.push_back(id);
        }
    }
    return out;
}

inline bool contains_id(const std::vector<std::string>& ids,
                        const std::string& id) {
    return std::find(ids.begin(), ids.end(), id) != ids.end();
}

inline std::string format_elements(const std::vector<FactElement>& elements) {
    std::vector<std::string> parts;
    parts.reserve(elements.size());
    for (const auto& e : elements) {
        parts.push_back(e.kind + "=" + flatten_line(e.value) + " (" + e.source +
                        ")");
    }
    return parts.empty() ? "none" : join(parts, "; ");
}

inline std::string format_ids(const std::vector<std::string>& ids) {
    return ids.empty() ? "none" : join(ids, ", ");
}

}  // namespace detail

/// Applies the human-account-wins policy after fact aggregation:
///  - an empty video description leaves only Ta-sourced elements and no
///    conflicts (there is nothing to merge or dispute);
///  - every conflict resolves as "Ta-priority";
///  - a conflict on a core fact kind (vehicle_role, key_behavior,
///    collision_type) evicts all Tv-sourced elements of that kind.
inline void enforce_fact_policy(FactStatement& fact,
                                const std::string& video_description) {
    if (video_description.empty()) {
        std::erase_if(fact.elements,
                      [](const FactElement& e) { return e.source != "Ta"; });
        fact.conflicts.clear();
        return;
    }
    for (auto& conflict : fact.conflicts) {
        conflict.resolution = "Ta-priority";
    }
    for (const auto& conflict : fact.conflicts) {
        if (!is_core_fact_kind(conflict.element_kind)) {
            continue;
        }
        std::erase_if(fact.elements, [&conflict](const FactElement& e) {
            return e.source == "Tv" && e.kind == conflict.element_kind;
        });
    }
}

/// Applies the audit rules to the second judge's suggestions:
///  - additions must name statutes present in the retrieval summary and not
///    already cited;
///  - removals must name cited statutes, and every cited id that does not
///    resolve to a statute in the corpus is removed regardless of the agent;
///  - an id proposed for both addition and removal is dropped from both.
inline void enforce_revision_policy(RevisionSuggestions& revisions,
                                    const PreliminaryJudgment& prelim,
                                    const LegalSummary& summary,
                                    const LegalCorpus& corpus) {
    const std::vector<std::string> pool = summary.statute_ids();
    std::vector<std::string> additions;
    for (const auto& id :
         detail::dedup_preserve_order(revisions.statute_additions)) {
        if (detail::contains_id(pool, id) &&
            !detail::contains_id(prelim.statute_ids, id)) {
            additions.push_back(id);
        }
    }
    std::vector<std::string> removals;
    for (const auto& id :
         detail::dedup_preserve_order(revisions.statute_removals)) {
        if (detail::contains_id(prelim.statute_ids, id)) {
            removals.push_back(id);
        }
    }
    for (const auto& id : prelim.statute_ids) {
        if (corpus.find_statute(id) == nullptr &&
            !detail::contains_id(removals, id)) {
            removals.push_back(id);
        }
    }
    // An id proposed for both addition and removal is contradictory advice;
    // neither action is taken, whatever each proposal's own validity.
    std::erase_if(additions, [&revisions](const std::string& id) {
        return detail::contains_id(revisions.statute_removals, id);
    });
    std::erase_if(removals, [&revisions](const std::string& id) {
        return detail::contains_id(revisions.statute_additions, id) &&
               detail::contains_id(revisions.statute_removals, id);
    });
    revisions.statute_additions = std::move(additions);
    revisions.statute_removals = std::move(removals);
}

/// Statute set the panel carries into deliberation: cited ids minus
/// removals, then additions, first occurrence wins.
inline std::vector<std::string> reviewed_statute_ids(
    const PreliminaryJudgment& prelim, const RevisionSuggestions& revisions) {
    std::vector<std::string> base;
    for (const auto& id : detail::dedup_preserve_order(prelim.statute_ids)) {
        if (!detail::contains_id(revisions.statute_removals, id)) {
            base.push_back(id);
        }
    }
    for (const auto& id : revisions.statute_additions) {
        if (!detail::contains_id(base, id)) {
            base.push_back(id);
        }
    }
    return base;
}

/// Converts a deliberation draft into the final judgment:
///  - the draft may rule a mode other than `effective_mode` only with a
///    non-empty deviation justification;
///  - statute ids are confined to the reviewed set (an empty draft list
///    keeps the whole set, a non-empty list selects within it) and must
///    resolve in the corpus;
///  - an empty surviving set falls back to the taxonomy's full set for the
///    final mode, flagged in the decision section;
///  - citations carry "law_name article" per final statute id.
inline FinalJudgment finalize_judgment(const DeliberationDraft& draft,
                                       const PreliminaryJudgment& prelim,
                                       const RevisionSuggestions& revisions,
                                       const std::string& effective_mode,
                                       const LegalCorpus& corpus,
                                       const ModeStatuteMap& mode_map) {
    FinalJudgment out;
    out.final_mode = effective_mode;
    if (draft.final_mode != effective_mode &&
        !draft.deviation_justification.empty()) {
        out.final_mode = draft.final_mode;
    }

    const std::vector<std::string> base = reviewed_statute_ids(prelim, revisions);
    std::vector<std::string> candidate;
    for (const auto& id : base) {
        const bool selected =
            draft.final_statute_ids.empty() ||
            detail::contains_id(draft.final_statute_ids, id);
        if (selected && corpus.find_statute(id) != nullptr) {
            candidate.push_back(id);
        }
    }

    out.report = draft.report;
    out.used_fallback = candidate.empty();
    if (out.used_fallback) {
        candidate = statutes_for_mode(mode_map, out.final_mode).full;
        out.report.decision +=
            "\nNote: no cited provision survived review; the standard "
            "provision set for mode " +
            out.final_mode + " is applied.";
    }
    out.final_statute_ids = candidate;
    for (const auto& id : out.final_statute_ids) {
        const Statute* s = corpus.find_statute(id);
        if (s == nullptr) {
            throw LookupError("final statute id '" + id +
                              "' not found in corpus");
        }
        out.citations.push_back(s->law_name + " " + s->article);
    }
    return out;
}

/// The agent layer: builds role prompts and user messages, runs the
/// structured-output repair loop, and applies the structural policies that
/// hold regardless of what the model returns.
class AgentSuite {
public:
    AgentSuite(LlmBackend& backend, RolePrompts prompts,
               AgentOptions options = {})
        : backend_(backend),
          prompts_(std::move(prompts)),
          options_(options) {
        if (options_.repair_budget < 0) {
            throw ValidationError("repair_budget must be non-negative");
        }
    }

    FactStatement aggregate_facts(const std::string& case_id,
                                  const std::string& accident_text,
                                  const std::string& video_description) {
        const std::string message =
            "CASE_ID: " + case_id +
            "\nACCIDENT_TEXT: " + flatten_line(accident_text) +
            "\nVIDEO_DESCRIPTION: " + flatten_line(video_description);
        const Json j = request_structured(Role::fact_aggregation,
                                          SchemaKind::fact_statement, message);
        FactStatement fact = j.get<FactStatement>();
        fact.case_id = case_id;
        enforce_fact_policy(fact, video_description);
        return fact;
    }

    /// Plain-text briefing from the assistant role; no schema applies.
    std::string assist_digest(const FactStatement& fact,
                              const LegalSummary& summary) {
        const std::string message =
            "CASE_ID: " + fact.case_id +
            "\nFACT_STATEMENT: " + flatten_line(fact.narrative) +
            "\n\n" + summary.compiled_text;
        return complete_with_retries(
            backend_,
            {prompts_.prompt(Role::judge_assistant), message,
             options_.max_output_tokens, 0.0},
            options_.backend_attempts);
    }

    PreliminaryJudgment issue_judge(const FactStatement& fact) {
        const std::string message =
            "CASE_ID: " + fact.case_id +
            "\nFACT_STATEMENT: " + flatten_line(fact.narrative) +
            "\nELEMENTS: " + detail::format_elements(fact.elements);
        const Json j = request_structured(
            Role::issue_judge, SchemaKind::preliminary_judgment, message);
        return j.get<PreliminaryJudgment>();
    }

    RevisionSuggestions law_precedent_judge(const FactStatement& fact,
                                            const PreliminaryJudgment& prelim,
                                            const LegalSummary& summary,
                                            const std::string& digest,
                                            const LegalCorpus& corpus) {
        const std::string message =
            "CASE_ID: " + fact.case_id +
            "\nFACT_STATEMENT: " + flatten_line(fact.narrative) +
            "\nPRELIMINARY_MODE: " + prelim.predicted_mode +
            "\nLIABILITY_ALLOCATION: " + flatten_line(prelim.liability_allocation) +
            "\nPRELIMINARY_STATUTES: " + detail::format_ids(prelim.statute_ids) +
            "\nBRIEFING: " + flatten_line(digest) +
            "\n\n" + summary.compiled_text;
        const Json j = request_structured(Role::law_precedent_judge,
                                          SchemaKind::revision_suggestions,
                                          message);
        RevisionSuggestions revisions = j.get<RevisionSuggestions>();
        enforce_revision_policy(revisions, prelim, summary, corpus);
        return revisions;
    }

    DeliberationDraft deliberate(const FactStatement& fact,
                                 const PreliminaryJudgment& prelim,
                                 const RevisionSuggestions& revisions,
                                 const LegalSummary& summary,
                                 const std::string& effective_mode) {
        const std::string liability =
            revisions.liability_revision.value_or(prelim.liability_allocation);
        const std::string message =
            "CASE_ID: " + fact.case_id +
            "\nFACT_STATEMENT: " + flatten_line(fact.narrative) +
            "\nEFFECTIVE_MODE: " + effective_mode +
            "\nLIABILITY_ALLOCATION: " + flatten_line(liability) +
            "\nPRELIMINARY_STATUTES: " +
            detail::format_ids(reviewed_statute_ids(prelim, revisions)) +
            "\nREVISION_RATIONALE: " + flatten_line(revisions.rationale) +
            "\n\n" + summary.compiled_text;
        const Json j = request_structured(Role::deliberation_judge,
                                          SchemaKind::final_deliberation,
                                          message);
        DeliberationDraft draft;
        j.at("final_mode").get_to(draft.final_mode);
        j.at("final_statute_ids").get_to(draft.final_statute_ids);
        draft.report = j.at("report").get<ReportSections>();
        j.at("deviation_justification").get_to(draft.deviation_justification);
        return draft;
    }

    /// Multiple-choice accident-responsibility answer: index into `options`.
    int select_ara(const FactStatement& fact,
                   const std::vector<std::string>& options) {
        if (options.empty()) {
            throw ValidationError("ara options must not be empty");
        }
        std::string message = "CASE_ID: " + fact.case_id +
                              "\nFACT_STATEMENT: " + flatten_line(fact.narrative);
        for (std::size_t i = 0; i < options.size(); ++i) {
            message += "\nOPTION " + std::to_string(i) + ": " +
                       flatten_line(options[i]);
        }
        const auto in_range = [&options](const Json& j) -> std::string {
            const auto idx = j["selected_index"].get<long long>();
            if (idx >= static_cast<long long>(options.size())) {
                return "selected_index must be below " +
                       std::to_string(options.size());
            }
            return "";
        };
        const Json j = request_structured(Role::ara_selector,
                                          SchemaKind::ara_selection, message,
                                          in_range);
        return j["selected_index"].get<int>();
    }

private:
    /// One structured call with up to repair_budget re-prompts. A repair
    /// prompt names the violation, restates the schema, and repeats the
    /// original request. BackendError passes through untouched.
    Json request_structured(
        Role role, SchemaKind kind, const std::string& user_message,
        const std::function<std::string(const Json&)>& extra_check = {}) {
        std::string last_error;
        std::string last_raw;
        for (int attempt = 0; attempt <= options_.repair_budget; ++attempt) {
            std::string message = user_message;
            if (attempt > 0) {
                message = "Your previous response could not be used: " +
                          last_error +
                          "\nRespond with exactly one JSON object matching "
                          "this schema:\n" +
                          schema_description(kind) +
                          "\nOriginal request follows.\n\n" + user_message;
            }
            const std::string raw = complete_with_retries(
                backend_,
                {prompts_.prompt(role), message, options_.max_output_tokens,
                 0.0},
                options_.backend_attempts);
            try {
                Json parsed = parse_structured(kind, raw);
                if (extra_check) {
                    const std::string violation = extra_check(parsed);
                    if (!violation.empty()) {
                        throw StructuredOutputError(violation, raw);
                    }
                }
                return parsed;
            } catch (const StructuredOutputError& e) {
                last_error = e.what();
                last_raw = e.raw_output;
            }
        }
        throw StructuredOutputError(
            role_name(role) + " produced no usable output after " +
                std::to_string(options_.repair_budget + 1) +
                " attempts; last problem: " + last_error,
            last_raw);
    }

    LlmBackend& backend_;
    RolePrompts prompts_;
    AgentOptions options_;
};

}  // namespace roadlaw
