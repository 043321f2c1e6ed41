#pragma once

#include <algorithm>
#include <array>
#include <optional>
#include <string>
#include <vector>

#include "roadlaw/corpus.hpp"
#include "roadlaw/retrieval.hpp"
#include "roadlaw/util.hpp"

namespace roadlaw {

// ---------------------------------------------------------------------------
// Fact statement

enum class ElementKind {
    vehicle_role,
    road_type,
    key_behavior,
    collision_type,
    environment_detail,
};

inline const std::array<std::string, 5>& element_kind_names() {
    static const std::array<std::string, 5> names = {
        "vehicle_role", "road_type", "key_behavior", "collision_type",
        "environment_detail"};
    return names;
}

inline bool is_element_kind(std::string_view s) {
    const auto& names = element_kind_names();
    return std::find(names.begin(), names.end(), s) != names.end();
}

// Conflicts on these kinds are the "core facts" (travel direction, key
// maneuvers, liable party); a conflict entry forces every Tv-sourced element
// of the kind out of the statement.
inline const std::array<std::string, 3>& core_fact_kinds() {
    static const std::array<std::string, 3> kinds = {
        "vehicle_role", "key_behavior", "collision_type"};
    return kinds;
}

inline bool is_core_fact_kind(std::string_view s) {
    const auto& kinds = core_fact_kinds();
    return std::find(kinds.begin(), kinds.end(), s) != kinds.end();
}

struct FactElement {
    std::string kind;    // one of element_kind_names()
    std::string value;
    std::string source;  // "Ta" | "Tv" | "merged"
};

struct FactConflict {
    std::string element_kind;
    std::string ta_value;
    std::string tv_value;
    std::string resolution = "Ta-priority";  // the only policy
};

/// Unified case fact statement F: the provenance-tagged fusion of the human
/// annotation T_a and the video caption T_v, with T_a winning every conflict.
struct FactStatement {
    std::string case_id;
    std::string narrative;
    std::vector<FactElement> elements;
    std::vector<FactConflict> conflicts;
};

inline void to_json(Json& j, const FactElement& e) {
    j = Json{{"kind", e.kind}, {"value", e.value}, {"source", e.source}};
}

inline void from_json(const Json& j, FactElement& e) {
    j.at("kind").get_to(e.kind);
    j.at("value").get_to(e.value);
    j.at("source").get_to(e.source);
}

inline void to_json(Json& j, const FactConflict& c) {
    j = Json{{"element_kind", c.element_kind},
             {"ta_value", c.ta_value},
             {"tv_value", c.tv_value},
             {"resolution", c.resolution}};
}

inline void from_json(const Json& j, FactConflict& c) {
    j.at("element_kind").get_to(c.element_kind);
    c.ta_value = j.value("ta_value", "");
    c.tv_value = j.value("tv_value", "");
    c.resolution = j.value("resolution", "Ta-priority");
}

inline void to_json(Json& j, const FactStatement& f) {
    j = Json{{"case_id", f.case_id},
             {"narrative", f.narrative},
             {"elements", f.elements},
             {"conflicts", f.conflicts}};
}

inline void from_json(const Json& j, FactStatement& f) {
    f.case_id = j.value("case_id", "");
    j.at("narrative").get_to(f.narrative);
    f.elements = j.value("elements", std::vector<FactElement>{});
    f.conflicts = j.value("conflicts", std::vector<FactConflict>{});
}

// ---------------------------------------------------------------------------
// Legal summary (Judge Assistant output of the retrieval stage)

inline constexpr const char* kNoProvisionsMarker =
    "no relevant provisions retrieved";

struct SummaryEntry {
    std::string doc_id;
    double score = 0.0;
    std::string heading;   // statute: "law_name article"; precedent: title
    std::string excerpt;
};

inline void to_json(Json& j, const SummaryEntry& e) {
    j = Json{{"doc_id", e.doc_id},
             {"score", e.score},
             {"heading", e.heading},
             {"excerpt", e.excerpt}};
}

inline void from_json(const Json& j, SummaryEntry& e) {
    j.at("doc_id").get_to(e.doc_id);
    e.score = j.value("score", 0.0);
    e.heading = j.value("heading", "");
    e.excerpt = j.value("excerpt", "");
}

/// Structured digest of the re-ranked retrieval results handed to the judges.
struct LegalSummary {
    std::string query_fact_ref;  // case_id
    std::vector<SummaryEntry> statutes;
    std::vector<SummaryEntry> precedents;
    std::string inferred_category;
    std::string compiled_text;

    bool empty() const { return statutes.empty() && precedents.empty(); }

    std::vector<std::string> statute_ids() const {
        std::vector<std::string> ids;
        ids.reserve(statutes.size());
        for (const auto& s : statutes) {
            ids.push_back(s.doc_id);
        }
        return ids;
    }
};

inline void to_json(Json& j, const LegalSummary& s) {
    j = Json{{"query_fact_ref", s.query_fact_ref},
             {"statutes", s.statutes},
             {"precedents", s.precedents},
             {"inferred_category", s.inferred_category},
             {"compiled_text", s.compiled_text}};
}

inline void from_json(const Json& j, LegalSummary& s) {
    s.query_fact_ref = j.value("query_fact_ref", "");
    s.statutes = j.value("statutes", std::vector<SummaryEntry>{});
    s.precedents = j.value("precedents", std::vector<SummaryEntry>{});
    s.inferred_category = j.value("inferred_category", "");
    s.compiled_text = j.value("compiled_text", "");
}

/// Compiles re-ranked hits into the LegalSummary. The inferred accident
/// category is the dominant topic tag among the resolved statute hits
/// (lexicographically smallest on ties, "uncategorized" when there are no
/// hits). Deterministic for identical inputs.
inline LegalSummary assemble_legal_summary(
    const FactStatement& fact, const std::vector<RankedDoc>& statute_hits,
    const std::vector<RankedDoc>& precedent_hits, const LegalCorpus& corpus,
    int excerpt_chars = 200) {
    LegalSummary summary;
    summary.query_fact_ref = fact.case_id;

    std::map<std::string, int> tag_votes;
    for (const auto& hit : statute_hits) {
        const Statute* s = corpus.find_statute(hit.doc_id);
        if (s == nullptr) {
            throw LookupError("statute hit '" + hit.doc_id +
                              "' not found in corpus");
        }
        for (const auto& tag : s->tags) {
            ++tag_votes[tag];
        }
        summary.statutes.push_back(
            {hit.doc_id, hit.score, s->law_name + " " + s->article,
             utf8_prefix(s->text, static_cast<std::size_t>(excerpt_chars))});
    }
    for (const auto& hit : precedent_hits) {
        const Precedent* p = corpus.find_precedent(hit.doc_id);
        if (p == nullptr) {
            throw LookupError("precedent hit '" + hit.doc_id +
                              "' not found in corpus");
        }
        summary.precedents.push_back(
            {hit.doc_id, hit.score, p->title,
             utf8_prefix(p->fact_summary, static_cast<std::size_t>(excerpt_chars)) +
                 " Holding: " +
                 utf8_prefix(p->holding, static_cast<std::size_t>(excerpt_chars))});
    }

    summary.inferred_category = "uncategorized";
    int best_votes = 0;
    for (const auto& [tag, votes] : tag_votes) {  // map order breaks ties
        if (votes > best_votes) {
            best_votes = votes;
            summary.inferred_category = tag;
        }
    }

    std::string text = "Legal information summary for case " +
                       fact.case_id + "\n";
    text += "Inferred category: " + summary.inferred_category + "\n";
    if (summary.statutes.empty()) {
        text += "Provisions: " + std::string(kNoProvisionsMarker) + "\n";
    } else {
        text += "Provisions:\n";
        int rank = 1;
        for (const auto& e : summary.statutes) {
            text += "  " + std::to_string(rank++) + ". [" + e.doc_id + "] " +
                    e.heading + " - " + e.excerpt + "\n";
        }
    }
    if (summary.precedents.empty()) {
        text += "Precedents: none retrieved\n";
    } else {
        text += "Precedents:\n";
        int rank = 1;
        for (const auto& e : summary.precedents) {
            text += "  " + std::to_string(rank++) + ". [" + e.doc_id + "] " +
                    e.heading + " - " + e.excerpt + "\n";
        }
    }
    summary.compiled_text = std::move(text);
    return summary;
}

// ---------------------------------------------------------------------------
// Judge artifacts

struct PreliminaryJudgment {
    std::string liability_allocation;
    std::string predicted_mode;           // RM1..RM6
    std::vector<std::string> statute_ids; // free-form claims, validated later
    std::string reasoning;
};

inline void to_json(Json& j, const PreliminaryJudgment& p) {
    j = Json{{"liability_allocation", p.liability_allocation},
             {"predicted_mode", p.predicted_mode},
             {"statute_ids", p.statute_ids},
             {"reasoning", p.reasoning}};
}

inline void from_json(const Json& j, PreliminaryJudgment& p) {
    j.at("liability_allocation").get_to(p.liability_allocation);
    j.at("predicted_mode").get_to(p.predicted_mode);
    j.at("statute_ids").get_to(p.statute_ids);
    j.at("reasoning").get_to(p.reasoning);
}

struct RevisionSuggestions {
    std::vector<std::string> statute_additions;
    std::vector<std::string> statute_removals;
    std::optional<std::string> liability_revision;
    std::optional<std::string> mode_override;
    std::string rationale;
};

inline void to_json(Json& j, const RevisionSuggestions& r) {
    j = Json{{"statute_additions", r.statute_additions},
             {"statute_removals", r.statute_removals},
             {"rationale", r.rationale}};
    j["liability_revision"] =
        r.liability_revision ? Json(*r.liability_revision) : Json(nullptr);
    j["mode_override"] = r.mode_override ? Json(*r.mode_override) : Json(nullptr);
}

inline void from_json(const Json& j, RevisionSuggestions& r) {
    r.statute_additions = j.value("statute_additions", std::vector<std::string>{});
    r.statute_removals = j.value("statute_removals", std::vector<std::string>{});
    if (j.contains("liability_revision") && !j["liability_revision"].is_null()) {
        r.liability_revision = j["liability_revision"].get<std::string>();
    }
    if (j.contains("mode_override") && !j["mode_override"].is_null()) {
        r.mode_override = j["mode_override"].get<std::string>();
    }
    r.rationale = j.value("rationale", "");
}

struct ReportSections {
    std::string facts;
    std::string issues;
    std::string statute_analysis;
    std::string precedent_analysis;
    std::string liability_determination;
    std::string decision;
};

inline void to_json(Json& j, const ReportSections& r) {
    j = Json{{"facts", r.facts},
             {"issues", r.issues},
             {"statute_analysis", r.statute_analysis},
             {"precedent_analysis", r.precedent_analysis},
             {"liability_determination", r.liability_determination},
             {"decision", r.decision}};
}

inline void from_json(const Json& j, ReportSections& r) {
    j.at("facts").get_to(r.facts);
    j.at("issues").get_to(r.issues);
    j.at("statute_analysis").get_to(r.statute_analysis);
    j.at("precedent_analysis").get_to(r.precedent_analysis);
    j.at("liability_determination").get_to(r.liability_determination);
    j.at("decision").get_to(r.decision);
}

struct FinalJudgment {
    std::string final_mode;                     // RM1..RM6
    std::vector<std::string> final_statute_ids; // resolve against corpus
    ReportSections report;
    std::vector<std::string> trace_refs;
    std::vector<std::string> citations;         // "law_name article" per statute id
    bool used_fallback = false;
};

inline void to_json(Json& j, const FinalJudgment& f) {
    j = Json{{"final_mode", f.final_mode},
             {"final_statute_ids", f.final_statute_ids},
             {"report", f.report},
             {"trace_refs", f.trace_refs},
             {"citations", f.citations},
             {"used_fallback", f.used_fallback}};
}

inline void from_json(const Json& j, FinalJudgment& f) {
    j.at("final_mode").get_to(f.final_mode);
    j.at("final_statute_ids").get_to(f.final_statute_ids);
    j.at("report").get_to(f.report);
    f.trace_refs = j.value("trace_refs", std::vector<std::string>{});
    f.citations = j.value("citations", std::vector<std::string>{});
    f.used_fallback = j.value("used_fallback", false);
}

}  // namespace roadlaw
