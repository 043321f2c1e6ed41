#pragma once

#include <array>
#include <chrono>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "roadlaw/agents.hpp"
#include "roadlaw/artifacts.hpp"
#include "roadlaw/corpus.hpp"
#include "roadlaw/embedding.hpp"
#include "roadlaw/retrieval.hpp"
#include "roadlaw/util.hpp"

namespace roadlaw {

struct AblationFlags {
    bool use_video_caption = true;    // false blanks the video description
    bool use_fact_aggregation = true; // false concatenates the two texts
    bool use_assistant = true;        // false skips retrieval and briefing
    bool use_multi_judge = true;      // false stops after the first judge
};

inline void to_json(Json& j, const AblationFlags& f) {
    j = Json{{"use_video_caption", f.use_video_caption},
             {"use_fact_aggregation", f.use_fact_aggregation},
             {"use_assistant", f.use_assistant},
             {"use_multi_judge", f.use_multi_judge}};
}

inline void from_json(const Json& j, AblationFlags& f) {
    f.use_video_caption = j.value("use_video_caption", true);
    f.use_fact_aggregation = j.value("use_fact_aggregation", true);
    f.use_assistant = j.value("use_assistant", true);
    f.use_multi_judge = j.value("use_multi_judge", true);
}

struct RunnerConfig {
    std::string trace_dir;  // empty disables trace persistence
};

inline void to_json(Json& j, const RunnerConfig& r) {
    j = Json{{"trace_dir", r.trace_dir}};
}

inline void from_json(const Json& j, RunnerConfig& r) {
    r.trace_dir = j.value("trace_dir", "");
}

// Fixed stage order; every trace lists all five in this sequence.
inline const std::array<std::string, 5>& stage_names() {
    static const std::array<std::string, 5> names = {
        "facts", "retrieval", "issue", "law_precedent", "deliberation"};
    return names;
}

inline constexpr const char* kEmptyDigestMarker =
    "No external legal support found.";

struct StageRecord {
    std::string stage;
    std::string status;  // "ok" | "skipped" | "failed"
    std::string detail;
    Json output = Json::object();
    long long wall_ms = 0;
};

struct TraceLog {
    std::string case_id;
    AblationFlags flags;
    std::vector<StageRecord> stages;

    /// Timings are excluded on demand so serialized traces can be compared
    /// byte for byte.
    Json to_json(bool include_timings = true) const {
        Json stages_json = Json::array();
        for (const auto& s : stages) {
            Json rec{{"stage", s.stage},
                     {"status", s.status},
                     {"detail", s.detail},
                     {"output", s.output}};
            if (include_timings) {
                rec["wall_ms"] = s.wall_ms;
            }
            stages_json.push_back(std::move(rec));
        }
        return Json{{"case_id", case_id},
                    {"flags", flags},
                    {"stages", std::move(stages_json)}};
    }
};

/// Full result of one adjudication run.
struct JudgmentReport {
    FactStatement fact;
    LegalSummary summary;
    std::string digest;
    PreliminaryJudgment preliminary;
    RevisionSuggestions revisions;
    FinalJudgment judgment;
    std::string rendered;
    TraceLog trace;
};

inline std::string render_report(const FinalJudgment& judgment,
                                 const std::string& case_id) {
    std::string out = "Traffic Accident Adjudication Report\n";
    out += "Case: " + case_id + "\n";
    out += "Responsibility mode: " + judgment.final_mode + "\n";
    out += "Statutes: " +
           (judgment.citations.empty() ? std::string("none")
                                       : join(judgment.citations, "; ")) +
           "\n";
    const std::array<std::pair<const char*, const std::string*>, 6> sections = {
        {{"Facts", &judgment.report.facts},
         {"Issues", &judgment.report.issues},
         {"Statute Analysis", &judgment.report.statute_analysis},
         {"Precedent Analysis", &judgment.report.precedent_analysis},
         {"Liability Determination", &judgment.report.liability_determination},
         {"Decision", &judgment.report.decision}}};
    for (const auto& [title, body] : sections) {
        out += "\n-- " + std::string(title) + " --\n" + *body + "\n";
    }
    return out;
}

inline std::string persist_trace(const TraceLog& trace,
                                 const std::string& trace_dir) {
    const std::string path = trace_dir + "/" + trace.case_id + ".json";
    write_text_file(path, trace.to_json(true).dump(2) + "\n");
    return path;
}

/// Orchestrates the five-stage adjudication run over a fixed corpus, index,
/// and backend pair. Safe for concurrent run_case calls as long as the
/// backends are thread safe; the engine itself holds no mutable run state.
class Engine {
public:
    Engine(CorpusBundle bundle, InvertedIndex index, LlmBackend& llm,
           EmbeddingBackend& embedder, RolePrompts prompts,
           AblationFlags flags = {}, RunnerConfig runner = {},
           AgentOptions agent_options = {})
        : bundle_(std::move(bundle)),
          index_(std::move(index)),
          agents_(llm, std::move(prompts), agent_options),
          embedder_(embedder),
          flags_(flags),
          runner_(std::move(runner)) {}

    const CorpusBundle& bundle() const { return bundle_; }
    const InvertedIndex& index() const { return index_; }
    const AblationFlags& flags() const { return flags_; }

    JudgmentReport run_case(const CaseRecord& record) const {
        return run_case(record.case_id, record.accident_text,
                        record.video_description);
    }

    /// Runs all five stages. Throws PipelineError naming the failing stage;
    /// the partial trace is still persisted when a trace directory is set.
    JudgmentReport run_case(const std::string& case_id,
                            const std::string& accident_text,
                            const std::string& video_description) const {
        JudgmentReport report;
        report.trace.case_id = case_id;
        report.trace.flags = flags_;
        try {
            stage_facts(report, case_id, accident_text, video_description);
            stage_retrieval(report);
            stage_issue(report);
            stage_law_precedent(report);
            stage_deliberation(report);
        } catch (...) {
            const std::string stage = next_stage_name(report.trace);
            report.trace.stages.push_back({stage, "failed",
                                           current_exception_message(),
                                           Json::object(), 0});
            finish_trace(report);
            rethrow_as_pipeline_error(stage);
        }
        report.judgment.trace_refs = finish_trace(report);
        report.rendered = render_report(report.judgment, case_id);
        return report;
    }

    /// Multiple-choice evaluation path: fuses facts, then asks the selector.
    int run_ara(const CaseRecord& record) const {
        if (!record.ara_options || record.ara_options->empty()) {
            throw ValidationError("case " + record.case_id +
                                  " has no answer options");
        }
        JudgmentReport scratch;
        scratch.trace.case_id = record.case_id;
        scratch.trace.flags = flags_;
        try {
            stage_facts(scratch, record.case_id, record.accident_text,
                        record.video_description);
            return agents_.select_ara(scratch.fact, *record.ara_options);
        } catch (...) {
            rethrow_as_pipeline_error(scratch.trace.stages.empty()
                                          ? "facts"
                                          : "ara_selection");
        }
    }

private:
    using Clock = std::chrono::steady_clock;

    static long long ms_since(Clock::time_point start) {
        return std::chrono::duration_cast<std::chrono::milliseconds>(
                   Clock::now() - start)
            .count();
    }

    void stage_facts(JudgmentReport& report, const std::string& case_id,
                     const std::string& accident_text,
                     const std::string& video_description) const {
        const auto start = Clock::now();
        const std::string video =
            flags_.use_video_caption ? video_description : "";
        StageRecord rec{"facts", "ok", "", Json::object(), 0};
        if (flags_.use_fact_aggregation) {
            rec.detail = "agent aggregation";
            report.fact = agents_.aggregate_facts(case_id, accident_text, video);
        } else {
            rec.detail = "literal concatenation (aggregation disabled)";
            report.fact.case_id = case_id;
            report.fact.narrative =
                video.empty() ? accident_text : accident_text + "\n\n" + video;
        }
        rec.output = report.fact;
        rec.wall_ms = ms_since(start);
        report.trace.stages.push_back(std::move(rec));
    }

    void stage_retrieval(JudgmentReport& report) const {
        const auto start = Clock::now();
        StageRecord rec{"retrieval", "ok", "", Json::object(), 0};
        if (!flags_.use_assistant) {
            rec.status = "skipped";
            rec.detail = "assistant disabled";
            report.summary.query_fact_ref = report.fact.case_id;
            report.summary.inferred_category = "uncategorized";
            report.summary.compiled_text = kEmptyDigestMarker;
            report.digest = kEmptyDigestMarker;
        } else {
            std::string query = report.fact.narrative;
            for (const auto& e : report.fact.elements) {
                query += " " + e.value;
            }
            const auto statute_hits =
                rerank(index_, index_.coarse_retrieve(query, DocKind::statute),
                       query, embedder_);
            const auto precedent_hits = rerank(
                index_, index_.coarse_retrieve(query, DocKind::precedent),
                query, embedder_);
            report.summary =
                assemble_legal_summary(report.fact, statute_hits,
                                       precedent_hits, bundle_.corpus);
            report.digest = report.summary.empty()
                                ? kEmptyDigestMarker
                                : agents_.assist_digest(report.fact,
                                                        report.summary);
            rec.detail = std::to_string(report.summary.statutes.size()) +
                         " statutes, " +
                         std::to_string(report.summary.precedents.size()) +
                         " precedents";
        }
        rec.output = Json{{"summary", report.summary}, {"digest", report.digest}};
        rec.wall_ms = ms_since(start);
        report.trace.stages.push_back(std::move(rec));
    }

    void stage_issue(JudgmentReport& report) const {
        const auto start = Clock::now();
        report.preliminary = agents_.issue_judge(report.fact);
        report.trace.stages.push_back({"issue", "ok", "", report.preliminary,
                                       ms_since(start)});
    }

    void stage_law_precedent(JudgmentReport& report) const {
        const auto start = Clock::now();
        StageRecord rec{"law_precedent", "ok", "", Json::object(), 0};
        if (!flags_.use_multi_judge) {
            rec.status = "skipped";
            rec.detail = "single-judge mode";
            // The audit of unresolvable statute claims still applies.
            enforce_revision_policy(report.revisions, report.preliminary,
                                    report.summary, bundle_.corpus);
        } else {
            report.revisions = agents_.law_precedent_judge(
                report.fact, report.preliminary, report.summary, report.digest,
                bundle_.corpus);
        }
        rec.output = report.revisions;
        rec.wall_ms = ms_since(start);
        report.trace.stages.push_back(std::move(rec));
    }

    void stage_deliberation(JudgmentReport& report) const {
        const auto start = Clock::now();
        StageRecord rec{"deliberation", "ok", "", Json::object(), 0};
        const std::string effective_mode =
            report.revisions.mode_override.value_or(
                report.preliminary.predicted_mode);
        DeliberationDraft draft;
        if (!flags_.use_multi_judge) {
            rec.status = "skipped";
            rec.detail = "single-judge passthrough";
            draft = passthrough_draft(report);
        } else {
            draft = agents_.deliberate(report.fact, report.preliminary,
                                       report.revisions, report.summary,
                                       effective_mode);
        }
        report.judgment =
            finalize_judgment(draft, report.preliminary, report.revisions,
                              effective_mode, bundle_.corpus,
                              bundle_.mode_map);
        rec.output = report.judgment;
        rec.wall_ms = ms_since(start);
        report.trace.stages.push_back(std::move(rec));
    }

    /// Single-judge mode: the final ruling restates the preliminary one.
    DeliberationDraft passthrough_draft(const JudgmentReport& report) const {
        DeliberationDraft draft;
        draft.final_mode = report.preliminary.predicted_mode;
        draft.report.facts = report.fact.narrative;
        draft.report.issues = report.preliminary.reasoning;
        draft.report.statute_analysis =
            "Provisions considered: " +
            detail::format_ids(reviewed_statute_ids(report.preliminary,
                                                    report.revisions)) +
            ".";
        draft.report.precedent_analysis = "Not examined in single-judge mode.";
        draft.report.liability_determination =
            report.preliminary.liability_allocation;
        draft.report.decision = "Responsibility mode " +
                                report.preliminary.predicted_mode +
                                " is entered.";
        return draft;
    }

    std::vector<std::string> finish_trace(JudgmentReport& report) const {
        if (runner_.trace_dir.empty()) {
            return {};
        }
        return {persist_trace(report.trace, runner_.trace_dir)};
    }

    static std::string current_exception_message() {
        try {
            throw;
        } catch (const std::exception& e) {
            return e.what();
        } catch (...) {
            return "unknown error";
        }
    }

    [[noreturn]] static void rethrow_as_pipeline_error(
        const std::string& stage) {
        try {
            throw;
        } catch (const PipelineError&) {
            throw;
        } catch (const StructuredOutputError& e) {
            throw PipelineError(stage, e.what(),
                                PipelineError::Kind::structured_output);
        } catch (const BackendError& e) {
            throw PipelineError(stage, e.what(), PipelineError::Kind::backend);
        } catch (const RetrievalError& e) {
            throw PipelineError(stage, e.what(), PipelineError::Kind::backend);
        } catch (const std::exception& e) {
            throw PipelineError(stage, e.what(), PipelineError::Kind::other);
        }
    }

    static std::string next_stage_name(const TraceLog& trace) {
        const std::size_t done = trace.stages.size();
        return done < stage_names().size() ? stage_names()[done]
                                           : trace.stages.back().stage;
    }

    CorpusBundle bundle_;
    InvertedIndex index_;
    mutable AgentSuite agents_;
    EmbeddingBackend& embedder_;
    AblationFlags flags_;
    RunnerConfig runner_;
};

}  // namespace roadlaw
