#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <cstdio>
#include <functional>
#include <string>
#include <thread>
#include <vector>

#include "roadlaw/corpus.hpp"
#include "roadlaw/pipeline.hpp"
#include "roadlaw/util.hpp"

namespace roadlaw {

inline constexpr int kModeCount = 6;

inline int mode_index(const std::string& label) {
    const auto& labels = mode_labels();
    for (int i = 0; i < kModeCount; ++i) {
        if (labels[static_cast<std::size_t>(i)] == label) {
            return i;
        }
    }
    throw ValidationError("unknown responsibility mode label '" + label + "'");
}

/// Gold-by-predicted counts plus a per-gold-class failure tally. A failed
/// run counts against accuracy and as a missed retrieval (false negative)
/// for its gold class, but no class is charged a false positive for it.
struct ConfusionMatrix {
    std::array<std::array<int, kModeCount>, kModeCount> counts{};
    std::array<int, kModeCount> failed_by_gold{};

    void add(const std::string& gold, const std::string& predicted) {
        counts[static_cast<std::size_t>(mode_index(gold))]
              [static_cast<std::size_t>(mode_index(predicted))] += 1;
    }

    void add_failed(const std::string& gold) {
        failed_by_gold[static_cast<std::size_t>(mode_index(gold))] += 1;
    }

    int completed() const {
        int n = 0;
        for (const auto& row : counts) {
            for (int v : row) {
                n += v;
            }
        }
        return n;
    }

    int failures() const {
        int n = 0;
        for (int v : failed_by_gold) {
            n += v;
        }
        return n;
    }

    int total() const { return completed() + failures(); }

    int correct() const {
        int n = 0;
        for (int i = 0; i < kModeCount; ++i) {
            n += counts[static_cast<std::size_t>(i)]
                       [static_cast<std::size_t>(i)];
        }
        return n;
    }
};

struct ClassMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

inline std::array<ClassMetrics, kModeCount> per_class_metrics(
    const ConfusionMatrix& cm) {
    std::array<ClassMetrics, kModeCount> out{};
    for (int c = 0; c < kModeCount; ++c) {
        const auto ci = static_cast<std::size_t>(c);
        const int tp = cm.counts[ci][ci];
        int fp = 0;
        int fn = cm.failed_by_gold[ci];
        for (int other = 0; other < kModeCount; ++other) {
            const auto oi = static_cast<std::size_t>(other);
            if (other != c) {
                fp += cm.counts[oi][ci];
                fn += cm.counts[ci][oi];
            }
        }
        out[ci].precision =
            (tp + fp) == 0 ? 0.0 : static_cast<double>(tp) / (tp + fp);
        out[ci].recall =
            (tp + fn) == 0 ? 0.0 : static_cast<double>(tp) / (tp + fn);
        const int f1_denom = 2 * tp + fp + fn;
        out[ci].f1 =
            f1_denom == 0 ? 0.0 : 2.0 * static_cast<double>(tp) / f1_denom;
    }
    return out;
}

inline double accuracy(const ConfusionMatrix& cm) {
    const int total = cm.total();
    if (total == 0) {
        throw ValidationError("accuracy is undefined on an empty matrix");
    }
    return static_cast<double>(cm.correct()) / total;
}

/// Mean F1 over all six classes, absent classes included at zero.
inline double macro_f1(const ConfusionMatrix& cm) {
    if (cm.total() == 0) {
        throw ValidationError("macro F1 is undefined on an empty matrix");
    }
    const auto per_class = per_class_metrics(cm);
    double sum = 0.0;
    for (const auto& m : per_class) {
        sum += m.f1;
    }
    return sum / kModeCount;
}

/// A prediction scores a core-statute hit when it cites at least one of the
/// gold mode's core provisions.
inline bool core_statute_hit(const std::vector<std::string>& predicted_ids,
                             const std::string& gold_mode,
                             const ModeStatuteMap& mode_map) {
    const auto& core = statutes_for_mode(mode_map, gold_mode).core;
    for (const auto& id : predicted_ids) {
        if (std::find(core.begin(), core.end(), id) != core.end()) {
            return true;
        }
    }
    return false;
}

struct EvalCaseRow {
    std::string case_id;
    std::string gold_mode;
    std::string predicted_mode;  // empty when the run failed
    std::vector<std::string> predicted_statute_ids;
    bool core_hit = false;
    bool failed = false;
    std::string error;
};

inline void to_json(Json& j, const EvalCaseRow& r) {
    j = Json{{"case_id", r.case_id},
             {"gold_mode", r.gold_mode},
             {"predicted_mode", r.predicted_mode},
             {"predicted_statute_ids", r.predicted_statute_ids},
             {"core_hit", r.core_hit},
             {"failed", r.failed},
             {"error", r.error}};
}

struct EvalReport {
    int total = 0;
    int failures = 0;
    double accuracy = 0.0;
    double macro_f1 = 0.0;
    double core_hit_rate = 0.0;
    std::array<ClassMetrics, kModeCount> per_class{};
    ConfusionMatrix confusion;
    std::vector<EvalCaseRow> rows;

    Json to_json() const {
        Json per_class_json = Json::array();
        for (int c = 0; c < kModeCount; ++c) {
            const auto ci = static_cast<std::size_t>(c);
            per_class_json.push_back(
                Json{{"mode", mode_labels()[ci]},
                     {"precision", per_class[ci].precision},
                     {"recall", per_class[ci].recall},
                     {"f1", per_class[ci].f1}});
        }
        Json confusion_json = Json::array();
        for (const auto& row : confusion.counts) {
            confusion_json.push_back(row);
        }
        return Json{{"total", total},
                    {"failures", failures},
                    {"accuracy", accuracy},
                    {"macro_f1", macro_f1},
                    {"core_statute_hit_rate", core_hit_rate},
                    {"per_class", std::move(per_class_json)},
                    {"confusion", std::move(confusion_json)},
                    {"failed_by_gold", confusion.failed_by_gold},
                    {"cases", rows}};
    }

    std::string to_table() const {
        char line[160];
        std::string out;
        std::snprintf(line, sizeof(line), "cases: %d  failures: %d\n", total,
                      failures);
        out += line;
        std::snprintf(line, sizeof(line),
                      "accuracy: %.3f  macro_f1: %.3f  core_statute_hit: "
                      "%.3f\n",
                      accuracy, macro_f1, core_hit_rate);
        out += line;
        out += "mode  precision  recall  f1\n";
        for (int c = 0; c < kModeCount; ++c) {
            const auto ci = static_cast<std::size_t>(c);
            std::snprintf(line, sizeof(line), "%-4s  %9.3f  %6.3f  %5.3f\n",
                          mode_labels()[ci].c_str(), per_class[ci].precision,
                          per_class[ci].recall, per_class[ci].f1);
            out += line;
        }
        return out;
    }
};

/// Runs every case through the engine and scores the predictions. All cases
/// must carry a gold mode. `concurrency` caps the number of worker threads;
/// row order always matches case order.
inline EvalReport evaluate_dataset(const Engine& engine,
                                   const std::vector<CaseRecord>& cases,
                                   int concurrency = 1) {
    if (cases.empty()) {
        throw ValidationError("evaluation dataset is empty");
    }
    if (concurrency < 1) {
        throw ValidationError("concurrency must be at least 1");
    }
    for (const auto& c : cases) {
        if (!c.gold_mode) {
            throw ValidationError("case " + c.case_id +
                                  " has no gold responsibility mode");
        }
    }

    std::vector<EvalCaseRow> rows(cases.size());
    const auto run_one = [&engine, &cases, &rows](std::size_t i) {
        const CaseRecord& record = cases[i];
        EvalCaseRow row;
        row.case_id = record.case_id;
        row.gold_mode = *record.gold_mode;
        try {
            const JudgmentReport result = engine.run_case(record);
            row.predicted_mode = result.judgment.final_mode;
            row.predicted_statute_ids = result.judgment.final_statute_ids;
        } catch (const PipelineError& e) {
            row.failed = true;
            row.error = e.what();
        }
        rows[i] = std::move(row);
    };

    const int workers =
        std::min<int>(concurrency, static_cast<int>(cases.size()));
    if (workers <= 1) {
        for (std::size_t i = 0; i < cases.size(); ++i) {
            run_one(i);
        }
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&next, &cases, &run_one] {
                for (;;) {
                    const std::size_t i = next.fetch_add(1);
                    if (i >= cases.size()) {
                        return;
                    }
                    run_one(i);
                }
            });
        }
        for (auto& t : pool) {
            t.join();
        }
    }

    EvalReport report;
    for (auto& row : rows) {
        if (row.failed) {
            report.confusion.add_failed(row.gold_mode);
        } else {
            report.confusion.add(row.gold_mode, row.predicted_mode);
            row.core_hit =
                core_statute_hit(row.predicted_statute_ids, row.gold_mode,
                                 engine.bundle().mode_map);
        }
    }
    report.total = report.confusion.total();
    report.failures = report.confusion.failures();
    report.accuracy = accuracy(report.confusion);
    report.macro_f1 = macro_f1(report.confusion);
    int hits = 0;
    for (const auto& row : rows) {
        hits += row.core_hit ? 1 : 0;
    }
    report.core_hit_rate = static_cast<double>(hits) / report.total;
    report.per_class = per_class_metrics(report.confusion);
    report.rows = std::move(rows);
    return report;
}

// ---------------------------------------------------------------------------
// Multiple-choice (answer selection) evaluation

struct AraRow {
    std::string case_id;
    int gold_index = -1;
    int selected_index = -1;  // -1 when the run failed
    bool failed = false;
    std::string error;
};

inline void to_json(Json& j, const AraRow& r) {
    j = Json{{"case_id", r.case_id},
             {"gold_index", r.gold_index},
             {"selected_index", r.selected_index},
             {"failed", r.failed},
             {"error", r.error}};
}

struct AraReport {
    int total = 0;
    int correct = 0;
    int failures = 0;
    double accuracy = 0.0;
    std::vector<AraRow> rows;

    Json to_json() const {
        return Json{{"total", total},
                    {"correct", correct},
                    {"failures", failures},
                    {"accuracy", accuracy},
                    {"cases", rows}};
    }
};

inline AraReport evaluate_ara(const Engine& engine,
                              const std::vector<CaseRecord>& cases) {
    AraReport report;
    for (const auto& record : cases) {
        if (!record.ara_options || !record.gold_ara_index) {
            continue;  // not a multiple-choice case
        }
        AraRow row;
        row.case_id = record.case_id;
        row.gold_index = *record.gold_ara_index;
        try {
            row.selected_index = engine.run_ara(record);
        } catch (const PipelineError& e) {
            row.failed = true;
            row.error = e.what();
        }
        report.rows.push_back(std::move(row));
    }
    if (report.rows.empty()) {
        throw ValidationError("dataset has no multiple-choice cases");
    }
    report.total = static_cast<int>(report.rows.size());
    for (const auto& row : report.rows) {
        report.failures += row.failed ? 1 : 0;
        report.correct +=
            (!row.failed && row.selected_index == row.gold_index) ? 1 : 0;
    }
    report.accuracy = static_cast<double>(report.correct) / report.total;
    return report;
}

// ---------------------------------------------------------------------------
// Ablation sweep

struct AblationResult {
    std::string name;
    AblationFlags flags;
    EvalReport report;
};

/// The five standard configurations, from everything off to everything on.
/// Each step enables one more component over the previous row.
inline std::vector<std::pair<std::string, AblationFlags>> ablation_ladder() {
    return {
        {"base", {false, false, false, false}},
        {"+video_caption", {true, false, false, false}},
        {"+fact_aggregation", {true, true, false, false}},
        {"+assistant", {true, true, true, false}},
        {"full", {true, true, true, true}},
    };
}

inline std::vector<AblationResult> ablation_sweep(
    const std::function<Engine(const AblationFlags&)>& make_engine,
    const std::vector<CaseRecord>& cases, int concurrency = 1) {
    std::vector<AblationResult> results;
    for (const auto& [name, flags] : ablation_ladder()) {
        const Engine engine = make_engine(flags);
        results.push_back(
            {name, flags, evaluate_dataset(engine, cases, concurrency)});
    }
    return results;
}

}  // namespace roadlaw
