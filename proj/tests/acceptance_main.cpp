// Acceptance gate: exercises the contract end to end and prints one
// PASS/FAIL line per criterion. Exits nonzero when any criterion fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "roadlaw/eval.hpp"
#include "roadlaw/mock.hpp"
#include "roadlaw/service.hpp"

using namespace roadlaw;

namespace {

struct CheckFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void expect(bool condition, const std::string& what) {
    if (!condition) {
        throw CheckFailure(what);
    }
}

void expect_near(double got, double want, double tol, const std::string& what) {
    if (!(std::fabs(got - want) <= tol)) {
        char buffer[160];
        std::snprintf(buffer, sizeof(buffer), "%s (got %.17g, want %.17g)",
                      what.c_str(), got, want);
        throw CheckFailure(buffer);
    }
}

const std::string kDataDir = std::string(ROADLAW_SOURCE_DIR) + "/data";

CorpusBundle shipped_bundle() {
    CorpusBundle bundle;
    bundle.corpus = load_statute_corpus(kDataDir + "/statutes.jsonl");
    LegalCorpus precs = load_statute_corpus(kDataDir + "/precedents.jsonl");
    for (auto& p : precs.precedents) {
        bundle.corpus.precedents.push_back(std::move(p));
    }
    bundle.mode_map = load_mode_map(kDataDir + "/mode_map.json", bundle.corpus);
    bundle.corpus.validate();
    return bundle;
}

struct Fixture {
    CorpusBundle bundle = shipped_bundle();
    InvertedIndex index = InvertedIndex::build(bundle.corpus, {});
    MockLlmBackend llm{MockScript::load(kDataDir + "/mock_script.json")};
    HashEmbedder embedder{64};

    Engine engine(AblationFlags flags = {}) {
        return Engine(bundle, index, llm, embedder, RolePrompts::defaults(),
                      flags);
    }
};

std::vector<CaseRecord> demo_cases() {
    return load_case_dataset(kDataDir + "/cases_demo.jsonl");
}

const CaseRecord& case_by_id(const std::vector<CaseRecord>& cases,
                             const std::string& id) {
    for (const auto& c : cases) {
        if (c.case_id == id) {
            return c;
        }
    }
    throw CheckFailure("fixture dataset is missing case " + id);
}

// Swaps the scripted modes of two demo cases while leaving their citations
// intact. First match wins inside the mock, so prepending shadows.
MockScript perturbed_script() {
    MockScript script = MockScript::load(kDataDir + "/mock_script.json");
    const MockScriptEntry rm1{
        "issue_judge", "CASE_ID: demo-rm1\n",
        R"({"liability_allocation": "perturbed", "predicted_mode": "RM2",)"
        R"( "statute_ids": ["rtsl-43", "rtsl-ir-80", "rtsl-22"],)"
        R"( "reasoning": "perturbed"})"};
    const MockScriptEntry rm2{
        "issue_judge", "CASE_ID: demo-rm2\n",
        R"({"liability_allocation": "perturbed", "predicted_mode": "RM1",)"
        R"( "statute_ids": ["rtsl-44", "rtsl-57", "rtsl-22"],)"
        R"( "reasoning": "perturbed"})"};
    script.entries.insert(script.entries.begin(), {rm1, rm2});
    return script;
}

const std::vector<std::string>& word_pool() {
    static const std::vector<std::string> words = {
        "red",  "light", "lane", "crash", "truck", "merge", "signal",
        "夜间", "行驶",  "追尾", "信号",  "路口",  "停车",  "超速"};
    return words;
}

std::string random_sentence(std::mt19937_64& rng, int min_words,
                            int max_words) {
    const auto& words = word_pool();
    const int count =
        min_words + static_cast<int>(rng() % static_cast<std::uint64_t>(
                                                 max_words - min_words + 1));
    std::string out;
    for (int i = 0; i < count; ++i) {
        if (!out.empty()) {
            out += " ";
        }
        out += words[rng() % words.size()];
    }
    return out;
}

struct OracleHit {
    std::string id;
    double score = 0.0;
};

// Independent Okapi scorer: recomputes document frequencies, lengths, and
// per-occurrence query term contributions from scratch.
std::vector<OracleHit> brute_force_bm25(const std::vector<IndexDoc>& docs,
                                        const std::string& query,
                                        const Bm25Params& params) {
    std::map<std::string, std::vector<std::string>> tokens;
    std::map<std::string, int> df;
    double total_length = 0.0;
    for (const auto& d : docs) {
        auto terms = tokenize(d.text);
        total_length += static_cast<double>(terms.size());
        for (const auto& term :
             std::set<std::string>(terms.begin(), terms.end())) {
            ++df[term];
        }
        tokens[d.id] = std::move(terms);
    }
    const double n = static_cast<double>(docs.size());
    const double avg_length = docs.empty() ? 0.0 : total_length / n;

    const auto query_terms = tokenize(query);
    std::vector<OracleHit> hits;
    for (const auto& d : docs) {
        const auto& doc_terms = tokens[d.id];
        double score = 0.0;
        for (const auto& term : query_terms) {
            const double tf = static_cast<double>(
                std::count(doc_terms.begin(), doc_terms.end(), term));
            if (tf == 0.0) {
                continue;
            }
            const double dfi = static_cast<double>(df[term]);
            const double idf = std::log((n - dfi + 0.5) / (dfi + 0.5) + 1.0);
            const double norm =
                avg_length > 0.0
                    ? static_cast<double>(doc_terms.size()) / avg_length
                    : 0.0;
            const double denom =
                tf + params.k1 * (1.0 - params.b + params.b * norm);
            score += idf * tf * (params.k1 + 1.0) / denom;
        }
        if (score > 0.0) {
            hits.push_back({d.id, score});
        }
    }
    std::sort(hits.begin(), hits.end(),
              [](const OracleHit& a, const OracleHit& b) {
                  if (a.score != b.score) {
                      return a.score > b.score;
                  }
                  return a.id < b.id;
              });
    if (hits.size() > static_cast<std::size_t>(params.top_k_coarse)) {
        hits.resize(static_cast<std::size_t>(params.top_k_coarse));
    }
    return hits;
}

double oracle_cosine(const std::vector<double>& a,
                     const std::vector<double>& b) {
    double dot = 0.0;
    double norm_a = 0.0;
    double norm_b = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        norm_a += a[i] * a[i];
        norm_b += b[i] * b[i];
    }
    if (norm_a == 0.0 || norm_b == 0.0) {
        return 0.0;
    }
    return dot / (std::sqrt(norm_a) * std::sqrt(norm_b));
}

// ---------------------------------------------------------------------------
// Criteria

void check_bm25_oracle() {
    const auto start = std::chrono::steady_clock::now();

    std::vector<IndexDoc> toy = {{"d1", DocKind::statute, "red light run"},
                                 {"d2", DocKind::statute, "lane change crash"},
                                 {"d3", DocKind::statute, "red car parked"}};
    const auto toy_index = InvertedIndex::build(toy, {});
    const auto toy_hits = toy_index.coarse_retrieve("red light");
    expect(toy_hits.size() == 2, "toy query must rank exactly two documents");
    expect(toy_hits[0].doc_id == "d1" && toy_hits[1].doc_id == "d3",
           "toy ranking order is wrong");
    expect_near(toy_hits[0].score, 1.4508328822574619, 1e-9,
                "pinned score for d1");
    expect_near(toy_hits[1].score, 0.47000362924573563, 1e-9,
                "pinned score for d3");

    std::mt19937_64 rng(20240818ull);
    for (int trial = 0; trial < 40; ++trial) {
        Bm25Params params;
        params.top_k_coarse = 1 + static_cast<int>(rng() % 20);
        params.top_k_rerank = 1;
        const int doc_count = 5 + static_cast<int>(rng() % 16);  // <= 20
        std::vector<IndexDoc> docs;
        for (int i = 0; i < doc_count; ++i) {
            char id[8];
            std::snprintf(id, sizeof(id), "doc-%02d", i);
            docs.push_back({id,
                            i % 3 == 0 ? DocKind::precedent : DocKind::statute,
                            random_sentence(rng, 3, 14)});
        }
        const auto index = InvertedIndex::build(docs, params);
        for (int q = 0; q < 6; ++q) {
            const std::string query = random_sentence(rng, 1, 5);
            const auto got = index.coarse_retrieve(query);
            const auto want = brute_force_bm25(docs, query, params);
            expect(got.size() == want.size(),
                   "coarse hit count diverges from brute force");
            for (std::size_t i = 0; i < got.size(); ++i) {
                expect(got[i].doc_id == want[i].id,
                       "coarse ranking diverges from brute force at rank " +
                           std::to_string(i));
                expect_near(got[i].score, want[i].score, 1e-12,
                            "coarse score diverges at rank " +
                                std::to_string(i));
            }
        }
    }

    const auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                             std::chrono::steady_clock::now() - start)
                             .count();
    expect(elapsed < 1000, "bm25 oracle exceeded its 1 s budget");
}

void check_rerank_oracle() {
    HashEmbedder embedder(32);
    std::mt19937_64 rng(9120818ull);
    int fixtures = 0;
    for (int trial = 0; trial < 120; ++trial) {
        Bm25Params params;
        params.top_k_rerank = 1 + static_cast<int>(rng() % 5);
        const int doc_count = 3 + static_cast<int>(rng() % 10);
        std::vector<IndexDoc> docs;
        std::map<std::string, std::string> text_of;
        for (int i = 0; i < doc_count; ++i) {
            char id[8];
            std::snprintf(id, sizeof(id), "d%02d", i);
            // Every fourth document repeats the first text so exact score
            // ties exercise the doc-id tie-break.
            const std::string text = (i > 0 && i % 4 == 0)
                                         ? docs[0].text
                                         : random_sentence(rng, 2, 9);
            docs.push_back({id, DocKind::statute, text});
            text_of[id] = text;
        }
        const auto index = InvertedIndex::build(docs, params);
        const std::string query = random_sentence(rng, 2, 6);

        std::vector<RankedDoc> candidates;
        for (const auto& [id, text] : text_of) {
            candidates.push_back({id, 0.0, RankStage::coarse});
        }
        std::shuffle(candidates.begin(), candidates.end(), rng);

        const auto got = rerank(index, candidates, query, embedder);

        const auto query_vec = embedder.embed(query);
        std::vector<OracleHit> want;
        for (const auto& [id, text] : text_of) {
            want.push_back({id, oracle_cosine(query_vec, embedder.embed(text))});
        }
        std::sort(want.begin(), want.end(),
                  [](const OracleHit& a, const OracleHit& b) {
                      if (a.score != b.score) {
                          return a.score > b.score;
                      }
                      return a.id < b.id;
                  });
        if (want.size() > static_cast<std::size_t>(params.top_k_rerank)) {
            want.resize(static_cast<std::size_t>(params.top_k_rerank));
        }

        expect(got.size() == want.size(), "rerank hit count diverges");
        for (std::size_t i = 0; i < got.size(); ++i) {
            expect(got[i].doc_id == want[i].id,
                   "rerank order diverges from cosine sort at rank " +
                       std::to_string(i));
            expect_near(got[i].score, want[i].score, 1e-12,
                        "rerank score diverges at rank " + std::to_string(i));
            expect(got[i].stage == RankStage::reranked,
                   "rerank hits must be tagged as reranked");
        }
        ++fixtures;
    }
    expect(fixtures >= 100, "not enough rerank fixtures were generated");
}

void check_metric_oracles() {
    std::mt19937_64 rng(424242ull);
    for (int trial = 0; trial < 1000; ++trial) {
        ConfusionMatrix cm;
        for (int g = 0; g < kModeCount; ++g) {
            for (int p = 0; p < kModeCount; ++p) {
                cm.counts[static_cast<std::size_t>(g)]
                         [static_cast<std::size_t>(p)] =
                    static_cast<int>(rng() % 10);
            }
            cm.failed_by_gold[static_cast<std::size_t>(g)] =
                static_cast<int>(rng() % 4);
        }
        if (cm.total() == 0) {
            cm.counts[0][0] = 1;
        }

        const auto got = per_class_metrics(cm);
        double macro_sum = 0.0;
        int diagonal = 0;
        for (int c = 0; c < kModeCount; ++c) {
            const auto ci = static_cast<std::size_t>(c);
            const int tp = cm.counts[ci][ci];
            diagonal += tp;
            int fp = 0;
            int fn = cm.failed_by_gold[ci];
            for (int o = 0; o < kModeCount; ++o) {
                if (o == c) {
                    continue;
                }
                fp += cm.counts[static_cast<std::size_t>(o)][ci];
                fn += cm.counts[ci][static_cast<std::size_t>(o)];
            }
            const double precision =
                tp + fp == 0 ? 0.0 : static_cast<double>(tp) / (tp + fp);
            const double recall =
                tp + fn == 0 ? 0.0 : static_cast<double>(tp) / (tp + fn);
            const double f1 = precision + recall == 0.0
                                  ? 0.0
                                  : 2.0 * precision * recall /
                                        (precision + recall);
            expect_near(got[ci].precision, precision, 1e-12,
                        "precision diverges for class " + std::to_string(c));
            expect_near(got[ci].recall, recall, 1e-12,
                        "recall diverges for class " + std::to_string(c));
            expect_near(got[ci].f1, f1, 1e-12,
                        "f1 diverges for class " + std::to_string(c));
            macro_sum += f1;
        }
        expect_near(macro_f1(cm), macro_sum / kModeCount, 1e-12,
                    "macro f1 diverges from the per-class mean");
        expect_near(accuracy(cm),
                    static_cast<double>(diagonal) / cm.total(), 1e-12,
                    "accuracy diverges from the diagonal recount");
    }

    const CorpusBundle bundle = shipped_bundle();
    for (const auto& predicted_label : mode_labels()) {
        const auto predicted =
            statutes_for_mode(bundle.mode_map, predicted_label).full;
        for (const auto& gold_label : mode_labels()) {
            const auto core =
                statutes_for_mode(bundle.mode_map, gold_label).core;
            std::set<std::string> a(predicted.begin(), predicted.end());
            std::set<std::string> b(core.begin(), core.end());
            std::vector<std::string> overlap;
            std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                                  std::back_inserter(overlap));
            expect(core_statute_hit(predicted, gold_label, bundle.mode_map) ==
                       !overlap.empty(),
                   "core hit diverges from set intersection for " +
                       predicted_label + " vs " + gold_label);
        }
    }
    expect(!core_statute_hit({}, "RM1", bundle.mode_map),
           "an empty citation list can never hit");
}

void check_core_hit_dominates_accuracy() {
    const CorpusBundle bundle = shipped_bundle();
    const auto& labels = mode_labels();

    // A correct prediction that cites its mode's provision set always hits
    // that mode's core, because every core set is a subset of its full set.
    for (const auto& label : labels) {
        const auto ms = statutes_for_mode(bundle.mode_map, label);
        expect(core_statute_hit(ms.full, label, bundle.mode_map),
               "mode " + label + " cannot hit its own core");
    }

    std::mt19937_64 rng(777001ull);
    for (int trial = 0; trial < 300; ++trial) {
        const int n = 1 + static_cast<int>(rng() % 40);
        int correct = 0;
        int hits = 0;
        for (int i = 0; i < n; ++i) {
            const std::string gold = labels[rng() % labels.size()];
            const bool is_correct = rng() % 10 < 6;
            const std::string predicted =
                is_correct ? gold : labels[rng() % labels.size()];
            const auto cited =
                statutes_for_mode(bundle.mode_map, predicted).full;
            correct += predicted == gold ? 1 : 0;
            hits += core_statute_hit(cited, gold, bundle.mode_map) ? 1 : 0;
        }
        expect(hits >= correct,
               "core hit count fell below the correct count on trial " +
                   std::to_string(trial));
    }

    // The same relation on live engine runs, intact and perturbed.
    Fixture fx;
    const auto cases = demo_cases();
    const auto clean = evaluate_dataset(fx.engine(), cases, 1);
    expect(clean.core_hit_rate >= clean.accuracy,
           "core hit rate fell below accuracy on the clean run");

    MockLlmBackend perturbed(perturbed_script());
    const Engine engine(fx.bundle, fx.index, perturbed, fx.embedder,
                        RolePrompts::defaults());
    const auto report = evaluate_dataset(engine, cases, 1);
    expect(report.core_hit_rate >= report.accuracy,
           "core hit rate fell below accuracy on the perturbed run");
}

void check_golden_end_to_end() {
    const auto start = std::chrono::steady_clock::now();
    Fixture fx;
    const Engine engine = fx.engine();
    const auto cases = demo_cases();
    expect(cases.size() == 6, "demo dataset must hold six cases");

    for (const auto& record : cases) {
        const auto first = engine.run_case(record);
        const auto second = engine.run_case(record);
        expect(first.rendered == second.rendered,
               record.case_id + ": rendered reports differ between runs");
        expect(Json(first.judgment).dump() == Json(second.judgment).dump(),
               record.case_id + ": judgments differ between runs");
        expect(first.trace.to_json(false).dump() ==
                   second.trace.to_json(false).dump(),
               record.case_id + ": traces differ between runs");
        expect(record.gold_mode.has_value(),
               record.case_id + ": demo case is unlabeled");
        expect(first.judgment.final_mode == *record.gold_mode,
               record.case_id + ": wrong mode " + first.judgment.final_mode);
        expect(!first.judgment.used_fallback,
               record.case_id + ": unexpectedly fell back");
    }

    const auto clean = evaluate_dataset(engine, cases, 1);
    expect(clean.total == 6 && clean.failures == 0,
           "clean evaluation must complete all six cases");
    expect_near(clean.accuracy, 1.0, 1e-12, "clean accuracy");
    expect_near(clean.macro_f1, 1.0, 1e-12, "clean macro f1");
    expect_near(clean.core_hit_rate, 1.0, 1e-12, "clean core hit rate");

    MockLlmBackend perturbed_llm(perturbed_script());
    const Engine perturbed(fx.bundle, fx.index, perturbed_llm, fx.embedder,
                           RolePrompts::defaults());
    const auto report = evaluate_dataset(perturbed, cases, 1);
    expect(report.failures == 0, "perturbed runs must still complete");
    expect_near(report.accuracy, 4.0 / 6.0, 1e-12, "perturbed accuracy");

    double oracle_hits = 0.0;
    for (const auto& row : report.rows) {
        const auto core =
            statutes_for_mode(fx.bundle.mode_map, row.gold_mode).core;
        std::set<std::string> cited(row.predicted_statute_ids.begin(),
                                    row.predicted_statute_ids.end());
        std::set<std::string> core_set(core.begin(), core.end());
        std::vector<std::string> overlap;
        std::set_intersection(cited.begin(), cited.end(), core_set.begin(),
                              core_set.end(), std::back_inserter(overlap));
        expect(row.core_hit == !overlap.empty(),
               row.case_id + ": recorded core hit diverges from the oracle");
        oracle_hits += overlap.empty() ? 0.0 : 1.0;
    }
    expect_near(report.core_hit_rate,
                oracle_hits / static_cast<double>(report.total), 1e-12,
                "perturbed core hit rate diverges from the oracle recount");

    const auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                             std::chrono::steady_clock::now() - start)
                             .count();
    expect(elapsed < 5000, "golden end-to-end exceeded its 5 s budget");
}

void check_ablation_sweep() {
    Fixture fx;
    const auto cases = demo_cases();
    const auto results = ablation_sweep(
        [&fx](const AblationFlags& flags) { return fx.engine(flags); }, cases,
        1);

    expect(results.size() == 5, "the ladder must have five rungs");
    const std::vector<std::string> names = {
        "base", "+video_caption", "+fact_aggregation", "+assistant", "full"};
    const std::vector<std::array<bool, 4>> flag_rows = {
        {false, false, false, false},
        {true, false, false, false},
        {true, true, false, false},
        {true, true, true, false},
        {true, true, true, true}};
    for (std::size_t i = 0; i < results.size(); ++i) {
        expect(results[i].name == names[i],
               "rung " + std::to_string(i) + " is misnamed");
        const auto& f = results[i].flags;
        const std::array<bool, 4> got = {f.use_video_caption,
                                         f.use_fact_aggregation,
                                         f.use_assistant, f.use_multi_judge};
        expect(got == flag_rows[i],
               "rung " + std::to_string(i) + " carries the wrong flags");
        expect(results[i].report.total == 6 &&
                   results[i].report.failures == 0,
               "rung " + names[i] + " must complete all six cases");
    }

    const auto& rm1 = case_by_id(cases, "demo-rm1");
    const auto base_run =
        fx.engine({false, false, false, false}).run_case(rm1);
    expect(base_run.fact.narrative == rm1.accident_text,
           "base rung must pass the accident text through untouched");

    const auto concat_run =
        fx.engine({true, false, false, false}).run_case(rm1);
    expect(concat_run.fact.narrative ==
               rm1.accident_text + "\n\n" + rm1.video_description,
           "aggregation-off rung must concatenate the two texts literally");

    const auto& rm2 = case_by_id(cases, "demo-rm2");
    const auto single = fx.engine({true, true, true, false}).run_case(rm2);
    expect(single.judgment.final_mode == single.preliminary.predicted_mode,
           "single-judge mode must keep the first judge's mode");
    expect(single.judgment.final_statute_ids == single.preliminary.statute_ids,
           "single-judge mode must keep the first judge's citations");
    expect(single.judgment.report.facts == single.fact.narrative,
           "single-judge facts section must be the narrative");
    expect(single.judgment.report.issues == single.preliminary.reasoning,
           "single-judge issues section must be the first judge's reasoning");
    expect(single.judgment.report.precedent_analysis ==
               "Not examined in single-judge mode.",
           "single-judge precedent section is wrong");
    expect(single.judgment.report.decision ==
               "Responsibility mode RM2 is entered.",
           "single-judge decision line is wrong");
    bool law_skipped = false;
    bool deliberation_skipped = false;
    for (const auto& stage : single.trace.stages) {
        if (stage.stage == "law_precedent") {
            law_skipped = stage.status == "skipped";
        }
        if (stage.stage == "deliberation") {
            deliberation_skipped = stage.status == "skipped";
        }
    }
    expect(law_skipped && deliberation_skipped,
           "single-judge mode must skip the later judges");
}

void check_invariants() {
    Fixture fx;
    const auto cases = demo_cases();
    const auto& labels = mode_labels();

    for (const auto& label : labels) {
        const auto ms = statutes_for_mode(fx.bundle.mode_map, label);
        expect(!ms.core.empty(), label + " has no core provisions");
        for (const auto& id : ms.core) {
            expect(std::find(ms.full.begin(), ms.full.end(), id) !=
                       ms.full.end(),
                   label + " core provision " + id +
                       " is outside the full set");
        }
        for (const auto& id : ms.full) {
            expect(fx.bundle.corpus.find_statute(id) != nullptr,
                   label + " references unknown statute " + id);
        }
    }

    const Engine engine = fx.engine();
    const std::vector<std::string> expected_stages = {
        "facts", "retrieval", "issue", "law_precedent", "deliberation"};
    for (const auto& record : cases) {
        const auto report = engine.run_case(record);
        expect(std::find(labels.begin(), labels.end(),
                         report.judgment.final_mode) != labels.end(),
               record.case_id + " emitted an unknown mode");
        for (const auto& id : report.judgment.final_statute_ids) {
            expect(fx.bundle.corpus.find_statute(id) != nullptr,
                   record.case_id + " cites unknown statute " + id);
        }
        expect(report.trace.stages.size() == expected_stages.size(),
               record.case_id + " has the wrong stage count");
        for (std::size_t i = 0; i < expected_stages.size(); ++i) {
            expect(report.trace.stages[i].stage == expected_stages[i],
                   record.case_id + " stage order breaks at " +
                       expected_stages[i]);
            expect(report.trace.stages[i].status == "ok",
                   record.case_id + " stage " + expected_stages[i] +
                       " did not complete");
        }
    }

    const auto conflicted = engine.run_case(case_by_id(cases, "demo-rm3"));
    expect(!conflicted.fact.conflicts.empty(),
           "demo-rm3 must fuse conflicting accounts");
    for (const auto& conflict : conflicted.fact.conflicts) {
        expect(conflict.resolution == "Ta-priority",
               "conflicts must resolve in favor of the accident text");
        for (const auto& element : conflicted.fact.elements) {
            expect(!(element.kind == conflict.element_kind &&
                     element.source == "Tv"),
                   "a video value survived a conflict on " +
                       conflict.element_kind);
        }
    }

    MockScript ghost = MockScript::load(kDataDir + "/mock_script.json");
    ghost.entries.insert(
        ghost.entries.begin(),
        {"issue_judge", "",
         R"({"liability_allocation": "x", "predicted_mode": "RM1",)"
         R"( "statute_ids": ["no-such-1", "no-such-2"], "reasoning": "x"})"});
    MockLlmBackend ghost_llm(ghost);
    const Engine ghost_engine(fx.bundle, fx.index, ghost_llm, fx.embedder,
                              RolePrompts::defaults());
    const auto fallen = ghost_engine.run_case(case_by_id(cases, "demo-rm1"));
    expect(fallen.judgment.used_fallback,
           "unresolvable citations must trigger the fallback");
    expect(fallen.judgment.final_statute_ids ==
               statutes_for_mode(fx.bundle.mode_map, "RM1").full,
           "fallback must substitute the mode's standard provision set");
    expect(fallen.judgment.citations.size() ==
               fallen.judgment.final_statute_ids.size(),
           "every cited provision must resolve to a citation");
}

void check_service_contract() {
    Fixture fx;
    const Engine engine = fx.engine();
    const JudgeService service(engine);
    const auto cases = demo_cases();
    const auto& record = case_by_id(cases, "demo-rm1");
    const Json request{{"case_id", record.case_id},
                       {"accident_text", record.accident_text},
                       {"video_description", record.video_description}};

    const auto start = std::chrono::steady_clock::now();
    const auto [status, body] = service.handle_judge(request.dump());
    const auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                             std::chrono::steady_clock::now() - start)
                             .count();
    expect(status == 200, "valid request must return 200, got " +
                              std::to_string(status));
    expect(body["case_id"] == "demo-rm1", "response echoes the wrong case");
    expect(body["final_mode"] == "RM1", "response carries the wrong mode");
    expect(body["statute_ids"].is_array() && !body["statute_ids"].empty(),
           "response must cite provisions");
    expect(body["report"].is_string() &&
               body["report"].get<std::string>().find("-- Decision --") !=
                   std::string::npos,
           "response must carry the rendered report");
    expect(body["trace_id"].get<std::string>().rfind("req-", 0) == 0,
           "trace id must be derived from the request body");
    expect(elapsed < 1000, "judge round-trip exceeded its 1 s budget");

    const auto [bad_status, bad_body] = service.handle_judge("{}");
    expect(bad_status == 400, "an empty object must be rejected with 400");
    expect(bad_body.contains("error"), "rejections must name the problem");
}

struct Criterion {
    std::string name;
    std::function<void()> body;
};

}  // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {"bm25 ranking matches the hand oracle and a brute-force scorer",
         check_bm25_oracle},
        {"rerank matches a brute-force cosine sort on 120 random fixtures",
         check_rerank_oracle},
        {"metrics match independent recomputation on 1000 random matrices",
         check_metric_oracles},
        {"core statute hit rate dominates accuracy",
         check_core_hit_dominates_accuracy},
        {"six-case golden run is deterministic, correct, and degrades as "
         "designed",
         check_golden_end_to_end},
        {"ablation ladder runs end to end with the designed bypasses",
         check_ablation_sweep},
        {"structural invariants hold across runs and fixtures",
         check_invariants},
        {"judge service honors its request contract", check_service_contract},
    };

    int failed = 0;
    for (const auto& criterion : criteria) {
        try {
            criterion.body();
            std::printf("PASS: %s\n", criterion.name.c_str());
        } catch (const std::exception& e) {
            ++failed;
            std::printf("FAIL: %s: %s\n", criterion.name.c_str(), e.what());
        }
    }
    if (failed != 0) {
        std::printf("%d of %zu criteria failed\n", failed, criteria.size());
        return 1;
    }
    std::printf("all %zu criteria passed\n", criteria.size());
    return 0;
}
