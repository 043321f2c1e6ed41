#include <algorithm>
#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "roadlaw/config.hpp"
#include "roadlaw/corpus.hpp"
#include "roadlaw/eval.hpp"
#include "roadlaw/pipeline.hpp"
#include "roadlaw/retrieval.hpp"
#include "roadlaw/service.hpp"

namespace {

using roadlaw::Json;

struct IngestArgs {
    std::string statutes;
    std::string precedents;
    std::string mode_map;
    std::string out;
};

struct IndexArgs {
    std::string config;
    std::string out;
};

struct JudgeArgs {
    std::string config;
    std::string text;
    std::string video;
    std::string case_id = "cli-case";
    std::string input;
    std::string trace_dir;
    bool as_json = false;
};

struct EvalArgs {
    std::string config;
    std::string cases;
    int concurrency = 1;
    bool as_json = false;
    bool sweep = false;
    bool ara = false;
};

struct ServeArgs {
    std::string config;
    std::string host = "127.0.0.1";
    int port = 8080;
    int threads = 4;
};

int run_ingest(const IngestArgs& args) {
    roadlaw::CorpusBundle bundle;
    bundle.corpus = roadlaw::load_statute_corpus(args.statutes);
    if (!args.precedents.empty()) {
        roadlaw::LegalCorpus extra =
            roadlaw::load_statute_corpus(args.precedents);
        for (auto& s : extra.statutes) {
            bundle.corpus.statutes.push_back(std::move(s));
        }
        for (auto& p : extra.precedents) {
            bundle.corpus.precedents.push_back(std::move(p));
        }
    }
    bundle.corpus.validate();
    bundle.mode_map = roadlaw::load_mode_map(args.mode_map, bundle.corpus);
    bundle.save(args.out);
    std::cout << "wrote " << args.out << ": "
              << bundle.corpus.statutes.size() << " statutes, "
              << bundle.corpus.precedents.size() << " precedents, "
              << bundle.mode_map.modes.size() << " modes\n";
    return 0;
}

int run_index(const IndexArgs& args) {
    const auto config = roadlaw::EngineConfig::load(args.config);
    const auto bundle = roadlaw::load_corpus_bundle(config);
    const auto index =
        roadlaw::InvertedIndex::build(bundle.corpus, config.retrieval);
    index.save(args.out);
    std::cout << "wrote " << args.out << ": " << index.doc_count()
              << " documents, avg length " << index.avg_doc_length() << "\n";
    return 0;
}

int run_judge(const JudgeArgs& args) {
    auto config = roadlaw::EngineConfig::load(args.config);
    if (!args.trace_dir.empty()) {
        config.runner.trace_dir = args.trace_dir;
    }
    const auto runtime = roadlaw::make_runtime(config);
    const auto engine = runtime.make_engine();

    roadlaw::CaseRecord record;
    if (!args.input.empty()) {
        const auto cases = roadlaw::load_case_dataset(args.input);
        const auto it = std::find_if(cases.begin(), cases.end(),
                                     [&args](const roadlaw::CaseRecord& c) {
                                         return c.case_id == args.case_id;
                                     });
        if (it == cases.end()) {
            throw roadlaw::ValidationError("case '" + args.case_id +
                                           "' not found in " + args.input);
        }
        record = *it;
    } else {
        if (args.text.empty()) {
            throw roadlaw::ValidationError(
                "judge needs --text or --input with --case-id");
        }
        record = {args.case_id, args.text, args.video, std::nullopt,
                  std::nullopt, std::nullopt};
    }

    const auto result = engine.run_case(record);
    if (args.as_json) {
        std::cout << Json{{"case_id", record.case_id},
                          {"judgment", result.judgment}}
                         .dump(2)
                  << "\n";
    } else {
        std::cout << result.rendered;
    }
    return 0;
}

int run_eval(const EvalArgs& args) {
    const auto config = roadlaw::EngineConfig::load(args.config);
    const auto runtime = roadlaw::make_runtime(config);
    const auto cases = roadlaw::load_case_dataset(args.cases);

    if (args.ara) {
        const auto report =
            roadlaw::evaluate_ara(runtime.make_engine(), cases);
        if (args.as_json) {
            std::cout << report.to_json().dump(2) << "\n";
        } else {
            std::printf("answer selection: %d/%d correct (%.3f), %d failed\n",
                        report.correct, report.total, report.accuracy,
                        report.failures);
        }
        return 0;
    }

    if (args.sweep) {
        const auto results = roadlaw::ablation_sweep(
            [&runtime](const roadlaw::AblationFlags& flags) {
                return runtime.make_engine(flags);
            },
            cases, args.concurrency);
        if (args.as_json) {
            Json out = Json::array();
            for (const auto& r : results) {
                out.push_back(Json{{"name", r.name},
                                   {"flags", r.flags},
                                   {"report", r.report.to_json()}});
            }
            std::cout << out.dump(2) << "\n";
        } else {
            for (const auto& r : results) {
                std::cout << "=== " << r.name << " ===\n"
                          << r.report.to_table() << "\n";
            }
        }
        return 0;
    }

    const auto report = roadlaw::evaluate_dataset(runtime.make_engine(), cases,
                                                  args.concurrency);
    if (args.as_json) {
        std::cout << report.to_json().dump(2) << "\n";
    } else {
        std::cout << report.to_table();
    }
    return 0;
}

int run_serve(const ServeArgs& args) {
    const auto config = roadlaw::EngineConfig::load(args.config);
    const auto runtime = roadlaw::make_runtime(config);
    const auto engine = runtime.make_engine();
    roadlaw::JudgeService service(engine, args.threads);
    std::cout << "listening on " << args.host << ":" << args.port << "\n";
    if (!service.listen(args.host, args.port)) {
        std::cerr << "failed to bind " << args.host << ":" << args.port
                  << "\n";
        return 1;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"traffic accident adjudication engine"};
    app.require_subcommand(1);

    IngestArgs ingest_args;
    auto* ingest = app.add_subcommand(
        "ingest", "normalize corpus files into a validated bundle");
    ingest->add_option("--statutes", ingest_args.statutes, "statutes JSONL")
        ->required();
    ingest->add_option("--precedents", ingest_args.precedents,
                       "precedents JSONL");
    ingest->add_option("--mode-map", ingest_args.mode_map,
                       "responsibility mode map JSON")
        ->required();
    ingest->add_option("--out", ingest_args.out, "output bundle path")
        ->required();

    IndexArgs index_args;
    auto* index = app.add_subcommand(
        "index", "build the retrieval index and save it as an artifact");
    index->add_option("--config", index_args.config, "engine config JSON")
        ->required();
    index->add_option("--out", index_args.out, "output index path")
        ->required();

    JudgeArgs judge_args;
    auto* judge = app.add_subcommand("judge", "adjudicate a single case");
    judge->add_option("--config", judge_args.config, "engine config JSON")
        ->required();
    judge->add_option("--text", judge_args.text, "accident description");
    judge->add_option("--video", judge_args.video,
                      "video-derived description");
    judge->add_option("--case-id", judge_args.case_id, "case identifier");
    judge->add_option("--input", judge_args.input,
                      "case dataset JSONL to pick --case-id from");
    judge->add_option("--trace-dir", judge_args.trace_dir,
                      "write the stage trace under this directory");
    judge->add_flag("--json", judge_args.as_json, "print the judgment as JSON");

    EvalArgs eval_args;
    auto* eval = app.add_subcommand("eval", "score a labeled case dataset");
    eval->add_option("--config", eval_args.config, "engine config JSON")
        ->required();
    eval->add_option("--cases", eval_args.cases, "case dataset JSONL")
        ->required();
    eval->add_option("--concurrency", eval_args.concurrency,
                     "worker threads for case runs");
    eval->add_flag("--json", eval_args.as_json, "print the report as JSON");
    eval->add_flag("--sweep", eval_args.sweep,
                   "run the component ablation ladder");
    eval->add_flag("--ara", eval_args.ara,
                   "score multiple-choice answer selection instead");

    ServeArgs serve_args;
    auto* serve = app.add_subcommand("serve", "run the JSON HTTP service");
    serve->add_option("--config", serve_args.config, "engine config JSON")
        ->required();
    serve->add_option("--host", serve_args.host, "bind address");
    serve->add_option("--port", serve_args.port, "bind port");
    serve->add_option("--threads", serve_args.threads, "worker threads");

    try {
        app.parse(argc, argv);
        if (app.got_subcommand(ingest)) {
            return run_ingest(ingest_args);
        }
        if (app.got_subcommand(index)) {
            return run_index(index_args);
        }
        if (app.got_subcommand(judge)) {
            return run_judge(judge_args);
        }
        if (app.got_subcommand(eval)) {
            return run_eval(eval_args);
        }
        if (app.got_subcommand(serve)) {
            return run_serve(serve_args);
        }
        return 2;
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const roadlaw::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const roadlaw::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const roadlaw::LookupError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
