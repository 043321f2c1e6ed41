#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <string>
#include <unistd.h>

#include "roadlaw/config.hpp"
#include "roadlaw/eval.hpp"

using namespace roadlaw;

namespace {

const std::string kSourceDir = ROADLAW_SOURCE_DIR;
const std::string kConfigPath = kSourceDir + "/configs/mock.json";

std::string temp_dir(const std::string& stem) {
    static int counter = 0;
    const auto dir = std::filesystem::temp_directory_path() /
                     (stem + "_" + std::to_string(::getpid()) + "_" +
                      std::to_string(counter++));
    std::filesystem::create_directories(dir);
    return dir.string();
}

}  // namespace

TEST_CASE("the shipped mock config resolves paths against its directory") {
    const EngineConfig config = EngineConfig::load(kConfigPath);
    CHECK(config.statutes_path == kSourceDir + "/data/statutes.jsonl");
    CHECK(config.precedents_path == kSourceDir + "/data/precedents.jsonl");
    CHECK(config.mode_map_path == kSourceDir + "/data/mode_map.json");
    CHECK(config.bundle_path.empty());
    CHECK(config.prompts_dir == kSourceDir + "/prompts");
    CHECK(config.llm.type == "mock");
    CHECK(config.llm.script_path == kSourceDir + "/data/mock_script.json");
    CHECK(config.embedding.type == "hash");
    CHECK(config.embedding.dimension == 64);
    CHECK(config.retrieval.k1 == 1.2);
    CHECK(config.retrieval.b == 0.75);
    CHECK(config.retrieval.top_k_coarse == 100);
    CHECK(config.retrieval.top_k_rerank == 10);
    CHECK(config.ablation.use_video_caption);
    CHECK(config.ablation.use_multi_judge);
    CHECK(config.runner.trace_dir.empty());
    CHECK(config.agents.repair_budget == 2);
}

TEST_CASE("an empty config object falls back to offline defaults") {
    const EngineConfig config = EngineConfig::from_json(Json::object());
    CHECK(config.llm.type == "mock");
    CHECK(config.embedding.type == "hash");
    CHECK(config.prompts_dir.empty());
    CHECK(config.retrieval.top_k_coarse == 100);
    CHECK(config.agents.backend_attempts == 2);
}

TEST_CASE("config loading rejects junk and bad retrieval parameters") {
    const std::string dir = temp_dir("roadlaw_cfg");
    write_text_file(dir + "/bad.json", "[1, 2, 3]");
    CHECK_THROWS_AS(EngineConfig::load(dir + "/bad.json"), ValidationError);

    Json j = Json::object();
    j["retrieval"] = Json{{"k1", 1.2}, {"b", 4.0}};
    CHECK_THROWS_AS(EngineConfig::from_json(j), ValidationError);
}

TEST_CASE("backend factories honor types and report unknown ones") {
    BackendConfig mock;
    mock.type = "mock";
    CHECK(make_llm_backend(mock) != nullptr);

    BackendConfig scripted = mock;
    scripted.script_path = kSourceDir + "/data/mock_script.json";
    CHECK(make_llm_backend(scripted) != nullptr);

    BackendConfig hash;
    hash.type = "hash";
    hash.dimension = 16;
    const auto embedder = make_embedding_backend(hash);
    CHECK(embedder->dimension() == 16u);

    BackendConfig unknown;
    unknown.type = "quantum";
    CHECK_THROWS_AS(make_llm_backend(unknown), ValidationError);
    CHECK_THROWS_AS(make_embedding_backend(unknown), ValidationError);
}

TEST_CASE("http backends require an endpoint from config or environment") {
    ::unsetenv("LLM_ENDPOINT");
    ::unsetenv("EMBED_ENDPOINT");
    BackendConfig http;
    http.type = "http";
    CHECK_THROWS_AS(make_llm_backend(http), ValidationError);
    CHECK_THROWS_AS(make_embedding_backend(http), ValidationError);

    http.endpoint = "http://127.0.0.1:1/v1/complete";
    CHECK(make_llm_backend(http) != nullptr);  // constructed, not contacted

    http.endpoint.clear();
    ::setenv("LLM_ENDPOINT", "http://127.0.0.1:1/v1/complete", 1);
    ::setenv("EMBED_ENDPOINT", "http://127.0.0.1:1/v1/embed", 1);
    CHECK(make_llm_backend(http) != nullptr);
    CHECK(make_embedding_backend(http) != nullptr);
    ::unsetenv("LLM_ENDPOINT");
    ::unsetenv("EMBED_ENDPOINT");
}

TEST_CASE("env_or prefers non-empty environment values") {
    ::setenv("ROADLAW_TEST_ENV", "from-env", 1);
    CHECK(env_or("ROADLAW_TEST_ENV", "fallback") == "from-env");
    ::setenv("ROADLAW_TEST_ENV", "", 1);
    CHECK(env_or("ROADLAW_TEST_ENV", "fallback") == "fallback");
    ::unsetenv("ROADLAW_TEST_ENV");
    CHECK(env_or("ROADLAW_TEST_ENV", "fallback") == "fallback");
}

TEST_CASE("corpus bundles load from parts or from a single artifact") {
    const EngineConfig config = EngineConfig::load(kConfigPath);
    const CorpusBundle parts = load_corpus_bundle(config);
    CHECK(parts.corpus.statutes.size() == 14);
    CHECK(parts.corpus.precedents.size() == 6);

    const std::string dir = temp_dir("roadlaw_bundle");
    const std::string bundle_path = dir + "/bundle.json";
    parts.save(bundle_path);

    EngineConfig bundled = config;
    bundled.bundle_path = bundle_path;
    const CorpusBundle from_artifact = load_corpus_bundle(bundled);
    CHECK(from_artifact.to_json().dump() == parts.to_json().dump());

    EngineConfig empty;
    CHECK_THROWS_AS(load_corpus_bundle(empty), ValidationError);
}

TEST_CASE("a prebuilt index artifact is honored over a fresh build") {
    EngineConfig config = EngineConfig::load(kConfigPath);
    const Runtime fresh = make_runtime(config);

    const std::string dir = temp_dir("roadlaw_idx");
    const std::string index_path = dir + "/index.json";
    fresh.index.save(index_path);

    config.index_path = index_path;
    const Runtime loaded = make_runtime(config);
    CHECK(loaded.index.to_json().dump() == fresh.index.to_json().dump());
}

TEST_CASE("a runtime from the mock config adjudicates end to end") {
    const Runtime rt = make_runtime(EngineConfig::load(kConfigPath));
    const Engine engine = rt.make_engine();
    const auto cases =
        load_case_dataset(kSourceDir + "/data/cases_demo.jsonl");
    const EvalReport report = evaluate_dataset(engine, cases);
    CHECK(report.accuracy == 1.0);

    // Flag-specific engines share the same backends.
    AblationFlags flags;
    flags.use_multi_judge = false;
    const Engine single = rt.make_engine(flags);
    CHECK(!single.flags().use_multi_judge);
    CHECK(single.run_case(cases[0]).judgment.final_mode == "RM1");
}

TEST_CASE("prompt files on disk stay byte-identical to the embedded text") {
    // The prompts directory is generated from the embedded defaults; a
    // drifted file would make configured and default runs diverge silently.
    const std::filesystem::path dir = kSourceDir + "/prompts";
    for (Role role : all_roles()) {
        const auto file = dir / (role_name(role) + ".txt");
        INFO(file.string());
        REQUIRE(std::filesystem::exists(file));
        CHECK(read_text_file(file.string()) ==
              RolePrompts::defaults().prompt(role));
    }
    const RolePrompts loaded = RolePrompts::load_dir(dir);
    for (Role role : all_roles()) {
        CHECK(loaded.prompt(role) == RolePrompts::defaults().prompt(role));
    }
}

TEST_CASE("prompt overrides must keep their role marker") {
    const std::string dir = temp_dir("roadlaw_prompts");
    write_text_file(dir + "/issue_judge.txt",
                    role_marker(Role::issue_judge) +
                        "\nCustom classification instructions.\n");
    const RolePrompts prompts = RolePrompts::load_dir(dir);
    CHECK(prompts.prompt(Role::issue_judge).find("Custom classification") !=
          std::string::npos);
    // Roles without a file keep the defaults.
    CHECK(prompts.prompt(Role::ara_selector) ==
          RolePrompts::defaults().prompt(Role::ara_selector));

    write_text_file(dir + "/ara_selector.txt", "missing marker\n");
    CHECK_THROWS_AS(RolePrompts::load_dir(dir), ValidationError);
}

TEST_CASE("agent options parse with partial fields") {
    const AgentOptions options =
        Json::parse(R"({"repair_budget": 5})").get<AgentOptions>();
    CHECK(options.repair_budget == 5);
    CHECK(options.backend_attempts == 2);
    CHECK(options.max_output_tokens == 1024);
}
