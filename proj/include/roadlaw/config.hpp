#pragma once

#include <cstdlib>
#include <filesystem>
#include <memory>
#include <string>
#include <utility>

#include "roadlaw/agents.hpp"
#include "roadlaw/corpus.hpp"
#include "roadlaw/http_backends.hpp"
#include "roadlaw/mock.hpp"
#include "roadlaw/pipeline.hpp"
#include "roadlaw/prompts.hpp"
#include "roadlaw/retrieval.hpp"
#include "roadlaw/util.hpp"

namespace roadlaw {

inline void to_json(Json& j, const AgentOptions& o) {
    j = Json{{"repair_budget", o.repair_budget},
             {"backend_attempts", o.backend_attempts},
             {"max_output_tokens", o.max_output_tokens}};
}

inline void from_json(const Json& j, AgentOptions& o) {
    o.repair_budget = j.value("repair_budget", 2);
    o.backend_attempts = j.value("backend_attempts", 2);
    o.max_output_tokens = j.value("max_output_tokens", 1024);
}

/// One backend slot. Types: "mock" (scripted chat), "hash" (token-hash
/// embeddings), "http" (remote JSON endpoint). For "http", empty endpoint
/// and api_key fall back to LLM_ENDPOINT / LLM_API_KEY / EMBED_ENDPOINT.
struct BackendConfig {
    std::string type;
    std::string endpoint;
    std::string api_key;
    std::string script_path;  // mock only
    int dimension = 64;       // embedding only
    int timeout_s = 60;
};

inline void to_json(Json& j, const BackendConfig& b) {
    j = Json{{"type", b.type},
             {"endpoint", b.endpoint},
             {"api_key", b.api_key},
             {"script", b.script_path},
             {"dimension", b.dimension},
             {"timeout_s", b.timeout_s}};
}

inline void from_json(const Json& j, BackendConfig& b) {
    b.type = j.value("type", "");
    b.endpoint = j.value("endpoint", "");
    b.api_key = j.value("api_key", "");
    b.script_path = j.value("script", "");
    b.dimension = j.value("dimension", 64);
    b.timeout_s = j.value("timeout_s", 60);
}

struct EngineConfig {
    std::string statutes_path;
    std::string precedents_path;  // optional second corpus file
    std::string mode_map_path;
    std::string bundle_path;      // normalized bundle; overrides the three above
    std::string index_path;       // prebuilt index artifact; built fresh if empty
    std::string prompts_dir;      // empty keeps the embedded prompts
    Bm25Params retrieval;
    BackendConfig llm{.type = "mock"};
    BackendConfig embedding{.type = "hash"};
    AblationFlags ablation;
    RunnerConfig runner;
    AgentOptions agents;

    static EngineConfig from_json(const Json& j) {
        EngineConfig c;
        const Json corpus = j.value("corpus", Json::object());
        c.statutes_path = corpus.value("statutes", "");
        c.precedents_path = corpus.value("precedents", "");
        c.mode_map_path = corpus.value("mode_map", "");
        c.bundle_path = corpus.value("bundle", "");
        c.index_path = j.value("index", "");
        c.prompts_dir = j.value("prompts_dir", "");
        if (j.contains("retrieval")) {
            c.retrieval = j["retrieval"].get<Bm25Params>();
        }
        const Json backends = j.value("backends", Json::object());
        if (backends.contains("llm")) {
            c.llm = backends["llm"].get<BackendConfig>();
        }
        if (backends.contains("embedding")) {
            c.embedding = backends["embedding"].get<BackendConfig>();
        }
        if (j.contains("ablation")) {
            c.ablation = j["ablation"].get<AblationFlags>();
        }
        if (j.contains("runner")) {
            c.runner = j["runner"].get<RunnerConfig>();
        }
        if (j.contains("agents")) {
            c.agents = j["agents"].get<AgentOptions>();
        }
        c.retrieval.validate();
        return c;
    }

    /// Reads a config file; relative paths resolve against its directory.
    static EngineConfig load(const std::string& path) {
        const Json j = Json::parse(read_text_file(path), nullptr,
                                   /*allow_exceptions=*/false);
        if (j.is_discarded() || !j.is_object()) {
            throw ValidationError("config is not a JSON object: " + path);
        }
        EngineConfig c = from_json(j);
        const auto dir = std::filesystem::path(path).parent_path();
        const auto resolve = [&dir](std::string& p) {
            if (!p.empty() && std::filesystem::path(p).is_relative()) {
                p = (dir / p).lexically_normal().string();
            }
        };
        resolve(c.statutes_path);
        resolve(c.precedents_path);
        resolve(c.mode_map_path);
        resolve(c.bundle_path);
        resolve(c.index_path);
        resolve(c.prompts_dir);
        resolve(c.llm.script_path);
        resolve(c.runner.trace_dir);
        return c;
    }
};

inline std::string env_or(const char* name, const std::string& fallback) {
    const char* v = std::getenv(name);
    return (v != nullptr && *v != '\0') ? std::string(v) : fallback;
}

inline std::unique_ptr<LlmBackend> make_llm_backend(const BackendConfig& b) {
    if (b.type == "mock" || b.type.empty()) {
        if (b.script_path.empty()) {
            return std::make_unique<MockLlmBackend>();
        }
        return std::make_unique<MockLlmBackend>(
            MockScript::load(b.script_path));
    }
    if (b.type == "http") {
        const std::string endpoint = b.endpoint.empty()
                                         ? env_or("LLM_ENDPOINT", "")
                                         : b.endpoint;
        if (endpoint.empty()) {
            throw ValidationError(
                "http llm backend needs an endpoint (config or "
                "LLM_ENDPOINT)");
        }
        const std::string key =
            b.api_key.empty() ? env_or("LLM_API_KEY", "") : b.api_key;
        return std::make_unique<HttpLlmBackend>(endpoint, key, b.timeout_s);
    }
    throw ValidationError("unknown llm backend type '" + b.type + "'");
}

inline std::unique_ptr<EmbeddingBackend> make_embedding_backend(
    const BackendConfig& b) {
    if (b.type == "hash" || b.type.empty()) {
        return std::make_unique<HashEmbedder>(b.dimension);
    }
    if (b.type == "http") {
        const std::string endpoint = b.endpoint.empty()
                                         ? env_or("EMBED_ENDPOINT", "")
                                         : b.endpoint;
        if (endpoint.empty()) {
            throw ValidationError(
                "http embedding backend needs an endpoint (config or "
                "EMBED_ENDPOINT)");
        }
        const std::string key =
            b.api_key.empty() ? env_or("LLM_API_KEY", "") : b.api_key;
        return std::make_unique<HttpEmbeddingBackend>(endpoint, b.dimension,
                                                      key, b.timeout_s);
    }
    throw ValidationError("unknown embedding backend type '" + b.type + "'");
}

inline CorpusBundle load_corpus_bundle(const EngineConfig& config) {
    if (!config.bundle_path.empty()) {
        return CorpusBundle::load(config.bundle_path);
    }
    if (config.statutes_path.empty() || config.mode_map_path.empty()) {
        throw ValidationError(
            "config needs either corpus.bundle or corpus.statutes plus "
            "corpus.mode_map");
    }
    CorpusBundle bundle;
    bundle.corpus = load_statute_corpus(config.statutes_path);
    if (!config.precedents_path.empty()) {
        LegalCorpus extra = load_statute_corpus(config.precedents_path);
        for (auto& s : extra.statutes) {
            bundle.corpus.statutes.push_back(std::move(s));
        }
        for (auto& p : extra.precedents) {
            bundle.corpus.precedents.push_back(std::move(p));
        }
    }
    bundle.corpus.validate();
    bundle.mode_map = load_mode_map(config.mode_map_path, bundle.corpus);
    return bundle;
}

/// Owns everything an Engine borrows. Engines made here copy the corpus,
/// index, and prompts but share the two backends, so sweep configurations
/// stay cheap.
struct Runtime {
    CorpusBundle bundle;
    InvertedIndex index;
    RolePrompts prompts = RolePrompts::defaults();
    AblationFlags ablation;
    RunnerConfig runner;
    AgentOptions agent_options;
    std::unique_ptr<LlmBackend> llm;
    std::unique_ptr<EmbeddingBackend> embedder;

    Engine make_engine() const { return make_engine(ablation); }

    Engine make_engine(const AblationFlags& flags) const {
        return Engine(bundle, index, *llm, *embedder, prompts, flags, runner,
                      agent_options);
    }
};

inline Runtime make_runtime(const EngineConfig& config) {
    Runtime rt;
    rt.bundle = load_corpus_bundle(config);
    if (!config.index_path.empty()) {
        rt.index = InvertedIndex::load(config.index_path);
    } else {
        rt.index = InvertedIndex::build(rt.bundle.corpus, config.retrieval);
    }
    rt.prompts = config.prompts_dir.empty()
                     ? RolePrompts::defaults()
                     : RolePrompts::load_dir(config.prompts_dir);
    rt.ablation = config.ablation;
    rt.runner = config.runner;
    rt.agent_options = config.agents;
    rt.llm = make_llm_backend(config.llm);
    rt.embedder = make_embedding_backend(config.embedding);
    return rt;
}

}  // namespace roadlaw
