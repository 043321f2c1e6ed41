#pragma once

#include <memory>
#include <string>
#include <vector>

#include <httplib.h>

#include "roadlaw/embedding.hpp"
#include "roadlaw/error.hpp"
#include "roadlaw/llm.hpp"
#include "roadlaw/util.hpp"

namespace roadlaw {

namespace detail {

struct EndpointParts {
    std::string base;  // scheme://host[:port]
    std::string path;  // starts with '/'
};

inline EndpointParts split_endpoint(const std::string& endpoint) {
    const std::size_t scheme = endpoint.find("://");
    if (scheme == std::string::npos) {
        throw ValidationError("endpoint must include a scheme: " + endpoint);
    }
    const std::size_t slash = endpoint.find('/', scheme + 3);
    if (slash == std::string::npos) {
        return {endpoint, "/"};
    }
    return {endpoint.substr(0, slash), endpoint.substr(slash)};
}

// A fresh client per request keeps the backends safe under concurrent use;
// httplib clients are not thread safe when shared.
inline httplib::Result post_json(const EndpointParts& endpoint,
                                 const std::string& api_key,
                                 const Json& payload, int timeout_s) {
    httplib::Client client(endpoint.base);
    client.set_connection_timeout(timeout_s, 0);
    client.set_read_timeout(timeout_s, 0);
    client.set_write_timeout(timeout_s, 0);
    httplib::Headers headers;
    if (!api_key.empty()) {
        headers.emplace("Authorization", "Bearer " + api_key);
    }
    return client.Post(endpoint.path, headers, payload.dump(),
                       "application/json");
}

inline Json parse_backend_json(const httplib::Result& res,
                               const std::string& what) {
    if (!res) {
        throw BackendError(what + ": request failed: " +
                           httplib::to_string(res.error()));
    }
    if (res->status != 200) {
        throw BackendError(what + ": HTTP " + std::to_string(res->status) +
                           ": " + utf8_prefix(res->body, 200));
    }
    const Json body = Json::parse(res->body, nullptr, /*allow_exceptions=*/false);
    if (body.is_discarded() || !body.is_object()) {
        throw BackendError(what + ": response is not a JSON object");
    }
    return body;
}

}  // namespace detail

/// Completion backend over JSON HTTP.
/// Request:  {"system": str, "user": str, "temperature": num, "max_tokens": int}
/// Response: {"text": str}
class HttpLlmBackend : public LlmBackend {
public:
    HttpLlmBackend(const std::string& endpoint, std::string api_key = "",
                   int timeout_s = 60)
        : endpoint_(detail::split_endpoint(endpoint)),
          api_key_(std::move(api_key)),
          timeout_s_(timeout_s) {}

    std::string complete(const ChatExchange& exchange) override {
        const Json payload{{"system", exchange.system_prompt},
                           {"user", exchange.user_message},
                           {"temperature", exchange.temperature},
                           {"max_tokens", exchange.max_output_tokens}};
        const auto res =
            detail::post_json(endpoint_, api_key_, payload, timeout_s_);
        const Json body = detail::parse_backend_json(res, "llm backend");
        if (!body.contains("text") || !body["text"].is_string()) {
            throw BackendError("llm backend: response lacks string 'text'");
        }
        return body["text"].get<std::string>();
    }

private:
    detail::EndpointParts endpoint_;
    std::string api_key_;
    int timeout_s_;
};

/// Embedding backend over JSON HTTP.
/// Request:  {"texts": [str]}
/// Response: {"vectors": [[num]]}, one vector per text, fixed dimension.
class HttpEmbeddingBackend : public EmbeddingBackend {
public:
    HttpEmbeddingBackend(const std::string& endpoint, int dimension,
                         std::string api_key = "", int timeout_s = 60)
        : endpoint_(detail::split_endpoint(endpoint)),
          api_key_(std::move(api_key)),
          dimension_(dimension),
          timeout_s_(timeout_s) {
        if (dimension < 1) {
            throw ValidationError("embedding dimension must be positive");
        }
    }

    std::size_t dimension() const override {
        return static_cast<std::size_t>(dimension_);
    }

    std::vector<double> embed(const std::string& text) override {
        return embed_batch({text}).front();
    }

    std::vector<std::vector<double>> embed_batch(
        const std::vector<std::string>& texts) override {
        const Json payload{{"texts", texts}};
        const auto res =
            detail::post_json(endpoint_, api_key_, payload, timeout_s_);
        const Json body = detail::parse_backend_json(res, "embedding backend");
        if (!body.contains("vectors") || !body["vectors"].is_array()) {
            throw BackendError(
                "embedding backend: response lacks array 'vectors'");
        }
        std::vector<std::vector<double>> vectors;
        vectors.reserve(body["vectors"].size());
        for (const auto& v : body["vectors"]) {
            if (!v.is_array() ||
                v.size() != static_cast<std::size_t>(dimension_)) {
                throw BackendError(
                    "embedding backend: vector dimension mismatch");
            }
            vectors.push_back(v.get<std::vector<double>>());
        }
        if (vectors.size() != texts.size()) {
            throw BackendError(
                "embedding backend: got " + std::to_string(vectors.size()) +
                " vectors for " + std::to_string(texts.size()) + " texts");
        }
        return vectors;
    }

private:
    detail::EndpointParts endpoint_;
    std::string api_key_;
    int dimension_;
    int timeout_s_;
};

}  // namespace roadlaw
