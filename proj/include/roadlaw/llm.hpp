#pragma once

#include <string>

#include "roadlaw/error.hpp"

namespace roadlaw {

struct ChatExchange {
    std::string system_prompt;
    std::string user_message;
    int max_output_tokens = 1024;
    double temperature = 0.0;
};

/// Text-in, text-out completion backend. Implementations must be safe to
/// call from multiple threads.
class LlmBackend {
public:
    virtual ~LlmBackend() = default;

    /// Returns the raw completion text. Throws BackendError on failure.
    virtual std::string complete(const ChatExchange& exchange) = 0;
};

/// Retries transient backend failures up to max_attempts total calls.
/// Rethrows the last BackendError when the budget is exhausted.
inline std::string complete_with_retries(LlmBackend& backend,
                                         const ChatExchange& exchange,
                                         int max_attempts = 3) {
    if (max_attempts < 1) {
        throw ValidationError("max_attempts must be at least 1");
    }
    for (int attempt = 1;; ++attempt) {
        try {
            return backend.complete(exchange);
        } catch (const BackendError&) {
            if (attempt >= max_attempts) {
                throw;
            }
        }
    }
}

}  // namespace roadlaw
