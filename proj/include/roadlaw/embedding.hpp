#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

namespace roadlaw {

/// Behavioral contract for text embedding backends: fixed dimension per
/// backend, deterministic output for identical input. Implementations must be
/// usable from multiple workers concurrently.
class EmbeddingBackend {
  public:
    virtual ~EmbeddingBackend() = default;

    virtual std::size_t dimension() const = 0;

    virtual std::vector<double> embed(const std::string& text) = 0;

    virtual std::vector<std::vector<double>> embed_batch(
        const std::vector<std::string>& texts) {
        std::vector<std::vector<double>> out;
        out.reserve(texts.size());
        for (const auto& t : texts) {
            out.push_back(embed(t));
        }
        return out;
    }
};

/// Cosine similarity; defined as 0 when either vector has zero norm.
inline double cosine_similarity(const std::vector<double>& a,
                                const std::vector<double>& b) {
    double dot = 0.0;
    double na = 0.0;
    double nb = 0.0;
    const std::size_t n = a.size() < b.size() ? a.size() : b.size();
    for (std::size_t i = 0; i < n; ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na == 0.0 || nb == 0.0) {
        return 0.0;
    }
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

}  // namespace roadlaw
