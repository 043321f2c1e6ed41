#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "roadlaw/corpus.hpp"
#include "roadlaw/embedding.hpp"
#include "roadlaw/error.hpp"
#include "roadlaw/tokenize.hpp"
#include "roadlaw/util.hpp"

namespace roadlaw {

/// Okapi BM25 parameters. k1/b default to the canonical free-parameter
/// values; coarse and re-rank depths follow the two-stage retrieval design
/// (lexical top-100, semantic top-10).
struct Bm25Params {
    double k1 = 1.2;
    double b = 0.75;
    int top_k_coarse = 100;
    int top_k_rerank = 10;

    void validate() const {
        if (!(k1 >= 0.0) || !std::isfinite(k1)) {
            throw ValidationError("k1 must be a finite real >= 0");
        }
        if (!(b >= 0.0 && b <= 1.0)) {
            throw ValidationError("b must be in [0, 1]");
        }
        if (top_k_coarse <= 0 || top_k_rerank <= 0) {
            throw ValidationError("top_k values must be positive");
        }
        if (top_k_rerank > top_k_coarse) {
            throw ValidationError("top_k_rerank must be <= top_k_coarse");
        }
    }
};

inline void to_json(Json& j, const Bm25Params& p) {
    j = Json{{"k1", p.k1},
             {"b", p.b},
             {"top_k_coarse", p.top_k_coarse},
             {"top_k_rerank", p.top_k_rerank}};
}

inline void from_json(const Json& j, Bm25Params& p) {
    p.k1 = j.value("k1", 1.2);
    p.b = j.value("b", 0.75);
    p.top_k_coarse = j.value("top_k_coarse", 100);
    p.top_k_rerank = j.value("top_k_rerank", 10);
}

enum class DocKind { statute, precedent };

inline std::string to_string(DocKind k) {
    return k == DocKind::statute ? "statute" : "precedent";
}

inline DocKind doc_kind_from_string(const std::string& s) {
    if (s == "statute") {
        return DocKind::statute;
    }
    if (s == "precedent") {
        return DocKind::precedent;
    }
    throw ValidationError("unknown doc kind: " + s);
}

enum class RankStage { coarse, reranked };

struct RankedDoc {
    std::string doc_id;
    double score = 0.0;
    RankStage stage = RankStage::coarse;
};

/// Input document for index construction.
struct IndexDoc {
    std::string id;
    DocKind kind = DocKind::statute;
    std::string text;
};

/// The text a document contributes to the index: every searchable field,
/// space-joined, in a fixed field order.
inline std::string index_text(const Statute& s) {
    std::string out = s.law_name + " " + s.article + " " + s.text;
    for (const auto& t : s.tags) {
        out += " " + t;
    }
    return out;
}

inline std::string index_text(const Precedent& p) {
    std::string out = p.title + " " + p.fact_summary + " " + p.holding;
    for (const auto& t : p.tags) {
        out += " " + t;
    }
    return out;
}

inline constexpr int kIndexFormatVersion = 1;

/// Immutable inverted index with Okapi BM25 scoring.
///
/// Scoring follows the standard formula
///   score(D, q) = sum_t IDF(t) * tf * (k1 + 1) / (tf + k1 * (1 - b + b * len/avglen))
/// with the +1-smoothed IDF(t) = ln((N - df + 0.5) / (df + 0.5) + 1), which is
/// always positive. Query terms are scored per occurrence, so a term repeated
/// in the query contributes once per repetition.
class InvertedIndex {
  public:
    struct Posting {
        std::string doc_id;
        int tf = 0;
    };

    struct StoredDoc {
        DocKind kind = DocKind::statute;
        std::string text;
        int length = 0;  // token count
    };

    static InvertedIndex build(std::vector<IndexDoc> docs, Bm25Params params) {
        params.validate();
        InvertedIndex index;
        index.params_ = params;
        for (auto& d : docs) {
            if (index.docs_.count(d.id)) {
                throw ValidationError("duplicate doc id: " + d.id);
            }
            const auto terms = tokenize(d.text);
            std::map<std::string, int> tf;
            for (const auto& t : terms) {
                ++tf[t];
            }
            for (const auto& [term, count] : tf) {
                index.postings_[term].push_back({d.id, count});
            }
            index.docs_.emplace(
                d.id, StoredDoc{d.kind, std::move(d.text),
                                static_cast<int>(terms.size())});
        }
        // std::map iteration already visits doc ids in ascending order, so
        // postings come out sorted; kept explicit as the stored invariant.
        for (auto& [term, list] : index.postings_) {
            std::sort(list.begin(), list.end(),
                      [](const Posting& a, const Posting& b) {
                          return a.doc_id < b.doc_id;
                      });
        }
        long total = 0;
        for (const auto& [id, doc] : index.docs_) {
            total += doc.length;
        }
        index.avg_doc_length_ =
            index.docs_.empty()
                ? 0.0
                : static_cast<double>(total) / static_cast<double>(index.docs_.size());
        return index;
    }

    static InvertedIndex build(const LegalCorpus& corpus, Bm25Params params) {
        std::vector<IndexDoc> docs;
        docs.reserve(corpus.statutes.size() + corpus.precedents.size());
        for (const auto& s : corpus.statutes) {
            docs.push_back({s.id, DocKind::statute, index_text(s)});
        }
        for (const auto& p : corpus.precedents) {
            docs.push_back({p.id, DocKind::precedent, index_text(p)});
        }
        return build(std::move(docs), params);
    }

    const Bm25Params& params() const { return params_; }
    int doc_count() const { return static_cast<int>(docs_.size()); }
    double avg_doc_length() const { return avg_doc_length_; }

    bool has_doc(const std::string& doc_id) const { return docs_.count(doc_id) > 0; }

    const StoredDoc& doc(const std::string& doc_id) const {
        const auto it = docs_.find(doc_id);
        if (it == docs_.end()) {
            throw LookupError("unknown doc id: " + doc_id);
        }
        return it->second;
    }

    double idf(const std::string& term) const {
        const auto it = postings_.find(term);
        const double df =
            it == postings_.end() ? 0.0 : static_cast<double>(it->second.size());
        const double n = static_cast<double>(docs_.size());
        return std::log((n - df + 0.5) / (df + 0.5) + 1.0);
    }

    /// BM25 score of one document for a tokenized query. 0 when no query term
    /// occurs in the document; throws LookupError for unknown doc ids.
    double score(const std::vector<std::string>& query_terms,
                 const std::string& doc_id) const {
        const StoredDoc& d = doc(doc_id);
        const double len_norm =
            avg_doc_length_ > 0.0
                ? static_cast<double>(d.length) / avg_doc_length_
                : 0.0;
        double total = 0.0;
        for (const auto& term : query_terms) {
            const auto it = postings_.find(term);
            if (it == postings_.end()) {
                continue;
            }
            const auto& list = it->second;
            const auto pos = std::lower_bound(
                list.begin(), list.end(), doc_id,
                [](const Posting& p, const std::string& id) { return p.doc_id < id; });
            if (pos == list.end() || pos->doc_id != doc_id) {
                continue;
            }
            const double tf = static_cast<double>(pos->tf);
            const double denom =
                tf + params_.k1 * (1.0 - params_.b + params_.b * len_norm);
            total += idf(term) * tf * (params_.k1 + 1.0) / denom;
        }
        return total;
    }

    /// Lexical retrieval stage: every document containing at least one query
    /// term, scored and sorted (score descending, doc id ascending on ties),
    /// truncated to top_k_coarse. Zero-score documents never appear.
    std::vector<RankedDoc> coarse_retrieve(
        const std::string& query,
        std::optional<DocKind> kind = std::nullopt) const {
        const auto query_terms = tokenize(query);
        std::set<std::string> candidates;
        for (const auto& term : query_terms) {
            const auto it = postings_.find(term);
            if (it == postings_.end()) {
                continue;
            }
            for (const auto& p : it->second) {
                candidates.insert(p.doc_id);
            }
        }
        std::vector<RankedDoc> ranked;
        for (const auto& id : candidates) {
            if (kind && docs_.at(id).kind != *kind) {
                continue;
            }
            const double s = score(query_terms, id);
            if (s > 0.0) {
                ranked.push_back({id, s, RankStage::coarse});
            }
        }
        sort_ranked(ranked);
        if (ranked.size() > static_cast<std::size_t>(params_.top_k_coarse)) {
            ranked.resize(static_cast<std::size_t>(params_.top_k_coarse));
        }
        return ranked;
    }

    Json to_json() const {
        Json postings = Json::object();
        for (const auto& [term, list] : postings_) {
            Json arr = Json::array();
            for (const auto& p : list) {
                arr.push_back(Json::array({p.doc_id, p.tf}));
            }
            postings[term] = std::move(arr);
        }
        Json docs = Json::object();
        for (const auto& [id, d] : docs_) {
            docs[id] = Json{{"kind", to_string(d.kind)},
                            {"text", d.text},
                            {"length", d.length}};
        }
        return Json{{"format_version", kIndexFormatVersion},
                    {"params", params_},
                    {"doc_count", doc_count()},
                    {"avg_doc_length", avg_doc_length_},
                    {"docs", std::move(docs)},
                    {"postings", std::move(postings)}};
    }

    static InvertedIndex from_json(const Json& j) {
        if (j.value("format_version", -1) != kIndexFormatVersion) {
            throw ValidationError("unsupported index format_version");
        }
        InvertedIndex index;
        j.at("params").get_to(index.params_);
        index.params_.validate();
        for (const auto& [id, d] : j.at("docs").items()) {
            index.docs_.emplace(
                id, StoredDoc{doc_kind_from_string(d.at("kind").get<std::string>()),
                              d.at("text").get<std::string>(),
                              d.at("length").get<int>()});
        }
        for (const auto& [term, arr] : j.at("postings").items()) {
            auto& list = index.postings_[term];
            for (const auto& entry : arr) {
                list.push_back({entry.at(0).get<std::string>(),
                                entry.at(1).get<int>()});
            }
            for (const auto& p : list) {
                if (!index.docs_.count(p.doc_id)) {
                    throw ValidationError("posting references unknown doc '" +
                                          p.doc_id + "'");
                }
            }
        }
        index.avg_doc_length_ = j.at("avg_doc_length").get<double>();
        return index;
    }

    void save(const std::string& path) const {
        write_text_file(path, to_json().dump(2) + "\n");
    }

    static InvertedIndex load(const std::string& path) {
        Json j = Json::parse(read_text_file(path), nullptr, false);
        if (j.is_discarded()) {
            throw ValidationError("index artifact is not valid JSON: " + path);
        }
        return from_json(j);
    }

    /// Total ordering used by every result list: score descending, then doc
    /// id ascending.
    static void sort_ranked(std::vector<RankedDoc>& docs) {
        std::sort(docs.begin(), docs.end(),
                  [](const RankedDoc& a, const RankedDoc& b) {
                      if (a.score != b.score) {
                          return a.score > b.score;
                      }
                      return a.doc_id < b.doc_id;
                  });
    }

  private:
    Bm25Params params_;
    std::map<std::string, std::vector<Posting>> postings_;
    std::map<std::string, StoredDoc> docs_;
    double avg_doc_length_ = 0.0;
};

// Free-function spellings of the retrieval operations.

inline InvertedIndex build_index(std::vector<IndexDoc> docs, Bm25Params params) {
    return InvertedIndex::build(std::move(docs), params);
}

inline double bm25_score(const InvertedIndex& index,
                         const std::vector<std::string>& query_terms,
                         const std::string& doc_id) {
    return index.score(query_terms, doc_id);
}

inline std::vector<RankedDoc> coarse_retrieve(
    const InvertedIndex& index, const std::string& query,
    std::optional<DocKind> kind = std::nullopt) {
    return index.coarse_retrieve(query, kind);
}

/// Semantic re-ranking stage: cosine similarity between the query embedding
/// and each candidate's document embedding. Candidates come from
/// coarse_retrieve; output is capped at top_k_rerank with the same total
/// ordering. Backend failures surface as RetrievalError with the backend
/// diagnostics attached.
inline std::vector<RankedDoc> rerank(const InvertedIndex& index,
                                     const std::vector<RankedDoc>& candidates,
                                     const std::string& query,
                                     EmbeddingBackend& backend) {
    if (candidates.empty()) {
        return {};
    }
    std::vector<std::string> texts;
    texts.reserve(candidates.size() + 1);
    texts.push_back(query);
    for (const auto& c : candidates) {
        texts.push_back(index.doc(c.doc_id).text);
    }
    std::vector<std::vector<double>> vectors;
    try {
        vectors = backend.embed_batch(texts);
    } catch (const std::exception& e) {
        throw RetrievalError(std::string("embedding backend failed: ") + e.what());
    }
    if (vectors.size() != texts.size()) {
        throw RetrievalError("embedding backend returned " +
                             std::to_string(vectors.size()) + " vectors for " +
                             std::to_string(texts.size()) + " texts");
    }
    const auto& query_vec = vectors.front();
    std::vector<RankedDoc> out;
    out.reserve(candidates.size());
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        out.push_back({candidates[i].doc_id,
                       cosine_similarity(query_vec, vectors[i + 1]),
                       RankStage::reranked});
    }
    InvertedIndex::sort_ranked(out);
    const auto cap = static_cast<std::size_t>(index.params().top_k_rerank);
    if (out.size() > cap) {
        out.resize(cap);
    }
    return out;
}

}  // namespace roadlaw
