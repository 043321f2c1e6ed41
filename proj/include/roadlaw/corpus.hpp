#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "roadlaw/error.hpp"
#include "roadlaw/util.hpp"

namespace roadlaw {

// The responsibility taxonomy is closed: exactly these six labels may leave
// the engine.
inline const std::vector<std::string>& mode_labels() {
    static const std::vector<std::string> labels = {"RM1", "RM2", "RM3",
                                                    "RM4", "RM5", "RM6"};
    return labels;
}

inline bool is_mode_label(std::string_view s) {
    const auto& labels = mode_labels();
    return std::find(labels.begin(), labels.end(), s) != labels.end();
}

struct Statute {
    std::string id;
    std::string law_name;
    std::string article;
    std::string text;
    std::vector<std::string> tags;
};

struct Precedent {
    std::string id;
    std::string title;
    std::string fact_summary;
    std::string holding;
    std::vector<std::string> cited_statutes;
    std::vector<std::string> tags;
};

struct ResponsibilityMode {
    std::string mode_id;
    std::string name;
    std::string definition;
    std::vector<std::string> statute_ids;
    std::vector<std::string> core_statute_ids;
};

/// Closed taxonomy of exactly six responsibility modes, each bound to a full
/// statute set and a core subset of size 1–2.
struct ModeStatuteMap {
    std::vector<ResponsibilityMode> modes;

    const ResponsibilityMode& mode(const std::string& mode_id) const {
        for (const auto& m : modes) {
            if (m.mode_id == mode_id) {
                return m;
            }
        }
        throw LookupError("unknown responsibility mode: " + mode_id);
    }

    bool contains(const std::string& mode_id) const {
        return std::any_of(modes.begin(), modes.end(), [&](const auto& m) {
            return m.mode_id == mode_id;
        });
    }
};

struct ModeStatutes {
    std::vector<std::string> full;
    std::vector<std::string> core;
};

/// Returns the full statute set and core subset bound to a mode, order-stable
/// as configured in the map.
inline ModeStatutes statutes_for_mode(const ModeStatuteMap& map,
                                      const std::string& mode_id) {
    const auto& m = map.mode(mode_id);
    return {m.statute_ids, m.core_statute_ids};
}

struct CaseRecord {
    std::string case_id;
    std::string accident_text;                             // T_a
    std::string video_description;                         // T_v, may be empty
    std::optional<std::string> gold_mode;
    std::optional<std::vector<std::string>> ara_options;
    std::optional<int> gold_ara_index;
};

// ---------------------------------------------------------------------------
// JSON serialization

inline void to_json(Json& j, const Statute& s) {
    j = Json{{"id", s.id},
             {"law_name", s.law_name},
             {"article", s.article},
             {"text", s.text},
             {"tags", s.tags}};
}

inline void from_json(const Json& j, Statute& s) {
    j.at("id").get_to(s.id);
    s.law_name = j.value("law_name", "");
    s.article = j.value("article", "");
    j.at("text").get_to(s.text);
    s.tags = j.value("tags", std::vector<std::string>{});
}

inline void to_json(Json& j, const Precedent& p) {
    j = Json{{"id", p.id},
             {"title", p.title},
             {"fact_summary", p.fact_summary},
             {"holding", p.holding},
             {"cited_statutes", p.cited_statutes},
             {"tags", p.tags}};
}

inline void from_json(const Json& j, Precedent& p) {
    j.at("id").get_to(p.id);
    p.title = j.value("title", "");
    p.fact_summary = j.value("fact_summary", "");
    p.holding = j.value("holding", "");
    p.cited_statutes = j.value("cited_statutes", std::vector<std::string>{});
    p.tags = j.value("tags", std::vector<std::string>{});
}

inline void to_json(Json& j, const ResponsibilityMode& m) {
    j = Json{{"mode_id", m.mode_id},
             {"name", m.name},
             {"definition", m.definition},
             {"statute_ids", m.statute_ids},
             {"core_statute_ids", m.core_statute_ids}};
}

inline void from_json(const Json& j, ResponsibilityMode& m) {
    j.at("mode_id").get_to(m.mode_id);
    m.name = j.value("name", "");
    m.definition = j.value("definition", "");
    j.at("statute_ids").get_to(m.statute_ids);
    j.at("core_statute_ids").get_to(m.core_statute_ids);
}

inline void to_json(Json& j, const ModeStatuteMap& map) {
    j = Json{{"modes", map.modes}};
}

inline void from_json(const Json& j, ModeStatuteMap& map) {
    j.at("modes").get_to(map.modes);
}

inline void to_json(Json& j, const CaseRecord& c) {
    j = Json{{"case_id", c.case_id},
             {"accident_text", c.accident_text},
             {"video_description", c.video_description}};
    if (c.gold_mode) {
        j["gold_mode"] = *c.gold_mode;
    }
    if (c.ara_options) {
        j["ara_options"] = *c.ara_options;
    }
    if (c.gold_ara_index) {
        j["gold_ara_index"] = *c.gold_ara_index;
    }
}

inline void from_json(const Json& j, CaseRecord& c) {
    j.at("case_id").get_to(c.case_id);
    j.at("accident_text").get_to(c.accident_text);
    c.video_description = j.value("video_description", "");
    if (j.contains("gold_mode") && !j["gold_mode"].is_null()) {
        c.gold_mode = j["gold_mode"].get<std::string>();
    }
    if (j.contains("ara_options") && !j["ara_options"].is_null()) {
        c.ara_options = j["ara_options"].get<std::vector<std::string>>();
    }
    if (j.contains("gold_ara_index") && !j["gold_ara_index"].is_null()) {
        c.gold_ara_index = j["gold_ara_index"].get<int>();
    }
}

// ---------------------------------------------------------------------------
// Validation

inline void validate_statute(const Statute& s) {
    if (s.id.empty()) {
        throw ValidationError("statute id must be non-empty");
    }
    if (s.text.empty()) {
        throw ValidationError("statute '" + s.id + "' has empty text");
    }
}

inline void validate_case(const CaseRecord& c) {
    if (c.case_id.empty()) {
        throw ValidationError("case_id must be non-empty");
    }
    if (c.accident_text.empty()) {
        throw ValidationError("case '" + c.case_id + "' has empty accident_text");
    }
    if (c.gold_ara_index) {
        if (!c.ara_options) {
            throw ValidationError("case '" + c.case_id +
                                  "' has gold_ara_index but no ara_options");
        }
        const int n = static_cast<int>(c.ara_options->size());
        if (*c.gold_ara_index < 0 || *c.gold_ara_index >= n) {
            throw ValidationError("case '" + c.case_id +
                                  "' gold_ara_index out of range");
        }
    }
    if (c.gold_mode && !is_mode_label(*c.gold_mode)) {
        throw ValidationError("case '" + c.case_id + "' gold_mode '" +
                              *c.gold_mode + "' is not one of RM1..RM6");
    }
}

/// Validated, immutable collection of statutes and precedents. Safe for
/// concurrent read access once built.
struct LegalCorpus {
    std::vector<Statute> statutes;
    std::vector<Precedent> precedents;

    bool has_statute(const std::string& id) const {
        return std::any_of(statutes.begin(), statutes.end(),
                           [&](const auto& s) { return s.id == id; });
    }

    const Statute* find_statute(const std::string& id) const {
        for (const auto& s : statutes) {
            if (s.id == id) {
                return &s;
            }
        }
        return nullptr;
    }

    const Precedent* find_precedent(const std::string& id) const {
        for (const auto& p : precedents) {
            if (p.id == id) {
                return &p;
            }
        }
        return nullptr;
    }

    /// Cross-record checks: id uniqueness across both kinds and precedent
    /// citations resolving to loaded statutes.
    void validate() const {
        std::set<std::string> ids;
        for (const auto& s : statutes) {
            validate_statute(s);
            if (!ids.insert(s.id).second) {
                throw ValidationError("duplicate corpus id: " + s.id);
            }
        }
        for (const auto& p : precedents) {
            if (p.id.empty()) {
                throw ValidationError("precedent id must be non-empty");
            }
            if (!ids.insert(p.id).second) {
                throw ValidationError("duplicate corpus id: " + p.id);
            }
        }
        for (const auto& p : precedents) {
            for (const auto& cited : p.cited_statutes) {
                if (!has_statute(cited)) {
                    throw ValidationError("precedent '" + p.id +
                                          "' cites unknown statute '" + cited + "'");
                }
            }
        }
    }
};

inline void validate_mode_map(const ModeStatuteMap& map, const LegalCorpus& corpus) {
    if (map.modes.size() != 6) {
        throw ValidationError("expected 6 modes, got " +
                              std::to_string(map.modes.size()));
    }
    std::set<std::string> seen;
    for (const auto& m : map.modes) {
        if (!is_mode_label(m.mode_id)) {
            throw ValidationError("mode_id '" + m.mode_id +
                                  "' is not one of RM1..RM6");
        }
        if (!seen.insert(m.mode_id).second) {
            throw ValidationError("duplicate mode_id: " + m.mode_id);
        }
        if (m.core_statute_ids.empty() || m.core_statute_ids.size() > 2) {
            throw ValidationError("mode " + m.mode_id +
                                  " must bind 1-2 core statutes, got " +
                                  std::to_string(m.core_statute_ids.size()));
        }
        for (const auto& core : m.core_statute_ids) {
            if (std::find(m.statute_ids.begin(), m.statute_ids.end(), core) ==
                m.statute_ids.end()) {
                throw ValidationError("mode " + m.mode_id + " core statute '" +
                                      core + "' is not in its statute set");
            }
        }
        for (const auto& sid : m.statute_ids) {
            if (!corpus.has_statute(sid)) {
                throw ValidationError("mode " + m.mode_id +
                                      " references unknown statute '" + sid + "'");
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Loaders. Corpus files are line-delimited JSON, one object per line; blank
// lines are permitted and skipped.

namespace detail {

template <typename Fn>
void for_each_jsonl_line(const std::string& path, Fn&& fn) {
    const std::string content = read_text_file(path);
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= content.size()) {
        const std::size_t nl = content.find('\n', pos);
        std::string_view line(content.data() + pos,
                              (nl == std::string::npos ? content.size() : nl) - pos);
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.remove_suffix(1);
        }
        const bool blank =
            line.find_first_not_of(" \t") == std::string_view::npos;
        if (!blank) {
            Json j = Json::parse(line, nullptr, false);
            if (j.is_discarded()) {
                throw ParseError("malformed JSON in " + path, line_no);
            }
            fn(j, line_no);
        }
        if (nl == std::string::npos) {
            break;
        }
        pos = nl + 1;
    }
}

}  // namespace detail

/// Loads a JSONL file holding statutes and/or precedents. Records carrying a
/// "law_name" or "text" field are statutes; records carrying "holding" or
/// "fact_summary" are precedents. Duplicate ids are rejected with the
/// offending line number. Precedent citation resolution is a corpus-level
/// check (`LegalCorpus::validate`), since citations may target statutes
/// loaded from a sibling file.
inline LegalCorpus load_statute_corpus(const std::string& path) {
    LegalCorpus corpus;
    std::map<std::string, std::size_t> first_line_of_id;
    detail::for_each_jsonl_line(path, [&](const Json& j, std::size_t line_no) {
        try {
            const bool looks_precedent =
                j.contains("holding") || j.contains("fact_summary");
            std::string id;
            if (looks_precedent) {
                Precedent p = j.get<Precedent>();
                id = p.id;
                corpus.precedents.push_back(std::move(p));
            } else {
                Statute s = j.get<Statute>();
                validate_statute(s);
                id = s.id;
                corpus.statutes.push_back(std::move(s));
            }
            if (!first_line_of_id.emplace(id, line_no).second) {
                throw ValidationError("duplicate id '" + id + "' at line " +
                                      std::to_string(line_no) + " of " + path);
            }
        } catch (const Json::exception& e) {
            throw ParseError(std::string("invalid record in ") + path + ": " +
                                 e.what(),
                             line_no);
        }
    });
    return corpus;
}

/// Loads and fully validates the six-mode taxonomy against a corpus.
inline ModeStatuteMap load_mode_map(const std::string& path,
                                    const LegalCorpus& corpus) {
    Json j = Json::parse(read_text_file(path), nullptr, false);
    if (j.is_discarded()) {
        throw ValidationError("mode map is not valid JSON: " + path);
    }
    ModeStatuteMap map;
    try {
        map = j.get<ModeStatuteMap>();
    } catch (const Json::exception& e) {
        throw ValidationError(std::string("mode map schema error: ") + e.what());
    }
    validate_mode_map(map, corpus);
    return map;
}

inline std::vector<CaseRecord> load_case_dataset(const std::string& path) {
    std::vector<CaseRecord> cases;
    std::set<std::string> ids;
    detail::for_each_jsonl_line(path, [&](const Json& j, std::size_t line_no) {
        try {
            CaseRecord c = j.get<CaseRecord>();
            validate_case(c);
            if (!ids.insert(c.case_id).second) {
                throw ValidationError("duplicate case_id '" + c.case_id +
                                      "' at line " + std::to_string(line_no));
            }
            cases.push_back(std::move(c));
        } catch (const Json::exception& e) {
            throw ParseError(std::string("invalid case record in ") + path +
                                 ": " + e.what(),
                             line_no);
        }
    });
    return cases;
}

// ---------------------------------------------------------------------------
// Normalized corpus bundle: the single artifact `ingest` writes and
// `judge`/`eval`/`serve` read.

inline constexpr int kBundleFormatVersion = 1;

struct CorpusBundle {
    LegalCorpus corpus;
    ModeStatuteMap mode_map;

    Json to_json() const {
        return Json{{"format_version", kBundleFormatVersion},
                    {"statutes", corpus.statutes},
                    {"precedents", corpus.precedents},
                    {"mode_map", mode_map}};
    }

    static CorpusBundle from_json(const Json& j) {
        if (j.value("format_version", -1) != kBundleFormatVersion) {
            throw ValidationError("unsupported bundle format_version");
        }
        CorpusBundle b;
        j.at("statutes").get_to(b.corpus.statutes);
        b.corpus.precedents =
            j.value("precedents", std::vector<Precedent>{});
        j.at("mode_map").get_to(b.mode_map);
        b.corpus.validate();
        validate_mode_map(b.mode_map, b.corpus);
        return b;
    }

    void save(const std::string& path) const {
        write_text_file(path, to_json().dump(2) + "\n");
    }

    static CorpusBundle load(const std::string& path) {
        Json j = Json::parse(read_text_file(path), nullptr, false);
        if (j.is_discarded()) {
            throw ValidationError("bundle is not valid JSON: " + path);
        }
        return from_json(j);
    }
};

}  // namespace roadlaw
