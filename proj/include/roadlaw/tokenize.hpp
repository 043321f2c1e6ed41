#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace roadlaw {

namespace detail {

/// Decodes one UTF-8 code point starting at `i` and advances `i` past it.
/// Malformed bytes are consumed one at a time and reported as U+FFFD.
inline char32_t decode_utf8(std::string_view s, std::size_t& i) {
    const auto byte = [&](std::size_t k) {
        return static_cast<unsigned char>(s[k]);
    };
    const unsigned char b0 = byte(i);
    if (b0 < 0x80) {
        ++i;
        return b0;
    }
    int len = 0;
    char32_t cp = 0;
    if ((b0 & 0xE0) == 0xC0) {
        len = 2;
        cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
        len = 3;
        cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
        len = 4;
        cp = b0 & 0x07;
    } else {
        ++i;
        return 0xFFFD;
    }
    if (i + static_cast<std::size_t>(len) > s.size()) {
        ++i;
        return 0xFFFD;
    }
    for (int k = 1; k < len; ++k) {
        const unsigned char bk = byte(i + static_cast<std::size_t>(k));
        if ((bk & 0xC0) != 0x80) {
            ++i;
            return 0xFFFD;
        }
        cp = (cp << 6) | (bk & 0x3F);
    }
    i += static_cast<std::size_t>(len);
    return cp;
}

inline bool is_cjk(char32_t cp) {
    // Unified ideographs + extension A + compatibility ideographs.
    return (cp >= 0x3400 && cp <= 0x9FFF) || (cp >= 0xF900 && cp <= 0xFAFF);
}

inline bool is_ascii_alnum(char32_t cp) {
    return (cp >= '0' && cp <= '9') || (cp >= 'a' && cp <= 'z') ||
           (cp >= 'A' && cp <= 'Z');
}

inline void encode_utf8(char32_t cp, std::string& out) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

}  // namespace detail

/// Tokenizer shared by the BM25 index and the hash embedder.
///
/// ASCII alphanumeric runs are lowercased and emitted as single terms. CJK
/// ideograph runs are emitted as overlapping character bigrams, the standard
/// segmentation-free baseline for Chinese text (a run of a single ideograph
/// yields that ideograph alone). Every other code point separates runs.
inline std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> terms;
    std::string latin;
    std::vector<char32_t> cjk_run;

    const auto flush_latin = [&] {
        if (!latin.empty()) {
            terms.push_back(latin);
            latin.clear();
        }
    };
    const auto flush_cjk = [&] {
        if (cjk_run.empty()) {
            return;
        }
        if (cjk_run.size() == 1) {
            std::string one;
            detail::encode_utf8(cjk_run[0], one);
            terms.push_back(std::move(one));
        } else {
            for (std::size_t k = 0; k + 1 < cjk_run.size(); ++k) {
                std::string bigram;
                detail::encode_utf8(cjk_run[k], bigram);
                detail::encode_utf8(cjk_run[k + 1], bigram);
                terms.push_back(std::move(bigram));
            }
        }
        cjk_run.clear();
    };

    std::size_t i = 0;
    while (i < text.size()) {
        const char32_t cp = detail::decode_utf8(text, i);
        if (detail::is_ascii_alnum(cp)) {
            flush_cjk();
            const char c = static_cast<char>(cp);
            latin.push_back((c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c);
        } else if (detail::is_cjk(cp)) {
            flush_latin();
            cjk_run.push_back(cp);
        } else {
            flush_latin();
            flush_cjk();
        }
    }
    flush_latin();
    flush_cjk();
    return terms;
}

}  // namespace roadlaw
