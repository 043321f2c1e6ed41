#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "roadlaw/error.hpp"

namespace roadlaw {

using Json = nlohmann::json;

// FNV-1a, 64 bit. The constants are pinned so digests and hash-embedder
// buckets are identical on every platform: offset basis 0xcbf29ce484222325,
// prime 0x100000001b3, bytes consumed in UTF-8 order.
inline constexpr std::uint64_t kFnv64Offset = 0xcbf29ce484222325ull;
inline constexpr std::uint64_t kFnv64Prime = 0x100000001b3ull;

constexpr std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = kFnv64Offset;
    for (unsigned char c : bytes) {
        h ^= static_cast<std::uint64_t>(c);
        h *= kFnv64Prime;
    }
    return h;
}

inline std::string to_hex64(std::uint64_t v) {
    static constexpr char digits[] = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = digits[v & 0xF];
        v >>= 4;
    }
    return out;
}

/// 16-hex-digit content digest used for trace records and request ids.
inline std::string content_digest(std::string_view bytes) {
    return to_hex64(fnv1a64(bytes));
}

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ValidationError("cannot open file: " + path);
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline void write_text_file(const std::string& path, std::string_view content) {
    std::filesystem::path p(path);
    if (p.has_parent_path()) {
        std::filesystem::create_directories(p.parent_path());
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw ValidationError("cannot write file: " + path);
    }
    out << content;
}

/// Collapses newlines so a value can live on one `KEY: value` prompt line.
inline std::string flatten_line(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
        out.push_back((c == '\n' || c == '\r') ? ' ' : c);
    }
    return out;
}

inline std::string join(const std::vector<std::string>& parts,
                        std::string_view sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i > 0) {
            out += sep;
        }
        out += parts[i];
    }
    return out;
}

/// First `max_bytes` of a UTF-8 string, cut back to a code point boundary.
inline std::string utf8_prefix(std::string_view text, std::size_t max_bytes) {
    if (text.size() <= max_bytes) {
        return std::string(text);
    }
    std::size_t end = max_bytes;
    while (end > 0 && (static_cast<unsigned char>(text[end]) & 0xC0) == 0x80) {
        --end;
    }
    return std::string(text.substr(0, end));
}

}  // namespace roadlaw
