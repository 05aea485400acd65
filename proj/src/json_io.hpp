#pragma once

// Internal helpers shared by the JSON-backed loaders.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "gridsim/errors.hpp"

namespace gridsim::detail {

using nlohmann::json;

inline std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
    out << text;
    if (!out) {
        throw IoError("write failed for " + path.string());
    }
}

inline std::size_t line_of(const std::string& text, std::size_t byte) {
    byte = std::min(byte, text.size());
    return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + byte, '\n'));
}

inline json parse_json(const std::string& text, const std::string& source) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        // nlohmann reports the byte just past the offending token
        std::size_t at = e.byte > 0 ? e.byte - 1 : 0;
        throw ParseError(source, line_of(text, at), e.what());
    }
}

template <typename T>
T require(const json& obj, const char* key, const std::string& where) {
    if (!obj.is_object() || !obj.contains(key)) {
        throw ParseError(where, 0, std::string("missing key '") + key + "'");
    }
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ParseError(where, 0, std::string("bad value for '") + key + "': " + e.what());
    }
}

template <typename T>
T optional(const json& obj, const char* key, T fallback, const std::string& where) {
    if (!obj.contains(key)) {
        return fallback;
    }
    return require<T>(obj, key, where);
}

}  // namespace gridsim::detail
