#pragma once

#include <initializer_list>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "hrrpnet/error.hpp"

namespace hrrpnet::json_util {

/// Throws ConfigError if `obj` is not an object or carries a key outside `allowed`.
inline void reject_unknown(const nlohmann::json& obj, std::string_view context,
                           std::initializer_list<std::string_view> allowed) {
    if (!obj.is_object()) throw ConfigError(std::string(context) + ": expected a JSON object");
    for (const auto& [key, _] : obj.items()) {
        bool ok = false;
        for (auto a : allowed) ok = ok || key == a;
        if (!ok) throw ConfigError(std::string(context) + ": unknown key '" + key + "'");
    }
}

template <typename T>
T get(const nlohmann::json& obj, const std::string& key) {
    if (!obj.contains(key)) throw ConfigError("missing key '" + key + "'");
    try {
        return obj.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("key '" + key + "': " + e.what());
    }
}

template <typename T>
T get_or(const nlohmann::json& obj, const std::string& key, T fallback) {
    return obj.contains(key) ? get<T>(obj, key) : fallback;
}

inline const nlohmann::json& get_array(const nlohmann::json& obj, const std::string& key) {
    if (!obj.contains(key) || !obj.at(key).is_array()) throw ConfigError("key '" + key + "' must be an array");
    return obj.at(key);
}

}  // namespace hrrpnet::json_util
