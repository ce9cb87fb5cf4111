#pragma once

#include <filesystem>
#include <fstream>
#include <string>

#include <nlohmann/json.hpp>

#include "stationing/types.hpp"

namespace stationing::detail {

using nlohmann::json;

inline const json& require(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + ": expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw ConfigError(where + ": missing field '" + key + "'");
  return *it;
}

template <class T>
T get_as(const json& value, const std::string& where) {
  try {
    return value.get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(where + ": " + e.what());
  }
}

template <class T>
T field(const json& obj, const char* key, const std::string& where) {
  return get_as<T>(require(obj, key, where), where + "." + key);
}

template <class T>
T field_or(const json& obj, const char* key, T fallback, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  return get_as<T>(*it, where + "." + key);
}

inline json parse_json(std::istream& in, const std::string& what) {
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(what + ": " + e.what());
  }
}

inline json load_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  return parse_json(in, path.string());
}

inline void save_json(const std::filesystem::path& path, const json& doc) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << doc.dump(2) << '\n';
}

inline void check_version(const json& doc, const std::string& where) {
  const int version = field_or<int>(doc, "version", 1, where);
  if (version != 1) throw ConfigError(where + ": unsupported version " + std::to_string(version));
}

}  // namespace stationing::detail
