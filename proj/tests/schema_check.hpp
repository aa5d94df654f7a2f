#pragma once

// Minimal JSON-schema checker covering the subset used by the published
// schemas: type, properties, required, items (single schema), enum, minimum,
// and intra-directory $ref. Returns the first problem found, or "" if valid.

#include <fstream>
#include <map>
#include <string>

#include <json.hpp>

namespace schema {

using json = nlohmann::json;

class Checker {
 public:
  explicit Checker(const std::string& schema_dir) : dir_(schema_dir) {}

  std::string check_file(const json& value, const std::string& schema_file) {
    return check(value, load(schema_file), schema_file);
  }

 private:
  std::string dir_;
  std::map<std::string, json> cache_;

  const json& load(const std::string& file) {
    auto it = cache_.find(file);
    if (it != cache_.end()) return it->second;
    std::ifstream f(dir_ + "/" + file);
    if (!f) throw std::runtime_error("schema not found: " + file);
    return cache_[file] = json::parse(f);
  }

  static bool type_matches(const json& v, const std::string& t) {
    if (t == "object") return v.is_object();
    if (t == "array") return v.is_array();
    if (t == "string") return v.is_string();
    if (t == "number") return v.is_number();
    if (t == "integer") return v.is_number_integer();
    if (t == "boolean") return v.is_boolean();
    return false;
  }

  std::string check(const json& v, const json& s, const std::string& where) {
    if (s.contains("$ref")) return check_file(v, s.at("$ref").get<std::string>());
    if (s.contains("type")) {
      const auto t = s.at("type").get<std::string>();
      if (!type_matches(v, t)) return where + ": expected " + t + ", got " + v.dump();
    }
    if (s.contains("enum")) {
      bool ok = false;
      for (const auto& e : s.at("enum"))
        if (e == v) ok = true;
      if (!ok) return where + ": " + v.dump() + " not in enum";
    }
    if (s.contains("minimum") && v.is_number() &&
        v.get<double>() < s.at("minimum").get<double>())
      return where + ": " + v.dump() + " below minimum";
    if (v.is_object()) {
      if (s.contains("required"))
        for (const auto& r : s.at("required"))
          if (!v.contains(r.get<std::string>()))
            return where + ": missing required key '" + r.get<std::string>() + "'";
      if (s.contains("properties"))
        for (const auto& [key, sub] : s.at("properties").items())
          if (v.contains(key)) {
            const std::string err = check(v.at(key), sub, where + "." + key);
            if (!err.empty()) return err;
          }
    }
    if (v.is_array() && s.contains("items")) {
      for (std::size_t i = 0; i < v.size(); ++i) {
        const std::string err =
            check(v.at(i), s.at("items"), where + "[" + std::to_string(i) + "]");
        if (!err.empty()) return err;
      }
    }
    return "";
  }
};

}  // namespace schema
