#pragma once

#include <functional>
#include <set>
#include <string>

#include <nlohmann/json.hpp>

#include "bridgekit/error.hpp"

namespace bridgekit {

/// Reads optional keys of one JSON object and rejects keys nobody asked for.
/// Call finish() after the last read.
class ConfigReader {
 public:
  ConfigReader(const nlohmann::json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError("config section '" + path_ + "' must be an object");
  }

  template <class T>
  void read(const std::string& key, T& out) {
    known_.insert(key);
    if (!j_.contains(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
      throw ConfigError("config key '" + qualified(key) + "' has the wrong type");
    }
  }

  template <class E>
  void read_enum(const std::string& key, E& out, const std::function<E(const std::string&)>& parse) {
    std::string name;
    known_.insert(key);
    if (!j_.contains(key)) return;
    read(key, name);
    out = parse(name);
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  /// Sub-object, registered as known. Null when absent.
  const nlohmann::json* section(const std::string& key) {
    known_.insert(key);
    return j_.contains(key) ? &j_.at(key) : nullptr;
  }

  std::string qualified(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  void finish() const {
    for (const auto& item : j_.items()) {
      if (!known_.count(item.key())) throw ConfigError("unknown config key '" + qualified(item.key()) + "'");
    }
  }

 private:
  const nlohmann::json& j_;
  std::string path_;
  std::set<std::string> known_;
};

}  // namespace bridgekit
