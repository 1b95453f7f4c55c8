#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "oamspec/errors.hpp"

namespace oamspec::cli {

using nlohmann::json;

/// Invalid configuration; `field` is the JSON path of the culprit (empty
/// when the document itself does not parse).
class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& m) : Error("config", m), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

enum class Format { Csv, Json };

struct RunOptions {
  std::string outPath;
  Format format = Format::Csv;
  std::optional<std::uint64_t> seed;
  unsigned threads = 1;
  bool timing = false;
};

/// Values given on the command line; they win over the config file.
struct Overrides {
  std::optional<std::string> outPath;
  std::optional<std::string> format;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  bool timing = false;
};

/// Read-only view of a JSON object that knows its path, so every error can
/// name the offending field.
class Node {
 public:
  Node(const json& j, std::string path);

  const std::string& path() const { return path_; }
  std::string path(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
  bool has(const std::string& key) const { return j_->contains(key); }
  const json& raw() const { return *j_; }

  Node child(const std::string& key) const;
  std::optional<Node> optional_child(const std::string& key) const;

  double number(const std::string& key) const;
  double number(const std::string& key, double fallback) const;
  double positive(const std::string& key) const;
  double positive(const std::string& key, double fallback) const;
  int integer(const std::string& key) const;
  int integer(const std::string& key, int fallback) const;
  bool boolean(const std::string& key, bool fallback) const;
  std::string choice(const std::string& key, const std::vector<std::string>& allowed,
                     std::optional<std::string> fallback = std::nullopt) const;
  std::vector<double> numbers(const std::string& key) const;
  std::vector<std::pair<double, double>> pairs(const std::string& key) const;
  std::pair<int, int> window(const std::string& key, std::optional<std::pair<int, int>> fallback) const;

 private:
  const json& at(const std::string& key) const;

  const json* j_;
  std::string path_;
};

/// Parses the config file; syntax errors become ConfigError.
json load_config(const std::string& path);

RunOptions resolve_options(const json& config, const Overrides& o);

}  // namespace oamspec::cli
