#include "cli/config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace oamspec::cli {

Node::Node(const json& j, std::string path) : j_(&j), path_(std::move(path)) {
  if (!j.is_object()) throw ConfigError(path_, "'" + (path_.empty() ? "<root>" : path_) + "' must be an object");
}

const json& Node::at(const std::string& key) const {
  if (!j_->contains(key)) throw ConfigError(path(key), "missing field '" + path(key) + "'");
  return j_->at(key);
}

Node Node::child(const std::string& key) const { return Node(at(key), path(key)); }

std::optional<Node> Node::optional_child(const std::string& key) const {
  if (!has(key)) return std::nullopt;
  return child(key);
}

double Node::number(const std::string& key) const {
  const json& v = at(key);
  if (!v.is_number() || !std::isfinite(v.get<double>()))
    throw ConfigError(path(key), "'" + path(key) + "' must be a finite number");
  return v.get<double>();
}

double Node::number(const std::string& key, double fallback) const { return has(key) ? number(key) : fallback; }

double Node::positive(const std::string& key) const {
  const double v = number(key);
  if (!(v > 0.0)) throw ConfigError(path(key), "'" + path(key) + "' must be positive");
  return v;
}

double Node::positive(const std::string& key, double fallback) const {
  return has(key) ? positive(key) : fallback;
}

int Node::integer(const std::string& key) const {
  const json& v = at(key);
  if (!v.is_number_integer() || v.get<long long>() > std::numeric_limits<int>::max() ||
      v.get<long long>() < std::numeric_limits<int>::min())
    throw ConfigError(path(key), "'" + path(key) + "' must be an integer");
  return v.get<int>();
}

int Node::integer(const std::string& key, int fallback) const { return has(key) ? integer(key) : fallback; }

bool Node::boolean(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  const json& v = at(key);
  if (!v.is_boolean()) throw ConfigError(path(key), "'" + path(key) + "' must be true or false");
  return v.get<bool>();
}

std::string Node::choice(const std::string& key, const std::vector<std::string>& allowed,
                         std::optional<std::string> fallback) const {
  if (!has(key) && fallback) return *fallback;
  const json& v = at(key);
  std::string list;
  for (const auto& a : allowed) list += (list.empty() ? "" : "|") + a;
  if (v.is_string())
    for (const auto& a : allowed)
      if (v.get<std::string>() == a) return a;
  throw ConfigError(path(key), "'" + path(key) + "' must be one of " + list);
}

std::vector<double> Node::numbers(const std::string& key) const {
  const json& v = at(key);
  if (!v.is_array() || v.empty()) throw ConfigError(path(key), "'" + path(key) + "' must be a non-empty array");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number() || !std::isfinite(v[i].get<double>()))
      throw ConfigError(path(key) + "[" + std::to_string(i) + "]", "array entries must be finite numbers");
    out.push_back(v[i].get<double>());
  }
  return out;
}

std::vector<std::pair<double, double>> Node::pairs(const std::string& key) const {
  const json& v = at(key);
  if (!v.is_array() || v.empty()) throw ConfigError(path(key), "'" + path(key) + "' must be a non-empty array");
  std::vector<std::pair<double, double>> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const json& p = v[i];
    if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number())
      throw ConfigError(path(key) + "[" + std::to_string(i) + "]", "entries must be [x, y] number pairs");
    out.emplace_back(p[0].get<double>(), p[1].get<double>());
  }
  return out;
}

std::pair<int, int> Node::window(const std::string& key, std::optional<std::pair<int, int>> fallback) const {
  if (!has(key) && fallback) return *fallback;
  const json& v = at(key);
  if (!v.is_array() || v.size() != 2 || !v[0].is_number_integer() || !v[1].is_number_integer())
    throw ConfigError(path(key), "'" + path(key) + "' must be [ellMin, ellMax] integers");
  const int lo = v[0].get<int>(), hi = v[1].get<int>();
  if (lo > hi || lo > 0 || hi < 0)
    throw ConfigError(path(key), "'" + path(key) + "' must satisfy ellMin <= 0 <= ellMax");
  return {lo, hi};
}

json load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("", "cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  json j;
  try {
    j = json::parse(ss.str());
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("malformed JSON: ") + e.what());
  }
  const Node root(j, "");
  if (!root.has("schemaVersion")) throw ConfigError("schemaVersion", "missing field 'schemaVersion'");
  if (root.integer("schemaVersion") != 1) throw ConfigError("schemaVersion", "unsupported schemaVersion (expected 1)");
  return j;
}

RunOptions resolve_options(const json& config, const Overrides& o) {
  const Node root(config, "");
  RunOptions r;
  if (o.outPath) {
    r.outPath = *o.outPath;
  } else if (root.has("outputPath")) {
    if (!config.at("outputPath").is_string()) throw ConfigError("outputPath", "'outputPath' must be a string");
    r.outPath = config.at("outputPath").get<std::string>();
  } else {
    throw ConfigError("outputPath", "no output path: set 'outputPath' or pass --out");
  }
  if (r.outPath.empty()) throw ConfigError("outputPath", "output path is empty");

  std::string fmt = o.format ? *o.format : root.choice("outputFormat", {"csv", "json"}, "csv");
  if (fmt != "csv" && fmt != "json") throw ConfigError("outputFormat", "format must be csv or json");
  r.format = fmt == "csv" ? Format::Csv : Format::Json;

  if (o.seed) {
    r.seed = o.seed;
  } else if (root.has("seed")) {
    if (!config.at("seed").is_number_unsigned()) throw ConfigError("seed", "'seed' must be a non-negative integer");
    r.seed = config.at("seed").get<std::uint64_t>();
  }
  if (o.threads) {
    r.threads = *o.threads;
  } else {
    const int t = root.integer("threads", 1);
    if (t < 1) throw ConfigError("threads", "'threads' must be >= 1");
    r.threads = static_cast<unsigned>(t);
  }
  if (r.threads < 1) throw ConfigError("threads", "--threads must be >= 1");
  r.timing = o.timing;
  return r;
}

}  // namespace oamspec::cli
