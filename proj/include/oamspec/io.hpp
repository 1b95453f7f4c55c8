#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "oamspec/tomography.hpp"

namespace oamspec {

inline constexpr int kSchemaVersion = 1;

/// Malformed document; `field` names the offending JSON path.
class SchemaError : public Error {
 public:
  SchemaError(const std::string& field, const std::string& m) : Error("schema", m), field_(field) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

namespace detail {

using nlohmann::json;

inline const json& require(const json& j, const std::string& key, const std::string& path) {
  if (!j.is_object() || !j.contains(key)) throw SchemaError(path + key, "missing field '" + path + key + "'");
  return j.at(key);
}

inline void check_schema(const json& j, const std::string& kind) {
  const json& v = require(j, "schemaVersion", "");
  if (!v.is_number_integer() || v.get<int>() != kSchemaVersion)
    throw SchemaError("schemaVersion", "unsupported schemaVersion (expected 1)");
  const json& k = require(j, "kind", "");
  if (!k.is_string() || k.get<std::string>() != kind)
    throw SchemaError("kind", "expected kind '" + kind + "'");
}

inline int get_int(const json& j, const std::string& field) {
  if (!j.is_number_integer()) throw SchemaError(field, "'" + field + "' must be an integer");
  return j.get<int>();
}

inline double get_number(const json& j, const std::string& field) {
  if (!j.is_number()) throw SchemaError(field, "'" + field + "' must be a number");
  return j.get<double>();
}

}  // namespace detail

inline std::string basis_order_note(int d) {
  return "row/column index = n_s*" + std::to_string(d) +
         " + n_i over |n_s> (signal) x |n_i> (idler), n = ell + " + std::to_string((d - 1) / 2);
}

inline nlohmann::json to_json(const CountsRecord& c) {
  nlohmann::json settings = nlohmann::json::array();
  for (const auto& s : c.settings)
    settings.push_back({{s.signal.group, s.signal.member}, {s.idler.group, s.idler.member}});
  return {{"schemaVersion", kSchemaVersion},
          {"kind", "counts"},
          {"d", c.d},
          {"N", c.N},
          {"noise", to_string(c.noise)},
          {"seed", c.seed ? nlohmann::json(*c.seed) : nlohmann::json(nullptr)},
          {"settingFormat", "[[signal group, member], [idler group, member]]; group d = computational basis"},
          {"settings", settings},
          {"counts", c.counts}};
}

inline CountsRecord counts_from_json(const nlohmann::json& j) {
  using detail::require;
  detail::check_schema(j, "counts");
  CountsRecord c;
  c.d = detail::get_int(require(j, "d", ""), "d");
  c.N = detail::get_number(require(j, "N", ""), "N");
  const auto& noise = require(j, "noise", "");
  if (noise == "none") {
    c.noise = Noise::None;
  } else if (noise == "poisson") {
    c.noise = Noise::Poisson;
  } else {
    throw SchemaError("noise", "'noise' must be \"none\" or \"poisson\"");
  }
  if (j.contains("seed") && !j.at("seed").is_null()) {
    if (!j.at("seed").is_number_unsigned()) throw SchemaError("seed", "'seed' must be a non-negative integer");
    c.seed = j.at("seed").get<std::uint64_t>();
  }
  const auto& settings = require(j, "settings", "");
  const auto& counts = require(j, "counts", "");
  if (!settings.is_array()) throw SchemaError("settings", "'settings' must be an array");
  if (!counts.is_array()) throw SchemaError("counts", "'counts' must be an array");
  for (std::size_t i = 0; i < settings.size(); ++i) {
    const std::string f = "settings[" + std::to_string(i) + "]";
    const auto& s = settings[i];
    if (!s.is_array() || s.size() != 2 || !s[0].is_array() || s[0].size() != 2 || !s[1].is_array() ||
        s[1].size() != 2)
      throw SchemaError(f, "'" + f + "' must be [[group, member], [group, member]]");
    c.settings.push_back({{detail::get_int(s[0][0], f), detail::get_int(s[0][1], f)},
                          {detail::get_int(s[1][0], f), detail::get_int(s[1][1], f)}});
  }
  for (std::size_t i = 0; i < counts.size(); ++i)
    c.counts.push_back(detail::get_number(counts[i], "counts[" + std::to_string(i) + "]"));
  try {
    validate_counts(c);
  } catch (const DomainError& e) {
    throw SchemaError("counts", e.what());
  }
  return c;
}

inline nlohmann::json to_json(const DensityMatrix& rho) {
  nlohmann::json re = nlohmann::json::array(), im = nlohmann::json::array();
  for (Eigen::Index i = 0; i < rho.rho.rows(); ++i) {
    nlohmann::json r = nlohmann::json::array(), m = nlohmann::json::array();
    for (Eigen::Index k = 0; k < rho.rho.cols(); ++k) {
      r.push_back(rho.rho(i, k).real());
      m.push_back(rho.rho(i, k).imag());
    }
    re.push_back(std::move(r));
    im.push_back(std::move(m));
  }
  return {{"schemaVersion", kSchemaVersion},
          {"kind", "density_matrix"},
          {"d", rho.d},
          {"basisOrder", basis_order_note(rho.d)},
          {"real", re},
          {"imag", im}};
}

inline DensityMatrix density_from_json(const nlohmann::json& j) {
  using detail::require;
  detail::check_schema(j, "density_matrix");
  const int d = detail::get_int(require(j, "d", ""), "d");
  if (d < 2) throw SchemaError("d", "'d' must be >= 2");
  const int D = d * d;
  const auto& re = require(j, "real", "");
  const auto& im = require(j, "imag", "");
  Eigen::MatrixXcd m(D, D);
  for (const auto* part : {&re, &im}) {
    const std::string name = part == &re ? "real" : "imag";
    if (!part->is_array() || static_cast<int>(part->size()) != D)
      throw SchemaError(name, "'" + name + "' must hold d² rows");
    for (int i = 0; i < D; ++i) {
      const auto& row = (*part)[static_cast<std::size_t>(i)];
      if (!row.is_array() || static_cast<int>(row.size()) != D)
        throw SchemaError(name + "[" + std::to_string(i) + "]", "row must hold d² entries");
    }
  }
  for (int i = 0; i < D; ++i)
    for (int k = 0; k < D; ++k) {
      const std::string f = "[" + std::to_string(i) + "][" + std::to_string(k) + "]";
      m(i, k) = {detail::get_number(re[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)], "real" + f),
                 detail::get_number(im[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)], "imag" + f)};
    }
  return DensityMatrix(d, m);
}

}  // namespace oamspec
