#pragma once

#include <string>
#include <vector>

#include "cli/config.hpp"

namespace oamspec::cli {

/// Column-oriented result with a metadata block, rendered as CSV (metadata
/// in leading '#' lines) or as one JSON document.
struct Table {
  std::string command;
  json metadata = json::object();
  std::vector<std::string> columns;
  std::vector<std::vector<json>> rows;
};

std::string render(const Table& t, Format f);
void write_file(const std::string& path, const std::string& content);

void run_spectrum(const json& config, const RunOptions& opt);
void run_scan(const json& config, const RunOptions& opt);
void run_shape(const json& config, const RunOptions& opt);
void run_tomography(const json& config, const RunOptions& opt);

}  // namespace oamspec::cli
