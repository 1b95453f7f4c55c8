#include <CLI11.hpp>

#include <iostream>

#include "cli/commands.hpp"
#include "oamspec/io.hpp"
#include "oamspec/mle.hpp"

using namespace oamspec;
using namespace oamspec::cli;

namespace {

int fail(int code, const std::string& kind, const std::string& field, const std::string& message,
         json extra = json::object()) {
  json e = {{"error", kind}, {"field", field.empty() ? json(nullptr) : json(field)}, {"message", message}};
  e.update(extra);
  std::cerr << e.dump() << '\n';
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"OAM spiral spectrum, beam shaping and qudit tomography toolkit"};
  app.require_subcommand(1);

  std::string configPath;
  Overrides ov;
  std::string format, out;
  std::uint64_t seed = 0;
  unsigned threads = 1;

  struct Sub {
    const char* name;
    const char* help;
    void (*run)(const json&, const RunOptions&);
  };
  const Sub subs[] = {{"spectrum", "spiral spectrum and Schmidt number", run_spectrum},
                      {"scan", "Schmidt number over an (a, gamma) grid", run_scan},
                      {"shape", "phase design and Fourier-plane propagation", run_shape},
                      {"tomography", "simulated MUB tomography with MLE reconstruction", run_tomography}};
  for (const auto& s : subs) {
    CLI::App* c = app.add_subcommand(s.name, s.help);
    c->add_option("--config", configPath, "JSON run configuration")->required();
    c->add_option("--out", out, "output file (overrides outputPath)");
    c->add_option("--format", format, "csv or json (overrides outputFormat)")->check(CLI::IsMember({"csv", "json"}));
    c->add_option("--seed", seed, "RNG seed (overrides seed)");
    c->add_option("--threads", threads, "worker threads (overrides threads)")->check(CLI::PositiveNumber);
    c->add_flag("--timing", ov.timing, "record wall time in the metadata");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail(2, "usage", "", e.what());
  }

  CLI::App* sub = app.get_subcommands().front();
  if (sub->count("--out")) ov.outPath = out;
  if (sub->count("--format")) ov.format = format;
  if (sub->count("--seed")) ov.seed = seed;
  if (sub->count("--threads")) ov.threads = threads;

  try {
    const json config = load_config(configPath);
    const RunOptions opt = resolve_options(config, ov);
    for (const auto& s : subs)
      if (sub->get_name() == s.name) s.run(config, opt);
    return 0;
  } catch (const ConfigError& e) {
    return fail(2, e.kind(), e.field(), e.what());
  } catch (const SchemaError& e) {
    return fail(2, e.kind(), e.field(), e.what());
  } catch (const json::exception& e) {
    return fail(2, "config", "", e.what());
  } catch (const ConvergenceError& e) {
    return fail(1, e.kind(), "", e.what(), {{"objective", e.objective()}});
  } catch (const Error& e) {
    return fail(1, e.kind(), "", e.what());
  } catch (const std::exception& e) {
    return fail(1, "internal", "", e.what());
  }
}
