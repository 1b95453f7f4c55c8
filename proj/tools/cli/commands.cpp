#include "cli/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "oamspec/format.hpp"
#include "oamspec/io.hpp"
#include "oamspec/mle.hpp"
#include "oamspec/scan.hpp"
#include "oamspec/shaping_pipeline.hpp"
#include "oamspec/spectrum.hpp"
#include "oamspec/witness.hpp"

namespace oamspec::cli {

namespace {

using Clock = std::chrono::steady_clock;

std::string csv_cell(const json& v) {
  if (v.is_null()) return "";
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_number()) return format_double(v.get<double>());
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
  }
  return v.dump();
}

SetupParams parse_setup(const Node& n) {
  try {
    if (n.has("gamma") || n.has("eta"))
      return SetupParams::from_ratios(n.positive("gamma"), n.positive("eta"), n.positive("pumpWaist", 1.0));
    return SetupParams(n.positive("pumpWaist"), n.positive("lgWaist"), n.positive("fiberWaist"));
  } catch (const DomainError& e) {
    throw ConfigError(n.path(), e.what());
  }
}

struct PumpChoice {
  PumpProfile profile = PumpProfile::gaussian();
  std::string kind;
  bool closedForm = false;  // Gaussian or truncated exponential
  bool untruncatedGaussian = false;
  double a = 0.0;
};

// "gaussian" defaults to the aperture-limited Gaussian exp(-r²/w_p²)H(w_p-r),
// i.e. the a = -1 member of the truncated family; "truncated": false selects
// the untruncated closed form.
PumpChoice parse_pump(const Node& n) {
  PumpChoice c;
  c.kind = n.choice("kind", {"gaussian", "exponential", "airy", "tabulated"});
  try {
    if (c.kind == "gaussian") {
      c.closedForm = true;
      c.untruncatedGaussian = !n.boolean("truncated", true);
      c.a = -1.0;
      c.profile = c.untruncatedGaussian ? PumpProfile::gaussian() : PumpProfile::truncated_exponential(-1.0);
    } else if (c.kind == "exponential") {
      c.closedForm = true;
      c.a = n.number("a");
      c.profile = PumpProfile::truncated_exponential(c.a);
    } else if (c.kind == "airy") {
      const int order = n.integer("besselOrder", 1);
      if (order != 0 && order != 1) throw ConfigError(n.path("besselOrder"), "'besselOrder' must be 0 or 1");
      c.profile = PumpProfile::airy(order);
    } else {
      std::vector<RadialSample> samples;
      for (const auto& [r, v] : n.pairs("samples")) samples.push_back({r, v});
      c.profile = PumpProfile::tabulated(std::move(samples));
    }
  } catch (const DomainError& e) {
    throw ConfigError(n.path(), e.what());
  }
  return c;
}

SpiralSpectrum compute_spectrum(const PumpChoice& pump, const SetupParams& p, std::pair<int, int> w,
                                const std::string& method) {
  if (method == "numerical" || !pump.closedForm) return numerical_spectrum(pump.profile, p, w.first, w.second);
  if (pump.untruncatedGaussian) return gaussian_spectrum(p, w.first, w.second);
  return exponential_spectrum(pump.a, p, w.first, w.second);
}

json pump_metadata(const PumpChoice& pump) {
  json m = {{"kind", pump.kind}};
  if (pump.kind == "gaussian") m["truncated"] = !pump.untruncatedGaussian;
  if (pump.closedForm && !pump.untruncatedGaussian) m["a"] = pump.a;
  if (pump.kind == "airy") m["besselOrder"] = pump.profile.bessel_order();
  if (pump.kind == "tabulated") m["samples"] = pump.profile.samples().size();
  return m;
}

void finish(Table& t, const RunOptions& opt, Clock::time_point start) {
  if (opt.timing)
    t.metadata["wallTimeSeconds"] = std::chrono::duration<double>(Clock::now() - start).count();
  write_file(opt.outPath, render(t, opt.format));
}

std::string sibling(const std::string& outPath, const std::string& suffix) { return outPath + suffix; }

}  // namespace

std::string render(const Table& t, Format f) {
  if (f == Format::Json) {
    json rows = json::array();
    for (const auto& r : t.rows) rows.push_back(r);
    const json doc = {{"schemaVersion", 1},
                      {"command", t.command},
                      {"metadata", t.metadata},
                      {"columns", t.columns},
                      {"rows", rows}};
    return doc.dump(2) + "\n";
  }
  std::string out = "# schemaVersion=1\n# command=" + t.command + "\n";
  for (const auto& [k, v] : t.metadata.items())
    out += "# " + k + "=" + (v.is_string() ? v.get<std::string>() : v.is_number() ? csv_cell(v) : v.dump()) + "\n";
  for (std::size_t i = 0; i < t.columns.size(); ++i) out += (i ? "," : "") + t.columns[i];
  out += "\n";
  for (const auto& r : t.rows) {
    for (std::size_t i = 0; i < r.size(); ++i) out += (i ? "," : "") + csv_cell(r[i]);
    out += "\n";
  }
  return out;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw Error("io", "cannot open '" + path + "' for writing");
  os << content;
  if (!os) throw Error("io", "failed writing '" + path + "'");
}

void run_spectrum(const json& config, const RunOptions& opt) {
  const auto start = Clock::now();
  const Node root(config, "");
  const SetupParams setup = parse_setup(root.child("setup"));
  const PumpChoice pump = parse_pump(root.child("pump"));
  const auto window = root.window("window", std::pair{-12, 12});
  const std::string method = root.choice("method", {"auto", "closed_form", "numerical"}, "auto");
  if (method == "closed_form" && !pump.closedForm)
    throw ConfigError("method", "no closed form for pump kind '" + pump.kind + "'");

  const SpiralSpectrum s = compute_spectrum(pump, setup, window, method);
  Table t;
  t.command = "spectrum";
  t.metadata = {{"gamma", setup.gamma()},
                {"eta", setup.eta()},
                {"pumpWaist", setup.w_p()},
                {"pump", pump_metadata(pump)},
                {"window", {window.first, window.second}},
                {"method", method == "auto" ? (pump.closedForm ? "closed_form" : "numerical") : method},
                {"K", schmidt_number(s)}};
  t.columns = {"ell", "C", "C2"};
  for (int ell = s.ellMin; ell <= s.ellMax; ++ell) t.rows.push_back({ell, s.amplitude(ell), s.probability(ell)});
  finish(t, opt, start);
}

void run_scan(const json& config, const RunOptions& opt) {
  const auto start = Clock::now();
  const Node root(config, "");
  const double eta = root.positive("eta");
  std::vector<double> aGrid;
  if (root.has("a") && config.at("a").is_object()) {
    const Node a = root.child("a");
    try {
      aGrid = linear_grid(a.number("start"), a.number("stop"), a.positive("step"));
    } catch (const DomainError& e) {
      throw ConfigError("a", e.what());
    }
  } else {
    aGrid = root.numbers("a");
  }
  const std::vector<double> gammas = root.numbers("gamma");
  for (std::size_t i = 0; i < gammas.size(); ++i)
    if (!(gammas[i] > 0)) throw ConfigError("gamma[" + std::to_string(i) + "]", "gamma values must be positive");
  const auto window = root.window("window", std::pair{-50, 50});

  const auto cells = scan_schmidt(aGrid, gammas, eta, window.first, window.second, opt.threads);
  Table t;
  t.command = "scan";
  json argmax = json::array();
  for (double g : gammas) {
    const auto best = argmax_a(cells, g);
    argmax.push_back({{"gamma", g}, {"a", best ? json(*best) : json(nullptr)}});
  }
  std::size_t failed = 0;
  for (const auto& c : cells) failed += c.schmidt ? 0 : 1;
  t.metadata = {{"eta", eta},
                {"window", {window.first, window.second}},
                {"cells", cells.size()},
                {"failedCells", failed},
                {"argmaxA", argmax}};
  t.columns = {"a", "gamma", "K", "error"};
  for (const auto& c : cells)
    t.rows.push_back({c.a, c.gamma, c.schmidt ? json(*c.schmidt) : json(nullptr),
                      c.error.empty() ? json(nullptr) : json(c.error)});
  finish(t, opt, start);
}

namespace {

std::vector<double> uniform(double end, int points) {
  std::vector<double> g(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) g[static_cast<std::size_t>(i)] = end * i / (points - 1);
  return g;
}

RadialIntensity parse_intensity(const Node& n, bool isTarget, std::string& kind, double& a) {
  kind = n.choice("kind", isTarget ? std::vector<std::string>{"flattop", "exponential", "gaussian", "tabulated"}
                                   : std::vector<std::string>{"gaussian", "tabulated"});
  try {
    if (kind == "tabulated") {
      std::vector<double> g, v;
      for (const auto& [s, i] : n.pairs("samples")) {
        g.push_back(s);
        v.push_back(i);
      }
      return RadialIntensity(g, v);
    }
    const int points = n.integer("points", kind == "gaussian" ? 6001 : 2001);
    if (points < 2) throw ConfigError(n.path("points"), "'points' must be >= 2");
    if (kind == "gaussian") {
      const double extent = n.positive("extent", 6.0);
      return RadialIntensity::sample(uniform(extent, points), [](double s) { return std::exp(-2 * s * s); });
    }
    if (kind == "flattop") return RadialIntensity::sample(uniform(1.0, points), [](double) { return 1.0; });
    a = n.number("a");
    return RadialIntensity::sample(uniform(1.0, points), [a](double s) { return std::exp(2 * a * s * s); });
  } catch (const DomainError& e) {
    throw ConfigError(n.path(), e.what());
  }
}

ShaperSystem parse_system(const Node& n, bool needInputWaist) {
  const double f = n.positive("focalLength");
  const double w1 = n.positive("outputWaist");
  const double w0 = needInputWaist ? n.positive("inputWaist") : n.positive("inputWaist", w1);
  if (n.has("beta") == n.has("wavelength"))
    throw ConfigError(n.path("wavelength"), "give exactly one of 'wavelength' and 'beta'");
  if (n.has("beta")) return ShaperSystem::with_beta(n.positive("beta"), f, w0, w1);
  return ShaperSystem(f, n.positive("wavelength"), w0, w1);
}

void run_pi_shaper(const Node& root, const RunOptions& opt, Clock::time_point start) {
  const ShaperSystem sys = parse_system(root.child("system"), false);
  const auto distances = root.numbers("distances");
  const int order = root.integer("besselOrder", 1);
  const double aperture = root.positive("apertureAiryUnits", 40.0);
  const int points = root.integer("points", 1500);
  if (points < 64) throw ConfigError("points", "'points' must be >= 64");
  const auto samples = airy_defocus_scan(sys, distances, order, aperture, points, 1.0);
  Table t;
  t.command = "shape";
  t.metadata = {{"mode", "pi_shaper"},
                {"focalLength", sys.focal_length()},
                {"wavelength", sys.wavelength()},
                {"outputWaist", sys.output_waist()},
                {"besselOrder", order},
                {"apertureAiryUnits", aperture},
                {"points", points}};
  t.columns = {"distance", "fittedA", "fittedA90"};
  for (const auto& s : samples)
    t.rows.push_back({s.distance, s.fittedA, fit_exponential_a(s.profile, sys.output_waist(), 0.9 * sys.output_waist())});
  finish(t, opt, start);
}

}  // namespace

void run_shape(const json& config, const RunOptions& opt) {
  const auto start = Clock::now();
  const Node root(config, "");
  if (root.choice("mode", {"design", "pi_shaper"}, "design") == "pi_shaper") return run_pi_shaper(root, opt, start);

  const ShaperSystem sys = parse_system(root.child("system"), true);
  std::string inKind, targetKind;
  double unusedA = 0.0, targetA = 0.0;
  const RadialIntensity input = parse_intensity(root.child("input"), false, inKind, unusedA);
  const RadialIntensity target = parse_intensity(root.child("target"), true, targetKind, targetA);
  const Measure measure = root.choice("measure", {"radial", "line"}, "radial") == "radial" ? Measure::Radial : Measure::Line;

  PropagationOptions prop;
  if (auto p = root.optional_child("propagation")) {
    prop.points = p->integer("points", 2048);
    prop.apertureRadius = p->positive("apertureWaists", 4.0) * sys.input_waist();
    prop.maxLeakage = p->positive("maxLeakage", 1e-4);
  } else {
    prop.points = 2048;
  }
  if (prop.points < 64) throw ConfigError("propagation.points", "'points' must be >= 64");

  const ShapingDesign d = design_and_propagate(input, target, sys, input.grid(), measure, prop);
  const ShapingQuality q = shaping_error(d.output, target, sys.output_waist());

  Table t;
  t.command = "shape";
  t.metadata = {{"mode", "design"},
                {"beta", sys.beta()},
                {"focalLength", sys.focal_length()},
                {"wavelength", sys.wavelength()},
                {"inputWaist", sys.input_waist()},
                {"outputWaist", sys.output_waist()},
                {"input", inKind},
                {"target", targetKind},
                {"measure", measure == Measure::Radial ? "radial" : "line"},
                {"energyConstant", energy_constant(input, target, measure)},
                {"mappingResidual", d.residuals.mapping},
                {"phaseResidual", d.residuals.phase},
                {"mappingMonotone", d.residuals.monotone},
                {"energyError", d.energyError()},
                {"l2Error", q.l2Error},
                {"plateauL2Error", q.plateauError}};
  if (targetKind == "exponential") {
    const RadialIntensity prof = intensity_profile(d.output, 0.0);
    // Rebuild with the on-axis value from the first node (the profile is flat
    // to O(ρ²) there) so the log fit sees no artificial zero.
    std::vector<double> v = prof.values();
    v[0] = v[1];
    const RadialIntensity fitted(prof.grid(), v);
    t.metadata["targetA"] = targetA;
    t.metadata["fittedA"] = fit_exponential_a(fitted, sys.output_waist());
    t.metadata["fittedA90"] = fit_exponential_a(fitted, sys.output_waist(), 0.9 * sys.output_waist());
  }

  const std::string phasePath =
      root.has("phasePath") ? config.at("phasePath").get<std::string>() : sibling(opt.outPath, ".phase.csv");
  {
    std::ostringstream os;
    write_phase_csv(os, d.phase, sys.input_waist());
    write_file(phasePath, os.str());
    t.metadata["phasePath"] = phasePath;
  }
  if (auto pgm = root.optional_child("pgm")) {
    const std::string path = pgm->has("path") ? config.at("pgm").at("path").get<std::string>() : sibling(opt.outPath, ".pgm");
    const int size = pgm->integer("size", 512);
    const double pitch = pgm->positive("pixelPitch");
    if (size < 1) throw ConfigError("pgm.size", "'size' must be >= 1");
    std::ostringstream os;
    write_phase_pgm(os, d.phase, sys.input_waist(), size, pitch);
    write_file(path, os.str());
    t.metadata["pgmPath"] = path;
  }

  const double w1 = sys.output_waist();
  const auto I = d.output.intensity();
  double energy = 0.0;
  for (std::size_t m = 0; m < I.size(); ++m) energy += d.output.weights[m] * I[m];
  const double level = energy / (w1 * w1 * target.total(Measure::Radial));
  const double rowLimit = root.positive("profileExtent", 2.0) * w1;
  t.columns = {"radius", "intensity", "target"};
  for (std::size_t m = 0; m < I.size() && d.output.radii[m] <= rowLimit; ++m)
    t.rows.push_back({d.output.radii[m], I[m], level * target(d.output.radii[m] / w1)});
  finish(t, opt, start);
}

namespace {

json summary(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  const double median = n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
  double var = 0.0;
  for (double x : v) var += (x - mean) * (x - mean);
  return {{"median", median},
          {"mean", mean},
          {"std", n > 1 ? std::sqrt(var / (n - 1)) : 0.0},
          {"min", v.front()},
          {"max", v.back()}};
}

}  // namespace

void run_tomography(const json& config, const RunOptions& opt) {
  const auto start = Clock::now();
  const Node root(config, "");
  const int d = root.integer("d");
  if (!is_prime(d) || d % 2 == 0)
    throw ConfigError("d", "'d' must be an odd prime (MUBs need a prime dimension, the window needs odd d); got " +
                               std::to_string(d));
  const double N = root.positive("N");
  const Noise noise = root.choice("noise", {"none", "poisson"}, "none") == "none" ? Noise::None : Noise::Poisson;
  if (noise == Noise::Poisson && !opt.seed)
    throw ConfigError("seed", "'seed' is required when noise is poisson (config field or --seed)");
  const std::uint64_t seed = opt.seed.value_or(0);
  const int repeats = root.integer("repeats", 1);
  if (repeats < 1) throw ConfigError("repeats", "'repeats' must be >= 1");
  const std::string init = root.choice("init", {"linear", "identity"}, "linear");

  DensityMatrix theory = mes(d);
  json stateMeta = {{"kind", "mes"}};
  if (auto st = root.optional_child("state")) {
    const std::string kind = st->choice("kind", {"mes", "spectrum"});
    if (kind == "spectrum") {
      const SetupParams setup = parse_setup(st->child("setup"));
      const PumpChoice pump = parse_pump(st->child("pump"));
      const auto window = st->window("window", std::pair{-12, 12});
      if (-window.first < (d - 1) / 2 || window.second < (d - 1) / 2)
        throw ConfigError(st->path("window"), "spectrum window must contain [-(d-1)/2, (d-1)/2]");
      theory = theoretical_state(compute_spectrum(pump, setup, window, "auto"), d);
      stateMeta = {{"kind", "spectrum"},
                   {"gamma", setup.gamma()},
                   {"eta", setup.eta()},
                   {"pump", pump_metadata(pump)},
                   {"window", {window.first, window.second}}};
    }
  }

  const MUBSet mubs(d);
  const DensityMatrix ideal = mes(d);
  std::vector<double> fid, cg, ent;
  DensityMatrix first;
  json firstMetrics;
  for (int r = 0; r < repeats; ++r) {
    const std::uint64_t s = seed + static_cast<std::uint64_t>(r);
    const CountsRecord counts = simulate_counts(theory, mubs, N, s, noise);
    if (r == 0 && root.has("countsPath")) write_file(config.at("countsPath").get<std::string>(), to_json(counts).dump(2) + "\n");
    const LinearReconstruction lin = linear_reconstruct(counts, su_generators(d));
    const MleResult mle =
        init == "identity" ? mle_reconstruct(counts, maximally_mixed(d)) : mle_reconstruct(counts);
    const double F = fidelity(ideal, mle.rho);
    fid.push_back(F);
    cg.push_back(cglmp_value(mle.rho, d));
    ent.push_back(linear_entropy(mle.rho));
    if (r == 0) {
      first = mle.rho;
      firstMetrics = {{"fidelityToMes", F},
                      {"fidelityToTheory", fidelity(theory, mle.rho)},
                      {"linearEntropy", ent.back()},
                      {"cglmp", cg.back()},
                      {"witness", dimensional_witness(F, d)},
                      {"mleObjective", mle.objective},
                      {"mleIterations", mle.iterations},
                      {"linearPhysical", lin.physical},
                      {"linearMinEigenvalue", lin.minEigenvalue}};
    }
    if (noise == Noise::None) break;  // further repeats would be identical
  }

  json metrics = firstMetrics;
  metrics["witnessThreshold"] = (d - 1.0) / d;
  metrics["theory"] = {{"fidelityToMes", fidelity(ideal, theory)},
                       {"linearEntropy", linear_entropy(theory)},
                       {"cglmp", cglmp_value(theory, d)}};
  if (fid.size() > 1)
    metrics["spread"] = {{"repeats", fid.size()},
                         {"fidelityToMes", summary(fid)},
                         {"cglmp", summary(cg)},
                         {"linearEntropy", summary(ent)}};

  json meta = {{"d", d},
               {"N", N},
               {"noise", to_string(noise)},
               {"seed", noise == Noise::Poisson ? json(seed) : json(nullptr)},
               {"init", init},
               {"state", stateMeta}};
  if (opt.timing) meta["wallTimeSeconds"] = std::chrono::duration<double>(Clock::now() - start).count();

  if (opt.format == Format::Json) {
    const json doc = {{"schemaVersion", 1},
                      {"command", "tomography"},
                      {"metadata", meta},
                      {"metrics", metrics},
                      {"densityMatrix", to_json(first)}};
    write_file(opt.outPath, doc.dump(2) + "\n");
    return;
  }
  const std::string rhoPath = root.has("densityPath") ? config.at("densityPath").get<std::string>()
                                                      : sibling(opt.outPath, ".rho.json");
  write_file(rhoPath, to_json(first).dump(2) + "\n");
  meta["densityPath"] = rhoPath;
  Table t;
  t.command = "tomography";
  t.metadata = meta;
  t.columns = {"metric", "value"};
  for (const auto& [k, v] : metrics.items()) {
    if (v.is_object()) {
      for (const auto& [k2, v2] : v.items()) {
        if (v2.is_object()) {
          for (const auto& [k3, v3] : v2.items()) t.rows.push_back({k + "." + k2 + "." + k3, v3});
        } else {
          t.rows.push_back({k + "." + k2, v2});
        }
      }
    } else {
      t.rows.push_back({k, v});
    }
  }
  write_file(opt.outPath, render(t, opt.format));
}

}  // namespace oamspec::cli
