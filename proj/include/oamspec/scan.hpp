#pragma once

#include <algorithm>
#include <atomic>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "oamspec/spectrum.hpp"

namespace oamspec {

struct ScanCell {
  double a = 0.0;
  double gamma = 0.0;
  std::optional<double> schmidt;  // empty when the cell failed
  std::string error;
};

/// Schmidt number of the truncated-exponential spectrum on an (a, γ) grid.
/// Rows are a-major then γ, in input order, independent of `threads`.
/// Failing cells (e.g. divergent 2γ² + 2η² - a ≤ 0) are recorded, not thrown.
inline std::vector<ScanCell> scan_schmidt(const std::vector<double>& aGrid,
                                          const std::vector<double>& gammaSet, double eta,
                                          int ellMin, int ellMax, unsigned threads = 1) {
  validate_window(ellMin, ellMax);
  std::vector<ScanCell> cells(aGrid.size() * gammaSet.size());
  for (std::size_t i = 0; i < aGrid.size(); ++i)
    for (std::size_t j = 0; j < gammaSet.size(); ++j) {
      auto& c = cells[i * gammaSet.size() + j];
      c.a = aGrid[i];
      c.gamma = gammaSet[j];
    }

  auto evaluate = [&](ScanCell& c) {
    try {
      const auto params = SetupParams::from_ratios(c.gamma, eta);
      c.schmidt = schmidt_number(exponential_spectrum(c.a, params, ellMin, ellMax));
    } catch (const Error& e) {
      c.schmidt.reset();
      c.error = e.kind() + ": " + e.what();
    }
  };

  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(cells.size())));
  if (threads == 1) {
    for (auto& c : cells) evaluate(c);
    return cells;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (std::size_t k = next++; k < cells.size(); k = next++) evaluate(cells[k]);
    });
  for (auto& th : pool) th.join();
  return cells;
}

/// Value of a in `aGrid` with the largest Schmidt number at fixed γ. The
/// first maximum wins on ties.
inline std::optional<double> argmax_a(const std::vector<ScanCell>& cells, double gamma) {
  std::optional<double> best;
  double bestK = -1.0;
  for (const auto& c : cells)
    if (c.gamma == gamma && c.schmidt && *c.schmidt > bestK) {
      bestK = *c.schmidt;
      best = c.a;
    }
  return best;
}

/// Inclusive grid lo, lo+step, ..., hi built from integer multiples of step.
inline std::vector<double> linear_grid(double lo, double hi, double step) {
  if (!(step > 0.0) || hi < lo) throw DomainError("linear_grid: need step > 0 and hi >= lo");
  const auto n = static_cast<long>(std::floor((hi - lo) / step + 1e-9));
  std::vector<double> g;
  g.reserve(static_cast<std::size_t>(n + 1));
  for (long k = 0; k <= n; ++k)
    g.push_back(std::round((lo + static_cast<double>(k) * step) * 1e12) / 1e12);
  return g;
}

}  // namespace oamspec
