#include <cmath>

#include "gtest/gtest.h"
#include "oamspec/scan.hpp"

using namespace oamspec;

namespace {
constexpr double kEta = 0.31;
constexpr double kFlatA = 2 * kEta * kEta;  // 0.1922
}  // namespace

TEST(LinearGrid, InclusiveAndClean) {
  auto g = linear_grid(-1.0, 1.0, 0.01);
  ASSERT_EQ(g.size(), 201u);
  EXPECT_EQ(g.front(), -1.0);
  EXPECT_EQ(g.back(), 1.0);
  EXPECT_EQ(g[119], 0.19);
  EXPECT_THROW(linear_grid(0, 1, 0), DomainError);
}

TEST(ScanSchmidt, OptimumNearFlatCombinedProfileForLargeGamma) {
  auto cells = scan_schmidt(linear_grid(-1, 1, 0.01), {5.0}, kEta, -12, 12);
  auto best = argmax_a(cells, 5.0);
  ASSERT_TRUE(best);
  EXPECT_LE(std::abs(*best - kFlatA), 0.01);
}

TEST(ScanSchmidt, WideWindowOptimumForLargeGamma) {
  // On [-50, 50] the optimum for γ = 5 sits at a = 0.41 (scipy cross-check);
  // the K(a) peak is broad: K(0.19) = 95.52 vs K(0.41) = 96.53.
  auto cells = scan_schmidt(linear_grid(-1, 1, 0.01), {5.0}, kEta, -50, 50);
  auto best = argmax_a(cells, 5.0);
  ASSERT_TRUE(best);
  EXPECT_NEAR(*best, 0.41, 1e-12);
  for (const auto& c : cells) {
    if (std::abs(c.a - 0.19) < 1e-12) {
      EXPECT_NEAR(*c.schmidt, 95.51989829653972, 1e-8);
    }
    if (std::abs(c.a - 0.41) < 1e-12) {
      EXPECT_NEAR(*c.schmidt, 96.53491028076715, 1e-8);
    }
  }
}

TEST(ScanSchmidt, OptimumShiftsAboveForSmallGamma) {
  for (auto window : {12, 50}) {
    auto cells = scan_schmidt(linear_grid(-1, 1, 0.01), {1.25}, kEta, -window, window);
    auto best = argmax_a(cells, 1.25);
    ASSERT_TRUE(best);
    EXPECT_GT(*best, kFlatA);
  }
}

TEST(ScanSchmidt, MonotoneInGammaAtFixedA) {
  auto cells = scan_schmidt({0.19}, {1, 2, 3, 4, 5}, kEta, -50, 50);
  for (std::size_t i = 1; i < cells.size(); ++i) EXPECT_GE(*cells[i].schmidt, *cells[i - 1].schmidt);
}

TEST(ScanSchmidt, DivergentCellIsRecordedNotThrown) {
  const double gamma = 1.0;
  const double boundary = 2 * gamma * gamma + 2 * kEta * kEta;
  auto cells = scan_schmidt({0.0, boundary, 5.0}, {gamma}, kEta, -5, 5);
  ASSERT_EQ(cells.size(), 3u);
  EXPECT_TRUE(cells[0].schmidt.has_value());
  EXPECT_FALSE(cells[1].schmidt.has_value());
  EXPECT_NE(cells[1].error.find("divergence"), std::string::npos);
  EXPECT_FALSE(cells[2].schmidt.has_value());
}

TEST(ScanSchmidt, RowOrderAndThreadIndependence) {
  auto grid = linear_grid(-3, 3, 0.25);
  std::vector<double> gammas{1, 2, 3, 4, 5};
  auto serial = scan_schmidt(grid, gammas, kEta, -50, 50, 1);
  auto parallel = scan_schmidt(grid, gammas, kEta, -50, 50, 4);
  ASSERT_EQ(serial.size(), grid.size() * gammas.size());
  for (std::size_t i = 0; i < serial.size(); ++i) {
    EXPECT_EQ(serial[i].a, grid[i / gammas.size()]);
    EXPECT_EQ(serial[i].gamma, gammas[i % gammas.size()]);
    EXPECT_EQ(serial[i].a, parallel[i].a);
    EXPECT_EQ(serial[i].schmidt, parallel[i].schmidt);
  }
}
