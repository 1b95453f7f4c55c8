#include <gtest/gtest.h>

#include <random>

#include "oamspec/mle.hpp"
#include "oamspec/witness.hpp"

using namespace oamspec;

TEST(Parametrization, StateRoundTrip) {
  std::mt19937_64 rng(3);
  const TriangularParametrization p(3);
  EXPECT_EQ(p.parameters(), 81);
  const auto rho = random_mixed_state(3, 9, rng);
  EXPECT_LE((p.state(p.from_state(rho, 0.0)).rho - rho.rho).cwiseAbs().maxCoeff(), 1e-12);
  const auto pure = random_pure_state(3, rng);
  EXPECT_GT(fidelity(pure, p.state(p.from_state(pure))), 1 - 1e-6);
}

TEST(MleObjective, GradientMatchesCentralDifferences) {
  std::mt19937_64 rng(17);
  const auto c = simulate_counts(random_mixed_state(3, 3, rng), MUBSet(3), 500.0, 9, Noise::Poisson);
  const MleObjective obj(c);
  std::normal_distribution<double> n;
  for (int point = 0; point < 5; ++point) {
    Eigen::VectorXd t(81);
    for (auto& x : t) x = n(rng);
    const Eigen::VectorXd g = obj.gradient(t);
    Eigen::VectorXd fd(81);
    for (int i = 0; i < 81; ++i) {
      const double h = 1e-6 * std::max(1.0, std::abs(t[i]));
      Eigen::VectorXd a = t, b = t;
      a[i] += h;
      b[i] -= h;
      fd[i] = (obj.value(a) - obj.value(b)) / (2 * h);
    }
    EXPECT_LE((g - fd).norm() / g.norm(), 1e-6);
  }
}

TEST(MleObjective, ZeroAtNoiselessTruth) {
  std::mt19937_64 rng(1);
  const auto truth = random_mixed_state(3, 9, rng);
  const auto c = simulate_counts(truth, MUBSet(3), 1e3, 0, Noise::None);
  const MleObjective obj(c);
  EXPECT_NEAR(obj.value(obj.parametrization().from_state(truth, 0.0)), 0.0, 1e-9);
}

TEST(Lbfgs, MinimizesRosenbrock) {
  auto f = [](const Eigen::VectorXd& x, Eigen::VectorXd* g) {
    const double a = 1 - x[0], b = x[1] - x[0] * x[0];
    if (g) {
      g->resize(2);
      (*g)[0] = -2 * a - 400 * x[0] * b;
      (*g)[1] = 200 * b;
    }
    return a * a + 100 * b * b;
  };
  LbfgsOptions o;
  o.relativeDecrease = 0;
  const auto r = lbfgs_minimize(f, Eigen::Vector2d(-1.2, 1.0), o);
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.x[0], 1.0, 1e-7);
  EXPECT_NEAR(r.x[1], 1.0, 1e-7);
}

class MleRoundTrip : public ::testing::TestWithParam<int> {};

TEST_P(MleRoundTrip, NoiselessPureAndMixed) {
  const int d = GetParam();
  std::mt19937_64 rng(100 + d);
  const MUBSet m(d);
  for (int trial = 0; trial < 3; ++trial) {
    const auto pure = random_pure_state(d, rng);
    const auto r = mle_reconstruct(simulate_counts(pure, m, 1e4, 0, Noise::None));
    EXPECT_GE(fidelity(pure, r.rho), 0.9999);
    EXPECT_TRUE(r.rho.is_physical());
  }
  const auto mixed = random_mixed_state(d, d, rng);
  EXPECT_GE(fidelity(mixed, mle_reconstruct(simulate_counts(mixed, m, 1e4, 0, Noise::None)).rho), 0.9999);
}

INSTANTIATE_TEST_SUITE_P(Dims, MleRoundTrip, ::testing::Values(2, 3, 5));

TEST(Mle, AgreesWithLinearOnNoiselessData) {
  std::mt19937_64 rng(8);
  const auto truth = random_mixed_state(3, 9, rng);
  const auto c = simulate_counts(truth, MUBSet(3), 1e4, 0, Noise::None);
  const auto lin = linear_reconstruct(c, su_generators(3));
  ASSERT_TRUE(lin.physical);
  EXPECT_LE((mle_reconstruct(c).rho.rho - lin.rho.rho).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(Mle, IdentityInitReachesSameOptimum) {
  const auto c = simulate_counts(mes(3), MUBSet(3), 2000, 4, Noise::Poisson);
  const auto a = mle_reconstruct(c);
  const auto b = mle_reconstruct(c, maximally_mixed(3));
  EXPECT_GT(fidelity(a.rho, b.rho), 1 - 1e-5);
  EXPECT_NEAR(a.objective, b.objective, 1e-5 * a.objective);
}

TEST(Mle, IterationCapRaisesConvergenceError) {
  const auto c = simulate_counts(mes(3), MUBSet(3), 2000, 4, Noise::Poisson);
  LbfgsOptions o;
  o.maxIterations = 2;
  try {
    mle_reconstruct(c, maximally_mixed(3), o);
    FAIL() << "expected ConvergenceError";
  } catch (const ConvergenceError& e) {
    EXPECT_EQ(e.kind(), "convergence");
    EXPECT_GT(e.objective(), 0.0);
    EXPECT_TRUE(e.last_iterate().is_physical(1e-9));
  }
}

TEST(Mle, RejectsUnphysicalInit) {
  const auto c = simulate_counts(mes(3), MUBSet(3), 2000, 0, Noise::None);
  Eigen::MatrixXcd bad = Eigen::MatrixXcd::Identity(9, 9) / 9.0;
  bad(0, 0) = -0.1;
  EXPECT_THROW(mle_reconstruct(c, DensityMatrix(3, bad)), DomainError);
}
