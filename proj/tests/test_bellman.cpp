#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "clnash/bellman.hpp"
#include "clnash/lq_oracle.hpp"
#include "fixtures.hpp"

using namespace clnash;
using fixtures::M1;

namespace {

Vec S(double v) { return Vec::Constant(1, v); }

struct Scalar {
  GameDefinition game = GameDefinition::FromLinear(fixtures::ScalarGame(-1, 1, 1, 1));
  BasisSet basis{{QuadraticBasis(1)}};
};

struct Pair {
  LinearQuadraticGame lq = fixtures::TwoPlayerBenchmark();
  GameDefinition game = GameDefinition::FromLinear(lq);
  BasisSet basis{{QuadraticBasis(2), QuadraticBasis(2)}};
};

}  // namespace

TEST(ApproximatePolicy, ZeroWeights) {
  Scalar s;
  EXPECT_EQ(ApproximatePolicy(s.game, s.basis, 0, S(1.3), S(0))(0), 0.0);
}

TEST(ApproximatePolicy, HandValue) {
  Scalar s;
  EXPECT_DOUBLE_EQ(ApproximatePolicy(s.game, s.basis, 0, S(1), S(0.5))(0), -0.5);
}

TEST(ApproximatePolicy, OriginGivesZero) {
  Scalar s;
  EXPECT_EQ(ApproximatePolicy(s.game, s.basis, 0, S(0), S(0.7))(0), 0.0);
}

TEST(Regressor, HandValues) {
  Scalar s;
  const std::vector<Vec> wa{S(0.5)};
  const RegressorSample r = Regressor(s.game, s.basis, 0, S(1), wa, M1(1), 1.0);
  EXPECT_DOUBLE_EQ(r.omega(0), -3.0);
  EXPECT_DOUBLE_EQ(r.rho, 10.0);
  EXPECT_DOUBLE_EQ(r.normalized(0), -0.3);
}

TEST(Regressor, OriginIsDegenerate) {
  Scalar s;
  const std::vector<Vec> wa{S(0.5)};
  const RegressorSample r = Regressor(s.game, s.basis, 0, S(0), wa, M1(1), 1.0);
  EXPECT_EQ(r.omega(0), 0.0);
  EXPECT_EQ(r.rho, 1.0);
}

TEST(Regressor, NonFiniteNamesPlayerAndTerm) {
  const GameDefinition g(
      1, {1},
      [](const Vec& x) -> Vec {
        return Vec::Constant(1, x(0) > 5 ? std::numeric_limits<double>::quiet_NaN() : -x(0));
      },
      {[](const Vec&) { return M1(1); }}, {M1(1)}, {{M1(1)}});
  const BasisSet b({QuadraticBasis(1)});
  const std::vector<Vec> wa{S(0.5)};
  try {
    Regressor(g, b, 0, S(6), wa, M1(1), 1.0);
    FAIL() << "expected NonFiniteError";
  } catch (const NonFiniteError& e) {
    EXPECT_NE(std::string(e.what()).find("player 0"), std::string::npos) << e.what();
  }
}

TEST(BellmanError, HandValue) {
  Scalar s;
  const std::vector<Vec> wa{S(0.5)};
  const RegressorSample r = Regressor(s.game, s.basis, 0, S(1), wa, M1(1), 1.0);
  EXPECT_DOUBLE_EQ(BellmanError(s.game, s.basis, 0, S(1), S(1), wa, r), -1.75);
}

TEST(BellmanError, VanishesAtOrigin) {
  Pair p;
  const std::vector<Vec> wa{Vec::Constant(3, 0.4), Vec::Constant(3, -0.2)};
  const RegressorSample r = Regressor(p.game, p.basis, 1, Vec::Zero(2), wa, Mat::Identity(3, 3), 1.0);
  EXPECT_EQ(BellmanError(p.game, p.basis, 1, Vec::Zero(2), Vec::Constant(3, 2.0), wa, r), 0.0);
}

TEST(BellmanError, VanishesAtScalarClosedForm) {
  Scalar s;
  const double p = fixtures::ScalarAreClosedForm(-1, 1, 1, 1);
  const std::vector<Vec> wa{S(p)};
  std::mt19937_64 rng(3);
  for (int k = 0; k < 50; ++k) {
    const Vec x = fixtures::RandomVec(rng, 1, -3, 3);
    const RegressorSample r = Regressor(s.game, s.basis, 0, x, wa, M1(1), 1.0);
    EXPECT_LE(std::abs(BellmanError(s.game, s.basis, 0, x, S(p), wa, r)), 1e-12);
  }
}

TEST(BellmanError, VanishesAtCoupledRiccatiWeights) {
  Pair p;
  const auto W = OracleWeights(SolveCoupledRiccati(p.lq), p.basis);
  std::mt19937_64 rng(4);
  for (int k = 0; k < 100; ++k) {
    const Vec x = fixtures::RandomVec(rng, 2, -2, 2);
    for (int i = 0; i < 2; ++i) {
      const RegressorSample r = Regressor(p.game, p.basis, i, x, W, Mat::Identity(3, 3), 1.0);
      EXPECT_LE(std::abs(BellmanError(p.game, p.basis, i, x, W[i], W, r)), 1e-8);
    }
  }
}

TEST(BellmanErrorProperty, MatchesMatrixForm) {
  Pair p;
  std::mt19937_64 rng(8);
  for (int k = 0; k < 100; ++k) {
    const Vec x = fixtures::RandomVec(rng, 2, -2, 2);
    const std::vector<Vec> wa{fixtures::RandomVec(rng, 3), fixtures::RandomVec(rng, 3)};
    const std::vector<Mat> Pa{fixtures::MatrixOf(wa[0], 2), fixtures::MatrixOf(wa[1], 2)};
    for (int i = 0; i < 2; ++i) {
      const Vec wc = fixtures::RandomVec(rng, 3);
      const RegressorSample r = Regressor(p.game, p.basis, i, x, wa, Mat::Identity(3, 3), 1.0);
      const double expect = fixtures::MatrixBellmanError(p.lq, i, x, fixtures::MatrixOf(wc, 2), Pa);
      EXPECT_NEAR(BellmanError(p.game, p.basis, i, x, wc, wa, r), expect, 1e-12);
    }
  }
}

TEST(BellmanErrorProperty, AffineInCriticWeights) {
  Pair p;
  std::mt19937_64 rng(9);
  for (int k = 0; k < 50; ++k) {
    const Vec x = fixtures::RandomVec(rng, 2, -2, 2);
    const std::vector<Vec> wa{fixtures::RandomVec(rng, 3), fixtures::RandomVec(rng, 3)};
    const Vec a = fixtures::RandomVec(rng, 3), b = fixtures::RandomVec(rng, 3);
    const RegressorSample r = Regressor(p.game, p.basis, 0, x, wa, Mat::Identity(3, 3), 1.0);
    auto d = [&](const Vec& wc) { return BellmanError(p.game, p.basis, 0, x, wc, wa, r); };
    EXPECT_NEAR(d(a) + d(b) - d(Vec::Zero(3)), d(a + b), 1e-12);
  }
}

TEST(RegressorProperty, NormalizationBounds) {
  Pair p;
  std::mt19937_64 rng(10);
  for (int k = 0; k < 200; ++k) {
    const Vec x = fixtures::RandomVec(rng, 2, -4, 4);
    const std::vector<Vec> wa{fixtures::RandomVec(rng, 3, -3, 3), fixtures::RandomVec(rng, 3, -3, 3)};
    Mat G = Mat::Random(3, 3);
    G = G * G.transpose() + 0.05 * Mat::Identity(3, 3);
    const double nu = 0.1 + std::abs(fixtures::RandomVec(rng, 1)(0));
    const RegressorSample r = Regressor(p.game, p.basis, 1, x, wa, G, nu);
    EXPECT_GE(r.rho, 1.0);
    EXPECT_LE(r.normalized.norm(), 1.0 / (2.0 * std::sqrt(nu * MinEigenvalue(G))) * (1 + 1e-12));
  }
}

TEST(ExtrapolatedBellmanErrors, OriginPointIsDegenerate) {
  Scalar s;
  const ExtrapolationGrid grid(s.game, s.basis, {{S(0)}});
  const std::vector<Vec> wa{S(0.5)};
  const auto e = ExtrapolatedBellmanErrors(s.game, grid, 0, S(1), wa, M1(1), 1.0);
  ASSERT_EQ(e.size(), 1u);
  EXPECT_EQ(e[0].delta, 0.0);
  EXPECT_EQ(e[0].regressor.omega(0), 0.0);
}

TEST(ExtrapolatedBellmanErrors, SinglePointMatchesDirectEvaluation) {
  Scalar s;
  const ExtrapolationGrid grid(s.game, s.basis, {{S(1)}});
  const std::vector<Vec> wa{S(0.5)};
  const auto e = ExtrapolatedBellmanErrors(s.game, grid, 0, S(1), wa, M1(1), 1.0);
  EXPECT_DOUBLE_EQ(e[0].delta, -1.75);
  EXPECT_DOUBLE_EQ(e[0].regressor.omega(0), -3.0);
  EXPECT_DOUBLE_EQ(e[0].regressor.rho, 10.0);
}

TEST(ExtrapolatedBellmanErrors, VanishAtRiccatiWeights) {
  Pair p;
  const auto W = OracleWeights(SolveCoupledRiccati(p.lq), p.basis);
  const auto pts = ExtrapolationGrid::Scatter(Vec::Constant(2, -2), Vec::Constant(2, 2), 30);
  const ExtrapolationGrid grid(p.game, p.basis, {pts, pts});
  for (int i = 0; i < 2; ++i)
    for (const auto& b : ExtrapolatedBellmanErrors(p.game, grid, i, W[i], W, Mat::Identity(3, 3), 1.0))
      EXPECT_LE(std::abs(b.delta), 1e-8);
}

TEST(ExtrapolatedBellmanErrors, UseCurrentActorWeights) {
  Scalar s;
  const ExtrapolationGrid grid(s.game, s.basis, {{S(1)}});
  const std::vector<Vec> w1{S(0.5)}, w2{S(0.9)};
  const auto a = ExtrapolatedBellmanErrors(s.game, grid, 0, S(1), w1, M1(1), 1.0);
  const auto b = ExtrapolatedBellmanErrors(s.game, grid, 0, S(1), w2, M1(1), 1.0);
  EXPECT_NE(a[0].regressor.omega(0), b[0].regressor.omega(0));
}

TEST(ExtrapolationGrid, RejectsEmptyPlayerGrid) {
  Scalar s;
  EXPECT_THROW(ExtrapolationGrid(s.game, s.basis, {{}}), ConfigError);
}

TEST(ExtrapolationGrid, LatticeExcludesOrigin) {
  const auto pts = ExtrapolationGrid::Lattice(Vec::Constant(2, -1), Vec::Constant(2, 1), {3, 3});
  EXPECT_EQ(pts.size(), 8u);
  for (const Vec& x : pts) EXPECT_FALSE(x.isZero(0.0));
  EXPECT_EQ(ExtrapolationGrid::Lattice(Vec::Constant(2, -1), Vec::Constant(2, 1), {3, 3}, false).size(), 9u);
}

TEST(ExtrapolationGrid, ScatterIsDeterministicAndInside) {
  const Vec lo = (Vec(2) << -1, 0).finished(), hi = (Vec(2) << 2, 3).finished();
  const auto a = ExtrapolationGrid::Scatter(lo, hi, 25), b = ExtrapolationGrid::Scatter(lo, hi, 25);
  ASSERT_EQ(a.size(), 25u);
  for (std::size_t k = 0; k < a.size(); ++k) {
    EXPECT_EQ(a[k], b[k]);
    EXPECT_TRUE((a[k].array() >= lo.array()).all() && (a[k].array() <= hi.array()).all());
  }
}

TEST(AnalyticBellmanError, ZeroErrorsGiveZero) {
  Pair p;
  const auto W = OracleWeights(SolveCoupledRiccati(p.lq), p.basis);
  const std::vector<Vec> zero{Vec::Zero(3), Vec::Zero(3)};
  const Vec x = (Vec(2) << 0.7, -1.1).finished();
  EXPECT_LE(std::abs(AnalyticBellmanError(p.game, p.basis, 0, x, W, Vec::Zero(3), zero)), 1e-12);
}

TEST(AnalyticBellmanError, ScalarMatchesMeasurableForm) {
  Scalar s;
  const std::vector<Vec> W{S(fixtures::ScalarAreClosedForm(-1, 1, 1, 1))};
  std::mt19937_64 rng(21);
  for (int k = 0; k < 100; ++k) {
    const Vec x = fixtures::RandomVec(rng, 1, -2, 2);
    const Vec wc_err = fixtures::RandomVec(rng, 1), wa_err = fixtures::RandomVec(rng, 1);
    const std::vector<Vec> errs{wa_err};
    const std::vector<Vec> wa{W[0] - wa_err};
    const RegressorSample r = Regressor(s.game, s.basis, 0, x, wa, M1(1), 1.0);
    const double measurable = BellmanError(s.game, s.basis, 0, x, W[0] - wc_err, wa, r);
    EXPECT_NEAR(AnalyticBellmanError(s.game, s.basis, 0, x, W, wc_err, errs), measurable, 1e-10);
  }
}

TEST(AnalyticBellmanError, TwoPlayerMatchesMeasurableForm) {
  Pair p;
  const auto W = OracleWeights(SolveCoupledRiccati(p.lq), p.basis);
  std::mt19937_64 rng(22);
  double worst = 0;
  for (int k = 0; k < 20; ++k) {
    const Vec x = fixtures::RandomVec(rng, 2, -2, 2);
    const std::vector<Vec> wa_err{fixtures::RandomVec(rng, 3), fixtures::RandomVec(rng, 3)};
    const std::vector<Vec> wa{W[0] - wa_err[0], W[1] - wa_err[1]};
    for (int i = 0; i < 2; ++i) {
      const Vec wc_err = fixtures::RandomVec(rng, 3);
      const RegressorSample r = Regressor(p.game, p.basis, i, x, wa, Mat::Identity(3, 3), 1.0);
      const double measurable = BellmanError(p.game, p.basis, i, x, W[i] - wc_err, wa, r);
      worst = std::max(worst, std::abs(AnalyticBellmanError(p.game, p.basis, i, x, W, wc_err, wa_err) - measurable));
    }
  }
  EXPECT_LE(worst, 1e-8);
}
