#pragma once

#include <functional>
#include <string>
#include <vector>

#include "clnash/types.hpp"

namespace clnash {

/// One player's value-function features sigma(x) and their Jacobian sigma'(x)
/// (feature_count x n). Features must vanish at the origin.
struct FeatureMap {
  std::string name;
  int state_dim = 0;
  int feature_count = 0;
  std::function<Vec(const Vec&)> features;
  std::function<Mat(const Vec&)> jacobian;
};

/// All monomials x_a x_b with a <= b, ordered lexicographically by (a, b).
FeatureMap QuadraticBasis(int state_dim);

/// All monomials of total degree 2..degree. Within a degree, exponent tuples are
/// ordered descending lexicographically, so PolynomialBasis(n, 2) reproduces
/// QuadraticBasis(n) exactly.
FeatureMap PolynomialBasis(int state_dim, int degree);

/// Exponent tuples used by PolynomialBasis, in feature order.
std::vector<std::vector<int>> PolynomialExponents(int state_dim, int degree);

/// Per-player feature maps. Immutable after construction.
class BasisSet {
 public:
  explicit BasisSet(std::vector<FeatureMap> per_player);

  int num_players() const { return static_cast<int>(maps_.size()); }
  int feature_count(int i) const { return maps_.at(i).feature_count; }
  const FeatureMap& map(int i) const { return maps_.at(i); }
  /// True when every player uses the quadratic basis on the same state dimension.
  bool all_quadratic() const;

  Vec Features(int i, const Vec& x) const;
  Mat Jacobian(int i, const Vec& x) const;

 private:
  std::vector<FeatureMap> maps_;
};

/// Central differences with per-coordinate step max(1e-6, 1e-6 ||x||).
Mat FiniteDifferenceJacobian(const FeatureMap& map, const Vec& x);

/// max |J - J_fd| / max(1, max |J_fd|) at x.
double JacobianRelativeError(const FeatureMap& map, const Vec& x);

// Quadratic-basis weight convention: the weight of x_a^2 is P_aa and the weight
// of x_a x_b (a < b) is 2 P_ab, so that w^T sigma(x) = x^T P x.
Vec QuadraticWeightsFromMatrix(const Mat& P);
Mat QuadraticMatrixFromWeights(const Vec& w, int state_dim);

}  // namespace clnash
