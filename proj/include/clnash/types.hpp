#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace clnash {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Raised when a vector or matrix argument has the wrong shape. `player()` is
/// the offending player index, or -1 when the mismatch is not player-specific.
class DimensionError : public std::invalid_argument {
 public:
  DimensionError(const std::string& what, int player = -1)
      : std::invalid_argument(what), player_(player) {}
  int player() const { return player_; }

 private:
  int player_;
};

/// Raised when an evaluation produces NaN or Inf.
class NonFiniteError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised for malformed game, basis or gain definitions.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string FormatVector(const Vec& v);

inline double SpectralNorm(const Mat& m) {
  if (m.size() == 0) return 0.0;
  return Eigen::JacobiSVD<Mat>(m).singularValues()(0);
}

/// Smallest eigenvalue of a symmetric matrix.
inline double MinEigenvalue(const Mat& symmetric) {
  if (symmetric.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Mat> solver(symmetric, Eigen::EigenvaluesOnly);
  return solver.eigenvalues()(0);
}

inline double MaxEigenvalue(const Mat& symmetric) {
  if (symmetric.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Mat> solver(symmetric, Eigen::EigenvaluesOnly);
  return solver.eigenvalues()(symmetric.rows() - 1);
}

}  // namespace clnash
