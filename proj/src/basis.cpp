#include "clnash/basis.hpp"

#include <algorithm>
#include <cmath>

namespace clnash {

namespace {

void CheckFinite(const Eigen::Ref<const Mat>& value, const std::string& what, const Vec& x) {
  if (!value.allFinite())
    throw NonFiniteError(what + " is not finite at x = " + FormatVector(x));
}

// Exponent tuples of total degree `degree` in descending lexicographic order.
void CollectDegree(int n, int degree, int coord, std::vector<int>& current,
                   std::vector<std::vector<int>>& out) {
  if (coord == n - 1) {
    current[coord] = degree;
    out.push_back(current);
    return;
  }
  for (int e = degree; e >= 0; --e) {
    current[coord] = e;
    CollectDegree(n, degree - e, coord + 1, current, out);
  }
  current[coord] = 0;
}

}  // namespace

FeatureMap QuadraticBasis(int state_dim) {
  if (state_dim < 1) throw ConfigError("quadratic basis needs n >= 1");
  const int n = state_dim;
  FeatureMap map;
  map.name = "quadratic";
  map.state_dim = n;
  map.feature_count = n * (n + 1) / 2;
  map.features = [n](const Vec& x) {
    Vec s(n * (n + 1) / 2);
    int k = 0;
    for (int a = 0; a < n; ++a)
      for (int b = a; b < n; ++b) s(k++) = x(a) * x(b);
    return s;
  };
  map.jacobian = [n](const Vec& x) {
    Mat J = Mat::Zero(n * (n + 1) / 2, n);
    int k = 0;
    for (int a = 0; a < n; ++a) {
      for (int b = a; b < n; ++b) {
        J(k, a) += x(b);
        J(k, b) += x(a);
        ++k;
      }
    }
    return J;
  };
  return map;
}

std::vector<std::vector<int>> PolynomialExponents(int state_dim, int degree) {
  std::vector<std::vector<int>> out;
  std::vector<int> current(state_dim, 0);
  for (int d = 2; d <= degree; ++d) CollectDegree(state_dim, d, 0, current, out);
  return out;
}

FeatureMap PolynomialBasis(int state_dim, int degree) {
  if (state_dim < 1) throw ConfigError("polynomial basis needs n >= 1");
  if (degree < 2) throw ConfigError("polynomial basis degree must be at least 2");
  const auto exps = PolynomialExponents(state_dim, degree);
  const int n = state_dim;
  const int p = static_cast<int>(exps.size());
  FeatureMap map;
  map.name = "polynomial(degree=" + std::to_string(degree) + ")";
  map.state_dim = n;
  map.feature_count = p;
  map.features = [exps, n, p](const Vec& x) {
    Vec s(p);
    for (int k = 0; k < p; ++k) {
      double v = 1.0;
      for (int a = 0; a < n; ++a) v *= std::pow(x(a), exps[k][a]);
      s(k) = v;
    }
    return s;
  };
  map.jacobian = [exps, n, p](const Vec& x) {
    Mat J = Mat::Zero(p, n);
    for (int k = 0; k < p; ++k) {
      for (int c = 0; c < n; ++c) {
        if (exps[k][c] == 0) continue;
        double v = exps[k][c] * std::pow(x(c), exps[k][c] - 1);
        for (int a = 0; a < n; ++a)
          if (a != c) v *= std::pow(x(a), exps[k][a]);
        J(k, c) = v;
      }
    }
    return J;
  };
  return map;
}

BasisSet::BasisSet(std::vector<FeatureMap> per_player) : maps_(std::move(per_player)) {
  if (maps_.empty()) throw ConfigError("basis set needs at least one player");
  for (std::size_t i = 0; i < maps_.size(); ++i) {
    const FeatureMap& m = maps_[i];
    if (m.feature_count < 1 || m.state_dim < 1 || !m.features || !m.jacobian)
      throw ConfigError("player " + std::to_string(i) + ": incomplete feature map");
    const Vec s0 = m.features(Vec::Zero(m.state_dim));
    if (s0.size() != m.feature_count)
      throw DimensionError("player " + std::to_string(i) + ": feature length mismatch", int(i));
    if (s0.cwiseAbs().maxCoeff() > 1e-12)
      throw ConfigError("player " + std::to_string(i) + ": features must vanish at the origin");
  }
}

bool BasisSet::all_quadratic() const {
  return std::all_of(maps_.begin(), maps_.end(), [&](const FeatureMap& m) {
    return m.name == "quadratic" && m.state_dim == maps_.front().state_dim;
  });
}

Vec BasisSet::Features(int i, const Vec& x) const {
  const FeatureMap& m = map(i);
  if (x.size() != m.state_dim) throw DimensionError("state has wrong length", i);
  Vec s = m.features(x);
  CheckFinite(s, "features of player " + std::to_string(i), x);
  return s;
}

Mat BasisSet::Jacobian(int i, const Vec& x) const {
  const FeatureMap& m = map(i);
  if (x.size() != m.state_dim) throw DimensionError("state has wrong length", i);
  Mat J = m.jacobian(x);
  if (J.rows() != m.feature_count || J.cols() != m.state_dim)
    throw DimensionError("jacobian of player " + std::to_string(i) + " has wrong shape", i);
  CheckFinite(J, "jacobian of player " + std::to_string(i), x);
  return J;
}

Mat FiniteDifferenceJacobian(const FeatureMap& map, const Vec& x) {
  const double h = std::max(1e-6, 1e-6 * x.norm());
  Mat J(map.feature_count, map.state_dim);
  for (int c = 0; c < map.state_dim; ++c) {
    Vec xp = x, xm = x;
    xp(c) += h;
    xm(c) -= h;
    J.col(c) = (map.features(xp) - map.features(xm)) / (2.0 * h);
  }
  return J;
}

double JacobianRelativeError(const FeatureMap& map, const Vec& x) {
  const Mat fd = FiniteDifferenceJacobian(map, x);
  const Mat analytic = map.jacobian(x);
  const double scale = std::max(1.0, fd.cwiseAbs().maxCoeff());
  return (analytic - fd).cwiseAbs().maxCoeff() / scale;
}

Vec QuadraticWeightsFromMatrix(const Mat& P) {
  const int n = static_cast<int>(P.rows());
  if (P.cols() != n) throw DimensionError("weight matrix must be square");
  Vec w(n * (n + 1) / 2);
  int k = 0;
  for (int a = 0; a < n; ++a)
    for (int b = a; b < n; ++b) w(k++) = (a == b) ? P(a, a) : P(a, b) + P(b, a);
  return w;
}

Mat QuadraticMatrixFromWeights(const Vec& w, int state_dim) {
  const int n = state_dim;
  if (w.size() != n * (n + 1) / 2) throw DimensionError("weight vector length mismatch");
  Mat P(n, n);
  int k = 0;
  for (int a = 0; a < n; ++a) {
    for (int b = a; b < n; ++b) {
      if (a == b) {
        P(a, a) = w(k);
      } else {
        P(a, b) = P(b, a) = 0.5 * w(k);
      }
      ++k;
    }
  }
  return P;
}

}  // namespace clnash
