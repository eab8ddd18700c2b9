#ifndef ALCHEMY_PERRON_HPP
#define ALCHEMY_PERRON_HPP

#include "alchemy/core.hpp"

namespace alchemy {

struct PerronOptions {
  /// Stop once ||B v - rho v||_inf <= tolerance * rho * ||v||_inf.
  double tolerance = 1e-13;
  int max_iterations = 1'000'000;
};

/// Perron eigendata of a nonnegative primitive matrix B.
///
/// `right` is normalized to sum to one and `left` so that left . right = 1.
/// Both are strictly positive.
template <typename Scalar>
struct PerronData {
  Matrix<Scalar> weights;
  Scalar eigenvalue{};
  Vector<Scalar> right;
  Vector<Scalar> left;
  double residual = 0.0;
  int iterations = 0;
};

/// Power iteration on B and B^T, checked from two distinct starting vectors.
/// Throws NotPrimitive for a non-primitive support and NonConvergence when
/// the residual does not reach the tolerance.
PerronData<double> perron(const Matrix<double>& weights, const PerronOptions& options = {});

/// Exact Perron data. The floating-point root is turned into rational
/// candidates whose eigenvectors are then solved for and verified exactly.
/// Throws InexactArithmetic when the root is not a (small) rational.
PerronData<Rational> perron_exact(const Matrix<Rational>& weights, const PerronOptions& options = {});

inline PerronData<double> perron_of(const Matrix<double>& weights, const PerronOptions& options = {}) {
  return perron(weights, options);
}
inline PerronData<Rational> perron_of(const Matrix<Rational>& weights, const PerronOptions& options = {}) {
  return perron_exact(weights, options);
}

/// Null vector of a square rational matrix by exact elimination, or an empty
/// vector when the matrix is nonsingular.
Vector<Rational> exact_null_vector(Matrix<Rational> m);

}  // namespace alchemy

#endif  // ALCHEMY_PERRON_HPP
