#include "alchemy/perron.hpp"

#include <set>

#include "alchemy/shift.hpp"

namespace alchemy {

namespace {

void check_nonnegative_primitive(const Matrix<double>& b) {
  if (b.rows() == 0 || b.rows() != b.cols()) throw std::invalid_argument("Perron matrix must be square and non-empty");
  if (!b.allFinite() || (b.array() < 0.0).any())
    throw std::invalid_argument("Perron matrix must be finite and nonnegative");
  IndexMatrix support = (b.array() > 0.0).cast<int>();
  if (!primitivity_exponent(support)) throw NotPrimitive("Perron iteration needs a primitive support");
}

struct PowerResult {
  double eigenvalue;
  Vector<double> vector;
  double residual;
  int iterations;
};

PowerResult power_iterate(const Matrix<double>& b, Vector<double> v, const PerronOptions& options) {
  v /= v.sum();
  double residual = std::numeric_limits<double>::infinity();
  for (int it = 1; it <= options.max_iterations; ++it) {
    Vector<double> w = b * v;
    const double lambda = w.sum();
    residual = (w - lambda * v).cwiseAbs().maxCoeff() / (lambda * v.cwiseAbs().maxCoeff());
    if (residual <= options.tolerance) return {lambda, v, residual, it};
    v = w / lambda;
  }
  throw NonConvergence("power iteration did not reach residual " + format_double(options.tolerance) + " within " +
                           std::to_string(options.max_iterations) + " iterations (last residual " +
                           format_double(residual) + ")",
                       residual);
}

PowerResult checked_power_iterate(const Matrix<double>& b, const PerronOptions& options) {
  const Eigen::Index n = b.rows();
  PowerResult flat = power_iterate(b, Vector<double>::Ones(n), options);
  Vector<double> ramp = Vector<double>::LinSpaced(n, 1.0, static_cast<double>(n));
  PowerResult tilted = power_iterate(b, ramp, options);
  const double gap = std::abs(flat.eigenvalue - tilted.eigenvalue);
  if (gap > 100.0 * options.tolerance * flat.eigenvalue)
    throw NonConvergence("power iteration converged to different roots from distinct starts", gap);
  return flat;
}

}  // namespace

PerronData<double> perron(const Matrix<double>& weights, const PerronOptions& options) {
  check_nonnegative_primitive(weights);
  PowerResult right = checked_power_iterate(weights, options);
  PowerResult left = checked_power_iterate(weights.transpose(), options);

  PerronData<double> data;
  data.weights = weights;
  data.right = right.vector / right.vector.sum();
  data.left = left.vector / left.vector.dot(data.right);
  // Two-sided Rayleigh quotient.
  data.eigenvalue = data.left.dot(weights * data.right);
  data.residual = std::max(right.residual, left.residual);
  data.iterations = right.iterations + left.iterations;
  if ((data.right.array() <= 0.0).any() || (data.left.array() <= 0.0).any())
    throw NonConvergence("Perron vectors are not strictly positive", data.residual);
  return data;
}

Vector<Rational> exact_null_vector(Matrix<Rational> m) {
  const Eigen::Index rows = m.rows(), cols = m.cols();
  std::vector<Eigen::Index> pivot_cols;
  Eigen::Index r = 0;
  for (Eigen::Index c = 0; c < cols && r < rows; ++c) {
    Eigen::Index p = r;
    while (p < rows && m(p, c) == 0) ++p;
    if (p == rows) continue;
    m.row(p).swap(m.row(r));
    const Rational pivot = m(r, c);
    for (Eigen::Index j = c; j < cols; ++j) m(r, j) /= pivot;
    for (Eigen::Index i = 0; i < rows; ++i) {
      if (i == r || m(i, c) == 0) continue;
      const Rational factor = m(i, c);
      for (Eigen::Index j = c; j < cols; ++j) m(i, j) -= factor * m(r, j);
    }
    pivot_cols.push_back(c);
    ++r;
  }
  if (static_cast<Eigen::Index>(pivot_cols.size()) == cols) return {};

  std::set<Eigen::Index> pivots(pivot_cols.begin(), pivot_cols.end());
  Eigen::Index free_col = 0;
  while (pivots.count(free_col)) ++free_col;
  Vector<Rational> x = Vector<Rational>::Zero(cols);
  x(free_col) = 1;
  for (std::size_t i = 0; i < pivot_cols.size(); ++i)
    x(pivot_cols[i]) = -m(static_cast<Eigen::Index>(i), free_col);
  return x;
}

namespace {

Vector<Rational> positive_eigenvector(const Matrix<Rational>& b, const Rational& rho) {
  const Eigen::Index n = b.rows();
  Matrix<Rational> shifted = b;
  for (Eigen::Index i = 0; i < n; ++i) shifted(i, i) -= rho;
  Vector<Rational> x = exact_null_vector(shifted);
  if (x.size() == 0) return {};
  if (x.sum() < 0) x = -x;
  for (Eigen::Index i = 0; i < n; ++i)
    if (x(i) <= 0) return {};
  Vector<Rational> image = b * x;
  for (Eigen::Index i = 0; i < n; ++i)
    if (image(i) != rho * x(i)) return {};
  return x;
}

}  // namespace

PerronData<Rational> perron_exact(const Matrix<Rational>& weights, const PerronOptions& options) {
  Matrix<double> approx(weights.rows(), weights.cols());
  for (Eigen::Index i = 0; i < weights.rows(); ++i)
    for (Eigen::Index j = 0; j < weights.cols(); ++j) {
      if (weights(i, j) < 0) throw std::invalid_argument("Perron matrix must be nonnegative");
      approx(i, j) = to_double(weights(i, j));
    }
  PerronData<double> guess = perron(approx, options);

  std::vector<Rational> candidates;
  for (std::int64_t bound = 10; bound <= 1'000'000'000'000LL; bound *= 10) {
    Rational c = rationalize(guess.eigenvalue, bound);
    if (std::find(candidates.begin(), candidates.end(), c) == candidates.end()) candidates.push_back(c);
  }
  for (const Rational& rho : candidates) {
    if (rho <= 0) continue;
    Vector<Rational> h = positive_eigenvector(weights, rho);
    if (h.size() == 0) continue;
    Vector<Rational> nu = positive_eigenvector(weights.transpose(), rho);
    if (nu.size() == 0) continue;

    PerronData<Rational> data;
    data.weights = weights;
    data.eigenvalue = rho;
    data.right = h / h.sum();
    data.left = nu / nu.dot(data.right);
    data.residual = 0.0;
    data.iterations = guess.iterations;
    return data;
  }
  throw InexactArithmetic("the Perron root (about " + format_double(guess.eigenvalue) +
                          ") is not a rational number; use floating-point arithmetic");
}

}  // namespace alchemy
