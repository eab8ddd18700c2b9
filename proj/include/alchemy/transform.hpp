#ifndef ALCHEMY_TRANSFORM_HPP
#define ALCHEMY_TRANSFORM_HPP

#include <optional>
#include <vector>

#include "alchemy/core.hpp"
#include "alchemy/potential.hpp"
#include "alchemy/shift.hpp"
#include "alchemy/thermo.hpp"

namespace alchemy {

/// raw integrates e^{S_n(G2 - G1)}; pressure multiplies by e^{n P(G1)}.
/// Ratios such as lambda_n are identical in both modes.
enum class Normalization { raw, pressure };

/// Turning the Gibbs measure of a reference potential G1 into the
/// equilibrium state of a target G2 on a mixing shift.
///
/// The reference measures live on the unstable fiber of `past`:
///
///   lambda_n(A) = int_{A} e^{S_n G2 - S_n G1} dmu^u / int e^{S_n G2 - S_n G1} dmu^u
///
/// and mu_n = (1/n) sum_{i<n} sigma^i_* lambda_n. Both potentials must be
/// one-sided; they share an L-block presentation with L = max(1, r1 - 1, r2 - 1),
/// so the integrand becomes the edge weight W(u,v) = Q1(u,v) e^{(G2-G1)(e)}.
template <typename Scalar>
class TransformJob {
 public:
  TransformJob(LocallyConstantPotential reference, LocallyConstantPotential target, PastWord past,
               Normalization normalization = Normalization::raw, Word pinned = {},
               const ThermoOptions& options = {});

  const ShiftSpace& space() const { return reference_.space(); }
  const LocallyConstantPotential& reference() const { return reference_; }
  const LocallyConstantPotential& target() const { return target_; }
  const PastWord& past() const { return fiber_.past(); }
  const UnstableFiberMeasure<Scalar>& fiber() const { return fiber_; }
  const BlockCode& code() const { return fiber_.code(); }
  int block_length() const { return fiber_.code().block_length(); }
  Normalization normalization() const { return normalization_; }
  const ThermoOptions& options() const { return options_; }

  /// Q1, the fiber chain.
  const Matrix<Scalar>& plain_step() const { return fiber_.state().transition; }
  /// Q1 times the integrand weight on each edge.
  const Matrix<Scalar>& weighted_step() const { return weighted_; }
  /// e^{P(G1)}.
  const Scalar& reference_eigenvalue() const { return fiber_.state().perron.eigenvalue; }
  double reference_pressure() const { return fiber_.state().pressure; }

  /// Edges ending at fiber coordinate c carry the integrand iff 0 <= c - L < n.
  bool weighted_at(int coordinate, int n) const {
    const int t = coordinate - block_length();
    return t >= 0 && t < n;
  }
  /// Fiber coordinates the integrand of S_n reaches: 0..n + L - 1.
  int horizon(int n) const { return n + block_length(); }

 private:
  LocallyConstantPotential reference_;
  LocallyConstantPotential target_;
  Normalization normalization_;
  ThermoOptions options_;
  UnstableFiberMeasure<Scalar> fiber_;
  Matrix<Scalar> weighted_;
};

/// A value kept as mantissa * e^{log_scale}. Exact scalars never rescale.
template <typename Scalar>
struct Scaled {
  Scalar mantissa{};
  double log_scale = 0.0;

  bool is_zero() const { return mantissa == Scalar(0); }
  double log() const { return log_of(mantissa) + log_scale; }
  Scalar value() const;
};

/// Z_n and, for a constraint, K_{n,A}.
template <typename Scalar>
struct PartitionSums {
  int n = 0;
  Scaled<Scalar> z;
  std::optional<Scaled<Scalar>> k;
};

/// Z_n (and K_{n,A} when a constraint is given) by transfer contraction in
/// O(n k^2). Throws if the constraint word is inadmissible or cannot follow
/// the past.
template <typename Scalar>
PartitionSums<Scalar> partition_sum(const TransformJob<Scalar>& job, int n,
                                    const std::optional<FiberConstraint>& constraint = std::nullopt);

/// lambda_n of the fiber set given by the constraint; 0 for an empty set.
template <typename Scalar>
Scalar lambda_n_eval(const TransformJob<Scalar>& job, int n, const FiberConstraint& constraint);

/// sigma^i_* lambda_n (A) = lambda_n(sigma^{-i} A intersected with the fiber).
template <typename Scalar>
Scalar pushforward_eval(const TransformJob<Scalar>& job, int n, int shift, const TwoSidedCylinder& cylinder);

/// sigma^i_* lambda_n (A) for i = 0..last_shift from one forward and one
/// backward sweep; each term then costs O(span k^2).
template <typename Scalar>
std::vector<Scalar> pushforward_series(const TransformJob<Scalar>& job, int n, const TwoSidedCylinder& cylinder,
                                       int last_shift);

/// mu_n(A) = (1/n) sum_{i=0}^{n-1} sigma^i_* lambda_n(A).
template <typename Scalar>
Scalar mu_n_eval(const TransformJob<Scalar>& job, int n, const TwoSidedCylinder& cylinder);

/// sigma^n_* lambda_n (A); needs n > M + N.
template <typename Scalar>
Scalar endpoint_eval(const TransformJob<Scalar>& job, int n, const TwoSidedCylinder& cylinder);

struct GrowthRow {
  int n = 0;
  double log_z = 0.0;
  double rate = 0.0;       // (1/n) log Z_n
  double increment = 0.0;  // log Z_{n+1} - log Z_n
};

struct GrowthSeries {
  std::vector<GrowthRow> rows;
  /// P(G2) - P(G1) for raw normalization, P(G2) otherwise.
  double target = 0.0;
};

template <typename Scalar>
GrowthSeries growth_series(const TransformJob<Scalar>& job, const std::vector<int>& ns);

template <typename Scalar>
struct ConvergenceRow {
  int n = 0;
  Scalar value{};
  double abs_error = 0.0;
  double n_error = 0.0;
};

template <typename Scalar>
struct ConvergenceReport {
  Scalar reference{};  // mu_{G2}(A)
  std::vector<ConvergenceRow<Scalar>> rows;
  /// Least-squares C in abs_error ~ C / n.
  double fitted_constant = 0.0;
  double max_n_error = 0.0;
  /// max n * error within 10% of the fitted constant (with a 1e-9 floor).
  bool bounded = false;
};

template <typename Scalar>
ConvergenceReport<Scalar> convergence_report(const TransformJob<Scalar>& job, const TwoSidedCylinder& cylinder,
                                             const std::vector<int>& ns);

/// Shared forward/backward sweeps for one (job, n), reusable across
/// cylinders.
template <typename Scalar>
class FiberSweep {
 public:
  FiberSweep(const TransformJob<Scalar>& job, int n, int last_coordinate);

  /// lambda_n of a constraint lying inside 0..last_coordinate.
  Scalar lambda(const FiberConstraint& constraint) const;
  Scalar pushforward(int shift, const TwoSidedCylinder& cylinder) const;
  Scalar mu_n(const TwoSidedCylinder& cylinder) const;
  const Scaled<Scalar>& z() const { return z_; }

 private:
  const Matrix<Scalar>& step(int coordinate) const;
  bool pinned_ok(int coordinate, Symbol s) const;

  const TransformJob<Scalar>* job_;
  int n_;
  int length_;
  std::vector<RowVector<Scalar>> forward_;
  std::vector<double> forward_log_;
  std::vector<Vector<Scalar>> backward_;
  std::vector<double> backward_log_;
  Scaled<Scalar> z_;
};

}  // namespace alchemy

#include "alchemy/transform_impl.hpp"

#endif  // ALCHEMY_TRANSFORM_HPP
