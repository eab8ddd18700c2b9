// Template definitions for transform.hpp.

#ifndef ALCHEMY_TRANSFORM_IMPL_HPP
#define ALCHEMY_TRANSFORM_IMPL_HPP

#include <cmath>

namespace alchemy {

namespace detail {

inline void require_transformable(const LocallyConstantPotential& reference, const LocallyConstantPotential& target) {
  if (!(reference.space() == target.space()))
    throw std::invalid_argument("reference and target potentials live on different shift spaces");
  reference.space().require_primitive("the transform construction");
  if (!reference.one_sided() || !target.one_sided())
    throw std::invalid_argument("transform potentials must be one-sided; apply shift_reduce first");
}

template <typename Scalar>
UnstableFiberMeasure<Scalar> reference_fiber(const LocallyConstantPotential& reference,
                                             const LocallyConstantPotential& target, const PastWord& past,
                                             Word pinned, const ThermoOptions& options) {
  require_transformable(reference, target);
  const int l = std::max(presentation_length(reference), presentation_length(target));
  return conditional_unstable_measure<Scalar>(past, reference, options, std::move(pinned), l);
}

/// Divides by the largest magnitude and returns its log; a no-op for exact
/// scalars.
template <typename Scalar, typename Derived>
double rescale(Eigen::MatrixBase<Derived>& v) {
  if constexpr (is_exact_v<Scalar>) {
    return 0.0;
  } else {
    const double s = v.cwiseAbs().maxCoeff();
    if (s == 0.0 || !std::isfinite(s)) return 0.0;
    v /= s;
    return std::log(s);
  }
}

template <typename Scalar>
Scaled<Scalar> make_scaled(Scalar mantissa, double log_scale) {
  return Scaled<Scalar>{std::move(mantissa), log_scale};
}

/// Ratio of two scaled values as a plain scalar.
template <typename Scalar>
Scalar ratio(const Scaled<Scalar>& num, const Scaled<Scalar>& den) {
  if (num.is_zero()) return Scalar(0);
  if constexpr (is_exact_v<Scalar>) {
    return num.mantissa / den.mantissa;
  } else {
    return num.mantissa / den.mantissa * std::exp(num.log_scale - den.log_scale);
  }
}

inline bool symbol_allowed(const Word& pinned, const FiberConstraint* constraint, int coordinate, Symbol s) {
  if (coordinate < static_cast<int>(pinned.size()) && pinned[static_cast<std::size_t>(coordinate)] != s) return false;
  if (constraint && coordinate >= constraint->offset && coordinate < constraint->end()) {
    const Symbol want = constraint->symbols[static_cast<std::size_t>(coordinate - constraint->offset)];
    if (want != kAnySymbol && want != s) return false;
  }
  return true;
}

template <typename Scalar, typename Derived>
void apply_mask(const BlockCode& code, const Word& pinned, const FiberConstraint* constraint, int coordinate,
                Eigen::MatrixBase<Derived>& v) {
  for (int u = 0; u < code.size(); ++u)
    if (!symbol_allowed(pinned, constraint, coordinate, code.last_symbol(u))) v(u) = Scalar(0);
}

/// Admissibility of the constraint word (ignoring wildcards) and of its
/// splice onto the past. Returns false for a forbidden splice; throws for an
/// inadmissible word.
inline bool check_constraint(const ShiftSpace& space, const PastWord& past, const FiberConstraint& c) {
  const int k = space.alphabet_size();
  for (std::size_t j = 0; j < c.symbols.size(); ++j) {
    const Symbol s = c.symbols[j];
    if (s == kAnySymbol) continue;
    if (s < 0 || s >= k) throw std::invalid_argument("constraint symbol " + std::to_string(s) + " outside alphabet");
    if (j > 0 && c.symbols[j - 1] != kAnySymbol && !space.allows(c.symbols[j - 1], s))
      throw std::invalid_argument("constraint word " + to_string(c.symbols) + " is inadmissible: transition " +
                                  std::to_string(c.symbols[j - 1]) + "->" + std::to_string(s) + " is forbidden");
  }
  if (c.offset < 0) throw std::invalid_argument("fiber constraints start at coordinate 0 or later");
  if (c.offset == 0 && !c.symbols.empty() && c.symbols.front() != kAnySymbol &&
      !space.allows(past.last(), c.symbols.front()))
    return false;
  return true;
}

/// Sum over fiber paths up to the horizon of Q1-mass times integrand,
/// restricted by the pins and an optional constraint. Unnormalized.
template <typename Scalar>
Scaled<Scalar> contract(const TransformJob<Scalar>& job, int n, const FiberConstraint* constraint) {
  const BlockCode& code = job.code();
  const Word& pinned = job.fiber().pinned();
  int length = std::max(job.horizon(n), static_cast<int>(pinned.size()));
  if (constraint) length = std::max(length, constraint->end());
  RowVector<Scalar> v = RowVector<Scalar>::Zero(code.size());
  v(job.fiber().start_block()) = Scalar(1);
  double log_scale = 0.0;
  for (int c = 0; c < length; ++c) {
    v = v * (job.weighted_at(c, n) ? job.weighted_step() : job.plain_step());
    apply_mask<Scalar>(code, pinned, constraint, c, v);
    log_scale += rescale<Scalar>(v);
  }
  return make_scaled<Scalar>(v.sum(), log_scale);
}

/// Divide by the pinned mass and apply the pressure normalization.
template <typename Scalar>
Scaled<Scalar> normalize_sum(const TransformJob<Scalar>& job, int n, Scaled<Scalar> raw) {
  if constexpr (is_exact_v<Scalar>) {
    raw.mantissa /= job.fiber().pinned_mass();
    if (job.normalization() == Normalization::pressure)
      raw.mantissa *= detail::power(job.reference_eigenvalue(), n);
  } else {
    raw.log_scale -= std::log(job.fiber().pinned_mass());
    if (job.normalization() == Normalization::pressure) raw.log_scale += n * job.reference_pressure();
  }
  return raw;
}

}  // namespace detail

template <typename Scalar>
Scalar Scaled<Scalar>::value() const {
  if constexpr (is_exact_v<Scalar>) {
    return mantissa;
  } else {
    return mantissa * std::exp(log_scale);
  }
}

template <typename Scalar>
TransformJob<Scalar>::TransformJob(LocallyConstantPotential reference, LocallyConstantPotential target, PastWord past,
                                   Normalization normalization, Word pinned, const ThermoOptions& options)
    : reference_(std::move(reference)),
      target_(std::move(target)),
      normalization_(normalization),
      options_(options),
      fiber_(detail::reference_fiber<Scalar>(reference_, target_, past, std::move(pinned), options)) {
  const BlockCode& code = fiber_.code();
  const int k = space().alphabet_size();
  const auto r1 = static_cast<std::size_t>(reference_.window().future);
  const auto r2 = static_cast<std::size_t>(target_.window().future);
  const Matrix<Scalar>& q = fiber_.state().transition;
  weighted_ = Matrix<Scalar>::Zero(code.size(), code.size());
  for (int u = 0; u < code.size(); ++u)
    for (Symbol s = 0; s < k; ++s) {
      const int v = code.successor(u, s);
      if (v < 0) continue;
      const Word e = detail::edge_word(code, u, s);
      const std::span<const Symbol> edge(e);
      weighted_(u, v) = q(u, v) * target_.weight<Scalar>(edge.first(r2)) / reference_.weight<Scalar>(edge.first(r1));
    }
}

template <typename Scalar>
PartitionSums<Scalar> partition_sum(const TransformJob<Scalar>& job, int n,
                                    const std::optional<FiberConstraint>& constraint) {
  if (n < 1) throw std::invalid_argument("partition sums need n >= 1");
  PartitionSums<Scalar> sums;
  sums.n = n;
  sums.z = detail::normalize_sum(job, n, detail::contract(job, n, nullptr));
  if (constraint) {
    if (!detail::check_constraint(job.space(), job.past(), *constraint))
      throw std::invalid_argument("constraint cannot follow the past: transition " + std::to_string(job.past().last()) +
                                  "->" + std::to_string(constraint->symbols.front()) + " is forbidden");
    sums.k = detail::normalize_sum(job, n, detail::contract(job, n, &*constraint));
  }
  return sums;
}

template <typename Scalar>
Scalar lambda_n_eval(const TransformJob<Scalar>& job, int n, const FiberConstraint& constraint) {
  if (n < 1) throw std::invalid_argument("lambda_n needs n >= 1");
  if (!detail::check_constraint(job.space(), job.past(), constraint)) return Scalar(0);
  if (constraint.symbols.empty()) return Scalar(1);
  const Scaled<Scalar> z = detail::contract(job, n, nullptr);
  const Scaled<Scalar> k = detail::contract(job, n, &constraint);
  return detail::ratio(k, z);
}

template <typename Scalar>
Scalar pushforward_eval(const TransformJob<Scalar>& job, int n, int shift, const TwoSidedCylinder& cylinder) {
  auto constraint = shifted_cylinder_constraints(job.space(), cylinder, job.past(), shift);
  if (!constraint) return Scalar(0);
  return lambda_n_eval(job, n, *constraint);
}

// ---------------------------------------------------------------------------

template <typename Scalar>
FiberSweep<Scalar>::FiberSweep(const TransformJob<Scalar>& job, int n, int last_coordinate) : job_(&job), n_(n) {
  if (n < 1) throw std::invalid_argument("fiber sweeps need n >= 1");
  const BlockCode& code = job.code();
  const Word& pinned = job.fiber().pinned();
  length_ = std::max({job.horizon(n), static_cast<int>(pinned.size()), last_coordinate + 1});
  const auto slots = static_cast<std::size_t>(length_) + 1;

  forward_.resize(slots);
  forward_log_.assign(slots, 0.0);
  forward_[0] = RowVector<Scalar>::Zero(code.size());
  forward_[0](job.fiber().start_block()) = Scalar(1);
  for (int c = 0; c < length_; ++c) {
    RowVector<Scalar> v = forward_[static_cast<std::size_t>(c)] * step(c);
    detail::apply_mask<Scalar>(code, pinned, nullptr, c, v);
    forward_log_[static_cast<std::size_t>(c) + 1] = forward_log_[static_cast<std::size_t>(c)] + detail::rescale<Scalar>(v);
    forward_[static_cast<std::size_t>(c) + 1] = std::move(v);
  }

  backward_.resize(slots);
  backward_log_.assign(slots, 0.0);
  backward_[static_cast<std::size_t>(length_)] = Vector<Scalar>::Ones(code.size());
  for (int c = length_ - 1; c >= 0; --c) {
    Vector<Scalar> next = backward_[static_cast<std::size_t>(c) + 1];
    detail::apply_mask<Scalar>(code, pinned, nullptr, c, next);
    Vector<Scalar> v = step(c) * next;
    backward_log_[static_cast<std::size_t>(c)] =
        backward_log_[static_cast<std::size_t>(c) + 1] + detail::rescale<Scalar>(v);
    backward_[static_cast<std::size_t>(c)] = std::move(v);
  }

  z_ = detail::make_scaled<Scalar>(forward_.back().sum(), forward_log_.back());
}

template <typename Scalar>
const Matrix<Scalar>& FiberSweep<Scalar>::step(int coordinate) const {
  return job_->weighted_at(coordinate, n_) ? job_->weighted_step() : job_->plain_step();
}

template <typename Scalar>
Scalar FiberSweep<Scalar>::lambda(const FiberConstraint& constraint) const {
  if (!detail::check_constraint(job_->space(), job_->past(), constraint)) return Scalar(0);
  if (constraint.symbols.empty()) return Scalar(1);
  const int first = constraint.offset, last = constraint.end() - 1;
  if (last >= length_) throw std::out_of_range("constraint extends beyond the sweep");
  const BlockCode& code = job_->code();
  const Word& pinned = job_->fiber().pinned();
  RowVector<Scalar> v = forward_[static_cast<std::size_t>(first)];
  double log_scale = forward_log_[static_cast<std::size_t>(first)];
  for (int c = first; c <= last; ++c) {
    v = v * step(c);
    detail::apply_mask<Scalar>(code, pinned, &constraint, c, v);
    log_scale += detail::rescale<Scalar>(v);
  }
  const Scalar joined = v.dot(backward_[static_cast<std::size_t>(last) + 1]);
  log_scale += backward_log_[static_cast<std::size_t>(last) + 1];
  return detail::ratio(detail::make_scaled<Scalar>(joined, log_scale), z_);
}

template <typename Scalar>
Scalar FiberSweep<Scalar>::pushforward(int shift, const TwoSidedCylinder& cylinder) const {
  auto constraint = shifted_cylinder_constraints(job_->space(), cylinder, job_->past(), shift);
  if (!constraint) return Scalar(0);
  return lambda(*constraint);
}

template <typename Scalar>
Scalar FiberSweep<Scalar>::mu_n(const TwoSidedCylinder& cylinder) const {
  Scalar total(0);
  for (int i = 0; i < n_; ++i) total += pushforward(i, cylinder);
  return total / Scalar(n_);
}

template <typename Scalar>
std::vector<Scalar> pushforward_series(const TransformJob<Scalar>& job, int n, const TwoSidedCylinder& cylinder,
                                       int last_shift) {
  if (last_shift < 0) throw std::invalid_argument("last shift must be non-negative");
  FiberSweep<Scalar> sweep(job, n, std::max(0, last_shift + cylinder.last()));
  std::vector<Scalar> out;
  out.reserve(static_cast<std::size_t>(last_shift) + 1);
  for (int i = 0; i <= last_shift; ++i) out.push_back(sweep.pushforward(i, cylinder));
  return out;
}

template <typename Scalar>
Scalar mu_n_eval(const TransformJob<Scalar>& job, int n, const TwoSidedCylinder& cylinder) {
  if (n < 1) throw std::invalid_argument("mu_n needs n >= 1");
  return FiberSweep<Scalar>(job, n, std::max(0, n - 1 + cylinder.last())).mu_n(cylinder);
}

template <typename Scalar>
Scalar endpoint_eval(const TransformJob<Scalar>& job, int n, const TwoSidedCylinder& cylinder) {
  if (n <= cylinder.past_depth() + cylinder.future_depth())
    throw std::invalid_argument("endpoint evaluation needs n > M + N = " +
                                std::to_string(cylinder.past_depth() + cylinder.future_depth()));
  return pushforward_eval(job, n, n, cylinder);
}

template <typename Scalar>
GrowthSeries growth_series(const TransformJob<Scalar>& job, const std::vector<int>& ns) {
  GrowthSeries series;
  const double p2 = pressure_spectral(job.target(), job.options());
  series.target = job.normalization() == Normalization::raw ? p2 - job.reference_pressure() : p2;
  int previous = 0;
  for (int n : ns) {
    if (n < 1 || n <= previous) throw std::invalid_argument("growth series needs an increasing range of n >= 1");
    previous = n;
    GrowthRow row;
    row.n = n;
    row.log_z = partition_sum(job, n).z.log();
    row.rate = row.log_z / n;
    row.increment = partition_sum(job, n + 1).z.log() - row.log_z;
    series.rows.push_back(row);
  }
  return series;
}

template <typename Scalar>
ConvergenceReport<Scalar> convergence_report(const TransformJob<Scalar>& job, const TwoSidedCylinder& cylinder,
                                             const std::vector<int>& ns) {
  ConvergenceReport<Scalar> report;
  const EquilibriumState<Scalar> target = equilibrium_state<Scalar>(job.target(), job.options());
  report.reference = cylinder_measure(target, cylinder).value;
  double weighted = 0.0, norm = 0.0;
  for (int n : ns) {
    ConvergenceRow<Scalar> row;
    row.n = n;
    row.value = mu_n_eval(job, n, cylinder);
    const Scalar diff = row.value - report.reference;
    row.abs_error = std::abs(to_double(diff));
    row.n_error = n * row.abs_error;
    weighted += row.abs_error / n;
    norm += 1.0 / (static_cast<double>(n) * n);
    report.max_n_error = std::max(report.max_n_error, row.n_error);
    report.rows.push_back(std::move(row));
  }
  report.fitted_constant = norm > 0.0 ? weighted / norm : 0.0;
  report.bounded = report.max_n_error <= 1.1 * report.fitted_constant + 1e-9;
  return report;
}

}  // namespace alchemy

#endif  // ALCHEMY_TRANSFORM_IMPL_HPP
