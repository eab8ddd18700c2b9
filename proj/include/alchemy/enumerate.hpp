#ifndef ALCHEMY_ENUMERATE_HPP
#define ALCHEMY_ENUMERATE_HPP

// Brute-force cylinder enumeration. Every quantity here is a finite sum over
// explicit fiber words, evaluated point by point from the potential tables
// and single-cylinder fiber masses. Nothing is shared with the contraction
// code in transform.hpp, so the two serve as independent checks of each
// other. Cost is exponential in n; keep n small.

#include <vector>

#include "alchemy/core.hpp"
#include "alchemy/potential.hpp"
#include "alchemy/shift.hpp"
#include "alchemy/thermo.hpp"
#include "alchemy/transform.hpp"

namespace alchemy::brute {

/// Calls f(word) for every fiber word y_0..y_{length-1} that can follow the past.
template <typename F>
void for_each_fiber_word(const ShiftSpace& space, const PastWord& past, int length, F&& f) {
  for (const Word& w : AdmissibleWords(space, length, past.last())) f(w);
}

/// e^{S_n G2(y) - S_n G1(y)} from the tables, for y starting at coordinate 0.
template <typename Scalar>
Scalar integrand(const TransformJob<Scalar>& job, const Word& y, int n) {
  return birkhoff_weight<Scalar>(job.target(), y, n) / birkhoff_weight<Scalar>(job.reference(), y, n);
}

inline int integrand_depth(const LocallyConstantPotential& g1, const LocallyConstantPotential& g2, int n) {
  return n + std::max(g1.window().future, g2.window().future) - 1;
}

template <typename Scalar>
Scalar pressure_factor(const TransformJob<Scalar>& job, int n) {
  Scalar f(1);
  if (job.normalization() == Normalization::pressure) {
    if constexpr (is_exact_v<Scalar>) {
      for (int j = 0; j < n; ++j) f *= job.reference_eigenvalue();
    } else {
      f = std::exp(n * job.reference_pressure());
    }
  }
  return f;
}

/// Does the point (past | y) lie in sigma^{-shift}(A)? Checked coordinate by
/// coordinate on the spliced point.
inline bool in_shifted_cylinder(const PastWord& past, const Word& y, int shift, const TwoSidedCylinder& cylinder) {
  for (int j = cylinder.first; j <= cylinder.last(); ++j) {
    const int m = shift + j;
    const Symbol have = m < 0 ? past.at(m) : y.at(static_cast<std::size_t>(m));
    if (have != cylinder.symbols[static_cast<std::size_t>(j - cylinder.first)]) return false;
  }
  return true;
}

inline bool matches(const Word& y, const FiberConstraint& c) {
  for (std::size_t j = 0; j < c.symbols.size(); ++j) {
    const Symbol want = c.symbols[j];
    if (want != kAnySymbol && y.at(static_cast<std::size_t>(c.offset) + j) != want) return false;
  }
  return true;
}

/// Z_n, or K_{n,A} when a constraint is given.
template <typename Scalar>
Scalar partition_sum(const TransformJob<Scalar>& job, int n, const FiberConstraint* constraint = nullptr) {
  int depth = std::max(integrand_depth(job.reference(), job.target(), n), static_cast<int>(job.fiber().pinned().size()));
  if (constraint) depth = std::max(depth, constraint->end());
  Scalar total(0);
  for_each_fiber_word(job.space(), job.past(), depth, [&](const Word& y) {
    if (constraint && !matches(y, *constraint)) return;
    const Scalar mass = job.fiber().mass(y);
    if (mass == Scalar(0)) return;
    total += mass * integrand(job, y, n);
  });
  return total * pressure_factor(job, n);
}

template <typename Scalar>
Scalar lambda_n(const TransformJob<Scalar>& job, int n, const FiberConstraint& constraint) {
  return brute::partition_sum(job, n, &constraint) / brute::partition_sum(job, n);
}

/// sigma^i_* lambda_n(A) for i = 0..last_shift from one pass over the fiber words.
template <typename Scalar>
std::vector<Scalar> pushforward_series(const TransformJob<Scalar>& job, int n, const TwoSidedCylinder& cylinder,
                                       int last_shift) {
  const int depth = std::max({integrand_depth(job.reference(), job.target(), n),
                              static_cast<int>(job.fiber().pinned().size()), last_shift + cylinder.last() + 1, 1});
  Scalar z(0);
  std::vector<Scalar> hits(static_cast<std::size_t>(last_shift) + 1, Scalar(0));
  for_each_fiber_word(job.space(), job.past(), depth, [&](const Word& y) {
    const Scalar mass = job.fiber().mass(y);
    if (mass == Scalar(0)) return;
    const Scalar w = mass * integrand(job, y, n);
    z += w;
    for (int i = 0; i <= last_shift; ++i)
      if (in_shifted_cylinder(job.past(), y, i, cylinder)) hits[static_cast<std::size_t>(i)] += w;
  });
  for (auto& h : hits) h /= z;
  return hits;
}

template <typename Scalar>
Scalar pushforward(const TransformJob<Scalar>& job, int n, int shift, const TwoSidedCylinder& cylinder) {
  return brute::pushforward_series(job, n, cylinder, shift).back();
}

template <typename Scalar>
Scalar mu_n(const TransformJob<Scalar>& job, int n, const TwoSidedCylinder& cylinder) {
  const std::vector<Scalar> terms = brute::pushforward_series(job, n, cylinder, n - 1);
  Scalar total(0);
  for (const auto& t : terms) total += t;
  return total / Scalar(n);
}

/// log of the sum over all admissible words w of length n + m + r - 1 of e^{S_n G(w)}.
inline double log_bowen_sum(const LocallyConstantPotential& g, int n) {
  const int length = birkhoff_word_length(g, n);
  std::vector<double> sums;
  for (const Word& w : AdmissibleWords(g.space(), length)) sums.push_back(birkhoff_sum(g, w, n));
  const double top = *std::max_element(sums.begin(), sums.end());
  double total = 0.0;
  for (double s : sums) total += std::exp(s - top);
  return top + std::log(total);
}

/// Extremes of mu^u[y_0..y_{n+depth-1}] / e^{S_n G(y) - n P(G)} over all fiber words.
inline GibbsReport gibbs_ratio_report(const UnstableFiberMeasure<double>& fiber, const LocallyConstantPotential& g,
                                      int n_max, int depth) {
  const double p = pressure_spectral(g);
  GibbsReport report;
  report.depth = depth;
  for (int n = 1; n <= n_max; ++n) {
    const int cyl = std::max(n + depth, static_cast<int>(fiber.pinned().size()));
    const int length = std::max(cyl, birkhoff_word_length(g, n));
    GibbsRow row{n, std::numeric_limits<double>::infinity(), 0.0};
    for_each_fiber_word(fiber.code().base(), fiber.past(), length, [&](const Word& y) {
      const double mass = fiber.mass(std::span<const Symbol>(y).first(static_cast<std::size_t>(cyl)));
      if (mass == 0.0) return;
      const double ratio = mass / std::exp(birkhoff_sum(g, y, n) - n * p);
      row.min_ratio = std::min(row.min_ratio, ratio);
      row.max_ratio = std::max(row.max_ratio, ratio);
    });
    report.rows.push_back(row);
  }
  report.min_ratio = report.rows.front().min_ratio;
  report.max_ratio = report.rows.front().max_ratio;
  for (const auto& row : report.rows) {
    report.min_ratio = std::min(report.min_ratio, row.min_ratio);
    report.max_ratio = std::max(report.max_ratio, row.max_ratio);
  }
  return report;
}

}  // namespace alchemy::brute

#endif  // ALCHEMY_ENUMERATE_HPP
