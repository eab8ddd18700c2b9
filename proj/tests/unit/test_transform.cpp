#include "doctest.h"

#include "alchemy/enumerate.hpp"
#include "alchemy/transform.hpp"

using namespace alchemy;

namespace {

// Uniform Bernoulli reference, (3/10, 7/10) Bernoulli target, past ...000.
TransformJob<Rational> coin_job(Normalization normalization = Normalization::raw) {
  const ShiftSpace s = full_shift(2);
  return TransformJob<Rational>(constant_potential(s, std::log(0.5), Rational(1, 2)),
                                bernoulli_potential(s, {Rational(3, 10), Rational(7, 10)}), PastWord(s, {0}),
                                normalization);
}

TransformJob<double> random_job(const ShiftSpace& space, std::uint64_t seed, Window w1, Window w2, Word past,
                                Normalization normalization = Normalization::raw) {
  std::mt19937_64 rng(seed);
  auto g1 = random_potential(space, w1, rng);
  auto g2 = random_potential(space, w2, rng);
  return TransformJob<double>(g1, g2, PastWord(space, std::move(past)), normalization);
}

}  // namespace

TEST_CASE("coin example in exact arithmetic") {
  const auto job = coin_job();
  const TwoSidedCylinder a = make_cylinder(job.space(), -1, {0, 0});
  for (int n = 1; n <= 12; ++n) {
    CHECK(partition_sum(job, n).z.value() == 1);
    CHECK(mu_n_eval(job, n, a) == Rational(9, 100) + Rational(21, 100 * n));
    CHECK(pushforward_eval(job, n, 0, a) == Rational(3, 10));
    for (int i = 1; i < n; ++i) CHECK(pushforward_eval(job, n, i, a) == Rational(9, 100));
    if (n >= 2) CHECK(endpoint_eval(job, n, a) == Rational(3, 20));
  }
  CHECK_THROWS_AS(endpoint_eval(job, 1, a), std::invalid_argument);

  const auto series = pushforward_series(job, 6, a, 6);
  CHECK(series.front() == Rational(3, 10));
  CHECK(series.back() == Rational(3, 20));

  const auto growth = growth_series(job, {1, 5, 10});
  for (const auto& row : growth.rows) CHECK(row.increment == 0.0);
  CHECK(growth.target == 0.0);
}

TEST_CASE("reference measures match the target's word masses") {
  const auto job = coin_job();
  const auto target = equilibrium_state<Rational>(job.target());
  for (int n = 1; n <= 6; ++n)
    for (const Word& w : AdmissibleWords(job.space(), n, job.past().last()))
      CHECK(lambda_n_eval(job, n, FiberConstraint{0, w}) == cylinder_measure(target, w).value);
}

TEST_CASE("contraction agrees with enumeration") {
  const ShiftSpace gm = golden_mean_shift();
  const auto job = random_job(gm, 17, Window{0, 2}, Window{0, 3}, {0, 1});
  const std::vector<TwoSidedCylinder> cylinders{make_cylinder(gm, 0, {0}), make_cylinder(gm, -2, {1, 0, 1}),
                                                make_cylinder(gm, 1, {0, 0})};
  for (int n = 1; n <= 7; ++n) {
    CHECK(partition_sum(job, n).z.value() == doctest::Approx(brute::partition_sum(job, n)).epsilon(1e-12));
    for (const auto& a : cylinders) {
      CHECK(mu_n_eval(job, n, a) == doctest::Approx(brute::mu_n(job, n, a)).epsilon(1e-12));
      const auto fast = pushforward_series(job, n, a, n);
      const auto slow = brute::pushforward_series(job, n, a, n);
      for (int i = 0; i <= n; ++i) CHECK(fast[i] == doctest::Approx(slow[i]).epsilon(1e-12));
    }
    const FiberConstraint c{1, {0, kAnySymbol, 1}};
    CHECK(lambda_n_eval(job, n, c) == doctest::Approx(brute::lambda_n(job, n, c)).epsilon(1e-12));
  }
}

TEST_CASE("normalizations differ only by the reference pressure") {
  const ShiftSpace s = full_shift(3);
  const auto raw = random_job(s, 9, Window{0, 2}, Window{0, 2}, {2});
  const auto scaled = random_job(s, 9, Window{0, 2}, Window{0, 2}, {2}, Normalization::pressure);
  const TwoSidedCylinder a = make_cylinder(s, 0, {1, 2});
  for (int n : {3, 10, 40}) {
    CHECK(partition_sum(scaled, n).z.log() ==
          doctest::Approx(partition_sum(raw, n).z.log() + n * raw.reference_pressure()).epsilon(1e-12));
    CHECK(mu_n_eval(scaled, n, a) == doctest::Approx(mu_n_eval(raw, n, a)).epsilon(1e-12));
  }
  const auto growth = growth_series(scaled, {60});
  CHECK(std::abs(growth.rows.front().increment - growth.target) < 1e-8);
}

TEST_CASE("reference measures are probabilities") {
  const auto job = random_job(full_shift(3), 12, Window{0, 1}, Window{0, 2}, {0, 1});
  for (int n : {1, 4, 9}) {
    double total = 0.0;
    for (const Word& w : AdmissibleWords(job.space(), 2, job.past().last()))
      total += lambda_n_eval(job, n, FiberConstraint{0, w});
    CHECK(total == doctest::Approx(1.0).epsilon(1e-13));
  }
}

TEST_CASE("averaged pushforwards approach the target equilibrium state") {
  const ShiftSpace gm = golden_mean_shift();
  const auto job = random_job(gm, 5, Window{0, 2}, Window{0, 2}, {0});
  const TwoSidedCylinder a = make_cylinder(gm, -1, {0, 1});
  const auto report = convergence_report(job, a, {20, 40, 80, 160});
  CHECK(report.bounded);
  CHECK(report.rows.back().abs_error < report.rows.front().abs_error);
  CHECK(report.rows.back().abs_error <= std::max(1e-3, report.fitted_constant / 160.0));
}

TEST_CASE("pinned fibers") {
  const auto job = coin_job();
  const ShiftSpace s = full_shift(2);
  const TransformJob<Rational> pinned(job.reference(), job.target(), job.past(), Normalization::raw, Word{1});
  const TwoSidedCylinder a = make_cylinder(s, -1, {0, 0});
  CHECK(pushforward_eval(pinned, 4, 0, a) == 0);
  CHECK(pushforward_eval(pinned, 4, 2, a) == Rational(9, 100));
  CHECK(partition_sum(pinned, 5).z.value() == brute::partition_sum(pinned, 5));
}

TEST_CASE("job validation") {
  const ShiftSpace s = full_shift(2);
  std::mt19937_64 rng(1);
  const auto one_sided = random_potential(s, Window{0, 2}, rng);
  const auto two_sided = random_potential(s, Window{1, 1}, rng);
  CHECK_THROWS_AS(TransformJob<double>(one_sided, two_sided, PastWord(s, {0})), std::invalid_argument);
  const auto other = random_potential(golden_mean_shift(), Window{0, 1}, rng);
  CHECK_THROWS_AS(TransformJob<double>(one_sided, other, PastWord(s, {0})), std::invalid_argument);
  CHECK_THROWS_AS(coin_job().reference().weight<Rational>(Word{0, 1, 1}), std::invalid_argument);

  const auto job = coin_job();
  CHECK_THROWS_AS(partition_sum(job, 3, FiberConstraint{0, {2}}), std::invalid_argument);
}
