// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Random batteries use fixed seeds.

#include <chrono>
#include <cstdio>
#include <functional>
#include <sstream>

#include "alchemy/enumerate.hpp"
#include "alchemy/transform.hpp"

using namespace alchemy;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

const double kGoldenLog = std::log((1.0 + std::sqrt(5.0)) / 2.0);

std::vector<ShiftSpace> battery_spaces() { return {full_shift(2), golden_mean_shift()}; }

/// 20 window-(0,2) potentials with entries uniform in [0, 1].
std::vector<LocallyConstantPotential> battery(const ShiftSpace& space, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<LocallyConstantPotential> out;
  for (int j = 0; j < 20; ++j) out.push_back(random_potential(space, Window{0, 2}, rng, 0.0, 1.0));
  return out;
}

std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", x);
  return buf;
}

TransformJob<Rational> coin_job() {
  const ShiftSpace s = full_shift(2);
  return TransformJob<Rational>(constant_potential(s, std::log(0.5), Rational(1, 2)),
                                bernoulli_potential(s, {Rational(3, 10), Rational(7, 10)}), PastWord(s, {0}));
}

Outcome coin_example() {
  const auto job = coin_job();
  const auto target = equilibrium_state<Rational>(job.target());
  const TwoSidedCylinder a = make_cylinder(job.space(), -1, {0, 0});
  Outcome out;
  int words = 0;
  for (int n = 1; n <= 30 && out.pass; ++n) {
    if (partition_sum(job, n).z.value() != 1) out = {false, "Z_" + std::to_string(n) + " != 1"};
    const FiberSweep<Rational> sweep(job, n, n - 1 + a.last());
    for (int i = 1; i < n; ++i)
      if (sweep.pushforward(i, a) != Rational(9, 100))
        out = {false, "pushforward " + std::to_string(i) + " at n=" + std::to_string(n)};
    if (sweep.mu_n(a) != Rational(9, 100) + Rational(21, 100 * n)) out = {false, "mu_n at n=" + std::to_string(n)};
    if (n > 12) continue;
    for (const Word& w : AdmissibleWords(job.space(), n, job.past().last())) {
      ++words;
      if (sweep.lambda(FiberConstraint{0, w}) != cylinder_measure(target, w).value)
        out = {false, "lambda_n[" + to_string(w) + "] differs from the target measure"};
    }
  }
  if (out.pass)
    out.detail = "Z_n = 1 (n <= 30), mu_n = 9/100 + 21/(100n), " + std::to_string(words) + " word masses exact";
  return out;
}

Outcome coin_endpoint() {
  const auto job = coin_job();
  const TwoSidedCylinder a = make_cylinder(job.space(), -1, {0, 0});
  const Rational reference = cylinder_measure(equilibrium_state<Rational>(job.target()), a).value;
  if (reference != Rational(9, 100)) return {false, "target measure of A is " + format_exact(reference)};
  for (int n = 2; n <= 20; ++n) {
    const Rational v = endpoint_eval(job, n, a);
    if (v != Rational(3, 20) || v == reference) return {false, "n=" + std::to_string(n) + " gives " + format_exact(v)};
  }
  return {true, "sigma^n lambda_n(A) = 0.15 != 0.09 for n in [2,20]"};
}

Outcome pressure_consistency() {
  double worst = 0.0;
  for (const auto& space : battery_spaces())
    for (const auto& g : battery(space, 101))
      worst = std::max(worst, std::abs(pressure_spectral(g) - pressure_bowen_increment(g, 60)));
  const double golden = std::abs(pressure_spectral(constant_potential(golden_mean_shift(), 0.0)) - kGoldenLog);
  return {worst <= 1e-8 && golden <= 1e-10,
          "max |P - Bowen increment(60)| = " + sci(worst) + ", |P_golden - log phi| = " + sci(golden)};
}

Outcome growth_rate() {
  double worst = 0.0;
  for (const auto& space : battery_spaces()) {
    const auto gs = battery(space, 101);
    const PastWord past(space, {0});
    for (std::size_t j = 0; j < gs.size(); ++j) {
      const TransformJob<double> job(gs[j], gs[(j + 1) % gs.size()], past);
      const auto series = growth_series(job, {50});
      worst = std::max(worst, std::abs(series.rows.front().increment - series.target));
    }
  }
  std::vector<int> ns(30);
  for (int n = 1; n <= 30; ++n) ns[static_cast<std::size_t>(n - 1)] = n;
  bool zero = true;
  for (const auto& row : growth_series(coin_job(), ns).rows) zero = zero && row.increment == 0.0;
  return {worst <= 1e-8 && zero, "max |increment(50) - (P2 - P1)| = " + sci(worst) +
                                     (zero ? ", coin series identically 0" : ", coin series nonzero")};
}

std::vector<TwoSidedCylinder> cylinders_up_to(const ShiftSpace& space, int max_span) {
  std::vector<TwoSidedCylinder> out;
  for (int s = 1; s <= max_span; ++s)
    for (const Word& w : AdmissibleWords(space, s)) out.push_back(make_cylinder(space, -(s / 2), w));
  return out;
}

Outcome transform_convergence() {
  int checked = 0, unbounded = 0, far = 0;
  double worst_ratio = 0.0;
  std::string first_failure;
  for (const auto& space : battery_spaces()) {
    const auto gs = battery(space, 101);
    const auto cylinders = cylinders_up_to(space, 4);
    const PastWord past(space, {0});
    for (std::size_t j = 0; j < gs.size(); ++j) {
      const TransformJob<double> job(gs[j], gs[(j + 1) % gs.size()], past);
      const auto target = equilibrium_state<double>(job.target());
      std::vector<double> reference;
      for (const auto& a : cylinders) reference.push_back(cylinder_measure(target, a).value);

      // err[c][n - 20] for every n in [20, 400], one sweep per n.
      std::vector<std::vector<double>> err(cylinders.size());
      for (int n = 20; n <= 400; ++n) {
        const FiberSweep<double> sweep(job, n, n - 1 + 3);
        for (std::size_t c = 0; c < cylinders.size(); ++c)
          err[c].push_back(std::abs(sweep.mu_n(cylinders[c]) - reference[c]));
      }
      for (std::size_t c = 0; c < cylinders.size(); ++c) {
        double num = 0.0, den = 0.0, max_n_err = 0.0;
        for (int n = 20; n <= 400; ++n) {
          const double e = err[c][static_cast<std::size_t>(n - 20)];
          num += e / n;
          den += 1.0 / (static_cast<double>(n) * n);
          max_n_err = std::max(max_n_err, n * e);
        }
        const double fitted = num / den;
        // 1e-9 floor on the n * err scale.
        const bool bounded = max_n_err <= 1.1 * fitted + 1e-9;
        const bool close = err[c].back() <= std::max(1e-3, (fitted + 1e-9) / 400.0);
        if (fitted > 1e-9) worst_ratio = std::max(worst_ratio, max_n_err / fitted);
        ++checked;
        unbounded += !bounded;
        far += !close;
        if ((!bounded || !close) && first_failure.empty())
          first_failure = "; first failure: potential pair " + std::to_string(j) + ", cylinder " +
                          std::to_string(cylinders[c].first) + ":" + to_string(cylinders[c].symbols) +
                          ", max n*err / C = " + sci(max_n_err / fitted);
      }
    }
  }
  return {unbounded == 0 && far == 0, std::to_string(checked) + " (pair, cylinder) cases, " +
                                          std::to_string(unbounded) + " unbounded, " + std::to_string(far) +
                                          " outside tolerance at n=400, worst max(n*err)/C = " + sci(worst_ratio) +
                                          first_failure};
}

Outcome oracle_equivalence() {
  IndexMatrix three(3, 3);
  three << 1, 1, 0, 1, 0, 1, 1, 1, 1;
  const std::vector<ShiftSpace> spaces{full_shift(2), golden_mean_shift(), build_shift(3, three)};
  double worst = 0.0;
  int comparisons = 0;
  std::mt19937_64 rng(606);
  for (const auto& space : spaces) {
    const auto g1 = random_potential(space, Window{0, 2}, rng);
    const auto g2 = random_potential(space, Window{0, 2}, rng);
    const TransformJob<double> job(g1, g2, PastWord(space, {0}));
    std::vector<TwoSidedCylinder> cylinders{make_cylinder(space, 0, {0}), make_cylinder(space, -1, {0, 1}),
                                            make_cylinder(space, 1, {1, 0})};
    auto compare = [&](double fast, double slow) {
      worst = std::max(worst, std::abs(fast - slow) / std::max(1.0, std::abs(slow)));
      ++comparisons;
    };
    for (int n = 1; n <= 12; ++n) {
      compare(partition_sum(job, n).z.value(), brute::partition_sum(job, n));
      for (const auto& a : cylinders) {
        const auto fast = pushforward_series(job, n, a, n);
        const auto slow = brute::pushforward_series(job, n, a, n);
        for (int i = 0; i <= n; ++i) compare(fast[static_cast<std::size_t>(i)], slow[static_cast<std::size_t>(i)]);
        double mean = 0.0;
        for (int i = 0; i < n; ++i) mean += slow[static_cast<std::size_t>(i)];
        compare(mu_n_eval(job, n, a), mean / n);
        const auto c = shifted_cylinder_constraints(space, a, job.past(), 1);
        if (c) compare(partition_sum(job, n, *c).k->value(), brute::partition_sum(job, n, &*c));
      }
    }
  }
  return {worst <= 1e-10, std::to_string(comparisons) + " comparisons for n <= 12, max relative gap " + sci(worst)};
}

Outcome gibbs_audit() {
  double worst = 0.0;
  bool finite = true;
  for (const auto& space : battery_spaces())
    for (const auto& g : battery(space, 101)) {
      const auto fiber = conditional_unstable_measure<double>(PastWord(space, {0}), g);
      const GibbsReport report = gibbs_ratio_report(fiber, g, 15, 0);
      finite = finite && std::isfinite(report.max_ratio) && report.min_ratio > 0.0;
      double lo_min = INFINITY, lo_max = 0.0, hi_min = INFINITY, hi_max = 0.0;
      for (const auto& row : report.rows) {
        if (row.n < 5) continue;
        lo_min = std::min(lo_min, row.min_ratio);
        lo_max = std::max(lo_max, row.min_ratio);
        hi_min = std::min(hi_min, row.max_ratio);
        hi_max = std::max(hi_max, row.max_ratio);
      }
      worst = std::max({worst, lo_max - lo_min, hi_max - hi_min});
    }
  const ShiftSpace s = full_shift(2);
  const auto b = bernoulli_potential(s, {Rational(3, 10), Rational(7, 10)});
  const GibbsReport coin = gibbs_ratio_report(conditional_unstable_measure<Rational>(PastWord(s, {0}), b), b, 15, 0);
  const bool unit = coin.min_ratio == 1.0 && coin.max_ratio == 1.0;
  return {worst < 1e-10 && finite && unit,
          "max spread over n in [5,15] = " + sci(worst) + (unit ? ", Bernoulli ratios exactly 1" : ", Bernoulli ratio != 1")};
}

Outcome variational() {
  double excess = -INFINITY, gap = 0.0;
  int chains = 0;
  for (const auto& space : battery_spaces()) {
    std::mt19937_64 rng(808);
    for (const auto& g : battery(space, 101)) {
      const auto state = equilibrium_state<double>(g);
      gap = std::max(gap, std::abs(variational_score(chain_of(state), state.code, g) - state.pressure));
      for (int j = 0; j < 200; ++j, ++chains)
        excess = std::max(excess, variational_score(random_chain(state.code, rng), state.code, g) - state.pressure);
    }
  }
  return {excess <= 1e-12 && gap <= 1e-12, std::to_string(chains) + " random chains, max score - P = " + sci(excess) +
                                               ", |equilibrium score - P| = " + sci(gap)};
}

Outcome cohomology() {
  double p_gap = 0.0, mass_gap = 0.0;
  std::mt19937_64 rng(909);
  for (const auto& space : battery_spaces())
    for (int m = 0; m <= 2; ++m)
      for (int r = 1; r <= 2; ++r) {
        const auto g = random_potential(space, Window{m, r}, rng);
        const auto reduced = equilibrium_state<double>(shift_reduce(g));
        const auto direct = equilibrium_state_target_weighted<double>(g);
        p_gap = std::max(p_gap, std::abs(reduced.pressure - direct.pressure));
        for (int len = 1; len <= 6; ++len)
          for (const Word& w : AdmissibleWords(space, len))
            mass_gap = std::max(mass_gap, std::abs(cylinder_measure(reduced, w).value - cylinder_measure(direct, w).value));
      }
  return {p_gap <= 1e-12 && mass_gap <= 1e-12,
          "max |P(G) - P(G o sigma^m)| = " + sci(p_gap) + ", max cylinder gap = " + sci(mass_gap)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"coin example in exact arithmetic", coin_example},
      {"endpoint counterexample", coin_endpoint},
      {"pressure consistency", pressure_consistency},
      {"partition growth rate", growth_rate},
      {"averaged pushforward convergence", transform_convergence},
      {"contraction vs enumeration", oracle_equivalence},
      {"conditional Gibbs ratios", gibbs_audit},
      {"variational principle", variational},
      {"cohomology invariance", cohomology},
  };
  int failures = 0;
  for (std::size_t j = 0; j < criteria.size(); ++j) {
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = criteria[j].second();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failures += !outcome.pass;
    std::printf("criterion %zu: %s  %s: %s [%.2f s]\n", j + 1, outcome.pass ? "PASS" : "FAIL", criteria[j].first,
                outcome.detail.c_str(), seconds);
  }
  return failures == 0 ? 0 : 1;
}
