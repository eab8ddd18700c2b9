#include "doctest.h"

#include "alchemy/potential.hpp"

using namespace alchemy;

namespace {

// G(x) = table[x_{-1} x_0] on the full 2-shift.
LocallyConstantPotential pair_potential() {
  return from_table(full_shift(2), Window{1, 1},
                    {{{0, 0}, {1.0, {}}}, {{0, 1}, {2.0, {}}}, {{1, 0}, {3.0, {}}}, {{1, 1}, {4.0, {}}}});
}

}  // namespace

TEST_CASE("table construction reports bad entries") {
  const ShiftSpace gm = golden_mean_shift();
  const PotentialEntry e{0.5, {}};
  CHECK_NOTHROW(from_table(gm, Window{0, 2}, {{{0, 0}, e}, {{0, 1}, e}, {{1, 0}, e}}));

  auto message = [&](const std::vector<std::pair<Word, PotentialEntry>>& table) {
    try {
      from_table(gm, Window{0, 2}, table);
    } catch (const std::invalid_argument& err) {
      return std::string(err.what());
    }
    return std::string();
  };
  CHECK(message({{{0, 0}, e}, {{0, 1}, e}}).find("10") != std::string::npos);
  CHECK(message({{{0, 0}, e}, {{0, 1}, e}, {{1, 0}, e}, {{1, 1}, e}}).find("11") != std::string::npos);
  CHECK(message({{{0, 0}, e}, {{0, 0}, e}, {{0, 1}, e}, {{1, 0}, e}}).find("00") != std::string::npos);
  CHECK_THROWS_AS(LocallyConstantPotential(gm, Window{0, 0}, {}), std::invalid_argument);
}

TEST_CASE("Birkhoff sums") {
  const LocallyConstantPotential g = pair_potential();
  CHECK(birkhoff_word_length(g, 3) == 4);
  // Word at coordinates -1..2: windows 01, 11, 10.
  CHECK(birkhoff_sum(g, Word{0, 1, 1, 0}, 3) == doctest::Approx(9.0));
  CHECK(birkhoff_sum(g, Word{0, 1, 1, 0}, 1) == doctest::Approx(2.0));
  CHECK_THROWS_AS(birkhoff_sum(g, Word{0, 1, 1}, 3), std::invalid_argument);

  const LocallyConstantPotential b = bernoulli_potential(full_shift(2), {Rational(3, 10), Rational(7, 10)});
  CHECK(birkhoff_weight<Rational>(b, Word{0, 1, 0}, 3) == Rational(63, 1000));
  CHECK(birkhoff_weight<double>(b, Word{0, 1, 0}, 3) == doctest::Approx(0.063));
  CHECK(birkhoff_sum(b, Word{0, 1, 0}, 3) == doctest::Approx(std::log(0.063)));
}

TEST_CASE("exact weights") {
  const ShiftSpace s = full_shift(2);
  CHECK(constant_potential(s, std::log(0.5), Rational(1, 2)).has_exact_weights());
  const LocallyConstantPotential inexact = constant_potential(s, 0.3);
  CHECK_FALSE(inexact.has_exact_weights());
  CHECK_THROWS_AS(inexact.weight<Rational>(Word{0}), InexactArithmetic);
  CHECK(inexact.weight<double>(Word{1}) == doctest::Approx(std::exp(0.3)));

  const auto shifted = constant_potential(s, 0.0, Rational(1)).plus_constant(std::log(2.0), Rational(2));
  CHECK(shifted.weight<Rational>(Word{0}) == 2);
  CHECK(shifted.value(Word{1}) == doctest::Approx(std::log(2.0)));
}

TEST_CASE("variation profile") {
  // G = x_0 + 10 x_1: var_0 sees x_1 change, var_1 sees nothing.
  const LocallyConstantPotential g =
      from_table(full_shift(2), Window{0, 2},
                 {{{0, 0}, {0.0, {}}}, {{0, 1}, {10.0, {}}}, {{1, 0}, {1.0, {}}}, {{1, 1}, {11.0, {}}}});
  const VariationProfile v = variation_profile(g);
  CHECK(v.at(0) == doctest::Approx(10.0));
  CHECK(v.at(1) == 0.0);
  CHECK(v.at(7) == 0.0);

  const VariationProfile p = variation_profile(pair_potential());
  CHECK(p.at(0) == doctest::Approx(2.0));
  CHECK(p.at(1) == 0.0);
}

TEST_CASE("shift reduction telescopes") {
  std::mt19937_64 rng(11);
  const LocallyConstantPotential g = random_potential(golden_mean_shift(), Window{2, 1}, rng);
  const LocallyConstantPotential h = shift_reduce(g);
  CHECK(h.one_sided());
  CHECK(h.window() == Window{0, 3});
  for (const Word& w : AdmissibleWords(golden_mean_shift(), 8))
    CHECK(birkhoff_sum(h, w, 6) == doctest::Approx(birkhoff_sum(g, w, 6)).epsilon(1e-14));
}

TEST_CASE("random potentials are reproducible") {
  std::mt19937_64 a(5), b(5);
  const auto g = random_potential(full_shift(3), Window{0, 2}, a, -0.5, 0.5);
  const auto h = random_potential(full_shift(3), Window{0, 2}, b, -0.5, 0.5);
  CHECK(g.size() == 9);
  for (int i = 0; i < g.size(); ++i) {
    CHECK(g.entry(i).value == h.entry(i).value);
    CHECK(std::abs(g.entry(i).value) <= 0.5);
  }
  CHECK(g.max_abs() <= 0.5);
}
