#ifndef ALCHEMY_POTENTIAL_HPP
#define ALCHEMY_POTENTIAL_HPP

#include <optional>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "alchemy/core.hpp"
#include "alchemy/shift.hpp"

namespace alchemy {

/// Dependence on coordinates -past..future-1 (past = m >= 0, future = r >= 1).
struct Window {
  int past = 0;
  int future = 1;

  int length() const { return past + future; }
  bool operator==(const Window&) const = default;
};

/// One table entry: the value G takes on a window, and optionally e^G as an
/// exact rational (needed for exact-arithmetic runs).
struct PotentialEntry {
  double value = 0.0;
  std::optional<Rational> exp_value;
};

/// A potential depending on finitely many coordinates, stored as a table over
/// the admissible window words.
class LocallyConstantPotential {
 public:
  LocallyConstantPotential(ShiftSpace space, Window window, std::vector<PotentialEntry> entries);

  const ShiftSpace& space() const { return space_; }
  Window window() const { return window_; }
  bool one_sided() const { return window_.past == 0; }
  bool has_exact_weights() const { return exact_; }

  /// Admissible window words in lexicographic order; entry(i) belongs to word(i).
  int size() const { return static_cast<int>(words_.size()); }
  const Word& word(int i) const { return words_[static_cast<std::size_t>(i)]; }
  const PotentialEntry& entry(int i) const { return entries_[static_cast<std::size_t>(i)]; }
  std::optional<int> index_of(std::span<const Symbol> window_word) const;

  /// Value on a window word (coordinates -m..r-1).
  double value(std::span<const Symbol> window_word) const;
  /// e^G on a window word. For Rational this needs exact weights.
  template <typename Scalar>
  Scalar weight(std::span<const Symbol> window_word) const;

  double max_abs() const;

  /// G + c; exp_c carries e^c exactly when known.
  LocallyConstantPotential plus_constant(double c, std::optional<Rational> exp_c = {}) const;

 private:
  int checked_index(std::span<const Symbol> window_word) const;

  ShiftSpace space_;
  Window window_;
  std::vector<Word> words_;
  std::vector<int> lookup_;
  std::vector<PotentialEntry> entries_;
  bool exact_ = false;
};

/// Builds a potential from (window word, entry) pairs covering exactly the
/// admissible windows. Missing, superfluous or duplicate words are named in
/// the error.
LocallyConstantPotential from_table(const ShiftSpace& space, Window window,
                                    const std::vector<std::pair<Word, PotentialEntry>>& table);

LocallyConstantPotential constant_potential(const ShiftSpace& space, double c,
                                            std::optional<Rational> exp_c = {});
/// G(x) = log p_{x_0}; the weights need not sum to one.
LocallyConstantPotential bernoulli_potential(const ShiftSpace& space, const std::vector<Rational>& weights);
/// Window-(past, future) table with entries uniform in [low, high].
LocallyConstantPotential random_potential(const ShiftSpace& space, Window window, std::mt19937_64& rng,
                                          double low = -1.0, double high = 1.0);

/// S_n G on the cylinder of `word`, whose first symbol sits at coordinate -m.
/// The word must have length >= n + m + r - 1.
double birkhoff_sum(const LocallyConstantPotential& g, std::span<const Symbol> word, int n);
/// Length birkhoff_sum needs for a given n.
int birkhoff_word_length(const LocallyConstantPotential& g, int n);

/// e^{S_n G}, exact when Scalar is Rational.
template <typename Scalar>
Scalar birkhoff_weight(const LocallyConstantPotential& g, std::span<const Symbol> word, int n);

/// var_l = sup |G(x) - G(y)| over x, y agreeing on coordinates -l..l.
struct VariationProfile {
  std::vector<double> values;  // values[l]; zero from values.size() on

  double at(int l) const {
    return l < static_cast<int>(values.size()) ? values[static_cast<std::size_t>(l)] : 0.0;
  }
};

VariationProfile variation_profile(const LocallyConstantPotential& g);

/// G o sigma^m: the one-sided potential cohomologous to G, window (0, m + r).
LocallyConstantPotential shift_reduce(const LocallyConstantPotential& g);

// ---------------------------------------------------------------------------

template <>
inline double LocallyConstantPotential::weight<double>(std::span<const Symbol> window_word) const {
  const PotentialEntry& e = entries_[static_cast<std::size_t>(checked_index(window_word))];
  return e.exp_value ? to_double(*e.exp_value) : std::exp(e.value);
}

template <>
inline Rational LocallyConstantPotential::weight<Rational>(std::span<const Symbol> window_word) const {
  if (!exact_) throw InexactArithmetic("potential has no exact exponential weights");
  return *entries_[static_cast<std::size_t>(checked_index(window_word))].exp_value;
}

template <typename Scalar>
Scalar birkhoff_weight(const LocallyConstantPotential& g, std::span<const Symbol> word, int n) {
  const int needed = birkhoff_word_length(g, n);
  if (static_cast<int>(word.size()) < needed)
    throw std::invalid_argument("Birkhoff sum needs a word of length " + std::to_string(needed));
  const auto w = static_cast<std::size_t>(g.window().length());
  Scalar product(1);
  for (int t = 0; t < n; ++t) product *= g.weight<Scalar>(word.subspan(static_cast<std::size_t>(t), w));
  return product;
}

}  // namespace alchemy

#endif  // ALCHEMY_POTENTIAL_HPP
