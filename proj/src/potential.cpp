#include "alchemy/potential.hpp"

#include <algorithm>
#include <map>

namespace alchemy {

namespace {

std::size_t pack(std::span<const Symbol> word, int k) {
  std::size_t code = 0;
  for (Symbol s : word) code = code * static_cast<std::size_t>(k) + static_cast<std::size_t>(s);
  return code;
}

void check_window(Window window) {
  if (window.past < 0 || window.future < 1)
    throw std::invalid_argument("potential window needs past >= 0 and future >= 1");
}

}  // namespace

LocallyConstantPotential::LocallyConstantPotential(ShiftSpace space, Window window,
                                                   std::vector<PotentialEntry> entries)
    : space_(std::move(space)), window_(window), entries_(std::move(entries)) {
  check_window(window_);
  for (const Word& w : AdmissibleWords(space_, window_.length())) words_.push_back(w);
  if (entries_.size() != words_.size())
    throw std::invalid_argument("potential table has " + std::to_string(entries_.size()) + " entries but " +
                                std::to_string(words_.size()) + " admissible windows");
  const int k = space_.alphabet_size();
  std::size_t table = 1;
  for (int j = 0; j < window_.length(); ++j) table *= static_cast<std::size_t>(k);
  lookup_.assign(table, -1);
  for (std::size_t i = 0; i < words_.size(); ++i) lookup_[pack(words_[i], k)] = static_cast<int>(i);

  exact_ = true;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const PotentialEntry& e = entries_[i];
    if (!std::isfinite(e.value))
      throw std::invalid_argument("potential value on " + to_string(words_[i]) + " is not a finite real");
    if (e.exp_value) {
      if (*e.exp_value <= 0)
        throw std::invalid_argument("exponential weight on " + to_string(words_[i]) + " must be positive");
    } else {
      exact_ = false;
    }
  }
}

std::optional<int> LocallyConstantPotential::index_of(std::span<const Symbol> window_word) const {
  if (static_cast<int>(window_word.size()) != window_.length()) return std::nullopt;
  const int k = space_.alphabet_size();
  for (Symbol s : window_word)
    if (s < 0 || s >= k) return std::nullopt;
  int id = lookup_[pack(window_word, k)];
  if (id < 0) return std::nullopt;
  return id;
}

int LocallyConstantPotential::checked_index(std::span<const Symbol> window_word) const {
  auto id = index_of(window_word);
  if (!id) throw std::invalid_argument("window " + to_string(window_word) + " is not an admissible window");
  return *id;
}

double LocallyConstantPotential::value(std::span<const Symbol> window_word) const {
  return entries_[static_cast<std::size_t>(checked_index(window_word))].value;
}

double LocallyConstantPotential::max_abs() const {
  double m = 0.0;
  for (const auto& e : entries_) m = std::max(m, std::abs(e.value));
  return m;
}

LocallyConstantPotential LocallyConstantPotential::plus_constant(double c, std::optional<Rational> exp_c) const {
  std::vector<PotentialEntry> shifted = entries_;
  for (auto& e : shifted) {
    e.value += c;
    if (e.exp_value && exp_c)
      e.exp_value = *e.exp_value * *exp_c;
    else
      e.exp_value.reset();
  }
  return LocallyConstantPotential(space_, window_, std::move(shifted));
}

LocallyConstantPotential from_table(const ShiftSpace& space, Window window,
                                    const std::vector<std::pair<Word, PotentialEntry>>& table) {
  check_window(window);
  std::map<Word, PotentialEntry> given;
  for (const auto& [word, entry] : table) {
    if (static_cast<int>(word.size()) != window.length())
      throw std::invalid_argument("window word " + to_string(word) + " should have length " +
                                  std::to_string(window.length()));
    if (!is_admissible(space, word))
      throw std::invalid_argument("superfluous entry for inadmissible window " + to_string(word));
    if (!given.emplace(word, entry).second)
      throw std::invalid_argument("duplicate entry for window " + to_string(word));
  }
  std::vector<PotentialEntry> entries;
  std::vector<std::string> missing;
  for (const Word& w : AdmissibleWords(space, window.length())) {
    auto it = given.find(w);
    if (it == given.end()) {
      missing.push_back(to_string(w));
      continue;
    }
    entries.push_back(it->second);
  }
  if (!missing.empty()) {
    std::string names;
    for (const auto& m : missing) names += (names.empty() ? "" : ", ") + m;
    throw std::invalid_argument("potential table is missing windows: " + names);
  }
  return LocallyConstantPotential(space, window, std::move(entries));
}

LocallyConstantPotential constant_potential(const ShiftSpace& space, double c, std::optional<Rational> exp_c) {
  std::vector<PotentialEntry> entries(static_cast<std::size_t>(space.alphabet_size()), PotentialEntry{c, exp_c});
  return LocallyConstantPotential(space, Window{0, 1}, std::move(entries));
}

LocallyConstantPotential bernoulli_potential(const ShiftSpace& space, const std::vector<Rational>& weights) {
  if (static_cast<int>(weights.size()) != space.alphabet_size())
    throw std::invalid_argument("bernoulli potential needs one weight per symbol");
  std::vector<PotentialEntry> entries;
  for (const Rational& p : weights) {
    if (p <= 0) throw std::invalid_argument("bernoulli weights must be positive");
    entries.push_back(PotentialEntry{log_of(p), p});
  }
  return LocallyConstantPotential(space, Window{0, 1}, std::move(entries));
}

LocallyConstantPotential random_potential(const ShiftSpace& space, Window window, std::mt19937_64& rng,
                                          double low, double high) {
  check_window(window);
  std::uniform_real_distribution<double> dist(low, high);
  std::vector<PotentialEntry> entries;
  for ([[maybe_unused]] const Word& w : AdmissibleWords(space, window.length()))
    entries.push_back(PotentialEntry{dist(rng), std::nullopt});
  return LocallyConstantPotential(space, window, std::move(entries));
}

int birkhoff_word_length(const LocallyConstantPotential& g, int n) {
  if (n < 0) throw std::invalid_argument("Birkhoff sum length must be non-negative");
  return n == 0 ? 0 : n + g.window().length() - 1;
}

double birkhoff_sum(const LocallyConstantPotential& g, std::span<const Symbol> word, int n) {
  const int needed = birkhoff_word_length(g, n);
  if (static_cast<int>(word.size()) < needed)
    throw std::invalid_argument("Birkhoff sum S_" + std::to_string(n) + " needs a word of length " +
                                std::to_string(needed) + " starting at coordinate " +
                                std::to_string(-g.window().past) + ", got " + std::to_string(word.size()));
  require_admissible(g.space(), word, "word");
  const auto w = static_cast<std::size_t>(g.window().length());
  double sum = 0.0;
  for (int t = 0; t < n; ++t) sum += g.value(word.subspan(static_cast<std::size_t>(t), w));
  return sum;
}

VariationProfile variation_profile(const LocallyConstantPotential& g) {
  const int m = g.window().past;
  const int r = g.window().future;
  const int zero_from = std::max(m, r - 1);
  VariationProfile profile;
  for (int l = 0; l < zero_from; ++l) {
    // Window positions p (coordinate p - m) that lie in -l..l.
    const int lo = std::max(0, m - l);
    const int hi = std::min(m + r - 1, m + l);
    std::map<Word, std::pair<double, double>> groups;
    for (int i = 0; i < g.size(); ++i) {
      const Word& w = g.word(i);
      Word key(w.begin() + lo, w.begin() + hi + 1);
      const double v = g.entry(i).value;
      auto [it, fresh] = groups.try_emplace(key, v, v);
      if (!fresh) {
        it->second.first = std::min(it->second.first, v);
        it->second.second = std::max(it->second.second, v);
      }
    }
    double spread = 0.0;
    for (const auto& [key, range] : groups) spread = std::max(spread, range.second - range.first);
    profile.values.push_back(spread);
  }
  return profile;
}

LocallyConstantPotential shift_reduce(const LocallyConstantPotential& g) {
  if (g.one_sided()) return g;
  std::vector<PotentialEntry> entries;
  entries.reserve(static_cast<std::size_t>(g.size()));
  for (int i = 0; i < g.size(); ++i) entries.push_back(g.entry(i));
  return LocallyConstantPotential(g.space(), Window{0, g.window().length()}, std::move(entries));
}

}  // namespace alchemy
