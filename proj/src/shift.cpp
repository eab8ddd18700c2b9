#include "alchemy/shift.hpp"

#include <algorithm>
#include <sstream>

namespace alchemy {

std::optional<int> primitivity_exponent(const IndexMatrix& support) {
  const Eigen::Index k = support.rows();
  if (k == 0 || support.cols() != k) return std::nullopt;
  IndexMatrix base = (support.array() != 0).cast<int>();
  IndexMatrix power = base;
  const long bound = (k - 1) * (k - 1) + 1;
  for (long m = 1; m <= bound; ++m) {
    if ((power.array() > 0).all()) return static_cast<int>(m);
    IndexMatrix next = ((power * base).array() > 0).cast<int>();
    power = std::move(next);
  }
  return std::nullopt;
}

ShiftSpace::ShiftSpace(IndexMatrix transitions, double metric_base)
    : transitions_(std::move(transitions)), metric_base_(metric_base) {
  if (transitions_.rows() == 0 || transitions_.rows() != transitions_.cols())
    throw std::invalid_argument("transition matrix must be square and non-empty");
  for (Eigen::Index i = 0; i < transitions_.rows(); ++i)
    for (Eigen::Index j = 0; j < transitions_.cols(); ++j)
      if (transitions_(i, j) != 0 && transitions_(i, j) != 1)
        throw std::invalid_argument("transition matrix entries must be 0 or 1");
  for (Eigen::Index i = 0; i < transitions_.rows(); ++i) {
    if (transitions_.row(i).sum() == 0)
      throw std::invalid_argument("symbol " + std::to_string(i) + " has no successor (zero row)");
    if (transitions_.col(i).sum() == 0)
      throw std::invalid_argument("symbol " + std::to_string(i) + " has no predecessor (zero column)");
  }
  if (!(metric_base_ > 0.0 && metric_base_ < 1.0))
    throw std::invalid_argument("metric base must lie in (0, 1)");
  primitivity_exponent_ = alchemy::primitivity_exponent(transitions_);
}

void ShiftSpace::require_primitive(std::string_view operation) const {
  if (!is_primitive())
    throw NotPrimitive(std::string(operation) +
                       " requires a topologically mixing shift; the transition matrix is not primitive");
}

ShiftSpace build_shift(int k, const IndexMatrix& matrix, double metric_base) {
  if (k < 1) throw std::invalid_argument("alphabet size must be positive");
  if (matrix.rows() != k || matrix.cols() != k)
    throw std::invalid_argument("transition matrix must be " + std::to_string(k) + "x" + std::to_string(k));
  return ShiftSpace(matrix, metric_base);
}

ShiftSpace full_shift(int k) { return ShiftSpace(IndexMatrix::Ones(k, k)); }

ShiftSpace golden_mean_shift() {
  IndexMatrix a(2, 2);
  a << 1, 1, 1, 0;
  return ShiftSpace(a);
}

// ---------------------------------------------------------------------------

std::optional<std::pair<Symbol, Symbol>> forbidden_transition(const ShiftSpace& space,
                                                              std::span<const Symbol> word) {
  for (std::size_t j = 1; j < word.size(); ++j)
    if (!space.allows(word[j - 1], word[j])) return std::pair{word[j - 1], word[j]};
  return std::nullopt;
}

bool is_admissible(const ShiftSpace& space, std::span<const Symbol> word) {
  const int k = space.alphabet_size();
  for (Symbol s : word)
    if (s < 0 || s >= k) return false;
  return !forbidden_transition(space, word).has_value();
}

void require_admissible(const ShiftSpace& space, std::span<const Symbol> word, std::string_view what) {
  const int k = space.alphabet_size();
  for (Symbol s : word)
    if (s < 0 || s >= k)
      throw std::invalid_argument(std::string(what) + ": symbol " + std::to_string(s) +
                                  " outside alphabet 0.." + std::to_string(k - 1));
  if (auto bad = forbidden_transition(space, word))
    throw std::invalid_argument(std::string(what) + " " + to_string(word) + " is inadmissible: transition " +
                                std::to_string(bad->first) + "->" + std::to_string(bad->second) +
                                " is forbidden");
}

std::string to_string(std::span<const Symbol> word) {
  bool wide = std::any_of(word.begin(), word.end(), [](Symbol s) { return s > 9; });
  std::ostringstream out;
  for (std::size_t j = 0; j < word.size(); ++j) {
    if (wide && j > 0) out << ',';
    out << word[j];
  }
  return out.str();
}

BigInt count_admissible_words(const ShiftSpace& space, int n) {
  if (n < 1) throw std::invalid_argument("word length must be at least 1");
  const int k = space.alphabet_size();
  std::vector<BigInt> v(static_cast<std::size_t>(k), BigInt(1));
  for (int step = 1; step < n; ++step) {
    std::vector<BigInt> next(static_cast<std::size_t>(k), BigInt(0));
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j)
        if (space.allows(i, j)) next[static_cast<std::size_t>(j)] += v[static_cast<std::size_t>(i)];
    v = std::move(next);
  }
  BigInt total = 0;
  for (const auto& x : v) total += x;
  return total;
}

AdmissibleWords::AdmissibleWords(const ShiftSpace& space, int length, std::optional<Symbol> after)
    : space_(space), length_(length), after_(after) {
  if (length < 0) throw std::invalid_argument("word length must be non-negative");
}

BigInt AdmissibleWords::count() const {
  if (length_ == 0) return 1;
  if (!after_) return count_admissible_words(space_, length_);
  BigInt total = 0;
  for (iterator it = begin(); it != end(); ++it) ++total;
  return total;
}

AdmissibleWords::iterator::iterator(const AdmissibleWords* owner, bool done) : owner_(owner), done_(done) {
  if (done_) return;
  word_.assign(static_cast<std::size_t>(owner_->length_), 0);
  if (owner_->length_ == 0) return;
  // First symbol: smallest admissible start.
  const int k = owner_->space_.alphabet_size();
  Symbol s = 0;
  while (s < k && !owner_->can_start(s)) ++s;
  if (s == k) {
    done_ = true;
    return;
  }
  word_[0] = s;
  if (!fill_from(1)) done_ = true;
}

bool AdmissibleWords::iterator::fill_from(std::size_t position) {
  // Every symbol has a successor, so the smallest continuation always exists.
  const int k = owner_->space_.alphabet_size();
  for (std::size_t j = position; j < word_.size(); ++j) {
    Symbol s = 0;
    while (s < k && !owner_->space_.allows(word_[j - 1], s)) ++s;
    if (s == k) return false;
    word_[j] = s;
  }
  return true;
}

AdmissibleWords::iterator& AdmissibleWords::iterator::operator++() {
  if (done_) return *this;
  const int k = owner_->space_.alphabet_size();
  for (std::size_t j = word_.size(); j-- > 0;) {
    for (Symbol s = word_[j] + 1; s < k; ++s) {
      bool ok = j == 0 ? owner_->can_start(s) : owner_->space_.allows(word_[j - 1], s);
      if (ok) {
        word_[j] = s;
        if (fill_from(j + 1)) return *this;
      }
    }
  }
  done_ = true;
  return *this;
}

// ---------------------------------------------------------------------------

TwoSidedCylinder make_cylinder(const ShiftSpace& space, int first, Word symbols) {
  if (symbols.empty()) throw std::invalid_argument("cylinder must fix at least one coordinate");
  require_admissible(space, symbols, "cylinder");
  return TwoSidedCylinder{first, std::move(symbols)};
}

PastWord::PastWord(const ShiftSpace& space, Word repr) : repr_(std::move(repr)) {
  if (repr_.empty()) throw std::invalid_argument("past word must be non-empty");
  require_admissible(space, repr_, "past word");
  if (!space.allows(repr_.back(), repr_.front()))
    throw std::invalid_argument("past word " + to_string(repr_) + " does not repeat periodically: transition " +
                                std::to_string(repr_.back()) + "->" + std::to_string(repr_.front()) +
                                " is forbidden");
}

Symbol PastWord::at(int coordinate) const {
  if (coordinate >= 0) throw std::out_of_range("past coordinates are negative");
  const int period = static_cast<int>(repr_.size());
  const int back = (-coordinate - 1) % period;  // 0 for the rightmost symbol
  return repr_[static_cast<std::size_t>(period - 1 - back)];
}

Word PastWord::suffix(int length) const {
  Word out(static_cast<std::size_t>(length));
  for (int j = 0; j < length; ++j) out[static_cast<std::size_t>(j)] = at(j - length);
  return out;
}

Symbol SplicedPoint::at(int coordinate) const {
  if (coordinate < 0) return past.at(coordinate);
  if (coordinate >= future_length()) throw std::out_of_range("coordinate beyond the represented future");
  return future[static_cast<std::size_t>(coordinate)];
}

SplicedPoint bracket(const ShiftSpace& space, const PastWord& past, Word future) {
  require_admissible(space, future, "future word");
  if (!future.empty() && !space.allows(past.last(), future.front()))
    throw std::invalid_argument("cannot splice past and future: transition " + std::to_string(past.last()) +
                                "->" + std::to_string(future.front()) + " is forbidden");
  return SplicedPoint{past, std::move(future)};
}

std::optional<FiberConstraint> shifted_cylinder_constraints(const ShiftSpace& space,
                                                            const TwoSidedCylinder& cylinder,
                                                            const PastWord& past, int shift) {
  if (shift < 0) throw std::invalid_argument("shift must be non-negative");
  FiberConstraint constraint;
  constraint.offset = std::max(0, shift + cylinder.first);
  for (int j = cylinder.first; j <= cylinder.last(); ++j) {
    const int m = shift + j;
    const Symbol z = cylinder.symbols[static_cast<std::size_t>(j - cylinder.first)];
    if (m <= -1) {
      if (past.at(m) != z) return std::nullopt;
    } else {
      constraint.symbols.push_back(z);
    }
  }
  if (constraint.offset == 0 && !constraint.symbols.empty() &&
      !space.allows(past.last(), constraint.symbols.front()))
    return std::nullopt;
  if (constraint.symbols.empty()) constraint.offset = 0;
  return constraint;
}

std::optional<FiberConstraint> intersect(const FiberConstraint& a, const FiberConstraint& b) {
  if (a.symbols.empty()) return b;
  if (b.symbols.empty()) return a;
  const int lo = std::min(a.offset, b.offset);
  const int hi = std::max(a.end(), b.end());
  FiberConstraint out{lo, Word(static_cast<std::size_t>(hi - lo), kAnySymbol)};
  auto place = [&](const FiberConstraint& c) {
    for (std::size_t j = 0; j < c.symbols.size(); ++j) {
      Symbol& slot = out.symbols[static_cast<std::size_t>(c.offset - lo) + j];
      if (c.symbols[j] == kAnySymbol) continue;
      if (slot != kAnySymbol && slot != c.symbols[j]) return false;
      slot = c.symbols[j];
    }
    return true;
  };
  if (!place(a) || !place(b)) return std::nullopt;
  return out;
}

// ---------------------------------------------------------------------------

namespace {

std::size_t pack(std::span<const Symbol> word, int k) {
  std::size_t code = 0;
  for (Symbol s : word) code = code * static_cast<std::size_t>(k) + static_cast<std::size_t>(s);
  return code;
}

std::vector<Word> admissible_blocks(const ShiftSpace& base, int length) {
  if (length < 1) throw std::invalid_argument("block length must be at least 1");
  std::vector<Word> words;
  for (const Word& w : AdmissibleWords(base, length)) words.push_back(w);
  return words;
}

IndexMatrix block_transitions(const ShiftSpace& base, const std::vector<Word>& words) {
  const auto n = static_cast<Eigen::Index>(words.size());
  IndexMatrix a = IndexMatrix::Zero(n, n);
  for (Eigen::Index u = 0; u < n; ++u)
    for (Eigen::Index v = 0; v < n; ++v) {
      const Word& x = words[static_cast<std::size_t>(u)];
      const Word& y = words[static_cast<std::size_t>(v)];
      if (std::equal(x.begin() + 1, x.end(), y.begin()) && base.allows(x.back(), y.back())) a(u, v) = 1;
    }
  return a;
}

}  // namespace

BlockCode::BlockCode(const ShiftSpace& base, int block_length)
    : base_(base),
      block_length_(block_length),
      words_(admissible_blocks(base, block_length)),
      blocks_(block_transitions(base, words_), base.metric_base()) {
  const int k = base_.alphabet_size();
  std::size_t table = 1;
  for (int j = 0; j < block_length_; ++j) table *= static_cast<std::size_t>(k);
  lookup_.assign(table, -1);
  for (std::size_t id = 0; id < words_.size(); ++id) lookup_[pack(words_[id], k)] = static_cast<int>(id);

  successors_ = Eigen::MatrixXi::Constant(size(), k, -1);
  Word next(static_cast<std::size_t>(block_length_));
  for (int id = 0; id < size(); ++id) {
    const Word& w = block(id);
    std::copy(w.begin() + 1, w.end(), next.begin());
    for (Symbol s = 0; s < k; ++s) {
      if (!base_.allows(w.back(), s)) continue;
      next.back() = s;
      successors_(id, s) = lookup_[pack(next, k)];
    }
  }
}

std::optional<int> BlockCode::index_of(std::span<const Symbol> block) const {
  if (static_cast<int>(block.size()) != block_length_) return std::nullopt;
  const int k = base_.alphabet_size();
  for (Symbol s : block)
    if (s < 0 || s >= k) return std::nullopt;
  int id = lookup_[pack(block, k)];
  if (id < 0) return std::nullopt;
  return id;
}

Word BlockCode::encode(std::span<const Symbol> word) const {
  if (static_cast<int>(word.size()) < block_length_)
    throw std::invalid_argument("word shorter than the block length");
  require_admissible(base_, word, "word");
  Word ids;
  ids.reserve(word.size() - static_cast<std::size_t>(block_length_) + 1);
  for (std::size_t j = 0; j + static_cast<std::size_t>(block_length_) <= word.size(); ++j)
    ids.push_back(*index_of(word.subspan(j, static_cast<std::size_t>(block_length_))));
  return ids;
}

Word BlockCode::decode(std::span<const Symbol> block_ids) const {
  if (block_ids.empty()) return {};
  require_admissible(blocks_, block_ids, "block word");
  Word word = block(block_ids.front());
  for (std::size_t j = 1; j < block_ids.size(); ++j) word.push_back(last_symbol(block_ids[j]));
  return word;
}

BlockCode higher_block_recode(const ShiftSpace& space, int block_length) {
  if (block_length < 1) throw std::invalid_argument("block length must be at least 1");
  return BlockCode(space, block_length);
}

}  // namespace alchemy
