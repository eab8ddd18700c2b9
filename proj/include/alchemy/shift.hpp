#ifndef ALCHEMY_SHIFT_HPP
#define ALCHEMY_SHIFT_HPP

#include <cstddef>
#include <iterator>
#include <optional>
#include <span>
#include <string>
#include <utility>

#include "alchemy/core.hpp"

namespace alchemy {

/// Smallest m with (support)^m entrywise positive, found by boolean powering
/// up to Wielandt's bound (k-1)^2 + 1. Empty when the support is not primitive.
std::optional<int> primitivity_exponent(const IndexMatrix& support);

/// Subshift of finite type over symbols 0..k-1 with a 0/1 transition matrix.
///
/// Every row and column of the matrix must contain a 1. Non-primitive matrices
/// are accepted; operations that need mixing call require_primitive().
class ShiftSpace {
 public:
  explicit ShiftSpace(IndexMatrix transitions, double metric_base = 0.5);

  int alphabet_size() const { return static_cast<int>(transitions_.rows()); }
  const IndexMatrix& transitions() const { return transitions_; }
  bool allows(Symbol from, Symbol to) const { return transitions_(from, to) != 0; }

  std::optional<int> primitivity_exponent() const { return primitivity_exponent_; }
  bool is_primitive() const { return primitivity_exponent_.has_value(); }
  /// Throws NotPrimitive naming the operation.
  void require_primitive(std::string_view operation) const;

  double metric_base() const { return metric_base_; }
  /// Number of future coordinates a Bowen ball of radius metric_base^depth
  /// at time n pins: coordinates 0..n-1+depth.
  int bowen_ball_length(int n, int depth) const { return n + depth; }

  bool operator==(const ShiftSpace& other) const {
    return transitions_ == other.transitions_ && metric_base_ == other.metric_base_;
  }

 private:
  IndexMatrix transitions_;
  std::optional<int> primitivity_exponent_;
  double metric_base_;
};

ShiftSpace build_shift(int k, const IndexMatrix& matrix, double metric_base = 0.5);

/// Full shift on k symbols.
ShiftSpace full_shift(int k);
/// Golden mean shift: the word 11 is forbidden.
ShiftSpace golden_mean_shift();

// ---------------------------------------------------------------------------
// Words

bool is_admissible(const ShiftSpace& space, std::span<const Symbol> word);
/// First forbidden consecutive pair, if any.
std::optional<std::pair<Symbol, Symbol>> forbidden_transition(const ShiftSpace& space,
                                                              std::span<const Symbol> word);
/// Throws std::invalid_argument naming the forbidden transition or bad symbol.
void require_admissible(const ShiftSpace& space, std::span<const Symbol> word,
                        std::string_view what);

std::string to_string(std::span<const Symbol> word);

/// Exact number of admissible words of length n: 1^T A^(n-1) 1.
BigInt count_admissible_words(const ShiftSpace& space, int n);

/// Lazy lexicographic enumeration of admissible words of a fixed length,
/// optionally constrained to follow a given symbol.
class AdmissibleWords {
 public:
  AdmissibleWords(const ShiftSpace& space, int length, std::optional<Symbol> after = {});

  class iterator {
   public:
    using iterator_category = std::input_iterator_tag;
    using value_type = Word;
    using difference_type = std::ptrdiff_t;
    using pointer = const Word*;
    using reference = const Word&;

    iterator() = default;
    reference operator*() const { return word_; }
    pointer operator->() const { return &word_; }
    iterator& operator++();
    void operator++(int) { ++*this; }
    bool operator==(const iterator& other) const { return done_ == other.done_ && (done_ || word_ == other.word_); }

   private:
    friend class AdmissibleWords;
    iterator(const AdmissibleWords* owner, bool done);
    bool fill_from(std::size_t position);

    const AdmissibleWords* owner_ = nullptr;
    Word word_;
    bool done_ = true;
  };

  iterator begin() const { return iterator(this, false); }
  iterator end() const { return iterator(this, true); }
  BigInt count() const;

 private:
  bool can_start(Symbol s) const { return !after_ || space_.allows(*after_, s); }

  ShiftSpace space_;
  int length_;
  std::optional<Symbol> after_;
};

// ---------------------------------------------------------------------------
// Cylinders, pasts, fibers

/// The set {x : x_j = symbols[j - first], first <= j <= last()}.
struct TwoSidedCylinder {
  int first = 0;
  Word symbols;

  int last() const { return first + static_cast<int>(symbols.size()) - 1; }
  int span() const { return static_cast<int>(symbols.size()); }
  /// Past depth M = max(0, -first) and future depth N = max(0, last()).
  int past_depth() const { return first < 0 ? -first : 0; }
  int future_depth() const { return last() > 0 ? last() : 0; }
};

TwoSidedCylinder make_cylinder(const ShiftSpace& space, int first, Word symbols);

/// Left-infinite past ...repr repr repr whose rightmost symbol sits at
/// coordinate -1.
class PastWord {
 public:
  PastWord(const ShiftSpace& space, Word repr);

  const Word& repr() const { return repr_; }
  /// Symbol at a coordinate <= -1.
  Symbol at(int coordinate) const;
  /// Coordinates -length..-1, left to right.
  Word suffix(int length) const;
  Symbol last() const { return repr_.back(); }

 private:
  Word repr_;
};

/// A point assembled from a past and a finite future: x_j = past(j) for j < 0
/// and future[j] for 0 <= j < future.size().
struct SplicedPoint {
  PastWord past;
  Word future;

  Symbol at(int coordinate) const;
  int future_length() const { return static_cast<int>(future.size()); }
};

/// [past, future]: splices the past of one point to the future of another.
/// Throws std::invalid_argument if the transition past(-1) -> future[0] is
/// forbidden.
SplicedPoint bracket(const ShiftSpace& space, const PastWord& past, Word future);

/// Marks a coordinate left free inside a FiberConstraint.
inline constexpr Symbol kAnySymbol = -1;

/// Symbols prescribed on the fiber coordinates offset..offset+symbols.size()-1.
/// An empty word is the whole fiber; kAnySymbol entries are unconstrained.
struct FiberConstraint {
  int offset = 0;
  Word symbols;

  int end() const { return offset + static_cast<int>(symbols.size()); }
};

/// sigma^{-i}(A) intersected with the unstable fiber of the past. Coordinates
/// i+j < 0 are checked against the past; the rest become a constraint word.
/// Empty optional when the intersection is empty.
std::optional<FiberConstraint> shifted_cylinder_constraints(const ShiftSpace& space,
                                                            const TwoSidedCylinder& cylinder,
                                                            const PastWord& past, int shift);

/// Merge two fiber constraints, filling any gap with kAnySymbol. Empty
/// optional when they conflict.
std::optional<FiberConstraint> intersect(const FiberConstraint& a, const FiberConstraint& b);

// ---------------------------------------------------------------------------
// Higher block presentation

/// N-block presentation: the alphabet is the admissible N-words (in
/// lexicographic order), with u -> v allowed when u and v overlap in N-1
/// symbols.
class BlockCode {
 public:
  BlockCode(const ShiftSpace& base, int block_length);

  const ShiftSpace& base() const { return base_; }
  const ShiftSpace& blocks() const { return blocks_; }
  int block_length() const { return block_length_; }
  int size() const { return static_cast<int>(words_.size()); }

  const Word& block(int id) const { return words_[static_cast<std::size_t>(id)]; }
  Symbol last_symbol(int id) const { return words_[static_cast<std::size_t>(id)].back(); }
  std::optional<int> index_of(std::span<const Symbol> block) const;
  /// Block reached from `id` by appending `symbol`, or -1 if forbidden.
  int successor(int id, Symbol symbol) const {
    return successors_(id, symbol);
  }

  /// Word of length L >= N to its L-N+1 overlapping blocks.
  Word encode(std::span<const Symbol> word) const;
  /// Inverse of encode.
  Word decode(std::span<const Symbol> block_ids) const;

 private:
  ShiftSpace base_;
  int block_length_;
  std::vector<Word> words_;
  std::vector<int> lookup_;
  Eigen::MatrixXi successors_;
  ShiftSpace blocks_;
};

BlockCode higher_block_recode(const ShiftSpace& space, int block_length);

}  // namespace alchemy

#endif  // ALCHEMY_SHIFT_HPP
