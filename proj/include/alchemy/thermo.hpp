#ifndef ALCHEMY_THERMO_HPP
#define ALCHEMY_THERMO_HPP

#include <algorithm>
#include <optional>
#include <span>
#include <vector>

#include "alchemy/core.hpp"
#include "alchemy/perron.hpp"
#include "alchemy/potential.hpp"
#include "alchemy/shift.hpp"

namespace alchemy {

struct ThermoOptions {
  PerronOptions perron;
  /// Tolerance for h(mu) + int G dmu = P(G) and for stochasticity checks.
  double variational_tolerance = 1e-12;
};

/// Smallest block length on which a one-sided window-r potential becomes an
/// edge weight: max(1, r - 1). For two-sided windows this is the length used
/// after shift_reduce.
int presentation_length(const LocallyConstantPotential& g);

/// Weighted transitions on an L-block presentation: B(u, v) = e^{G(e)} where e
/// is the (L+1)-word u followed by the last symbol of v, and G reads the
/// first r symbols of e. Needs a one-sided potential with r <= L + 1.
template <typename Scalar>
Matrix<Scalar> transfer_matrix(const BlockCode& code, const LocallyConstantPotential& g);

/// Alternative presentation on blocks of length m + r that weights the
/// target block: B(u, v) = e^{G(v)}. Works for two-sided windows directly.
template <typename Scalar>
Matrix<Scalar> target_block_matrix(const BlockCode& code, const LocallyConstantPotential& g);

/// Equilibrium state as a stationary Markov chain on a block presentation:
/// pi_u = nu_u h_u and Q(u, v) = B(u, v) h_v / (rho h_u).
template <typename Scalar>
struct EquilibriumState {
  BlockCode code;
  PerronData<Scalar> perron;
  double pressure = 0.0;
  Vector<Scalar> stationary;
  Matrix<Scalar> transition;
  double entropy = 0.0;
};

template <typename Scalar>
EquilibriumState<Scalar> markov_state(BlockCode code, PerronData<Scalar> perron);

/// Equilibrium state of G (shift-reduced if two-sided) on the block length
/// given, or the minimal one when block_length is 0.
template <typename Scalar>
EquilibriumState<Scalar> equilibrium_state(const LocallyConstantPotential& g, const ThermoOptions& options = {},
                                           int block_length = 0);

/// Same measure computed from target_block_matrix on the unreduced window.
template <typename Scalar>
EquilibriumState<Scalar> equilibrium_state_target_weighted(const LocallyConstantPotential& g,
                                                           const ThermoOptions& options = {});

/// Cylinder mass together with an admissibility flag; inadmissible cylinders
/// have mass 0 and admissible == false.
template <typename Scalar>
struct CylinderMass {
  Scalar value{};
  bool admissible = false;
};

/// mu[w] for a word of base symbols; shift invariance makes the start
/// coordinate irrelevant.
template <typename Scalar>
CylinderMass<Scalar> cylinder_measure(const EquilibriumState<Scalar>& state, std::span<const Symbol> word);

template <typename Scalar>
CylinderMass<Scalar> cylinder_measure(const EquilibriumState<Scalar>& state, const TwoSidedCylinder& cylinder) {
  return cylinder_measure(state, std::span<const Symbol>(cylinder.symbols));
}

/// P(G) = log rho of the weighted transition matrix.
double pressure_spectral(const LocallyConstantPotential& g, const ThermoOptions& options = {});

/// log sum over admissible words w of length n + m + r - 1 of e^{S_n G(w)},
/// by transfer contraction with rescaling.
double log_bowen_sum(const LocallyConstantPotential& g, int n);
/// (1/n) log_bowen_sum(g, n).
double pressure_bowen(const LocallyConstantPotential& g, int n);
/// log_bowen_sum(g, n + 1) - log_bowen_sum(g, n); converges geometrically.
double pressure_bowen_increment(const LocallyConstantPotential& g, int n);

/// A stationary Markov chain on the alphabet of a block presentation.
struct MarkovChain {
  Vector<double> stationary;
  Matrix<double> transition;
};

template <typename Scalar>
MarkovChain chain_of(const EquilibriumState<Scalar>& state);

/// Stationary vector of a stochastic matrix with a primitive support.
Vector<double> stationary_distribution(const Matrix<double>& transition);

/// Throws std::invalid_argument unless the chain is stochastic, supported on
/// the allowed transitions of `code`, and stationary.
void validate_chain(const MarkovChain& chain, const BlockCode& code, double tolerance = 1e-12);

/// -sum pi_i Q(i,j) log Q(i,j).
double entropy(const MarkovChain& chain);

/// int G dmu for the chain's measure; needs r + m <= L + 1.
double expected_value(const MarkovChain& chain, const BlockCode& code, const LocallyConstantPotential& g);

/// entropy + int G; bounded above by P(G).
double variational_score(const MarkovChain& chain, const BlockCode& code, const LocallyConstantPotential& g,
                         double tolerance = 1e-12);

/// Random chain with positive weights on every allowed transition of `code`.
MarkovChain random_chain(const BlockCode& code, std::mt19937_64& rng);

// ---------------------------------------------------------------------------
// Conditional measures on unstable fibers

/// The conditional measure of an equilibrium state on the unstable fiber of a
/// past: y_0 follows the chain's row for the past's last block, then the chain
/// continues. Coordinates 0..pinned.size()-1 may be pinned, which shrinks the
/// fiber and renormalizes the measure.
template <typename Scalar>
class UnstableFiberMeasure {
 public:
  UnstableFiberMeasure(EquilibriumState<Scalar> state, PastWord past, Word pinned = {});

  const EquilibriumState<Scalar>& state() const { return state_; }
  const BlockCode& code() const { return state_.code; }
  const PastWord& past() const { return past_; }
  const Word& pinned() const { return pinned_; }
  /// Block holding coordinates -L..-1.
  int start_block() const { return start_block_; }
  /// Unnormalized mass of the pinned prefix (1 when nothing is pinned).
  const Scalar& pinned_mass() const { return pinned_mass_; }

  /// mu^u[y_0 .. y_{len-1}].
  Scalar mass(std::span<const Symbol> word) const;
  /// Law of y_0.
  Vector<Scalar> entry_distribution() const;

 private:
  Scalar raw_mass(std::span<const Symbol> word) const;

  EquilibriumState<Scalar> state_;
  PastWord past_;
  Word pinned_;
  int start_block_ = 0;
  Scalar pinned_mass_{1};
};

/// Conditional Gibbs measure of G on the fiber of `past`. G must be one-sided.
template <typename Scalar>
UnstableFiberMeasure<Scalar> conditional_unstable_measure(const PastWord& past, const LocallyConstantPotential& g,
                                                          const ThermoOptions& options = {}, Word pinned = {},
                                                          int block_length = 0);

struct GibbsRow {
  int n = 0;
  double min_ratio = 0.0;
  double max_ratio = 0.0;
};

struct GibbsReport {
  int depth = 0;
  double min_ratio = 0.0;
  double max_ratio = 0.0;
  std::vector<GibbsRow> rows;
};

/// Extremes over fiber words of mu^u[y_0..y_{n+depth-1}] / e^{S_n G(y) - n P(G)}
/// for n = 1..n_max, by max/min-product contraction along the block chain.
/// When the cylinder is shorter than S_n G needs, every extension is scored.
template <typename Scalar>
GibbsReport gibbs_ratio_report(const UnstableFiberMeasure<Scalar>& fiber, const LocallyConstantPotential& g,
                               int n_max, int depth, const ThermoOptions& options = {});

}  // namespace alchemy

#include "alchemy/thermo_impl.hpp"

#endif  // ALCHEMY_THERMO_HPP
