// Template definitions for thermo.hpp.

#ifndef ALCHEMY_THERMO_IMPL_HPP
#define ALCHEMY_THERMO_IMPL_HPP

namespace alchemy {

namespace detail {

/// The (L+1)-word u followed by s.
inline Word edge_word(const BlockCode& code, int u, Symbol s) {
  Word e = code.block(u);
  e.push_back(s);
  return e;
}

template <typename Scalar>
Scalar power(const Scalar& base, int exponent) {
  Scalar out(1);
  for (int j = 0; j < exponent; ++j) out *= base;
  return out;
}

}  // namespace detail

template <typename Scalar>
Matrix<Scalar> transfer_matrix(const BlockCode& code, const LocallyConstantPotential& g) {
  if (!g.one_sided())
    throw std::invalid_argument("transfer matrix needs a one-sided potential; apply shift_reduce first");
  const int r = g.window().future;
  if (r > code.block_length() + 1)
    throw std::invalid_argument("potential window " + std::to_string(r) + " exceeds the presentation edge length " +
                                std::to_string(code.block_length() + 1));
  const int k = code.base().alphabet_size();
  Matrix<Scalar> b = Matrix<Scalar>::Zero(code.size(), code.size());
  for (int u = 0; u < code.size(); ++u)
    for (Symbol s = 0; s < k; ++s) {
      const int v = code.successor(u, s);
      if (v < 0) continue;
      const Word e = detail::edge_word(code, u, s);
      b(u, v) = g.weight<Scalar>(std::span<const Symbol>(e).first(static_cast<std::size_t>(r)));
    }
  return b;
}

template <typename Scalar>
Matrix<Scalar> target_block_matrix(const BlockCode& code, const LocallyConstantPotential& g) {
  if (code.block_length() != g.window().length())
    throw std::invalid_argument("target-block presentation needs blocks of the window length");
  const int k = code.base().alphabet_size();
  Matrix<Scalar> b = Matrix<Scalar>::Zero(code.size(), code.size());
  for (int u = 0; u < code.size(); ++u)
    for (Symbol s = 0; s < k; ++s) {
      const int v = code.successor(u, s);
      if (v >= 0) b(u, v) = g.weight<Scalar>(code.block(v));
    }
  return b;
}

template <typename Scalar>
EquilibriumState<Scalar> markov_state(BlockCode code, PerronData<Scalar> perron) {
  const Eigen::Index n = perron.weights.rows();
  EquilibriumState<Scalar> state{std::move(code), std::move(perron), 0.0, {}, {}, 0.0};
  const PerronData<Scalar>& p = state.perron;
  state.pressure = log_of(p.eigenvalue);
  state.stationary = p.left.cwiseProduct(p.right);
  state.transition = Matrix<Scalar>::Zero(n, n);
  for (Eigen::Index u = 0; u < n; ++u)
    for (Eigen::Index v = 0; v < n; ++v)
      if (p.weights(u, v) != 0) state.transition(u, v) = p.weights(u, v) * p.right(v) / (p.eigenvalue * p.right(u));
  state.entropy = entropy(chain_of(state));
  return state;
}

template <typename Scalar>
EquilibriumState<Scalar> equilibrium_state(const LocallyConstantPotential& g, const ThermoOptions& options,
                                           int block_length) {
  g.space().require_primitive("equilibrium state");
  LocallyConstantPotential reduced = shift_reduce(g);
  BlockCode code(g.space(), std::max(presentation_length(reduced), block_length));
  Matrix<Scalar> b = transfer_matrix<Scalar>(code, reduced);
  return markov_state(std::move(code), perron_of(b, options.perron));
}

template <typename Scalar>
EquilibriumState<Scalar> equilibrium_state_target_weighted(const LocallyConstantPotential& g,
                                                           const ThermoOptions& options) {
  g.space().require_primitive("equilibrium state");
  BlockCode code(g.space(), g.window().length());
  Matrix<Scalar> b = target_block_matrix<Scalar>(code, g);
  return markov_state(std::move(code), perron_of(b, options.perron));
}

template <typename Scalar>
CylinderMass<Scalar> cylinder_measure(const EquilibriumState<Scalar>& state, std::span<const Symbol> word) {
  const BlockCode& code = state.code;
  if (word.empty()) return {Scalar(1), true};
  if (!is_admissible(code.base(), word)) return {Scalar(0), false};
  const auto length = static_cast<int>(word.size());
  if (length < code.block_length()) {
    Scalar total(0);
    for (int u = 0; u < code.size(); ++u) {
      const Word& b = code.block(u);
      if (std::equal(word.begin(), word.end(), b.begin())) total += state.stationary(u);
    }
    return {total, true};
  }
  const Word ids = code.encode(word);
  Scalar value = state.stationary(ids.front());
  for (std::size_t j = 1; j < ids.size(); ++j) value *= state.transition(ids[j - 1], ids[j]);
  return {value, true};
}

template <typename Scalar>
MarkovChain chain_of(const EquilibriumState<Scalar>& state) {
  MarkovChain chain;
  chain.stationary = state.stationary.unaryExpr([](const Scalar& x) { return to_double(x); });
  chain.transition = state.transition.unaryExpr([](const Scalar& x) { return to_double(x); });
  return chain;
}

// ---------------------------------------------------------------------------

template <typename Scalar>
UnstableFiberMeasure<Scalar>::UnstableFiberMeasure(EquilibriumState<Scalar> state, PastWord past, Word pinned)
    : state_(std::move(state)), past_(std::move(past)), pinned_(std::move(pinned)) {
  const int l = state_.code.block_length();
  auto id = state_.code.index_of(past_.suffix(l));
  if (!id) throw std::invalid_argument("past word is not admissible in this presentation");
  start_block_ = *id;
  if (!pinned_.empty()) {
    require_admissible(state_.code.base(), pinned_, "pinned fiber prefix");
    if (!state_.code.base().allows(past_.last(), pinned_.front()))
      throw std::invalid_argument("pinned prefix cannot follow the past: transition " +
                                  std::to_string(past_.last()) + "->" + std::to_string(pinned_.front()) +
                                  " is forbidden");
    pinned_mass_ = raw_mass(pinned_);
  }
}

template <typename Scalar>
Scalar UnstableFiberMeasure<Scalar>::raw_mass(std::span<const Symbol> word) const {
  const BlockCode& code = state_.code;
  const int k = code.base().alphabet_size();
  int u = start_block_;
  Scalar value(1);
  for (Symbol y : word) {
    if (y < 0 || y >= k) return Scalar(0);
    const int v = code.successor(u, y);
    if (v < 0) return Scalar(0);
    value *= state_.transition(u, v);
    u = v;
  }
  return value;
}

template <typename Scalar>
Scalar UnstableFiberMeasure<Scalar>::mass(std::span<const Symbol> word) const {
  const std::size_t overlap = std::min(word.size(), pinned_.size());
  if (!std::equal(word.begin(), word.begin() + static_cast<std::ptrdiff_t>(overlap), pinned_.begin()))
    return Scalar(0);
  if (word.size() <= pinned_.size()) return Scalar(1);
  return raw_mass(word) / pinned_mass_;
}

template <typename Scalar>
Vector<Scalar> UnstableFiberMeasure<Scalar>::entry_distribution() const {
  const int k = state_.code.base().alphabet_size();
  Vector<Scalar> p(k);
  for (Symbol s = 0; s < k; ++s) {
    const Symbol word[1] = {s};
    p(s) = mass(word);
  }
  return p;
}

template <typename Scalar>
UnstableFiberMeasure<Scalar> conditional_unstable_measure(const PastWord& past, const LocallyConstantPotential& g,
                                                          const ThermoOptions& options, Word pinned,
                                                          int block_length) {
  if (!g.one_sided())
    throw std::invalid_argument("conditional unstable measure needs a one-sided potential; apply shift_reduce first");
  return UnstableFiberMeasure<Scalar>(equilibrium_state<Scalar>(g, options, block_length), past, std::move(pinned));
}

template <typename Scalar>
GibbsReport gibbs_ratio_report(const UnstableFiberMeasure<Scalar>& fiber, const LocallyConstantPotential& g,
                               int n_max, int depth, const ThermoOptions& options) {
  if (!g.one_sided()) throw std::invalid_argument("Gibbs audit needs a one-sided potential; apply shift_reduce first");
  if (n_max < 1 || depth < 0) throw std::invalid_argument("Gibbs audit needs n_max >= 1 and depth >= 0");
  const BlockCode& code = fiber.code();
  const int r = g.window().future;
  if (r > code.block_length() + 1)
    throw std::invalid_argument("potential window exceeds the fiber presentation edge length");
  const Scalar rho = equilibrium_state<Scalar>(g, options).perron.eigenvalue;
  const Matrix<Scalar>& q = fiber.state().transition;
  const Word& pinned = fiber.pinned();
  const int k = code.base().alphabet_size();
  const int blocks = code.size();

  // Reciprocal potential weight on each edge, read from the last r symbols.
  Matrix<Scalar> inverse_weight = Matrix<Scalar>::Zero(blocks, blocks);
  for (int u = 0; u < blocks; ++u)
    for (Symbol s = 0; s < k; ++s) {
      const int v = code.successor(u, s);
      if (v < 0) continue;
      const Word e = detail::edge_word(code, u, s);
      inverse_weight(u, v) = Scalar(1) / g.weight<Scalar>(std::span<const Symbol>(e).last(static_cast<std::size_t>(r)));
    }

  GibbsReport report;
  report.depth = depth;
  for (int n = 1; n <= n_max; ++n) {
    const int mass_length = std::max(n + depth, static_cast<int>(pinned.size()));
    const int horizon = std::max(mass_length, n + r - 1);
    Vector<Scalar> hi = Vector<Scalar>::Zero(blocks), lo = Vector<Scalar>::Zero(blocks);
    std::vector<char> reached(static_cast<std::size_t>(blocks), 0);
    hi(fiber.start_block()) = Scalar(1);
    lo(fiber.start_block()) = Scalar(1);
    reached[static_cast<std::size_t>(fiber.start_block())] = 1;
    double hi_log = 0.0, lo_log = 0.0;

    for (int c = 0; c < horizon; ++c) {
      Vector<Scalar> next_hi = Vector<Scalar>::Zero(blocks), next_lo = Vector<Scalar>::Zero(blocks);
      std::vector<char> next_reached(static_cast<std::size_t>(blocks), 0);
      const int t = c - r + 1;
      const bool potential_term = t >= 0 && t <= n - 1;
      for (int u = 0; u < blocks; ++u) {
        if (!reached[static_cast<std::size_t>(u)]) continue;
        for (Symbol s = 0; s < k; ++s) {
          const int v = code.successor(u, s);
          if (v < 0) continue;
          if (c < static_cast<int>(pinned.size()) && s != pinned[static_cast<std::size_t>(c)]) continue;
          Scalar factor(1);
          if (c < mass_length) factor *= q(u, v);
          if (potential_term) factor *= inverse_weight(u, v);
          const Scalar a = hi(u) * factor, b = lo(u) * factor;
          auto& seen = next_reached[static_cast<std::size_t>(v)];
          if (!seen) {
            next_hi(v) = a;
            next_lo(v) = b;
            seen = 1;
          } else {
            if (a > next_hi(v)) next_hi(v) = a;
            if (b < next_lo(v)) next_lo(v) = b;
          }
        }
      }
      hi = std::move(next_hi);
      lo = std::move(next_lo);
      reached = std::move(next_reached);
      if constexpr (!is_exact_v<Scalar>) {
        const double hs = hi.maxCoeff(), ls = lo.maxCoeff();
        hi /= hs;
        lo /= ls;
        hi_log += std::log(hs);
        lo_log += std::log(ls);
      }
    }

    Scalar best_hi(0), best_lo(0);
    bool any = false;
    for (int v = 0; v < blocks; ++v) {
      if (!reached[static_cast<std::size_t>(v)]) continue;
      if (!any || hi(v) > best_hi) best_hi = hi(v);
      if (!any || lo(v) < best_lo) best_lo = lo(v);
      any = true;
    }
    GibbsRow row;
    row.n = n;
    if constexpr (is_exact_v<Scalar>) {
      const Scalar scale = detail::power(rho, n) / fiber.pinned_mass();
      row.max_ratio = to_double(best_hi * scale);
      row.min_ratio = to_double(best_lo * scale);
    } else {
      const double log_scale = n * std::log(rho) - std::log(fiber.pinned_mass());
      row.max_ratio = std::exp(std::log(best_hi) + hi_log + log_scale);
      row.min_ratio = std::exp(std::log(best_lo) + lo_log + log_scale);
    }
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

}  // namespace alchemy

#endif  // ALCHEMY_THERMO_IMPL_HPP
