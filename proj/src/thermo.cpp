#include "alchemy/thermo.hpp"

namespace alchemy {

int presentation_length(const LocallyConstantPotential& g) { return std::max(1, g.window().length() - 1); }

double pressure_spectral(const LocallyConstantPotential& g, const ThermoOptions& options) {
  g.space().require_primitive("pressure");
  LocallyConstantPotential reduced = shift_reduce(g);
  BlockCode code(g.space(), presentation_length(reduced));
  return std::log(perron(transfer_matrix<double>(code, reduced), options.perron).eigenvalue);
}

double log_bowen_sum(const LocallyConstantPotential& g, int n) {
  if (n < 1) throw std::invalid_argument("Bowen sums need n >= 1");
  const int w = g.window().length();
  const int l = std::max(1, w - 1);
  const int total = n + w - 1;  // word length
  BlockCode code(g.space(), l);
  const int blocks = code.size();
  const int k = g.space().alphabet_size();

  Matrix<double> plain = Matrix<double>::Zero(blocks, blocks);
  Matrix<double> weighted = Matrix<double>::Zero(blocks, blocks);
  for (int u = 0; u < blocks; ++u)
    for (Symbol s = 0; s < k; ++s) {
      const int v = code.successor(u, s);
      if (v < 0) continue;
      const Word e = detail::edge_word(code, u, s);
      plain(u, v) = 1.0;
      weighted(u, v) = std::exp(g.value(std::span<const Symbol>(e).last(static_cast<std::size_t>(w))));
    }

  // Terms whose window fits inside the initial block.
  RowVector<double> v(blocks);
  for (int u = 0; u < blocks; ++u) {
    const Word& b = code.block(u);
    double sum = 0.0;
    for (int t = 0; t < n && t + w <= l; ++t)
      sum += g.value(std::span<const Symbol>(b).subspan(static_cast<std::size_t>(t), static_cast<std::size_t>(w)));
    v(u) = std::exp(sum);
  }
  double log_scale = 0.0;
  for (int length = l + 1; length <= total; ++length) {
    const int t = length - w;
    v = (t >= 0 && t <= n - 1) ? RowVector<double>(v * weighted) : RowVector<double>(v * plain);
    const double s = v.sum();
    v /= s;
    log_scale += std::log(s);
  }
  return log_scale + std::log(v.sum());
}

double pressure_bowen(const LocallyConstantPotential& g, int n) { return log_bowen_sum(g, n) / n; }

double pressure_bowen_increment(const LocallyConstantPotential& g, int n) {
  return log_bowen_sum(g, n + 1) - log_bowen_sum(g, n);
}

Vector<double> stationary_distribution(const Matrix<double>& transition) {
  const Eigen::Index n = transition.rows();
  Matrix<double> system = transition.transpose() - Matrix<double>::Identity(n, n);
  system.row(n - 1).setOnes();
  Vector<double> rhs = Vector<double>::Zero(n);
  rhs(n - 1) = 1.0;
  return system.fullPivLu().solve(rhs);
}

void validate_chain(const MarkovChain& chain, const BlockCode& code, double tolerance) {
  const Eigen::Index n = code.size();
  if (chain.transition.rows() != n || chain.transition.cols() != n || chain.stationary.size() != n)
    throw std::invalid_argument("Markov chain dimension does not match the presentation (" + std::to_string(n) +
                                " states)");
  if (!chain.transition.allFinite() || (chain.transition.array() < 0.0).any())
    throw std::invalid_argument("transition matrix must be finite and nonnegative");
  for (Eigen::Index u = 0; u < n; ++u) {
    if (std::abs(chain.transition.row(u).sum() - 1.0) > tolerance)
      throw std::invalid_argument("transition matrix row " + std::to_string(u) + " does not sum to 1");
    for (Eigen::Index v = 0; v < n; ++v)
      if (chain.transition(u, v) > 0.0 && !code.blocks().allows(static_cast<int>(u), static_cast<int>(v)))
        throw std::invalid_argument("chain uses the forbidden transition " + std::to_string(u) + "->" +
                                    std::to_string(v));
  }
  if ((chain.stationary.array() < 0.0).any() || std::abs(chain.stationary.sum() - 1.0) > tolerance)
    throw std::invalid_argument("stationary vector must be a probability vector");
  const double drift =
      (chain.stationary.transpose() * chain.transition - chain.stationary.transpose()).cwiseAbs().maxCoeff();
  if (drift > 10.0 * tolerance) throw std::invalid_argument("stationary vector is not invariant under the chain");
}

double entropy(const MarkovChain& chain) {
  double h = 0.0;
  for (Eigen::Index u = 0; u < chain.transition.rows(); ++u)
    for (Eigen::Index v = 0; v < chain.transition.cols(); ++v) {
      const double q = chain.transition(u, v);
      if (q > 0.0) h -= chain.stationary(u) * q * std::log(q);
    }
  return h;
}

double expected_value(const MarkovChain& chain, const BlockCode& code, const LocallyConstantPotential& g) {
  const int w = g.window().length();
  const int l = code.block_length();
  const int k = code.base().alphabet_size();
  double total = 0.0;
  if (w <= l) {
    for (int u = 0; u < code.size(); ++u)
      total += chain.stationary(u) * g.value(std::span<const Symbol>(code.block(u)).first(static_cast<std::size_t>(w)));
    return total;
  }
  if (w != l + 1) throw std::invalid_argument("potential window is longer than the chain's edge words");
  for (int u = 0; u < code.size(); ++u)
    for (Symbol s = 0; s < k; ++s) {
      const int v = code.successor(u, s);
      if (v < 0 || chain.transition(u, v) == 0.0) continue;
      total += chain.stationary(u) * chain.transition(u, v) * g.value(detail::edge_word(code, u, s));
    }
  return total;
}

double variational_score(const MarkovChain& chain, const BlockCode& code, const LocallyConstantPotential& g,
                         double tolerance) {
  validate_chain(chain, code, tolerance);
  return entropy(chain) + expected_value(chain, code, g);
}

MarkovChain random_chain(const BlockCode& code, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(0.05, 1.0);
  const int n = code.size();
  MarkovChain chain;
  chain.transition = Matrix<double>::Zero(n, n);
  for (int u = 0; u < n; ++u) {
    for (int v = 0; v < n; ++v)
      if (code.blocks().allows(u, v)) chain.transition(u, v) = dist(rng);
    chain.transition.row(u) /= chain.transition.row(u).sum();
  }
  chain.stationary = stationary_distribution(chain.transition);
  return chain;
}

}  // namespace alchemy
