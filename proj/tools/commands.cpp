#include <fstream>
#include <random>
#include <sstream>

#include "json.hpp"

#include "alchemy/enumerate.hpp"
#include "experiment.hpp"

namespace alchemy::cli {

using nlohmann::ordered_json;

namespace {

template <typename Scalar>
Scalar magnitude(const Scalar& x) {
  return x < Scalar(0) ? Scalar(-x) : x;
}

std::string cylinder_label(const TwoSidedCylinder& c) { return std::to_string(c.first) + ":" + to_string(c.symbols); }

class Csv {
 public:
  explicit Csv(std::initializer_list<std::string_view> header) {
    bool first = true;
    for (auto h : header) {
      out_ << (first ? "" : ",") << h;
      first = false;
    }
    out_ << '\n';
  }

  template <typename... Fields>
  void row(const Fields&... fields) {
    bool first = true;
    ((out_ << (first ? "" : ",") << fields, first = false), ...);
    out_ << '\n';
  }

  std::string str() const { return out_.str(); }

 private:
  std::ostringstream out_;
};

struct Output {
  std::filesystem::path dir;
  ordered_json files = ordered_json::array();

  void write(const std::string& name, const std::string& contents) {
    write_atomically(dir / name, contents);
    files.push_back(name);
  }
};

const LocallyConstantPotential& require(const std::optional<LocallyConstantPotential>& g, const char* key) {
  if (!g) throw ConfigError(std::string("this command needs '") + key + "'");
  return *g;
}

const PastWord& require_past(const ExperimentConfig& cfg) {
  if (!cfg.past) throw ConfigError("this command needs 'past'");
  return *cfg.past;
}

const std::vector<int>& require_ns(const ExperimentConfig& cfg) {
  if (cfg.ns.empty()) throw ConfigError("this command needs 'n_range'");
  return cfg.ns;
}

const std::vector<TwoSidedCylinder>& require_cylinders(const ExperimentConfig& cfg) {
  if (cfg.cylinders.empty()) throw ConfigError("this command needs 'cylinders'");
  return cfg.cylinders;
}

/// Potential for single-potential commands: `potential`, else `target`.
const LocallyConstantPotential& single_potential(const ExperimentConfig& cfg) {
  if (cfg.potential) return *cfg.potential;
  return require(cfg.target, "potential");
}

template <typename Scalar>
TransformJob<Scalar> make_job(const ExperimentConfig& cfg) {
  return TransformJob<Scalar>(require(cfg.reference, "reference"), require(cfg.target, "target"), require_past(cfg),
                              cfg.normalization, cfg.pinned, cfg.thermo);
}

template <typename Scalar>
ordered_json run_pressure(const ExperimentConfig& cfg, Output& out) {
  const LocallyConstantPotential& g = single_potential(cfg);
  const auto state = equilibrium_state<Scalar>(g, cfg.thermo);
  ordered_json r;
  r["pressure"] = state.pressure;
  r["perron_root"] = format_scalar(state.perron.eigenvalue);
  r["entropy"] = state.entropy;
  r["perron_residual"] = state.perron.residual;
  r["block_length"] = state.code.block_length();
  if (!cfg.ns.empty()) {
    Csv csv({"n", "estimator", "value", "diff_to_limit"});
    for (int n : cfg.ns) {
      const double inc = pressure_bowen_increment(g, n);
      const double mean = pressure_bowen(g, n);
      csv.row(n, "increment", format_double(inc), format_double(inc - state.pressure));
      csv.row(n, "mean", format_double(mean), format_double(mean - state.pressure));
    }
    out.write("pressure.csv", csv.str());
  }
  if (!cfg.cylinders.empty()) {
    ordered_json masses = ordered_json::object();
    for (const auto& c : cfg.cylinders) masses[cylinder_label(c)] = format_scalar(cylinder_measure(state, c).value);
    r["equilibrium_cylinders"] = masses;
  }
  return r;
}

template <typename Scalar>
ordered_json run_gibbs(const ExperimentConfig& cfg, Output& out) {
  const LocallyConstantPotential& g = single_potential(cfg);
  const auto fiber = conditional_unstable_measure<Scalar>(require_past(cfg), g, cfg.thermo, cfg.pinned);
  const GibbsReport report = gibbs_ratio_report(fiber, g, cfg.gibbs_n_max, cfg.gibbs_depth, cfg.thermo);
  Csv csv({"n", "min_ratio", "max_ratio"});
  const int tail = std::min(5, cfg.gibbs_n_max);
  double lo_min = INFINITY, lo_max = -INFINITY, hi_min = INFINITY, hi_max = -INFINITY;
  for (const auto& row : report.rows) {
    csv.row(row.n, format_double(row.min_ratio), format_double(row.max_ratio));
    if (row.n < tail) continue;
    lo_min = std::min(lo_min, row.min_ratio);
    lo_max = std::max(lo_max, row.min_ratio);
    hi_min = std::min(hi_min, row.max_ratio);
    hi_max = std::max(hi_max, row.max_ratio);
  }
  out.write("gibbs.csv", csv.str());
  ordered_json r;
  r["depth"] = report.depth;
  r["min_ratio"] = report.min_ratio;
  r["max_ratio"] = report.max_ratio;
  r["tail_from_n"] = tail;
  r["tail_spread"] = std::max(lo_max - lo_min, hi_max - hi_min);
  return r;
}

template <typename Scalar>
ordered_json run_fiber(const ExperimentConfig& cfg, Output& out) {
  const LocallyConstantPotential& g = single_potential(cfg);
  // With G2 = G1 the reference measure is the fiber measure itself.
  const TransformJob<Scalar> job(g, g, require_past(cfg), Normalization::raw, cfg.pinned, cfg.thermo);
  Csv csv({"set", "value"});
  const Vector<Scalar> entry = job.fiber().entry_distribution();
  for (Eigen::Index s = 0; s < entry.size(); ++s) csv.row("y0=" + std::to_string(s), format_scalar(entry(s)));
  ordered_json masses = ordered_json::object();
  for (const auto& c : cfg.cylinders) {
    const auto constraint = shifted_cylinder_constraints(job.space(), c, job.past(), 0);
    const Scalar mass = constraint ? lambda_n_eval(job, 1, *constraint) : Scalar(0);
    csv.row(cylinder_label(c), format_scalar(mass));
    masses[cylinder_label(c)] = format_scalar(mass);
  }
  out.write("fiber.csv", csv.str());
  ordered_json r;
  r["start_block"] = to_string(job.code().block(job.fiber().start_block()));
  r["pinned_mass"] = format_scalar(job.fiber().pinned_mass());
  r["cylinders"] = masses;
  return r;
}

template <typename Scalar>
void error_row(Csv& csv, int n, const std::string& i, const std::string& label, const char* quantity,
               const Scalar& value, const Scalar& reference) {
  const Scalar err = magnitude(Scalar(value - reference));
  csv.row(n, i, label, quantity, format_scalar(value), format_scalar(reference), format_scalar(err),
          format_scalar(Scalar(err * n)));
}

template <typename Scalar>
ordered_json run_transform(const ExperimentConfig& cfg, Output& out) {
  const auto job = make_job<Scalar>(cfg);
  const auto target_state = equilibrium_state<Scalar>(job.target(), cfg.thermo);
  const bool series = cfg.entries.contains("transform.series") && cfg.entries.at("transform.series") == "true";
  Csv csv({"n", "i", "cylinder", "quantity", "value", "reference", "abs_error", "n_times_error"});
  ordered_json per_cylinder = ordered_json::object();
  for (const auto& c : require_cylinders(cfg)) {
    const Scalar reference = cylinder_measure(target_state, c).value;
    const auto report = convergence_report(job, c, require_ns(cfg));
    for (const auto& row : report.rows) {
      const int n = row.n;
      if (series) {
        const auto terms = pushforward_series(job, n, c, n - 1);
        for (int i = 0; i < n; ++i)
          error_row(csv, n, std::to_string(i), cylinder_label(c), "pushforward", terms[static_cast<std::size_t>(i)],
                    reference);
      } else {
        error_row(csv, n, "0", cylinder_label(c), "lambda_n", pushforward_eval(job, n, 0, c), reference);
      }
      error_row(csv, n, "", cylinder_label(c), "mu_n", row.value, reference);
    }
    ordered_json r;
    r["reference"] = format_scalar(reference);
    r["final_mu_n"] = format_scalar(report.rows.back().value);
    r["fitted_constant"] = report.fitted_constant;
    r["max_n_times_error"] = report.max_n_error;
    r["bounded"] = report.bounded;
    per_cylinder[cylinder_label(c)] = r;
  }
  for (int n : cfg.ns) {
    const auto sums = partition_sum(job, n);
    if constexpr (is_exact_v<Scalar>)
      csv.row(n, "", "", "z", format_exact(sums.z.value()), "", "", "");
    else
      csv.row(n, "", "", "log_z", format_double(sums.z.log()), "", "", "");
  }
  out.write("transform.csv", csv.str());
  ordered_json r;
  r["normalization"] = cfg.normalization == Normalization::raw ? "raw" : "pressure";
  r["block_length"] = job.block_length();
  r["cylinders"] = per_cylinder;
  return r;
}

template <typename Scalar>
ordered_json run_growth(const ExperimentConfig& cfg, Output& out) {
  const auto job = make_job<Scalar>(cfg);
  const GrowthSeries series = growth_series(job, require_ns(cfg));
  Csv csv({"n", "log_z", "rate", "increment", "target", "abs_error"});
  double last = 0.0;
  for (const auto& row : series.rows) {
    last = std::abs(row.increment - series.target);
    csv.row(row.n, format_double(row.log_z), format_double(row.rate), format_double(row.increment),
            format_double(series.target), format_double(last));
  }
  out.write("growth.csv", csv.str());
  ordered_json r;
  r["target"] = series.target;
  r["final_increment_error"] = last;
  return r;
}

template <typename Scalar>
ordered_json run_endpoint(const ExperimentConfig& cfg, Output& out) {
  const auto job = make_job<Scalar>(cfg);
  const auto target_state = equilibrium_state<Scalar>(job.target(), cfg.thermo);
  Csv csv({"n", "i", "cylinder", "quantity", "value", "reference", "abs_error", "n_times_error"});
  ordered_json per_cylinder = ordered_json::object();
  for (const auto& c : require_cylinders(cfg)) {
    const Scalar reference = cylinder_measure(target_state, c).value;
    ordered_json values = ordered_json::object();
    for (int n : require_ns(cfg)) {
      if (n <= c.past_depth() + c.future_depth()) continue;
      const Scalar v = endpoint_eval(job, n, c);
      error_row(csv, n, std::to_string(n), cylinder_label(c), "endpoint", v, reference);
      values[std::to_string(n)] = format_scalar(v);
    }
    per_cylinder[cylinder_label(c)] = {{"reference", format_scalar(reference)}, {"endpoint", values}};
  }
  out.write("endpoint.csv", csv.str());
  return {{"cylinders", per_cylinder}};
}

/// Gathers named checks for the audit report.
class AuditLog {
 public:
  void check(const std::string& name, int n, double value, double limit, bool pass) {
    csv_.row(name, n, format_double(value), format_double(limit), pass ? "pass" : "fail");
    if (!pass) failures_.push_back(name + " (n=" + std::to_string(n) + ")");
  }
  template <typename Scalar>
  void compare(const std::string& name, int n, const Scalar& fast, const Scalar& slow, double tolerance) {
    if constexpr (is_exact_v<Scalar>) {
      check(name, n, to_double(magnitude(Scalar(fast - slow))), 0.0, fast == slow);
    } else {
      const double err = std::abs(fast - slow) / std::max(1.0, std::abs(slow));
      check(name, n, err, tolerance, err <= tolerance);
    }
  }
  std::string csv() const { return csv_.str(); }
  const std::vector<std::string>& failures() const { return failures_; }

 private:
  Csv csv_{"check", "n", "value", "limit", "result"};
  std::vector<std::string> failures_;
};

template <typename Scalar>
ordered_json run_audit(const ExperimentConfig& cfg, Output& out, bool& passed) {
  const auto job = make_job<Scalar>(cfg);
  const double tol = cfg.audit.tolerance;
  AuditLog log;

  for (int n = 1; n <= cfg.audit.enumeration_n; ++n) {
    log.compare("enumeration.z", n, partition_sum(job, n).z.value(), brute::partition_sum(job, n), tol);
    Scalar total(0);
    for (Symbol s = 0; s < cfg.space.alphabet_size(); ++s) {
      if (!cfg.space.allows(job.past().last(), s)) continue;
      const FiberConstraint c{0, {s}};
      total += lambda_n_eval(job, n, c);
    }
    log.compare("probability.lambda_n", n, total, Scalar(1), tol);
    for (const auto& c : cfg.cylinders) {
      const std::string label = "[" + cylinder_label(c) + "]";
      log.compare("enumeration.lambda_n" + label, n, pushforward_eval(job, n, 0, c), brute::pushforward(job, n, 0, c),
                  tol);
      log.compare("enumeration.mu_n" + label, n, mu_n_eval(job, n, c), brute::mu_n(job, n, c), tol);
    }
  }

  const double vtol = cfg.thermo.variational_tolerance;
  for (const auto* g : {&job.reference(), &job.target()}) {
    const std::string which = g == &job.reference() ? "reference" : "target";
    const auto state = equilibrium_state<double>(*g, cfg.thermo);
    const MarkovChain eq = chain_of(state);
    const double eq_score = variational_score(eq, state.code, shift_reduce(*g), vtol);
    log.check("variational.equilibrium." + which, 0, std::abs(eq_score - state.pressure), vtol,
              std::abs(eq_score - state.pressure) <= vtol);
    std::mt19937_64 rng(cfg.seed);
    double worst = -INFINITY;
    for (int j = 0; j < cfg.audit.chains; ++j)
      worst = std::max(worst, variational_score(random_chain(state.code, rng), state.code, shift_reduce(*g), vtol) -
                                  state.pressure);
    if (cfg.audit.chains > 0) log.check("variational.random." + which, cfg.audit.chains, worst, vtol, worst <= vtol);

    const auto fiber = conditional_unstable_measure<double>(job.past(), *g, cfg.thermo, cfg.pinned);
    const GibbsReport gibbs = gibbs_ratio_report(fiber, *g, cfg.gibbs_n_max, cfg.gibbs_depth, cfg.thermo);
    double spread = 0.0;
    const auto& tail = gibbs.rows.back();
    for (const auto& row : gibbs.rows)
      if (row.n >= std::min(5, cfg.gibbs_n_max))
        spread = std::max({spread, std::abs(row.min_ratio - tail.min_ratio), std::abs(row.max_ratio - tail.max_ratio)});
    log.check("gibbs.spread." + which, cfg.gibbs_n_max, spread, tol, spread < tol && std::isfinite(gibbs.max_ratio));
  }

  out.write("audit.csv", log.csv());
  passed = log.failures().empty();
  return {{"passed", passed}, {"failures", log.failures()}};
}

template <typename Scalar>
ordered_json dispatch(const std::string& command, const ExperimentConfig& cfg, Output& out, bool& passed) {
  if (command == "pressure") return run_pressure<Scalar>(cfg, out);
  if (command == "gibbs") return run_gibbs<Scalar>(cfg, out);
  if (command == "fiber") return run_fiber<Scalar>(cfg, out);
  if (command == "transform") return run_transform<Scalar>(cfg, out);
  if (command == "growth") return run_growth<Scalar>(cfg, out);
  if (command == "endpoint") return run_endpoint<Scalar>(cfg, out);
  if (command == "audit") return run_audit<Scalar>(cfg, out, passed);
  throw ConfigError("unknown command '" + command + "'");
}

}  // namespace

void write_atomically(const std::filesystem::path& path, const std::string& contents) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream file(tmp, std::ios::binary | std::ios::trunc);
    if (!file) throw std::runtime_error("cannot write " + tmp.string());
    file << contents;
    if (!file.flush()) throw std::runtime_error("cannot write " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

int run(const std::string& command, const ExperimentConfig& cfg, const std::filesystem::path& out_dir) {
  std::vector<std::string> commands{command};
  if (command == "run") {
    if (!cfg.entries.contains("command")) throw ConfigError("'run' needs a 'command' key in the config");
    commands.clear();
    std::istringstream list(cfg.entries.at("command"));
    for (std::string c; std::getline(list, c, ',');) {
      c.erase(0, c.find_first_not_of(' '));
      c.erase(c.find_last_not_of(' ') + 1);
      commands.push_back(c);
    }
  }
  for (const auto& c : commands)
    if (std::find(subcommands().begin(), subcommands().end(), c) == subcommands().end())
      throw ConfigError("unknown command '" + c + "'");

  std::filesystem::create_directories(out_dir);
  Output out{out_dir};
  ordered_json summary;
  summary["config_hash"] = cfg.hash();
  summary["arith"] = cfg.exact ? "exact" : "float";
  summary["seed"] = cfg.seed;
  summary["tolerances"] = {{"perron", cfg.thermo.perron.tolerance},
                           {"variational", cfg.thermo.variational_tolerance},
                           {"audit", cfg.audit.tolerance}};
  ordered_json results = ordered_json::object();
  bool passed = true;
  for (const auto& c : commands)
    results[c] = cfg.exact ? dispatch<Rational>(c, cfg, out, passed) : dispatch<double>(c, cfg, out, passed);
  summary["results"] = results;
  summary["files"] = out.files;
  summary["status"] = passed ? "ok" : "audit_failed";
  write_atomically(out_dir / "summary.json", summary.dump(2) + "\n");
  return passed ? kOk : kAuditFailed;
}

}  // namespace alchemy::cli
