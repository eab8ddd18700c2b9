#ifndef ALCHEMY_TOOLS_EXPERIMENT_HPP
#define ALCHEMY_TOOLS_EXPERIMENT_HPP

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "alchemy/potential.hpp"
#include "alchemy/shift.hpp"
#include "alchemy/thermo.hpp"
#include "alchemy/transform.hpp"

namespace alchemy::cli {

/// Malformed or inconsistent experiment description.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum ExitCode : int {
  kOk = 0,
  kAuditFailed = 1,
  kConfigError = 2,
  kNotPrimitive = 3,
  kNonConvergence = 4,
  kInexact = 5,
};

inline const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names{"pressure", "gibbs", "fiber", "transform", "growth", "endpoint", "audit"};
  return names;
}

/// `key = value` lines; `#` starts a comment. Later keys override earlier ones.
using KeyValues = std::map<std::string, std::string>;
KeyValues parse_key_values(std::string_view text);

struct AuditSettings {
  int enumeration_n = 8;
  int chains = 200;
  double tolerance = 1e-10;
};

struct ExperimentConfig {
  KeyValues entries;
  std::filesystem::path base_dir;

  ShiftSpace space = full_shift(2);
  std::optional<LocallyConstantPotential> potential;
  std::optional<LocallyConstantPotential> reference;
  std::optional<LocallyConstantPotential> target;
  std::optional<PastWord> past;
  Word pinned;
  std::vector<TwoSidedCylinder> cylinders;
  std::vector<int> ns;
  Normalization normalization = Normalization::raw;
  bool exact = false;
  ThermoOptions thermo;
  int gibbs_depth = 0;
  int gibbs_n_max = 15;
  std::uint64_t seed = 0;
  AuditSettings audit;

  /// FNV-1a 64 of the canonical key=value listing, as 16 hex digits.
  std::string hash() const;
};

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> arith;
};

ExperimentConfig build_config(KeyValues entries, const std::filesystem::path& base_dir, const Overrides& overrides = {});
ExperimentConfig load_config(const std::filesystem::path& path, const Overrides& overrides = {});

/// Digits ("0110") or, for larger alphabets, comma-separated symbols ("10,3,0").
Word parse_word(std::string_view text, int alphabet_size);
/// "a..b", "a..b/step" or a comma-separated list; must be increasing.
std::vector<int> parse_n_range(std::string_view text);
/// "first:word" entries separated by ';'.
std::vector<TwoSidedCylinder> parse_cylinders(const ShiftSpace& space, std::string_view text);
/// "k 2 / metric_base 0.5 / matrix" followed by k rows.
ShiftSpace parse_shift_text(std::string_view text);
/// "window m r" followed by one "word value" pair per admissible window.
LocallyConstantPotential parse_potential_text(const ShiftSpace& space, std::string_view text);
/// Preset or table description; see the README for the grammar.
LocallyConstantPotential parse_potential_spec(const ShiftSpace& space, std::string_view spec,
                                              const std::filesystem::path& base_dir, std::mt19937_64& rng);
/// A potential value: a decimal, or [-]log(q) for a rational q > 0 which
/// also fixes the exact weight.
PotentialEntry parse_entry(std::string_view text);

/// Runs one subcommand, writing CSV files and summary.json into out_dir.
int run(const std::string& command, const ExperimentConfig& config, const std::filesystem::path& out_dir);

/// Full command line handling with exit codes.
int main_entry(int argc, char** argv);

/// Writes via a temporary file and rename.
void write_atomically(const std::filesystem::path& path, const std::string& contents);

}  // namespace alchemy::cli

#endif  // ALCHEMY_TOOLS_EXPERIMENT_HPP
