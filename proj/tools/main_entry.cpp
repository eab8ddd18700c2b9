#include <iostream>

#include "CLI11.hpp"
#include "experiment.hpp"

namespace alchemy::cli {

int main_entry(int argc, char** argv) {
  CLI::App app{"Thermodynamic formalism experiments on subshifts of finite type"};
  app.require_subcommand(1);
  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  std::optional<std::string> arith;
  app.add_option("--config", config_path, "Experiment config file")->required();
  app.add_option("--out", out_dir, "Directory for CSV files and summary.json");
  app.add_option("--seed", seed, "Seed for randomized potentials and invariant batteries");
  app.add_option("--arith", arith, "Arithmetic mode")->check(CLI::IsMember({"exact", "float"}));

  std::vector<std::string> names = subcommands();
  names.push_back("run");
  for (const auto& name : names)
    app.add_subcommand(name, name == "run" ? "Run the commands listed under 'command' in the config" : "")
        ->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  try {
    const ExperimentConfig cfg = load_config(config_path, Overrides{seed, arith});
    return run(command, cfg, out_dir);
  } catch (const NotPrimitive& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNotPrimitive;
  } catch (const NonConvergence& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNonConvergence;
  } catch (const InexactArithmetic& e) {
    std::cerr << "error: " << e.what() << "; rerun with --arith float\n";
    return kInexact;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kAuditFailed;
  }
}

}  // namespace alchemy::cli
