// Command-line front end: clj <subcommand> --config <path> [--out <dir>] [--tol <x>]
//
// Exit codes: 0 success, 1 assumption/criterion failure, 2 input error,
// 3 solver non-convergence.

#include "clj/clj.hpp"

#include "CLI11.hpp"

#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <string>

namespace {

using Command = std::function<int(const clj::ExperimentSpec &,
                                  const std::string &, std::ostream &)>;

int run(const Command &cmd, const std::string &config, const std::string &out,
        std::optional<double> tol) {
  try {
    clj::ExperimentSpec spec = clj::load_spec(config);
    if (tol) {
      if (!(*tol > 0.0)) throw clj::InputError("--tol must be positive");
      spec.tol = *tol;
    }
    return cmd(spec, out, std::cout);
  } catch (const clj::InputError &e) {
    std::cerr << "input error: " << e.what() << '\n';
    return clj::kExitInput;
  } catch (const std::invalid_argument &e) {
    std::cerr << "input error: " << e.what() << '\n';
    return clj::kExitInput;
  } catch (const clj::ConvergenceError &e) {
    std::cerr << "solver did not converge: " << e.what() << '\n';
    return clj::kExitNoConverge;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << '\n';
    return clj::kExitFailure;
  }
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Confined Lennard-Jones chain with a point defect"};
  app.require_subcommand(1);

  const std::map<std::string, std::pair<std::string, Command>> commands = {
      {"validate", {"certify the potential assumptions", clj::cmd_validate}},
      {"continuum", {"solve the continuum limit problem", clj::cmd_continuum}},
      {"discrete", {"minimise the discrete chain energy", clj::cmd_discrete}},
      {"cell", {"solve the defect cell problem", clj::cmd_cell}},
      {"gamma-scan", {"sweep N and compare energy expansions", clj::cmd_gamma_scan}},
      {"decay", {"defect profile decay diagnostics", clj::cmd_decay}},
  };

  std::string config, out = ".";
  std::optional<double> tol;
  int status = clj::kExitOk;
  for (const auto &[name, entry] : commands) {
    CLI::App *sub = app.add_subcommand(name, entry.first);
    sub->add_option("--config", config, "JSON experiment config")->required();
    sub->add_option("--out", out, "output directory")->capture_default_str();
    sub->add_option("--tol", tol, "solver tolerance override");
    const Command cmd = entry.second;
    sub->callback([&, cmd] { status = run(cmd, config, out, tol); });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? clj::kExitOk : clj::kExitInput;
  }
  return status;
}
