#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "swiss/cli.hpp"

namespace {

void add_common(CLI::App* sub, std::string& config, std::string& out_dir,
                swiss::CommandOptions& opts) {
  sub->add_option("-c,--config", config, "system description (JSON)")->required();
  sub->add_option("-o,--out-dir", out_dir, "directory for report and table files");
  sub->add_option("--seed", opts.seed, "override every seed in the config");
  sub->add_option("--margin", opts.margin, "contractivity margin");
  sub->add_option("--verify-tol", opts.verification_tol, "verification tolerance");
  sub->add_option("--bound-tol", opts.bound_tol, "bound-check tolerance");
  sub->add_flag("--json", opts.json, "print the machine-readable report");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Periodic switching signals with ISS certificates for discrete-time switched systems"};
  app.require_subcommand(1);

  std::string config, out_dir, signal;
  swiss::CommandOptions opts;

  auto* analyze = app.add_subcommand("analyze", "search for a contractive cycle");
  add_common(analyze, config, out_dir, opts);

  auto* synthesize = app.add_subcommand("synthesize", "emit a periodic switching signal");
  add_common(synthesize, config, out_dir, opts);
  synthesize->add_option("--horizon", opts.horizon, "number of time steps");

  auto* verify = app.add_subcommand("verify", "sample the Lyapunov inequalities");
  add_common(verify, config, out_dir, opts);

  auto* simulate = app.add_subcommand("simulate", "simulate a seeded batch of trajectories");
  add_common(simulate, config, out_dir, opts);
  simulate->add_option("--horizon", opts.horizon, "number of time steps");
  simulate->add_option("--signal", signal, "signal file written by synthesize");

  auto* bound = app.add_subcommand("bound", "tabulate psi1, psi2 and the state bound");
  add_common(bound, config, out_dir, opts);
  bound->add_option("--t-max", opts.t_max, "last tabulated time step");
  bound->add_option("--signal", signal, "signal file written by synthesize");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : swiss::kExitInputError;
  }

  if (!out_dir.empty()) opts.out_dir = out_dir;
  if (!signal.empty()) opts.signal_file = signal;
  const std::string command = app.get_subcommands().front()->get_name();
  return swiss::run_command_file(command, config, opts, std::cout, std::cerr);
}
