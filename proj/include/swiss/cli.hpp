// Batch front-end: analyze, synthesize, verify, simulate and bound commands
// over a SystemConfig. Every command returns an exit code and a JSON report;
// human-readable text goes to the supplied stream.

#ifndef SWISS_CLI_HPP_
#define SWISS_CLI_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "swiss/config.hpp"
#include "swiss/cycle_search.hpp"
#include "swiss/dynamics.hpp"
#include "swiss/graph.hpp"
#include "swiss/lyapunov.hpp"
#include "swiss/psi.hpp"
#include "swiss/schedule.hpp"
#include "swiss/sim.hpp"

namespace swiss {

enum ExitCode : int {
  kExitOk = 0,
  kExitInputError = 2,
  kExitNoCertificate = 3,
  kExitViolations = 4,
};

/// Raised for problems with the user's input; maps to exit code 2.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when no contractive walk is available; maps to exit code 3.
class NoCertificateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CommandOptions {
  std::optional<std::filesystem::path> out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<double> margin;
  std::optional<double> verification_tol;
  std::optional<double> bound_tol;
  std::optional<std::size_t> horizon;
  std::optional<std::size_t> t_max;
  std::optional<std::filesystem::path> signal_file;
  bool json = false;  // print the JSON report instead of text
};

struct CommandResult {
  int exit_code = kExitOk;
  Json report;
};

namespace detail {

inline std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

inline Json walk_json(const Walk& w) {
  Json out = Json::array();
  for (VertexId v : w.vertices()) out.push_back(v);
  return out;
}

inline Json state_json(const Eigen::VectorXd& x) {
  Json out = Json::array();
  for (Eigen::Index k = 0; k < x.size(); ++k) out.push_back(x[k]);
  return out;
}

inline void write_file(const std::filesystem::path& path, const std::string& text) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary);
  if (!os) throw InputError("cannot write " + path.string());
  os << text;
}

inline void emit(const CommandOptions& opts, std::ostream& out, const Json& report,
                 const std::string& text) {
  if (opts.json) {
    out << report.dump(2) << '\n';
  } else {
    out << text;
  }
}

}  // namespace detail

/// Command-line overrides folded into a copy of the config.
inline SystemConfig apply_overrides(SystemConfig cfg, const CommandOptions& opts) {
  if (opts.margin) cfg.tolerances.contractivity_margin = *opts.margin;
  if (opts.verification_tol) cfg.tolerances.verification = *opts.verification_tol;
  if (opts.bound_tol) cfg.tolerances.bound_check = *opts.bound_tol;
  if (opts.seed) {
    if (cfg.simulation) cfg.simulation->seed = *opts.seed;
    if (cfg.verification) cfg.verification->seed = *opts.seed;
  }
  if (opts.horizon && cfg.simulation) cfg.simulation->horizon = *opts.horizon;
  if (opts.t_max && cfg.bound) cfg.bound->t_max = *opts.t_max;
  return cfg;
}

// Signal files: '#' metadata lines, then a "t,sigma" table.

struct SignalFile {
  Walk base_walk;
  double xi_value = 0.0;
  std::vector<VertexId> sigma;
};

inline std::string format_signal_file(const PeriodicSignal& s, double xi_value,
                                      std::size_t horizon) {
  std::ostringstream os;
  os << "# base_walk: ";
  const auto v = s.base().vertices();
  for (std::size_t k = 0; k < v.size(); ++k) os << (k ? " " : "") << v[k];
  os << "\n# xi: " << detail::fmt(xi_value) << "\n# period: " << s.period()
     << "\nt,sigma\n";
  for (TimeStep t = 0; t < horizon; ++t) os << t << ',' << s.at(t) << '\n';
  return os.str();
}

inline SignalFile parse_signal_file(std::istream& in, const std::string& source) {
  SignalFile out{Walk({0}), 0.0, {}};
  bool have_walk = false, have_header = false;
  std::string line;
  std::size_t lineno = 0;
  auto fail = [&](const std::string& why) {
    return InputError(source + ":" + std::to_string(lineno) + ": " + why);
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream ls(line.substr(1));
      std::string key;
      ls >> key;
      if (key == "base_walk:") {
        std::vector<VertexId> ids;
        VertexId id;
        while (ls >> id) ids.push_back(id);
        if (ids.size() < 2) throw fail("base_walk needs at least two vertices");
        out.base_walk = Walk(std::move(ids));
        have_walk = true;
      } else if (key == "xi:") {
        if (!(ls >> out.xi_value)) throw fail("bad xi value");
      }
      continue;
    }
    if (!have_header) {
      if (line != "t,sigma") throw fail("expected header 't,sigma'");
      have_header = true;
      continue;
    }
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw fail("expected 't,sigma'");
    try {
      const std::size_t t = std::stoull(line.substr(0, comma));
      if (t != out.sigma.size()) throw fail("rows must start at 0 and be consecutive");
      out.sigma.push_back(std::stoi(line.substr(comma + 1)));
    } catch (const std::logic_error&) {
      throw fail("malformed row '" + line + "'");
    }
  }
  if (!have_walk) throw InputError(source + ": missing '# base_walk:' metadata");
  if (!out.base_walk.closed()) throw InputError(source + ": base walk is not closed");
  const PeriodicSignal s(out.base_walk);
  for (TimeStep t = 0; t < out.sigma.size(); ++t) {
    if (s.at(t) != out.sigma[t]) {
      throw InputError(source + ": row t = " + std::to_string(t) +
                       " disagrees with the base walk");
    }
  }
  return out;
}

inline SignalFile read_signal_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError(path.string() + ": cannot open signal file");
  return parse_signal_file(in, path.string());
}

struct ResolvedSignal {
  PeriodicSignal signal;
  std::string source;  // file | config | synthesized
};

/// Signal file beats the config's walk, which beats synthesis.
inline ResolvedSignal resolve_signal(const SystemConfig& cfg,
                                     const SwitchedDigraph& g,
                                     const CommandOptions& opts) {
  if (opts.signal_file) {
    SignalFile f = read_signal_file(*opts.signal_file);
    f.base_walk.validate(g);
    return {PeriodicSignal(f.base_walk), "file"};
  }
  if (cfg.simulation && cfg.simulation->walk) {
    Walk w(*cfg.simulation->walk);
    w.validate(g);
    if (!w.closed()) throw InputError("simulation.walk must be a closed walk");
    return {PeriodicSignal(std::move(w)), "config"};
  }
  auto w = find_contractive_circuit(g, cfg.tolerances.contractivity_margin);
  if (!w) throw NoCertificateError("no contractive cycle");
  return {PeriodicSignal(std::move(*w)), "synthesized"};
}

inline CommandResult cmd_analyze(const SystemConfig& cfg, const CommandOptions& opts,
                                 std::ostream& out) {
  const SwitchedDigraph g = build_graph(cfg);
  const double margin = cfg.tolerances.contractivity_margin;
  const auto found = find_negative_cycle(g, margin);
  const auto best = min_mean_cycle(g);

  CommandResult res;
  Json& r = res.report;
  r["command"] = "analyze";
  r["margin"] = margin;
  r["contractive"] = found.has_value();
  std::ostringstream text;
  if (found) {
    r["cycle"] = detail::walk_json(found->cycle);
    r["xi"] = found->xi_value;
    r["mean_weight"] = found->mean_weight;
    text << "contractive cycle: " << found->cycle.to_string() << '\n'
         << "xi: " << detail::fmt(found->xi_value) << '\n'
         << "mean weight: " << detail::fmt(found->mean_weight) << '\n';
  } else {
    r["cycle"] = nullptr;
    text << "no contractive cycle\n";
  }
  if (best) {
    r["min_mean"] = {{"cycle", detail::walk_json(best->cycle)},
                     {"xi", best->xi_value},
                     {"mean_weight", best->mean_weight}};
    text << "min-mean cycle: " << best->cycle.to_string()
         << " (mean " << detail::fmt(best->mean_weight) << ")\n";
  } else {
    r["min_mean"] = nullptr;
    text << "graph is acyclic\n";
  }
  res.exit_code = found ? kExitOk : kExitNoCertificate;
  r["exit_code"] = res.exit_code;
  if (opts.out_dir) detail::write_file(*opts.out_dir / "analyze.json", r.dump(2) + "\n");
  detail::emit(opts, out, r, text.str());
  return res;
}

inline CommandResult cmd_synthesize(const SystemConfig& cfg, const CommandOptions& opts,
                                    std::ostream& out) {
  const SwitchedDigraph g = build_graph(cfg);
  std::optional<std::size_t> horizon = opts.horizon;
  if (!horizon && cfg.simulation) horizon = cfg.simulation->horizon;
  if (!horizon) throw InputError("synthesize needs a horizon");
  if (*horizon == 0) throw InputError("horizon must be >= 1");

  auto w = find_contractive_circuit(g, cfg.tolerances.contractivity_margin);
  if (!w) throw NoCertificateError("no contractive cycle");
  const PeriodicSignal s(*w);
  const double xi_value = xi(g, *w);
  const std::string table = format_signal_file(s, xi_value, *horizon);

  CommandResult res;
  Json& r = res.report;
  r["command"] = "synthesize";
  r["base_walk"] = detail::walk_json(*w);
  r["xi"] = xi_value;
  r["period"] = s.period();
  r["horizon"] = *horizon;
  r["sigma"] = s.prefix(*horizon);
  r["exit_code"] = kExitOk;
  if (opts.out_dir) {
    detail::write_file(*opts.out_dir / "signal.csv", table);
    detail::write_file(*opts.out_dir / "synthesize.json", r.dump(2) + "\n");
  }
  detail::emit(opts, out, r, table);
  return res;
}

namespace detail {

inline Json verification_json(const VerificationReport& rep) {
  Json v = Json::array();
  for (const Violation& x : rep.violations) {
    v.push_back({{"sample", x.sample_index},
                 {"state", state_json(x.state)},
                 {"input", state_json(x.input)},
                 {"residual", x.residual}});
  }
  return {{"subsystem", rep.subsystem}, {"inequality", rep.inequality},
          {"samples", rep.samples},     {"seed", rep.seed},
          {"passed", rep.passed()},     {"violation_count", rep.violations.size()},
          {"max_residual", rep.max_residual}, {"violations", std::move(v)}};
}

struct VerificationRun {
  std::vector<VerificationReport> reports;
  bool passed() const {
    for (const auto& r : reports) {
      if (!r.passed()) return false;
    }
    return true;
  }
};

inline VerificationRun run_verification(const SystemConfig& cfg,
                                        const SwitchedDigraph& g,
                                        const DynamicsFamily& fam,
                                        const LyapunovProfile& prof) {
  const SampleSet samples = build_samples(*cfg.verification);
  const double tol = cfg.tolerances.verification;
  if (static_cast<std::size_t>(samples.states.front().size()) != fam.state_dim() ||
      static_cast<std::size_t>(samples.inputs.front().size()) != fam.input_dim()) {
    throw InputError("verification box dimensions do not match the dynamics");
  }
  VerificationRun run;
  for (const SubsystemNode& n : g.nodes()) {
    if (!fam.has(n.id)) {
      throw InputError("dynamics has no subsystem " + std::to_string(n.id));
    }
    const std::string name = std::to_string(n.id);
    const LyapunovFunction& v = prof.function(n.id);
    run.reports.push_back(verify_sandwich(v, prof.alpha_lower(), prof.alpha_upper(),
                                          samples, tol, name));
    run.reports.push_back(verify_decay(fam.map(n.id), v, n.lambda, prof.gamma(),
                                       samples, tol, name));
  }
  for (const TransitionEdge& e : g.edges()) {
    if (e.is_self_loop()) continue;
    run.reports.push_back(verify_mu(prof.function(e.from), prof.function(e.to), e.mu,
                                    samples, tol,
                                    std::to_string(e.from) + "->" + std::to_string(e.to)));
  }
  return run;
}

inline void require(bool present, const char* block, const char* command) {
  if (!present) {
    throw InputError(std::string(command) + " needs a '" + block + "' block");
  }
}

}  // namespace detail

inline CommandResult cmd_verify(const SystemConfig& cfg, const CommandOptions& opts,
                                std::ostream& out) {
  detail::require(cfg.dynamics.has_value(), "dynamics", "verify");
  detail::require(cfg.profile.has_value(), "profile", "verify");
  detail::require(cfg.verification.has_value(), "verification", "verify");
  const SwitchedDigraph g = build_graph(cfg);
  const DynamicsFamily fam = build_dynamics(*cfg.dynamics);
  const LyapunovProfile prof = build_profile(*cfg.profile, g);
  const detail::VerificationRun run = detail::run_verification(cfg, g, fam, prof);

  CommandResult res;
  res.exit_code = run.passed() ? kExitOk : kExitViolations;
  Json& r = res.report;
  r["command"] = "verify";
  r["tolerance"] = cfg.tolerances.verification;
  r["passed"] = run.passed();
  r["checks"] = Json::array();
  std::ostringstream text;
  for (const VerificationReport& rep : run.reports) {
    r["checks"].push_back(detail::verification_json(rep));
    text << rep.inequality << " [" << rep.subsystem << "]: "
         << (rep.passed() ? "ok" : "FAILED") << ", " << rep.violations.size() << " of "
         << rep.samples << " samples violate, max residual "
         << detail::fmt(rep.max_residual) << '\n';
    const std::size_t shown = std::min<std::size_t>(rep.violations.size(), 5);
    for (std::size_t k = 0; k < shown; ++k) {
      const Violation& v = rep.violations[k];
      text << "  x = (";
      for (Eigen::Index a = 0; a < v.state.size(); ++a) {
        text << (a ? ", " : "") << detail::fmt(v.state[a]);
      }
      text << "), residual " << detail::fmt(v.residual) << '\n';
    }
  }
  r["exit_code"] = res.exit_code;
  if (opts.out_dir) detail::write_file(*opts.out_dir / "verify.json", r.dump(2) + "\n");
  detail::emit(opts, out, r, text.str());
  return res;
}

inline CommandResult cmd_simulate(const SystemConfig& cfg, const CommandOptions& opts,
                                  std::ostream& out) {
  detail::require(cfg.dynamics.has_value(), "dynamics", "simulate");
  detail::require(cfg.simulation.has_value(), "simulation", "simulate");
  const SimulationSpec& sim = *cfg.simulation;
  if (sim.count == 0) throw InputError("simulation.count must be >= 1");
  if (sim.horizon == 0) throw InputError("simulation.horizon must be >= 1");
  const SwitchedDigraph g = build_graph(cfg);
  const DynamicsFamily fam = build_dynamics(*cfg.dynamics);
  const ResolvedSignal rs = resolve_signal(cfg, g, opts);

  const BatchSummary batch =
      batch_simulate(fam, rs.signal, detail::to_eigen(sim.x0_lo),
                     detail::to_eigen(sim.x0_hi), sim.count, build_input(sim.input),
                     sim.horizon, sim.seed);

  std::optional<LyapunovProfile> prof;
  if (cfg.profile) prof.emplace(build_profile(*cfg.profile, g));
  const PsiParams params(g, rs.signal);

  CommandResult res;
  Json& r = res.report;
  r["command"] = "simulate";
  r["family"] = fam.name();
  r["signal_source"] = rs.source;
  r["base_walk"] = detail::walk_json(rs.signal.base());
  r["xi"] = xi(g, rs.signal.base());
  r["seed"] = sim.seed;
  r["horizon"] = sim.horizon;
  r["count"] = sim.count;
  r["input"] = {{"kind", sim.input.kind},
                {"sampling", sim.input.kind == "uniform" ? "iid per step, stream seed + index"
                                                         : "deterministic"}};
  r["divergence_norm"] = kDivergenceNorm;
  r["trajectories"] = Json::array();

  std::size_t diverged = 0, bound_ok = 0;
  for (std::size_t k = 0; k < batch.entries.size(); ++k) {
    const BatchEntry& e = batch.entries[k];
    const Trajectory& tr = batch.trajectories[k];
    Json tj{{"index", e.index},          {"seed", e.seed},
            {"x0", detail::state_json(e.x0)}, {"steps", e.steps},
            {"sup_norm", e.sup_norm},    {"tail_norm", e.tail_norm},
            {"final_norm", tr.state_norms.back()}, {"diverged", e.diverged}};
    diverged += e.diverged ? 1 : 0;
    std::vector<double> bounds;
    if (prof) {
      const BoundCheck bc = check_against_bound(tr, *prof, params, cfg.tolerances.bound_check);
      bound_ok += bc.ok ? 1 : 0;
      tj["bound_check"] = {{"ok", bc.ok},
                           {"worst_ratio", bc.worst_ratio},
                           {"worst_t", bc.worst_t},
                           {"zero_bound_violation", bc.zero_bound_violation}};
      for (TimeStep t = 0; t < tr.states.size(); ++t) {
        bounds.push_back(certified_state_bound(t, tr.state_norms.front(),
                                               tr.input_sup[t], *prof, params));
      }
    }
    if (opts.out_dir) {
      std::ostringstream name;
      name << "traj_" << std::setw(3) << std::setfill('0') << e.index << ".csv";
      std::ostringstream table;
      write_trajectory_table(table, tr, prof ? &bounds : nullptr);
      detail::write_file(*opts.out_dir / "trajectories" / name.str(), table.str());
      tj["file"] = "trajectories/" + name.str();
    }
    r["trajectories"].push_back(std::move(tj));
  }
  r["diverged_count"] = diverged;
  if (prof) {
    r["bound_checks"] = {{"ok", bound_ok}, {"failed", sim.count - bound_ok}};
  } else {
    r["bound_checks"] = nullptr;
  }

  std::optional<bool> verified;
  if (prof && cfg.verification) {
    const detail::VerificationRun run = detail::run_verification(cfg, g, fam, *prof);
    verified = run.passed();
    Json checks = Json::array();
    for (const auto& rep : run.reports) {
      checks.push_back({{"subsystem", rep.subsystem},
                        {"inequality", rep.inequality},
                        {"violation_count", rep.violations.size()},
                        {"max_residual", rep.max_residual}});
    }
    r["verification"] = {{"passed", *verified}, {"checks", std::move(checks)}};
  } else {
    r["verification"] = nullptr;
  }
  r["exit_code"] = kExitOk;

  std::ostringstream text;
  text << "simulated " << sim.count << " trajectories of " << fam.name() << " for "
       << sim.horizon << " steps under " << rs.signal.base().to_string() << " ("
       << rs.source << ")\n"
       << "diverged: " << diverged << '\n';
  if (prof) text << "bound checks ok: " << bound_ok << " of " << sim.count << '\n';
  if (verified) {
    text << "profile verification: " << (*verified ? "passed" : "FAILED") << '\n';
  }
  if (opts.out_dir) {
    detail::write_file(*opts.out_dir / "summary.json", r.dump(2) + "\n");
  }
  detail::emit(opts, out, r, text.str());
  return res;
}

inline CommandResult cmd_bound(const SystemConfig& cfg, const CommandOptions& opts,
                               std::ostream& out) {
  detail::require(cfg.profile.has_value(), "profile", "bound");
  const SwitchedDigraph g = build_graph(cfg);
  const LyapunovProfile prof = build_profile(*cfg.profile, g);
  const BoundSpec spec = cfg.bound.value_or(BoundSpec{});
  const std::size_t t_max = opts.t_max.value_or(spec.t_max);
  const ResolvedSignal rs = resolve_signal(cfg, g, opts);
  const Walk& base = rs.signal.base();
  if (!is_contractive(g, base, cfg.tolerances.contractivity_margin)) {
    throw NoCertificateError("base walk " + base.to_string() +
                             " is not contractive, xi = " + detail::fmt(xi(g, base)));
  }
  const PsiParams params(g, rs.signal);
  const double cap = psi2_bound(base, g);

  std::ostringstream table;
  table << "# base_walk: " << base.to_string() << "\n# xi: " << detail::fmt(xi(g, base))
        << "\n# psi2_bound: " << detail::fmt(cap) << "\n# x0_norm: "
        << detail::fmt(spec.x0_norm) << "\n# v_sup: " << detail::fmt(spec.v_sup)
        << "\nt,psi1,psi2,certified_bound\n";
  std::size_t exceed = 0;
  Json rows = Json::array();
  for (TimeStep t = 0; t <= t_max; ++t) {
    const double p1 = psi1(t, params);
    const double p2 = psi2(t, params);
    const double b = certified_state_bound(t, spec.x0_norm, spec.v_sup, prof, params);
    if (p2 > cap) ++exceed;
    table << t << ',' << detail::fmt(p1) << ',' << detail::fmt(p2) << ','
          << detail::fmt(b) << '\n';
    rows.push_back({{"t", t}, {"psi1", p1}, {"psi2", p2}, {"certified_bound", b}});
  }

  CommandResult res;
  res.exit_code = exceed == 0 ? kExitOk : kExitViolations;
  Json& r = res.report;
  r["command"] = "bound";
  r["base_walk"] = detail::walk_json(base);
  r["signal_source"] = rs.source;
  r["xi"] = xi(g, base);
  r["psi2_bound"] = cap;
  r["x0_norm"] = spec.x0_norm;
  r["v_sup"] = spec.v_sup;
  r["t_max"] = t_max;
  r["psi2_within_bound"] = exceed == 0;
  r["rows"] = std::move(rows);
  r["exit_code"] = res.exit_code;
  if (opts.out_dir) {
    detail::write_file(*opts.out_dir / "bound.csv", table.str());
    detail::write_file(*opts.out_dir / "bound.json", r.dump(2) + "\n");
  }
  detail::emit(opts, out, r, table.str());
  return res;
}

/// Runs `command` with error-to-exit-code mapping; diagnostics go to `err`.
inline int run_command(const std::string& command, const SystemConfig& config,
                       const CommandOptions& opts, std::ostream& out, std::ostream& err,
                       Json* report = nullptr) {
  try {
    const SystemConfig cfg = apply_overrides(config, opts);
    CommandResult res;
    if (command == "analyze") {
      res = cmd_analyze(cfg, opts, out);
    } else if (command == "synthesize") {
      res = cmd_synthesize(cfg, opts, out);
    } else if (command == "verify") {
      res = cmd_verify(cfg, opts, out);
    } else if (command == "simulate") {
      res = cmd_simulate(cfg, opts, out);
    } else if (command == "bound") {
      res = cmd_bound(cfg, opts, out);
    } else {
      err << "error: unknown command '" << command << "'\n";
      return kExitInputError;
    }
    if (report) *report = std::move(res.report);
    return res.exit_code;
  } catch (const NoCertificateError& e) {
    err << "no certificate: " << e.what() << '\n';
    return kExitNoCertificate;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInputError;
  }
}

inline int run_command_file(const std::string& command, const std::string& config_path,
                            const CommandOptions& opts, std::ostream& out,
                            std::ostream& err, Json* report = nullptr) {
  SystemConfig cfg;
  try {
    cfg = load_config(config_path);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInputError;
  }
  return run_command(command, cfg, opts, out, err, report);
}

}  // namespace swiss

#endif  // SWISS_CLI_HPP_
