// JSON system description: graph, optional dynamics, Lyapunov profile,
// verification sampling, simulation and bound blocks.

#ifndef SWISS_CONFIG_HPP_
#define SWISS_CONFIG_HPP_

#include <cstddef>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"
#include "swiss/dynamics.hpp"
#include "swiss/graph.hpp"
#include "swiss/lyapunov.hpp"
#include "swiss/sim.hpp"

namespace swiss {

using Json = nlohmann::ordered_json;
using Matrix = std::vector<std::vector<double>>;

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SubsystemDynamics {
  VertexId id = 0;
  double a = 0.0;  // scalar_linear
  Matrix A, B;     // affine

  friend bool operator==(const SubsystemDynamics&, const SubsystemDynamics&) = default;
};

struct DynamicsSpec {
  std::string family;  // scalar_linear | affine | nonlinear_pair
  std::vector<SubsystemDynamics> subsystems;

  friend bool operator==(const DynamicsSpec&, const DynamicsSpec&) = default;
};

struct PowerLawSpec {
  double c = 1.0;
  double p = 1.0;

  friend bool operator==(const PowerLawSpec&, const PowerLawSpec&) = default;
};

struct LyapunovSpec {
  VertexId subsystem = 0;
  std::string form;  // quadratic | absolute
  Matrix matrix;     // quadratic
  double scale = 1.0;  // absolute

  friend bool operator==(const LyapunovSpec&, const LyapunovSpec&) = default;
};

struct ProfileSpec {
  std::vector<LyapunovSpec> functions;
  PowerLawSpec alpha_lower, alpha_upper;
  std::vector<PowerLawSpec> gamma;  // pointwise max

  friend bool operator==(const ProfileSpec&, const ProfileSpec&) = default;
};

struct InputConfig {
  std::string kind = "zero";  // zero | constant | uniform | explicit
  std::vector<double> value, lo, hi;
  std::vector<std::vector<double>> samples;
  std::size_t dim = 1;

  friend bool operator==(const InputConfig&, const InputConfig&) = default;
};

struct SimulationSpec {
  std::vector<double> x0_lo, x0_hi;
  InputConfig input;
  std::size_t horizon = 100;
  std::size_t count = 1;
  std::uint64_t seed = 0;
  std::optional<std::vector<VertexId>> walk;

  friend bool operator==(const SimulationSpec&, const SimulationSpec&) = default;
};

struct VerificationSpec {
  std::vector<double> state_lo, state_hi, input_lo, input_hi;
  std::size_t grid_per_axis = 10;
  std::size_t random_points = 1000;
  std::uint64_t seed = 0;
  std::vector<std::vector<double>> extra_states;  // checked with zero input

  friend bool operator==(const VerificationSpec&, const VerificationSpec&) = default;
};

struct BoundSpec {
  double x0_norm = 1.0;
  double v_sup = 0.0;
  std::size_t t_max = 100;

  friend bool operator==(const BoundSpec&, const BoundSpec&) = default;
};

struct Tolerances {
  double contractivity_margin = kDefaultContractivityMargin;
  double verification = kDefaultVerificationTolerance;
  double bound_check = kDefaultBoundTolerance;

  friend bool operator==(const Tolerances&, const Tolerances&) = default;
};

struct SystemConfig {
  std::vector<SubsystemNode> nodes;
  std::vector<TransitionEdge> edges;
  std::optional<DynamicsSpec> dynamics;
  std::optional<ProfileSpec> profile;
  std::optional<VerificationSpec> verification;
  std::optional<SimulationSpec> simulation;
  std::optional<BoundSpec> bound;
  Tolerances tolerances;

  friend bool operator==(const SystemConfig&, const SystemConfig&) = default;
};

namespace detail {

template <typename T>
T get(const Json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) {
    throw ConfigError(where + ": missing field '" + key + "'");
  }
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(where + "." + key + ": " + e.what());
  }
}

template <typename T>
T get_or(const Json& j, const char* key, T fallback, const std::string& where) {
  if (!j.contains(key)) return fallback;
  return get<T>(j, key, where);
}

inline Eigen::MatrixXd to_eigen(const Matrix& m, const std::string& where) {
  if (m.empty()) throw ConfigError(where + ": empty matrix");
  Eigen::MatrixXd out(static_cast<Eigen::Index>(m.size()),
                      static_cast<Eigen::Index>(m.front().size()));
  for (std::size_t r = 0; r < m.size(); ++r) {
    if (m[r].size() != m.front().size()) {
      throw ConfigError(where + ": ragged matrix");
    }
    for (std::size_t c = 0; c < m[r].size(); ++c) {
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = m[r][c];
    }
  }
  return out;
}

inline Eigen::VectorXd to_eigen(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(),
                                           static_cast<Eigen::Index>(v.size()));
}

inline PowerLawSpec power_law_from(const Json& j, const std::string& where) {
  return {get<double>(j, "c", where), get<double>(j, "p", where)};
}

inline Json power_law_to(const PowerLawSpec& p) { return {{"c", p.c}, {"p", p.p}}; }

}  // namespace detail

inline SystemConfig config_from_json(const Json& j) {
  if (!j.is_object()) throw ConfigError("config: top level must be an object");
  SystemConfig cfg;

  const Json nodes = detail::get<Json>(j, "nodes", "config");
  if (!nodes.is_array()) throw ConfigError("config.nodes: expected an array");
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    const std::string where = "nodes[" + std::to_string(k) + "]";
    SubsystemNode n;
    n.id = detail::get<VertexId>(nodes[k], "id", where);
    n.lambda = detail::get<double>(nodes[k], "lambda", where);
    const std::string cls = detail::get_or<std::string>(
        nodes[k], "class", n.lambda < 1.0 ? "stable" : "unstable", where);
    if (cls != "stable" && cls != "unstable") {
      throw ConfigError(where + ".class: expected 'stable' or 'unstable'");
    }
    n.cls = cls == "stable" ? StabilityClass::kStable : StabilityClass::kUnstable;
    cfg.nodes.push_back(n);
  }

  const Json edges = detail::get<Json>(j, "edges", "config");
  if (!edges.is_array()) throw ConfigError("config.edges: expected an array");
  for (std::size_t k = 0; k < edges.size(); ++k) {
    const std::string where = "edges[" + std::to_string(k) + "]";
    cfg.edges.push_back({detail::get<VertexId>(edges[k], "from", where),
                         detail::get<VertexId>(edges[k], "to", where),
                         detail::get<double>(edges[k], "mu", where)});
  }

  if (j.contains("dynamics")) {
    const Json& d = j["dynamics"];
    DynamicsSpec spec;
    spec.family = detail::get<std::string>(d, "family", "dynamics");
    for (const Json& s : detail::get_or<Json>(d, "subsystems", Json::array(), "dynamics")) {
      SubsystemDynamics sd;
      sd.id = detail::get<VertexId>(s, "id", "dynamics.subsystems");
      sd.a = detail::get_or<double>(s, "a", 0.0, "dynamics.subsystems");
      sd.A = detail::get_or<Matrix>(s, "A", {}, "dynamics.subsystems");
      sd.B = detail::get_or<Matrix>(s, "B", {}, "dynamics.subsystems");
      spec.subsystems.push_back(std::move(sd));
    }
    cfg.dynamics = std::move(spec);
  }

  if (j.contains("profile")) {
    const Json& p = j["profile"];
    ProfileSpec spec;
    for (const Json& f : detail::get<Json>(p, "lyapunov", "profile")) {
      LyapunovSpec ls;
      ls.subsystem = detail::get<VertexId>(f, "subsystem", "profile.lyapunov");
      ls.form = detail::get<std::string>(f, "form", "profile.lyapunov");
      ls.matrix = detail::get_or<Matrix>(f, "matrix", {}, "profile.lyapunov");
      ls.scale = detail::get_or<double>(f, "scale", 1.0, "profile.lyapunov");
      spec.functions.push_back(std::move(ls));
    }
    spec.alpha_lower = detail::power_law_from(
        detail::get<Json>(p, "alpha_lower", "profile"), "profile.alpha_lower");
    spec.alpha_upper = detail::power_law_from(
        detail::get<Json>(p, "alpha_upper", "profile"), "profile.alpha_upper");
    const Json gamma = detail::get<Json>(p, "gamma", "profile");
    if (gamma.is_array()) {
      for (const Json& g : gamma) spec.gamma.push_back(detail::power_law_from(g, "profile.gamma"));
    } else {
      spec.gamma.push_back(detail::power_law_from(gamma, "profile.gamma"));
    }
    cfg.profile = std::move(spec);
  }

  if (j.contains("verification")) {
    const Json& v = j["verification"];
    VerificationSpec spec;
    spec.state_lo = detail::get<std::vector<double>>(v, "state_lo", "verification");
    spec.state_hi = detail::get<std::vector<double>>(v, "state_hi", "verification");
    spec.input_lo = detail::get<std::vector<double>>(v, "input_lo", "verification");
    spec.input_hi = detail::get<std::vector<double>>(v, "input_hi", "verification");
    spec.grid_per_axis = detail::get_or<std::size_t>(v, "grid_per_axis", 10, "verification");
    spec.random_points = detail::get_or<std::size_t>(v, "random_points", 1000, "verification");
    spec.seed = detail::get_or<std::uint64_t>(v, "seed", 0, "verification");
    spec.extra_states = detail::get_or<std::vector<std::vector<double>>>(
        v, "extra_states", {}, "verification");
    cfg.verification = std::move(spec);
  }

  if (j.contains("simulation")) {
    const Json& s = j["simulation"];
    SimulationSpec spec;
    spec.x0_lo = detail::get<std::vector<double>>(s, "x0_lo", "simulation");
    spec.x0_hi = detail::get<std::vector<double>>(s, "x0_hi", "simulation");
    spec.horizon = detail::get<std::size_t>(s, "horizon", "simulation");
    spec.count = detail::get<std::size_t>(s, "count", "simulation");
    spec.seed = detail::get_or<std::uint64_t>(s, "seed", 0, "simulation");
    if (s.contains("walk")) {
      spec.walk = detail::get<std::vector<VertexId>>(s, "walk", "simulation");
    }
    const Json in = detail::get_or<Json>(s, "input", Json{{"kind", "zero"}}, "simulation");
    InputConfig& ic = spec.input;
    ic.kind = detail::get<std::string>(in, "kind", "simulation.input");
    ic.value = detail::get_or<std::vector<double>>(in, "value", {}, "simulation.input");
    ic.lo = detail::get_or<std::vector<double>>(in, "lo", {}, "simulation.input");
    ic.hi = detail::get_or<std::vector<double>>(in, "hi", {}, "simulation.input");
    ic.samples = detail::get_or<std::vector<std::vector<double>>>(in, "samples", {},
                                                                 "simulation.input");
    ic.dim = detail::get_or<std::size_t>(in, "dim", 1, "simulation.input");
    if (ic.kind != "zero" && ic.kind != "constant" && ic.kind != "uniform" &&
        ic.kind != "explicit") {
      throw ConfigError("simulation.input.kind: unknown kind '" + ic.kind + "'");
    }
    cfg.simulation = std::move(spec);
  }

  if (j.contains("bound")) {
    const Json& b = j["bound"];
    BoundSpec spec;
    spec.x0_norm = detail::get_or<double>(b, "x0_norm", 1.0, "bound");
    spec.v_sup = detail::get_or<double>(b, "v_sup", 0.0, "bound");
    spec.t_max = detail::get_or<std::size_t>(b, "t_max", 100, "bound");
    cfg.bound = spec;
  }

  if (j.contains("tolerances")) {
    const Json& t = j["tolerances"];
    Tolerances& tol = cfg.tolerances;
    tol.contractivity_margin = detail::get_or<double>(
        t, "contractivity_margin", tol.contractivity_margin, "tolerances");
    tol.verification =
        detail::get_or<double>(t, "verification", tol.verification, "tolerances");
    tol.bound_check =
        detail::get_or<double>(t, "bound_check", tol.bound_check, "tolerances");
  }
  return cfg;
}

inline Json config_to_json(const SystemConfig& cfg) {
  Json j;
  j["nodes"] = Json::array();
  for (const SubsystemNode& n : cfg.nodes) {
    j["nodes"].push_back({{"id", n.id}, {"lambda", n.lambda}, {"class", to_string(n.cls)}});
  }
  j["edges"] = Json::array();
  for (const TransitionEdge& e : cfg.edges) {
    j["edges"].push_back({{"from", e.from}, {"to", e.to}, {"mu", e.mu}});
  }
  if (cfg.dynamics) {
    Json d{{"family", cfg.dynamics->family}, {"subsystems", Json::array()}};
    for (const SubsystemDynamics& s : cfg.dynamics->subsystems) {
      Json sj{{"id", s.id}};
      if (s.a != 0.0) sj["a"] = s.a;
      if (!s.A.empty()) sj["A"] = s.A;
      if (!s.B.empty()) sj["B"] = s.B;
      d["subsystems"].push_back(std::move(sj));
    }
    j["dynamics"] = std::move(d);
  }
  if (cfg.profile) {
    Json p{{"lyapunov", Json::array()}};
    for (const LyapunovSpec& f : cfg.profile->functions) {
      Json fj{{"subsystem", f.subsystem}, {"form", f.form}};
      if (!f.matrix.empty()) fj["matrix"] = f.matrix;
      fj["scale"] = f.scale;
      p["lyapunov"].push_back(std::move(fj));
    }
    p["alpha_lower"] = detail::power_law_to(cfg.profile->alpha_lower);
    p["alpha_upper"] = detail::power_law_to(cfg.profile->alpha_upper);
    p["gamma"] = Json::array();
    for (const PowerLawSpec& g : cfg.profile->gamma) {
      p["gamma"].push_back(detail::power_law_to(g));
    }
    j["profile"] = std::move(p);
  }
  if (cfg.verification) {
    const VerificationSpec& v = *cfg.verification;
    j["verification"] = {{"state_lo", v.state_lo},       {"state_hi", v.state_hi},
                         {"input_lo", v.input_lo},       {"input_hi", v.input_hi},
                         {"grid_per_axis", v.grid_per_axis},
                         {"random_points", v.random_points},
                         {"seed", v.seed},               {"extra_states", v.extra_states}};
  }
  if (cfg.simulation) {
    const SimulationSpec& s = *cfg.simulation;
    Json in{{"kind", s.input.kind}};
    if (!s.input.value.empty()) in["value"] = s.input.value;
    if (!s.input.lo.empty()) in["lo"] = s.input.lo;
    if (!s.input.hi.empty()) in["hi"] = s.input.hi;
    if (!s.input.samples.empty()) in["samples"] = s.input.samples;
    in["dim"] = s.input.dim;
    Json sj{{"x0_lo", s.x0_lo}, {"x0_hi", s.x0_hi}, {"input", in},
            {"horizon", s.horizon}, {"count", s.count}, {"seed", s.seed}};
    if (s.walk) sj["walk"] = *s.walk;
    j["simulation"] = std::move(sj);
  }
  if (cfg.bound) {
    j["bound"] = {{"x0_norm", cfg.bound->x0_norm},
                  {"v_sup", cfg.bound->v_sup},
                  {"t_max", cfg.bound->t_max}};
  }
  j["tolerances"] = {{"contractivity_margin", cfg.tolerances.contractivity_margin},
                     {"verification", cfg.tolerances.verification},
                     {"bound_check", cfg.tolerances.bound_check}};
  return j;
}

/// Parses JSON text. Syntax errors are reported as "<source>:line:column: ...".
inline SystemConfig parse_config(const std::string& text,
                                 const std::string& source = "<config>") {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    std::size_t line = 1, column = 1;
    const std::size_t stop = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t k = 0; k < stop; ++k) {
      if (text[k] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw ConfigError(source + ":" + std::to_string(line) + ":" +
                      std::to_string(column) + ": " + e.what());
  }
  try {
    return config_from_json(j);
  } catch (const ConfigError& e) {
    throw ConfigError(source + ": " + e.what());
  }
}

inline SystemConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open config");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path);
}

inline std::string serialize_config(const SystemConfig& cfg) {
  return config_to_json(cfg).dump(2) + "\n";
}

// Builders from the plain config records to validated domain objects.

inline SwitchedDigraph build_graph(const SystemConfig& cfg) {
  return SwitchedDigraph(cfg.nodes, cfg.edges);
}

inline DynamicsFamily build_dynamics(const DynamicsSpec& spec) {
  if (spec.family == "nonlinear_pair") return DynamicsFamily::NonlinearPair();
  if (spec.family == "scalar_linear") {
    std::map<VertexId, double> gains;
    for (const auto& s : spec.subsystems) gains[s.id] = s.a;
    return DynamicsFamily::ScalarLinear(gains);
  }
  if (spec.family == "affine") {
    std::map<VertexId, std::pair<Eigen::MatrixXd, Eigen::MatrixXd>> ab;
    for (const auto& s : spec.subsystems) {
      const std::string where = "dynamics subsystem " + std::to_string(s.id);
      ab[s.id] = {detail::to_eigen(s.A, where + " A"), detail::to_eigen(s.B, where + " B")};
    }
    return DynamicsFamily::Affine(ab);
  }
  throw ConfigError("dynamics.family: unknown family '" + spec.family + "'");
}

inline LyapunovProfile build_profile(const ProfileSpec& spec,
                                     const SwitchedDigraph& g) {
  std::map<VertexId, LyapunovFunction> fns;
  for (const LyapunovSpec& f : spec.functions) {
    if (f.form == "quadratic") {
      fns.emplace(f.subsystem, LyapunovFunction::Quadratic(detail::to_eigen(
                                   f.matrix, "profile.lyapunov matrix")));
    } else if (f.form == "absolute") {
      fns.emplace(f.subsystem, LyapunovFunction::Absolute(f.scale));
    } else {
      throw ConfigError("profile.lyapunov.form: unknown form '" + f.form + "'");
    }
  }
  std::vector<PowerLaw> gamma;
  for (const PowerLawSpec& p : spec.gamma) gamma.emplace_back(p.c, p.p);
  return LyapunovProfile(g, std::move(fns),
                         PowerLaw(spec.alpha_lower.c, spec.alpha_lower.p),
                         PowerLaw(spec.alpha_upper.c, spec.alpha_upper.p),
                         GainFunction(std::move(gamma)));
}

inline SampleSet build_samples(const VerificationSpec& spec) {
  SampleBox box{detail::to_eigen(spec.state_lo), detail::to_eigen(spec.state_hi),
                detail::to_eigen(spec.input_lo), detail::to_eigen(spec.input_hi)};
  SampleSet set = make_samples(box, spec.grid_per_axis, spec.random_points, spec.seed);
  for (const auto& x : spec.extra_states) {
    if (x.size() != spec.state_lo.size()) {
      throw ConfigError("verification.extra_states: wrong dimension");
    }
    set.add(detail::to_eigen(x), Input::Zero(static_cast<Eigen::Index>(spec.input_lo.size())));
  }
  return set;
}

inline InputSpec build_input(const InputConfig& c) {
  InputSpec s;
  s.dim = c.dim;
  if (c.kind == "zero") {
    s.kind = InputSignal::Kind::kZero;
  } else if (c.kind == "constant") {
    s.kind = InputSignal::Kind::kConstant;
    s.value = detail::to_eigen(c.value);
  } else if (c.kind == "uniform") {
    s.kind = InputSignal::Kind::kUniform;
    s.lo = detail::to_eigen(c.lo);
    s.hi = detail::to_eigen(c.hi);
  } else if (c.kind == "explicit") {
    s.kind = InputSignal::Kind::kExplicit;
    for (const auto& v : c.samples) s.samples.push_back(detail::to_eigen(v));
  } else {
    throw ConfigError("simulation.input.kind: unknown kind '" + c.kind + "'");
  }
  return s;
}

}  // namespace swiss

#endif  // SWISS_CONFIG_HPP_
