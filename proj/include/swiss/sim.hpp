// Discrete-time simulation of a switched system under a periodic signal,
// seeded batches, and pointwise checks against the certified state bound.

#ifndef SWISS_SIM_HPP_
#define SWISS_SIM_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <iomanip>
#include <limits>
#include <optional>
#include <ostream>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "swiss/dynamics.hpp"
#include "swiss/lyapunov.hpp"
#include "swiss/psi.hpp"
#include "swiss/schedule.hpp"

namespace swiss {

inline constexpr double kDivergenceNorm = 1e12;
inline constexpr double kDefaultBoundTolerance = 1e-8;

class SimulationError : public std::runtime_error {
 public:
  SimulationError(const std::string& what, TimeStep t)
      : std::runtime_error(what), time_(t) {}
  TimeStep time() const { return time_; }

 private:
  TimeStep time_;
};

/// Exogenous input v(t), evaluable at any t.
class InputSignal {
 public:
  enum class Kind { kZero, kConstant, kUniform, kExplicit };

  static InputSignal Zero(std::size_t dim) {
    InputSignal s(Kind::kZero);
    s.value_ = Input::Zero(static_cast<Eigen::Index>(dim));
    return s;
  }
  static InputSignal Constant(Input value) {
    InputSignal s(Kind::kConstant);
    s.value_ = std::move(value);
    return s;
  }
  /// Independent per-step draws, uniform on the open box (lo, hi).
  static InputSignal Uniform(Input lo, Input hi, std::uint64_t seed) {
    if (lo.size() != hi.size() || (hi.array() < lo.array()).any()) {
      throw std::invalid_argument("uniform input needs lo <= hi");
    }
    InputSignal s(Kind::kUniform);
    s.lo_ = std::move(lo);
    s.hi_ = std::move(hi);
    s.seed_ = seed;
    return s;
  }
  static InputSignal Explicit(std::vector<Input> samples) {
    if (samples.empty()) throw std::invalid_argument("explicit input is empty");
    InputSignal s(Kind::kExplicit);
    s.samples_ = std::move(samples);
    return s;
  }

  Kind kind() const { return kind_; }
  std::uint64_t seed() const { return seed_; }

  std::size_t dim() const {
    switch (kind_) {
      case Kind::kUniform: return static_cast<std::size_t>(lo_.size());
      case Kind::kExplicit: return static_cast<std::size_t>(samples_[0].size());
      default: return static_cast<std::size_t>(value_.size());
    }
  }

  Input at(TimeStep t) const {
    switch (kind_) {
      case Kind::kZero:
      case Kind::kConstant:
        return value_;
      case Kind::kExplicit:
        if (t >= samples_.size()) {
          throw std::out_of_range("explicit input has no sample at t = " +
                                  std::to_string(t));
        }
        return samples_[t];
      case Kind::kUniform: {
        std::seed_seq seq{static_cast<std::uint32_t>(seed_),
                          static_cast<std::uint32_t>(seed_ >> 32),
                          static_cast<std::uint32_t>(t),
                          static_cast<std::uint32_t>(std::uint64_t{t} >> 32)};
        std::mt19937_64 rng(seq);
        Input v(lo_.size());
        for (Eigen::Index k = 0; k < lo_.size(); ++k) {
          v[k] = lo_[k] + detail::unit_open(rng()) * (hi_[k] - lo_[k]);
        }
        return v;
      }
    }
    return value_;
  }

  /// |v|_t = max over u < t of |v(u)|; zero at t = 0.
  double sup_norm(TimeStep t) const {
    double s = 0.0;
    for (TimeStep u = 0; u < t; ++u) s = std::max(s, at(u).norm());
    return s;
  }

 private:
  explicit InputSignal(Kind k) : kind_(k) {}

  Kind kind_;
  Input value_;
  Input lo_, hi_;
  std::uint64_t seed_ = 0;
  std::vector<Input> samples_;
};

struct Trajectory {
  std::vector<State> states;         // x(0), ..., x(T)
  std::vector<Input> inputs;         // v(0), ..., v(T-1)
  std::vector<VertexId> active;      // sigma(0), ..., sigma(T-1)
  std::vector<double> state_norms;   // |x(t)|
  std::vector<double> input_sup;     // |v|_t, same length as states
  bool diverged = false;             // stopped early at kDivergenceNorm

  std::size_t steps() const { return inputs.size(); }
};

/// Steps x(t+1) = f_sigma(t)(x(t), v(t)) for t < horizon. A trajectory whose
/// norm exceeds `divergence_norm` is cut there and flagged.
inline Trajectory simulate(const DynamicsFamily& fam,
                           const PeriodicSignal& signal, const State& x0,
                           const InputSignal& input, TimeStep horizon,
                           double divergence_norm = kDivergenceNorm) {
  if (horizon == 0) throw std::invalid_argument("horizon must be >= 1");
  if (static_cast<std::size_t>(x0.size()) != fam.state_dim() ||
      input.dim() != fam.input_dim()) {
    throw std::invalid_argument("initial state or input has the wrong dimension");
  }
  for (VertexId v : signal.base().vertices()) {
    if (!fam.has(v)) {
      throw DynamicsError("signal visits subsystem " + std::to_string(v) +
                          " missing from family " + fam.name());
    }
  }
  Trajectory tr;
  tr.states.reserve(horizon + 1);
  tr.states.push_back(x0);
  tr.state_norms.push_back(x0.stableNorm());
  tr.input_sup.push_back(0.0);
  for (TimeStep t = 0; t < horizon; ++t) {
    const VertexId i = signal.at(t);
    Input v = input.at(t);
    State next;
    try {
      next = fam.step(i, tr.states.back(), v);
    } catch (const DynamicsError& e) {
      throw SimulationError(std::string(e.what()) + " at t = " +
                                std::to_string(t + 1),
                            t + 1);
    }
    const double vn = v.norm();
    tr.active.push_back(i);
    tr.inputs.push_back(std::move(v));
    tr.input_sup.push_back(std::max(tr.input_sup.back(), vn));
    tr.state_norms.push_back(next.stableNorm());
    tr.states.push_back(std::move(next));
    if (tr.state_norms.back() > divergence_norm) {
      tr.diverged = true;
      break;
    }
  }
  return tr;
}

/// How the batch draws inputs; `make` binds a per-trajectory seed.
struct InputSpec {
  InputSignal::Kind kind = InputSignal::Kind::kZero;
  Input value;             // constant
  Input lo, hi;            // uniform
  std::vector<Input> samples;  // explicit
  std::size_t dim = 1;     // zero

  InputSignal make(std::uint64_t seed) const {
    switch (kind) {
      case InputSignal::Kind::kZero: return InputSignal::Zero(dim);
      case InputSignal::Kind::kConstant: return InputSignal::Constant(value);
      case InputSignal::Kind::kUniform: return InputSignal::Uniform(lo, hi, seed);
      case InputSignal::Kind::kExplicit: return InputSignal::Explicit(samples);
    }
    return InputSignal::Zero(dim);
  }
};

struct BoundCheck {
  bool ok = true;
  double worst_ratio = 0.0;
  TimeStep worst_t = 0;
  bool zero_bound_violation = false;  // nonzero state under a zero bound
};

/// worst_ratio = max_t |x(t)| / certified_state_bound(t, |x(0)|, |v|_t).
inline BoundCheck check_against_bound(const Trajectory& traj,
                                      const LyapunovProfile& prof,
                                      const PsiParams& p,
                                      double tol = kDefaultBoundTolerance) {
  BoundCheck out;
  const double x0 = traj.state_norms.front();
  for (TimeStep t = 0; t < traj.states.size(); ++t) {
    const double bound =
        certified_state_bound(t, x0, traj.input_sup[t], prof, p);
    const double norm = traj.state_norms[t];
    double ratio = 0.0;
    if (bound > 0.0) {
      ratio = norm / bound;
    } else if (norm > 0.0) {
      ratio = std::numeric_limits<double>::infinity();
      out.zero_bound_violation = true;
    }
    if (t == 0 || ratio > out.worst_ratio) {
      out.worst_ratio = ratio;
      out.worst_t = t;
    }
  }
  out.ok = !out.zero_bound_violation && out.worst_ratio <= 1.0 + tol;
  return out;
}

struct BatchEntry {
  std::size_t index = 0;
  State x0;
  std::uint64_t seed = 0;
  double sup_norm = 0.0;
  double tail_norm = 0.0;  // max |x(t)| over the last ceil(T/4) steps
  bool diverged = false;
  TimeStep steps = 0;
};

struct BatchSummary {
  std::uint64_t seed = 0;
  TimeStep horizon = 0;
  std::vector<BatchEntry> entries;
  std::vector<Trajectory> trajectories;
};

/// `count` trajectories; trajectory k uses seed + k for its initial state
/// (uniform on [x0_lo, x0_hi]) and for its input stream.
inline BatchSummary batch_simulate(const DynamicsFamily& fam,
                                   const PeriodicSignal& signal,
                                   const State& x0_lo, const State& x0_hi,
                                   std::size_t count, const InputSpec& input,
                                   TimeStep horizon, std::uint64_t seed) {
  if (count == 0) throw std::invalid_argument("batch needs count >= 1");
  if (x0_lo.size() != x0_hi.size() || (x0_hi.array() < x0_lo.array()).any()) {
    throw std::invalid_argument("initial-state box needs lo <= hi");
  }
  BatchSummary out;
  out.seed = seed;
  out.horizon = horizon;
  const TimeStep tail = (horizon + 3) / 4;
  for (std::size_t k = 0; k < count; ++k) {
    const std::uint64_t s = seed + k;
    std::mt19937_64 rng(s);
    State x0(x0_lo.size());
    for (Eigen::Index a = 0; a < x0.size(); ++a) {
      x0[a] = x0_lo[a] + detail::unit_open(rng()) * (x0_hi[a] - x0_lo[a]);
    }
    Trajectory tr = simulate(fam, signal, x0, input.make(s), horizon);
    BatchEntry e;
    e.index = k;
    e.x0 = x0;
    e.seed = s;
    e.diverged = tr.diverged;
    e.steps = tr.steps();
    e.sup_norm = *std::max_element(tr.state_norms.begin(), tr.state_norms.end());
    const std::size_t first =
        tr.state_norms.size() > tail ? tr.state_norms.size() - tail : 0;
    e.tail_norm = *std::max_element(tr.state_norms.begin() + static_cast<long>(first),
                                    tr.state_norms.end());
    out.entries.push_back(std::move(e));
    out.trajectories.push_back(std::move(tr));
  }
  return out;
}

/// One row per time step: t, sigma, v..., x..., norm_x[, bound]. sigma and v
/// are blank on the final row.
inline void write_trajectory_table(std::ostream& os, const Trajectory& tr,
                                   const std::vector<double>* bounds = nullptr) {
  const auto d = tr.states.front().size();
  const auto m = tr.inputs.empty() ? 0 : tr.inputs.front().size();
  os << "t,sigma";
  for (Eigen::Index k = 0; k < m; ++k) os << ",v" << k + 1;
  for (Eigen::Index k = 0; k < d; ++k) os << ",x" << k + 1;
  os << ",norm_x";
  if (bounds) os << ",bound";
  os << '\n';
  os << std::setprecision(17);
  for (std::size_t t = 0; t < tr.states.size(); ++t) {
    os << t << ',';
    if (t < tr.active.size()) os << tr.active[t];
    for (Eigen::Index k = 0; k < m; ++k) {
      os << ',';
      if (t < tr.inputs.size()) os << tr.inputs[t][k];
    }
    for (Eigen::Index k = 0; k < d; ++k) os << ',' << tr.states[t][k];
    os << ',' << tr.state_norms[t];
    if (bounds) os << ',' << (*bounds)[t];
    os << '\n';
  }
}

}  // namespace swiss

#endif  // SWISS_SIM_HPP_
