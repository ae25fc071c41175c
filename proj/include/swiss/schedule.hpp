// Periodic switching signals generated by repeating a closed walk, their
// switching instants and counting functions, and an average-dwell-time
// comparison check.

#ifndef SWISS_SCHEDULE_HPP_
#define SWISS_SCHEDULE_HPP_

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "swiss/graph.hpp"

namespace swiss {

using TimeStep = std::size_t;

/// sigma(t) = base[t mod |base|]; the walk's final vertex is not repeated.
class PeriodicSignal {
 public:
  explicit PeriodicSignal(Walk base) : base_(std::move(base)) {
    if (!base_.closed()) {
      throw std::invalid_argument("periodic signal needs a closed walk, got " +
                                  base_.to_string());
    }
  }

  const Walk& base() const { return base_; }
  std::size_t period() const { return base_.length(); }
  VertexId at(TimeStep t) const { return base_[t % period()]; }
  VertexId operator()(TimeStep t) const { return at(t); }

  /// True iff sigma jumps at t (t >= 1 and sigma(t) != sigma(t-1)).
  bool switches_at(TimeStep t) const { return t > 0 && at(t) != at(t - 1); }

  /// sigma(0), ..., sigma(count - 1).
  std::vector<VertexId> prefix(std::size_t count) const {
    std::vector<VertexId> out(count);
    for (std::size_t t = 0; t < count; ++t) out[t] = at(t);
    return out;
  }

 private:
  Walk base_;
};

inline PeriodicSignal from_closed_walk(Walk w) {
  return PeriodicSignal(std::move(w));
}

/// instants[i] = tau_i with tau_0 = 0; active[i] = sigma on [tau_i, tau_{i+1}).
struct SwitchRecord {
  std::vector<TimeStep> instants;
  std::vector<VertexId> active;
};

/// Switching instants strictly before the horizon: {0} together with every
/// t in [1, horizon - 1] at which sigma jumps.
inline SwitchRecord switching_record(const PeriodicSignal& s,
                                     TimeStep horizon) {
  if (horizon == 0) throw std::invalid_argument("horizon must be >= 1");
  SwitchRecord r;
  r.instants.push_back(0);
  r.active.push_back(s.at(0));
  for (TimeStep t = 1; t < horizon; ++t) {
    if (s.switches_at(t)) {
      r.instants.push_back(t);
      r.active.push_back(s.at(t));
    }
  }
  return r;
}

namespace detail {
inline void check_interval(TimeStep from, TimeStep to) {
  if (from >= to) {
    throw std::invalid_argument("interval (" + std::to_string(from) + ", " +
                                std::to_string(to) + "] is empty");
  }
}
}  // namespace detail

/// Number of jumps in (from, to].
inline std::size_t switch_count(const PeriodicSignal& s, TimeStep from,
                                TimeStep to) {
  detail::check_interval(from, to);
  std::size_t n = 0;
  for (TimeStep u = from + 1; u <= to; ++u) n += s.switches_at(u) ? 1 : 0;
  return n;
}

/// Number of steps u in (from, to] with sigma(u) unstable.
inline std::size_t unstable_activation(const PeriodicSignal& s,
                                       const SwitchedDigraph& g, TimeStep from,
                                       TimeStep to) {
  detail::check_interval(from, to);
  s.base().validate(g);
  std::size_t n = 0;
  for (TimeStep u = from + 1; u <= to; ++u) n += g.is_stable(s.at(u)) ? 0 : 1;
  return n;
}

struct AdtParams {
  double n0 = 0.0;       // chatter bound, >= 0
  double tau_a = 1.0;    // average dwell time, > 0
  double t0 = 0.0;       // unstable-activation offset, >= 0
  double rho_bar = 0.5;  // unstable-activation rate, in (0, 1)
};

struct AdtViolation {
  enum class Kind { kSwitchCount, kUnstableActivation };
  TimeStep s = 0;
  TimeStep t = 0;
  Kind kind = Kind::kSwitchCount;
  double observed = 0.0;
  double allowed = 0.0;
};

/// Every (s, t) with 0 <= s < t <= horizon violating
///   N(s,t) <= n0 + (t-s)/tau_a   or   T_U(s,t) <= t0 + rho_bar (t-s).
/// Ordered by s, then t, switch-count violations first.
inline std::vector<AdtViolation> adt_check(const PeriodicSignal& s,
                                           const SwitchedDigraph& g,
                                           const AdtParams& p,
                                           TimeStep horizon) {
  if (!(p.n0 >= 0.0) || !(p.tau_a > 0.0) || !(p.t0 >= 0.0) ||
      !(p.rho_bar > 0.0 && p.rho_bar < 1.0)) {
    throw std::invalid_argument("average dwell time parameters out of range");
  }
  s.base().validate(g);
  // Prefix counts over (0, u].
  std::vector<std::size_t> jumps(horizon + 1, 0), unstable(horizon + 1, 0);
  for (TimeStep u = 1; u <= horizon; ++u) {
    jumps[u] = jumps[u - 1] + (s.switches_at(u) ? 1 : 0);
    unstable[u] = unstable[u - 1] + (g.is_stable(s.at(u)) ? 0 : 1);
  }
  std::vector<AdtViolation> out;
  for (TimeStep a = 0; a < horizon; ++a) {
    for (TimeStep b = a + 1; b <= horizon; ++b) {
      const double len = static_cast<double>(b - a);
      const double n = static_cast<double>(jumps[b] - jumps[a]);
      const double n_allowed = p.n0 + len / p.tau_a;
      if (n > n_allowed) {
        out.push_back({a, b, AdtViolation::Kind::kSwitchCount, n, n_allowed});
      }
      const double tu = static_cast<double>(unstable[b] - unstable[a]);
      const double tu_allowed = p.t0 + p.rho_bar * len;
      if (tu > tu_allowed) {
        out.push_back(
            {a, b, AdtViolation::Kind::kUnstableActivation, tu, tu_allowed});
      }
    }
  }
  return out;
}

}  // namespace swiss

#endif  // SWISS_SCHEDULE_HPP_
