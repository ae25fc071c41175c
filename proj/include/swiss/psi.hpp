// State-propagation and input-accumulation factors of a switched system
// under a periodic switching signal, the closed-form bound on the latter,
// and the resulting certified state bound.
//
// Conventions: at horizon t the switching instants are those in [1, t-1]
// and the final segment ends at t. psi1(0) = 1 and psi2(0) = 0.
//
// With W(t) := V_{sigma(t-1)}(x(t)) (W(0) = V_{sigma(0)}(x(0))) the decay and
// comparison inequalities chain to
//   W(t) <= psi1(t) W(0) + gamma(|v|_t) psi2(t).

#ifndef SWISS_PSI_HPP_
#define SWISS_PSI_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <stdexcept>
#include <utility>

#include "swiss/graph.hpp"
#include "swiss/lyapunov.hpp"
#include "swiss/schedule.hpp"

namespace swiss {

/// The signal together with the lambda and mu values it visits.
class PsiParams {
 public:
  PsiParams(const SwitchedDigraph& g, PeriodicSignal signal)
      : signal_(std::move(signal)) {
    signal_.base().validate(g);
    for (const SubsystemNode& n : g.nodes()) lambda_[n.id] = n.lambda;
    for (const TransitionEdge& e : g.edges()) mu_[e.key()] = e.mu;
  }

  const PeriodicSignal& signal() const { return signal_; }
  double lambda(VertexId i) const { return lambda_.at(i); }
  double mu(VertexId from, VertexId to) const { return mu_.at({from, to}); }

 private:
  PeriodicSignal signal_;
  std::map<VertexId, double> lambda_;
  std::map<EdgeKey, double> mu_;
};

namespace detail {

struct Segments {
  SwitchRecord record;
  std::vector<TimeStep> length;  // tau_{i+1} - tau_i with tau_{N+1} := t
};

inline Segments segments_until(const PsiParams& p, TimeStep t) {
  Segments s{switching_record(p.signal(), t), {}};
  const auto& tau = s.record.instants;
  for (std::size_t i = 0; i < tau.size(); ++i) {
    s.length.push_back((i + 1 < tau.size() ? tau[i + 1] : t) - tau[i]);
  }
  return s;
}

// sum_{k=0}^{n-1} lambda^k for lambda != 1.
inline double geometric_sum(double lambda, TimeStep n) {
  return std::expm1(static_cast<double>(n) * std::log(lambda)) / (lambda - 1.0);
}

}  // namespace detail

/// prod_i lambda_{sigma(tau_i)}^(tau_{i+1} - tau_i) * prod_i mu_{sigma(tau_i) sigma(tau_{i+1})}.
inline double psi1(TimeStep t, const PsiParams& p) {
  if (t == 0) return 1.0;
  const detail::Segments seg = detail::segments_until(p, t);
  const auto& active = seg.record.active;
  double out = 1.0;
  for (std::size_t i = 0; i < active.size(); ++i) {
    out *= std::pow(p.lambda(active[i]), static_cast<double>(seg.length[i]));
    if (i + 1 < active.size()) out *= p.mu(active[i], active[i + 1]);
  }
  return out;
}

/// sum over segments i of
///   (sum_{k < len_i} lambda_i^k) * prod_{j > i} lambda_j^len_j
///                                * prod_{j >= i} mu_{j, j+1}.
/// The mu product includes the switch that closes segment i.
inline double psi2(TimeStep t, const PsiParams& p) {
  if (t == 0) return 0.0;
  const detail::Segments seg = detail::segments_until(p, t);
  const auto& active = seg.record.active;
  const std::size_t last = active.size() - 1;
  double total = 0.0;
  double tail = 1.0;  // propagation from the end of segment i to t
  for (std::size_t i = last + 1; i-- > 0;) {
    if (i < last) {
      tail *= std::pow(p.lambda(active[i + 1]),
                       static_cast<double>(seg.length[i + 1])) *
              p.mu(active[i], active[i + 1]);
    }
    total += detail::geometric_sum(p.lambda(active[i]), seg.length[i]) * tail;
  }
  return total;
}

/// Log-domain bookkeeping over [s, t): -|ln lambda| for every stable step,
/// +|ln lambda| for every unstable step, and ln mu for every switch at an
/// instant u in [max(s, 1), t). ln psi1(t) = g(0, t).
inline double g_decomposition(const PeriodicSignal& signal,
                              const SwitchedDigraph& g, TimeStep s,
                              TimeStep t) {
  if (s > t) throw std::invalid_argument("g_decomposition needs s <= t");
  signal.base().validate(g);
  double out = 0.0;
  for (TimeStep u = s; u < t; ++u) {
    const VertexId k = signal.at(u);
    const double rate = std::abs(std::log(g.node(k).lambda));
    out += g.is_stable(k) ? -rate : rate;
    if (u >= 1 && signal.switches_at(u)) {
      out += std::log(g.edge(signal.at(u - 1), k).mu);
    }
  }
  return out;
}

/// Uniform bound on psi2 for the signal that repeats `base`:
///   S / (1 - e^-eps) * [(L-1) e^((L-1)a) + (L-2) e^((L-2)a)]
/// with eps = -Xi(base), L = |base|, a the largest |ln mu_ij + |ln lambda_j||
/// over the walk's edges, and S = sum over subsystems of 1/|1 - lambda|.
/// A self-loop walk (L = 1) is a single geometric segment: 1/(1 - lambda).
inline double psi2_bound(const Walk& base, const SwitchedDigraph& g) {
  if (!base.closed()) throw std::invalid_argument("psi2_bound needs a closed walk");
  const double eps = -xi(g, base);
  if (!(eps > 0.0)) {
    throw std::invalid_argument("psi2_bound needs a contractive walk, Xi = " +
                                std::to_string(-eps));
  }
  const std::size_t len = base.length();
  if (len == 1) return 1.0 / (1.0 - g.node(base.front()).lambda);

  double a = 0.0;
  for (std::size_t i = 0; i + 1 <= len; ++i) {
    const VertexId from = base[i], to = base[i + 1];
    a = std::max(a, std::abs(std::log(g.edge(from, to).mu) +
                             std::abs(std::log(g.node(to).lambda))));
  }
  double spread = 0.0;
  for (const SubsystemNode& n : g.nodes()) spread += 1.0 / std::abs(1.0 - n.lambda);

  const double l1 = static_cast<double>(len - 1);
  const double l2 = static_cast<double>(len - 2);
  const double bracket = l1 * std::exp(l1 * a) + l2 * std::exp(l2 * a);
  return spread * bracket / -std::expm1(-eps);
}

/// alpha_lower^{-1}(psi1(t) alpha_upper(|x0|) + gamma(|v|_t) psi2(t)).
inline double certified_state_bound(TimeStep t, double x0_norm, double v_sup,
                                    const LyapunovProfile& prof,
                                    const PsiParams& p) {
  const double level = psi1(t, p) * prof.alpha_upper()(x0_norm) +
                       prof.gamma()(v_sup) * psi2(t, p);
  return prof.alpha_lower().inverse(level);
}

}  // namespace swiss

#endif  // SWISS_PSI_HPP_
