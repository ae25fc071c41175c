// ISS-Lyapunov-like functions, power-law comparison functions and sampled
// verification of the sandwich, decay and comparison inequalities.
//
// Sampling can refute an inequality but never prove it: an empty violation
// list means "verified on these samples" and nothing more.

#ifndef SWISS_LYAPUNOV_HPP_
#define SWISS_LYAPUNOV_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "swiss/graph.hpp"

namespace swiss {

using State = Eigen::VectorXd;
using Input = Eigen::VectorXd;
using UpdateMap = std::function<State(const State&, const Input&)>;

inline constexpr double kDefaultVerificationTolerance = 1e-9;

/// kappa(s) = c s^p with c, p > 0.
class PowerLaw {
 public:
  PowerLaw(double coefficient, double exponent)
      : c_(coefficient), p_(exponent) {
    if (!(c_ > 0.0) || !(p_ > 0.0) || !std::isfinite(c_) || !std::isfinite(p_)) {
      throw std::invalid_argument("power law needs c > 0 and p > 0");
    }
  }

  double coefficient() const { return c_; }
  double exponent() const { return p_; }

  double operator()(double s) const {
    return s <= 0.0 ? 0.0 : c_ * std::pow(s, p_);
  }
  double inverse(double v) const {
    return v <= 0.0 ? 0.0 : std::pow(v / c_, 1.0 / p_);
  }

  friend bool operator==(const PowerLaw&, const PowerLaw&) = default;

 private:
  double c_;
  double p_;
};

/// Input gain shared by the whole family: the pointwise maximum of the
/// per-subsystem power laws. No terms means gamma == 0.
class GainFunction {
 public:
  GainFunction() = default;
  explicit GainFunction(std::vector<PowerLaw> terms) : terms_(std::move(terms)) {}
  explicit GainFunction(PowerLaw term) : terms_{term} {}

  std::span<const PowerLaw> terms() const { return terms_; }

  double operator()(double s) const {
    double v = 0.0;
    for (const PowerLaw& k : terms_) v = std::max(v, k(s));
    return v;
  }

  friend bool operator==(const GainFunction&, const GainFunction&) = default;

 private:
  std::vector<PowerLaw> terms_;
};

/// V(x) = x' P x with P symmetric positive definite, or V(x) = c |x| on
/// scalar states.
class LyapunovFunction {
 public:
  enum class Form { kQuadratic, kAbsolute };

  static LyapunovFunction Quadratic(Eigen::MatrixXd p) {
    if (p.rows() == 0 || p.rows() != p.cols()) {
      throw std::invalid_argument("quadratic form needs a square matrix");
    }
    if ((p - p.transpose()).cwiseAbs().maxCoeff() >
        1e-12 * p.cwiseAbs().maxCoeff()) {
      throw std::invalid_argument("quadratic form matrix must be symmetric");
    }
    Eigen::LLT<Eigen::MatrixXd> llt(p);
    if (llt.info() != Eigen::Success) {
      throw std::invalid_argument("quadratic form matrix must be positive definite");
    }
    return LyapunovFunction(Form::kQuadratic, std::move(p), 0.0);
  }

  static LyapunovFunction Absolute(double scale = 1.0) {
    if (!(scale > 0.0)) throw std::invalid_argument("|x| scale must be positive");
    return LyapunovFunction(Form::kAbsolute, Eigen::MatrixXd(), scale);
  }

  Form form() const { return form_; }
  const Eigen::MatrixXd& matrix() const { return p_; }
  double scale() const { return scale_; }
  std::size_t dimension() const {
    return form_ == Form::kQuadratic ? static_cast<std::size_t>(p_.rows()) : 1;
  }

  double operator()(const State& x) const {
    if (static_cast<std::size_t>(x.size()) != dimension()) {
      throw std::invalid_argument("Lyapunov function evaluated on wrong dimension");
    }
    if (form_ == Form::kAbsolute) return scale_ * std::abs(x[0]);
    return x.dot(p_ * x);
  }

  friend bool operator==(const LyapunovFunction& a, const LyapunovFunction& b) {
    return a.form_ == b.form_ && a.scale_ == b.scale_ &&
           a.p_.rows() == b.p_.rows() && a.p_.cols() == b.p_.cols() &&
           a.p_ == b.p_;
  }

 private:
  LyapunovFunction(Form f, Eigen::MatrixXd p, double scale)
      : form_(f), p_(std::move(p)), scale_(scale) {}

  Form form_;
  Eigen::MatrixXd p_;
  double scale_;
};

/// Per-subsystem Lyapunov functions plus the family's comparison functions.
/// lambda and mu are copied from the digraph so the two never disagree.
class LyapunovProfile {
 public:
  LyapunovProfile(const SwitchedDigraph& g,
                  std::map<VertexId, LyapunovFunction> functions,
                  PowerLaw alpha_lower, PowerLaw alpha_upper,
                  GainFunction gamma)
      : functions_(std::move(functions)),
        alpha_lower_(alpha_lower),
        alpha_upper_(alpha_upper),
        gamma_(std::move(gamma)) {
    std::size_t dim = 0;
    for (const SubsystemNode& n : g.nodes()) {
      auto it = functions_.find(n.id);
      if (it == functions_.end()) {
        throw std::invalid_argument("no Lyapunov function for subsystem " +
                                    std::to_string(n.id));
      }
      if (dim != 0 && it->second.dimension() != dim) {
        throw std::invalid_argument("Lyapunov functions disagree on dimension");
      }
      dim = it->second.dimension();
      lambda_[n.id] = n.lambda;
    }
    for (const auto& [id, _] : functions_) {
      if (!g.has_node(id)) {
        throw std::invalid_argument("Lyapunov function for unknown subsystem " +
                                    std::to_string(id));
      }
    }
    for (const TransitionEdge& e : g.edges()) mu_[e.key()] = e.mu;
  }

  const LyapunovFunction& function(VertexId i) const {
    auto it = functions_.find(i);
    if (it == functions_.end()) {
      throw std::invalid_argument("no Lyapunov function for subsystem " +
                                  std::to_string(i));
    }
    return it->second;
  }
  const std::map<VertexId, LyapunovFunction>& functions() const {
    return functions_;
  }
  const PowerLaw& alpha_lower() const { return alpha_lower_; }
  const PowerLaw& alpha_upper() const { return alpha_upper_; }
  const GainFunction& gamma() const { return gamma_; }
  double lambda(VertexId i) const { return lambda_.at(i); }
  double mu(VertexId from, VertexId to) const { return mu_.at({from, to}); }

 private:
  std::map<VertexId, LyapunovFunction> functions_;
  PowerLaw alpha_lower_;
  PowerLaw alpha_upper_;
  GainFunction gamma_;
  std::map<VertexId, double> lambda_;
  std::map<EdgeKey, double> mu_;
};

/// Axis-aligned box in state x input space. Degenerate axes (lo == hi) are
/// sampled at their single value.
struct SampleBox {
  State state_lo, state_hi;
  Input input_lo, input_hi;
};

struct SampleSet {
  std::vector<State> states;
  std::vector<Input> inputs;  // same length as states
  SampleBox box;
  std::uint64_t seed = 0;
  std::size_t grid_points = 0;
  std::size_t random_points = 0;
  std::size_t extra_points = 0;

  std::size_t size() const { return states.size(); }

  void add(State x, Input v) {
    states.push_back(std::move(x));
    inputs.push_back(std::move(v));
    ++extra_points;
  }
};

namespace detail {
inline double unit_open(std::uint64_t bits) {
  // Midpoint of a 2^-53 bucket: strictly inside (0, 1).
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}
}  // namespace detail

/// Regular grid with `grid_per_axis` points on every non-degenerate axis,
/// followed by `random_count` uniform points from a mt19937_64 seeded with
/// `seed`.
inline SampleSet make_samples(const SampleBox& box, std::size_t grid_per_axis,
                              std::size_t random_count, std::uint64_t seed) {
  if (box.state_lo.size() != box.state_hi.size() ||
      box.input_lo.size() != box.input_hi.size()) {
    throw std::invalid_argument("sample box bounds disagree on dimension");
  }
  const Eigen::Index d = box.state_lo.size();
  const Eigen::Index m = box.input_lo.size();
  Eigen::VectorXd lo(d + m), hi(d + m);
  lo << box.state_lo, box.input_lo;
  hi << box.state_hi, box.input_hi;
  if ((hi.array() < lo.array()).any()) {
    throw std::invalid_argument("sample box has lo > hi");
  }

  SampleSet set;
  set.box = box;
  set.seed = seed;
  auto push = [&](const Eigen::VectorXd& z) {
    set.states.push_back(z.head(d));
    set.inputs.push_back(z.tail(m));
  };

  if (grid_per_axis > 0) {
    std::vector<std::size_t> counts(static_cast<std::size_t>(d + m));
    for (Eigen::Index a = 0; a < d + m; ++a) {
      counts[static_cast<std::size_t>(a)] =
          (lo[a] == hi[a] || grid_per_axis == 1) ? 1 : grid_per_axis;
    }
    std::vector<std::size_t> idx(counts.size(), 0);
    Eigen::VectorXd z(d + m);
    while (true) {
      for (Eigen::Index a = 0; a < d + m; ++a) {
        const std::size_t n = counts[static_cast<std::size_t>(a)];
        const double frac =
            n == 1 ? 0.0
                   : static_cast<double>(idx[static_cast<std::size_t>(a)]) /
                         static_cast<double>(n - 1);
        z[a] = n == 1 && lo[a] != hi[a] ? 0.5 * (lo[a] + hi[a])
                                        : lo[a] + frac * (hi[a] - lo[a]);
      }
      push(z);
      ++set.grid_points;
      std::size_t a = 0;
      while (a < idx.size() && ++idx[a] == counts[a]) idx[a++] = 0;
      if (a == idx.size()) break;
    }
  }

  std::mt19937_64 rng(seed);
  Eigen::VectorXd z(d + m);
  for (std::size_t k = 0; k < random_count; ++k) {
    for (Eigen::Index a = 0; a < d + m; ++a) {
      z[a] = lo[a] + detail::unit_open(rng()) * (hi[a] - lo[a]);
    }
    push(z);
    ++set.random_points;
  }
  return set;
}

struct Violation {
  std::size_t sample_index = 0;
  State state;
  Input input;
  double residual = 0.0;
};

/// Outcome of checking one inequality on one sample set.
struct VerificationReport {
  std::string subsystem;
  std::string inequality;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  std::vector<Violation> violations;  // sorted by sample index
  double max_residual = -std::numeric_limits<double>::infinity();

  bool passed() const { return violations.empty(); }
};

class VerificationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

template <typename ResidualFn>
VerificationReport run_check(std::string subsystem, std::string inequality,
                             const SampleSet& samples, double tol,
                             ResidualFn&& residual) {
  if (samples.size() == 0) throw std::invalid_argument("sample set is empty");
  VerificationReport rep;
  rep.subsystem = std::move(subsystem);
  rep.inequality = std::move(inequality);
  rep.samples = samples.size();
  rep.seed = samples.seed;
  for (std::size_t k = 0; k < samples.size(); ++k) {
    const double r = residual(samples.states[k], samples.inputs[k]);
    if (!std::isfinite(r)) {
      throw VerificationError(rep.inequality + ": non-finite evaluation at sample " +
                              std::to_string(k));
    }
    rep.max_residual = std::max(rep.max_residual, r);
    if (r > tol) {
      rep.violations.push_back({k, samples.states[k], samples.inputs[k], r});
    }
  }
  return rep;
}

}  // namespace detail

/// Residuals V(f(x, v)) - lambda V(x) - gamma(|v|) above `tol`.
inline VerificationReport verify_decay(
    const UpdateMap& f, const LyapunovFunction& v, double lambda,
    const GainFunction& gamma, const SampleSet& samples,
    double tol = kDefaultVerificationTolerance, std::string subsystem = {}) {
  return detail::run_check(
      std::move(subsystem), "decay", samples, tol,
      [&](const State& x, const Input& u) {
        const State next = f(x, u);
        if (!next.allFinite()) return std::numeric_limits<double>::quiet_NaN();
        return v(next) - lambda * v(x) - gamma(u.norm());
      });
}

/// Residuals of alpha_lower(|x|) <= V(x) <= alpha_upper(|x|); the larger of
/// the two sides is reported per sample.
inline VerificationReport verify_sandwich(
    const LyapunovFunction& v, const PowerLaw& alpha_lower,
    const PowerLaw& alpha_upper, const SampleSet& samples,
    double tol = kDefaultVerificationTolerance, std::string subsystem = {}) {
  return detail::run_check(std::move(subsystem), "sandwich", samples, tol,
                           [&](const State& x, const Input&) {
                             const double n = x.norm();
                             const double val = v(x);
                             return std::max(alpha_lower(n) - val,
                                             val - alpha_upper(n));
                           });
}

/// Residuals V_to(x) - mu V_from(x) above `tol`.
inline VerificationReport verify_mu(const LyapunovFunction& v_from,
                                    const LyapunovFunction& v_to, double mu,
                                    const SampleSet& samples,
                                    double tol = kDefaultVerificationTolerance,
                                    std::string subsystem = {}) {
  return detail::run_check(
      std::move(subsystem), "mu", samples, tol,
      [&](const State& x, const Input&) { return v_to(x) - mu * v_from(x); });
}

struct FittedRates {
  double lambda_hat = 0.0;
  GainFunction gamma_hat;  // empty when the inputs never raise V
};

/// Smallest lambda and gamma = c s^p consistent with the decay inequality on
/// the samples. lambda uses the zero-input samples with x != 0; c is the
/// largest (V(f(x,v)) - lambda V(x)) / |v|^p over samples with v != 0.
inline FittedRates fit_rates(const UpdateMap& f, const LyapunovFunction& v,
                             const SampleSet& samples,
                             double gamma_exponent = 1.0) {
  double lambda = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < samples.size(); ++k) {
    if (samples.inputs[k].norm() != 0.0) continue;
    const double v0 = v(samples.states[k]);
    if (v0 == 0.0) continue;
    lambda = std::max(lambda, v(f(samples.states[k], samples.inputs[k])) / v0);
  }
  if (!std::isfinite(lambda)) {
    throw std::invalid_argument(
        "fit_rates needs zero-input samples with a nonzero state");
  }
  double c = 0.0;
  for (std::size_t k = 0; k < samples.size(); ++k) {
    const double s = samples.inputs[k].norm();
    if (s == 0.0) continue;
    const double excess =
        v(f(samples.states[k], samples.inputs[k])) - lambda * v(samples.states[k]);
    c = std::max(c, excess / std::pow(s, gamma_exponent));
  }
  FittedRates out;
  out.lambda_hat = lambda;
  if (c > 0.0) out.gamma_hat = GainFunction(PowerLaw(c, gamma_exponent));
  return out;
}

}  // namespace swiss

#endif  // SWISS_LYAPUNOV_HPP_
