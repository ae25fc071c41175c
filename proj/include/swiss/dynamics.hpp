// Families of discrete-time subsystems x(t+1) = f_i(x(t), v(t)).

#ifndef SWISS_DYNAMICS_HPP_
#define SWISS_DYNAMICS_HPP_

#include <cmath>
#include <cstddef>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>

#include <Eigen/Dense>

#include "swiss/graph.hpp"
#include "swiss/lyapunov.hpp"

namespace swiss {

class DynamicsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DynamicsFamily {
 public:
  DynamicsFamily(std::string name, std::size_t state_dim, std::size_t input_dim,
                 std::map<VertexId, UpdateMap> maps)
      : name_(std::move(name)),
        state_dim_(state_dim),
        input_dim_(input_dim),
        maps_(std::move(maps)) {
    if (state_dim_ == 0) throw DynamicsError("state dimension must be positive");
    if (maps_.empty()) throw DynamicsError("dynamics family has no subsystems");
    const State zero_x = State::Zero(static_cast<Eigen::Index>(state_dim_));
    const Input zero_v = Input::Zero(static_cast<Eigen::Index>(input_dim_));
    for (const auto& [id, f] : maps_) {
      const State y = f(zero_x, zero_v);
      if (y.size() != zero_x.size() || y.norm() != 0.0) {
        throw DynamicsError("subsystem " + std::to_string(id) +
                            " does not fix the origin");
      }
    }
  }

  const std::string& name() const { return name_; }
  std::size_t state_dim() const { return state_dim_; }
  std::size_t input_dim() const { return input_dim_; }
  bool has(VertexId i) const { return maps_.count(i) != 0; }

  const UpdateMap& map(VertexId i) const {
    auto it = maps_.find(i);
    if (it == maps_.end()) {
      throw DynamicsError("unknown subsystem " + std::to_string(i));
    }
    return it->second;
  }

  State step(VertexId i, const State& x, const Input& v) const {
    const UpdateMap& f = map(i);
    if (static_cast<std::size_t>(x.size()) != state_dim_ ||
        static_cast<std::size_t>(v.size()) != input_dim_) {
      throw DynamicsError("dimension mismatch in step of subsystem " +
                          std::to_string(i));
    }
    State y = f(x, v);
    if (!y.allFinite()) {
      throw DynamicsError("subsystem " + std::to_string(i) +
                          " produced a non-finite state");
    }
    return y;
  }

  /// x -> A_i x + B_i v.
  static DynamicsFamily Affine(
      const std::map<VertexId, std::pair<Eigen::MatrixXd, Eigen::MatrixXd>>& ab) {
    if (ab.empty()) throw DynamicsError("affine family needs subsystems");
    const auto d = ab.begin()->second.first.rows();
    const auto m = ab.begin()->second.second.cols();
    std::map<VertexId, UpdateMap> maps;
    for (const auto& [id, mats] : ab) {
      const auto& [a, b] = mats;
      if (a.rows() != d || a.cols() != d || b.rows() != d || b.cols() != m) {
        throw DynamicsError("affine subsystem " + std::to_string(id) +
                            " has inconsistent matrix shapes");
      }
      maps[id] = [a, b](const State& x, const Input& v) -> State {
        return a * x + b * v;
      };
    }
    return DynamicsFamily("affine", static_cast<std::size_t>(d),
                          static_cast<std::size_t>(m), std::move(maps));
  }

  /// x -> a_i x + v on scalar states and inputs.
  static DynamicsFamily ScalarLinear(const std::map<VertexId, double>& gains) {
    std::map<VertexId, UpdateMap> maps;
    for (const auto& [id, a] : gains) {
      maps[id] = [a](const State& x, const Input& v) -> State {
        State y(1);
        y[0] = a * x[0] + v[0];
        return y;
      };
    }
    return DynamicsFamily("scalar_linear", 1, 1, std::move(maps));
  }

  /// Two planar subsystems with a scalar input entering through
  /// exp(-|x_k|) gains:
  ///   f1(x, v) = (1.05 x2 + 0.05 x2 e^-|x2| + e^-|x1| v, 0.7 x1 + e^-|x2| v)
  ///   f2(x, v) = (2 x1 sin x1 + e^-|x1| v,          sqrt(6) x2 + e^-|x2| v)
  static DynamicsFamily NonlinearPair() {
    std::map<VertexId, UpdateMap> maps;
    maps[1] = [](const State& x, const Input& v) -> State {
      const double e1 = std::exp(-std::abs(x[0]));
      const double e2 = std::exp(-std::abs(x[1]));
      State y(2);
      y[0] = 1.05 * x[1] + 0.05 * x[1] * e2 + e1 * v[0];
      y[1] = 0.7 * x[0] + e2 * v[0];
      return y;
    };
    maps[2] = [](const State& x, const Input& v) -> State {
      const double e1 = std::exp(-std::abs(x[0]));
      const double e2 = std::exp(-std::abs(x[1]));
      State y(2);
      y[0] = 2.0 * x[0] * std::sin(x[0]) + e1 * v[0];
      y[1] = std::sqrt(6.0) * x[1] + e2 * v[0];
      return y;
    };
    return DynamicsFamily("nonlinear_pair", 2, 1, std::move(maps));
  }

 private:
  std::string name_;
  std::size_t state_dim_;
  std::size_t input_dim_;
  std::map<VertexId, UpdateMap> maps_;
};

inline State step(const DynamicsFamily& fam, VertexId i, const State& x,
                  const Input& v) {
  return fam.step(i, x, v);
}

}  // namespace swiss

#endif  // SWISS_DYNAMICS_HPP_
