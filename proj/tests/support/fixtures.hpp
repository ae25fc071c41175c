#ifndef SWISS_TESTS_SUPPORT_FIXTURES_HPP_
#define SWISS_TESTS_SUPPORT_FIXTURES_HPP_

#include <cmath>
#include <string>
#include <vector>

#include "swiss/swiss.hpp"

namespace fixtures {

using swiss::StabilityClass;

inline constexpr double kLambda1 = 0.815;
inline constexpr double kLambda2 = 1.2;

// Hand-computed: -|ln 0.815| and |ln 1.2|.
inline double w12() { return std::log(0.815); }
inline double w2x() { return std::log(1.2); }

/// Two subsystems, edges (1,2), (2,1) and the self-loop (2,2), mu = 1.
inline swiss::SwitchedDigraph pair_graph() {
  return swiss::SwitchedDigraph(
      {{1, kLambda1, StabilityClass::kStable}, {2, kLambda2, StabilityClass::kUnstable}},
      {{1, 2, 1.0}, {2, 1, 1.0}, {2, 2, 1.0}});
}

/// Scalar pair x -> 0.5 x + v and x -> 1.25 x + v with V = |x|.
inline swiss::SwitchedDigraph scalar_graph() {
  return swiss::SwitchedDigraph(
      {{1, 0.5, StabilityClass::kStable}, {2, 1.25, StabilityClass::kUnstable}},
      {{1, 2, 1.0}, {2, 1, 1.0}});
}

inline swiss::DynamicsFamily scalar_family(double a1 = 0.5, double a2 = 1.25) {
  return swiss::DynamicsFamily::ScalarLinear({{1, a1}, {2, a2}});
}

inline swiss::LyapunovProfile scalar_profile(const swiss::SwitchedDigraph& g) {
  return swiss::LyapunovProfile(
      g, {{1, swiss::LyapunovFunction::Absolute()}, {2, swiss::LyapunovFunction::Absolute()}},
      swiss::PowerLaw(1, 1), swiss::PowerLaw(1, 1),
      swiss::GainFunction({swiss::PowerLaw(1, 1)}));
}

inline swiss::PeriodicSignal alternating() {
  return swiss::PeriodicSignal(swiss::Walk({1, 2, 1}));
}

inline std::string scenario(const std::string& name) {
  return std::string(SWISS_SCENARIO_DIR) + "/" + name;
}

}  // namespace fixtures

#endif  // SWISS_TESTS_SUPPORT_FIXTURES_HPP_
