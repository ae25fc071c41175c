#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "support/fixtures.hpp"
#include "support/oracles.hpp"
#include "swiss/graph.hpp"

namespace {

using swiss::GraphError;
using swiss::StabilityClass;
using swiss::SwitchedDigraph;
using swiss::Walk;

TEST(Digraph, BuildsPairGraph) {
  const SwitchedDigraph g = fixtures::pair_graph();
  EXPECT_EQ(g.num_nodes(), 2u);
  EXPECT_EQ(g.num_edges(), 3u);
  EXPECT_TRUE(g.is_stable(1));
  EXPECT_FALSE(g.is_stable(2));
}

TEST(Digraph, SingleStableSelfLoop) {
  const SwitchedDigraph g({{1, 0.5, StabilityClass::kStable}}, {{1, 1, 1.0}});
  EXPECT_EQ(g.num_edges(), 1u);
  EXPECT_DOUBLE_EQ(g.weight(1, 1), std::log(0.5));
}

TEST(Digraph, EdgesSortedByKey) {
  const SwitchedDigraph g(
      {{2, 1.2, StabilityClass::kUnstable}, {1, 0.815, StabilityClass::kStable}},
      {{2, 2, 1.0}, {2, 1, 1.0}, {1, 2, 1.0}});
  ASSERT_EQ(g.nodes()[0].id, 1);
  EXPECT_EQ(g.edges()[0].key(), (swiss::EdgeKey{1, 2}));
  EXPECT_EQ(g.edges()[1].key(), (swiss::EdgeKey{2, 1}));
  EXPECT_EQ(g.edges()[2].key(), (swiss::EdgeKey{2, 2}));
}

TEST(Digraph, RejectsInvalidInput) {
  const auto S = StabilityClass::kStable;
  const auto U = StabilityClass::kUnstable;
  EXPECT_THROW(SwitchedDigraph({{1, 0.5, S}}, {{1, 3, 1.0}}), GraphError);
  EXPECT_THROW(SwitchedDigraph({{1, 0.5, S}, {1, 0.6, S}}, {}), GraphError);
  EXPECT_THROW(SwitchedDigraph({{1, 1.0, S}}, {}), GraphError);
  EXPECT_THROW(SwitchedDigraph({{1, 0.0, S}}, {}), GraphError);
  EXPECT_THROW(SwitchedDigraph({{1, -2.0, U}}, {}), GraphError);
  EXPECT_THROW(SwitchedDigraph({{1, 0.5, U}}, {}), GraphError);
  EXPECT_THROW(SwitchedDigraph({{1, 0.5, S}, {2, 2.0, U}}, {{1, 2, 0.0}}), GraphError);
  EXPECT_THROW(SwitchedDigraph({{1, 0.5, S}, {2, 2.0, U}}, {{1, 2, -1.0}}), GraphError);
  EXPECT_THROW(SwitchedDigraph({{1, 0.5, S}}, {{1, 1, 1.5}}), GraphError);
  EXPECT_THROW(SwitchedDigraph({{1, 0.5, S}, {2, 2.0, U}}, {{1, 2, 1.0}, {1, 2, 2.0}}),
               GraphError);
  EXPECT_THROW(SwitchedDigraph({}, {}), GraphError);
}

TEST(EdgeWeight, PairGraphValues) {
  const SwitchedDigraph g = fixtures::pair_graph();
  EXPECT_NEAR(swiss::edge_weight(g, 1, 2), -0.2045671657412744, 1e-15);
  EXPECT_NEAR(swiss::edge_weight(g, 2, 2), 0.1823215567939546, 1e-15);
  EXPECT_NEAR(swiss::edge_weight(g, 2, 1), 0.1823215567939546, 1e-15);
  EXPECT_THROW(swiss::edge_weight(g, 1, 1), GraphError);
}

TEST(EdgeWeight, SelfLoopSignFollowsClass) {
  std::mt19937_64 rng(5);
  for (int k = 0; k < 200; ++k) {
    const SwitchedDigraph g = oracle::random_graph(rng, 4, 0.7);
    for (const auto& e : g.edges()) {
      if (!e.is_self_loop()) continue;
      if (g.is_stable(e.from)) {
        EXPECT_LT(g.weight_of(e), 0.0);
      } else {
        EXPECT_GT(g.weight_of(e), 0.0);
      }
    }
  }
}

TEST(Walk, LengthAndClosure) {
  const Walk w({1, 2, 1});
  EXPECT_EQ(w.length(), 2u);
  EXPECT_TRUE(w.closed());
  EXPECT_FALSE(Walk({1}).closed());
  EXPECT_FALSE(Walk({1, 2}).closed());
  EXPECT_EQ(Walk({1, 2, 2, 2, 1}).edge_count(2, 2), 2u);
  EXPECT_THROW(Walk({}), std::invalid_argument);
}

TEST(Walk, ValidateNamesMissingEdge) {
  const SwitchedDigraph g = fixtures::pair_graph();
  EXPECT_NO_THROW(Walk({1, 2, 2, 1}).validate(g));
  EXPECT_THROW(Walk({1, 1}).validate(g), GraphError);
  EXPECT_THROW(Walk({1, 3}).validate(g), GraphError);
}

TEST(Xi, PairCycle) {
  const SwitchedDigraph g = fixtures::pair_graph();
  EXPECT_NEAR(swiss::xi(g, Walk({1, 2, 1})), -0.022245608947319806, 1e-15);
  EXPECT_NEAR(swiss::xi(g, Walk({1, 2, 1})), -0.0222459, 1e-6);
  EXPECT_THROW(swiss::xi(g, Walk({1})), std::invalid_argument);
}

TEST(Xi, ExampleTwoShapeCancels) {
  const SwitchedDigraph g(
      {{1, 0.3, StabilityClass::kStable},
       {2, 0.5, StabilityClass::kStable},
       {3, 2.0, StabilityClass::kUnstable}},
      {{3, 2, 1.0}, {2, 3, 1.0}});
  EXPECT_NEAR(swiss::xi(g, Walk({3, 2, 3})), 0.0, 1e-15);
  EXPECT_FALSE(swiss::is_contractive(g, Walk({3, 2, 3})));
  EXPECT_NEAR(swiss::xi(g, swiss::rotate(Walk({3, 2, 3}), 1)), 0.0, 1e-15);
  EXPECT_EQ(swiss::rotate(Walk({3, 2, 3}), 1), Walk({2, 3, 2}));
}

TEST(IsContractive, PairGraph) {
  const SwitchedDigraph g = fixtures::pair_graph();
  EXPECT_TRUE(swiss::is_contractive(g, Walk({1, 2, 1})));
  EXPECT_FALSE(swiss::is_contractive(g, Walk({2, 2, 2})));
  EXPECT_NEAR(swiss::xi(g, Walk({2, 2, 2})), 2 * std::log(1.2), 1e-15);
  EXPECT_THROW(swiss::is_contractive(g, Walk({1, 2})), std::invalid_argument);
}

TEST(IsContractive, MarginIsStrict) {
  const SwitchedDigraph g({{1, 0.5, StabilityClass::kStable}}, {{1, 1, 1.0}});
  const double x = swiss::xi(g, Walk({1, 1}));
  EXPECT_TRUE(swiss::is_contractive(g, Walk({1, 1}), 0.0));
  EXPECT_FALSE(swiss::is_contractive(g, Walk({1, 1}), -x));
}

TEST(Rotate, ShiftsAndPreservesLength) {
  EXPECT_EQ(swiss::rotate(Walk({1, 2, 1}), 1), Walk({2, 1, 2}));
  EXPECT_EQ(swiss::rotate(Walk({1, 2, 1}), 0), Walk({1, 2, 1}));
  EXPECT_EQ(swiss::rotate(Walk({1, 2, 2, 1}), 4), Walk({2, 2, 1, 2}));
  EXPECT_THROW(swiss::rotate(Walk({1, 2}), 1), std::invalid_argument);
}

TEST(Concat, JoinsAndChecksEndpoints) {
  const SwitchedDigraph g = fixtures::pair_graph();
  EXPECT_EQ(swiss::concat(Walk({1, 2}), Walk({2, 1})), Walk({1, 2, 1}));
  EXPECT_EQ(swiss::concat(Walk({1, 2, 1}), Walk({1})), Walk({1, 2, 1}));
  const Walk twice = swiss::concat(Walk({1, 2, 1}), Walk({1, 2, 1}));
  EXPECT_NEAR(swiss::xi(g, twice), 2 * swiss::xi(g, Walk({1, 2, 1})), 1e-15);
  EXPECT_THROW(swiss::concat(Walk({1, 2}), Walk({1, 2})), std::invalid_argument);
}

// Random closed walks on random graphs.
std::vector<swiss::VertexId> random_walk(const SwitchedDigraph& g, std::mt19937_64& rng,
                                         std::size_t steps) {
  std::vector<swiss::VertexId> w{g.nodes()[rng() % g.num_nodes()].id};
  for (std::size_t k = 0; k < steps; ++k) {
    const auto out = g.out_edges(g.index_of(w.back()));
    if (out.empty()) break;
    w.push_back(g.edges()[out[rng() % out.size()]].to);
  }
  return w;
}

TEST(XiProperty, Additivity) {
  std::mt19937_64 rng(17);
  int checked = 0;
  for (int k = 0; k < 500; ++k) {
    const SwitchedDigraph g = oracle::random_graph(rng, 5, 0.6);
    auto a = random_walk(g, rng, 1 + rng() % 8);
    if (a.size() < 2) continue;
    std::vector<swiss::VertexId> b{a.back()};
    for (std::size_t s = 0; s < 1 + rng() % 8; ++s) {
      const auto out = g.out_edges(g.index_of(b.back()));
      if (out.empty()) break;
      b.push_back(g.edges()[out[rng() % out.size()]].to);
    }
    if (b.size() < 2) continue;
    const Walk wa(a), wb(b);
    EXPECT_NEAR(swiss::xi(g, swiss::concat(wa, wb)), swiss::xi(g, wa) + swiss::xi(g, wb),
                1e-12);
    ++checked;
  }
  EXPECT_GT(checked, 100);
}

TEST(XiProperty, RotationInvariantAndMultisetIdentity) {
  std::mt19937_64 rng(23);
  int checked = 0;
  for (int k = 0; k < 500; ++k) {
    const SwitchedDigraph g = oracle::random_graph(rng, 5, 0.6);
    auto v = random_walk(g, rng, 12);
    // Cut at the first return to the start vertex.
    std::size_t close = 0;
    for (std::size_t i = 1; i < v.size(); ++i) {
      if (v[i] == v[0]) {
        close = i;
        break;
      }
    }
    if (close == 0) continue;
    v.resize(close + 1);
    const Walk w(v);
    const double base = swiss::xi(g, w);
    for (std::size_t r = 0; r <= w.length(); ++r) {
      const Walk rw = swiss::rotate(w, r);
      EXPECT_EQ(rw.edge_counts(), w.edge_counts());
      EXPECT_NEAR(swiss::xi(g, rw), base, 1e-12);
    }
    double by_counts = 0.0;
    for (const auto& [key, count] : w.edge_counts()) {
      by_counts += oracle::weight(g, key.first, key.second) * static_cast<double>(count);
    }
    EXPECT_NEAR(by_counts, base, 1e-12);
    EXPECT_NEAR(oracle::walk_sum(g, v), base, 1e-12);
    ++checked;
  }
  EXPECT_GT(checked, 100);
}

}  // namespace
