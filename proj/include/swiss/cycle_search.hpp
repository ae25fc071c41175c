// Detection and construction of contractive cycles and circuits.
//
// A closed contractive walk exists iff a contractive circuit exists iff a
// contractive cycle exists, so synthesis reduces to negative-cycle search
// under the Xi edge weights.

#ifndef SWISS_CYCLE_SEARCH_HPP_
#define SWISS_CYCLE_SEARCH_HPP_

#include <algorithm>
#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "swiss/graph.hpp"

namespace swiss {

struct CycleReport {
  Walk cycle;  // simple: only first == last repeats
  double xi_value = 0.0;
  double mean_weight = 0.0;
};

struct CirculationCheck {
  bool conserved = false;
  double xi_total = 0.0;
};

namespace detail {

// Rotates a closed simple cycle so that it starts at its smallest vertex.
inline Walk canonical_cycle(const std::vector<VertexId>& body) {
  auto min_it = std::min_element(body.begin(), body.end());
  std::vector<VertexId> out(min_it, body.end());
  out.insert(out.end(), body.begin(), min_it);
  out.push_back(out.front());
  return Walk(std::move(out));
}

inline CycleReport make_report(const SwitchedDigraph& g, Walk cycle) {
  const double x = xi(g, cycle);
  const double len = static_cast<double>(cycle.length());
  return CycleReport{std::move(cycle), x, x / len};
}

// Splits a vertex sequence (consecutive pairs are edges) into its simple
// cycles in order of closure and returns the one with the smallest mean.
inline std::optional<CycleReport> best_cycle_on_path(
    const SwitchedDigraph& g, const std::vector<VertexId>& path) {
  std::optional<CycleReport> best;
  std::vector<VertexId> stack;
  std::map<VertexId, std::size_t> pos;
  for (VertexId v : path) {
    auto it = pos.find(v);
    if (it != pos.end()) {
      std::vector<VertexId> body(stack.begin() + static_cast<long>(it->second),
                                 stack.end());
      CycleReport r = make_report(g, canonical_cycle(body));
      if (!best || r.mean_weight < best->mean_weight) best = std::move(r);
      for (std::size_t i = it->second; i < stack.size(); ++i) pos.erase(stack[i]);
      stack.resize(it->second);
    }
    pos[v] = stack.size();
    stack.push_back(v);
  }
  return best;
}

}  // namespace detail

/// Minimum mean-weight cycle (Karp). Empty iff the digraph is acyclic. A
/// non-negative mean_weight certifies that no contractive cycle exists.
inline std::optional<CycleReport> min_mean_cycle(const SwitchedDigraph& g) {
  const std::size_t n = g.num_nodes();
  constexpr double kInf = std::numeric_limits<double>::infinity();
  // dist[k][v]: lightest walk with exactly k edges ending at v, from any start.
  std::vector<std::vector<double>> dist(n + 1, std::vector<double>(n, kInf));
  std::vector<std::vector<std::size_t>> parent(
      n + 1, std::vector<std::size_t>(n, n));
  std::fill(dist[0].begin(), dist[0].end(), 0.0);

  const auto edges = g.edges();
  std::vector<double> weight(edges.size());
  std::vector<std::size_t> src(edges.size()), dst(edges.size());
  for (std::size_t e = 0; e < edges.size(); ++e) {
    weight[e] = g.weight_of(edges[e]);
    src[e] = g.index_of(edges[e].from);
    dst[e] = g.index_of(edges[e].to);
  }

  for (std::size_t k = 1; k <= n; ++k) {
    for (std::size_t e = 0; e < edges.size(); ++e) {
      if (dist[k - 1][src[e]] == kInf) continue;
      const double cand = dist[k - 1][src[e]] + weight[e];
      if (cand < dist[k][dst[e]]) {
        dist[k][dst[e]] = cand;
        parent[k][dst[e]] = src[e];
      }
    }
  }

  std::optional<std::size_t> best_v;
  double best_mean = kInf;
  for (std::size_t v = 0; v < n; ++v) {
    if (dist[n][v] == kInf) continue;
    double worst = -kInf;
    for (std::size_t k = 0; k < n; ++k) {
      if (dist[k][v] == kInf) continue;
      worst = std::max(worst, (dist[n][v] - dist[k][v]) /
                                  static_cast<double>(n - k));
    }
    if (worst < best_mean) {
      best_mean = worst;
      best_v = v;
    }
  }
  if (!best_v) return std::nullopt;

  // Every cycle on the critical n-edge walk has the optimal mean.
  std::vector<VertexId> path(n + 1);
  std::size_t v = *best_v;
  for (std::size_t k = n + 1; k-- > 0;) {
    path[k] = g.nodes()[v].id;
    if (k > 0) v = parent[k][v];
  }
  return detail::best_cycle_on_path(g, path);
}

/// Some simple cycle with Xi < -margin, or empty if Bellman-Ford finds no
/// negative cycle. The returned cycle starts at its smallest vertex id.
inline std::optional<CycleReport> find_negative_cycle(
    const SwitchedDigraph& g, double margin = kDefaultContractivityMargin) {
  const std::size_t n = g.num_nodes();
  const auto edges = g.edges();
  std::vector<double> weight(edges.size());
  std::vector<std::size_t> src(edges.size()), dst(edges.size());
  for (std::size_t e = 0; e < edges.size(); ++e) {
    weight[e] = g.weight_of(edges[e]);
    src[e] = g.index_of(edges[e].from);
    dst[e] = g.index_of(edges[e].to);
  }

  // Virtual super-source with zero-weight edges to every vertex.
  std::vector<double> dist(n, 0.0);
  std::vector<std::size_t> parent(n, n);
  std::optional<std::size_t> relaxed;
  for (std::size_t round = 1; round <= n; ++round) {
    relaxed.reset();
    for (std::size_t e = 0; e < edges.size(); ++e) {
      const double cand = dist[src[e]] + weight[e];
      if (cand < dist[dst[e]]) {
        dist[dst[e]] = cand;
        parent[dst[e]] = src[e];
        if (!relaxed) relaxed = dst[e];
      }
    }
    if (!relaxed) return std::nullopt;
  }

  std::size_t v = *relaxed;
  for (std::size_t i = 0; i < n; ++i) v = parent[v];
  std::vector<VertexId> reversed{g.nodes()[v].id};
  for (std::size_t u = parent[v]; u != v; u = parent[u]) {
    reversed.push_back(g.nodes()[u].id);
  }
  std::vector<VertexId> body(reversed.rbegin(), reversed.rend());
  CycleReport report = detail::make_report(g, detail::canonical_cycle(body));
  if (report.xi_value < -margin) return report;

  // Rounding can leave a near-zero cycle in the parent graph.
  auto karp = min_mean_cycle(g);
  if (karp && karp->xi_value < -margin) return karp;
  return std::nullopt;
}

/// Flow conservation and total Xi of an edge multiset.
inline CirculationCheck check_circulation(const SwitchedDigraph& g,
                                          const EdgeMultiplicity& m) {
  std::map<VertexId, long long> balance;
  double total = 0.0;
  for (const auto& [key, count] : m) {
    if (!g.has_edge(key.first, key.second)) {
      throw GraphError("multiplicity on missing edge (" +
                       std::to_string(key.first) + "," +
                       std::to_string(key.second) + ")");
    }
    balance[key.first] -= static_cast<long long>(count);
    balance[key.second] += static_cast<long long>(count);
    total += g.weight(key.first, key.second) * static_cast<double>(count);
  }
  const bool conserved = std::all_of(balance.begin(), balance.end(),
                                     [](const auto& b) { return b.second == 0; });
  return {conserved, total};
}

/// Hierholzer: a closed walk using each edge exactly m(edge) times. Starts at
/// the smallest active vertex, always leaves through the smallest-id target,
/// and splices sub-tours at the earliest vertex with unused edges.
inline Walk assemble_circuit(const SwitchedDigraph& g,
                             const EdgeMultiplicity& m) {
  if (!check_circulation(g, m).conserved) {
    throw std::invalid_argument("edge multiplicities are not conserved");
  }
  std::map<VertexId, std::map<VertexId, std::size_t>> remaining;
  std::size_t total = 0;
  for (const auto& [key, count] : m) {
    if (count == 0) continue;
    remaining[key.first][key.second] = count;
    total += count;
  }
  if (total == 0) throw std::invalid_argument("edge multiplicities are all zero");

  auto has_unused = [&](VertexId v) {
    auto it = remaining.find(v);
    return it != remaining.end() && !it->second.empty();
  };
  auto take = [&](VertexId v) {
    auto& out = remaining[v];
    auto it = out.begin();
    const VertexId next = it->first;
    if (--it->second == 0) out.erase(it);
    return next;
  };
  auto tour_from = [&](VertexId start) {
    std::vector<VertexId> tour{start};
    VertexId v = start;
    while (has_unused(v)) {
      v = take(v);
      tour.push_back(v);
    }
    return tour;
  };

  std::vector<VertexId> circuit = tour_from(remaining.begin()->first);
  for (std::size_t i = 0; i < circuit.size(); ++i) {
    if (!has_unused(circuit[i])) continue;
    std::vector<VertexId> sub = tour_from(circuit[i]);
    circuit.insert(circuit.begin() + static_cast<long>(i) + 1, sub.begin() + 1,
                   sub.end());
  }
  if (circuit.size() - 1 != total) {
    throw std::invalid_argument("edge multiplicities have disconnected support");
  }
  return Walk(std::move(circuit));
}

/// A contractive cycle, viewed as a circuit, or empty if none exists.
inline std::optional<Walk> find_contractive_circuit(
    const SwitchedDigraph& g, double margin = kDefaultContractivityMargin) {
  auto r = find_negative_cycle(g, margin);
  if (!r) return std::nullopt;
  return r->cycle;
}

}  // namespace swiss

#endif  // SWISS_CYCLE_SEARCH_HPP_
