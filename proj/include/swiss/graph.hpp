// Weighted digraph of a discrete-time switched system, walks on it, and the
// contractivity functional Xi.
//
// Vertices are subsystems carrying a Lyapunov rate lambda (< 1 for ISS
// subsystems, > 1 otherwise). Edges are admissible switches carrying the
// Lyapunov comparison factor mu; a self-loop means the subsystem may stay
// active for consecutive steps and always has mu = 1.

#ifndef SWISS_GRAPH_HPP_
#define SWISS_GRAPH_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace swiss {

using VertexId = int;
using EdgeKey = std::pair<VertexId, VertexId>;

/// Edge -> traversal count. Ordered by (from, to).
using EdgeMultiplicity = std::map<EdgeKey, std::size_t>;

/// Default strictness margin for "Xi < 0".
inline constexpr double kDefaultContractivityMargin = 1e-9;

enum class StabilityClass { kStable, kUnstable };

inline const char* to_string(StabilityClass c) {
  return c == StabilityClass::kStable ? "stable" : "unstable";
}

struct SubsystemNode {
  VertexId id = 0;
  double lambda = 0.0;
  StabilityClass cls = StabilityClass::kStable;

  friend bool operator==(const SubsystemNode&, const SubsystemNode&) = default;
};

struct TransitionEdge {
  VertexId from = 0;
  VertexId to = 0;
  double mu = 1.0;

  EdgeKey key() const { return {from, to}; }
  bool is_self_loop() const { return from == to; }

  friend bool operator==(const TransitionEdge&, const TransitionEdge&) = default;
};

class GraphError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Validated, immutable digraph. Nodes are stored sorted by id and edges by
/// (from, to); every iteration over the graph follows that order.
class SwitchedDigraph {
 public:
  SwitchedDigraph(std::vector<SubsystemNode> nodes,
                  std::vector<TransitionEdge> edges)
      : nodes_(std::move(nodes)), edges_(std::move(edges)) {
    if (nodes_.empty()) throw GraphError("digraph needs at least one node");
    std::sort(nodes_.begin(), nodes_.end(),
              [](const auto& a, const auto& b) { return a.id < b.id; });
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      const SubsystemNode& n = nodes_[i];
      if (i > 0 && nodes_[i - 1].id == n.id) {
        throw GraphError("duplicate node id " + std::to_string(n.id));
      }
      if (!std::isfinite(n.lambda) || n.lambda <= 0.0) {
        throw GraphError("node " + std::to_string(n.id) +
                         ": lambda must be positive and finite");
      }
      if (n.lambda == 1.0) {
        throw GraphError("node " + std::to_string(n.id) +
                         ": lambda = 1 is neither stable nor unstable");
      }
      const bool stable = n.lambda < 1.0;
      if (stable != (n.cls == StabilityClass::kStable)) {
        throw GraphError("node " + std::to_string(n.id) + ": lambda " +
                         format_double(n.lambda) + " contradicts class " +
                         to_string(n.cls));
      }
    }

    std::sort(edges_.begin(), edges_.end(),
              [](const auto& a, const auto& b) { return a.key() < b.key(); });
    out_.assign(nodes_.size(), {});
    for (std::size_t e = 0; e < edges_.size(); ++e) {
      const TransitionEdge& edge = edges_[e];
      if (!has_node(edge.from) || !has_node(edge.to)) {
        throw GraphError("edge (" + std::to_string(edge.from) + "," +
                         std::to_string(edge.to) +
                         ") references an undeclared node");
      }
      if (e > 0 && edges_[e - 1].key() == edge.key()) {
        throw GraphError("duplicate edge (" + std::to_string(edge.from) + "," +
                         std::to_string(edge.to) + ")");
      }
      if (!std::isfinite(edge.mu) || edge.mu <= 0.0) {
        throw GraphError("edge (" + std::to_string(edge.from) + "," +
                         std::to_string(edge.to) +
                         "): mu must be positive and finite");
      }
      if (edge.is_self_loop() && edge.mu != 1.0) {
        throw GraphError("self-loop at " + std::to_string(edge.from) +
                         " must have mu = 1");
      }
      out_[index_of(edge.from)].push_back(e);
    }
  }

  std::size_t num_nodes() const { return nodes_.size(); }
  std::size_t num_edges() const { return edges_.size(); }
  std::span<const SubsystemNode> nodes() const { return nodes_; }
  std::span<const TransitionEdge> edges() const { return edges_; }

  bool has_node(VertexId id) const { return find_node(id) != nodes_.end(); }

  /// Position of `id` in nodes().
  std::size_t index_of(VertexId id) const {
    auto it = find_node(id);
    if (it == nodes_.end()) {
      throw GraphError("unknown node " + std::to_string(id));
    }
    return static_cast<std::size_t>(it - nodes_.begin());
  }

  const SubsystemNode& node(VertexId id) const { return nodes_[index_of(id)]; }

  bool is_stable(VertexId id) const {
    return node(id).cls == StabilityClass::kStable;
  }

  bool has_edge(VertexId from, VertexId to) const {
    return find_edge(from, to) != edges_.end();
  }

  const TransitionEdge& edge(VertexId from, VertexId to) const {
    auto it = find_edge(from, to);
    if (it == edges_.end()) {
      throw GraphError("missing edge (" + std::to_string(from) + "," +
                       std::to_string(to) + ")");
    }
    return *it;
  }

  /// Indices into edges() of the edges leaving the node at `node_index`,
  /// ordered by target id.
  std::span<const std::size_t> out_edges(std::size_t node_index) const {
    return out_[node_index];
  }

  /// ln mu(from,to) - |ln lambda_from| for a stable source,
  /// ln mu(from,to) + |ln lambda_from| for an unstable one.
  double weight(VertexId from, VertexId to) const {
    return weight_of(edge(from, to));
  }

  double weight_of(const TransitionEdge& e) const {
    const SubsystemNode& src = node(e.from);
    const double vertex = std::abs(std::log(src.lambda));
    const double sign = src.cls == StabilityClass::kStable ? -1.0 : 1.0;
    return std::log(e.mu) + sign * vertex;
  }

 private:
  static std::string format_double(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
  }

  std::vector<SubsystemNode>::const_iterator find_node(VertexId id) const {
    auto it = std::lower_bound(
        nodes_.begin(), nodes_.end(), id,
        [](const SubsystemNode& n, VertexId v) { return n.id < v; });
    return (it != nodes_.end() && it->id == id) ? it : nodes_.end();
  }

  std::vector<TransitionEdge>::const_iterator find_edge(VertexId from,
                                                        VertexId to) const {
    const EdgeKey key{from, to};
    auto it = std::lower_bound(
        edges_.begin(), edges_.end(), key,
        [](const TransitionEdge& e, const EdgeKey& k) { return e.key() < k; });
    return (it != edges_.end() && it->key() == key) ? it : edges_.end();
  }

  std::vector<SubsystemNode> nodes_;
  std::vector<TransitionEdge> edges_;
  std::vector<std::vector<std::size_t>> out_;
};

inline SwitchedDigraph build_digraph(std::vector<SubsystemNode> nodes,
                                     std::vector<TransitionEdge> edges) {
  return SwitchedDigraph(std::move(nodes), std::move(edges));
}

inline double edge_weight(const SwitchedDigraph& g, VertexId from,
                          VertexId to) {
  return g.weight(from, to);
}

/// A walk stored as its vertex sequence v0, ..., v_l. Edges are implied by
/// consecutive pairs since the digraph has at most one edge per ordered pair.
class Walk {
 public:
  explicit Walk(std::vector<VertexId> vertices)
      : vertices_(std::move(vertices)) {
    if (vertices_.empty()) {
      throw std::invalid_argument("a walk has at least one vertex");
    }
  }

  std::span<const VertexId> vertices() const { return vertices_; }
  VertexId front() const { return vertices_.front(); }
  VertexId back() const { return vertices_.back(); }
  VertexId operator[](std::size_t i) const { return vertices_[i]; }

  /// Number of edges.
  std::size_t length() const { return vertices_.size() - 1; }
  bool closed() const { return length() >= 1 && front() == back(); }

  std::size_t edge_count(VertexId from, VertexId to) const {
    std::size_t n = 0;
    for (std::size_t i = 0; i + 1 < vertices_.size(); ++i) {
      if (vertices_[i] == from && vertices_[i + 1] == to) ++n;
    }
    return n;
  }

  EdgeMultiplicity edge_counts() const {
    EdgeMultiplicity counts;
    for (std::size_t i = 0; i + 1 < vertices_.size(); ++i) {
      ++counts[{vertices_[i], vertices_[i + 1]}];
    }
    return counts;
  }

  /// Throws GraphError naming the first vertex or edge not in `g`.
  void validate(const SwitchedDigraph& g) const {
    for (VertexId v : vertices_) {
      if (!g.has_node(v)) {
        throw GraphError("walk visits unknown node " + std::to_string(v));
      }
    }
    for (std::size_t i = 0; i + 1 < vertices_.size(); ++i) {
      if (!g.has_edge(vertices_[i], vertices_[i + 1])) {
        throw GraphError("walk uses missing edge (" +
                         std::to_string(vertices_[i]) + "," +
                         std::to_string(vertices_[i + 1]) + ")");
      }
    }
  }

  std::string to_string() const {
    std::string s;
    for (std::size_t i = 0; i < vertices_.size(); ++i) {
      if (i > 0) s += ",";
      s += std::to_string(vertices_[i]);
    }
    return s;
  }

  friend bool operator==(const Walk&, const Walk&) = default;

 private:
  std::vector<VertexId> vertices_;
};

/// Sum of edge weights along the walk, counting repetitions. The weight of
/// the final vertex is not included.
inline double xi(const SwitchedDigraph& g, const Walk& w) {
  if (w.length() == 0) throw std::invalid_argument("xi of an empty walk");
  w.validate(g);
  double total = 0.0;
  const auto v = w.vertices();
  for (std::size_t i = 0; i + 1 < v.size(); ++i) total += g.weight(v[i], v[i + 1]);
  return total;
}

inline bool is_contractive(const SwitchedDigraph& g, const Walk& w,
                           double margin = kDefaultContractivityMargin) {
  if (!w.closed()) {
    throw std::invalid_argument("contractivity is defined for closed walks");
  }
  return xi(g, w) < -margin;
}

/// Closed walk that starts at v_(k mod |w|) and follows the same cyclic edge
/// sequence.
inline Walk rotate(const Walk& w, std::size_t k) {
  if (!w.closed()) throw std::invalid_argument("rotate needs a closed walk");
  const std::size_t n = w.length();
  const std::size_t start = k % n;
  std::vector<VertexId> out;
  out.reserve(n + 1);
  for (std::size_t i = 0; i <= n; ++i) out.push_back(w[(start + i) % n]);
  return Walk(std::move(out));
}

inline Walk concat(const Walk& a, const Walk& b) {
  if (a.back() != b.front()) {
    throw std::invalid_argument("concat: walk ends at " +
                                std::to_string(a.back()) +
                                " but next starts at " +
                                std::to_string(b.front()));
  }
  std::vector<VertexId> out(a.vertices().begin(), a.vertices().end());
  out.insert(out.end(), b.vertices().begin() + 1, b.vertices().end());
  return Walk(std::move(out));
}

}  // namespace swiss

#endif  // SWISS_GRAPH_HPP_
