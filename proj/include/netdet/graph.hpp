#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "netdet/error.hpp"

namespace netdet {

using Index = Eigen::Index;
using VertexPair = std::pair<Index, Index>;

/// Simple undirected graph on vertices 0..n-1. Edges are stored as sorted
/// (lo, hi) pairs with lo < hi, without duplicates.
class Graph {
 public:
  Graph() = default;

  /// Throws ValidationError naming the offending edge on a self-loop or an
  /// out-of-range index. Duplicate edges collapse.
  Graph(Index n, std::span<const VertexPair> edges);

  Index order() const noexcept { return n_; }
  Index size() const noexcept { return static_cast<Index>(edges_.size()); }
  const std::vector<VertexPair>& edges() const noexcept { return edges_; }
  const std::vector<Index>& neighbors(Index v) const { return adj_[static_cast<std::size_t>(v)]; }
  Index degree(Index v) const { return static_cast<Index>(neighbors(v).size()); }
  bool has_edge(Index u, Index v) const;

  /// Position of edge {u, v} in edges(), or -1.
  Index edge_index(Index u, Index v) const;

 private:
  Index n_ = 0;
  std::vector<VertexPair> edges_;
  std::vector<std::vector<Index>> adj_;
};

Graph build_graph(Index n, std::span<const VertexPair> edges);

/// Per-edge ordered (initial, terminal) pairs, one per edge of the graph.
struct Orientation {
  std::vector<VertexPair> arcs;

  /// Orient every edge from the lower to the higher vertex index.
  static Orientation ascending(const Graph& g);

  void flip(std::size_t e) { std::swap(arcs[e].first, arcs[e].second); }
};

// Matrix builders. Scalar may be an integer type for the {0, +-1} matrices,
// which makes the B B^T = D - A identity exact.

template <typename Scalar = double>
Eigen::SparseMatrix<Scalar> adjacency(const Graph& g) {
  std::vector<Eigen::Triplet<Scalar>> t;
  t.reserve(2 * static_cast<std::size_t>(g.size()));
  for (const auto& [u, v] : g.edges()) {
    t.emplace_back(u, v, Scalar(1));
    t.emplace_back(v, u, Scalar(1));
  }
  Eigen::SparseMatrix<Scalar> a(g.order(), g.order());
  a.setFromTriplets(t.begin(), t.end());
  return a;
}

template <typename Scalar = double>
Eigen::SparseMatrix<Scalar> degree(const Graph& g) {
  Eigen::SparseMatrix<Scalar> d(g.order(), g.order());
  d.reserve(Eigen::VectorXi::Constant(g.order(), 1));
  for (Index v = 0; v < g.order(); ++v) {
    if (g.degree(v) > 0) d.insert(v, v) = static_cast<Scalar>(g.degree(v));
  }
  d.makeCompressed();
  return d;
}

/// n x |E| matrix; column e is -1 at the initial and +1 at the terminal
/// vertex of the oriented edge e. Columns follow g.edges() order.
template <typename Scalar = double>
Eigen::SparseMatrix<Scalar> incidence(const Graph& g, const Orientation& o) {
  std::vector<int> covered(static_cast<std::size_t>(g.size()), 0);
  std::vector<Eigen::Triplet<Scalar>> t;
  t.reserve(2 * o.arcs.size());
  for (const auto& [from, to] : o.arcs) {
    const Index e = g.edge_index(from, to);
    if (e < 0 || from == to) {
      throw ValidationError("orientation arc (" + std::to_string(from) + "," + std::to_string(to) +
                            ") is not an edge of the graph");
    }
    if (covered[static_cast<std::size_t>(e)]++ > 0) {
      throw ValidationError("orientation lists edge (" + std::to_string(from) + "," +
                            std::to_string(to) + ") twice");
    }
    t.emplace_back(from, e, Scalar(-1));
    t.emplace_back(to, e, Scalar(1));
  }
  for (std::size_t e = 0; e < covered.size(); ++e) {
    if (covered[e] == 0) {
      const auto& [u, v] = g.edges()[e];
      throw ValidationError("orientation is missing edge (" + std::to_string(u) + "," +
                            std::to_string(v) + ")");
    }
  }
  Eigen::SparseMatrix<Scalar> b(g.order(), g.size());
  b.setFromTriplets(t.begin(), t.end());
  return b;
}

/// Q = D - A.
template <typename Scalar = double>
Eigen::SparseMatrix<Scalar> kirchhoff(const Graph& g) {
  Eigen::SparseMatrix<Scalar> q = degree<Scalar>(g) - adjacency<Scalar>(g);
  q.makeCompressed();
  return q;
}

/// L = I - D^{-1/2} A D^{-1/2}. Isolated vertices get an identity row.
template <typename Scalar = double>
Eigen::SparseMatrix<Scalar> normalized_laplacian(const Graph& g) {
  static_assert(std::is_floating_point_v<Scalar>);
  std::vector<Eigen::Triplet<Scalar>> t;
  t.reserve(static_cast<std::size_t>(g.order() + 2 * g.size()));
  for (Index v = 0; v < g.order(); ++v) t.emplace_back(v, v, Scalar(1));
  for (const auto& [u, v] : g.edges()) {
    const Scalar w = Scalar(-1) / std::sqrt(static_cast<Scalar>(g.degree(u) * g.degree(v)));
    t.emplace_back(u, v, w);
    t.emplace_back(v, u, w);
  }
  Eigen::SparseMatrix<Scalar> l(g.order(), g.order());
  l.setFromTriplets(t.begin(), t.end());
  return l;
}

/// Asymmetric Laplacian I - D^{-1} A. Isolated vertices get an identity row.
template <typename Scalar = double>
Eigen::SparseMatrix<Scalar> asymmetric_laplacian(const Graph& g) {
  static_assert(std::is_floating_point_v<Scalar>);
  std::vector<Eigen::Triplet<Scalar>> t;
  t.reserve(static_cast<std::size_t>(g.order() + 2 * g.size()));
  for (Index v = 0; v < g.order(); ++v) t.emplace_back(v, v, Scalar(1));
  for (const auto& [u, v] : g.edges()) {
    t.emplace_back(u, v, Scalar(-1) / static_cast<Scalar>(g.degree(u)));
    t.emplace_back(v, u, Scalar(-1) / static_cast<Scalar>(g.degree(v)));
  }
  Eigen::SparseMatrix<Scalar> l(g.order(), g.order());
  l.setFromTriplets(t.begin(), t.end());
  return l;
}

/// Vertex partition by reachability; components ordered by smallest member,
/// members ascending.
std::vector<std::vector<Index>> connected_components(const Graph& g);

bool is_connected(const Graph& g);

/// True when the subgraph induced by `vertices` is nonempty and connected.
bool induced_subgraph_connected(const Graph& g, std::span<const Index> vertices);

/// Longest shortest-path length; requires a connected graph.
Index diameter(const Graph& g);

/// Timestamped directed track between two vertices.
struct Track {
  std::int64_t id = 0;
  Index src = 0;
  Index dst = 0;
  double depart = 0.0;
  double arrive = 0.0;
};

/// Directed multigraph of timestamped tracks over a horizon [0, T].
class TrackGraph {
 public:
  TrackGraph() = default;

  /// Throws ValidationError on src == dst, depart > arrive, out-of-range
  /// vertices or times outside [0, horizon].
  TrackGraph(Index n, double horizon, std::vector<Track> tracks);

  Index order() const noexcept { return n_; }
  double horizon() const noexcept { return horizon_; }
  const std::vector<Track>& tracks() const noexcept { return tracks_; }

  /// Number of tracks incident to each vertex.
  Eigen::VectorXd incident_counts() const;

  /// Underlying simple graph: one undirected edge per connected vertex pair.
  Graph static_graph() const;

 private:
  Index n_ = 0;
  double horizon_ = 0.0;
  std::vector<Track> tracks_;
};

}  // namespace netdet
