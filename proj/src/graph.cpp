#include "netdet/graph.hpp"

#include <algorithm>
#include <deque>
#include <string>

namespace netdet {

namespace {

std::string pair_str(Index u, Index v) {
  return "(" + std::to_string(u) + "," + std::to_string(v) + ")";
}

std::vector<Index> bfs_distances(const Graph& g, Index source) {
  std::vector<Index> dist(static_cast<std::size_t>(g.order()), -1);
  std::deque<Index> queue{source};
  dist[static_cast<std::size_t>(source)] = 0;
  while (!queue.empty()) {
    const Index u = queue.front();
    queue.pop_front();
    for (Index w : g.neighbors(u)) {
      auto& d = dist[static_cast<std::size_t>(w)];
      if (d < 0) {
        d = dist[static_cast<std::size_t>(u)] + 1;
        queue.push_back(w);
      }
    }
  }
  return dist;
}

}  // namespace

Graph::Graph(Index n, std::span<const VertexPair> edges) : n_(n) {
  if (n < 0) throw ValidationError("vertex count must be nonnegative");
  edges_.reserve(edges.size());
  for (const auto& [u, v] : edges) {
    if (u < 0 || v < 0 || u >= n || v >= n) {
      throw ValidationError("edge " + pair_str(u, v) + " has a vertex index outside [0," +
                            std::to_string(n) + ")");
    }
    if (u == v) throw ValidationError("edge " + pair_str(u, v) + " is a self-loop");
    edges_.emplace_back(std::min(u, v), std::max(u, v));
  }
  std::sort(edges_.begin(), edges_.end());
  edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());

  adj_.assign(static_cast<std::size_t>(n), {});
  for (const auto& [u, v] : edges_) {
    adj_[static_cast<std::size_t>(u)].push_back(v);
    adj_[static_cast<std::size_t>(v)].push_back(u);
  }
  for (auto& nb : adj_) std::sort(nb.begin(), nb.end());
}

bool Graph::has_edge(Index u, Index v) const { return edge_index(u, v) >= 0; }

Index Graph::edge_index(Index u, Index v) const {
  const VertexPair key{std::min(u, v), std::max(u, v)};
  auto it = std::lower_bound(edges_.begin(), edges_.end(), key);
  if (it == edges_.end() || *it != key) return -1;
  return static_cast<Index>(it - edges_.begin());
}

Graph build_graph(Index n, std::span<const VertexPair> edges) { return Graph(n, edges); }

Orientation Orientation::ascending(const Graph& g) { return Orientation{g.edges()}; }

std::vector<std::vector<Index>> connected_components(const Graph& g) {
  std::vector<std::vector<Index>> parts;
  std::vector<bool> seen(static_cast<std::size_t>(g.order()), false);
  for (Index s = 0; s < g.order(); ++s) {
    if (seen[static_cast<std::size_t>(s)]) continue;
    std::vector<Index> part{s};
    seen[static_cast<std::size_t>(s)] = true;
    for (std::size_t head = 0; head < part.size(); ++head) {
      for (Index w : g.neighbors(part[head])) {
        if (!seen[static_cast<std::size_t>(w)]) {
          seen[static_cast<std::size_t>(w)] = true;
          part.push_back(w);
        }
      }
    }
    std::sort(part.begin(), part.end());
    parts.push_back(std::move(part));
  }
  return parts;
}

bool is_connected(const Graph& g) { return connected_components(g).size() == 1; }

bool induced_subgraph_connected(const Graph& g, std::span<const Index> vertices) {
  if (vertices.empty()) return false;
  std::vector<char> inside(static_cast<std::size_t>(g.order()), 0);
  for (Index v : vertices) inside[static_cast<std::size_t>(v)] = 1;

  std::vector<Index> stack{vertices.front()};
  inside[static_cast<std::size_t>(vertices.front())] = 2;
  std::size_t reached = 1;
  while (!stack.empty()) {
    const Index u = stack.back();
    stack.pop_back();
    for (Index w : g.neighbors(u)) {
      if (inside[static_cast<std::size_t>(w)] == 1) {
        inside[static_cast<std::size_t>(w)] = 2;
        ++reached;
        stack.push_back(w);
      }
    }
  }
  const auto distinct = static_cast<std::size_t>(
      std::count_if(inside.begin(), inside.end(), [](char c) { return c != 0; }));
  return reached == distinct;
}

Index diameter(const Graph& g) {
  Index best = 0;
  for (Index s = 0; s < g.order(); ++s) {
    for (Index d : bfs_distances(g, s)) {
      if (d < 0) throw ValidationError("diameter is undefined for a disconnected graph");
      best = std::max(best, d);
    }
  }
  return best;
}

TrackGraph::TrackGraph(Index n, double horizon, std::vector<Track> tracks)
    : n_(n), horizon_(horizon), tracks_(std::move(tracks)) {
  if (n < 0) throw ValidationError("vertex count must be nonnegative");
  if (!(horizon > 0.0)) throw ValidationError("track horizon must be positive");
  for (const auto& t : tracks_) {
    const std::string tag = "track " + std::to_string(t.id);
    if (t.src < 0 || t.dst < 0 || t.src >= n || t.dst >= n) {
      throw ValidationError(tag + " references a vertex outside [0," + std::to_string(n) + ")");
    }
    if (t.src == t.dst) throw ValidationError(tag + " has identical source and destination");
    if (!(t.depart <= t.arrive)) throw ValidationError(tag + " departs after it arrives");
    if (t.depart < 0.0 || t.arrive > horizon) {
      throw ValidationError(tag + " lies outside the horizon [0," + std::to_string(horizon) + "]");
    }
  }
}

Eigen::VectorXd TrackGraph::incident_counts() const {
  Eigen::VectorXd w = Eigen::VectorXd::Zero(n_);
  for (const auto& t : tracks_) {
    w(t.src) += 1.0;
    w(t.dst) += 1.0;
  }
  return w;
}

Graph TrackGraph::static_graph() const {
  std::vector<VertexPair> edges;
  edges.reserve(tracks_.size());
  for (const auto& t : tracks_) edges.emplace_back(t.src, t.dst);
  return Graph(n_, edges);
}

}  // namespace netdet
