#pragma once

// Test-only generators and reference computations. Nothing here calls the
// library's solvers, so it can serve as an independent oracle.

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "netdet/graph.hpp"
#include "netdet/threat.hpp"

namespace netdet::test {

inline Graph random_graph(std::mt19937_64& rng, Index n, double p) {
  std::bernoulli_distribution coin(p);
  std::vector<VertexPair> edges;
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      if (coin(rng)) edges.emplace_back(i, j);
    }
  }
  return Graph(n, edges);
}

/// Random connected graph: a random spanning tree plus extra edges.
inline Graph random_connected_graph(std::mt19937_64& rng, Index n, double p) {
  std::vector<VertexPair> edges;
  for (Index v = 1; v < n; ++v) {
    std::uniform_int_distribution<Index> parent(0, v - 1);
    edges.emplace_back(parent(rng), v);
  }
  std::bernoulli_distribution coin(p);
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      if (coin(rng)) edges.emplace_back(i, j);
    }
  }
  return Graph(n, edges);
}

/// Eigenvalues within 1e-9 of zero, via a dense symmetric eigensolve.
inline Index zero_multiplicity(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  return (es.eigenvalues().array().abs() <= 1e-9).count();
}

/// Trapezoid ROC area by brute force: every distinct score as a threshold.
inline double brute_force_auc(const std::vector<double>& scores, const std::vector<int>& labels) {
  std::vector<double> thresholds(scores);
  std::sort(thresholds.begin(), thresholds.end(), std::greater<>());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());
  double pos = 0, neg = 0;
  for (int l : labels) (l ? pos : neg) += 1;
  double area = 0, last_x = 0, last_y = 0;
  for (double th : thresholds) {
    double tp = 0, fp = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
      if (scores[i] >= th) (labels[i] ? tp : fp) += 1;
    }
    const double x = fp / neg, y = tp / pos;
    area += (x - last_x) * (y + last_y) / 2;
    last_x = x;
    last_y = y;
  }
  return area;
}

/// Dense space-time adjacency built straight from the track list.
inline Eigen::MatrixXd dense_adjacency(const std::vector<Track>& tracks, Index n, const TimeGrid& grid, double rate) {
  const Index nt = grid.bins();
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n * nt, n * nt);
  for (const auto& t : tracks) {
    const Index bu = grid.bin_of(t.depart), bv = grid.bin_of(t.arrive);
    for (Index k = 0; k < nt; ++k) {
      const double c = (static_cast<double>(k) + 0.5) * grid.horizon() / static_cast<double>(nt);
      a(t.dst * nt + k, t.src * nt + bu) += std::exp(-rate * std::abs(c - t.arrive));
      a(t.src * nt + k, t.dst * nt + bv) += std::exp(-rate * std::abs(c - t.depart));
    }
  }
  return a;
}

/// Reference harmonic solution: full interior system by complete orthogonal
/// decomposition, rows scaled by max(incident tracks, row sum).
inline Eigen::VectorXd oracle_theta(const std::vector<Track>& tracks, Index n, const TimeGrid& grid, double rate,
                                    const std::vector<Index>& cued, const Eigen::VectorXd& boundary) {
  const Index nt = grid.bins();
  Eigen::MatrixXd p = dense_adjacency(tracks, n, grid, rate);
  Eigen::VectorXd w = Eigen::VectorXd::Zero(n);
  for (const auto& t : tracks) {
    w(t.src) += 1;
    w(t.dst) += 1;
  }
  for (Index r = 0; r < n * nt; ++r) {
    const double s = p.row(r).sum();
    if (s > 0) p.row(r) /= std::max(w(r / nt), s);
  }
  std::vector<char> is_b(static_cast<std::size_t>(n), 0);
  for (Index v : cued) is_b[static_cast<std::size_t>(v)] = 1;
  std::vector<Index> in, bd;
  for (Index v = 0; v < n; ++v) {
    for (Index k = 0; k < nt; ++k) (is_b[static_cast<std::size_t>(v)] ? bd : in).push_back(v * nt + k);
  }
  const auto ni = static_cast<Index>(in.size()), nb = static_cast<Index>(bd.size());
  Eigen::MatrixXd lii = Eigen::MatrixXd::Identity(ni, ni), pib(ni, nb);
  for (Index r = 0; r < ni; ++r) {
    for (Index c = 0; c < ni; ++c) lii(r, c) -= p(in[r], in[c]);
    for (Index c = 0; c < nb; ++c) pib(r, c) = p(in[r], bd[c]);
  }
  const Eigen::VectorXd xi = lii.completeOrthogonalDecomposition().solve(pib * boundary);
  Eigen::VectorXd theta(n * nt);
  for (Index r = 0; r < ni; ++r) theta(in[r]) = xi(r);
  for (Index c = 0; c < nb; ++c) theta(bd[c]) = boundary(c);
  return theta;
}

inline std::vector<Track> random_tracks(std::mt19937_64& rng, Index n, Index count, double horizon) {
  std::uniform_int_distribution<Index> vertex(0, n - 1);
  std::uniform_real_distribution<double> time(0.0, horizon);
  std::vector<Track> out;
  for (Index i = 0; i < count; ++i) {
    const Index u = vertex(rng);
    Index v = vertex(rng);
    while (v == u) v = vertex(rng);
    double a = time(rng), b = time(rng);
    if (a > b) std::swap(a, b);
    out.push_back({i, u, v, a, b});
  }
  return out;
}

}  // namespace netdet::test
