#include "netdet/threat.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <iostream>
#include <limits>
#include <string>

#include <Eigen/IterativeLinearSolvers>

namespace netdet {

TimeGrid::TimeGrid(double horizon, Index bins) : horizon_(horizon), bins_(bins) {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw ValidationError("time grid horizon must be positive");
  if (bins < 1) throw ValidationError("time grid needs at least one bin");
}

Index TimeGrid::bin_of(double t) const noexcept {
  const auto k = static_cast<Index>(std::floor(t / width()));
  return std::clamp<Index>(k, 0, bins_ - 1);
}

ThreatKernelParams ThreatKernelParams::uniform(Index n, double rate) {
  if (!(rate > 0.0)) throw ValidationError("threat kernel rate must be positive");
  return {Eigen::VectorXd::Constant(n, rate)};
}

ThreatKernelParams ThreatKernelParams::default_for(Index n, double horizon) {
  return uniform(n, 4.0 / horizon);
}

bool SpaceTimeSystem::is_boundary_vertex(Index v) const {
  return std::binary_search(boundary_vertices.begin(), boundary_vertices.end(), v);
}

std::vector<Index> SpaceTimeSystem::boundary_indices() const {
  std::vector<Index> out;
  out.reserve(boundary_vertices.size() * static_cast<std::size_t>(bins));
  for (Index v : boundary_vertices) {
    for (Index k = 0; k < bins; ++k) out.push_back(index(v, k));
  }
  return out;
}

std::vector<Index> SpaceTimeSystem::interior_indices() const {
  std::vector<Index> out;
  out.reserve(static_cast<std::size_t>(unknowns()));
  for (Index v = 0; v < vertices; ++v) {
    if (is_boundary_vertex(v)) continue;
    for (Index k = 0; k < bins; ++k) out.push_back(index(v, k));
  }
  return out;
}

Eigen::SparseMatrix<double, Eigen::RowMajor> transition_matrix(const SpaceTimeSystem& sys) {
  Eigen::SparseMatrix<double, Eigen::RowMajor> p = sys.adjacency;
  for (Index row = 0; row < p.outerSize(); ++row) {
    double sum = 0.0;
    for (decltype(p)::InnerIterator it(p, row); it; ++it) sum += it.value();
    if (sum <= 0.0) continue;
    const double divisor = std::max(sys.weights(row / sys.bins), sum);
    for (decltype(p)::InnerIterator it(p, row); it; ++it) it.valueRef() /= divisor;
  }
  return p;
}

Eigen::SparseMatrix<double, Eigen::RowMajor> spacetime_laplacian(const SpaceTimeSystem& sys) {
  Eigen::SparseMatrix<double, Eigen::RowMajor> eye(sys.unknowns(), sys.unknowns());
  eye.setIdentity();
  Eigen::SparseMatrix<double, Eigen::RowMajor> l = eye - transition_matrix(sys);
  l.makeCompressed();
  return l;
}

namespace {

std::vector<Index> sorted_cue_vertices(std::span<const Cue> cues) {
  std::vector<Index> vs;
  for (const auto& c : cues) vs.push_back(c.vertex);
  std::sort(vs.begin(), vs.end());
  vs.erase(std::unique(vs.begin(), vs.end()), vs.end());
  return vs;
}

void check_cues(std::span<const Cue> cues, Index n, double horizon) {
  for (const auto& c : cues) {
    if (c.vertex < 0 || c.vertex >= n) {
      throw ValidationError("cue on unknown vertex " + std::to_string(c.vertex));
    }
    if (!(c.time >= 0.0 && c.time <= horizon)) {
      throw ValidationError("cue time " + std::to_string(c.time) + " lies outside the horizon");
    }
    if (!(c.value >= 0.0 && c.value <= 1.0)) {
      throw ValidationError("cue value " + std::to_string(c.value) + " is not a probability");
    }
  }
}

}  // namespace

SpaceTimeSystem build_spacetime_system(const TrackGraph& tracks, const TimeGrid& grid,
                                       const ThreatKernelParams& kernel, std::span<const Cue> cues) {
  const Index n = tracks.order();
  const Index nt = grid.bins();
  if (kernel.rates.size() != n) throw ValidationError("kernel rate vector length must equal vertex count");
  if (n > 0 && !(kernel.rates.minCoeff() > 0.0)) throw ValidationError("kernel rates must be positive");
  if (grid.horizon() < tracks.horizon()) throw ValidationError("time grid is shorter than the track horizon");
  check_cues(cues, n, grid.horizon());

  if (tracks.tracks().empty()) std::cerr << "warning: empty track list; space-time adjacency is zero\n";

  SpaceTimeSystem sys;
  sys.vertices = n;
  sys.bins = nt;
  sys.weights = tracks.incident_counts();
  sys.boundary_vertices = sorted_cue_vertices(cues);

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(tracks.tracks().size() * 2 * static_cast<std::size_t>(nt));
  for (const auto& t : tracks.tracks()) {
    const Index col_src = sys.index(t.src, grid.bin_of(t.depart));
    const Index col_dst = sys.index(t.dst, grid.bin_of(t.arrive));
    const double rate_src = kernel.rates(t.src);
    const double rate_dst = kernel.rates(t.dst);
    for (Index k = 0; k < nt; ++k) {
      const double tk = grid.center(k);
      // Threat leaving src at departure reaches dst around the arrival time.
      trip.emplace_back(sys.index(t.dst, k), col_src, threat_kernel(rate_dst, tk - t.arrive));
      // Time-reversed: threat at dst on arrival reaches src around departure.
      trip.emplace_back(sys.index(t.src, k), col_dst, threat_kernel(rate_src, tk - t.depart));
    }
  }
  sys.adjacency.resize(sys.unknowns(), sys.unknowns());
  sys.adjacency.setFromTriplets(trip.begin(), trip.end());
  return sys;
}

SpaceTimeSystem static_system(const Graph& g, std::span<const Index> boundary_vertices) {
  SpaceTimeSystem sys;
  sys.vertices = g.order();
  sys.bins = 1;
  sys.adjacency = adjacency<double>(g);
  sys.weights.resize(g.order());
  for (Index v = 0; v < g.order(); ++v) sys.weights(v) = static_cast<double>(g.degree(v));
  sys.boundary_vertices.assign(boundary_vertices.begin(), boundary_vertices.end());
  std::sort(sys.boundary_vertices.begin(), sys.boundary_vertices.end());
  sys.boundary_vertices.erase(std::unique(sys.boundary_vertices.begin(), sys.boundary_vertices.end()),
                              sys.boundary_vertices.end());
  for (Index v : sys.boundary_vertices) {
    if (v < 0 || v >= g.order()) throw ValidationError("boundary vertex out of range");
  }
  return sys;
}

Eigen::VectorXd boundary_values(const SpaceTimeSystem& sys, const TimeGrid& grid,
                                const ThreatKernelParams& kernel, std::span<const Cue> cues,
                                CueSpread spread) {
  check_cues(cues, sys.vertices, grid.horizon());
  const Index nt = sys.bins;
  Eigen::VectorXd values = Eigen::VectorXd::Zero(static_cast<Index>(sys.boundary_vertices.size()) * nt);
  for (std::size_t b = 0; b < sys.boundary_vertices.size(); ++b) {
    const Index v = sys.boundary_vertices[b];
    for (const auto& c : cues) {
      if (c.vertex != v) continue;
      const Index cue_bin = grid.bin_of(c.time);
      for (Index k = 0; k < nt; ++k) {
        double x = 0.0;
        if (spread == CueSpread::kernel) {
          x = c.value * threat_kernel(kernel.rates(v), grid.center(k) - grid.center(cue_bin));
        } else if (k == cue_bin) {
          x = c.value;
        }
        auto& slot = values(static_cast<Index>(b) * nt + k);
        slot = std::max(slot, x);
      }
    }
  }
  return values;
}

namespace {

struct Partition {
  std::vector<Index> boundary;
  std::vector<Index> solve;          // interior unknowns that reach the boundary
  std::vector<Index> local;          // global -> position in solve, or -1
  std::vector<Index> boundary_slot;  // global -> position in boundary, or -1
  Index unreachable = 0;
};

Partition partition(const SpaceTimeSystem& sys, const Eigen::SparseMatrix<double, Eigen::RowMajor>& p) {
  const Index n = sys.unknowns();
  Partition part;
  part.boundary = sys.boundary_indices();
  part.local.assign(static_cast<std::size_t>(n), -1);
  part.boundary_slot.assign(static_cast<std::size_t>(n), -1);
  for (std::size_t i = 0; i < part.boundary.size(); ++i) {
    part.boundary_slot[static_cast<std::size_t>(part.boundary[i])] = static_cast<Index>(i);
  }

  // Walk edges backwards from the boundary: x is reached when P(x, y) != 0
  // for some reached or boundary y.
  const Eigen::SparseMatrix<double> by_column = p;
  std::vector<char> reached(static_cast<std::size_t>(n), 0);
  std::deque<Index> queue(part.boundary.begin(), part.boundary.end());
  for (Index b : part.boundary) reached[static_cast<std::size_t>(b)] = 1;
  while (!queue.empty()) {
    const Index y = queue.front();
    queue.pop_front();
    for (Eigen::SparseMatrix<double>::InnerIterator it(by_column, y); it; ++it) {
      const auto x = static_cast<std::size_t>(it.row());
      if (!reached[x] && it.value() != 0.0) {
        reached[x] = 1;
        queue.push_back(it.row());
      }
    }
  }
  for (Index x = 0; x < n; ++x) {
    if (part.boundary_slot[static_cast<std::size_t>(x)] >= 0) continue;
    if (reached[static_cast<std::size_t>(x)]) {
      part.local[static_cast<std::size_t>(x)] = static_cast<Index>(part.solve.size());
      part.solve.push_back(x);
    } else {
      ++part.unreachable;
    }
  }
  return part;
}

void check_boundary(const SpaceTimeSystem& sys, const Eigen::VectorXd& boundary) {
  if (sys.boundary_vertices.empty()) throw ValidationError("harmonic solve needs a nonempty boundary");
  if (boundary.size() != static_cast<Index>(sys.boundary_vertices.size()) * sys.bins) {
    throw ValidationError("boundary value count does not match the boundary size");
  }
  if (boundary.size() > 0 && !(boundary.minCoeff() >= 0.0 && boundary.maxCoeff() <= 1.0)) {
    throw ValidationError("boundary values must lie in [0,1]");
  }
}

}  // namespace

ThreatVector harmonic_solve(const SpaceTimeSystem& sys, const Eigen::VectorXd& boundary,
                            const SolveOptions& opt) {
  check_boundary(sys, boundary);
  if (!(opt.tol > 0.0)) throw ValidationError("solver tolerance must be positive");

  const auto p = transition_matrix(sys);
  const Partition part = partition(sys, p);
  const auto m = static_cast<Index>(part.solve.size());

  // (I - P_ss) theta_s = P_sb theta_b
  std::vector<Eigen::Triplet<double>> trip;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m);
  for (Index i = 0; i < m; ++i) {
    const Index row = part.solve[static_cast<std::size_t>(i)];
    trip.emplace_back(i, i, 1.0);
    for (decltype(p)::InnerIterator it(p, row); it; ++it) {
      const auto col = static_cast<std::size_t>(it.col());
      if (part.local[col] >= 0) {
        trip.emplace_back(i, part.local[col], -it.value());
      } else if (part.boundary_slot[col] >= 0) {
        rhs(i) += it.value() * boundary(part.boundary_slot[col]);
      }
    }
  }
  Eigen::SparseMatrix<double> lhs(m, m);
  lhs.setFromTriplets(trip.begin(), trip.end());

  ThreatVector out;
  out.unreachable = part.unreachable;
  Eigen::VectorXd x = Eigen::VectorXd::Zero(m);
  const double rhs_norm = rhs.norm();
  if (m > 0 && rhs_norm > 0.0) {
    Eigen::BiCGSTAB<Eigen::SparseMatrix<double>, Eigen::IncompleteLUT<double>> solver;
    solver.setMaxIterations(opt.max_iter);
    solver.setTolerance(std::max(opt.tol / rhs_norm, std::numeric_limits<double>::epsilon()));
    solver.compute(lhs);
    if (solver.info() != Eigen::Success) throw SolverError("preconditioner setup failed", rhs_norm);
    x = solver.solve(rhs);
    out.iterations = solver.iterations();
    out.residual = (lhs * x - rhs).norm();
    if (!x.allFinite() || out.residual > opt.tol) {
      throw SolverError("harmonic solve did not converge in " + std::to_string(opt.max_iter) +
                            " iterations (residual " + std::to_string(out.residual) + ")",
                        out.residual);
    }
  }

  Eigen::VectorXd theta = Eigen::VectorXd::Zero(sys.unknowns());
  for (std::size_t b = 0; b < part.boundary.size(); ++b) theta(part.boundary[b]) = boundary(static_cast<Index>(b));
  for (Index i = 0; i < m; ++i) theta(part.solve[static_cast<std::size_t>(i)]) = x(i);

  out.min_before_clamp = theta.size() ? theta.minCoeff() : 0.0;
  out.max_before_clamp = theta.size() ? theta.maxCoeff() : 0.0;
  out.clamp_magnitude = std::max({0.0, -out.min_before_clamp, out.max_before_clamp - 1.0});
  out.theta = theta.cwiseMax(0.0).cwiseMin(1.0);
  return out;
}

Eigen::VectorXd harmonic_solve_dense(const SpaceTimeSystem& sys, const Eigen::VectorXd& boundary) {
  check_boundary(sys, boundary);
  const Eigen::MatrixXd lap = Eigen::MatrixXd(Eigen::SparseMatrix<double>(spacetime_laplacian(sys)));
  const auto b_idx = sys.boundary_indices();
  const auto i_idx = sys.interior_indices();
  const auto ni = static_cast<Index>(i_idx.size());
  const auto nb = static_cast<Index>(b_idx.size());

  Eigen::MatrixXd l_ii(ni, ni), l_ib(ni, nb);
  for (Index r = 0; r < ni; ++r) {
    for (Index c = 0; c < ni; ++c) l_ii(r, c) = lap(i_idx[static_cast<std::size_t>(r)], i_idx[static_cast<std::size_t>(c)]);
    for (Index c = 0; c < nb; ++c) l_ib(r, c) = lap(i_idx[static_cast<std::size_t>(r)], b_idx[static_cast<std::size_t>(c)]);
  }
  // Minimum-norm solution; blocks cut off from the boundary come out zero.
  const Eigen::VectorXd interior = l_ii.completeOrthogonalDecomposition().solve(-l_ib * boundary);

  Eigen::VectorXd theta = Eigen::VectorXd::Zero(sys.unknowns());
  for (Index c = 0; c < nb; ++c) theta(b_idx[static_cast<std::size_t>(c)]) = boundary(c);
  for (Index r = 0; r < ni; ++r) theta(i_idx[static_cast<std::size_t>(r)]) = interior(r);
  return theta;
}

SttpResult sttp_scores(const TrackGraph& tracks, const TimeGrid& grid,
                       const ThreatKernelParams& kernel, std::span<const Cue> cues,
                       const SttpOptions& opt) {
  if (cues.empty()) throw ValidationError("threat propagation needs at least one cue");
  const SpaceTimeSystem sys = build_spacetime_system(tracks, grid, kernel, cues);
  const Eigen::VectorXd bvals = boundary_values(sys, grid, kernel, cues, opt.spread);

  SttpResult out;
  out.threat = harmonic_solve(sys, bvals, opt.solve);
  if (out.threat.clamp_magnitude > 1e-12) {
    std::cerr << "note: clamped threat by " << out.threat.clamp_magnitude << "\n";
  }

  const Index n = sys.vertices;
  const Index nt = sys.bins;
  const Eigen::Map<const Eigen::MatrixXd> per_bin(out.threat.theta.data(), nt, n);
  out.scores.method = ScoreMethod::sttp;
  out.scores.values = opt.aggregate == BinAggregate::max ? Eigen::VectorXd(per_bin.colwise().maxCoeff().transpose())
                                                         : Eigen::VectorXd(per_bin.colwise().mean().transpose());
  for (Index v = 0; v < n; ++v) {
    if (sys.weights(v) == 0.0 && !sys.is_boundary_vertex(v)) out.scores.values(v) = 0.0;
  }
  for (std::size_t b = 0; b < sys.boundary_vertices.size(); ++b) {
    out.scores.values(sys.boundary_vertices[b]) = bvals.segment(static_cast<Index>(b) * nt, nt).maxCoeff();
  }
  return out;
}

std::vector<Index> llr_detect(const VertexScores& scores,
                              const std::optional<Eigen::VectorXd>& null_weights, double threshold) {
  if (std::isnan(threshold)) throw ValidationError("detection threshold is NaN");
  const Index n = scores.values.size();
  if (null_weights) {
    if (null_weights->size() != n) throw ValidationError("null weight count does not match score count");
    if (n > 0 && !(null_weights->minCoeff() > 0.0)) throw ValidationError("null weights must be positive");
  }
  std::vector<Index> detected;
  for (Index v = 0; v < n; ++v) {
    const double ratio = null_weights ? scores.values(v) / (*null_weights)(v) : scores.values(v);
    if (ratio > threshold) detected.push_back(v);
  }
  return detected;
}

}  // namespace netdet
