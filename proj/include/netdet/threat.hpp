#pragma once

#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "netdet/graph.hpp"
#include "netdet/spectral.hpp"

namespace netdet {

/// Uniform discretization of [0, T] into `bins` bins, sampled at bin centers.
class TimeGrid {
 public:
  TimeGrid(double horizon, Index bins);

  double horizon() const noexcept { return horizon_; }
  Index bins() const noexcept { return bins_; }
  double width() const noexcept { return horizon_ / static_cast<double>(bins_); }
  double center(Index k) const noexcept { return (static_cast<double>(k) + 0.5) * width(); }
  /// Bin containing time t; t == T maps to the last bin.
  Index bin_of(double t) const noexcept;

 private:
  double horizon_;
  Index bins_;
};

/// Per-vertex Poisson rates of the threat jump process, in 1/seconds.
struct ThreatKernelParams {
  Eigen::VectorXd rates;

  static ThreatKernelParams uniform(Index n, double rate);
  /// Uniform rate whose e-folding time is a quarter of the horizon.
  static ThreatKernelParams default_for(Index n, double horizon);
};

/// Probability that a threat observed at time 0 persists to time t.
inline double threat_kernel(double rate, double t) { return std::exp(-rate * std::abs(t)); }

struct Cue {
  Index vertex = 0;
  double time = 0.0;
  double value = 1.0;
};

/// Space-time adjacency over (vertex, bin) unknowns laid out vertex-major:
/// index = vertex * bins + bin.
struct SpaceTimeSystem {
  Index vertices = 0;
  Index bins = 1;
  Eigen::SparseMatrix<double, Eigen::RowMajor> adjacency;
  /// w(v): propagation weight of each vertex (incident track count).
  Eigen::VectorXd weights;
  /// Cued vertices, ascending. All of their bins are boundary unknowns.
  std::vector<Index> boundary_vertices;

  Index unknowns() const noexcept { return vertices * bins; }
  Index index(Index v, Index k) const noexcept { return v * bins + k; }
  bool is_boundary_vertex(Index v) const;
  /// Boundary unknown indices in ascending order.
  std::vector<Index> boundary_indices() const;
  std::vector<Index> interior_indices() const;
};

/// Transition matrix D^{-1} A. Row v is divided by max(w(v), row sum), so
/// every row sums to at most one.
Eigen::SparseMatrix<double, Eigen::RowMajor> transition_matrix(const SpaceTimeSystem& sys);

/// Space-time asymmetric Laplacian I - D^{-1} A.
Eigen::SparseMatrix<double, Eigen::RowMajor> spacetime_laplacian(const SpaceTimeSystem& sys);

SpaceTimeSystem build_spacetime_system(const TrackGraph& tracks, const TimeGrid& grid,
                                       const ThreatKernelParams& kernel, std::span<const Cue> cues);

/// Single-bin system from a static graph: A is the adjacency matrix and w the
/// vertex degree.
SpaceTimeSystem static_system(const Graph& g, std::span<const Index> boundary_vertices);

enum class CueSpread {
  kernel,   ///< boundary bins decay as K(t_k - t_cue)
  impulse,  ///< only the bin containing the cue is set
};

/// Boundary values in boundary_indices() order: for each cued vertex and bin,
/// the maximum over its cues of value * K(bin center - cue bin center).
Eigen::VectorXd boundary_values(const SpaceTimeSystem& sys, const TimeGrid& grid,
                                const ThreatKernelParams& kernel, std::span<const Cue> cues,
                                CueSpread spread = CueSpread::kernel);

struct SolveOptions {
  double tol = 1e-12;    ///< absolute residual bound on the interior equations
  Index max_iter = 1000;
};

struct ThreatVector {
  /// Threat probability per space-time unknown, clamped to [0, 1].
  Eigen::VectorXd theta;
  double min_before_clamp = 0.0;
  double max_before_clamp = 0.0;
  /// Largest amount any entry moved when clamping.
  double clamp_magnitude = 0.0;
  double residual = 0.0;
  Index iterations = 0;
  /// Interior unknowns with no path to the boundary (fixed to zero).
  Index unreachable = 0;
};

/// Harmonic solution of (L_ii L_ib)(theta_i; theta_b) = 0 by BiCGSTAB.
ThreatVector harmonic_solve(const SpaceTimeSystem& sys, const Eigen::VectorXd& boundary,
                            const SolveOptions& opt = {});

/// Same system solved densely (minimum-norm); for small reference problems.
Eigen::VectorXd harmonic_solve_dense(const SpaceTimeSystem& sys, const Eigen::VectorXd& boundary);

enum class BinAggregate { max, mean };

struct SttpOptions {
  SolveOptions solve;
  CueSpread spread = CueSpread::kernel;
  BinAggregate aggregate = BinAggregate::max;
};

struct SttpResult {
  VertexScores scores;
  ThreatVector threat;
};

SttpResult sttp_scores(const TrackGraph& tracks, const TimeGrid& grid,
                       const ThreatKernelParams& kernel, std::span<const Cue> cues,
                       const SttpOptions& opt = {});

/// Likelihood-ratio test: detect v iff score(v) / null_weight(v) > threshold.
std::vector<Index> llr_detect(const VertexScores& scores,
                              const std::optional<Eigen::VectorXd>& null_weights, double threshold);

}  // namespace netdet
