#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "netdet/evaluation.hpp"
#include "netdet/graph.hpp"
#include "netdet/spectral.hpp"
#include "netdet/threat.hpp"

namespace netdet::io {

/// 17 significant digits, enough to round-trip any double.
std::string format_real(double x);

/// Rows of a CSV file whose first line must equal `header`.
std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path, const std::string& header);

/// `src,dst` edge list. Arcs keep file order and direction.
struct EdgeList {
  Index vertices = 0;
  std::vector<VertexPair> arcs;
};
EdgeList read_edge_list(const std::filesystem::path& path, std::optional<Index> vertices = std::nullopt);

/// `track_id,src,dst,depart,arrive`.
std::vector<Track> read_tracks(const std::filesystem::path& path);
void write_tracks(const std::filesystem::path& path, const TrackGraph& tracks);

/// `vertex,time,value`.
std::vector<Cue> read_cues(const std::filesystem::path& path);
void write_cues(const std::filesystem::path& path, const std::vector<Cue>& cues);

/// `vertex,label`.
Eigen::VectorXi read_labels(const std::filesystem::path& path);
void write_labels(const std::filesystem::path& path, const Eigen::VectorXi& labels);

/// `vertex,score,method`.
VertexScores read_scores(const std::filesystem::path& path);
void write_scores(const std::filesystem::path& path, const VertexScores& scores);

/// `pfa,pd_mean,pd_stderr,detector,fa_count` for averaged curves.
void write_roc(const std::filesystem::path& path, const MonteCarloResult& result);
/// Single curve in the same layout: its raw points, zero stderr.
void write_roc(const std::filesystem::path& path, const RocCurve& curve, const std::string& detector);

/// Dense `row-major` CSV, or `row,col,value` triplets.
void write_matrix_dense(std::ostream& out, const Eigen::MatrixXd& m);
void write_matrix_triplets(std::ostream& out, const Eigen::SparseMatrix<double>& m);

/// Flat key-value sidecar `<artifact>.provenance` with the seed and config echo.
void write_provenance(const std::filesystem::path& artifact, std::uint64_t seed, const std::string& config_echo,
                      const std::vector<std::pair<std::string, std::string>>& extra = {});

}  // namespace netdet::io
