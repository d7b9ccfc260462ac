#pragma once

#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "netdet/eigensolver.hpp"
#include "netdet/graph.hpp"

namespace netdet {

enum class ScoreMethod { fiedler, modularity, sttp, noise };

std::string_view to_string(ScoreMethod m);
ScoreMethod score_method_from_string(std::string_view s);

/// Per-vertex detection statistic; larger means more likely foreground.
struct VertexScores {
  Eigen::VectorXd values;
  ScoreMethod method = ScoreMethod::sttp;
};

/// Second-smallest eigenpair of the Kirchhoff matrix. On a disconnected
/// graph the value is zero and `connected` is false.
struct FiedlerResult {
  EigenPair<double> pair;
  bool connected = true;
};

FiedlerResult fiedler(const Graph& g, const EigenOptions& opt = {});

/// Vertices whose Fiedler-vector entry is >= c (c <= 0). The induced
/// subgraph is connected. Throws on c > 0 or a disconnected graph.
std::vector<Index> spectral_detect(const Graph& g, double c, const EigenOptions& opt = {});

/// Newman modularity matrix A - d d^T / V. Throws on an edgeless graph.
Eigen::MatrixXd modularity_matrix(const Graph& g);

struct ModularityOptions {
  EigenOptions eigen;
  /// 0 selects the principal eigenvector, 1 the next largest, and so on.
  Index eigenvector_index = 0;
  /// Score by |entry| instead of the signed entry.
  bool magnitude = false;
};

struct ModularityResult {
  VertexScores scores;
  double eigenvalue = 0.0;
  /// Number of computed eigenvalues tied with the selected one.
  Index multiplicity = 1;
};

ModularityResult modularity_detect(const Graph& g, const ModularityOptions& opt = {});

}  // namespace netdet
