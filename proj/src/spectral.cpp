#include "netdet/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <string>

namespace netdet {

std::string_view to_string(ScoreMethod m) {
  switch (m) {
    case ScoreMethod::fiedler: return "fiedler";
    case ScoreMethod::modularity: return "modularity";
    case ScoreMethod::sttp: return "sttp";
    case ScoreMethod::noise: return "noise";
  }
  return "unknown";
}

ScoreMethod score_method_from_string(std::string_view s) {
  if (s == "fiedler") return ScoreMethod::fiedler;
  if (s == "modularity" || s == "spec") return ScoreMethod::modularity;
  if (s == "sttp") return ScoreMethod::sttp;
  if (s == "noise") return ScoreMethod::noise;
  throw ValidationError("unknown score method '" + std::string(s) + "'");
}

FiedlerResult fiedler(const Graph& g, const EigenOptions& opt) {
  if (g.order() < 2) throw ValidationError("Fiedler pair needs at least two vertices");
  const auto q = kirchhoff<double>(g);
  auto pairs = smallest_eigenpairs(q, 2, opt);
  FiedlerResult out{pairs[1], is_connected(g)};
  if (!out.connected) {
    std::cerr << "warning: graph is disconnected; Fiedler value is zero and the vector is not "
                 "discriminative\n";
  }
  return out;
}

std::vector<Index> spectral_detect(const Graph& g, double c, const EigenOptions& opt) {
  if (c > 0.0) throw ValidationError("spectral detection threshold must be <= 0");
  if (!is_connected(g)) throw ValidationError("spectral detection requires a connected graph");
  const auto f = fiedler(g, opt);
  // Entries within the solver tolerance of c count as reaching it; this only
  // lowers the effective threshold, which keeps it nonpositive.
  const double cut = c - opt.tol;
  std::vector<Index> picked;
  for (Index v = 0; v < g.order(); ++v) {
    if (f.pair.vector(v) >= cut) picked.push_back(v);
  }
  return picked;
}

Eigen::MatrixXd modularity_matrix(const Graph& g) {
  if (g.size() == 0) throw ValidationError("modularity matrix is undefined for a graph with no edges");
  const Eigen::MatrixXd a = Eigen::MatrixXd(adjacency<double>(g));
  const Eigen::VectorXd d = a.rowwise().sum();
  const double volume = d.sum();
  return a - d * d.transpose() / volume;
}

ModularityResult modularity_detect(const Graph& g, const ModularityOptions& opt) {
  if (g.size() == 0) throw ValidationError("modularity detection needs at least one edge");
  const Index n = g.order();
  if (opt.eigenvector_index < 0 || opt.eigenvector_index >= n) {
    throw ValidationError("modularity eigenvector index out of range");
  }
  const Index want = std::min(n, opt.eigenvector_index + 2);

  std::vector<EigenPair<double>> pairs;
  const bool dense = opt.eigen.method == EigenMethod::dense ||
                     (opt.eigen.method == EigenMethod::automatic && n <= opt.eigen.dense_limit);
  if (dense) {
    pairs = largest_eigenpairs(modularity_matrix(g), want, opt.eigen);
  } else {
    const auto a = adjacency<double>(g);
    const Eigen::VectorXd d = a * Eigen::VectorXd::Ones(n);
    const double volume = d.sum();
    auto apply = [&](const Eigen::VectorXd& x, Eigen::VectorXd& y) {
      y.noalias() = a * x;
      y -= d * (d.dot(x) / volume);
    };
    pairs = lanczos_extreme<double>(apply, n, want, Spectrum::largest, 2.0 * d.maxCoeff(), opt.eigen);
    for (auto& p : pairs) canonical_sign(p.vector);
  }

  const auto& chosen = pairs[static_cast<std::size_t>(opt.eigenvector_index)];
  ModularityResult out;
  out.eigenvalue = chosen.value;
  out.scores.method = ScoreMethod::modularity;
  out.scores.values = opt.magnitude ? Eigen::VectorXd(chosen.vector.cwiseAbs()) : chosen.vector;
  out.multiplicity = 0;
  const double tie = 1e-8 * std::max(1.0, std::abs(chosen.value));
  for (const auto& p : pairs) {
    if (std::abs(p.value - chosen.value) <= tie) ++out.multiplicity;
  }
  return out;
}

}  // namespace netdet
