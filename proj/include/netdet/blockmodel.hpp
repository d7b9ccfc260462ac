#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "netdet/graph.hpp"

namespace netdet {

using Rng = std::mt19937_64;

enum class PairCommunityMode {
  fixed_per_pair,   ///< z_{i->j} drawn once and used for every interaction
  per_interaction,  ///< each interaction redraws the hosting community
};

/// Parameters of the mixed-membership space-time blockmodel.
struct BlockmodelParams {
  Index nodes = 0;
  Index communities = 0;
  Index lifestyles = 0;
  Eigen::VectorXd lifestyle_probs;   ///< phi, length L
  Eigen::MatrixXd concentration;     ///< X, L x K Dirichlet concentrations
  Eigen::MatrixXd rates;             ///< B, K x K interaction rates
  Eigen::MatrixXd sparsity;          ///< S, K x K activation probabilities
  double alpha = 2.5;                ///< power-law exponent of expected degrees
  double degree_min = 1.0;
  double degree_max = 0.0;           ///< 0 means sqrt(N)
  Eigen::VectorXd meetings;          ///< Psi, expected meeting-time count per community
  double jitter_sd = 0.0;            ///< seconds
  double horizon = 0.0;              ///< seconds
  std::vector<Index> foreground_lifestyles;
  std::vector<Index> foreground_communities;
  /// Communities whose S diagonal must reach the log(N_k)/N_k connectivity level.
  std::vector<Index> connected_communities;
  PairCommunityMode pair_mode = PairCommunityMode::fixed_per_pair;

  /// Throws ValidationError naming the first violated invariant.
  void validate() const;
  double effective_degree_max() const;
};

/// Expected community sizes N_k = N * sum_l phi_l * E[pi_k | lifestyle l].
Eigen::VectorXd expected_community_sizes(const BlockmodelParams& p);

/// Connectivity level log(N_k) / N_k, or 1 when N_k <= 1.
double connectivity_level(double community_size);

struct GeneratedNetwork {
  TrackGraph tracks;
  std::vector<Index> lifestyle;
  Eigen::MatrixXd membership;            ///< N x K, rows on the simplex
  std::vector<std::int16_t> pair_community;  ///< N x N row-major, z_{i->j}; -1 on the diagonal
  Eigen::VectorXd expected_degree;       ///< lambda_i
  std::vector<std::vector<double>> meeting_times;  ///< per community
  Eigen::VectorXi labels;                ///< 1 for foreground nodes
  std::vector<VertexPair> active_pairs;  ///< pairs with I_ij = 1, i < j

  Index community_of(Index i, Index j) const {
    return pair_community[static_cast<std::size_t>(i * labels.size() + j)];
  }
};

// Individual samplers. Each consumes only the generator it is given.

Index sample_categorical(const Eigen::VectorXd& probs, Rng& rng);

std::vector<Index> sample_lifestyles(const Eigen::VectorXd& phi, Index n, Rng& rng);

/// Dirichlet draw; zero concentrations give exact zeros.
Eigen::VectorXd sample_membership(const Eigen::VectorXd& concentration, Rng& rng);

/// (z_{i->j}, z_{j->i}) as community indices.
std::pair<Index, Index> sample_pair_communities(const Eigen::VectorXd& pi_i, const Eigen::VectorXd& pi_j,
                                                Rng& rng);

/// i.i.d. draws from density proportional to x^-alpha on [x_min, x_max].
Eigen::VectorXd sample_degrees(double alpha, Index n, double x_min, double x_max, Rng& rng);

/// I_ij * lambda_i lambda_j / sum(lambda) * z_i^T B z_j with z given as
/// community indices.
double interaction_rate(bool active, double lambda_i, double lambda_j, double lambda_sum,
                        const Eigen::MatrixXd& rates, Index community_i, Index community_j);

/// Same product with explicit indicator vectors.
double interaction_rate(bool active, double lambda_i, double lambda_j, double lambda_sum,
                        const Eigen::MatrixXd& rates, const Eigen::VectorXd& z_i, const Eigen::VectorXd& z_j);

bool sample_sparsity_indicator(const Eigen::MatrixXd& sparsity, Index community_a, Index community_b, Rng& rng);

/// 1 + Poisson(psi - 1) meeting times uniform on [0, horizon].
std::vector<double> sample_meeting_times(double psi, double horizon, Rng& rng);

/// Deterministic per (seed, stage) generator; stages are independent streams.
Rng stage_rng(std::uint64_t seed, std::uint64_t stage);

GeneratedNetwork generate(const BlockmodelParams& params, std::uint64_t seed);

/// Knobs of the baseline covert-network configuration: K-1 background
/// communities plus one foreground community, L-2 background lifestyles plus
/// two foreground lifestyles (one spread uniformly over background
/// communities, one focused on a few).
struct BaselineSpec {
  Index nodes = 256;
  Index communities = 10;
  Index lifestyles = 11;
  double horizon = 86400.0;
  double alpha = 2.5;
  double jitter_sd = -1.0;  ///< negative means horizon / 200
  double foreground_fraction = 0.06;
  double foreground_share = 0.8;
  Index focused_communities = 2;
  double concentration = 1.0;
  double membership_exponent = 2.0;
  double rate_diagonal = 1024.0;
  double rate_offdiagonal_ratio = 0.1;
  double sparsity_background_scale = 1.0;
  double sparsity_foreground_scale = 1.0;
  double sparsity_offdiagonal = 0.01;
  double meetings_background = 20.0;
  double meetings_foreground = 20.0;
  PairCommunityMode pair_mode = PairCommunityMode::fixed_per_pair;
};

BlockmodelParams baseline_params(const BaselineSpec& spec);

}  // namespace netdet
