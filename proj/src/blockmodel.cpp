#include "netdet/blockmodel.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace netdet {

namespace {

enum Stage : std::uint64_t {
  kLifestyle = 1,
  kMembership,
  kDegree,
  kPairCommunity,
  kSparsity,
  kMeeting,
  kCount,
  kTiming,
};

void require(bool ok, const std::string& what) {
  if (!ok) throw ValidationError("blockmodel: " + what);
}

bool is_distribution(const Eigen::VectorXd& p) {
  return p.size() > 0 && p.allFinite() && p.minCoeff() >= 0.0 && std::abs(p.sum() - 1.0) <= 1e-9;
}

}  // namespace

double BlockmodelParams::effective_degree_max() const {
  return degree_max > 0.0 ? degree_max : std::sqrt(static_cast<double>(nodes));
}

void BlockmodelParams::validate() const {
  require(nodes >= 0, "node count must be nonnegative");
  require(communities >= 1, "need at least one community");
  require(lifestyles >= 1, "need at least one lifestyle");
  require(lifestyle_probs.size() == lifestyles, "phi must have L entries");
  require(is_distribution(lifestyle_probs), "phi must be a probability vector");
  require(concentration.rows() == lifestyles && concentration.cols() == communities, "X must be L x K");
  require(concentration.allFinite() && concentration.minCoeff() >= 0.0, "X must be nonnegative");
  for (Index l = 0; l < lifestyles; ++l) {
    require(concentration.row(l).maxCoeff() > 0.0, "X row " + std::to_string(l) + " has no positive entry");
  }
  require(rates.rows() == communities && rates.cols() == communities, "B must be K x K");
  require(rates.allFinite() && rates.minCoeff() >= 0.0, "B must be nonnegative");
  require(sparsity.rows() == communities && sparsity.cols() == communities, "S must be K x K");
  require(sparsity.allFinite() && sparsity.minCoeff() >= 0.0 && sparsity.maxCoeff() <= 1.0,
          "S entries must lie in [0,1]");
  require((sparsity - sparsity.transpose()).cwiseAbs().maxCoeff() <= 1e-12, "S must be symmetric");
  require(alpha > 1.0, "power-law exponent alpha must exceed 1");
  require(degree_min > 0.0 && effective_degree_max() >= degree_min, "degree support must be positive and ordered");
  require(meetings.size() == communities, "Psi must have K entries");
  require(meetings.allFinite() && meetings.minCoeff() >= 1.0, "Psi entries must be >= 1");
  require(jitter_sd >= 0.0, "jitter must be nonnegative");
  require(horizon > 0.0, "horizon must be positive");
  for (Index l : foreground_lifestyles) require(l >= 0 && l < lifestyles, "foreground lifestyle out of range");
  for (Index k : foreground_communities) require(k >= 0 && k < communities, "foreground community out of range");
  const Eigen::VectorXd sizes = expected_community_sizes(*this);
  for (Index k : connected_communities) {
    require(k >= 0 && k < communities, "connected community out of range");
    require(sparsity(k, k) >= connectivity_level(sizes(k)) * (1.0 - 1e-12),
            "S diagonal of community " + std::to_string(k) + " is below log(N_k)/N_k");
  }
}

Eigen::VectorXd expected_community_sizes(const BlockmodelParams& p) {
  Eigen::VectorXd sizes = Eigen::VectorXd::Zero(p.communities);
  for (Index l = 0; l < p.lifestyles; ++l) {
    const double total = p.concentration.row(l).sum();
    if (total > 0.0) sizes += p.lifestyle_probs(l) * p.concentration.row(l).transpose() / total;
  }
  return sizes * static_cast<double>(p.nodes);
}

double connectivity_level(double community_size) {
  return community_size > 1.0 ? std::min(1.0, std::log(community_size) / community_size) : 1.0;
}

Index sample_categorical(const Eigen::VectorXd& probs, Rng& rng) {
  const double total = probs.sum();
  std::uniform_real_distribution<double> unit(0.0, total);
  const double u = unit(rng);
  double acc = 0.0;
  Index last_positive = 0;
  for (Index i = 0; i < probs.size(); ++i) {
    if (probs(i) <= 0.0) continue;
    last_positive = i;
    acc += probs(i);
    if (u < acc) return i;
  }
  return last_positive;
}

std::vector<Index> sample_lifestyles(const Eigen::VectorXd& phi, Index n, Rng& rng) {
  if (!is_distribution(phi)) throw ValidationError("lifestyle probabilities must form a distribution");
  std::vector<Index> out(static_cast<std::size_t>(std::max<Index>(n, 0)));
  for (auto& l : out) l = sample_categorical(phi, rng);
  return out;
}

Eigen::VectorXd sample_membership(const Eigen::VectorXd& concentration, Rng& rng) {
  if (concentration.size() == 0 || !(concentration.maxCoeff() > 0.0) || concentration.minCoeff() < 0.0) {
    throw ValidationError("Dirichlet concentration needs a positive entry and no negative entries");
  }
  Eigen::VectorXd pi = Eigen::VectorXd::Zero(concentration.size());
  for (int attempt = 0; attempt < 16; ++attempt) {
    for (Index k = 0; k < concentration.size(); ++k) {
      if (concentration(k) > 0.0) {
        std::gamma_distribution<double> gamma(concentration(k), 1.0);
        pi(k) = gamma(rng);
      }
    }
    if (pi.sum() > 0.0) return pi / pi.sum();
  }
  // Every gamma draw underflowed; fall back to the Dirichlet mean.
  return concentration / concentration.sum();
}

std::pair<Index, Index> sample_pair_communities(const Eigen::VectorXd& pi_i, const Eigen::VectorXd& pi_j,
                                                Rng& rng) {
  const Index a = sample_categorical(pi_i, rng);
  const Index b = sample_categorical(pi_j, rng);
  return {a, b};
}

Eigen::VectorXd sample_degrees(double alpha, Index n, double x_min, double x_max, Rng& rng) {
  if (!(alpha > 1.0)) throw ValidationError("power-law exponent alpha must exceed 1");
  if (!(x_min > 0.0) || !(x_max >= x_min)) throw ValidationError("power-law support must be positive and ordered");
  // Inverse CDF of the truncated Pareto density.
  const double e = 1.0 - alpha;
  const double lo = std::pow(x_min, e);
  const double hi = std::pow(x_max, e);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Eigen::VectorXd out(std::max<Index>(n, 0));
  for (Index i = 0; i < out.size(); ++i) {
    const double u = unit(rng);
    out(i) = std::clamp(std::pow(lo - u * (lo - hi), 1.0 / e), x_min, x_max);
  }
  return out;
}

double interaction_rate(bool active, double lambda_i, double lambda_j, double lambda_sum,
                        const Eigen::MatrixXd& rates, Index community_i, Index community_j) {
  if (!(lambda_sum > 0.0)) throw ValidationError("expected-degree sum must be positive");
  if (!active) return 0.0;
  return lambda_i * lambda_j / lambda_sum * rates(community_i, community_j);
}

double interaction_rate(bool active, double lambda_i, double lambda_j, double lambda_sum,
                        const Eigen::MatrixXd& rates, const Eigen::VectorXd& z_i, const Eigen::VectorXd& z_j) {
  if (!(lambda_sum > 0.0)) throw ValidationError("expected-degree sum must be positive");
  if (!active) return 0.0;
  return lambda_i * lambda_j / lambda_sum * z_i.dot(rates * z_j);
}

bool sample_sparsity_indicator(const Eigen::MatrixXd& sparsity, Index community_a, Index community_b, Rng& rng) {
  std::bernoulli_distribution coin(sparsity(community_a, community_b));
  return coin(rng);
}

std::vector<double> sample_meeting_times(double psi, double horizon, Rng& rng) {
  if (!(psi >= 1.0)) throw ValidationError("expected meeting count must be >= 1");
  if (!(horizon > 0.0)) throw ValidationError("horizon must be positive");
  Index count = 1;
  if (psi > 1.0) {
    std::poisson_distribution<Index> extra(psi - 1.0);
    count += extra(rng);
  }
  std::uniform_real_distribution<double> when(0.0, horizon);
  std::vector<double> times(static_cast<std::size_t>(count));
  for (auto& t : times) t = when(rng);
  return times;
}

Rng stage_rng(std::uint64_t seed, std::uint64_t stage) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stage), 0x6e657464U};
  return Rng(seq);
}

GeneratedNetwork generate(const BlockmodelParams& params, std::uint64_t seed) {
  params.validate();
  const Index n = params.nodes;
  const Index k = params.communities;

  GeneratedNetwork net;
  {
    Rng rng = stage_rng(seed, kLifestyle);
    net.lifestyle = sample_lifestyles(params.lifestyle_probs, n, rng);
  }
  net.labels = Eigen::VectorXi::Zero(n);
  for (Index i = 0; i < n; ++i) {
    const auto& fg = params.foreground_lifestyles;
    net.labels(i) = std::find(fg.begin(), fg.end(), net.lifestyle[static_cast<std::size_t>(i)]) != fg.end();
  }
  {
    Rng rng = stage_rng(seed, kMembership);
    net.membership.resize(n, k);
    for (Index i = 0; i < n; ++i) {
      net.membership.row(i) =
          sample_membership(params.concentration.row(net.lifestyle[static_cast<std::size_t>(i)]).transpose(), rng)
              .transpose();
    }
  }
  {
    Rng rng = stage_rng(seed, kDegree);
    net.expected_degree = sample_degrees(params.alpha, n, params.degree_min, params.effective_degree_max(), rng);
  }
  net.pair_community.assign(static_cast<std::size_t>(n * n), -1);
  {
    Rng rng = stage_rng(seed, kPairCommunity);
    for (Index i = 0; i < n; ++i) {
      for (Index j = i + 1; j < n; ++j) {
        const auto [a, b] = sample_pair_communities(net.membership.row(i).transpose(),
                                                    net.membership.row(j).transpose(), rng);
        net.pair_community[static_cast<std::size_t>(i * n + j)] = static_cast<std::int16_t>(a);
        net.pair_community[static_cast<std::size_t>(j * n + i)] = static_cast<std::int16_t>(b);
      }
    }
  }
  {
    Rng rng = stage_rng(seed, kSparsity);
    for (Index i = 0; i < n; ++i) {
      for (Index j = i + 1; j < n; ++j) {
        if (sample_sparsity_indicator(params.sparsity, net.community_of(i, j), net.community_of(j, i), rng)) {
          net.active_pairs.emplace_back(i, j);
        }
      }
    }
  }
  {
    Rng rng = stage_rng(seed, kMeeting);
    net.meeting_times.resize(static_cast<std::size_t>(k));
    for (Index c = 0; c < k; ++c) {
      net.meeting_times[static_cast<std::size_t>(c)] = sample_meeting_times(params.meetings(c), params.horizon, rng);
    }
  }

  const double lambda_sum = net.expected_degree.sum();
  Rng count_rng = stage_rng(seed, kCount);
  Rng timing_rng = stage_rng(seed, kTiming);
  std::normal_distribution<double> jitter(0.0, 1.0);
  std::bernoulli_distribution coin(0.5);

  std::vector<Track> tracks;
  std::int64_t next_id = 0;
  for (const auto& [i, j] : net.active_pairs) {
    const double rate = interaction_rate(true, net.expected_degree(i), net.expected_degree(j), lambda_sum,
                                         params.rates, net.community_of(i, j), net.community_of(j, i));
    if (rate <= 0.0) continue;
    std::poisson_distribution<Index> count_dist(rate);
    const Index count = count_dist(count_rng);
    for (Index c = 0; c < count; ++c) {
      const bool i_initiates = coin(timing_rng);
      Index host = net.community_of(i, j);
      if (params.pair_mode == PairCommunityMode::per_interaction) {
        host = sample_categorical(net.membership.row(i_initiates ? i : j).transpose(), timing_rng);
      }
      const auto& times = net.meeting_times[static_cast<std::size_t>(host)];
      std::uniform_int_distribution<std::size_t> pick(0, times.size() - 1);
      const double meet = times[pick(timing_rng)];
      const double ti = std::clamp(meet + params.jitter_sd * jitter(timing_rng), 0.0, params.horizon);
      const double tj = std::clamp(meet + params.jitter_sd * jitter(timing_rng), 0.0, params.horizon);
      Track t;
      t.id = next_id++;
      t.src = i_initiates ? i : j;
      t.dst = i_initiates ? j : i;
      t.depart = std::min(ti, tj);
      t.arrive = std::max(ti, tj);
      tracks.push_back(t);
    }
  }
  net.tracks = TrackGraph(n, params.horizon, std::move(tracks));
  return net;
}

BlockmodelParams baseline_params(const BaselineSpec& spec) {
  require(spec.communities >= 2, "baseline needs at least two communities");
  require(spec.lifestyles >= 3, "baseline needs at least three lifestyles");
  require(spec.foreground_fraction > 0.0 && spec.foreground_fraction < 1.0, "foreground fraction must lie in (0,1)");
  require(spec.foreground_share > 0.0 && spec.foreground_share <= 1.0, "foreground share must lie in (0,1]");
  require(spec.concentration > 0.0, "concentration must be positive");

  const Index k = spec.communities;
  const Index l = spec.lifestyles;
  const Index bg_k = k - 1;
  const Index bg_l = l - 2;
  const Index fg_k = k - 1;

  BlockmodelParams p;
  p.nodes = spec.nodes;
  p.communities = k;
  p.lifestyles = l;
  p.alpha = spec.alpha;
  p.horizon = spec.horizon;
  p.jitter_sd = spec.jitter_sd >= 0.0 ? spec.jitter_sd : spec.horizon / 200.0;
  p.pair_mode = spec.pair_mode;

  p.lifestyle_probs = Eigen::VectorXd::Constant(l, (1.0 - spec.foreground_fraction) / static_cast<double>(bg_l));
  p.lifestyle_probs(l - 2) = p.lifestyle_probs(l - 1) = spec.foreground_fraction / 2.0;

  p.concentration = Eigen::MatrixXd::Zero(l, k);
  for (Index s = 0; s < bg_l; ++s) {
    Eigen::VectorXd w(bg_k);
    for (Index c = 0; c < bg_k; ++c) {
      const Index offset = ((c - s) % bg_k + bg_k) % bg_k;
      w(c) = std::pow(1.0 + static_cast<double>(offset), -spec.membership_exponent);
    }
    p.concentration.block(s, 0, 1, bg_k) = spec.concentration * w.transpose() / w.sum();
  }
  const double fg_mass = spec.concentration * spec.foreground_share;
  const double rest = spec.concentration * (1.0 - spec.foreground_share);
  p.concentration(l - 2, fg_k) = fg_mass;
  p.concentration.block(l - 2, 0, 1, bg_k).setConstant(rest / static_cast<double>(bg_k));
  const Index focused = std::clamp<Index>(spec.focused_communities, 1, bg_k);
  p.concentration(l - 1, fg_k) = fg_mass;
  p.concentration.block(l - 1, 0, 1, focused).setConstant(rest / static_cast<double>(focused));

  p.rates = Eigen::MatrixXd::Constant(k, k, spec.rate_diagonal * spec.rate_offdiagonal_ratio);
  p.rates.diagonal().setConstant(spec.rate_diagonal);

  p.sparsity = Eigen::MatrixXd::Constant(k, k, spec.sparsity_offdiagonal);
  const Eigen::VectorXd sizes = expected_community_sizes(p);
  for (Index c = 0; c < k; ++c) {
    const double scale = c == fg_k ? spec.sparsity_foreground_scale : spec.sparsity_background_scale;
    p.sparsity(c, c) = std::min(1.0, scale * connectivity_level(sizes(c)));
  }

  p.meetings = Eigen::VectorXd::Constant(k, spec.meetings_background);
  p.meetings(fg_k) = spec.meetings_foreground;

  p.foreground_lifestyles = {l - 2, l - 1};
  p.foreground_communities = {fg_k};
  for (Index c = 0; c < k; ++c) p.connected_communities.push_back(c);
  return p;
}

}  // namespace netdet
