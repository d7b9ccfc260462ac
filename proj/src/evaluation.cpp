#include "netdet/evaluation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <thread>

namespace netdet {

Cue sample_cue(const GeneratedNetwork& net, Rng& rng) {
  const Index n = net.labels.size();
  std::vector<std::vector<double>> stamps(static_cast<std::size_t>(n));
  for (const auto& t : net.tracks.tracks()) {
    stamps[static_cast<std::size_t>(t.src)].push_back(t.depart);
    stamps[static_cast<std::size_t>(t.dst)].push_back(t.arrive);
  }
  std::vector<Index> eligible;
  for (Index v = 0; v < n; ++v) {
    if (net.labels(v) == 1 && !stamps[static_cast<std::size_t>(v)].empty()) eligible.push_back(v);
  }
  if (eligible.empty()) throw ValidationError("no foreground node has an incident track to cue");
  std::uniform_int_distribution<std::size_t> pick_node(0, eligible.size() - 1);
  const Index v = eligible[pick_node(rng)];
  const auto& times = stamps[static_cast<std::size_t>(v)];
  std::uniform_int_distribution<std::size_t> pick_time(0, times.size() - 1);
  return Cue{v, times[pick_time(rng)], 1.0};
}

RocCurve roc(const VertexScores& scores, const Eigen::VectorXi& labels, std::span<const Index> exclude) {
  const Index n = scores.values.size();
  if (labels.size() != n) throw ValidationError("label count does not match score count");
  if (!scores.values.allFinite()) throw ValidationError("scores must be finite");
  std::vector<char> skip(static_cast<std::size_t>(n), 0);
  for (Index v : exclude) {
    if (v >= 0 && v < n) skip[static_cast<std::size_t>(v)] = 1;
  }

  std::vector<Index> order;
  RocCurve curve;
  for (Index v = 0; v < n; ++v) {
    if (skip[static_cast<std::size_t>(v)]) continue;
    if (labels(v) != 0 && labels(v) != 1) throw ValidationError("labels must be 0 or 1");
    order.push_back(v);
    (labels(v) == 1 ? curve.positives : curve.negatives) += 1;
  }
  if (curve.positives == 0 || curve.negatives == 0) {
    throw ValidationError("ROC needs both foreground and background vertices");
  }
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return scores.values(a) > scores.values(b); });

  const double pos = static_cast<double>(curve.positives);
  const double neg = static_cast<double>(curve.negatives);
  curve.points.push_back({std::numeric_limits<double>::infinity(), 0.0, 0.0});
  Index tp = 0, fp = 0;
  for (std::size_t i = 0; i < order.size();) {
    const double s = scores.values(order[i]);
    for (; i < order.size() && scores.values(order[i]) == s; ++i) {
      (labels(order[i]) == 1 ? tp : fp) += 1;
    }
    curve.points.push_back({s, static_cast<double>(fp) / neg, static_cast<double>(tp) / pos});
  }
  curve.auc = auc(curve);
  return curve;
}

double auc(std::span<const RocPoint> points) {
  double area = 0.0;
  for (std::size_t i = 1; i < points.size(); ++i) {
    area += (points[i].pfa - points[i - 1].pfa) * (points[i].pd + points[i - 1].pd) / 2.0;
  }
  return area;
}

double auc(const RocCurve& curve) { return auc(std::span<const RocPoint>(curve.points)); }

Eigen::VectorXd interpolate_pd(const RocCurve& curve, const Eigen::VectorXd& pfa_grid) {
  const auto& pts = curve.points;
  Eigen::VectorXd pd(pfa_grid.size());
  for (Index g = 0; g < pfa_grid.size(); ++g) {
    const double x = pfa_grid(g);
    std::optional<double> exact;
    std::size_t left = 0;
    std::size_t right = pts.size() - 1;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (pts[i].pfa == x) exact = std::max(exact.value_or(0.0), pts[i].pd);
      if (pts[i].pfa < x) left = i;
    }
    if (exact) {
      pd(g) = *exact;
      continue;
    }
    for (std::size_t i = pts.size(); i-- > 0;) {
      if (pts[i].pfa > x) right = i;
    }
    const auto& a = pts[left];
    const auto& b = pts[right];
    const double span = b.pfa - a.pfa;
    pd(g) = span > 0.0 ? a.pd + (b.pd - a.pd) * (x - a.pfa) / span : b.pd;
  }
  return pd;
}

std::string to_string(Detector d) {
  switch (d) {
    case Detector::sttp: return "sttp";
    case Detector::spec: return "spec";
    case Detector::noise: return "noise";
  }
  return "unknown";
}

Detector detector_from_string(const std::string& s) {
  if (s == "sttp") return Detector::sttp;
  if (s == "spec") return Detector::spec;
  if (s == "noise") return Detector::noise;
  throw ValidationError("unknown detector '" + s + "'");
}

void ExperimentConfig::validate() const {
  model.validate();
  if (trials < 1) throw ValidationError("trial count must be >= 1");
  if (detectors.empty()) throw ValidationError("no detector selected");
  if (pfa_grid.size() < 2 || pfa_grid.minCoeff() < 0.0 || pfa_grid.maxCoeff() > 1.0) {
    throw ValidationError("PFA grid must have at least two points in [0,1]");
  }
  for (Index i = 1; i < pfa_grid.size(); ++i) {
    if (!(pfa_grid(i) > pfa_grid(i - 1))) throw ValidationError("PFA grid must be strictly increasing");
  }
  if (bins < 1) throw ValidationError("time bin count must be >= 1");
  if (workers < 1) throw ValidationError("worker count must be >= 1");
}

VertexScores run_detector(Detector d, const GeneratedNetwork& net, const Cue& cue, const ExperimentConfig& cfg,
                          Rng& noise_rng) {
  switch (d) {
    case Detector::sttp: {
      const TimeGrid grid(cfg.model.horizon, cfg.bins);
      const auto kernel = cfg.kernel_rate > 0.0 ? ThreatKernelParams::uniform(net.tracks.order(), cfg.kernel_rate)
                                                : ThreatKernelParams::default_for(net.tracks.order(), cfg.model.horizon);
      const Cue cues[] = {cue};
      return sttp_scores(net.tracks, grid, kernel, cues, cfg.sttp).scores;
    }
    case Detector::spec:
      return modularity_detect(net.tracks.static_graph(), cfg.spec).scores;
    case Detector::noise: {
      std::uniform_real_distribution<double> unit(0.0, 1.0);
      VertexScores s{Eigen::VectorXd(net.labels.size()), ScoreMethod::noise};
      for (Index v = 0; v < s.values.size(); ++v) s.values(v) = unit(noise_rng);
      return s;
    }
  }
  throw ValidationError("unknown detector");
}

namespace {

struct TrialOutcome {
  bool ok = false;
  std::string reason;
  std::vector<Eigen::VectorXd> pd;  // per detector, on the PFA grid
  std::vector<double> auc;
  Index negatives = 0;
};

TrialOutcome run_trial(const ExperimentConfig& cfg, Index trial) {
  TrialOutcome out;
  const std::uint64_t seed = cfg.seed + static_cast<std::uint64_t>(trial);
  try {
    const GeneratedNetwork net = generate(cfg.model, seed);
    Rng cue_rng = stage_rng(seed, 100);
    Rng noise_rng = stage_rng(seed, 101);
    const Cue cue = sample_cue(net, cue_rng);
    const Index exclude[] = {cue.vertex};
    for (Detector d : cfg.detectors) {
      const VertexScores scores = run_detector(d, net, cue, cfg, noise_rng);
      const RocCurve curve = roc(scores, net.labels, exclude);
      out.pd.push_back(interpolate_pd(curve, cfg.pfa_grid));
      out.auc.push_back(curve.auc);
      out.negatives = curve.negatives;
    }
    out.ok = true;
  } catch (const std::exception& e) {
    out.reason = "trial " + std::to_string(trial) + ": " + e.what();
  }
  return out;
}

}  // namespace

MonteCarloResult monte_carlo(const ExperimentConfig& cfg) {
  cfg.validate();
  std::vector<TrialOutcome> outcomes(static_cast<std::size_t>(cfg.trials));
  std::atomic<Index> next{0};
  auto work = [&] {
    for (Index t = next++; t < cfg.trials; t = next++) outcomes[static_cast<std::size_t>(t)] = run_trial(cfg, t);
  };
  const Index workers = std::min(cfg.workers, cfg.trials);
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (Index w = 0; w < workers; ++w) pool.emplace_back(work);
  }

  MonteCarloResult res;
  res.pfa_grid = cfg.pfa_grid;
  const Index g = cfg.pfa_grid.size();
  const std::size_t nd = cfg.detectors.size();
  std::vector<Eigen::VectorXd> sum(nd, Eigen::VectorXd::Zero(g)), sumsq(nd, Eigen::VectorXd::Zero(g));
  std::vector<Eigen::VectorXd> fa(nd, Eigen::VectorXd::Zero(g));
  res.detectors.resize(nd);
  for (std::size_t d = 0; d < nd; ++d) res.detectors[d].detector = cfg.detectors[d];

  // Merge in trial order so the result does not depend on scheduling.
  for (const auto& o : outcomes) {
    if (!o.ok) {
      ++res.aborted;
      res.abort_reasons.push_back(o.reason);
      continue;
    }
    ++res.completed;
    for (std::size_t d = 0; d < nd; ++d) {
      sum[d] += o.pd[d];
      sumsq[d] += o.pd[d].cwiseProduct(o.pd[d]);
      fa[d] += cfg.pfa_grid * static_cast<double>(o.negatives);
      res.detectors[d].trial_auc.push_back(o.auc[d]);
    }
  }
  if (static_cast<double>(res.aborted) > 0.1 * static_cast<double>(cfg.trials)) {
    throw std::runtime_error(std::to_string(res.aborted) + " of " + std::to_string(cfg.trials) +
                             " trials aborted (first: " + res.abort_reasons.front() + ")");
  }

  const auto m = static_cast<double>(res.completed);
  for (std::size_t d = 0; d < nd; ++d) {
    auto& s = res.detectors[d];
    s.pd_mean = sum[d] / m;
    s.false_alarms = fa[d] / m;
    if (res.completed > 1) {
      const Eigen::VectorXd var = ((sumsq[d] / m - s.pd_mean.cwiseProduct(s.pd_mean)) * m / (m - 1.0)).cwiseMax(0.0);
      s.pd_stderr = (var / m).cwiseSqrt();
    } else {
      s.pd_stderr = Eigen::VectorXd::Zero(g);
    }
    const double mean_auc = std::accumulate(s.trial_auc.begin(), s.trial_auc.end(), 0.0) / m;
    double ss = 0.0;
    for (double a : s.trial_auc) ss += (a - mean_auc) * (a - mean_auc);
    s.auc_mean = mean_auc;
    s.auc_stderr = res.completed > 1 ? std::sqrt(ss / (m - 1.0) / m) : 0.0;
  }
  return res;
}

}  // namespace netdet
