#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "netdet/blockmodel.hpp"
#include "netdet/spectral.hpp"
#include "netdet/threat.hpp"

namespace netdet {

struct RocPoint {
  double threshold = 0.0;
  double pfa = 0.0;
  double pd = 0.0;
};

/// Points ordered by decreasing threshold, from (0,0) to (1,1).
struct RocCurve {
  std::vector<RocPoint> points;
  double auc = 0.0;
  Index positives = 0;
  Index negatives = 0;
};

/// Uniformly pick a foreground node with at least one track, then one of
/// its track timestamps. Throws when no foreground node is eligible.
Cue sample_cue(const GeneratedNetwork& net, Rng& rng);

/// Sweep every distinct score as a threshold (score >= threshold detects);
/// tied scores cross together. Vertices in `exclude` are ignored.
RocCurve roc(const VertexScores& scores, const Eigen::VectorXi& labels, std::span<const Index> exclude = {});

/// Trapezoid area under the (pfa, pd) points.
double auc(const RocCurve& curve);
double auc(std::span<const RocPoint> points);

/// PD at each grid PFA by linear interpolation; on a vertical segment the
/// upper PD is taken.
Eigen::VectorXd interpolate_pd(const RocCurve& curve, const Eigen::VectorXd& pfa_grid);

enum class Detector { sttp, spec, noise };

std::string to_string(Detector d);
Detector detector_from_string(const std::string& s);

struct ExperimentConfig {
  BlockmodelParams model;
  std::vector<Detector> detectors{Detector::sttp, Detector::spec};
  Index trials = 100;
  std::uint64_t seed = 1;
  Eigen::VectorXd pfa_grid = Eigen::VectorXd::LinSpaced(101, 0.0, 1.0);
  /// Time grid bins and kernel rate (rate <= 0 selects 4 / horizon).
  Index bins = 64;
  double kernel_rate = 0.0;
  SttpOptions sttp;
  ModularityOptions spec;
  Index workers = 1;

  void validate() const;
};

struct DetectorSummary {
  Detector detector = Detector::sttp;
  Eigen::VectorXd pd_mean;
  Eigen::VectorXd pd_stderr;
  /// Mean false-alarm count (background vertices detected) at each grid PFA.
  Eigen::VectorXd false_alarms;
  double auc_mean = 0.0;
  double auc_stderr = 0.0;
  std::vector<double> trial_auc;
};

struct MonteCarloResult {
  Eigen::VectorXd pfa_grid;
  std::vector<DetectorSummary> detectors;
  Index completed = 0;
  Index aborted = 0;
  std::vector<std::string> abort_reasons;
};

/// Scores of one detector on one generated network with the given cue.
VertexScores run_detector(Detector d, const GeneratedNetwork& net, const Cue& cue, const ExperimentConfig& cfg,
                          Rng& noise_rng);

/// Trial t uses seed + t for the network. Aborted trials are counted; more
/// than 10% aborted throws.
MonteCarloResult monte_carlo(const ExperimentConfig& cfg);

}  // namespace netdet
