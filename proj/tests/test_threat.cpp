#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "netdet/threat.hpp"
#include "test_support.hpp"

using namespace netdet;

namespace {

Graph cycle4() {
  const VertexPair e[] = {{0, 1}, {1, 2}, {2, 3}, {0, 3}};
  return build_graph(4, e);
}

}  // namespace

TEST_CASE("threat kernel") {
  CHECK(threat_kernel(0.3, 0.0) == 1.0);
  CHECK(threat_kernel(1.0, std::log(2.0)) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(threat_kernel(0.7, -2.5) == threat_kernel(0.7, 2.5));
  const auto def = ThreatKernelParams::default_for(3, 100.0);
  CHECK(threat_kernel(def.rates(0), 25.0) == doctest::Approx(std::exp(-1.0)));
  CHECK_THROWS_AS(ThreatKernelParams::uniform(2, 0.0), ValidationError);
}

TEST_CASE("time grid") {
  const TimeGrid g(10.0, 4);
  CHECK(g.width() == 2.5);
  CHECK(g.center(0) == 1.25);
  CHECK(g.bin_of(0.0) == 0);
  CHECK(g.bin_of(2.5) == 1);
  CHECK(g.bin_of(10.0) == 3);
  CHECK_THROWS_AS(TimeGrid(10.0, 0), ValidationError);
  CHECK_THROWS_AS(TimeGrid(0.0, 4), ValidationError);
}

TEST_CASE("space-time block structure") {
  const TimeGrid grid(10.0, 5);
  const auto kp = ThreatKernelParams::uniform(2, 0.3);
  const Cue cue{0, 1.0, 1.0};

  const TrackGraph one(2, 10.0, {{0, 0, 1, 1.0, 7.0}});
  const auto sys = build_spacetime_system(one, grid, kp, std::span(&cue, 1));
  const Eigen::MatrixXd a = Eigen::MatrixXd(Eigen::SparseMatrix<double>(sys.adjacency));
  // Block (v,u) is rows 5..9, columns 0..4; only column bin(1.0) = 0 is set.
  CHECK(a.block(5, 0, 5, 5).colwise().sum().cwiseSign().sum() == 1);
  CHECK(a.block(5, 0, 5, 5).col(0).minCoeff() > 0);
  CHECK(a.block(0, 5, 5, 5).col(3).minCoeff() > 0);
  CHECK(a.block(0, 5, 5, 5).colwise().sum().cwiseSign().sum() == 1);
  CHECK(a.block(0, 0, 5, 5).isZero());
  CHECK(a.block(5, 5, 5, 5).isZero());
  CHECK((a - test::dense_adjacency(one.tracks(), 2, grid, 0.3)).cwiseAbs().maxCoeff() <= 1e-15);
  CHECK(sys.weights == Eigen::Vector2d(1, 1));
  CHECK(sys.boundary_vertices == std::vector<Index>{0});

  const TrackGraph two(2, 10.0, {{0, 0, 1, 1.0, 7.0}, {1, 0, 1, 1.0, 7.0}});
  const auto sys2 = build_spacetime_system(two, grid, kp, std::span(&cue, 1));
  CHECK((Eigen::MatrixXd(Eigen::SparseMatrix<double>(sys2.adjacency)) - 2 * a).cwiseAbs().maxCoeff() <= 1e-15);

  const TrackGraph none(3, 10.0, {});
  const auto empty = build_spacetime_system(none, grid, ThreatKernelParams::uniform(3, 0.3), std::span(&cue, 1));
  CHECK(empty.adjacency.nonZeros() == 0);

  const Cue far{7, 1.0, 1.0};
  CHECK_THROWS_AS(build_spacetime_system(one, grid, kp, std::span(&far, 1)), ValidationError);
}

TEST_CASE("static harmonic examples") {
  const VertexPair e[] = {{0, 1}, {1, 2}};
  const Index bd[] = {0, 2};
  const auto p3 = static_system(build_graph(3, e), bd);
  const Eigen::Vector2d b(1.0, 0.0);
  const auto sol = harmonic_solve(p3, b);
  CHECK(sol.theta(1) == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(harmonic_solve_dense(p3, b)(1) == doctest::Approx(0.5).epsilon(1e-12));

  const auto c4 = static_system(cycle4(), bd);
  const auto s4 = harmonic_solve(c4, b);
  CHECK(s4.theta(1) == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(s4.theta(3) == doctest::Approx(0.5).epsilon(1e-9));

  const Index one_b[] = {0};
  const auto c4all = static_system(cycle4(), one_b);
  const auto ones = harmonic_solve(c4all, Eigen::VectorXd::Ones(1));
  CHECK((ones.theta - Eigen::VectorXd::Ones(4)).cwiseAbs().maxCoeff() <= 1e-8);

  CHECK_THROWS_AS(harmonic_solve(static_system(cycle4(), {}), Eigen::VectorXd()), ValidationError);
  CHECK_THROWS_AS(harmonic_solve(c4, Eigen::Vector2d(1.5, 0.0)), ValidationError);
}

TEST_CASE("unit boundary on a stochastic system gives unit threat") {
  std::vector<VertexPair> e;
  for (Index i = 0; i < 6; ++i) {
    for (Index j = i + 1; j < 6; ++j) e.emplace_back(i, j);
  }
  const Index bd[] = {0, 3};
  const auto sys = static_system(build_graph(6, e), bd);
  const auto sol = harmonic_solve(sys, Eigen::VectorXd::Ones(2));
  CHECK((sol.theta - Eigen::VectorXd::Ones(6)).cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("two-vertex track from the cued vertex") {
  const double horizon = 16.0, rate = 0.2;
  const TimeGrid grid(horizon, 8);
  const TrackGraph tg(2, horizon, {{0, 0, 1, 3.0, 9.5}});
  const Cue cue{0, 3.0, 1.0};
  const auto kp = ThreatKernelParams::uniform(2, rate);
  const auto r = sttp_scores(tg, grid, kp, std::span(&cue, 1));
  CHECK(r.scores.values(0) == 1.0);
  // w(v) = 1 and the cue bin carries 1, so theta(v, k) = K(c_k - t_arrive).
  double expect = 0;
  for (Index k = 0; k < 8; ++k) expect = std::max(expect, threat_kernel(rate, grid.center(k) - 9.5));
  CHECK(r.scores.values(1) == doctest::Approx(expect).epsilon(1e-9));

  const Eigen::VectorXd bvals = boundary_values(build_spacetime_system(tg, grid, kp, std::span(&cue, 1)), grid, kp,
                                                std::span(&cue, 1));
  const Eigen::VectorXd dense = test::oracle_theta(tg.tracks(), 2, grid, rate, {0}, bvals);
  CHECK((r.threat.theta - dense).cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("boundary values and cue spread") {
  const TimeGrid grid(10.0, 5);
  const auto kp = ThreatKernelParams::uniform(3, 0.5);
  const TrackGraph tg(3, 10.0, {{0, 0, 1, 1.0, 2.0}, {1, 1, 2, 4.0, 8.0}});
  const Cue cues[] = {{1, 5.0, 0.8}, {1, 9.9, 0.5}};
  const auto sys = build_spacetime_system(tg, grid, kp, cues);
  const Eigen::VectorXd k = boundary_values(sys, grid, kp, cues);
  const Eigen::VectorXd imp = boundary_values(sys, grid, kp, cues, CueSpread::impulse);
  REQUIRE(k.size() == 5);
  CHECK(k(2) == 0.8);
  CHECK(k(4) == doctest::Approx(std::max(0.5, 0.8 * std::exp(-0.5 * 4.0))));
  CHECK(k(0) == doctest::Approx(0.8 * std::exp(-0.5 * 4.0)));
  CHECK(imp == (Eigen::VectorXd(5) << 0, 0, 0.8, 0, 0.5).finished());
}

TEST_CASE("scores: isolated vertices, aggregation and cued vertices") {
  const TimeGrid grid(10.0, 4);
  const auto kp = ThreatKernelParams::uniform(4, 0.3);
  const TrackGraph tg(4, 10.0, {{0, 0, 1, 1.0, 2.0}, {1, 1, 2, 2.5, 6.0}});
  const Cue cue{0, 1.0, 1.0};
  const auto mx = sttp_scores(tg, grid, kp, std::span(&cue, 1));
  CHECK(mx.scores.values(0) == 1.0);
  CHECK(mx.scores.values(3) == 0.0);
  CHECK(mx.scores.values(1) > mx.scores.values(2));
  CHECK(mx.threat.unreachable == 4);

  SttpOptions mean;
  mean.aggregate = BinAggregate::mean;
  const auto mn = sttp_scores(tg, grid, kp, std::span(&cue, 1), mean);
  CHECK(mn.scores.values(1) <= mx.scores.values(1));
  CHECK(mn.scores.values(1) > 0);

  CHECK_THROWS_AS(sttp_scores(tg, grid, kp, {}), ValidationError);
}

TEST_CASE("iterative solve matches the dense oracle on random systems") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 50; ++trial) {
    const Index n = 3 + trial % 18;
    const Index nt = 1 + (trial * 5) % 25;
    if (n * nt > 500) continue;
    const double horizon = 100.0;
    const double rate = 0.01 + 0.02 * (trial % 5);
    const TimeGrid grid(horizon, nt);
    const auto tracks = test::random_tracks(rng, n, 2 + trial % 40, horizon);
    const TrackGraph tg(n, horizon, tracks);
    std::uniform_int_distribution<Index> vertex(0, n - 1);
    std::uniform_real_distribution<double> when(0.0, horizon), value(0.2, 1.0);
    std::vector<Cue> cues{{vertex(rng), when(rng), value(rng)}};
    if (trial % 3 == 0) cues.push_back({vertex(rng), when(rng), value(rng)});

    const auto kp = ThreatKernelParams::uniform(n, rate);
    const auto sys = build_spacetime_system(tg, grid, kp, cues);
    const Eigen::VectorXd b = boundary_values(sys, grid, kp, cues);
    const auto sol = harmonic_solve(sys, b);
    const Eigen::VectorXd ref = test::oracle_theta(tracks, n, grid, rate, sys.boundary_vertices, b);
    CHECK((sol.theta - ref.cwiseMax(0.0).cwiseMin(1.0)).norm() <= 1e-8 * std::max(1.0, ref.norm()));
    CHECK((harmonic_solve_dense(sys, b) - ref).norm() <= 1e-10 * std::max(1.0, ref.norm()));

    CHECK(sol.min_before_clamp >= -1e-10);
    const auto p = transition_matrix(sys);
    for (Index r = 0; r < p.rows(); ++r) CHECK(Eigen::RowVectorXd(p.row(r)).sum() <= 1.0 + 1e-12);
    // Rows that sum to less than one leak toward an implicit zero boundary,
    // so the attainable range is [0, max boundary].
    for (Index x : sys.interior_indices()) {
      CHECK(sol.theta(x) >= 0.0);
      CHECK(sol.theta(x) <= b.maxCoeff() + 1e-9);
    }
  }
}

TEST_CASE("two-sided maximum principle on stochastic static systems") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> value(0.1, 0.9);
  for (int trial = 0; trial < 30; ++trial) {
    const Index n = 4 + trial % 20;
    const Graph g = test::random_connected_graph(rng, n, 0.15);
    std::vector<Index> bd{0, n - 1};
    const auto sys = static_system(g, bd);
    const Eigen::Vector2d b(value(rng), value(rng));
    const auto sol = harmonic_solve(sys, b);
    for (Index x : sys.interior_indices()) {
      CHECK(sol.theta(x) >= b.minCoeff() - 1e-9);
      CHECK(sol.theta(x) <= b.maxCoeff() + 1e-9);
    }
  }
}

TEST_CASE("linearity in the boundary values and determinism") {
  std::mt19937_64 rng(5);
  const TimeGrid grid(100.0, 10);
  const auto tracks = test::random_tracks(rng, 12, 60, 100.0);
  const TrackGraph tg(12, 100.0, tracks);
  const auto kp = ThreatKernelParams::uniform(12, 0.04);
  const Cue cue{3, 40.0, 1.0};
  const auto sys = build_spacetime_system(tg, grid, kp, std::span(&cue, 1));
  const Eigen::VectorXd b = boundary_values(sys, grid, kp, std::span(&cue, 1));
  SolveOptions tight;
  tight.tol = 1e-13;
  const auto full = harmonic_solve(sys, b, tight);
  for (double alpha : {0.25, 0.5, 0.9}) {
    const auto scaled = harmonic_solve(sys, alpha * b, tight);
    CHECK((scaled.theta - alpha * full.theta).cwiseAbs().maxCoeff() <= 1e-10);
    VertexScores s1{full.theta, ScoreMethod::sttp}, s2{scaled.theta, ScoreMethod::sttp};
    CHECK(llr_detect(s1, std::nullopt, 0.3) == llr_detect(s2, std::nullopt, 0.3 * alpha));
  }

  const auto again = sttp_scores(tg, grid, kp, std::span(&cue, 1));
  const auto first = sttp_scores(tg, grid, kp, std::span(&cue, 1));
  CHECK(again.scores.values == first.scores.values);
}

TEST_CASE("unreachable interior blocks are zero") {
  const TimeGrid grid(10.0, 3);
  // Component {2,3} has no path to the cued vertex 0.
  const TrackGraph tg(4, 10.0, {{0, 0, 1, 1.0, 2.0}, {1, 2, 3, 1.0, 2.0}});
  const Cue cue{0, 1.0, 1.0};
  const auto r = sttp_scores(tg, grid, ThreatKernelParams::uniform(4, 0.2), std::span(&cue, 1));
  CHECK(r.scores.values(2) == 0.0);
  CHECK(r.scores.values(3) == 0.0);
  CHECK(r.threat.unreachable >= 6);
}

TEST_CASE("llr_detect") {
  const VertexScores s{(Eigen::VectorXd(4) << 0.1, 0.5, 0.9, 0.3).finished(), ScoreMethod::sttp};
  const double inf = std::numeric_limits<double>::infinity();
  CHECK(llr_detect(s, std::nullopt, -inf).size() == 4);
  CHECK(llr_detect(s, std::nullopt, inf).empty());
  CHECK(llr_detect(s, std::nullopt, 0.4) == std::vector<Index>{1, 2});
  const Eigen::VectorXd w = (Eigen::VectorXd(4) << 1, 2, 3, 0.5).finished();
  CHECK(llr_detect(s, w, 0.25) == llr_detect(s, Eigen::VectorXd(2 * w), 0.125));
  CHECK(llr_detect(s, w, 0.25) == std::vector<Index>{2, 3});
  CHECK_THROWS_AS(llr_detect(s, Eigen::VectorXd::Zero(4).eval(), 0.1), ValidationError);
  CHECK_THROWS_AS(llr_detect(s, std::nullopt, std::nan("")), ValidationError);
}
