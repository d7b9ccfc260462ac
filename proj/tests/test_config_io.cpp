#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <fstream>
#include <sstream>

#include "netdet/config.hpp"
#include "netdet/io.hpp"

using namespace netdet;

namespace {

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "netdet_config_io_test";
  std::filesystem::create_directories(dir);
  return dir / name;
}

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p);
  out << text;
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

Config parse(const std::string& text) {
  std::istringstream in(text);
  return Config::parse(in);
}

}  // namespace

TEST_CASE("empty config gives the baseline") {
  const Config cfg = parse("");
  CHECK(cfg.get_int("model.N") == 256);
  CHECK(cfg.get_int("model.K") == 10);
  CHECK(cfg.get_int("model.L") == 11);
  CHECK(cfg == Config());
  const auto e = experiment_from_config(cfg);
  CHECK(e.model.nodes == 256);
  CHECK(e.model.communities == 10);
  CHECK(e.model.lifestyles == 11);
  CHECK(e.trials == 100);
  CHECK(e.detectors == std::vector<Detector>{Detector::sttp, Detector::spec});
}

TEST_CASE("parse errors name the key") {
  CHECK_THROWS_WITH_AS(parse("mc.trials = -1"), doctest::Contains("mc.trials"), ValidationError);
  CHECK_THROWS_WITH_AS(parse("model.bogus = 3"), doctest::Contains("model.bogus"), ValidationError);
  CHECK_THROWS_WITH_AS(parse("model.N = many"), doctest::Contains("model.N"), ValidationError);
  CHECK_THROWS_WITH_AS(parse("sttp.aggregate = median"), doctest::Contains("sttp.aggregate"), ValidationError);
  CHECK_THROWS_WITH_AS(parse("model.X = 1,2;3"), doctest::Contains("model.X"), ValidationError);
  CHECK_THROWS_WITH_AS(parse("mc.detectors = sttp,foo"), doctest::Contains("foo"), ValidationError);
  CHECK_THROWS_WITH_AS(parse("mc.sweep_key = model.nope"), doctest::Contains("model.nope"), ValidationError);
  CHECK_THROWS_AS(parse("just words"), ValidationError);
}

TEST_CASE("comments, whitespace and typed accessors") {
  const Config cfg = parse(
      "# header\n"
      "  model.N =  64   # inline\n"
      "model.psi = 1.5, 2, 3\n"
      "model.B = 1,2 ; 3,4\n"
      "sttp.lambda = 0.25\n"
      "spec.magnitude = true\n");
  CHECK(cfg.get_int("model.N") == 64);
  CHECK(cfg.get_vector("model.psi") == Eigen::Vector3d(1.5, 2, 3));
  CHECK(cfg.get_matrix("model.B") == (Eigen::Matrix2d() << 1, 2, 3, 4).finished());
  CHECK_FALSE(cfg.is_auto("sttp.lambda"));
  CHECK(cfg.is_auto("model.jitter_sd"));
  CHECK(cfg.get_bool("spec.magnitude"));
}

TEST_CASE("echo round trip") {
  Config cfg;
  cfg.set("model.psi_fg", "1.5");
  cfg.set("model.X", "1,0;0,1;1,1");
  cfg.set("mc.sweep_key", "model.psi_fg");
  cfg.set("mc.sweep_values", "1.5,20");
  const Config back = parse(cfg.echo());
  CHECK(back == cfg);
  CHECK(back.echo() == cfg.echo());
  CHECK(parse(Config().echo()) == Config());
}

TEST_CASE("explicit model overrides") {
  Config cfg;
  cfg.set("model.K", "2");
  cfg.set("model.L", "3");
  cfg.set("model.N", "20");
  cfg.set("model.phi", "0.5,0.25,0.25");
  cfg.set("model.X", "1,0;0.5,0.5;0,1");
  cfg.set("model.B", "4,1;1,4");
  cfg.set("model.S", "0.5,0.1;0.1,0.5");
  cfg.set("model.psi", "1,3");
  const auto p = model_from_config(cfg);
  CHECK(p.rates(0, 1) == 1.0);
  CHECK(p.sparsity(0, 0) == 0.5);
  CHECK(p.meetings == Eigen::Vector2d(1, 3));
  CHECK(p.connected_communities.empty());

  cfg.set("model.psi", "1,3,4");
  CHECK_THROWS_AS(model_from_config(cfg), ValidationError);
}

TEST_CASE("config files load from disk") {
  const auto path = scratch("small.cfg");
  write_file(path, "model.N = 32\nmc.trials = 3\n");
  const auto cfg = Config::load(path);
  CHECK(cfg.get_int("model.N") == 32);
  CHECK_THROWS_AS(Config::load(scratch("missing.cfg")), ValidationError);
}

TEST_CASE("track, label, cue and score CSV round trips") {
  const std::vector<Track> tracks{{0, 0, 1, 0.1, 2.0 / 3.0}, {1, 2, 0, 1e-300, 5.5}};
  const TrackGraph tg(3, 10.0, tracks);
  const auto tp = scratch("tracks.csv");
  io::write_tracks(tp, tg);
  const auto back = io::read_tracks(tp);
  REQUIRE(back.size() == 2);
  CHECK(back[0].arrive == 2.0 / 3.0);
  CHECK(back[1].depart == 1e-300);
  CHECK(back[1].src == 2);

  const Eigen::Vector3i labels(0, 1, 1);
  const auto lp = scratch("labels.csv");
  io::write_labels(lp, labels);
  CHECK(io::read_labels(lp) == labels);

  const std::vector<Cue> cues{{2, 0.3, 1.0}};
  const auto cp = scratch("cues.csv");
  io::write_cues(cp, cues);
  const auto cb = io::read_cues(cp);
  REQUIRE(cb.size() == 1);
  CHECK(cb[0].vertex == 2);
  CHECK(cb[0].time == 0.3);

  const VertexScores s{Eigen::Vector3d(0.1, -1.0 / 3.0, 7.0), ScoreMethod::modularity};
  const auto sp = scratch("scores.csv");
  io::write_scores(sp, s);
  const auto sb = io::read_scores(sp);
  CHECK(sb.values == s.values);
  CHECK(sb.method == ScoreMethod::modularity);
  CHECK(read_file(sp).rfind("vertex,score,method\n", 0) == 0);
}

TEST_CASE("CSV validation") {
  const auto p = scratch("bad.csv");
  write_file(p, "src,dst\n0,1\n1,x\n");
  CHECK_THROWS_WITH_AS(io::read_edge_list(p), doctest::Contains(":3"), ValidationError);
  write_file(p, "a,b\n0,1\n");
  CHECK_THROWS_AS(io::read_edge_list(p), ValidationError);
  write_file(p, "src,dst\n0,1,2\n");
  CHECK_THROWS_AS(io::read_edge_list(p), ValidationError);
  write_file(p, "vertex,label\n0,1\n1,2\n");
  CHECK_THROWS_AS(io::read_labels(p), ValidationError);

  write_file(p, "src,dst\n0,1\n1,2\n\n");
  const auto el = io::read_edge_list(p);
  CHECK(el.vertices == 3);
  CHECK(el.arcs.size() == 2);
  CHECK(io::read_edge_list(p, 5).vertices == 5);
}

TEST_CASE("number formatting round-trips doubles") {
  for (double x : {0.1, 1.0 / 3.0, -2.5e-17, 6.02214076e23, 0.0}) {
    CHECK(std::strtod(io::format_real(x).c_str(), nullptr) == x);
  }
  CHECK(io::format_real(0.5) == "0.5");
}

TEST_CASE("matrix dumps and provenance") {
  Eigen::Matrix2d m;
  m << 1, -0.5, 0, 2;
  std::ostringstream dense;
  io::write_matrix_dense(dense, m);
  CHECK(dense.str() == "1,-0.5\n0,2\n");

  std::ostringstream trip;
  io::write_matrix_triplets(trip, Eigen::SparseMatrix<double>(m.sparseView()));
  CHECK(trip.str() == "row,col,value\n0,0,1\n0,1,-0.5\n1,1,2\n");

  const auto art = scratch("artifact.csv");
  io::write_provenance(art, 99, Config().echo(), {{"command", "test"}});
  const std::string prov = read_file(art.string() + ".provenance");
  CHECK(prov.find("seed = 99\n") != std::string::npos);
  CHECK(prov.find("command = test\n") != std::string::npos);
  CHECK(prov.find("model.N = 256\n") != std::string::npos);
}
