// Command-line front end: generate, detect, roc, mc, laplacian.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "netdet/blockmodel.hpp"
#include "netdet/config.hpp"
#include "netdet/evaluation.hpp"
#include "netdet/graph.hpp"
#include "netdet/io.hpp"
#include "netdet/spectral.hpp"
#include "netdet/threat.hpp"

namespace fs = std::filesystem;
using namespace netdet;

namespace {

enum ExitCode { ok = 0, usage = 1, validation = 2, runtime = 3 };

struct ConfigArgs {
  std::string path;
  std::vector<std::string> overrides;
};

void add_config_options(CLI::App* cmd, ConfigArgs& args) {
  cmd->add_option("--config", args.path, "config file (key = value lines)")->check(CLI::ExistingFile);
  cmd->add_option("--set", args.overrides, "override a config key, as key=value")->take_all();
}

/// Config file plus --set overrides plus NETDET_SEED.
Config resolve_config(const ConfigArgs& args) {
  Config cfg = args.path.empty() ? Config() : Config::load(args.path);
  for (const auto& kv : args.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ValidationError("--set expects key=value, got '" + kv + "'");
    cfg.set(CLI::detail::trim_copy(kv.substr(0, eq)), CLI::detail::trim_copy(kv.substr(eq + 1)));
  }
  if (const char* seed = std::getenv("NETDET_SEED")) cfg.set("mc.seed", seed);
  return cfg;
}

std::uint64_t seed_of(const Config& cfg) { return static_cast<std::uint64_t>(cfg.get_int("mc.seed")); }

void write_echo(const fs::path& dir, const Config& cfg) {
  std::ofstream out(dir / "config.echo.cfg");
  if (!out) throw std::runtime_error("cannot write " + (dir / "config.echo.cfg").string());
  out << cfg.echo();
}

fs::path prepare_dir(const std::string& dir) {
  fs::create_directories(dir);
  return fs::path(dir);
}

// generate ------------------------------------------------------------------

struct GenerateArgs {
  ConfigArgs config;
  std::string out;
};

int run_generate(const GenerateArgs& a) {
  const Config cfg = resolve_config(a.config);
  const auto params = model_from_config(cfg);
  const auto seed = seed_of(cfg);
  const auto net = generate(params, seed);
  const auto dir = prepare_dir(a.out);
  write_echo(dir, cfg);
  const std::vector<std::pair<std::string, std::string>> extra{{"command", "generate"}};
  io::write_tracks(dir / "tracks.csv", net.tracks);
  io::write_provenance(dir / "tracks.csv", seed, cfg.echo(), extra);
  io::write_labels(dir / "labels.csv", net.labels);
  io::write_provenance(dir / "labels.csv", seed, cfg.echo(), extra);
  std::cout << "generated " << net.tracks.tracks().size() << " tracks over " << net.tracks.order() << " vertices ("
            << net.labels.sum() << " foreground)\n";
  return ok;
}

// detect --------------------------------------------------------------------

struct DetectArgs {
  ConfigArgs config;
  std::string method = "sttp";
  std::string tracks;
  std::string cues;
  std::string out;
  Index vertices = 0;
};

int run_detect(const DetectArgs& a) {
  const Config cfg = resolve_config(a.config);
  const auto tracks = io::read_tracks(a.tracks);
  if (tracks.empty()) throw ValidationError("empty track list in " + a.tracks);
  std::vector<Cue> cues;
  if (!a.cues.empty()) cues = io::read_cues(a.cues);
  if (a.method == "sttp" && cues.empty()) throw ValidationError("detect --method sttp needs at least one cue");

  Index n = a.vertices;
  for (const auto& t : tracks) n = std::max(n, std::max(t.src, t.dst) + 1);
  for (const auto& c : cues) n = std::max(n, c.vertex + 1);
  const TrackGraph tg(n, cfg.get_double("model.T"), tracks);

  const auto exp = experiment_from_config(cfg);
  VertexScores scores;
  if (a.method == "sttp") {
    const TimeGrid grid(tg.horizon(), exp.bins);
    const auto kernel = exp.kernel_rate > 0.0 ? ThreatKernelParams::uniform(n, exp.kernel_rate)
                                              : ThreatKernelParams::default_for(n, tg.horizon());
    scores = sttp_scores(tg, grid, kernel, cues, exp.sttp).scores;
  } else {
    scores = modularity_detect(tg.static_graph(), exp.spec).scores;
  }
  io::write_scores(a.out, scores);
  io::write_provenance(a.out, seed_of(cfg), cfg.echo(),
                       {{"command", "detect"}, {"method", a.method}, {"tracks", a.tracks}, {"cues", a.cues}});
  return ok;
}

// roc -----------------------------------------------------------------------

struct RocArgs {
  std::string scores;
  std::string labels;
  std::string cues;
  std::string out;
};

int run_roc(const RocArgs& a) {
  const auto scores = io::read_scores(a.scores);
  const auto labels = io::read_labels(a.labels);
  std::vector<Index> exclude;
  if (!a.cues.empty()) {
    for (const auto& c : io::read_cues(a.cues)) exclude.push_back(c.vertex);
  }
  const auto curve = roc(scores, labels, exclude);
  const std::string method(to_string(scores.method));
  io::write_roc(a.out, curve, method);
  io::write_provenance(a.out, 0, "",
                       {{"command", "roc"}, {"scores", a.scores}, {"labels", a.labels}, {"cues", a.cues}});
  std::cout << method << " auc " << io::format_real(curve.auc) << '\n';
  return ok;
}

// mc ------------------------------------------------------------------------

struct McArgs {
  ConfigArgs config;
  std::string out;
};

std::string file_token(const std::string& s) {
  std::string t;
  for (char c : s) t += std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '-' ? c : '_';
  return t;
}

void run_one_mc(const Config& cfg, const fs::path& dir, const std::string& stem, std::ostream& summary,
                const std::string& label) {
  const auto exp = experiment_from_config(cfg);
  const auto result = monte_carlo(exp);
  const auto path = dir / (stem + ".csv");
  io::write_roc(path, result);
  io::write_provenance(path, exp.seed, cfg.echo(),
                       {{"command", "mc"}, {"completed", std::to_string(result.completed)},
                        {"aborted", std::to_string(result.aborted)}});
  for (const auto& d : result.detectors) {
    summary << label << to_string(d.detector) << " auc " << io::format_real(d.auc_mean) << " +- "
            << io::format_real(d.auc_stderr) << " (" << result.completed << " trials, " << result.aborted
            << " aborted)\n";
  }
}

int run_mc(const McArgs& a) {
  const Config cfg = resolve_config(a.config);
  const auto dir = prepare_dir(a.out);
  write_echo(dir, cfg);
  std::ostringstream summary;
  const std::string key = cfg.get_string("mc.sweep_key");
  if (key.empty()) {
    run_one_mc(cfg, dir, "roc", summary, "");
  } else {
    const auto values = cfg.get_list("mc.sweep_values");
    if (values.empty()) throw ValidationError("config key 'mc.sweep_values': empty while mc.sweep_key is set");
    for (const auto& v : values) {
      Config swept = cfg;
      swept.set(key, v);
      run_one_mc(swept, dir, "roc_" + file_token(key) + "_" + file_token(v), summary, key + "=" + v + " ");
    }
  }
  std::ofstream(dir / "summary.txt") << summary.str();
  std::cout << summary.str();
  return ok;
}

// laplacian -----------------------------------------------------------------

struct LaplacianArgs {
  std::string graph;
  std::string kind = "kirchhoff";
  std::string format = "dense";
  std::string out;
  Index vertices = 0;
};

int run_laplacian(const LaplacianArgs& a) {
  const auto el = io::read_edge_list(a.graph, a.vertices > 0 ? std::optional<Index>(a.vertices) : std::nullopt);
  const Graph g = build_graph(el.vertices, el.arcs);
  Eigen::SparseMatrix<double> m;
  if (a.kind == "adjacency") {
    m = adjacency<double>(g);
  } else if (a.kind == "degree") {
    m = degree<double>(g);
  } else if (a.kind == "incidence") {
    // Arcs keep their file direction; a repeated edge takes the first one.
    Orientation o = Orientation::ascending(g);
    std::vector<bool> seen(static_cast<std::size_t>(g.size()), false);
    for (const auto& arc : el.arcs) {
      const auto e = static_cast<std::size_t>(g.edge_index(arc.first, arc.second));
      if (!seen[e]) o.arcs[e] = arc;
      seen[e] = true;
    }
    m = incidence<double>(g, o);
  } else if (a.kind == "kirchhoff") {
    m = kirchhoff<double>(g);
  } else if (a.kind == "normalized") {
    m = normalized_laplacian<double>(g);
  } else {
    m = asymmetric_laplacian<double>(g);
  }
  std::ofstream file;
  if (!a.out.empty()) {
    file.open(a.out);
    if (!file) throw std::runtime_error("cannot write " + a.out);
  }
  std::ostream& out = a.out.empty() ? std::cout : file;
  if (a.format == "dense") {
    io::write_matrix_dense(out, Eigen::MatrixXd(m));
  } else {
    io::write_matrix_triplets(out, m);
  }
  if (!a.out.empty()) {
    file.close();
    io::write_provenance(a.out, 0, "", {{"command", "laplacian"}, {"graph", a.graph}, {"kind", a.kind}});
  }
  return ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Network detection toolkit: threat propagation, spectral detection, blockmodel Monte Carlo"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* generate_cmd = app.add_subcommand("generate", "sample a network: tracks.csv and labels.csv");
  add_config_options(generate_cmd, gen.config);
  generate_cmd->add_option("--out", gen.out, "output directory")->required();

  DetectArgs det;
  auto* detect_cmd = app.add_subcommand("detect", "score vertices of a track file");
  add_config_options(detect_cmd, det.config);
  detect_cmd->add_option("--method", det.method, "sttp or spec")->check(CLI::IsMember({"sttp", "spec"}));
  detect_cmd->add_option("--tracks", det.tracks, "track CSV")->required()->check(CLI::ExistingFile);
  detect_cmd->add_option("--cues", det.cues, "cue CSV (required for sttp)")->check(CLI::ExistingFile);
  detect_cmd->add_option("--vertices", det.vertices, "vertex count (default: inferred)")->check(CLI::NonNegativeNumber);
  detect_cmd->add_option("--out", det.out, "scores CSV")->required();

  RocArgs rc;
  auto* roc_cmd = app.add_subcommand("roc", "ROC curve of a score file against labels");
  roc_cmd->add_option("--scores", rc.scores, "scores CSV")->required()->check(CLI::ExistingFile);
  roc_cmd->add_option("--labels", rc.labels, "labels CSV")->required()->check(CLI::ExistingFile);
  roc_cmd->add_option("--cues", rc.cues, "cue CSV; cued vertices are excluded")->check(CLI::ExistingFile);
  roc_cmd->add_option("--out", rc.out, "ROC CSV")->required();

  McArgs mc;
  auto* mc_cmd = app.add_subcommand("mc", "Monte Carlo ROC averaging, optionally sweeping mc.sweep_key");
  add_config_options(mc_cmd, mc.config);
  mc_cmd->add_option("--out", mc.out, "output directory")->required();

  LaplacianArgs lap;
  auto* lap_cmd = app.add_subcommand("laplacian", "dump a graph matrix of an edge list");
  lap_cmd->add_option("--graph", lap.graph, "edge list CSV (src,dst)")->required()->check(CLI::ExistingFile);
  lap_cmd->add_option("--kind", lap.kind, "adjacency, degree, incidence, kirchhoff, normalized or asymmetric")
      ->check(CLI::IsMember({"adjacency", "degree", "incidence", "kirchhoff", "normalized", "asymmetric"}));
  lap_cmd->add_option("--format", lap.format, "dense or triplets")->check(CLI::IsMember({"dense", "triplets"}));
  lap_cmd->add_option("--vertices", lap.vertices, "vertex count (default: inferred)")->check(CLI::NonNegativeNumber);
  lap_cmd->add_option("--out", lap.out, "output file (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? ok : usage;
  }

  try {
    if (*generate_cmd) return run_generate(gen);
    if (*detect_cmd) return run_detect(det);
    if (*roc_cmd) return run_roc(rc);
    if (*mc_cmd) return run_mc(mc);
    if (*lap_cmd) return run_laplacian(lap);
  } catch (const ValidationError& e) {
    std::cerr << "netdet: " << e.what() << '\n';
    return validation;
  } catch (const std::exception& e) {
    std::cerr << "netdet: " << e.what() << '\n';
    return runtime;
  }
  return usage;
}
