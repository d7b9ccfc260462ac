#include "netdet/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace netdet::io {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

std::string where(const std::filesystem::path& path, std::size_t row) {
  return path.string() + ":" + std::to_string(row + 2);
}

long long to_int(const std::string& s, const std::filesystem::path& path, std::size_t row) {
  long long x = 0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, x);
  if (ec != std::errc() || ptr != end) throw ValidationError(where(path, row) + ": expected an integer, got '" + s + "'");
  return x;
}

double to_real(const std::string& s, const std::filesystem::path& path, std::size_t row) {
  char* end = nullptr;
  const double x = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || !std::isfinite(x)) {
    throw ValidationError(where(path, row) + ": expected a real number, got '" + s + "'");
  }
  return x;
}

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write " + path.string());
  return out;
}

}  // namespace

std::string format_real(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path, const std::string& header) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || trim(line) != header) {
    throw ValidationError(path.string() + ": expected header '" + header + "'");
  }
  const auto width = split_row(header).size();
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    auto cells = split_row(trim(line));
    if (cells.size() != width) {
      throw ValidationError(where(path, rows.size()) + ": expected " + std::to_string(width) + " columns");
    }
    rows.push_back(std::move(cells));
  }
  return rows;
}

EdgeList read_edge_list(const std::filesystem::path& path, std::optional<Index> vertices) {
  const auto rows = read_csv(path, "src,dst");
  EdgeList out;
  Index top = -1;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const Index u = to_int(rows[r][0], path, r);
    const Index v = to_int(rows[r][1], path, r);
    out.arcs.emplace_back(u, v);
    top = std::max({top, u, v});
  }
  out.vertices = vertices.value_or(top + 1);
  return out;
}

std::vector<Track> read_tracks(const std::filesystem::path& path) {
  const auto rows = read_csv(path, "track_id,src,dst,depart,arrive");
  std::vector<Track> tracks;
  tracks.reserve(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    tracks.push_back({to_int(rows[r][0], path, r), to_int(rows[r][1], path, r), to_int(rows[r][2], path, r),
                      to_real(rows[r][3], path, r), to_real(rows[r][4], path, r)});
  }
  return tracks;
}

void write_tracks(const std::filesystem::path& path, const TrackGraph& tracks) {
  auto out = open_out(path);
  out << "track_id,src,dst,depart,arrive\n";
  for (const auto& t : tracks.tracks()) {
    out << t.id << ',' << t.src << ',' << t.dst << ',' << format_real(t.depart) << ',' << format_real(t.arrive)
        << '\n';
  }
}

std::vector<Cue> read_cues(const std::filesystem::path& path) {
  const auto rows = read_csv(path, "vertex,time,value");
  std::vector<Cue> cues;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    cues.push_back({to_int(rows[r][0], path, r), to_real(rows[r][1], path, r), to_real(rows[r][2], path, r)});
  }
  return cues;
}

void write_cues(const std::filesystem::path& path, const std::vector<Cue>& cues) {
  auto out = open_out(path);
  out << "vertex,time,value\n";
  for (const auto& c : cues) out << c.vertex << ',' << format_real(c.time) << ',' << format_real(c.value) << '\n';
}

Eigen::VectorXi read_labels(const std::filesystem::path& path) {
  const auto rows = read_csv(path, "vertex,label");
  Index top = -1;
  for (std::size_t r = 0; r < rows.size(); ++r) top = std::max<Index>(top, to_int(rows[r][0], path, r));
  Eigen::VectorXi labels = Eigen::VectorXi::Constant(top + 1, -1);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const Index v = to_int(rows[r][0], path, r);
    const auto label = to_int(rows[r][1], path, r);
    if (v < 0 || (label != 0 && label != 1)) throw ValidationError(where(path, r) + ": labels must be 0 or 1");
    labels(v) = static_cast<int>(label);
  }
  if (labels.size() > 0 && labels.minCoeff() < 0) throw ValidationError(path.string() + ": missing vertex labels");
  return labels;
}

void write_labels(const std::filesystem::path& path, const Eigen::VectorXi& labels) {
  auto out = open_out(path);
  out << "vertex,label\n";
  for (Index v = 0; v < labels.size(); ++v) out << v << ',' << labels(v) << '\n';
}

VertexScores read_scores(const std::filesystem::path& path) {
  const auto rows = read_csv(path, "vertex,score,method");
  Index top = -1;
  for (std::size_t r = 0; r < rows.size(); ++r) top = std::max<Index>(top, to_int(rows[r][0], path, r));
  VertexScores s;
  s.values = Eigen::VectorXd::Constant(top + 1, std::nan(""));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const Index v = to_int(rows[r][0], path, r);
    if (v < 0) throw ValidationError(where(path, r) + ": negative vertex");
    s.values(v) = to_real(rows[r][1], path, r);
    s.method = score_method_from_string(rows[r][2]);
  }
  if (!s.values.allFinite()) throw ValidationError(path.string() + ": missing vertex scores");
  return s;
}

void write_scores(const std::filesystem::path& path, const VertexScores& scores) {
  auto out = open_out(path);
  out << "vertex,score,method\n";
  for (Index v = 0; v < scores.values.size(); ++v) {
    out << v << ',' << format_real(scores.values(v)) << ',' << to_string(scores.method) << '\n';
  }
}

void write_roc(const std::filesystem::path& path, const MonteCarloResult& result) {
  auto out = open_out(path);
  out << "pfa,pd_mean,pd_stderr,detector,fa_count\n";
  for (const auto& d : result.detectors) {
    for (Index g = 0; g < result.pfa_grid.size(); ++g) {
      out << format_real(result.pfa_grid(g)) << ',' << format_real(d.pd_mean(g)) << ','
          << format_real(d.pd_stderr(g)) << ',' << to_string(d.detector) << ',' << format_real(d.false_alarms(g))
          << '\n';
    }
  }
}

void write_roc(const std::filesystem::path& path, const RocCurve& curve, const std::string& detector) {
  auto out = open_out(path);
  out << "pfa,pd_mean,pd_stderr,detector,fa_count\n";
  for (const auto& p : curve.points) {
    out << format_real(p.pfa) << ',' << format_real(p.pd) << ",0," << detector << ','
        << format_real(std::round(p.pfa * static_cast<double>(curve.negatives))) << '\n';
  }
}

void write_matrix_dense(std::ostream& out, const Eigen::MatrixXd& m) {
  for (Index r = 0; r < m.rows(); ++r) {
    for (Index c = 0; c < m.cols(); ++c) out << (c ? "," : "") << format_real(m(r, c));
    out << '\n';
  }
}

void write_matrix_triplets(std::ostream& out, const Eigen::SparseMatrix<double>& m) {
  out << "row,col,value\n";
  std::vector<Eigen::Triplet<double>> entries;
  for (Index c = 0; c < m.outerSize(); ++c) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(m, c); it; ++it) entries.emplace_back(it.row(), it.col(), it.value());
  }
  std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
    return a.row() != b.row() ? a.row() < b.row() : a.col() < b.col();
  });
  for (const auto& e : entries) out << e.row() << ',' << e.col() << ',' << format_real(e.value()) << '\n';
}

void write_provenance(const std::filesystem::path& artifact, std::uint64_t seed, const std::string& config_echo,
                      const std::vector<std::pair<std::string, std::string>>& extra) {
  auto out = open_out(artifact.string() + ".provenance");
  out << "artifact = " << artifact.filename().string() << "\n";
  out << "seed = " << seed << "\n";
  for (const auto& [k, v] : extra) out << k << " = " << v << "\n";
  out << config_echo;
}

}  // namespace netdet::io
