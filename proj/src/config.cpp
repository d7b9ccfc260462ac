#include "netdet/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace netdet {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) parts.push_back(trim(cur));
  if (!s.empty() && s.back() == sep) parts.emplace_back();
  return parts;
}

bool parse_int(const std::string& s, long long& out) {
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end;
}

bool parse_real(const std::string& s, double& out) {
  if (s.empty()) return false;
  char* end = nullptr;
  out = std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size() && std::isfinite(out);
}

std::string check_type(ValueType type, const std::string& v) {
  long long i = 0;
  double d = 0.0;
  switch (type) {
    case ValueType::integer:
      return parse_int(v, i) ? "" : "expected an integer";
    case ValueType::real:
      return parse_real(v, d) ? "" : "expected a real number";
    case ValueType::real_or_auto:
      return v == "auto" || parse_real(v, d) ? "" : "expected a real number or 'auto'";
    case ValueType::boolean:
      return v == "true" || v == "false" ? "" : "expected true or false";
    case ValueType::text:
      return "";
    case ValueType::vector:
      if (v.empty()) return "";
      for (const auto& part : split(v, ',')) {
        if (!parse_real(part, d)) return "expected a comma-separated list of reals";
      }
      return "";
    case ValueType::matrix: {
      if (v.empty()) return "";
      std::size_t width = 0;
      for (const auto& row : split(v, ';')) {
        const auto cells = split(row, ',');
        if (width == 0) width = cells.size();
        if (cells.size() != width) return "matrix rows have different lengths";
        for (const auto& c : cells) {
          if (!parse_real(c, d)) return "expected ';'-separated rows of comma-separated reals";
        }
      }
      return "";
    }
  }
  return "";
}

std::function<std::string(const std::string&)> int_at_least(long long lo) {
  return [lo](const std::string& v) {
    long long x = 0;
    parse_int(v, x);
    return x >= lo ? std::string() : "must be >= " + std::to_string(lo);
  };
}

std::function<std::string(const std::string&)> real_in(double lo, double hi, bool open_lo, bool open_hi) {
  return [=](const std::string& v) {
    if (v == "auto") return std::string();
    double x = 0.0;
    parse_real(v, x);
    const bool ok = (open_lo ? x > lo : x >= lo) && (open_hi ? x < hi : x <= hi);
    if (ok) return std::string();
    return std::string("must lie in ") + (open_lo ? "(" : "[") + std::to_string(lo) + "," + std::to_string(hi) +
           (open_hi ? ")" : "]");
  };
}

std::function<std::string(const std::string&)> one_of(std::vector<std::string> options) {
  return [options](const std::string& v) {
    if (std::find(options.begin(), options.end(), v) != options.end()) return std::string();
    std::string msg = "must be one of";
    for (const auto& o : options) msg += " " + o;
    return msg;
  };
}

constexpr double kInf = 1e300;

std::vector<KeySpec> build_schema() {
  using VT = ValueType;
  return {
      {"model.N", VT::integer, "256", "number of nodes", int_at_least(1)},
      {"model.K", VT::integer, "10", "number of communities (last one is the foreground community)", int_at_least(2)},
      {"model.L", VT::integer, "11", "number of lifestyles (last two are foreground)", int_at_least(3)},
      {"model.T", VT::real, "86400", "simulation horizon in seconds", real_in(0, kInf, true, false)},
      {"model.alpha", VT::real, "2.5", "power-law exponent of expected degrees", real_in(1, kInf, true, false)},
      {"model.degree_min", VT::real, "1", "lower end of the expected-degree support", real_in(0, kInf, true, false)},
      {"model.degree_max", VT::real_or_auto, "auto", "upper end of the expected-degree support (auto: sqrt(N))",
       real_in(0, kInf, true, false)},
      {"model.jitter_sd", VT::real_or_auto, "auto", "std. dev. of arrival jitter in seconds (auto: T/200)",
       real_in(0, kInf, false, false)},
      {"model.fg_fraction", VT::real, "0.06", "population fraction in foreground lifestyles", real_in(0, 1, true, true)},
      {"model.fg_share", VT::real, "0.8", "Dirichlet-mean share of foreground nodes in the foreground community",
       real_in(0, 1, true, false)},
      {"model.fg_focus", VT::integer, "2", "background communities favoured by the focused foreground lifestyle",
       int_at_least(1)},
      {"model.concentration", VT::real, "1", "total Dirichlet concentration of each lifestyle",
       real_in(0, kInf, true, false)},
      {"model.membership_exponent", VT::real, "2",
       "power-law decay of background lifestyle membership across communities", real_in(0, kInf, false, false)},
      {"model.B_diag", VT::real, "1024", "within-community interaction rate", real_in(0, kInf, false, false)},
      {"model.B_offdiag_ratio", VT::real, "0.1", "cross-community rate as a fraction of B_diag",
       real_in(0, 1, false, false)},
      {"model.S_bg_scale", VT::real, "1", "background S diagonal in units of log(N_k)/N_k",
       real_in(1, kInf, false, false)},
      {"model.S_fg_scale", VT::real, "1", "foreground S diagonal in units of log(N_k)/N_k",
       real_in(1, kInf, false, false)},
      {"model.S_offdiag", VT::real, "0.01", "cross-community activation probability", real_in(0, 1, false, false)},
      {"model.psi_bg", VT::real, "20", "expected meeting times of background communities",
       real_in(1, kInf, false, false)},
      {"model.psi_fg", VT::real, "20", "expected meeting times of the foreground community",
       real_in(1, kInf, false, false)},
      {"model.pair_mode", VT::text, "fixed", "pair community draw: fixed (once per pair) or per_interaction",
       one_of({"fixed", "per_interaction"})},
      {"model.phi", VT::vector, "", "explicit lifestyle probabilities (overrides the baseline)", nullptr},
      {"model.X", VT::matrix, "", "explicit L x K concentration matrix (overrides the baseline)", nullptr},
      {"model.B", VT::matrix, "", "explicit K x K rate matrix (overrides the baseline)", nullptr},
      {"model.S", VT::matrix, "", "explicit K x K sparsity matrix (overrides the baseline)", nullptr},
      {"model.psi", VT::vector, "", "explicit per-community meeting counts (overrides psi_bg/psi_fg)", nullptr},
      {"sttp.bins", VT::integer, "64", "time bins over the horizon", int_at_least(1)},
      {"sttp.lambda", VT::real_or_auto, "auto", "threat kernel rate in 1/s (auto: 4/T)", real_in(0, kInf, true, false)},
      {"sttp.tol", VT::real, "1e-12", "absolute residual tolerance of the harmonic solve",
       real_in(0, kInf, true, false)},
      {"sttp.max_iter", VT::integer, "1000", "iteration cap of the harmonic solve", int_at_least(1)},
      {"sttp.aggregate", VT::text, "max", "per-vertex aggregate over time bins: max or mean", one_of({"max", "mean"})},
      {"sttp.cue_mode", VT::text, "kernel", "cue boundary values: kernel (decaying) or impulse",
       one_of({"kernel", "impulse"})},
      {"spec.tol", VT::real, "1e-08", "eigensolver residual tolerance", real_in(0, kInf, true, false)},
      {"spec.eigen_index", VT::integer, "0", "modularity eigenvector to threshold (0: principal)", int_at_least(0)},
      {"spec.magnitude", VT::boolean, "false", "score by |entry| instead of the signed entry", nullptr},
      {"mc.trials", VT::integer, "100", "Monte Carlo trials", int_at_least(1)},
      {"mc.seed", VT::integer, "1", "master seed; trial t uses seed + t", int_at_least(0)},
      {"mc.workers", VT::integer, "1", "worker threads", int_at_least(1)},
      {"mc.detectors", VT::text, "sttp,spec", "comma-separated detectors: sttp, spec, noise",
       [](const std::string& v) {
         for (const auto& d : split(v, ',')) {
           if (d != "sttp" && d != "spec" && d != "noise") return "unknown detector '" + d + "'";
         }
         return std::string();
       }},
      {"mc.pfa_points", VT::integer, "101", "points of the uniform PFA averaging grid", int_at_least(2)},
      {"mc.sweep_key", VT::text, "", "optional key swept by the mc command", nullptr},
      {"mc.sweep_values", VT::text, "", "comma-separated values for mc.sweep_key", nullptr},
  };
}

const KeySpec& spec_for(const std::string& key) {
  const auto& s = Config::schema();
  auto it = std::find_if(s.begin(), s.end(), [&](const KeySpec& k) { return k.key == key; });
  if (it == s.end()) throw ValidationError("unknown config key '" + key + "'");
  return *it;
}

}  // namespace

const std::vector<KeySpec>& Config::schema() {
  static const std::vector<KeySpec> s = build_schema();
  return s;
}

Config::Config() {
  for (const auto& k : schema()) values_[k.key] = k.default_value;
}

void Config::set(const std::string& key, const std::string& value) {
  const KeySpec& spec = spec_for(key);
  const std::string v = trim(value);
  if (auto err = check_type(spec.type, v); !err.empty()) {
    throw ValidationError("config key '" + key + "': " + err + " (got '" + v + "')");
  }
  if (spec.check && !(v.empty() && (spec.type == ValueType::vector || spec.type == ValueType::matrix))) {
    if (auto err = spec.check(v); !err.empty()) throw ValidationError("config key '" + key + "': " + err);
  }
  if (key == "mc.sweep_key" && !v.empty()) {
    spec_for(v);
    if (v.rfind("mc.", 0) == 0) throw ValidationError("config key 'mc.sweep_key': cannot sweep an mc.* key");
  }
  values_[key] = v;
}

Config Config::parse(std::istream& in, const std::string& source) {
  Config cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw ValidationError(source + ":" + std::to_string(lineno) + ": expected 'key = value'");
    }
    cfg.set(trim(body.substr(0, eq)), body.substr(eq + 1));
  }
  return cfg;
}

Config Config::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file " + path.string());
  return parse(in, path.string());
}

const std::string& Config::raw(const std::string& key) const {
  spec_for(key);
  return values_.at(key);
}

bool Config::is_auto(const std::string& key) const { return raw(key) == "auto"; }
bool Config::is_empty(const std::string& key) const { return raw(key).empty(); }

long long Config::get_int(const std::string& key) const {
  long long x = 0;
  if (!parse_int(raw(key), x)) throw ValidationError("config key '" + key + "' is not an integer");
  return x;
}

double Config::get_double(const std::string& key) const {
  double x = 0.0;
  if (!parse_real(raw(key), x)) throw ValidationError("config key '" + key + "' is not a real number");
  return x;
}

bool Config::get_bool(const std::string& key) const { return raw(key) == "true"; }

const std::string& Config::get_string(const std::string& key) const { return raw(key); }

std::vector<std::string> Config::get_list(const std::string& key) const {
  if (raw(key).empty()) return {};
  return split(raw(key), ',');
}

Eigen::VectorXd Config::get_vector(const std::string& key) const {
  const auto parts = get_list(key);
  Eigen::VectorXd v(static_cast<Index>(parts.size()));
  for (std::size_t i = 0; i < parts.size(); ++i) parse_real(parts[i], v(static_cast<Index>(i)));
  return v;
}

Eigen::MatrixXd Config::get_matrix(const std::string& key) const {
  if (raw(key).empty()) return {};
  const auto rows = split(raw(key), ';');
  const auto width = split(rows.front(), ',').size();
  Eigen::MatrixXd m(static_cast<Index>(rows.size()), static_cast<Index>(width));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto cells = split(rows[r], ',');
    for (std::size_t c = 0; c < cells.size(); ++c) parse_real(cells[c], m(static_cast<Index>(r), static_cast<Index>(c)));
  }
  return m;
}

std::string Config::echo() const {
  std::ostringstream out;
  for (const auto& k : schema()) out << k.key << " = " << values_.at(k.key) << "\n";
  return out.str();
}

BaselineSpec baseline_from_config(const Config& cfg) {
  BaselineSpec s;
  s.nodes = cfg.get_int("model.N");
  s.communities = cfg.get_int("model.K");
  s.lifestyles = cfg.get_int("model.L");
  s.horizon = cfg.get_double("model.T");
  s.alpha = cfg.get_double("model.alpha");
  s.jitter_sd = cfg.is_auto("model.jitter_sd") ? -1.0 : cfg.get_double("model.jitter_sd");
  s.foreground_fraction = cfg.get_double("model.fg_fraction");
  s.foreground_share = cfg.get_double("model.fg_share");
  s.focused_communities = cfg.get_int("model.fg_focus");
  s.concentration = cfg.get_double("model.concentration");
  s.membership_exponent = cfg.get_double("model.membership_exponent");
  s.rate_diagonal = cfg.get_double("model.B_diag");
  s.rate_offdiagonal_ratio = cfg.get_double("model.B_offdiag_ratio");
  s.sparsity_background_scale = cfg.get_double("model.S_bg_scale");
  s.sparsity_foreground_scale = cfg.get_double("model.S_fg_scale");
  s.sparsity_offdiagonal = cfg.get_double("model.S_offdiag");
  s.meetings_background = cfg.get_double("model.psi_bg");
  s.meetings_foreground = cfg.get_double("model.psi_fg");
  s.pair_mode = cfg.get_string("model.pair_mode") == "per_interaction" ? PairCommunityMode::per_interaction
                                                                       : PairCommunityMode::fixed_per_pair;
  return s;
}

BlockmodelParams model_from_config(const Config& cfg) {
  BlockmodelParams p = baseline_params(baseline_from_config(cfg));
  p.degree_min = cfg.get_double("model.degree_min");
  p.degree_max = cfg.is_auto("model.degree_max") ? 0.0 : cfg.get_double("model.degree_max");
  if (!cfg.is_empty("model.phi")) p.lifestyle_probs = cfg.get_vector("model.phi");
  if (!cfg.is_empty("model.X")) p.concentration = cfg.get_matrix("model.X");
  if (!cfg.is_empty("model.B")) p.rates = cfg.get_matrix("model.B");
  if (!cfg.is_empty("model.psi")) p.meetings = cfg.get_vector("model.psi");
  if (!cfg.is_empty("model.S")) {
    p.sparsity = cfg.get_matrix("model.S");
    // Explicit sparsity is taken as given; only the shape checks apply.
    p.connected_communities.clear();
  }
  p.validate();
  return p;
}

ExperimentConfig experiment_from_config(const Config& cfg) {
  ExperimentConfig e;
  e.model = model_from_config(cfg);
  e.detectors.clear();
  for (const auto& d : cfg.get_list("mc.detectors")) e.detectors.push_back(detector_from_string(d));
  e.trials = cfg.get_int("mc.trials");
  e.seed = static_cast<std::uint64_t>(cfg.get_int("mc.seed"));
  e.workers = cfg.get_int("mc.workers");
  e.pfa_grid = Eigen::VectorXd::LinSpaced(cfg.get_int("mc.pfa_points"), 0.0, 1.0);
  e.bins = cfg.get_int("sttp.bins");
  e.kernel_rate = cfg.is_auto("sttp.lambda") ? 0.0 : cfg.get_double("sttp.lambda");
  e.sttp.solve.tol = cfg.get_double("sttp.tol");
  e.sttp.solve.max_iter = cfg.get_int("sttp.max_iter");
  e.sttp.aggregate = cfg.get_string("sttp.aggregate") == "mean" ? BinAggregate::mean : BinAggregate::max;
  e.sttp.spread = cfg.get_string("sttp.cue_mode") == "impulse" ? CueSpread::impulse : CueSpread::kernel;
  e.spec.eigen.tol = cfg.get_double("spec.tol");
  e.spec.eigenvector_index = cfg.get_int("spec.eigen_index");
  e.spec.magnitude = cfg.get_bool("spec.magnitude");
  e.validate();
  return e;
}

}  // namespace netdet
