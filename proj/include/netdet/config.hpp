#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "netdet/blockmodel.hpp"
#include "netdet/evaluation.hpp"

namespace netdet {

enum class ValueType { integer, real, real_or_auto, boolean, text, vector, matrix };

struct KeySpec {
  std::string key;
  ValueType type;
  std::string default_value;
  std::string doc;
  /// Extra constraint on the parsed value; returns an empty string when valid.
  std::function<std::string(const std::string&)> check;
};

/// Flat namespaced key-value configuration. Text format: one `key = value`
/// per line, `#` starts a comment. Lists are comma separated, matrix rows are
/// separated by `;`.
class Config {
 public:
  static const std::vector<KeySpec>& schema();

  Config();

  static Config parse(std::istream& in, const std::string& source = "<config>");
  static Config load(const std::filesystem::path& path);

  /// Throws ValidationError naming the key on unknown keys, type mismatches
  /// and constraint violations.
  void set(const std::string& key, const std::string& value);

  const std::string& raw(const std::string& key) const;
  bool is_auto(const std::string& key) const;
  bool is_empty(const std::string& key) const;
  long long get_int(const std::string& key) const;
  double get_double(const std::string& key) const;
  bool get_bool(const std::string& key) const;
  const std::string& get_string(const std::string& key) const;
  Eigen::VectorXd get_vector(const std::string& key) const;
  Eigen::MatrixXd get_matrix(const std::string& key) const;
  std::vector<std::string> get_list(const std::string& key) const;

  /// Every key with its resolved value, in schema order.
  std::string echo() const;

  bool operator==(const Config& other) const { return values_ == other.values_; }

 private:
  std::map<std::string, std::string> values_;
};

BaselineSpec baseline_from_config(const Config& cfg);

/// Baseline model with any explicit model.phi / model.X / model.B /
/// model.S / model.psi overrides applied.
BlockmodelParams model_from_config(const Config& cfg);

ExperimentConfig experiment_from_config(const Config& cfg);

}  // namespace netdet
