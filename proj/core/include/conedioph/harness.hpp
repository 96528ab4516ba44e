#pragma once

#include "conedioph/forms.hpp"
#include "conedioph/wittframe.hpp"

#include <json.hpp>

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace cd {

/// Flat key-value experiment configuration with [section] headers; keys are
/// "section.key", rationals are "p/q" strings, vectors comma-separated.
class ExperimentConfig {
 public:
  static ExperimentConfig from_stream(std::istream& in);
  static ExperimentConfig from_file(const std::string& path);

  bool has(const std::string& key) const;
  void set(const std::string& key, std::string value);

  std::string get_string(const std::string& key, const std::string& fallback) const;
  long get_long(const std::string& key, long fallback) const;
  double get_double(const std::string& key, double fallback) const;
  Rational get_rational(const std::string& key, const Rational& fallback) const;
  std::vector<double> get_vector(const std::string& key, std::vector<double> fallback) const;
  std::vector<Rational> get_rational_vector(const std::string& key,
                                            std::vector<Rational> fallback) const;

  /// The quadric form from form.diag (diagonal rationals); form.denominator
  /// divides everything, so "1,1" with denominator 3 is (x^2+y^2)/3.
  RatSymForm form() const;
  /// The cusp frame from frame.v0 (integer coordinates of an isotropic
  /// vector of the suspended form).
  CuspFrame frame() const;

  std::uint64_t seed() const { return static_cast<std::uint64_t>(get_long("run.seed", 12345)); }
  int threads() const { return static_cast<int>(get_long("run.threads", 1)); }

  /// Canonical sorted key=value text; two configs hash equal iff this is
  /// byte-identical.
  std::string canonical_text() const;
  /// FNV-1a 64-bit hash of the canonical text, hex encoded.
  std::string hash() const;

 private:
  std::map<std::string, std::string> values_;
};

struct ExperimentResult {
  std::string name;
  bool pass = false;
  nlohmann::json summary;
  /// Output files actually written (relative names under out_dir).
  std::vector<std::string> files;
};

/// Runs one named experiment (counting, equidist, geometry, aprox,
/// crossover, excursion, ubiquity) and writes its CSV data, JSON summary,
/// plot script and manifest under out_dir. Deterministic: identical
/// configs reproduce byte-identical outputs. Throws std::invalid_argument
/// on an unknown name and std::runtime_error when out_dir is not writable.
ExperimentResult run_experiment(const ExperimentConfig& config, const std::string& name,
                                const std::string& out_dir);

/// The names run_experiment accepts, in canonical order.
const std::vector<std::string>& experiment_names();

}  // namespace cd
