#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "contact/errors.hpp"
#include "contact/state.hpp"

namespace contact::harness {

class ConfigError : public ContactError {
 public:
  using ContactError::ContactError;
};

/// Flat "key = value" text. '#' starts a comment; keys may be dotted
/// (model.alpha, section.period). Later assignments replace earlier ones.
class ConfigFile {
 public:
  static ConfigFile parse(std::istream& in, const std::string& origin = "<config>");
  static ConfigFile parse_string(const std::string& text);
  static ConfigFile load(const std::string& path);

  void set(const std::string& key, const std::string& value);
  /// Applies a "key=value" assignment, as given to --override. "key=" removes the key.
  void apply_override(const std::string& assignment);

  bool has(const std::string& key) const { return entries_.count(key) > 0; }
  std::optional<std::string> get(const std::string& key) const;
  const std::map<std::string, std::string>& entries() const { return entries_; }

 private:
  std::map<std::string, std::string> entries_;
};

double parse_double(const std::string& text, const std::string& key);
long parse_long(const std::string& text, const std::string& key);
bool parse_bool(const std::string& text, const std::string& key);
std::vector<double> parse_list(const std::string& text, const std::string& key);

/// Fully resolved experiment description.
struct ExperimentConfig {
  std::string model;
  std::map<std::string, double> model_parameters;
  std::string integrator = "contact-s2";
  double tau = 0;
  double t0 = 0;
  std::optional<double> t_end;
  std::optional<long> n_steps;
  std::optional<Vector<double>> initial_q;
  std::optional<Vector<double>> initial_p;
  std::optional<double> initial_s;
  long stride = 1;
  std::optional<double> section_period;
  bool section_snap = false;
  bool error_analysis = false;
  std::string error_reference = "auto";  // "auto", "exact" or an integrator name
  long reference_refine = 10;
  std::vector<double> converge_taus;
  std::string converge_reference = "auto";
  long converge_refine = 10;
  std::map<std::string, std::string> outputs = {{"trajectory", "trajectory.csv"},
                                                {"section", "section.csv"},
                                                {"convergence", "convergence.csv"},
                                                {"errors", "errors.csv"},
                                                {"manifest", "manifest.txt"}};
  std::uint64_t seed = 0;

  static ExperimentConfig from(const ConfigFile& file);

  /// Throws ConfigError on the first violated invariant.
  void validate() const;
  /// Step size after the optional snap to the section period.
  double effective_tau() const;
  /// Number of steps implied by n_steps or (t_end - t0) / tau.
  long resolved_steps() const;
  /// The resolved configuration as "key = value" lines.
  std::string manifest() const;
};

struct KeyDoc {
  std::string key;
  std::string default_value;
  std::string description;
};

/// Every accepted key, for the generated reference.
const std::vector<KeyDoc>& config_reference();
std::string config_reference_text();

}  // namespace contact::harness
