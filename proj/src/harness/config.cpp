#include "contact/harness/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "contact/harness/integrators.hpp"
#include "contact/systems/models.hpp"

namespace contact::harness {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

bool valid_key(const std::string& key) {
  if (key.empty() || key.front() == '.' || key.back() == '.') return false;
  return std::all_of(key.begin(), key.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '-';
  });
}

std::string format_double(double v) {
  std::ostringstream out;
  out << std::setprecision(17) << v;
  return out.str();
}

std::string format_vector(const Vector<double>& v) {
  std::string out;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += format_double(v(i));
  }
  return out;
}

const char* kOutputKinds[] = {"trajectory", "section", "convergence", "errors", "manifest"};

}  // namespace

ConfigFile ConfigFile::parse(std::istream& in, const std::string& origin) {
  ConfigFile file;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(origin + ":" + std::to_string(number) + ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    if (!valid_key(key)) throw ConfigError(origin + ":" + std::to_string(number) + ": invalid key '" + key + "'");
    file.entries_[key] = trim(line.substr(eq + 1));
  }
  return file;
}

ConfigFile ConfigFile::parse_string(const std::string& text) {
  std::istringstream in(text);
  return parse(in, "<string>");
}

ConfigFile ConfigFile::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse(in, path);
}

void ConfigFile::set(const std::string& key, const std::string& value) {
  const std::string k = trim(key);
  if (!valid_key(k)) throw ConfigError("invalid key '" + key + "'");
  entries_[k] = trim(value);
}

void ConfigFile::apply_override(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError("override '" + assignment + "' is not of the form key=value");
  const std::string value = trim(assignment.substr(eq + 1));
  if (value.empty()) {
    const std::string k = trim(assignment.substr(0, eq));
    if (!valid_key(k)) throw ConfigError("invalid key '" + k + "'");
    entries_.erase(k);
    return;
  }
  set(assignment.substr(0, eq), value);
}

std::optional<std::string> ConfigFile::get(const std::string& key) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

double parse_double(const std::string& text, const std::string& key) {
  const std::string t = trim(text);
  if (t == "pi") return 3.14159265358979323846;
  if (t == "2pi") return 2 * 3.14159265358979323846;
  double v = 0;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || res.ec != std::errc() || res.ptr != t.data() + t.size()) {
    throw ConfigError("key '" + key + "': '" + text + "' is not a number");
  }
  return v;
}

long parse_long(const std::string& text, const std::string& key) {
  const std::string t = trim(text);
  long v = 0;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || res.ec != std::errc() || res.ptr != t.data() + t.size()) {
    throw ConfigError("key '" + key + "': '" + text + "' is not an integer");
  }
  return v;
}

bool parse_bool(const std::string& text, const std::string& key) {
  std::string t = trim(text);
  std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::tolower(c); });
  if (t == "true" || t == "yes" || t == "on" || t == "1") return true;
  if (t == "false" || t == "no" || t == "off" || t == "0") return false;
  throw ConfigError("key '" + key + "': '" + text + "' is not a boolean");
}

std::vector<double> parse_list(const std::string& text, const std::string& key) {
  std::vector<double> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) out.push_back(parse_double(item, key));
  if (out.empty()) throw ConfigError("key '" + key + "' is an empty list");
  return out;
}

ExperimentConfig ExperimentConfig::from(const ConfigFile& file) {
  ExperimentConfig cfg;
  for (const auto& [key, value] : file.entries()) {
    if (key.rfind("model.", 0) == 0) {
      cfg.model_parameters[key.substr(6)] = parse_double(value, key);
    } else if (key.rfind("output.", 0) == 0) {
      const std::string kind = key.substr(7);
      if (std::find(std::begin(kOutputKinds), std::end(kOutputKinds), kind) == std::end(kOutputKinds)) {
        throw ConfigError("unknown output '" + kind + "'");
      }
      if (value.empty()) throw ConfigError("key '" + key + "' needs a file name");
      cfg.outputs[kind] = value;
    } else if (key == "model") {
      cfg.model = value;
    } else if (key == "integrator") {
      cfg.integrator = value;
    } else if (key == "tau") {
      cfg.tau = parse_double(value, key);
    } else if (key == "t0") {
      cfg.t0 = parse_double(value, key);
    } else if (key == "t_end") {
      cfg.t_end = parse_double(value, key);
    } else if (key == "n_steps") {
      cfg.n_steps = parse_long(value, key);
    } else if (key == "initial.q" || key == "initial.p") {
      const auto list = parse_list(value, key);
      Vector<double> v = Eigen::Map<const Vector<double>>(list.data(), Eigen::Index(list.size()));
      (key == "initial.q" ? cfg.initial_q : cfg.initial_p) = v;
    } else if (key == "initial.s") {
      cfg.initial_s = parse_double(value, key);
    } else if (key == "record.stride") {
      cfg.stride = parse_long(value, key);
    } else if (key == "section.period") {
      cfg.section_period = parse_double(value, key);
    } else if (key == "section.snap") {
      cfg.section_snap = parse_bool(value, key);
    } else if (key == "errors.enabled") {
      cfg.error_analysis = parse_bool(value, key);
    } else if (key == "errors.reference") {
      cfg.error_reference = value;
    } else if (key == "errors.refine") {
      cfg.reference_refine = parse_long(value, key);
    } else if (key == "converge.taus") {
      cfg.converge_taus = parse_list(value, key);
    } else if (key == "converge.reference") {
      cfg.converge_reference = value;
    } else if (key == "converge.refine") {
      cfg.converge_refine = parse_long(value, key);
    } else if (key == "seed") {
      const long s = parse_long(value, key);
      if (s < 0) throw ConfigError("seed must be non-negative");
      cfg.seed = static_cast<std::uint64_t>(s);
    } else {
      throw ConfigError("unknown key '" + key + "'");
    }
  }
  return cfg;
}

void ExperimentConfig::validate() const {
  if (model.empty()) throw ConfigError("no model given");
  const auto& catalogue = systems::model_catalogue();
  auto info = std::find_if(catalogue.begin(), catalogue.end(), [&](const auto& m) { return m.name == model; });
  if (info == catalogue.end()) throw ConfigError("unknown model '" + model + "'");
  for (const auto& [key, value] : model_parameters) {
    if (!info->defaults.count(key)) throw ConfigError("model " + model + " has no parameter '" + key + "'");
    if (!std::isfinite(value)) throw ConfigError("model." + key + " must be finite");
  }
  if (!is_known_integrator(integrator)) throw ConfigError("unknown integrator '" + integrator + "'");
  if (!(tau > 0) || !std::isfinite(tau)) throw ConfigError("tau must be positive");
  if (!std::isfinite(t0)) throw ConfigError("t0 must be finite");
  if (t_end && n_steps) throw ConfigError("give either t_end or n_steps, not both");
  if (!t_end && !n_steps) throw ConfigError("one of t_end or n_steps is required");
  if (t_end && !(*t_end > t0 && std::isfinite(*t_end))) throw ConfigError("t_end must exceed t0");
  if (n_steps && *n_steps < 0) throw ConfigError("n_steps must be non-negative");
  if (stride < 1) throw ConfigError("record.stride must be >= 1");
  if (section_period) {
    if (!(*section_period > 0) || !std::isfinite(*section_period)) throw ConfigError("section.period must be positive");
    if (*section_period < tau) throw ConfigError("section.period must not be shorter than tau");
  }
  if (section_snap && !section_period) throw ConfigError("section.snap needs section.period");
  if (reference_refine < 1 || converge_refine < 1) throw ConfigError("reference refinement must be >= 1");
  for (double t : converge_taus) {
    if (!(t > 0) || !std::isfinite(t)) throw ConfigError("converge.taus must be positive");
  }
  for (const auto& ref : {error_reference, converge_reference}) {
    if (ref != "auto" && ref != "exact" && !is_known_integrator(ref)) {
      throw ConfigError("unknown reference '" + ref + "'");
    }
  }
  if (initial_q && initial_p && initial_q->size() != initial_p->size()) {
    throw ConfigError("initial.q and initial.p differ in length");
  }
  if (t_end && resolved_steps() < 1) throw ConfigError("t_end - t0 is shorter than one step");
}

double ExperimentConfig::effective_tau() const {
  if (section_snap && section_period) {
    const double per_period = std::max(1.0, std::round(*section_period / tau));
    return *section_period / per_period;
  }
  return tau;
}

long ExperimentConfig::resolved_steps() const {
  if (n_steps) return *n_steps;
  if (!t_end) return 0;
  return std::lround((*t_end - t0) / effective_tau());
}

std::string ExperimentConfig::manifest() const {
  std::ostringstream out;
  out << "model = " << model << "\n";
  for (const auto& [key, value] : model_parameters) out << "model." << key << " = " << format_double(value) << "\n";
  out << "integrator = " << integrator << "\n";
  out << "tau = " << format_double(tau) << "\n";
  if (section_snap) out << "tau.effective = " << format_double(effective_tau()) << "\n";
  out << "t0 = " << format_double(t0) << "\n";
  if (t_end) out << "t_end = " << format_double(*t_end) << "\n";
  if (n_steps) out << "n_steps = " << *n_steps << "\n";
  out << "n_steps.resolved = " << resolved_steps() << "\n";
  if (initial_q) out << "initial.q = " << format_vector(*initial_q) << "\n";
  if (initial_p) out << "initial.p = " << format_vector(*initial_p) << "\n";
  if (initial_s) out << "initial.s = " << format_double(*initial_s) << "\n";
  out << "record.stride = " << stride << "\n";
  if (section_period) {
    out << "section.period = " << format_double(*section_period) << "\n";
    out << "section.snap = " << (section_snap ? "true" : "false") << "\n";
  }
  out << "errors.enabled = " << (error_analysis ? "true" : "false") << "\n";
  out << "errors.reference = " << error_reference << "\n";
  out << "errors.refine = " << reference_refine << "\n";
  if (!converge_taus.empty()) {
    out << "converge.taus = ";
    for (std::size_t i = 0; i < converge_taus.size(); ++i) out << (i ? ", " : "") << format_double(converge_taus[i]);
    out << "\n";
  }
  out << "converge.reference = " << converge_reference << "\n";
  out << "converge.refine = " << converge_refine << "\n";
  for (const auto& [kind, path] : outputs) out << "output." << kind << " = " << path << "\n";
  out << "seed = " << seed << "\n";
  return out.str();
}

const std::vector<KeyDoc>& config_reference() {
  static const std::vector<KeyDoc> docs = [] {
    std::vector<KeyDoc> d = {
        {"model", "(required)", "model name; see the model list below"},
        {"model.<name>", "model default", "model parameter override"},
        {"integrator", "contact-s2", "integrator name; see the integrator list below"},
        {"tau", "(required)", "step size; 'pi' and '2pi' are accepted as literals"},
        {"t0", "0", "initial time"},
        {"t_end", "", "final time; exclusive with n_steps"},
        {"n_steps", "", "number of steps; exclusive with t_end; 0 writes a header-only trajectory"},
        {"initial.q", "model default", "comma-separated initial positions"},
        {"initial.p", "model default", "comma-separated initial momenta"},
        {"initial.s", "model default", "initial action"},
        {"record.stride", "1", "write every stride-th step (the final step is always written)"},
        {"section.period", "", "stroboscopic period P; enables section.csv"},
        {"section.snap", "false", "replace tau by P / round(P / tau) so samples land on steps"},
        {"errors.enabled", "false", "add modified-Hamiltonian estimates to the trajectory (contact-s2 only)"},
        {"errors.reference", "auto", "reference for 'errors': auto, exact, or an integrator name"},
        {"errors.refine", "10", "reference integrator step is tau / refine"},
        {"converge.taus", "", "comma-separated step sizes for 'converge'"},
        {"converge.reference", "auto", "reference for 'converge': auto, exact, or an integrator name"},
        {"converge.refine", "10", "reference step is min(taus) / refine"},
        {"output.trajectory", "trajectory.csv", "trajectory file name inside --out"},
        {"output.section", "section.csv", "section file name"},
        {"output.convergence", "convergence.csv", "convergence table file name"},
        {"output.errors", "errors.csv", "error comparison file name"},
        {"output.manifest", "manifest.txt", "resolved-config manifest file name"},
        {"seed", "0", "random seed, echoed in the manifest"},
    };
    return d;
  }();
  return docs;
}

std::string config_reference_text() {
  std::ostringstream out;
  out << "Configuration keys (key = value, '#' comments):\n";
  for (const auto& d : config_reference()) {
    out << "  " << std::left << std::setw(20) << d.key << std::setw(16) << d.default_value << d.description << "\n";
  }
  out << "\nModels:\n";
  for (const auto& m : systems::model_catalogue()) {
    out << "  " << m.name << ": " << m.summary << "\n    parameters:";
    for (const auto& [key, value] : m.defaults) out << " " << key << "=" << format_double(value);
    out << "\n";
  }
  out << "\nIntegrators:\n";
  for (const auto& i : integrator_catalogue()) {
    out << "  " << std::left << std::setw(28) << i.name << "order " << i.order << (i.contact ? ", contact" : "")
        << "; " << i.summary << "\n";
  }
  return out.str();
}

}  // namespace contact::harness
