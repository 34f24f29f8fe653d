#include "contact/harness/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include <Eigen/QR>

#include "contact/error_analysis.hpp"
#include "contact/trajectory.hpp"

namespace contact::harness {

namespace fs = std::filesystem;
using systems::ModelDescriptor;
using Vec = Vector<double>;

namespace {

// Comma-separated writer; floating-point fields carry 17 significant digits.
class CsvWriter {
 public:
  explicit CsvWriter(const fs::path& path) : path_(path), out_(path) {
    if (!out_) throw ConfigError("cannot write '" + path.string() + "'");
  }

  void header(const std::vector<std::string>& names) {
    for (std::size_t i = 0; i < names.size(); ++i) out_ << (i ? "," : "") << names[i];
    out_ << "\n";
  }

  CsvWriter& field(long v) {
    sep();
    out_ << v;
    return *this;
  }
  CsvWriter& field(double v) {
    sep();
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out_ << buf;
    return *this;
  }
  CsvWriter& field(const Vec& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) field(v(i));
    return *this;
  }
  CsvWriter& blank() {
    sep();
    return *this;
  }
  void end() {
    out_ << "\n";
    first_ = true;
  }

  std::string path() const { return path_.string(); }

 private:
  void sep() {
    if (!first_) out_ << ",";
    first_ = false;
  }

  fs::path path_;
  std::ofstream out_;
  bool first_ = true;
};

std::vector<std::string> indexed(const std::string& prefix, Eigen::Index n) {
  std::vector<std::string> out;
  for (Eigen::Index i = 1; i <= n; ++i) out.push_back(prefix + std::to_string(i));
  return out;
}

std::vector<std::string> phase_names(const std::string& prefix, Eigen::Index n) {
  auto out = indexed(prefix + "q", n);
  for (auto& name : indexed(prefix + "p", n)) out.push_back(name);
  out.push_back(prefix + "s");
  return out;
}

void append(std::vector<std::string>& a, const std::vector<std::string>& b) { a.insert(a.end(), b.begin(), b.end()); }

Vec flat(const StepErrorEstimate<double>& e) {
  Vec out(e.dq.size() + e.dp.size() + 1);
  out << e.dq, e.dp, e.ds;
  return out;
}

ErrorBoundOptions<double> bound_options(const ModelDescriptor& model, double t0, double tau) {
  ErrorBoundOptions<double> opts;
  if (model.singular_at_start) opts.min_time = t0 + tau;
  return opts;
}

void write_manifest(const ExperimentConfig& cfg, const fs::path& dir, const std::string& command,
                    const std::string& status, RunReport& report) {
  const fs::path path = dir / cfg.outputs.at("manifest");
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  out << "command = " << command << "\n" << cfg.manifest() << "status = " << status << "\n";
  report.files.push_back(path.string());
}

std::string reference_name(const ModelDescriptor& model, const std::string& requested) {
  if (requested == "exact") {
    if (!model.has_exact()) throw ConfigError("model " + model.name + " has no exact solution for this initial state");
    return "exact";
  }
  if (requested == "auto") return model.has_exact() ? "exact" : "contact-yoshida-6A";
  if (!is_known_integrator(requested)) throw ConfigError("unknown reference '" + requested + "'");
  return requested;
}

IntegrateOptions<double> options_for(const ModelDescriptor& model, long stride) {
  IntegrateOptions<double> opts;
  opts.stride = std::max(1L, stride);
  if (model.escape) opts.abort_check = model.escape;
  return opts;
}

}  // namespace

ModelDescriptor resolve_model(const ExperimentConfig& cfg) {
  ModelDescriptor model;
  try {
    model = systems::make_model(cfg.model, cfg.model_parameters);
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
  const bool overridden = cfg.initial_q || cfg.initial_p || cfg.initial_s || cfg.t0 != model.initial.t;
  if (!overridden) return model;

  State x0 = model.initial;
  if (cfg.initial_q) x0.q = *cfg.initial_q;
  if (cfg.initial_p) x0.p = *cfg.initial_p;
  if (cfg.initial_s) x0.s = *cfg.initial_s;
  x0.t = cfg.t0;
  if (x0.q.size() != model.dim || x0.p.size() != model.dim) {
    throw ConfigError("initial condition has dimension " + std::to_string(x0.q.size()) + ", model " + model.name +
                      " needs " + std::to_string(model.dim));
  }
  if (!x0.is_finite()) throw ConfigError("initial condition is not finite");
  if (cfg.model == "damped_oscillator") {
    auto params = model.parameters;
    model = systems::make_damped_oscillator(params.at("alpha"), x0);
    model.parameters = params;
  } else {
    // The attached closed forms belong to the default initial data.
    model.initial = x0;
    model.exact = nullptr;
  }
  return model;
}

double reduce_angle(double theta) {
  constexpr double two_pi = 2 * std::numbers::pi;
  double r = std::fmod(theta, two_pi);
  if (r < 0) r += two_pi;
  if (r >= two_pi) r -= two_pi;
  return r;
}

SectionSampler::SectionSampler(double period, double t0, double tau, std::vector<bool> angular)
    : period_(period), t0_(t0), tau_(tau), angular_(std::move(angular)) {
  if (!(period > 0) || !(tau > 0)) throw InvalidArgument("section period and step must be positive");
  if (period < tau) throw InvalidArgument("section period must not be shorter than the step");
}

void SectionSampler::operator()(long step, const State& x) {
  const double t = t0_ + static_cast<double>(step) * tau_;
  const long k = std::lround(t / period_);
  const double target = static_cast<double>(k) * period_;
  if (std::lround((target - t0_) / tau_) != step) return;
  SectionPoint point;
  point.index = k;
  point.step = step;
  point.residual = t - target;
  point.state = x;
  for (std::size_t i = 0; i < angular_.size() && Eigen::Index(i) < x.q.size(); ++i) {
    if (angular_[i]) point.state.q(Eigen::Index(i)) = reduce_angle(x.q(Eigen::Index(i)));
  }
  points_.push_back(std::move(point));
}

std::pair<double, double> fit_log_slope(const std::vector<double>& taus, const std::vector<double>& errors) {
  if (taus.size() != errors.size() || taus.size() < 2) throw InvalidArgument("slope fit needs at least two points");
  const std::size_t n = taus.size();
  std::vector<double> x(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(taus[i] > 0) || !(errors[i] > 0)) throw InvalidArgument("slope fit needs positive step sizes and errors");
    x[i] = std::log(taus[i]);
    y[i] = std::log(errors[i]);
  }
  Eigen::MatrixXd A(n, 2);
  Eigen::VectorXd b(n);
  for (std::size_t i = 0; i < n; ++i) {
    A(Eigen::Index(i), 0) = x[i];
    A(Eigen::Index(i), 1) = 1;
    b(Eigen::Index(i)) = y[i];
  }
  const Eigen::Vector2d coef = A.colPivHouseholderQr().solve(b);
  const double rms = std::sqrt((A * coef - b).squaredNorm() / double(n));
  return {coef(0), rms};
}

ConvergenceResult convergence_study(const ModelDescriptor& model, const State& x0, const std::string& integrator,
                                    const std::vector<double>& taus, double t_end, const std::string& reference,
                                    long refine) {
  if (taus.size() < 2) throw ConfigError("convergence study needs at least two step sizes");
  const double span = t_end - x0.t;
  if (!(span > 0)) throw ConfigError("convergence study needs t_end after the initial time");
  auto steps_for = [span](double tau) {
    const long n = std::lround(span / tau);
    if (n < 1 || std::abs(double(n) * tau - span) > 1e-9 * std::max(1.0, span)) {
      throw ConfigError("t_end - t0 is not a whole number of steps of " + std::to_string(tau));
    }
    return n;
  };

  ConvergenceResult result;
  result.reference = reference_name(model, reference);
  State ref_final;
  if (result.reference == "exact") {
    ref_final = model.exact(t_end);
  } else {
    const double finest = *std::min_element(taus.begin(), taus.end());
    const long n_ref = std::max(1L, std::lround(span / (finest / double(std::max(1L, refine)))));
    const double tau_ref = span / double(n_ref);
    auto ref = integrate(x0, tau_ref, n_ref, make_stepper(result.reference, model.system, tau_ref),
                         options_for(model, n_ref));
    if (!ref.ok()) throw NumericalError("reference run diverged: " + ref.failure_message);
    ref_final = ref.final_state();
  }

  std::vector<double> errors;
  for (double tau : taus) {
    const long n = steps_for(tau);
    auto run = integrate(x0, tau, n, make_stepper(integrator, model.system, tau), options_for(model, n));
    if (!run.ok()) throw NumericalError(integrator + " diverged at tau = " + std::to_string(tau) + ": " + run.failure_message);
    const double err = (run.final_state().phase() - ref_final.phase()).norm();
    result.rows.push_back({tau, n, err});
    errors.push_back(err);
  }
  std::tie(result.slope, result.residual) = fit_log_slope(taus, errors);
  return result;
}

ErrorComparison error_comparison(const ModelDescriptor& model, const State& x0, double tau, long n_steps,
                                 const std::string& reference, long refine) {
  ErrorComparison out;
  out.reference = reference_name(model, reference);
  ModifiedHamiltonianEvaluator<double> dh(model.system);
  const auto bound_opts = bound_options(model, x0.t, tau);

  auto run = integrate(x0, tau, n_steps, make_stepper("contact-s2", model.system, tau), options_for(model, 1));
  if (!run.ok()) {
    out.diverged = true;
    out.message = "contact-s2 diverged at step " + std::to_string(run.failure_step) + ": " + run.failure_message;
  }

  std::vector<State> ref_states;
  if (out.reference != "exact") {
    const long r = std::max(1L, refine);
    auto ref = integrate(x0, tau / double(r), n_steps * r, make_stepper(out.reference, model.system, tau / double(r)),
                         options_for(model, r));
    for (const auto& p : ref.points) {
      if (p.step % r == 0) ref_states.push_back(p.state);
    }
    if (!ref.ok()) {
      out.diverged = true;
      out.message = "reference diverged at step " + std::to_string(ref.failure_step) + ": " + ref.failure_message;
    }
  }

  const Eigen::Index dim = 2 * x0.dim() + 1;
  Vec cumulative = Vec::Zero(dim);
  double bound = 0;
  for (std::size_t j = 0; j < run.points.size(); ++j) {
    const State& x = run.points[j].state;
    State ref;
    if (out.reference == "exact") {
      ref = model.exact(x.t);
    } else {
      if (j >= ref_states.size()) break;
      ref = ref_states[j];
    }
    ErrorRow row;
    row.step = long(j);
    row.t = x.t;
    row.error = (x.phase() - ref.phase()).cwiseAbs();
    row.error_norm = row.error.norm();
    row.local = Vec::Zero(dim);
    if (j > 0) {
      const auto est = step_estimate(dh, run.points[j - 1].state, tau, long(j - 1), bound_opts);
      row.local = flat(est);
      bound += est.norm();
    }
    cumulative += row.local;
    row.cumulative = cumulative;
    row.bound = bound;
    out.rows.push_back(std::move(row));
  }
  return out;
}

namespace {

struct TrajectoryColumns {
  Eigen::Index dim = 0;
  bool estimates = false;

  std::vector<std::string> names() const {
    std::vector<std::string> h = {"step", "t"};
    append(h, indexed("q", dim));
    append(h, indexed("p", dim));
    h.push_back("s");
    h.push_back("H");
    if (estimates) {
      append(h, phase_names("est_", dim));
      h.push_back("bound");
    }
    return h;
  }
};

RunReport integrate_and_write(const ExperimentConfig& cfg, const fs::path& dir, const std::string& command,
                              bool write_trajectory, bool write_section) {
  RunReport report;
  ModelDescriptor model = resolve_model(cfg);
  const State x0 = model.initial;
  const double tau = cfg.effective_tau();
  const long n_steps = cfg.resolved_steps();

  std::optional<ModifiedHamiltonianEvaluator<double>> dh;
  if (cfg.error_analysis && write_trajectory) {
    if (cfg.integrator != "contact-s2") {
      throw ConfigError("errors.enabled applies to contact-s2 only; the estimates describe that integrator");
    }
    try {
      dh.emplace(model.system);
    } catch (const MissingDerivative& e) {
      throw ConfigError(e.what());
    }
  }
  const auto bound_opts = bound_options(model, x0.t, tau);

  std::optional<CsvWriter> traj;
  TrajectoryColumns columns{model.dim, dh.has_value()};
  if (write_trajectory) {
    traj.emplace(dir / cfg.outputs.at("trajectory"));
    traj->header(columns.names());
    report.files.push_back(traj->path());
  }
  std::optional<SectionSampler> sampler;
  if (write_section) sampler.emplace(*cfg.section_period, x0.t, tau, model.angular);

  std::string status = "ok";
  if (n_steps > 0) {
    State previous = x0;
    double bound = 0;
    auto write_row = [&](long k, const State& x, const Vec& est) {
      traj->field(k).field(x.t).field(x.q).field(x.p).field(x.s).field(model.system.energy(x));
      if (dh) traj->field(est).field(bound);
      traj->end();
    };
    IntegrateOptions<double> opts = options_for(model, n_steps);
    opts.observer = [&](long k, const State& x) {
      Vec est = Vec::Zero(2 * model.dim + 1);
      if (dh && k > 0) {
        const auto e = step_estimate(*dh, previous, tau, k - 1, bound_opts);
        est = flat(e);
        bound += e.norm();
      }
      previous = x;
      if (traj && (k % cfg.stride == 0 || k == n_steps)) write_row(k, x, est);
      if (sampler) (*sampler)(k, x);
    };
    Stepper stepper;
    try {
      stepper = make_stepper(cfg.integrator, model.system, tau);
    } catch (const InvalidArgument& e) {
      throw ConfigError(e.what());
    }
    auto record = integrate(x0, tau, n_steps, stepper, opts);
    if (!record.ok()) {
      // Keep the state that tripped an escape test, flagged by the exit code.
      if (traj && !record.points.empty() && record.points.back().step == record.failure_step) {
        traj->field(record.failure_step).field(record.points.back().state.t).field(record.points.back().state.q);
        traj->field(record.points.back().state.p).field(record.points.back().state.s);
        traj->field(model.system.energy(record.points.back().state));
        for (Eigen::Index i = 0; dh && i < 2 * model.dim + 2; ++i) traj->blank();
        traj->end();
      }
      std::ostringstream msg;
      msg << "diverged at step " << record.failure_step << " (t = " << (x0.t + double(record.failure_step) * tau)
          << "): " << record.failure_message;
      status = msg.str();
      report.exit_code = kExitDiverged;
      report.message = cfg.integrator + " " + status;
    }
  }

  if (sampler) {
    CsvWriter sec(dir / cfg.outputs.at("section"));
    std::vector<std::string> h = {"k", "t", "residual", "step"};
    append(h, indexed("q", model.dim));
    append(h, indexed("p", model.dim));
    h.push_back("s");
    sec.header(h);
    for (const auto& p : sampler->points()) {
      sec.field(p.index).field(double(p.index) * *cfg.section_period + p.residual).field(p.residual).field(p.step);
      sec.field(p.state.q).field(p.state.p).field(p.state.s).end();
    }
    report.files.push_back(sec.path());
  }
  write_manifest(cfg, dir, command, status, report);
  return report;
}

}  // namespace

RunReport run_experiment(const ExperimentConfig& cfg, const std::string& out_dir) {
  return integrate_and_write(cfg, out_dir, "run", true, cfg.section_period.has_value());
}

RunReport run_section(const ExperimentConfig& cfg, const std::string& out_dir) {
  if (!cfg.section_period) throw ConfigError("section needs section.period");
  return integrate_and_write(cfg, out_dir, "section", false, true);
}

RunReport run_convergence(const ExperimentConfig& cfg, const std::string& out_dir) {
  RunReport report;
  if (cfg.converge_taus.size() < 2) throw ConfigError("converge needs converge.taus with at least two entries");
  if (!cfg.t_end) throw ConfigError("converge needs t_end");
  const ModelDescriptor model = resolve_model(cfg);
  const auto result = convergence_study(model, model.initial, cfg.integrator, cfg.converge_taus, *cfg.t_end,
                                        cfg.converge_reference, cfg.converge_refine);
  const fs::path dir(out_dir);
  CsvWriter csv(dir / cfg.outputs.at("convergence"));
  csv.header({"tau", "n_steps", "error", "observed_order", "slope", "fit_residual"});
  for (std::size_t i = 0; i < result.rows.size(); ++i) {
    const auto& r = result.rows[i];
    csv.field(r.tau).field(r.n_steps).field(r.error);
    if (i == 0) {
      csv.blank();
    } else {
      const auto& prev = result.rows[i - 1];
      csv.field(std::log(prev.error / r.error) / std::log(prev.tau / r.tau));
    }
    csv.field(result.slope).field(result.residual).end();
  }
  report.files.push_back(csv.path());
  std::ostringstream status;
  status.precision(6);
  status << "ok; reference " << result.reference << "; slope " << result.slope << " (fit residual " << result.residual
         << ")";
  report.message = status.str();
  write_manifest(cfg, dir, "converge", status.str(), report);
  return report;
}

RunReport run_error_comparison(const ExperimentConfig& cfg, const std::string& out_dir) {
  RunReport report;
  if (cfg.integrator != "contact-s2") {
    throw ConfigError("errors compares contact-s2 with its modified-Hamiltonian estimate; set integrator = contact-s2");
  }
  const ModelDescriptor model = resolve_model(cfg);
  const fs::path dir(out_dir);
  const Eigen::Index n = model.dim;
  CsvWriter csv(dir / cfg.outputs.at("errors"));
  std::vector<std::string> h = {"step", "t"};
  append(h, phase_names("err_", n));
  h.push_back("err_norm");
  append(h, phase_names("est_", n));
  append(h, phase_names("cum_", n));
  h.push_back("bound");
  csv.header(h);
  report.files.push_back(csv.path());

  std::string status = "ok";
  const long n_steps = cfg.resolved_steps();
  if (n_steps > 0) {
    ErrorComparison cmp;
    try {
      cmp = error_comparison(model, model.initial, cfg.effective_tau(), n_steps, cfg.error_reference,
                             cfg.reference_refine);
    } catch (const MissingDerivative& e) {
      throw ConfigError(e.what());
    }
    for (const auto& r : cmp.rows) {
      if (r.step % cfg.stride != 0 && r.step != long(cmp.rows.size()) - 1) continue;
      csv.field(r.step).field(r.t).field(r.error).field(r.error_norm).field(r.local).field(r.cumulative).field(r.bound);
      csv.end();
    }
    if (cmp.diverged) {
      status = cmp.message;
      report.exit_code = kExitDiverged;
      report.message = cmp.message;
    } else {
      report.message = "ok; reference " + cmp.reference;
    }
  }
  write_manifest(cfg, dir, "errors", status, report);
  return report;
}

RunReport execute(const std::string& command, const ConfigFile& file, const std::string& out_dir) {
  RunReport report;
  try {
    ExperimentConfig cfg = ExperimentConfig::from(file);
    cfg.validate();
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw ConfigError("cannot create output directory '" + out_dir + "': " + ec.message());
    if (command == "run") return run_experiment(cfg, out_dir);
    if (command == "section") return run_section(cfg, out_dir);
    if (command == "converge") return run_convergence(cfg, out_dir);
    if (command == "errors") return run_error_comparison(cfg, out_dir);
    throw ConfigError("unknown command '" + command + "'");
  } catch (const ConfigError& e) {
    report.exit_code = kExitConfig;
    report.message = e.what();
  } catch (const InvalidArgument& e) {
    report.exit_code = kExitConfig;
    report.message = e.what();
  } catch (const MissingDerivative& e) {
    report.exit_code = kExitConfig;
    report.message = e.what();
  } catch (const NumericalError& e) {
    report.exit_code = kExitDiverged;
    report.message = e.what();
  }
  return report;
}

}  // namespace contact::harness
