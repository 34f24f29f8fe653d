#pragma once

#include <string>
#include <utility>
#include <vector>

#include "contact/harness/config.hpp"
#include "contact/harness/integrators.hpp"

namespace contact::harness {

enum ExitCode : int { kExitOk = 0, kExitConfig = 2, kExitDiverged = 3 };

struct RunReport {
  int exit_code = kExitOk;
  std::string message;
  std::vector<std::string> files;
};

/// Model named by the config, with explicit initial-condition overrides applied.
systems::ModelDescriptor resolve_model(const ExperimentConfig& cfg);

/// Reduces an angle to [0, 2 pi).
double reduce_angle(double theta);

struct SectionPoint {
  long index = 0;         // k in t = k P
  long step = 0;          // step the sample was taken from
  double residual = 0;    // t_step - k P
  State state;            // angular coordinates already reduced
};

/// Nearest-step stroboscopic sampler. Feed it every accepted state in order;
/// it keeps, for each k with k P in the integrated range, the step closest
/// to k P.
class SectionSampler {
 public:
  SectionSampler(double period, double t0, double tau, std::vector<bool> angular);
  void operator()(long step, const State& x);
  const std::vector<SectionPoint>& points() const { return points_; }

 private:
  double period_, t0_, tau_;
  std::vector<bool> angular_;
  std::vector<SectionPoint> points_;
};

/// Least-squares slope of log(error) against log(tau), with the RMS residual
/// of the fit in log space.
std::pair<double, double> fit_log_slope(const std::vector<double>& taus, const std::vector<double>& errors);

struct ConvergenceRow {
  double tau = 0;
  long n_steps = 0;
  double error = 0;  // Euclidean norm of the (q, p, s) error at t_end
};

struct ConvergenceResult {
  std::vector<ConvergenceRow> rows;
  double slope = 0;
  double residual = 0;
  std::string reference;  // "exact" or the reference integrator
};

/// Final-state error at t_end for each tau. `reference` is "auto" (exact
/// solution when the model has one, otherwise contact-yoshida-6A), "exact",
/// or an integrator name run at min(tau) / refine.
ConvergenceResult convergence_study(const systems::ModelDescriptor& model, const State& x0, const std::string& integrator,
                                    const std::vector<double>& taus, double t_end, const std::string& reference = "auto",
                                    long refine = 10);

struct ErrorRow {
  long step = 0;
  double t = 0;
  Vector<double> error;       // |x_num - x_ref| per coordinate (q, p, s)
  Vector<double> local;       // estimate for the step that produced this state
  Vector<double> cumulative;  // per-coordinate running sum of `local`
  double error_norm = 0;
  double bound = 0;           // running sum of |local|
};

struct ErrorComparison {
  std::vector<ErrorRow> rows;
  std::string reference;
  bool diverged = false;
  std::string message;
};

/// Second-order splitting run against a reference, with the
/// modified-Hamiltonian estimates along the numerical trajectory.
ErrorComparison error_comparison(const systems::ModelDescriptor& model, const State& x0, double tau, long n_steps,
                                 const std::string& reference = "auto", long refine = 10);

RunReport run_experiment(const ExperimentConfig& cfg, const std::string& out_dir);
RunReport run_section(const ExperimentConfig& cfg, const std::string& out_dir);
RunReport run_convergence(const ExperimentConfig& cfg, const std::string& out_dir);
RunReport run_error_comparison(const ExperimentConfig& cfg, const std::string& out_dir);

/// Parses, validates and runs one subcommand ("run", "section", "converge",
/// "errors"), mapping failures to exit codes.
RunReport execute(const std::string& command, const ConfigFile& file, const std::string& out_dir);

}  // namespace contact::harness
