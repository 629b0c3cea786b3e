#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "stiff/mc_sim.hpp"
#include "stiff/phase.hpp"

namespace stiff {

enum class ExperimentKind { mosco, continuity, bc, mc, classify };
const char* experiment_name(ExperimentKind k);
ExperimentKind parse_experiment(const std::string& name);

// Initial datum: Gaussian bump exp(-|x - c|^2 / (2 sigma^2)). The default centre sits
// off the barrier in the upper half; "symmetric" centres it on the barrier.
struct U0Spec {
  std::string family = "gaussian";
  double sigma = 0.5;
  double x1 = 0.0, x2 = 0.75;

  double operator()(double x1, double x2) const;
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::mosco;
  // Monomial conductivities a_tan = c_tan eps^alpha, a_norm = c_norm eps^beta.
  double alpha = 1.0, beta = 1.0, c_tan = 1.0, c_norm = 1.0;
  std::vector<double> eps = {0.4, 0.2, 0.1, 0.05};
  SplitGrid grid = {4.0, 4.0, 128, 320};
  U0Spec u0;
  double t = 0.5;
  double dt = 0.005;
  double theta = 0.5;
  int startup_half_steps = 4;
  // continuity: family II, IV or VI and the target of the parameter sequence
  // (0 or inf select the endpoint phases); VI keeps mu fixed.
  std::string sweep = "II";
  double target = 1.0;
  double mu = 1.0;
  int levels = 14;
  double resolvent_alpha = 1.0;
  // bc: phases to verify
  std::vector<std::string> phases = {"I", "II", "III", "IV", "V", "VI", "VII"};
  // mc: checks to run among eps, reflecting, absorbing, snob, type4
  std::vector<std::string> checks = {"eps", "reflecting", "absorbing", "snob", "type4"};
  int n_paths = 100000;
  double mc_dt = 2.5e-4;
  double mc_tolerance = 5e-3;
  std::uint64_t seed = 20240601;
  int threads = 1;
  std::string out_dir;

  // Throws ConfigError.
  void validate() const;
  SolveOptions solve_options() const;
};

// JSON object, or key = value lines ('#' comments; lists comma-separated;
// grid as "Lx,Ly,nx,ny"). Throws ConfigError.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);
// Applies one key/value pair (the shared vocabulary of files and CLI flags).
void apply_setting(ExperimentConfig& cfg, const std::string& key, const std::string& value);

struct ErrorRow {
  double parameter = 0.0;
  double error = 0.0;
  std::optional<double> se;
};

struct ExperimentResult {
  ExperimentKind kind = ExperimentKind::mosco;
  std::vector<ErrorRow> rows;
  nlohmann::json report;
  bool pass = false;
};

// Largest dy dividing every eps with dy <= min(eps) / 4 for a given box height.
int aligned_rows(double Ly, const std::vector<double>& eps);

bool strictly_decreasing(const std::vector<double>& e);
// Nonincreasing, and either the last value is <= rel * first or the last two
// values agree to within `plateau` (a floor was reached).
bool decreasing_to_floor(const std::vector<double>& e, double rel = 1e-3, double plateau = 0.05);

ExperimentResult run_mosco_experiment(const ExperimentConfig& cfg);
ExperimentResult run_continuity_sweep(const ExperimentConfig& cfg);
ExperimentResult run_bc_verification(const ExperimentConfig& cfg);
ExperimentResult run_mc_crosscheck(const ExperimentConfig& cfg);
ExperimentResult run_classify(const ExperimentConfig& cfg);
ExperimentResult run_experiment(const ExperimentConfig& cfg);

// results.csv, report.json and plot.gp in dir (created if needed); run.log holds the
// wall-clock time, kept apart so the other three are reproducible byte for byte.
void write_outputs(const ExperimentResult& r, const std::string& dir, double wall_seconds = -1.0);
std::string results_csv(const ExperimentResult& r);
std::string plot_script(const ExperimentResult& r);

}  // namespace stiff
