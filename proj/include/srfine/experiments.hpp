#pragma once

#include "srfine/certificates.hpp"
#include "srfine/io.hpp"
#include "srfine/metrics.hpp"
#include "srfine/signal_model.hpp"
#include "srfine/solver.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace srfine {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Command { simulate, certify, verify_bounds };

struct ExperimentConfig {
  std::uint64_t seed = 1;
  int trials = 1;
  int N = 2048;
  int flo = 32;
  int r = 1;
  int spikes = 4;
  double kappa_mult = 1.87;
  // Resolution sweep: lhi = lambda_lo / srf for each entry; `lhi` is used when the list is empty.
  std::vector<double> srf = {16.0};
  double lhi = 0.0;
  NoiseModel noise_model = NoiseModel::l1_budget;
  std::vector<double> noise_levels = {0.05};
  SolverConfig solver = default_sweep_solver();
  bool compare_paper_bound = false;  // requires every SRF > 12

  // certify
  std::string sign_pattern = "random";  // random, positive, alternating
  bool fitted_constants = false;
  int oversample = 16;

  // verify-bounds
  int norm_trials = 50;
  int norm_cutoff = 128;
  std::vector<std::pair<int, double>> fejer_grid = {{64, 1.0 / 8}, {256, 1.0 / 16}, {2048, 1.0 / 128}, {64, 1.0 / 64}};
  double bound_scale = 1.0;  // multiplies the block-system norm bounds; below 1 is a negative control

  // execution only, not part of the config hash
  std::string out_dir = "out";
  bool trace = false;
  int workers = 0;  // 0 picks the hardware concurrency

  static SolverConfig default_sweep_solver() {
    SolverConfig s;
    s.tol_gap = 1e-7;
    return s;
  }
};

ExperimentConfig config_from_json(const Json& j);  // throws ConfigError on unknown keys or bad types
Json config_to_json(const ExperimentConfig& cfg, bool include_execution = true);
ExperimentConfig load_config(const std::string& path);
void validate_config(const ExperimentConfig& cfg, Command cmd);  // throws ConfigError
std::string hash_of(const ExperimentConfig& cfg);

// lhi values of the sweep, in configuration order.
std::vector<double> sweep_lhi(const ExperimentConfig& cfg);

// Independent 64-bit seed for (base, a, b); splitmix64 mixing.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b);

// Runs fn(i) for i in [0, count) on `workers` threads; rethrows the first failure by index.
void parallel_for(int count, int workers, const std::function<void(int)>& fn);

struct SimulationRow {
  int trial = 0;
  std::uint64_t signal_seed = 0, noise_seed = 0;
  double noise_level = 0.0;
  double z_l1 = 0.0;
  double lhi = 0.0;
  double srf = 0.0;
  double x_l1 = 0.0;
  bool decomposition_ok = false;
  ErrorBreakdown breakdown;  // total is the recovery error
  double objective = 0.0, gap = 0.0;
  int iterations = 0;
  bool converged = false;
  std::string flag;  // empty when the row is clean
};

struct SimulationPoint {
  int trial = 0;
  int noise_index = 0;
  GridSignal x;
  SolveReport solve;
  std::string error;
};

struct SimulationResult {
  std::string config_hash;
  std::vector<SimulationPoint> points;
  std::vector<SimulationRow> rows;  // sorted by (trial, noise level, srf)
  double wall_clock_seconds = 0.0;
  bool all_ok() const;
};

SimulationResult run_simulation(const ExperimentConfig& cfg);

std::string simulation_csv_header();
std::string simulation_csv_row(const std::string& hash, const ExperimentConfig& cfg, const SimulationRow& row);

struct CertifyItem {
  int trial = 0;
  double lhi = 0.0;
  CertificatePack pack;
  PropertyReport report;
};

struct CertifyResult {
  std::string config_hash;
  std::vector<CertifyItem> items;
  bool all_pass() const;
};

CertifyResult run_certify(const ExperimentConfig& cfg);

struct BoundsResult {
  std::string config_hash;
  std::vector<MatrixNormReport> norms;
  MatrixNormReport worst_norms;  // per-entry maximum over the sampled geometries
  std::vector<FejerSumReport> fejer;
  std::vector<PropertyCheck> bernstein;
  bool all_pass() const;
};

BoundsResult run_verify_bounds(const ExperimentConfig& cfg);
std::string format_bounds_table(const BoundsResult& res);

// Full commands: run, write artifacts to cfg.out_dir, return the exit code (0 pass, 1 failure).
int cmd_simulate(const ExperimentConfig& cfg, std::ostream& log);
int cmd_certify(const ExperimentConfig& cfg, std::ostream& log);
int cmd_verify_bounds(const ExperimentConfig& cfg, std::ostream& log);

}  // namespace srfine
