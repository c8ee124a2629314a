#pragma once

#include <Eigen/Dense>
#include <unsupported/Eigen/FFT>

#include <complex>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace srfine {

struct GeometryError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Wrap-around distance on the unit circle.
double wrap_distance(double a, double b);
// a - b mapped into [-1/2, 1/2).
double wrap_difference(double a, double b);

struct GridSignal {
  int N = 0;
  Eigen::VectorXd values;
};

// Sorted grid indices; position of index m is m/N.
struct SupportSet {
  int N = 0;
  std::vector<int> indices;

  std::size_t size() const { return indices.size(); }
  double position(std::size_t j) const { return double(indices[j]) / N; }
  std::vector<double> positions() const;
  static SupportSet from_signal(const GridSignal& x, double threshold = 0.0);
};

// Smallest wrap-around gap between distinct points; 1 for fewer than two points.
double min_separation(const std::vector<double>& sorted_points);

class LowPassOperator {
 public:
  LowPassOperator(int N, int flo);
  int N() const { return N_; }
  int flo() const { return flo_; }
  double lambda_lo() const { return 1.0 / flo_; }

 private:
  int N_;
  int flo_;
};

// Owns the FFT plan and buffers for repeated applications of one operator.
class LowPassWorkspace {
 public:
  explicit LowPassWorkspace(const LowPassOperator& op);
  void apply(const Eigen::VectorXd& x, Eigen::VectorXd& out);
  const LowPassOperator& op() const { return op_; }

 private:
  LowPassOperator op_;
  Eigen::FFT<double> fft_;
  std::vector<double> in_, out_;
  std::vector<std::complex<double>> spec_;
};

Eigen::VectorXd apply_lowpass(const LowPassOperator& op, const Eigen::VectorXd& x);

struct RayleighQuery {
  double d;
  int r;
};

struct WindowViolation {
  double start;                // window is [start, start + d)
  std::vector<int> members;    // grid indices inside the window
};

struct RayleighReport {
  bool regular = false;
  bool window_condition = false;
  std::optional<std::vector<std::vector<int>>> partition;  // grid indices of T_1..T_r
  std::optional<WindowViolation> window_violation;
  std::string detail;
};

// Round-robin split T_k = {t_{jr+k}} of sorted indices.
std::vector<std::vector<int>> round_robin_partition(const std::vector<int>& sorted_indices, int r);

// Windows are half-open, so a separation of exactly d is admissible.
RayleighReport check_rayleigh(const SupportSet& supp, const RayleighQuery& q);

struct SignalRequest {
  std::uint64_t seed = 0;
  int N = 64;
  int flo = 16;
  int r = 1;
  int spikes = 3;
  double kappa_mult = 1.87;
  double min_sep_hi = 0.0;
  double amp_lo = 0.5;
  double amp_hi = 2.0;
};

struct GeneratedSignal {
  GridSignal signal;
  SupportSet support;
  int attempts = 0;
};

GeneratedSignal generate_signal(const SignalRequest& req);

enum class NoiseModel { l1_budget, gaussian };

struct NoisyMeasurement {
  Eigen::VectorXd y;
  Eigen::VectorXd z;
  double z_l1 = 0.0;
};

NoisyMeasurement add_noise(const Eigen::VectorXd& y, NoiseModel model, double level, std::uint64_t seed);

NoiseModel parse_noise_model(const std::string& name);
std::string to_string(NoiseModel m);

// SRF = lambda_lo / lhi; lhi must lie in [1/N, lambda_lo).
double srf(int flo, double lhi, int N);
double dsrf(int N, int flo);

}  // namespace srfine
