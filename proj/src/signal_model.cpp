#include "srfine/signal_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

namespace srfine {

double wrap_difference(double a, double b) {
  double d = a - b;
  d -= std::floor(d + 0.5);
  return d;
}

double wrap_distance(double a, double b) { return std::abs(wrap_difference(a, b)); }

std::vector<double> SupportSet::positions() const {
  std::vector<double> p(indices.size());
  for (std::size_t j = 0; j < indices.size(); ++j) p[j] = position(j);
  return p;
}

SupportSet SupportSet::from_signal(const GridSignal& x, double threshold) {
  SupportSet s;
  s.N = x.N;
  for (int m = 0; m < x.N; ++m)
    if (x.values(m) > threshold) s.indices.push_back(m);
  return s;
}

double min_separation(const std::vector<double>& p) {
  if (p.size() < 2) return 1.0;
  double best = 1.0;
  for (std::size_t j = 0; j < p.size(); ++j) {
    const double next = j + 1 < p.size() ? p[j + 1] : p[0] + 1.0;
    best = std::min(best, next - p[j]);
  }
  return best;
}

LowPassOperator::LowPassOperator(int N, int flo) : N_(N), flo_(flo) {
  if (N < 4 || N % 2 != 0) throw std::invalid_argument("LowPassOperator: N must be even and >= 4");
  if (flo < 1 || 2 * flo >= N) throw std::invalid_argument("LowPassOperator: need 1 <= flo < N/2");
}

LowPassWorkspace::LowPassWorkspace(const LowPassOperator& op)
    : op_(op), in_(op.N()), out_(op.N()), spec_(op.N() / 2 + 1) {
  fft_.SetFlag(Eigen::FFT<double>::HalfSpectrum);
}

void LowPassWorkspace::apply(const Eigen::VectorXd& x, Eigen::VectorXd& out) {
  const int N = op_.N();
  if (x.size() != N) throw std::invalid_argument("apply_lowpass: length mismatch");
  std::copy(x.data(), x.data() + N, in_.begin());
  fft_.fwd(spec_, in_);
  for (int k = op_.flo() + 1; k <= N / 2; ++k) spec_[k] = 0.0;
  fft_.inv(out_, spec_);
  out.resize(N);
  std::copy(out_.begin(), out_.end(), out.data());
}

Eigen::VectorXd apply_lowpass(const LowPassOperator& op, const Eigen::VectorXd& x) {
  LowPassWorkspace ws(op);
  Eigen::VectorXd out;
  ws.apply(x, out);
  return out;
}

std::vector<std::vector<int>> round_robin_partition(const std::vector<int>& idx, int r) {
  std::vector<std::vector<int>> parts(r);
  for (std::size_t j = 0; j < idx.size(); ++j) parts[j % r].push_back(idx[j]);
  return parts;
}

RayleighReport check_rayleigh(const SupportSet& supp, const RayleighQuery& q) {
  if (!(q.d > 0.0 && q.d < 1.0)) throw std::invalid_argument("check_rayleigh: d must lie in (0,1)");
  if (q.r < 1) throw std::invalid_argument("check_rayleigh: r must be positive");
  RayleighReport rep;
  const auto pos = supp.positions();
  const std::size_t P = pos.size();
  const double eps = 1e-12;

  // A maximal half-open window can be taken to start at a support point.
  rep.window_condition = true;
  for (std::size_t j = 0; j < P && rep.window_condition; ++j) {
    std::vector<int> members;
    for (std::size_t i = 0; i < P; ++i) {
      double off = pos[i] - pos[j];
      off -= std::floor(off);
      if (off < q.d - eps) members.push_back(supp.indices[i]);
    }
    if (int(members.size()) > q.r) {
      rep.window_condition = false;
      rep.window_violation = WindowViolation{pos[j], members};
    }
  }

  auto parts = round_robin_partition(supp.indices, q.r);
  for (std::size_t k = 0; k < parts.size(); ++k) {
    std::vector<double> p;
    for (int m : parts[k]) p.push_back(double(m) / supp.N);
    if (min_separation(p) < q.d - eps) {
      std::ostringstream os;
      os << "round-robin subset " << k + 1 << " has a gap below d=" << q.d;
      rep.detail = os.str();
      return rep;
    }
  }
  rep.regular = true;
  rep.partition = std::move(parts);
  return rep;
}

namespace {

// Random composition of `total` into `parts` nonnegative integers.
std::vector<int> random_composition(int total, int parts, std::mt19937_64& rng) {
  std::vector<int> cuts(parts - 1);
  std::uniform_int_distribution<int> u(0, total);
  for (auto& c : cuts) c = u(rng);
  std::sort(cuts.begin(), cuts.end());
  std::vector<int> out(parts);
  int prev = 0;
  for (int i = 0; i < parts - 1; ++i) {
    out[i] = cuts[i] - prev;
    prev = cuts[i];
  }
  out[parts - 1] = total - prev;
  return out;
}

}  // namespace

GeneratedSignal generate_signal(const SignalRequest& req) {
  if (req.N < 4 || req.N % 2 != 0) throw std::invalid_argument("generate_signal: N must be even");
  if (req.r < 1 || req.spikes < 0) throw std::invalid_argument("generate_signal: bad r or spike count");
  if (!(req.amp_lo > 0.0 && req.amp_hi >= req.amp_lo)) throw std::invalid_argument("generate_signal: bad amplitude range");
  GeneratedSignal out;
  out.signal.N = req.N;
  out.signal.values = Eigen::VectorXd::Zero(req.N);
  out.support.N = req.N;
  if (req.spikes == 0) return out;

  const double lambda_lo = 1.0 / req.flo;
  const double d = req.kappa_mult * lambda_lo * req.r;
  const int gap_cells = std::max(1, int(std::ceil(d * req.N - 1e-9)));
  const int intra_cells = std::max(1, int(std::ceil(req.min_sep_hi * req.N - 1e-9)));
  std::mt19937_64 rng(req.seed);
  std::uniform_int_distribution<int> size_dist(1, req.r);
  std::uniform_real_distribution<double> amp(req.amp_lo, req.amp_hi);

  const int max_attempts = 10 * req.spikes;
  for (int attempt = 1; attempt <= max_attempts; ++attempt) {
    std::vector<int> sizes;
    for (int left = req.spikes; left > 0;) {
      const int s = std::min(left, size_dist(rng));
      sizes.push_back(s);
      left -= s;
    }
    const int C = int(sizes.size());
    std::vector<int> spacing(C);
    int used = 0;
    for (int c = 0; c < C; ++c) {
      // intra-cluster spacing varies between one and two minimal gaps
      spacing[c] = intra_cells + std::uniform_int_distribution<int>(0, intra_cells)(rng);
      used += (sizes[c] - 1) * spacing[c] + gap_cells;
    }
    if (used > req.N) continue;
    // slack[0] precedes the first cluster; the rest follow each cluster
    auto slack = random_composition(req.N - used, C + 1, rng);
    std::vector<int> idx;
    int pos = slack[0];
    for (int c = 0; c < C; ++c) {
      for (int i = 0; i < sizes[c]; ++i) idx.push_back(pos + i * spacing[c]);
      pos += (sizes[c] - 1) * spacing[c] + gap_cells + slack[c + 1];
    }
    std::sort(idx.begin(), idx.end());
    SupportSet supp{req.N, idx};
    const bool sep_ok = min_separation(supp.positions()) >= req.min_sep_hi - 1e-12;
    if (!sep_ok) continue;
    if (d < 1.0 && !check_rayleigh(supp, {d, req.r}).regular) continue;
    for (int m : idx) out.signal.values(m) = amp(rng);
    out.support = supp;
    out.attempts = attempt;
    return out;
  }
  throw GeometryError("generate_signal: infeasible geometry after " + std::to_string(max_attempts) + " attempts");
}

NoisyMeasurement add_noise(const Eigen::VectorXd& y, NoiseModel model, double level, std::uint64_t seed) {
  if (level < 0.0) throw std::invalid_argument("add_noise: level must be nonnegative");
  NoisyMeasurement out;
  out.z = Eigen::VectorXd::Zero(y.size());
  if (level > 0.0) {
    std::mt19937_64 rng(seed);
    if (model == NoiseModel::l1_budget) {
      std::uniform_real_distribution<double> u(-1.0, 1.0);
      for (Eigen::Index i = 0; i < y.size(); ++i) out.z(i) = u(rng);
      const double n1 = out.z.lpNorm<1>();
      if (n1 > 0.0) out.z *= level / n1;
    } else {
      std::normal_distribution<double> g(0.0, level);
      for (Eigen::Index i = 0; i < y.size(); ++i) out.z(i) = g(rng);
    }
  }
  out.y = y + out.z;
  out.z_l1 = out.z.lpNorm<1>();
  return out;
}

NoiseModel parse_noise_model(const std::string& name) {
  if (name == "l1_budget") return NoiseModel::l1_budget;
  if (name == "gaussian") return NoiseModel::gaussian;
  throw std::invalid_argument("unknown noise model: " + name);
}

std::string to_string(NoiseModel m) { return m == NoiseModel::l1_budget ? "l1_budget" : "gaussian"; }

double srf(int flo, double lhi, int N) {
  const double lambda_lo = 1.0 / flo;
  if (!(lhi < lambda_lo)) throw std::invalid_argument("srf: lhi must be below lambda_lo");
  if (lhi < (1.0 - 1e-12) / N) throw std::invalid_argument("srf: lhi must be at least 1/N");
  return lambda_lo / lhi;
}

double dsrf(int N, int flo) { return double(N) / (2.0 * flo); }

}  // namespace srfine
