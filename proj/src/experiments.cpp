#include "srfine/experiments.hpp"

#include "srfine/constants.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <random>
#include <set>
#include <sstream>
#include <thread>

namespace srfine {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Configuration

namespace {

template <typename T>
void read(const Json& j, const char* key, T& dst) {
  if (!j.contains(key)) return;
  try {
    dst = j.at(key).get<T>();
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config field '") + key + "': " + e.what());
  }
}

void reject_unknown(const Json& j, const std::set<std::string>& known, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
  for (const auto& [k, v] : j.items())
    if (!known.count(k)) throw ConfigError("unknown config field '" + k + "' in " + where);
}

Json solver_to_json(const SolverConfig& s) {
  return Json{{"max_iters", s.max_iters},         {"primal_step", s.primal_step},
              {"dual_step", s.dual_step},         {"tol_obj", s.tol_obj},
              {"tol_gap", s.tol_gap},             {"tol_feas", s.tol_feas},
              {"check_interval", s.check_interval}, {"restart", s.restart},
              {"restart_factor", s.restart_factor}, {"restart_period", s.restart_period},
              {"primal_weight", s.primal_weight}, {"adaptive_weight", s.adaptive_weight}};
}

SolverConfig solver_from_json(const Json& j, SolverConfig s) {
  reject_unknown(j,
                 {"max_iters", "primal_step", "dual_step", "tol_obj", "tol_gap", "tol_feas", "check_interval", "restart",
                  "restart_factor", "restart_period", "primal_weight", "adaptive_weight"},
                 "solver");
  read(j, "max_iters", s.max_iters);
  read(j, "primal_step", s.primal_step);
  read(j, "dual_step", s.dual_step);
  read(j, "tol_obj", s.tol_obj);
  read(j, "tol_gap", s.tol_gap);
  read(j, "tol_feas", s.tol_feas);
  read(j, "check_interval", s.check_interval);
  read(j, "restart", s.restart);
  read(j, "restart_factor", s.restart_factor);
  read(j, "restart_period", s.restart_period);
  read(j, "primal_weight", s.primal_weight);
  read(j, "adaptive_weight", s.adaptive_weight);
  return s;
}

}  // namespace

ExperimentConfig config_from_json(const Json& j) {
  reject_unknown(j,
                 {"schema", "seed", "trials", "N", "flo", "r", "spikes", "kappa_mult", "srf", "lhi", "noise_model",
                  "noise_levels", "solver", "compare_paper_bound", "sign_pattern", "fitted_constants", "oversample",
                  "norm_trials", "norm_cutoff", "fejer_grid", "bound_scale", "out_dir", "trace", "workers"},
                 "config");
  if (j.contains("schema") && j.at("schema") != json_schema_version)
    throw ConfigError("config schema must be " + std::to_string(json_schema_version));
  ExperimentConfig c;
  read(j, "seed", c.seed);
  read(j, "trials", c.trials);
  read(j, "N", c.N);
  read(j, "flo", c.flo);
  read(j, "r", c.r);
  read(j, "spikes", c.spikes);
  read(j, "kappa_mult", c.kappa_mult);
  read(j, "srf", c.srf);
  read(j, "lhi", c.lhi);
  if (j.contains("noise_model")) {
    try {
      c.noise_model = parse_noise_model(j.at("noise_model").get<std::string>());
    } catch (const std::exception& e) {
      throw ConfigError(std::string("config field 'noise_model': ") + e.what());
    }
  }
  read(j, "noise_levels", c.noise_levels);
  if (j.contains("solver")) c.solver = solver_from_json(j.at("solver"), c.solver);
  read(j, "compare_paper_bound", c.compare_paper_bound);
  read(j, "sign_pattern", c.sign_pattern);
  read(j, "fitted_constants", c.fitted_constants);
  read(j, "oversample", c.oversample);
  read(j, "norm_trials", c.norm_trials);
  read(j, "norm_cutoff", c.norm_cutoff);
  read(j, "fejer_grid", c.fejer_grid);
  read(j, "bound_scale", c.bound_scale);
  read(j, "out_dir", c.out_dir);
  read(j, "trace", c.trace);
  read(j, "workers", c.workers);
  return c;
}

Json config_to_json(const ExperimentConfig& c, bool include_execution) {
  Json j{{"schema", json_schema_version},
         {"seed", c.seed},
         {"trials", c.trials},
         {"N", c.N},
         {"flo", c.flo},
         {"r", c.r},
         {"spikes", c.spikes},
         {"kappa_mult", c.kappa_mult},
         {"srf", c.srf},
         {"lhi", c.lhi},
         {"noise_model", to_string(c.noise_model)},
         {"noise_levels", c.noise_levels},
         {"solver", solver_to_json(c.solver)},
         {"compare_paper_bound", c.compare_paper_bound},
         {"sign_pattern", c.sign_pattern},
         {"fitted_constants", c.fitted_constants},
         {"oversample", c.oversample},
         {"norm_trials", c.norm_trials},
         {"norm_cutoff", c.norm_cutoff},
         {"fejer_grid", c.fejer_grid},
         {"bound_scale", c.bound_scale}};
  if (include_execution) {
    j["out_dir"] = c.out_dir;
    j["trace"] = c.trace;
    j["workers"] = c.workers;
  }
  return j;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  Json j;
  try {
    j = Json::parse(in);
  } catch (const std::exception& e) {
    throw ConfigError("config file " + path + " is not valid JSON: " + e.what());
  }
  return config_from_json(j);
}

std::string hash_of(const ExperimentConfig& cfg) { return config_hash(config_to_json(cfg, false)); }

std::vector<double> sweep_lhi(const ExperimentConfig& cfg) {
  std::vector<double> out;
  for (double s : cfg.srf) out.push_back(1.0 / (cfg.flo * s));
  if (out.empty() && cfg.lhi > 0.0) out.push_back(cfg.lhi);
  return out;
}

void validate_config(const ExperimentConfig& c, Command cmd) {
  auto fail = [](const std::string& m) { throw ConfigError(m); };
  if (c.N < 4 || c.N % 2 != 0) fail("N must be even and at least 4");
  if (c.flo < 1 || 2 * c.flo >= c.N) fail("flo must satisfy 1 <= flo < N/2");
  if (c.r < 1) fail("r must be at least 1");
  if (c.trials < 1) fail("trials must be at least 1");
  if (c.spikes < 1) fail("spikes must be at least 1");
  if (!(c.kappa_mult > 0.0)) fail("kappa_mult must be positive");
  if (c.oversample < 1) fail("oversample must be at least 1");
  if (c.workers < 0) fail("workers must be nonnegative");
  for (double s : c.srf)
    if (!(s > 1.0)) fail("every srf entry must exceed 1");
  for (double l : sweep_lhi(c)) {
    if (l * c.N < 1.0 - 1e-9) fail("srf too large: lhi = lambda_lo/srf falls below 1/N");
    if (!(l < 1.0 / c.flo)) fail("lhi must be below lambda_lo");
  }
  if (cmd != Command::verify_bounds && sweep_lhi(c).empty()) fail("set srf or lhi");
  if (cmd == Command::simulate && c.noise_levels.empty()) fail("noise_levels must not be empty");
  for (double z : c.noise_levels)
    if (z < 0.0) fail("noise levels must be nonnegative");
  if (c.solver.primal_step <= 0 || c.solver.dual_step <= 0 || c.solver.primal_step * c.solver.dual_step > 1.0)
    fail("solver steps must be positive with product at most 1");
  if (c.solver.check_interval < 1 || c.solver.max_iters < 1) fail("solver iteration settings must be positive");
  if (c.compare_paper_bound)
    for (double s : c.srf)
      if (!(s > 12.0)) fail("compare_paper_bound needs every srf > 12");
  if (cmd == Command::certify) {
    if (c.sign_pattern != "random" && c.sign_pattern != "positive" && c.sign_pattern != "alternating")
      fail("sign_pattern must be random, positive or alternating");
    if (!c.fitted_constants && c.flo < 128 * c.r)
      fail("paper-constant certificate checks need flo >= 128 r; pass --fitted-constants for smaller flo");
    if (c.flo / c.r < 4) fail("certificates need floor(flo/r) >= 4");
  }
  if (cmd == Command::verify_bounds) {
    if (c.norm_trials < 0) fail("norm_trials must be nonnegative");
    if (c.norm_cutoff < 4 || c.norm_cutoff % 2 != 0) fail("norm_cutoff must be even and at least 4");
    if (!(c.bound_scale > 0.0)) fail("bound_scale must be positive");
    for (const auto& [n, l] : c.fejer_grid)
      if (n < 2 || !(l * n >= 1.0 - 1e-9) || !(l < 1.0)) fail("fejer_grid entries need N >= 2 and 1/N <= lhi < 1");
  }
}

// ---------------------------------------------------------------------------
// Execution helpers

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b) {
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  };
  return mix(mix(mix(base) ^ a) ^ (b * 0x632be59bd9b4e019ull));
}

void parallel_for(int count, int workers, const std::function<void(int)>& fn) {
  if (workers <= 0) workers = int(std::max(1u, std::thread::hardware_concurrency()));
  workers = std::min(workers, std::max(count, 1));
  std::vector<std::exception_ptr> errors(count);
  std::atomic<int> next{0};
  auto body = [&] {
    for (int i = next++; i < count; i = next++) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (workers == 1) {
    body();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(body);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

namespace {

std::string fmt(double v) {
  if (!std::isfinite(v)) return "nan";
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

SignalRequest request_for(const ExperimentConfig& cfg, std::uint64_t seed, double max_lhi) {
  SignalRequest rq;
  rq.seed = seed;
  rq.N = cfg.N;
  rq.flo = cfg.flo;
  rq.r = cfg.r;
  rq.spikes = cfg.spikes;
  rq.kappa_mult = cfg.kappa_mult;
  rq.min_sep_hi = 2.0 * max_lhi;
  return rq;
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory " + dir + ": " + ec.message());
}

void write_file(const fs::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << content;
}

}  // namespace

// ---------------------------------------------------------------------------
// simulate

bool SimulationResult::all_ok() const {
  return std::all_of(rows.begin(), rows.end(), [](const SimulationRow& r) { return r.flag.empty(); });
}

SimulationResult run_simulation(const ExperimentConfig& cfg) {
  validate_config(cfg, Command::simulate);
  const auto t0 = std::chrono::steady_clock::now();
  const auto lhis = sweep_lhi(cfg);
  const double max_lhi = *std::max_element(lhis.begin(), lhis.end());
  const int levels = int(cfg.noise_levels.size());
  const int count = cfg.trials * levels;

  SimulationResult res;
  res.config_hash = hash_of(cfg);
  res.points.resize(count);
  std::vector<std::vector<SimulationRow>> rows(count);
  LowPassOperator op(cfg.N, cfg.flo);
  SolverConfig scfg = cfg.solver;
  scfg.keep_history = cfg.trace;

  parallel_for(count, cfg.workers, [&](int i) {
    const int trial = i / levels, ni = i % levels;
    auto& pt = res.points[i];
    pt.trial = trial;
    pt.noise_index = ni;
    SimulationRow base;
    base.trial = trial;
    base.noise_level = cfg.noise_levels[ni];
    base.signal_seed = derive_seed(cfg.seed, trial, 0);
    // one noise direction per trial, scaled to each level
    base.noise_seed = derive_seed(cfg.seed, trial, 1);
    try {
      pt.x = generate_signal(request_for(cfg, base.signal_seed, max_lhi)).signal;
    } catch (const std::exception& e) {
      pt.error = e.what();
      for (double l : lhis) {
        SimulationRow r = base;
        r.lhi = l;
        r.srf = 1.0 / (cfg.flo * l);
        r.flag = "geometry";
        r.breakdown.total = std::nan("");
        rows[i].push_back(r);
      }
      return;
    }
    const auto meas = add_noise(apply_lowpass(op, pt.x.values), cfg.noise_model, base.noise_level, base.noise_seed);
    pt.solve = solve_cvx(meas.y, op, scfg);
    const Eigen::VectorXd h = pt.solve.xhat.values - pt.x.values;
    const SupportSet T = negative_support(h);
    for (double l : lhis) {
      SimulationRow r = base;
      r.z_l1 = meas.z_l1;
      r.lhi = l;
      r.srf = 1.0 / (cfg.flo * l);
      r.x_l1 = pt.x.values.lpNorm<1>();
      r.objective = pt.solve.objective;
      r.gap = pt.solve.objective - pt.solve.dual_objective;
      r.iterations = pt.solve.iterations;
      r.converged = pt.solve.converged;
      try {
        r.breakdown = error_decomposition(h, T, l, cfg.N);
        r.decomposition_ok = true;
      } catch (const GeometryError&) {
        r.breakdown = ErrorBreakdown{};
        r.breakdown.total = fejer_l1(h, l, cfg.N);
      }
      attach_bounds(r.breakdown, cfg.r, r.srf, r.z_l1);
      if (!r.converged) r.flag = "not_converged";
      rows[i].push_back(r);
    }
  });
  for (auto& block : rows)
    for (auto& r : block) res.rows.push_back(std::move(r));
  res.wall_clock_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

std::string simulation_csv_header() {
  return "config_hash,trial,signal_seed,noise_seed,N,flo,r,spikes,noise_model,noise_level,z_l1,lhi,srf,x_l1,error,"
         "A0,A1,A2,A3,decomposition_ok,bound_paper,empirical_constant,objective,gap,iterations,converged,flag";
}

std::string simulation_csv_row(const std::string& hash, const ExperimentConfig& c, const SimulationRow& r) {
  std::ostringstream os;
  const auto& b = r.breakdown;
  os << hash << ',' << r.trial << ',' << r.signal_seed << ',' << r.noise_seed << ',' << c.N << ',' << c.flo << ','
     << c.r << ',' << c.spikes << ',' << to_string(c.noise_model) << ',' << fmt(r.noise_level) << ',' << fmt(r.z_l1)
     << ',' << fmt(r.lhi) << ',' << fmt(r.srf) << ',' << fmt(r.x_l1) << ',' << fmt(b.total) << ',' << fmt(b.A0) << ','
     << fmt(b.A1) << ',' << fmt(b.A2) << ',' << fmt(b.A3) << ',' << (r.decomposition_ok ? 1 : 0) << ','
     << fmt(b.bound_paper) << ',' << fmt(b.bound_empirical_constant) << ',' << fmt(r.objective) << ',' << fmt(r.gap)
     << ',' << r.iterations << ',' << (r.converged ? 1 : 0) << ',' << r.flag;
  return os.str();
}

int cmd_simulate(const ExperimentConfig& cfg, std::ostream& log) {
  const auto res = run_simulation(cfg);
  ensure_dir(cfg.out_dir);
  const fs::path dir(cfg.out_dir);
  std::ostringstream csv;
  csv << simulation_csv_header() << '\n';
  for (const auto& r : res.rows) csv << simulation_csv_row(res.config_hash, cfg, r) << '\n';
  write_file(dir / "simulate.csv", csv.str());

  Json summary{{"schema", json_schema_version}, {"config_hash", res.config_hash}, {"config", config_to_json(cfg)}};
  Json pts = Json::array();
  for (const auto& p : res.points) {
    Json jp{{"trial", p.trial}, {"noise_level", cfg.noise_levels[p.noise_index]}};
    if (!p.error.empty()) {
      jp["error"] = p.error;
    } else {
      jp["signal"] = signal_to_json(p.x, cfg.flo);
      Json s = solve_report_to_json(p.solve, false);
      s.erase("history");
      s.erase("history_columns");
      jp["solver"] = s;
    }
    pts.push_back(jp);
  }
  summary["points"] = pts;
  Json rows = Json::array();
  for (const auto& r : res.rows)
    rows.push_back({{"trial", r.trial},
                    {"noise_level", r.noise_level},
                    {"srf", r.srf},
                    {"error", std::isfinite(r.breakdown.total) ? Json(r.breakdown.total) : Json(nullptr)},
                    {"decomposition_ok", r.decomposition_ok},
                    {"breakdown", breakdown_to_json(r.breakdown)},
                    {"flag", r.flag}});
  summary["rows"] = rows;
  summary["wall_clock_seconds"] = res.wall_clock_seconds;
  write_file(dir / "simulate.json", summary.dump(2) + "\n");

  if (cfg.trace) {
    for (const auto& p : res.points) {
      if (!p.error.empty()) continue;
      std::ostringstream tr;
      tr << "config_hash,trial,noise_level,iteration,objective,best_objective,dual_objective,gap\n";
      for (const auto& h : p.solve.history)
        tr << res.config_hash << ',' << p.trial << ',' << fmt(cfg.noise_levels[p.noise_index]) << ',' << h.iteration
           << ',' << fmt(h.objective) << ',' << fmt(h.best_objective) << ',' << fmt(h.dual_objective) << ','
           << fmt(h.gap) << '\n';
      write_file(dir / ("trace_t" + std::to_string(p.trial) + "_n" + std::to_string(p.noise_index) + ".csv"), tr.str());
    }
  }

  int flagged = 0;
  for (const auto& r : res.rows) flagged += !r.flag.empty();
  log << "simulate: " << res.rows.size() << " rows, " << flagged << " flagged, config " << res.config_hash << " -> "
      << (dir / "simulate.csv").string() << "\n";
  return res.all_ok() ? 0 : 1;
}

// ---------------------------------------------------------------------------
// certify

bool CertifyResult::all_pass() const {
  return std::all_of(items.begin(), items.end(),
                     [](const CertifyItem& it) { return it.report.precondition_ok && it.report.all_pass(); });
}

namespace {

std::vector<int> make_signs(const std::string& pattern, std::size_t n, std::uint64_t seed) {
  std::vector<int> s(n, 1);
  if (pattern == "alternating") {
    for (std::size_t j = 0; j < n; ++j) s[j] = j % 2 == 0 ? 1 : -1;
  } else if (pattern == "random") {
    std::mt19937_64 rng(seed);
    for (auto& v : s) v = (rng() & 1u) ? 1 : -1;
  }
  return s;
}

}  // namespace

CertifyResult run_certify(const ExperimentConfig& cfg) {
  validate_config(cfg, Command::certify);
  const auto lhis = sweep_lhi(cfg);
  const int L = int(lhis.size());
  CertifyResult res;
  res.config_hash = hash_of(cfg);
  res.items.resize(cfg.trials * L);
  CertificateTolerances tol;
  tol.oversample = cfg.oversample;
  tol.force_fitted = cfg.fitted_constants;
  parallel_for(int(res.items.size()), cfg.workers, [&](int i) {
    auto& it = res.items[i];
    it.trial = i / L;
    it.lhi = lhis[i % L];
    const auto g = generate_signal(request_for(cfg, derive_seed(cfg.seed, it.trial, 0), it.lhi));
    const auto s = make_signs(cfg.sign_pattern, g.support.size(), derive_seed(cfg.seed, it.trial, 101));
    const auto sp = make_signs(cfg.sign_pattern, g.support.size(), derive_seed(cfg.seed, it.trial, 102));
    it.pack = build_certificate_pack({g.support, cfg.r, cfg.flo, it.lhi}, s, sp);
    it.report = verify_certificate(it.pack, tol);
  });
  return res;
}

int cmd_certify(const ExperimentConfig& cfg, std::ostream& log) {
  const auto res = run_certify(cfg);
  ensure_dir(cfg.out_dir);
  const fs::path dir(cfg.out_dir);
  std::ostringstream table;
  Json items = Json::array();
  for (const auto& it : res.items) {
    table << "# trial " << it.trial << ", lhi " << fmt(it.lhi) << ", srf " << fmt(1.0 / (cfg.flo * it.lhi)) << ", |T| "
          << it.pack.params.T.size() << (it.report.paper_regime ? ", paper constants" : ", fitted constants") << "\n"
          << format_margin_table(it.report) << "\n";
    items.push_back({{"trial", it.trial},
                     {"lhi", it.lhi},
                     {"pack", certificate_pack_to_json(it.pack)},
                     {"report", property_report_to_json(it.report)}});
  }
  write_file(dir / "certify_margins.txt", table.str());
  Json out{{"schema", json_schema_version},
           {"config_hash", res.config_hash},
           {"config", config_to_json(cfg)},
           {"all_pass", res.all_pass()},
           {"items", items}};
  write_file(dir / "certify.json", out.dump(2) + "\n");
  log << table.str();
  log << "certify: " << (res.all_pass() ? "all checks pass" : "FAILURES present") << ", config " << res.config_hash
      << "\n";
  return res.all_pass() ? 0 : 1;
}

// ---------------------------------------------------------------------------
// verify-bounds

bool BoundsResult::all_pass() const {
  const bool fej = std::all_of(fejer.begin(), fejer.end(), [](const FejerSumReport& r) {
    return r.d1_pass && r.d2_pass && r.normalization_pass();
  });
  const bool bern = std::all_of(bernstein.begin(), bernstein.end(), [](const PropertyCheck& c) { return c.passed; });
  const bool norms_ok =
      std::all_of(norms.begin(), norms.end(), [](const MatrixNormReport& r) { return r.all_pass(); });
  return fej && bern && norms_ok;
}

BoundsResult run_verify_bounds(const ExperimentConfig& cfg) {
  validate_config(cfg, Command::verify_bounds);
  BoundsResult res;
  res.config_hash = hash_of(cfg);

  // Block-system norms over random kappa-separated sets at the configured cutoff.
  const int fc = cfg.norm_cutoff;
  res.norms.resize(cfg.norm_trials);
  parallel_for(cfg.norm_trials, cfg.workers, [&](int i) {
    const std::uint64_t seed = derive_seed(cfg.seed, 7001, i);
    SignalRequest rq;
    rq.seed = seed;
    rq.N = 32 * fc;
    rq.flo = fc;
    rq.r = 1;
    rq.kappa_mult = constants::kappa;
    rq.spikes = 1 + int(seed % 40);
    const auto g = generate_signal(rq);
    res.norms[i] = matrix_norm_report(assemble_system(g.support.positions(), fc), cfg.bound_scale);
  });
  if (!res.norms.empty()) {
    res.worst_norms = res.norms.front();
    for (const auto& r : res.norms)
      for (std::size_t e = 0; e < r.entries.size(); ++e)
        res.worst_norms.entries[e].measured = std::max(res.worst_norms.entries[e].measured, r.entries[e].measured);
  }

  for (const auto& [n, l] : cfg.fejer_grid) res.fejer.push_back(verify_fejer_sum_bounds(n, l));

  // Bernstein on certificates built from the configured geometry.
  ExperimentConfig c = cfg;
  c.fitted_constants = true;
  if (c.flo / c.r >= 4 && !sweep_lhi(c).empty()) {
    c.trials = std::min(cfg.trials, 3);
    c.srf = {c.srf.empty() ? 1.0 / (c.flo * c.lhi) : c.srf.front()};
    const auto cert = run_certify(c);
    for (const auto& it : cert.items)
      for (const auto& chk : it.report.checks)
        if (chk.name.rfind("bernstein", 0) == 0) {
          PropertyCheck b = chk;
          b.name += "_trial" + std::to_string(it.trial);
          res.bernstein.push_back(b);
        }
  }
  return res;
}

std::string format_bounds_table(const BoundsResult& res) {
  std::ostringstream os;
  os << "block-system norms, worst over " << res.norms.size() << " sets\n";
  os << std::left << std::setw(24) << "quantity" << std::setw(16) << "measured" << std::setw(16) << "bound"
     << "pass\n";
  for (const auto& e : res.worst_norms.entries)
    os << std::left << std::setw(24) << e.name << std::setw(16) << std::setprecision(6) << e.measured << std::setw(16)
       << e.bound << (e.pass() ? "yes" : "NO") << "\n";
  os << "\nFejer kernel sums\n";
  os << std::left << std::setw(8) << "N" << std::setw(12) << "lhi" << std::setw(20) << "sum k" << std::setw(14)
     << "sum|k'|" << std::setw(14) << "bound" << std::setw(14) << "sum sup|k''|" << std::setw(14) << "bound"
     << std::setw(14) << "analytic" << "pass\n";
  for (const auto& r : res.fejer) {
    const bool ok = r.d1_pass && r.d2_pass && r.normalization_pass();
    os << std::left << std::setw(8) << r.N << std::setw(12) << std::setprecision(6) << r.lhi << std::setw(20)
       << std::setprecision(13) << r.normalization << std::setprecision(6) << std::setw(14) << r.d1_sum << std::setw(14)
       << r.d1_bound << std::setw(14) << r.d2_sum << std::setw(14) << r.d2_bound << std::setw(14) << r.d2_analytic
       << (ok ? "yes" : "NO") << (r.fhi >= r.N ? "  (fhi = N: aliased mass " + std::to_string(r.normalization_expected) + " expected)" : "")
       << "\n";
  }
  os << "\nBernstein checks on certificates\n";
  for (const auto& b : res.bernstein)
    os << std::left << std::setw(28) << b.name << std::setw(14) << std::setprecision(4) << b.worst_margin
       << (b.passed ? "yes" : "NO") << "\n";
  os << "\noverall: " << (res.all_pass() ? "PASS" : "FAIL") << "\n";
  return os.str();
}

int cmd_verify_bounds(const ExperimentConfig& cfg, std::ostream& log) {
  const auto res = run_verify_bounds(cfg);
  ensure_dir(cfg.out_dir);
  const fs::path dir(cfg.out_dir);
  const std::string table = format_bounds_table(res);
  write_file(dir / "verify_bounds.txt", table);
  Json fej = Json::array();
  for (const auto& r : res.fejer) fej.push_back(fejer_report_to_json(r));
  Json bern = Json::array();
  for (const auto& b : res.bernstein) bern.push_back({{"name", b.name}, {"passed", b.passed}, {"worst_margin", b.worst_margin}});
  Json out{{"schema", json_schema_version},
           {"config_hash", res.config_hash},
           {"config", config_to_json(cfg)},
           {"all_pass", res.all_pass()},
           {"block_norms_worst", norm_report_to_json(res.worst_norms)},
           {"fejer_sums", fej},
           {"bernstein", bern}};
  write_file(dir / "verify_bounds.json", out.dump(2) + "\n");
  log << table;
  return res.all_pass() ? 0 : 1;
}

}  // namespace srfine
