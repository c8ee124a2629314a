#include "srfine/io.hpp"

#include <cstdint>
#include <cstdio>

namespace srfine {

Json signal_to_json(const GridSignal& x, int flo) {
  Json j;
  j["N"] = x.N;
  j["flo"] = flo;
  Json idx = Json::array(), amp = Json::array();
  for (int m = 0; m < x.N; ++m)
    if (x.values(m) != 0.0) {
      idx.push_back(m);
      amp.push_back(x.values(m));
    }
  j["support_indices"] = idx;
  j["amplitudes"] = amp;
  return j;
}

GridSignal signal_from_json(const Json& j) {
  GridSignal x;
  x.N = j.at("N").get<int>();
  x.values = Eigen::VectorXd::Zero(x.N);
  const auto& idx = j.at("support_indices");
  const auto& amp = j.at("amplitudes");
  if (idx.size() != amp.size()) throw std::invalid_argument("signal record: index/amplitude count mismatch");
  for (std::size_t i = 0; i < idx.size(); ++i) {
    const int m = idx[i].get<int>();
    if (m < 0 || m >= x.N) throw std::invalid_argument("signal record: support index out of range");
    x.values(m) = amp[i].get<double>();
  }
  return x;
}

Json poly_to_json(const TrigPolyd& p) {
  Json c = Json::array();
  for (Eigen::Index i = 0; i < p.coeffs().size(); ++i) c.push_back({p.coeffs()(i).real(), p.coeffs()(i).imag()});
  return Json{{"cutoff", p.cutoff()}, {"coefficients", c}};
}

TrigPolyd poly_from_json(const Json& j) {
  const int fc = j.at("cutoff").get<int>();
  const auto& c = j.at("coefficients");
  if (int(c.size()) != 2 * fc + 1) throw std::invalid_argument("polynomial record: expected 2*cutoff+1 coefficients");
  TrigPolyd::Coeffs v(2 * fc + 1);
  for (int i = 0; i < 2 * fc + 1; ++i) v(i) = {c[i].at(0).get<double>(), c[i].at(1).get<double>()};
  return TrigPolyd(fc, v);
}

Json solve_report_to_json(const SolveReport& rep, bool include_xhat) {
  Json j{{"objective", rep.objective},
         {"dual_objective", rep.dual_objective},
         {"gap", rep.objective - rep.dual_objective},
         {"iterations", rep.iterations},
         {"converged", rep.converged},
         {"max_feasibility_violation", rep.max_feasibility_violation}};
  Json hist = Json::array();
  for (const auto& h : rep.history) hist.push_back({h.iteration, h.objective, h.best_objective, h.dual_objective, h.gap});
  j["history_columns"] = {"iteration", "objective", "best_objective", "dual_objective", "gap"};
  j["history"] = hist;
  if (include_xhat) j["xhat"] = std::vector<double>(rep.xhat.values.data(), rep.xhat.values.data() + rep.xhat.N);
  return j;
}

Json breakdown_to_json(const ErrorBreakdown& b) {
  auto num = [](double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); };
  return Json{{"total", b.total},         {"A0", b.A0},
              {"A1", b.A1},               {"A2", b.A2},
              {"A3", b.A3},               {"rhs", b.rhs},
              {"bound_paper", num(b.bound_paper)}, {"empirical_constant", num(b.bound_empirical_constant)}};
}

Json certificate_pack_to_json(const CertificatePack& pack) {
  Json j;
  j["support_indices"] = pack.params.T.indices;
  j["N"] = pack.params.T.N;
  j["r"] = pack.params.r;
  j["flo"] = pack.params.flo;
  j["lhi"] = pack.params.lhi;
  j["precondition_ok"] = pack.precondition_ok;
  j["precondition_detail"] = pack.precondition_detail;
  j["factor_cutoff"] = pack.factor_fc;
  j["partition"] = pack.partition;
  j["rho"] = pack.rho;
  j["gamma"] = pack.gamma;
  j["s"] = pack.s;
  j["s_prime"] = pack.s_prime;
  if (!pack.precondition_ok) return j;
  std::vector<double> s1, s2;
  for (const auto& t : pack.q1_terms) s1.push_back(t.scale);
  for (const auto& t : pack.q2_terms) s2.push_back(t.scale);
  j["q1_constraint_scales"] = s1;
  j["q2_constraint_scales"] = s2;
  j["q0"] = poly_to_json(pack.q0);
  j["q1"] = poly_to_json(pack.q1);
  j["q2"] = poly_to_json(pack.q2);
  return j;
}

Json property_report_to_json(const PropertyReport& rep) {
  Json checks = Json::array();
  for (const auto& c : rep.checks)
    checks.push_back({{"name", c.name},
                      {"constants", c.constants},
                      {"passed", c.passed},
                      {"worst_margin", std::isfinite(c.worst_margin) ? Json(c.worst_margin) : Json(nullptr)},
                      {"fitted_constant", c.fitted_constant},
                      {"detail", c.detail}});
  return Json{{"precondition_ok", rep.precondition_ok},
              {"precondition_detail", rep.precondition_detail},
              {"paper_regime", rep.paper_regime},
              {"all_pass", rep.precondition_ok && rep.all_pass()},
              {"checks", checks}};
}

Json norm_report_to_json(const MatrixNormReport& rep) {
  Json e = Json::array();
  for (const auto& n : rep.entries) e.push_back({{"name", n.name}, {"measured", n.measured}, {"bound", n.bound}, {"pass", n.pass()}});
  return e;
}

Json fejer_report_to_json(const FejerSumReport& r) {
  return Json{{"N", r.N},
              {"lhi", r.lhi},
              {"fhi", r.fhi},
              {"normalization", r.normalization},
              {"normalization_expected", r.normalization_expected},
              {"d1_sum", r.d1_sum},
              {"d1_bound", r.d1_bound},
              {"d1_pass", r.d1_pass},
              {"d2_sum", r.d2_sum},
              {"d2_bound", r.d2_bound},
              {"d2_analytic", r.d2_analytic},
              {"d2_pass", r.d2_pass}};
}

std::string config_hash(const Json& canonical) {
  const std::string s = canonical.dump();
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace srfine
