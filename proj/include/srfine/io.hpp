#pragma once

#include "srfine/certificates.hpp"
#include "srfine/metrics.hpp"
#include "srfine/solver.hpp"

#include <json.hpp>

#include <string>

namespace srfine {

using Json = nlohmann::ordered_json;

inline constexpr int json_schema_version = 1;

// {N, flo, support_indices, amplitudes}
Json signal_to_json(const GridSignal& x, int flo);
GridSignal signal_from_json(const Json& j);

Json poly_to_json(const TrigPolyd& p);  // coefficients as [re, im] pairs, k = -fc..fc
TrigPolyd poly_from_json(const Json& j);

Json solve_report_to_json(const SolveReport& rep, bool include_xhat);
Json breakdown_to_json(const ErrorBreakdown& b);
Json certificate_pack_to_json(const CertificatePack& pack);
Json property_report_to_json(const PropertyReport& rep);
Json norm_report_to_json(const MatrixNormReport& rep);
Json fejer_report_to_json(const FejerSumReport& rep);

// 64-bit FNV-1a of the compact dump, as 16 hex digits.
std::string config_hash(const Json& canonical);

}  // namespace srfine
