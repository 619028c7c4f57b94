#pragma once

// JSON records for the library types, as consumed by the command line tool
// and the Python bindings.

#include <json.hpp>

#include "subord/dominant.hpp"
#include "subord/nb_operator.hpp"
#include "subord/region.hpp"

namespace subord {

nlohmann::json complex_json(Complex z);
Complex complex_from_json(const nlohmann::json& j);  // number or [re, im]

nlohmann::json to_json(const Region& region);
nlohmann::json to_json(const SubordinationVerdict& verdict);
nlohmann::json to_json(const ClassParams& params);
nlohmann::json to_json(const ClassTarget& target);
nlohmann::json to_json(const MembershipVerdict& verdict);
nlohmann::json to_json(const ReExtrema& extrema);
nlohmann::json to_json(const DominantReport& report);
nlohmann::json to_json(const TheoremReport& report);
nlohmann::json to_json(const InclusionReport& report);

ClassTarget target_from_json(const nlohmann::json& j);  // {"A":..,"B":..} or {"rho":..}

}  // namespace subord
