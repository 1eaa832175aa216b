#include "contactflow/report.hpp"

namespace contactflow {

nlohmann::json ConditionRecord::toJson() const {
  nlohmann::json j;
  j["condition"] = condition;
  j["pass"] = pass;
  j["worst_residual"] = worst_residual;
  j["worst_point"] = worst_point;
  j["detail"] = detail;
  return j;
}

nlohmann::json CheckReport::toJson() const {
  nlohmann::json j;
  j["verdict"] = verdict();
  j["conditions"] = nlohmann::json::array();
  for (const auto& c : conditions) j["conditions"].push_back(c.toJson());
  return j;
}

}  // namespace contactflow
