#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "contactflow/chart.hpp"

namespace contactflow {

/// One verified condition: what was checked, whether it held, the largest
/// residual seen and where, plus a human-readable note.
struct ConditionRecord {
  std::string condition;
  bool pass = true;
  double worst_residual = 0.0;
  std::vector<double> worst_point;
  std::string detail;

  void notePoint(const Vec& p) {
    worst_point.assign(p.data(), p.data() + p.size());
  }
  /// Track the max residual and remember where it happened.
  void track(double r, const Vec& p) {
    if (r >= worst_residual) {
      worst_residual = r;
      notePoint(p);
    }
  }
  nlohmann::json toJson() const;
};

/// A bundle of condition records; the verdict is their conjunction.
struct CheckReport {
  std::vector<ConditionRecord> conditions;

  ConditionRecord& add(std::string name) {
    conditions.emplace_back();
    conditions.back().condition = std::move(name);
    return conditions.back();
  }
  const ConditionRecord* find(const std::string& name) const {
    for (const auto& c : conditions)
      if (c.condition == name) return &c;
    return nullptr;
  }
  bool verdict() const {
    for (const auto& c : conditions)
      if (!c.pass) return false;
    return true;
  }
  nlohmann::json toJson() const;
};

}  // namespace contactflow
