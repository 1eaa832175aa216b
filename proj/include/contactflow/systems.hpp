#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "contactflow/contact.hpp"

namespace contactflow {

/// Thrown when a system description (JSON or programmatic) is malformed;
/// the message names the offending path.
class SpecError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Numerical thresholds used by the checks; every value is pinned here and
/// serialized with the system so reports are self-describing.
struct ToleranceSet {
  double reeb = 1e-9;           // Reeb defining relations
  double semibasic = 1e-8;      // |<df,Z>| for semi-basic claims
  double involution = 1e-8;     // |[f_i, f_j]| for central pairs
  double bracket_cross = 1e-9;  // agreement of the two bracket formulas
  double rank_ratio = 1e-6;     // sigma_min / sigma_max for independence
  double drift = 1e-6;          // integral drift along the flow
  double pullback = 1e-6;
  double rotation = 1e-4;
  double action = 1e-6;         // quadrature error bound
  double isomorphism = 1e-6;    // bracket vs Lie-bracket transport
  double derivation = 1e-7;
  double jacobi_identity = 1e-6;
  double antisymmetry = 1e-12;
  double degenerate = 1e-12;    // |det| below this counts as non-contact

  nlohmann::json toJson() const;
  static ToleranceSet fromJson(const nlohmann::json& j);
};

/// Optional action-angle metadata: which chart angles close the invariant
/// tori (theta0 first), formal names for the actions conjugate to the
/// remaining angles, and y0 as an expression in those names.
struct CanonicalInfo {
  std::vector<std::string> angles;
  std::vector<std::string> actionNames;
  std::string y0;
  bool empty() const { return angles.empty(); }
};

/// A complete system description: chart, contact form, named scalar fields,
/// declared integrals, symmetry vector fields, and check tolerances.
/// Serializes to the JSON spec format (version 1) and back.
struct SystemDef {
  std::string name;
  Chart chart;
  std::vector<std::string> alphaText;
  std::vector<std::pair<std::string, std::string>> fieldText;  // name -> expression
  std::vector<std::string> integralNames;
  std::vector<std::pair<std::string, std::vector<std::string>>> symmetryText;
  int r = 0;
  std::string hamiltonianName = "1";
  CanonicalInfo canonical;
  ToleranceSet tol;
  uint64_t seed = 1;

  const ContactForm& form() const;
  std::shared_ptr<const ScalarField> field(const std::string& fieldName) const;
  /// nullptr means "the constant 1", i.e. the Reeb flow.
  std::shared_ptr<const ScalarField> hamiltonian() const;
  std::vector<std::pair<std::string, std::shared_ptr<const ScalarField>>> integrals() const;
  std::vector<std::pair<std::string, std::shared_ptr<const VectorField>>> symmetries() const;
  /// Chart indices of the canonical angles; falls back to every periodic
  /// coordinate when no canonical block is present.
  std::vector<int> angleIndices() const;
  void addField(const std::string& fieldName, const std::string& expression,
                bool asIntegral);

  nlohmann::json toJson() const;
  static SystemDef fromJson(const nlohmann::json& j);
  static SystemDef builtin(const std::string& builtinName);
  static std::vector<std::string> builtinNames();

 private:
  mutable std::shared_ptr<const ContactForm> form_;
};

}  // namespace contactflow
