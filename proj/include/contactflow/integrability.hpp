#pragma once

#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "contactflow/dynamics.hpp"
#include "contactflow/jacobi.hpp"
#include "contactflow/report.hpp"
#include "contactflow/systems.hpp"

namespace contactflow {

/// Sampling and flow settings shared by the verification suites.
struct VerifyOptions {
  int samples = 64;
  uint64_t seed = 0;        // 0: take the system's own seed
  double drift_time = 10.0;  // invariant-drift flow horizon
  int drift_orbits = 3;      // how many sampled starts get flowed
};

/// Noncommutative-integrability verdict for a declared integral set
/// f_1..f_{2n-r} on a (2n+1)-chart, the first r of them central.
/// Conditions reported, each with worst residual and point:
///   integral_count      list length equals 2n - r (and the hamiltonian,
///                       when named, is f_1)
///   integrals_semibasic |<df_i, Z>| <= tol.semibasic at every sample
///   central_involution  |[f_i, f_j]| <= tol.involution for j <= r, all i
///   independence        sigma_min/sigma_max of the stacked gradient matrix
///                       >= tol.rank_ratio at every sample (worst ratio and
///                       its singular values reported)
///   invariant_drift     the hamiltonian flow preserves each f_i to
///                       tol.drift over drift_time
/// The verdict is the conjunction; count/rank failures do not short-circuit
/// the other conditions.
CheckReport verifyIntegrability(const SystemDef& sys, const VerifyOptions& opt = {});

/// Pairwise check that the horizontal parts of the given fields span an
/// isotropic-iff-involutive family, via the identity
/// d.alpha(u, v) = -<alpha, [u, v]> for horizontal u, v.  Conditions:
///   cartan_identity   |d.alpha(u,v) + <a,[u,v]>| <= cartanTol
///   isotropic         max |d.alpha(u,v)| <= flagTol  (flag, also a record)
///   involutive        max |<a,[u,v]>|    <= flagTol
///   equivalence       the two flags agree
/// A single field (or none) passes trivially.
CheckReport isotropyCheck(
    const ContactForm& form,
    std::span<const std::pair<std::string, std::shared_ptr<const VectorField>>> fields,
    int samples, uint64_t seed, double cartanTol = 1e-7, double flagTol = 1e-8);

/// Closed curve c: [0, 2pi] -> chart given by one expression per coordinate
/// in the parameter "tau".  Periodic coordinates may advance by multiples of
/// 2pi over the period; closure is checked modulo that.
struct TorusCycle {
  ExprList path;
  std::string label;
};

/// The basic cycle: coordinate `angleIndex` advances from its base value by
/// tau, everything else stays fixed.
TorusCycle coordinateCycle(const Chart& chart, int angleIndex, const Vec& base);

struct ActionResult {
  double value = 0.0;        // (1/2pi) integral of <alpha, c'(tau)> d.tau
  double error_bound = 0.0;  // |I_nodes - I_nodes/2| Richardson estimate
  bool closed = false;
  double closure_error = 0.0;
};

/// Action of a cycle: mean of <alpha(c), c'> over an even parameter grid
/// (exact for trigonometric polynomials below the node count).
ActionResult actionIntegral(const ContactForm& form, const TorusCycle& cycle,
                            int nodes = 256);

struct FrequencyResult {
  Vec z;                  // (z_0 .. z_r), theta0 frequency first
  bool singular = false;  // system had no unique solution or z_0 vanished
};

/// Reeb frequencies on an invariant torus from the defining constraints
///   z_0 y_0 + sum_k z_k y_k = 1,   z_0 d y_0/d y_k + z_k = 0,
/// solved directly as an (r+1) x (r+1) linear system.
FrequencyResult reebFrequencyConstraints(double y0, const Vec& y, const Vec& y0Grad);

/// The flat reference model on chart (theta_0..theta_r, y_1..y_r, x_1..x_2s)
/// with alpha = y0 d.theta0 + sum y_k d.theta_k + sum g_a d.x_a.  y0Expr is
/// an expression in y_1..y_r; gExprs are 2s expressions in (y, x).
SystemDef buildCanonicalModel(int r, int s, const std::string& y0Expr,
                              const std::vector<std::string>& gExprs);

/// One invariant torus of a canonical-style system: values for the declared
/// action coordinates (order matches CanonicalInfo::actionNames).
struct TorusSpec {
  std::vector<double> y;
};

/// Frequency-map properties on a batch of tori: rotation numbers of the
/// hamiltonian flow agree across initial angles and x-values on the same
/// torus, match the constraint solution z(y) when the flow is the Reeb flow,
/// and differ between tori whose z(y) differ.
CheckReport frequencyMapCheck(const SystemDef& sys, std::span<const TorusSpec> tori,
                              double tEnd = 40.0, const VerifyOptions& opt = {});

/// Everything the `verify` command runs: contact non-degeneracy and Reeb
/// residuals on low-discrepancy samples, the integrability conditions when
/// integrals are declared, and the isotropy check when symmetries are
/// declared.  Returns the merged report plus run metadata.
struct SystemReport {
  CheckReport report;
  nlohmann::json meta;
  nlohmann::json toJson() const;
};
SystemReport verifySystem(const SystemDef& sys, const VerifyOptions& opt = {});

}  // namespace contactflow
