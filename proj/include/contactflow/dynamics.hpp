#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "contactflow/contact.hpp"
#include "contactflow/report.hpp"

namespace contactflow {

/// Adaptive embedded Runge-Kutta 5(4) settings.  Dense output is sampled on
/// a fixed stride so invariant monitoring and rotation fits see an even grid.
struct IntegratorConfig {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double t_end = 0.0;
  double max_step = 0.0;      // 0: t_end / 10
  double dense_stride = 0.0;  // 0: t_end / 256
};

enum class FlowStatus { Ok, ChartExit, StepUnderflow };

/// Integration samples t_k (strictly increasing, starting at 0) with states.
/// Periodic coordinates are NOT wrapped during integration; angle histories
/// stay continuous, which is what rotation-number fits need.
struct Trajectory {
  std::vector<double> times;
  std::vector<Vec> states;
  FlowStatus status = FlowStatus::Ok;
  double exit_time = 0.0;  // set when status == ChartExit

  /// CSV with header t,x0..x{d-1}; 17 significant digits.
  void writeCsv(std::ostream& os) const;
};

/// Integrate x' = X(x) from x0 for cfg.t_end.  If a chart is given, stop at
/// the first dense sample outside its domain and bisect the crossing time.
/// Step-size underflow (tolerances unachievable) truncates with a status
/// rather than throwing; the trajectory keeps everything integrated so far.
Trajectory flow(const VectorField& X, const Vec& x0, const IntegratorConfig& cfg,
                const Chart* chart = nullptr);

/// Max |f(x(t)) - f(x(0))| per named scalar, sorted by drift, largest first.
std::vector<std::pair<std::string, double>> monitorInvariants(
    const Trajectory& traj,
    std::span<const std::pair<std::string, std::shared_ptr<const ScalarField>>> fields);

/// Least-squares slope of each (unwrapped) angle history against time.
struct RotationEstimate {
  Vec omega;
  double residual = 0.0;  // max deviation from the linear fit, any angle
  bool linear = false;    // residual <= 1e-3
};
RotationEstimate rotationNumbers(const Trajectory& traj, std::span<const int> angleIndices);

/// Rotation numbers with the stride chosen automatically: a short pre-pass
/// estimates the frequencies, then the full run uses a stride no coarser
/// than an eighth of the fastest period.
RotationEstimate rotationNumbersAuto(const VectorField& X, const Vec& x0, double tEnd,
                                     const Chart& chart, std::span<const int> angleIndices,
                                     Trajectory* out = nullptr);

/// Does the flow of X_f preserve alpha?  Transports each coordinate basis
/// vector along the flow by one-sided finite differences (displacement h)
/// and compares <alpha, transported e_i> against its initial value.
/// Preconditions: df must be semi-basic along the trajectory; a violation is
/// reported as a failed "pullback_precondition" record and the transport
/// comparison is skipped.
CheckReport pullbackCheck(const ContactForm& form, const ScalarField& f, const Vec& x0,
                          const IntegratorConfig& cfg, double tol,
                          double displacement = 1e-5, double semibasicTol = 1e-8);

}  // namespace contactflow
