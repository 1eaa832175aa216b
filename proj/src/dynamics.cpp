#include "contactflow/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace contactflow {

namespace {

std::span<const double> asSpan(const Vec& x) {
  return {x.data(), static_cast<size_t>(x.size())};
}

Vec toVec(const SVec<double>& v) {
  return Eigen::Map<const Vec>(v.data(), static_cast<long>(v.size()));
}

// Dormand-Prince 5(4) coefficients.
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                 b5 = -2187.0 / 6784, b6 = 11.0 / 84;
// Difference between the 5th- and 4th-order weights (error estimator).
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

// Fourth-order interpolation polynomial weights for the classic DOPRI5
// continuous extension; theta in [0, 1] across an accepted step.
struct DenseWeights {
  double w1, w3, w4, w5, w6, w7;
};

DenseWeights denseWeights(double th) {
  const double x1 = 5.0 * (2558722523.0 - 31403016.0 * th) / 11282082432.0;
  const double x3 = 100.0 * (882725551.0 - 15701508.0 * th) / 32700410799.0;
  const double x4 = 25.0 * (443332067.0 - 31403016.0 * th) / 1880347072.0;
  const double x5 = 32805.0 * (23143187.0 - 3489224.0 * th) / 199316789632.0;
  const double x6 = 55.0 * (29972135.0 - 7076736.0 * th) / 822651844.0;
  const double x7 = 10.0 * (7414447.0 - 829305.0 * th) / 29380423.0;
  const double A = th * th * (3.0 - 2.0 * th);
  const double B = th * th * (th - 1.0);
  const double C = th * th * (th - 1.0) * (th - 1.0);
  const double D = th * (th - 1.0) * (th - 1.0);
  return {A * b1 - C * x1 + D, A * b3 + C * x3, A * b4 - C * x4,
          A * b5 + C * x5,     A * b6 - C * x6, B + C * x7};
}

struct StepKs {
  Vec k1, k2, k3, k4, k5, k6, k7;
};

Vec denseEval(const Vec& y, double h, const StepKs& k, double th) {
  DenseWeights w = denseWeights(th);
  return y + h * (w.w1 * k.k1 + w.w3 * k.k3 + w.w4 * k.k4 + w.w5 * k.k5 +
                  w.w6 * k.k6 + w.w7 * k.k7);
}

}  // namespace

Trajectory flow(const VectorField& X, const Vec& x0, const IntegratorConfig& cfg,
                const Chart* chart) {
  if (cfg.t_end < 0.0) throw std::invalid_argument("flow: t_end must be >= 0");
  const long d = x0.size();
  Trajectory traj;
  traj.times.push_back(0.0);
  traj.states.push_back(x0);

  if (chart && !chart->inDomain(x0)) {
    traj.status = FlowStatus::ChartExit;
    traj.exit_time = 0.0;
    return traj;
  }
  if (cfg.t_end == 0.0) return traj;

  const double tEnd = cfg.t_end;
  const double stride = cfg.dense_stride > 0.0 ? cfg.dense_stride : tEnd / 256.0;
  const double maxStep = cfg.max_step > 0.0 ? cfg.max_step : tEnd / 10.0;
  const double timeEps = 1e-12 * std::max(1.0, tEnd);

  auto rhs = [&](const Vec& y) -> Vec { return toVec(X.eval(asSpan(y))); };

  double t = 0.0;
  Vec y = x0;
  StepKs k;
  try {
    k.k1 = rhs(y);
  } catch (const std::exception& ex) {
    throw EvalError(std::string("flow: field evaluation failed at t=0: ") + ex.what());
  }

  double h = std::min(maxStep, tEnd / 100.0);
  size_t nextSample = 1;
  const double inf = std::numeric_limits<double>::infinity();

  // Bisect the dense polynomial between an in-domain and an out-of-domain
  // parameter and append the boundary-side point.
  auto exitAt = [&](double thIn, double thOut, double hStep) {
    for (int it = 0; it < 80; ++it) {
      double mid = 0.5 * (thIn + thOut);
      if (chart->inDomain(denseEval(y, hStep, k, mid)))
        thIn = mid;
      else
        thOut = mid;
    }
    traj.status = FlowStatus::ChartExit;
    traj.exit_time = t + thIn * hStep;
    if (traj.exit_time > traj.times.back() + timeEps) {
      traj.times.push_back(traj.exit_time);
      traj.states.push_back(denseEval(y, hStep, k, thIn));
    }
  };

  for (long iter = 0; iter < 100000000L; ++iter) {
    if (t >= tEnd - timeEps) break;
    if (h < 16.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(t), 1.0)) {
      traj.status = FlowStatus::StepUnderflow;
      traj.exit_time = t;
      break;
    }
    bool lastStep = false;
    if (t + h >= tEnd) {
      h = tEnd - t;
      lastStep = true;
    }

    double errNorm = inf;
    Vec ynew;
    bool evalOk = true;
    try {
      k.k2 = rhs(y + h * (a21 * k.k1));
      k.k3 = rhs(y + h * (a31 * k.k1 + a32 * k.k2));
      k.k4 = rhs(y + h * (a41 * k.k1 + a42 * k.k2 + a43 * k.k3));
      k.k5 = rhs(y + h * (a51 * k.k1 + a52 * k.k2 + a53 * k.k3 + a54 * k.k4));
      k.k6 = rhs(y + h * (a61 * k.k1 + a62 * k.k2 + a63 * k.k3 + a64 * k.k4 + a65 * k.k5));
      ynew = y + h * (b1 * k.k1 + b3 * k.k3 + b4 * k.k4 + b5 * k.k5 + b6 * k.k6);
      k.k7 = rhs(ynew);
      Vec err = h * (e1 * k.k1 + e3 * k.k3 + e4 * k.k4 + e5 * k.k5 + e6 * k.k6 + e7 * k.k7);
      double acc = 0.0;
      for (long i = 0; i < d; ++i) {
        double sc = cfg.abs_tol + cfg.rel_tol * std::max(std::abs(y[i]), std::abs(ynew[i]));
        double q = err[i] / sc;
        acc += q * q;
      }
      errNorm = std::sqrt(acc / static_cast<double>(d));
      if (!ynew.allFinite() || !std::isfinite(errNorm)) {
        errNorm = inf;
        evalOk = false;
      }
    } catch (const std::exception&) {
      errNorm = inf;
      evalOk = false;
    }

    if (errNorm <= 1.0) {
      // Accepted: emit dense samples inside (t, t+h], watching the domain.
      double thPrevIn = 0.0;
      bool exited = false;
      while (true) {
        double ts = stride * static_cast<double>(nextSample);
        if (ts > t + h + timeEps) break;
        if (ts > tEnd - timeEps) break;  // final point handled below
        double th = (ts - t) / h;
        Vec ys = denseEval(y, h, k, th);
        if (chart && !chart->inDomain(ys)) {
          exitAt(thPrevIn, th, h);
          exited = true;
          break;
        }
        traj.times.push_back(ts);
        traj.states.push_back(ys);
        thPrevIn = th;
        ++nextSample;
      }
      if (exited) break;
      if (chart && !chart->inDomain(ynew)) {
        exitAt(thPrevIn, 1.0, h);
        break;
      }
      if (lastStep) {
        if (tEnd > traj.times.back() + timeEps) {
          traj.times.push_back(tEnd);
          traj.states.push_back(ynew);
        } else {
          // The stride grid already landed (numerically) on t_end; replace
          // the interpolated value with the more accurate step endpoint.
          traj.times.back() = tEnd;
          traj.states.back() = ynew;
        }
      }
      t += h;
      y = std::move(ynew);
      k.k1 = k.k7;  // first-same-as-last
      double grow = errNorm > 0.0 ? 0.9 * std::pow(errNorm, -0.2) : 5.0;
      h = std::min(h * std::clamp(grow, 0.2, 5.0), maxStep);
    } else {
      double shrink = evalOk ? std::max(0.2, 0.9 * std::pow(errNorm, -0.2)) : 0.5;
      h *= shrink;
    }
  }
  return traj;
}

void Trajectory::writeCsv(std::ostream& os) const {
  if (states.empty()) return;
  long d = states.front().size();
  os << 't';
  for (long i = 0; i < d; ++i) os << ",x" << i;
  os << '\n';
  char buf[40];
  for (size_t r = 0; r < times.size(); ++r) {
    std::snprintf(buf, sizeof buf, "%.17g", times[r]);
    os << buf;
    for (long i = 0; i < d; ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", states[r][i]);
      os << ',' << buf;
    }
    os << '\n';
  }
}

std::vector<std::pair<std::string, double>> monitorInvariants(
    const Trajectory& traj,
    std::span<const std::pair<std::string, std::shared_ptr<const ScalarField>>> fields) {
  std::vector<std::pair<std::string, double>> out;
  if (traj.states.empty()) return out;
  for (const auto& [name, f] : fields) {
    double f0 = f->eval(traj.states.front());
    double drift = 0.0;
    for (const Vec& s : traj.states) drift = std::max(drift, std::abs(f->eval(s) - f0));
    out.emplace_back(name, drift);
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  return out;
}

RotationEstimate rotationNumbers(const Trajectory& traj, std::span<const int> angleIndices) {
  size_t m = traj.times.size();
  if (m < 4) throw std::invalid_argument("rotationNumbers: need at least 4 samples");
  RotationEstimate out;
  out.omega.resize(static_cast<long>(angleIndices.size()));
  out.residual = 0.0;

  double tMean = 0.0;
  for (double t : traj.times) tMean += t;
  tMean /= static_cast<double>(m);
  double tVar = 0.0;
  for (double t : traj.times) tVar += (t - tMean) * (t - tMean);

  const double pi = 3.14159265358979323846;
  for (size_t ai = 0; ai < angleIndices.size(); ++ai) {
    int idx = angleIndices[ai];
    // Unwrap: assume the true advance between samples stays below pi.
    std::vector<double> w(m);
    w[0] = traj.states[0][idx];
    for (size_t r = 1; r < m; ++r) {
      double dv = traj.states[r][idx] - traj.states[r - 1][idx];
      dv -= 2.0 * pi * std::round(dv / (2.0 * pi));
      w[r] = w[r - 1] + dv;
    }
    double wMean = 0.0;
    for (double v : w) wMean += v;
    wMean /= static_cast<double>(m);
    double cov = 0.0;
    for (size_t r = 0; r < m; ++r) cov += (traj.times[r] - tMean) * (w[r] - wMean);
    double omega = cov / tVar;
    double icept = wMean - omega * tMean;
    for (size_t r = 0; r < m; ++r)
      out.residual = std::max(out.residual,
                              std::abs(w[r] - (icept + omega * traj.times[r])));
    out.omega[static_cast<long>(ai)] = omega;
  }
  out.linear = out.residual <= 1e-3;
  return out;
}

RotationEstimate rotationNumbersAuto(const VectorField& X, const Vec& x0, double tEnd,
                                     const Chart& chart, std::span<const int> angleIndices,
                                     Trajectory* out) {
  // Pre-pass: crude frequency scale from a short, coarse run.
  IntegratorConfig pre;
  pre.t_end = std::min(std::max(1.0, tEnd / 16.0), tEnd);
  pre.rel_tol = 1e-8;
  pre.abs_tol = 1e-10;
  pre.dense_stride = pre.t_end / 128.0;
  Trajectory tp = flow(X, x0, pre, &chart);
  double omegaMax = 0.0;
  if (tp.status == FlowStatus::Ok && tp.times.size() >= 4) {
    RotationEstimate crude = rotationNumbers(tp, angleIndices);
    omegaMax = crude.omega.cwiseAbs().maxCoeff();
  }

  const double pi = 3.14159265358979323846;
  IntegratorConfig cfg;
  cfg.t_end = tEnd;
  cfg.dense_stride = tEnd / 256.0;
  if (omegaMax > 1e-9)
    cfg.dense_stride = std::min(cfg.dense_stride, (2.0 * pi / omegaMax) / 8.0);
  Trajectory traj = flow(X, x0, cfg, &chart);
  RotationEstimate est = rotationNumbers(traj, angleIndices);
  if (out) *out = std::move(traj);
  return est;
}

CheckReport pullbackCheck(const ContactForm& form, const ScalarField& f, const Vec& x0,
                          const IntegratorConfig& cfg, double tol,
                          double displacement, double semibasicTol) {
  CheckReport report;
  auto fShared = std::shared_ptr<const ScalarField>(&f, [](const ScalarField*) {});
  HamiltonianField Xf(form, fShared);

  Trajectory base = flow(Xf, x0, cfg, &form.chart());

  auto& pre = report.add("pullback_precondition");
  SemibasicScan scan = scanSemibasic(form, f, std::span<const Vec>(base.states), semibasicTol);
  pre.worst_residual = scan.worst;
  if (scan.worstPoint.size()) pre.notePoint(scan.worstPoint);
  pre.pass = scan.semibasic;
  pre.detail = "max |<df,Z>| along the trajectory (the flow preserves alpha "
               "only when df is semi-basic)";
  if (!pre.pass) {
    pre.detail += "; transport comparison skipped";
    return report;
  }

  auto& inv = report.add("pullback_invariance");
  const long d = x0.size();
  std::vector<Trajectory> moved;
  moved.reserve(static_cast<size_t>(d));
  size_t common = base.times.size();
  for (long i = 0; i < d; ++i) {
    Vec xi = x0;
    xi[i] += displacement;
    moved.push_back(flow(Xf, xi, cfg, &form.chart()));
    common = std::min(common, moved.back().times.size());
  }

  SVec<double> a0 = form.alpha().evalAll<double>(asSpan(x0));
  for (size_t r = 0; r < common; ++r) {
    const Vec& yb = base.states[r];
    SVec<double> a = form.alpha().evalAll<double>(asSpan(yb));
    for (long i = 0; i < d; ++i) {
      double pairing = 0.0;
      for (long c = 0; c < d; ++c)
        pairing += a[static_cast<size_t>(c)] *
                   (moved[static_cast<size_t>(i)].states[r][c] - yb[c]) / displacement;
      inv.track(std::abs(pairing - a0[static_cast<size_t>(i)]), yb);
    }
  }
  inv.pass = inv.worst_residual <= tol;
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "max |<alpha, transported e_i> - alpha_i(x0)| over %zu samples; "
                "one-sided differences, displacement %.1e",
                common, displacement);
  inv.detail = buf;
  if (base.status != FlowStatus::Ok)
    inv.detail += "; trajectory truncated before t_end";
  return report;
}

}  // namespace contactflow
