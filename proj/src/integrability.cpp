#include "contactflow/integrability.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <memory>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace contactflow {

namespace {

template <class... Args>
std::string strf(const char* f, Args... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return std::string(buf);
}

std::string pointStr(const Vec& x) {
  std::ostringstream os;
  os << "(";
  for (long i = 0; i < x.size(); ++i) {
    if (i) os << ", ";
    os << strf("%.6g", x[i]);
  }
  os << ")";
  return os.str();
}

std::span<const double> spanOf(const Vec& x) {
  return {x.data(), static_cast<size_t>(x.size())};
}

std::unique_ptr<const VectorField> hamiltonianFlowField(
    const SystemDef& sys, const ContactForm& form) {
  std::shared_ptr<const ScalarField> H = sys.hamiltonian();
  if (H) return std::make_unique<HamiltonianField>(form, std::move(H));
  return std::make_unique<ReebField>(form);
}

}  // namespace

CheckReport verifyIntegrability(const SystemDef& sys, const VerifyOptions& opt) {
  const ContactForm& form = sys.form();
  const uint64_t seed = opt.seed ? opt.seed : sys.seed;
  const std::vector<Vec> pts = samplePoints(sys.chart, opt.samples, seed);
  const auto ints = sys.integrals();
  const int d = sys.chart.dim();
  const int n = (d - 1) / 2;
  const int need = 2 * n - sys.r;
  const int have = static_cast<int>(ints.size());

  CheckReport report;

  {
    auto& rec = report.add("integral_count");
    rec.worst_residual = std::abs(have - need);
    rec.pass = (have == need);
    rec.detail = strf("have %d integrals; a %d-dim chart with r = %d needs 2n - r = %d",
                      have, d, sys.r, need);
    if (sys.hamiltonianName != "1" &&
        (sys.integralNames.empty() || sys.integralNames.front() != sys.hamiltonianName)) {
      rec.pass = false;
      rec.detail += strf("; hamiltonian '%s' must be listed as the first integral",
                         sys.hamiltonianName.c_str());
    }
  }

  {
    auto& rec = report.add("integrals_semibasic");
    if (ints.empty()) {
      rec.detail = "no integrals declared";
    } else {
      std::string worstName;
      for (const auto& [nm, f] : ints) {
        SemibasicScan s = scanSemibasic(form, *f, std::span<const Vec>(pts.data(), pts.size()),
                                        sys.tol.semibasic);
        if (s.worst >= rec.worst_residual) worstName = nm;
        rec.track(s.worst, s.worstPoint);
      }
      rec.pass = rec.worst_residual <= sys.tol.semibasic;
      rec.detail = strf("max |<df,Z>| over %zu samples; worst integral '%s'; tol %.1e",
                        pts.size(), worstName.c_str(), sys.tol.semibasic);
    }
  }

  {
    auto& rec = report.add("central_involution");
    const int nc = std::min(sys.r, have);
    if (nc == 0) {
      rec.detail = "no central integrals (r = 0); nothing to check";
    } else {
      size_t pairs = 0;
      std::string worstPair;
      for (int j = 0; j < nc; ++j)
        for (int i = 0; i < have; ++i) {
          ++pairs;
          for (const Vec& x : pts) {
            BracketEval b = jacobiBracket(form, *ints[static_cast<size_t>(i)].second,
                                          *ints[static_cast<size_t>(j)].second, x);
            double res = std::abs(b.value);
            if (res >= rec.worst_residual)
              worstPair = "(" + ints[static_cast<size_t>(i)].first + ", " +
                          ints[static_cast<size_t>(j)].first + ")";
            rec.track(res, x);
          }
        }
      rec.pass = rec.worst_residual <= sys.tol.involution;
      rec.detail = strf("max |[f_i, f_j]| over %zu pairs x %zu samples; worst pair %s; tol %.1e",
                        pairs, pts.size(), worstPair.c_str(), sys.tol.involution);
    }
  }

  {
    auto& rec = report.add("independence");
    if (ints.empty()) {
      rec.detail = "no integrals declared";
    } else {
      double worstRatio = std::numeric_limits<double>::infinity();
      Vec worstPt;
      Eigen::VectorXd worstSv;
      for (const Vec& x : pts) {
        Mat G(have, d);
        for (int i = 0; i < have; ++i)
          G.row(i) = evalJet(*ints[static_cast<size_t>(i)].second, x).gradient.transpose();
        Eigen::JacobiSVD<Mat> svd(G);
        const Eigen::VectorXd sv = svd.singularValues();
        double ratio = sv(0) > 0.0 ? sv(sv.size() - 1) / sv(0) : 0.0;
        if (ratio < worstRatio) {
          worstRatio = ratio;
          worstPt = x;
          worstSv = sv;
        }
      }
      rec.worst_residual = worstRatio;
      rec.notePoint(worstPt);
      rec.pass = worstRatio >= sys.tol.rank_ratio;
      std::ostringstream os;
      os << strf("worst sigma_min/sigma_max of the stacked gradient matrix (threshold %.1e); ",
                 sys.tol.rank_ratio)
         << "singular values there: [";
      for (long i = 0; i < worstSv.size(); ++i) {
        if (i) os << ", ";
        os << strf("%.6e", worstSv(i));
      }
      os << "]";
      rec.detail = os.str();
    }
  }

  {
    auto& rec = report.add("invariant_drift");
    if (ints.empty()) {
      rec.detail = "no integrals declared";
    } else {
      auto X = hamiltonianFlowField(sys, form);
      IntegratorConfig cfg;
      cfg.t_end = opt.drift_time;
      const int orbits = std::min(opt.drift_orbits, static_cast<int>(pts.size()));
      std::string notes, worstName;
      for (int k = 0; k < orbits; ++k) {
        Trajectory tr = flow(*X, pts[static_cast<size_t>(k)], cfg, &sys.chart);
        if (tr.status == FlowStatus::ChartExit)
          notes += strf("; orbit %d left the chart at t = %.6g", k, tr.exit_time);
        if (tr.status == FlowStatus::StepUnderflow) {
          rec.pass = false;
          notes += strf("; orbit %d: step-size underflow", k);
        }
        auto drifts =
            monitorInvariants(tr, std::span<const std::pair<std::string, std::shared_ptr<const ScalarField>>>(
                                      ints.data(), ints.size()));
        if (!drifts.empty()) {
          if (drifts.front().second >= rec.worst_residual) worstName = drifts.front().first;
          rec.track(drifts.front().second, pts[static_cast<size_t>(k)]);
        }
      }
      rec.pass = rec.pass && rec.worst_residual <= sys.tol.drift;
      rec.detail = strf("max invariant drift along the hamiltonian flow, %d orbits, t in [0, %g]; "
                        "worst field '%s'; tol %.1e",
                        orbits, opt.drift_time, worstName.c_str(), sys.tol.drift) +
                   notes;
    }
  }

  return report;
}

CheckReport isotropyCheck(
    const ContactForm& form,
    std::span<const std::pair<std::string, std::shared_ptr<const VectorField>>> fields,
    int samples, uint64_t seed, double cartanTol, double flagTol) {
  CheckReport report;
  report.conditions.reserve(4);
  auto& cartan = report.add("cartan_identity");
  auto& iso = report.add("isotropic");
  auto& inv = report.add("involutive");
  auto& equiv = report.add("equivalence");

  if (fields.size() < 2) {
    const char* msg = "fewer than two fields; nothing to compare";
    cartan.detail = iso.detail = inv.detail = equiv.detail = msg;
    return report;
  }

  const std::vector<Vec> pts = samplePoints(form.chart(), samples, seed);
  std::vector<std::unique_ptr<HorizontalField>> horiz;
  horiz.reserve(fields.size());
  for (const auto& [nm, f] : fields) horiz.push_back(std::make_unique<HorizontalField>(form, f));

  std::string cartanPair, isoPair, invPair;
  for (size_t i = 0; i < fields.size(); ++i)
    for (size_t j = i + 1; j < fields.size(); ++j) {
      const std::string pairName = "(" + fields[i].first + ", " + fields[j].first + ")";
      for (const Vec& x : pts) {
        const auto xs = spanOf(x);
        const auto fr = form.frame<double>(xs);
        const SVec<double> u = horiz[i]->eval(xs);
        const SVec<double> v = horiz[j]->eval(xs);
        const double dauv = quadForm(fr.A, u, v);
        const Vec br = lieBracket(*horiz[i], *horiz[j], x);
        double abr = 0.0;
        for (size_t k = 0; k < fr.a.size(); ++k) abr += fr.a[k] * br[static_cast<long>(k)];

        const double cres = std::abs(dauv + abr);
        if (cres >= cartan.worst_residual) cartanPair = pairName;
        cartan.track(cres, x);
        if (std::abs(dauv) >= iso.worst_residual) isoPair = pairName;
        iso.track(std::abs(dauv), x);
        if (std::abs(abr) >= inv.worst_residual) invPair = pairName;
        inv.track(std::abs(abr), x);
      }
    }

  cartan.pass = cartan.worst_residual <= cartanTol;
  cartan.detail = strf("max |d.alpha(u,v) + <alpha,[u,v]>| over %zu samples; worst pair %s; tol %.1e",
                       pts.size(), cartanPair.c_str(), cartanTol);
  iso.pass = iso.worst_residual <= flagTol;
  iso.detail = strf("max |d.alpha(u,v)| (flag threshold %.1e); worst pair %s", flagTol,
                    isoPair.c_str());
  inv.pass = inv.worst_residual <= flagTol;
  inv.detail = strf("max |<alpha,[u,v]>| (flag threshold %.1e); worst pair %s", flagTol,
                    invPair.c_str());
  equiv.pass = (iso.pass == inv.pass);
  equiv.detail = strf("isotropic=%s, involutive=%s; the flags must agree",
                      iso.pass ? "true" : "false", inv.pass ? "true" : "false");
  return report;
}

TorusCycle coordinateCycle(const Chart& chart, int angleIndex, const Vec& base) {
  if (angleIndex < 0 || angleIndex >= chart.dim())
    throw std::invalid_argument("coordinateCycle: angle index out of range");
  if (base.size() != chart.dim())
    throw std::invalid_argument("coordinateCycle: base point dimension mismatch");
  std::vector<std::string> comps;
  comps.reserve(static_cast<size_t>(chart.dim()));
  for (int i = 0; i < chart.dim(); ++i) {
    std::string b = strf("%.17g", base[i]);
    comps.push_back(i == angleIndex ? b + " + tau" : b);
  }
  TorusCycle out;
  const std::vector<std::string> par = {"tau"};
  out.path = ExprList::fromStrings(comps, par);
  out.label = chart.coords[static_cast<size_t>(angleIndex)];
  return out;
}

ActionResult actionIntegral(const ContactForm& form, const TorusCycle& cycle, int nodes) {
  const Chart& chart = form.chart();
  const int d = chart.dim();
  if (static_cast<int>(cycle.path.size()) != d)
    throw std::invalid_argument("actionIntegral: cycle has wrong number of components");
  int N = std::max(nodes, 8);
  if (N % 2) ++N;
  const double twoPi = 2.0 * std::numbers::pi;

  Vec c(d), cdot(d);
  auto evalAt = [&](double tau, bool wantVel) {
    Dual1 t;
    t.v = tau;
    t.n = 1;
    t.d[0] = 1.0;
    const std::span<const Dual1> sp(&t, 1);
    for (int i = 0; i < d; ++i) {
      Dual1 r = evalExpr<Dual1>(*cycle.path.comp[static_cast<size_t>(i)], sp);
      c[i] = r.v;
      if (wantVel) cdot[i] = r.part(0);
    }
  };

  double sumAll = 0.0, sumEven = 0.0;
  for (int k = 0; k < N; ++k) {
    evalAt(twoPi * k / N, true);
    const SVec<double> a = form.alpha().evalAll<double>(spanOf(c));
    double integrand = 0.0;
    for (int i = 0; i < d; ++i) integrand += a[static_cast<size_t>(i)] * cdot[i];
    sumAll += integrand;
    if (k % 2 == 0) sumEven += integrand;
  }

  ActionResult out;
  out.value = sumAll / N;
  out.error_bound = std::abs(out.value - sumEven / (N / 2));

  evalAt(0.0, false);
  const Vec c0 = c;
  evalAt(twoPi, false);
  double worst = 0.0;
  for (int i = 0; i < d; ++i) {
    double diff = c[i] - c0[i];
    if (chart.isPeriodic(i)) diff -= twoPi * std::round(diff / twoPi);
    worst = std::max(worst, std::abs(diff));
  }
  out.closure_error = worst;
  out.closed = worst <= 1e-12;
  return out;
}

FrequencyResult reebFrequencyConstraints(double y0, const Vec& y, const Vec& y0Grad) {
  if (y.size() != y0Grad.size())
    throw std::invalid_argument("reebFrequencyConstraints: gradient size mismatch");
  const long r = y.size();
  Mat M = Mat::Zero(r + 1, r + 1);
  Vec rhs = Vec::Zero(r + 1);
  M(0, 0) = y0;
  rhs(0) = 1.0;
  for (long k = 1; k <= r; ++k) {
    M(0, k) = y(k - 1);
    M(k, 0) = y0Grad(k - 1);
    M(k, k) = 1.0;
  }
  Eigen::FullPivLU<Mat> lu(M);
  FrequencyResult out;
  if (!lu.isInvertible()) {
    out.singular = true;
    out.z = Vec::Zero(r + 1);
    return out;
  }
  out.z = lu.solve(rhs);
  if (std::abs(out.z(0)) < 1e-12) out.singular = true;
  return out;
}

SystemDef buildCanonicalModel(int r, int s, const std::string& y0Expr,
                              const std::vector<std::string>& gExprs) {
  if (r < 0 || s < 0) throw SpecError("canonical model: r and s must be non-negative");
  if (gExprs.size() != static_cast<size_t>(2 * s))
    throw SpecError("canonical model: expected exactly 2s expressions for the x block");
  const double twoPi = 2.0 * std::numbers::pi;

  SystemDef sys;
  sys.name = strf("canonical_r%ds%d", r, s);
  for (int k = 0; k <= r; ++k) {
    sys.chart.coords.push_back("th" + std::to_string(k));
    sys.chart.periodic.push_back(true);
    sys.chart.box.push_back({0.0, twoPi});
  }
  for (int k = 1; k <= r; ++k) {
    sys.chart.coords.push_back("y" + std::to_string(k));
    sys.chart.periodic.push_back(false);
    sys.chart.box.push_back({0.25, 1.5});
  }
  for (int a = 1; a <= 2 * s; ++a) {
    sys.chart.coords.push_back("x" + std::to_string(a));
    sys.chart.periodic.push_back(false);
    sys.chart.box.push_back({-1.0, 1.0});
  }

  sys.alphaText.push_back(y0Expr);
  for (int k = 1; k <= r; ++k) sys.alphaText.push_back("y" + std::to_string(k));
  for (int k = 1; k <= r; ++k) sys.alphaText.push_back("0");
  for (const auto& g : gExprs) sys.alphaText.push_back(g);

  int idx = 1;
  for (int k = 1; k <= r; ++k, ++idx) {
    sys.fieldText.emplace_back("f" + std::to_string(idx), "y" + std::to_string(k));
    sys.integralNames.push_back("f" + std::to_string(idx));
  }
  for (int a = 1; a <= 2 * s; ++a, ++idx) {
    sys.fieldText.emplace_back("f" + std::to_string(idx), "x" + std::to_string(a));
    sys.integralNames.push_back("f" + std::to_string(idx));
  }
  sys.r = r;
  for (int k = 0; k <= r; ++k) sys.canonical.angles.push_back("th" + std::to_string(k));
  for (int k = 1; k <= r; ++k) sys.canonical.actionNames.push_back("y" + std::to_string(k));
  sys.canonical.y0 = y0Expr;

  // Round-trip through the serialized form: this runs the full validation
  // pass and guarantees the model is expressible as a spec file.
  SystemDef checked = SystemDef::fromJson(sys.toJson());
  const ContactForm& form = checked.form();
  for (const Vec& x : samplePoints(checked.chart, 64, checked.seed))
    if (std::abs(contactCheck(form, x)) <= checked.tol.degenerate)
      throw SpecError("canonical model is not contact at " + pointStr(x));
  return checked;
}

CheckReport frequencyMapCheck(const SystemDef& sys, std::span<const TorusSpec> tori,
                              double tEnd, const VerifyOptions& opt) {
  if (sys.canonical.empty())
    throw SpecError("frequency map check needs a canonical block (angles, actions, y0)");
  if (sys.canonical.angles.size() != sys.canonical.actionNames.size() + 1)
    throw SpecError("canonical block: expected one more angle than actions");
  const Chart& chart = sys.chart;
  const std::vector<int> angleIdx = sys.angleIndices();
  std::vector<int> actionIdx;
  for (const auto& nm : sys.canonical.actionNames) {
    auto it = std::find(chart.coords.begin(), chart.coords.end(), nm);
    if (it == chart.coords.end())
      throw SpecError("canonical.actions: '" + nm + "' is not a chart coordinate");
    actionIdx.push_back(static_cast<int>(it - chart.coords.begin()));
  }
  std::vector<int> xIdx;
  for (int i = 0; i < chart.dim(); ++i)
    if (std::find(angleIdx.begin(), angleIdx.end(), i) == angleIdx.end() &&
        std::find(actionIdx.begin(), actionIdx.end(), i) == actionIdx.end())
      xIdx.push_back(i);

  const ContactForm& form = sys.form();
  const bool reebFlow = (sys.hamiltonianName == "1");
  auto X = hamiltonianFlowField(sys, form);
  const uint64_t seed = opt.seed ? opt.seed : sys.seed;
  Rng rng(seed);
  const double twoPi = 2.0 * std::numbers::pi;

  CheckReport report;
  report.conditions.reserve(4);
  auto& fit = report.add("rotation_fit");
  auto& same = report.add("frequency_same_torus");
  auto& match = report.add("frequency_matches_constraints");
  auto& distinct = report.add("frequency_distinct_tori");

  std::unique_ptr<ExprScalarField> y0f;
  if (!sys.canonical.y0.empty())
    y0f = std::make_unique<ExprScalarField>(
        parse(sys.canonical.y0, sys.canonical.actionNames), sys.canonical.y0);

  std::vector<Vec> meanOmega(tori.size());
  std::vector<Vec> zs(tori.size());
  std::vector<bool> zKnown(tori.size(), false);

  for (size_t ti = 0; ti < tori.size(); ++ti) {
    const TorusSpec& ts = tori[ti];
    if (ts.y.size() != sys.canonical.actionNames.size())
      throw SpecError("torus: expected one value per declared action");
    for (size_t k = 0; k < ts.y.size(); ++k) {
      const auto b = chart.box[static_cast<size_t>(actionIdx[k])];
      if (ts.y[k] < b[0] || ts.y[k] > b[1])
        throw SpecError(strf("torus: %s = %g lies outside its box [%g, %g]",
                             sys.canonical.actionNames[k].c_str(), ts.y[k], b[0], b[1]));
    }

    std::vector<Vec> angleStarts(2, Vec::Zero(static_cast<long>(angleIdx.size())));
    for (long q = 0; q < angleStarts[1].size(); ++q)
      angleStarts[1][q] = rng.uniform(0.0, twoPi);
    std::vector<Vec> xStarts;
    if (xIdx.empty()) {
      xStarts.emplace_back(0);
    } else {
      for (int variant = 0; variant < 2; ++variant) {
        Vec xv(static_cast<long>(xIdx.size()));
        for (size_t q = 0; q < xIdx.size(); ++q) {
          const auto b = chart.box[static_cast<size_t>(xIdx[q])];
          const double m = chart.margin * (b[1] - b[0]);
          xv[static_cast<long>(q)] = rng.uniform(b[0] + m, b[1] - m);
        }
        xStarts.push_back(std::move(xv));
      }
    }

    std::vector<Vec> omegas;
    std::vector<Vec> starts;
    for (const Vec& xv : xStarts)
      for (const Vec& ang : angleStarts) {
        Vec x0 = Vec::Zero(chart.dim());
        for (size_t k = 0; k < ts.y.size(); ++k) x0[actionIdx[k]] = ts.y[k];
        for (size_t q = 0; q < angleIdx.size(); ++q) x0[angleIdx[q]] = ang[static_cast<long>(q)];
        for (size_t q = 0; q < xIdx.size(); ++q) x0[xIdx[q]] = xv[static_cast<long>(q)];
        RotationEstimate est = rotationNumbersAuto(*X, x0, tEnd, chart,
                                                   std::span<const int>(angleIdx.data(),
                                                                        angleIdx.size()));
        fit.track(est.residual, x0);
        if (!est.linear) fit.pass = false;
        omegas.push_back(est.omega);
        starts.push_back(x0);
      }

    Vec mean = Vec::Zero(static_cast<long>(angleIdx.size()));
    for (const Vec& w : omegas) mean += w;
    mean /= static_cast<double>(omegas.size());
    meanOmega[ti] = mean;

    for (size_t a = 0; a < omegas.size(); ++a)
      for (size_t b = a + 1; b < omegas.size(); ++b)
        same.track((omegas[a] - omegas[b]).cwiseAbs().maxCoeff(), starts[a]);

    if (reebFlow && y0f) {
      Vec yv(static_cast<long>(ts.y.size()));
      for (size_t k = 0; k < ts.y.size(); ++k) yv[static_cast<long>(k)] = ts.y[k];
      const Jet jy = evalJet(*y0f, yv);
      const FrequencyResult fr = reebFrequencyConstraints(jy.value, yv, jy.gradient);
      if (fr.singular) {
        match.pass = false;
        match.detail += strf("constraint system singular for torus %zu; ", ti);
      } else {
        zs[ti] = fr.z;
        zKnown[ti] = true;
        for (size_t a = 0; a < omegas.size(); ++a)
          match.track((omegas[a] - fr.z).cwiseAbs().maxCoeff(), starts[a]);
      }
    }
  }

  fit.detail = strf("max deviation of unwrapped angles from a linear fit over %zu runs",
                    static_cast<size_t>(tori.size()) * 2 *
                        (xIdx.empty() ? size_t(1) : size_t(2)));
  same.pass = same.worst_residual <= sys.tol.rotation;
  same.detail = strf("max disagreement of rotation numbers across starts on one torus; tol %.1e",
                     sys.tol.rotation);
  if (!reebFlow || !y0f) {
    match.detail = reebFlow ? "no y0 declared; constraint comparison skipped"
                            : "hamiltonian flow; Reeb constraint comparison skipped";
  } else {
    match.pass = match.pass && match.worst_residual <= sys.tol.rotation;
    match.detail += strf("max |omega - z(y)| over all runs; tol %.1e", sys.tol.rotation);
  }

  {
    size_t required = 0;
    double minSep = std::numeric_limits<double>::infinity();
    for (size_t a = 0; a < tori.size(); ++a)
      for (size_t b = a + 1; b < tori.size(); ++b) {
        if (!zKnown[a] || !zKnown[b]) continue;
        if ((zs[a] - zs[b]).cwiseAbs().maxCoeff() <= 10.0 * sys.tol.rotation) continue;
        ++required;
        const double sep = (meanOmega[a] - meanOmega[b]).cwiseAbs().maxCoeff();
        minSep = std::min(minSep, sep);
        if (sep <= sys.tol.rotation) distinct.pass = false;
      }
    if (required == 0) {
      distinct.detail = "no torus pairs with distinct constraint frequencies";
    } else {
      distinct.worst_residual = minSep;
      distinct.detail = strf("smallest measured frequency separation over %zu pairs whose "
                             "constraint solutions differ; must exceed %.1e",
                             required, sys.tol.rotation);
    }
  }

  return report;
}

nlohmann::json SystemReport::toJson() const {
  nlohmann::json j = report.toJson();
  j["meta"] = meta;
  return j;
}

SystemReport verifySystem(const SystemDef& sys, const VerifyOptions& opt) {
  const ContactForm& form = sys.form();
  const uint64_t seed = opt.seed ? opt.seed : sys.seed;
  const std::vector<Vec> pts = samplePoints(sys.chart, opt.samples, seed);

  CheckReport report;
  {
    auto& rec = report.add("contact_nondegenerate");
    double minAbs = std::numeric_limits<double>::infinity();
    Vec worst;
    for (const Vec& x : pts) {
      const double v = std::abs(contactCheck(form, x));
      if (v < minAbs) {
        minAbs = v;
        worst = x;
      }
    }
    rec.worst_residual = minAbs;
    if (worst.size()) rec.notePoint(worst);
    rec.pass = minAbs > sys.tol.degenerate;
    rec.detail = strf("smallest |det| of the bordered pairing matrix over %zu samples; "
                      "must exceed %.1e",
                      pts.size(), sys.tol.degenerate);
  }
  {
    auto& rec = report.add("reeb_residual");
    double maxCond = 0.0;
    for (const Vec& x : pts) {
      const ReebResult r = reeb(form, x);
      rec.track(r.residual, x);
      maxCond = std::max(maxCond, r.condition);
    }
    rec.pass = rec.worst_residual <= sys.tol.reeb;
    rec.detail = strf("max Reeb defining residual over %zu samples (tol %.1e); "
                      "max stacked-system condition %.3e",
                      pts.size(), sys.tol.reeb, maxCond);
  }
  if (!sys.integralNames.empty()) {
    CheckReport sub = verifyIntegrability(sys, opt);
    for (auto& c : sub.conditions) report.conditions.push_back(std::move(c));
  }
  if (!sys.symmetryText.empty()) {
    const auto sym = sys.symmetries();
    CheckReport sub = isotropyCheck(
        form,
        std::span<const std::pair<std::string, std::shared_ptr<const VectorField>>>(sym.data(),
                                                                                    sym.size()),
        opt.samples, seed, 1e-7, sys.tol.involution);
    for (auto& c : sub.conditions) report.conditions.push_back(std::move(c));
  }

  SystemReport out;
  out.report = std::move(report);
  out.meta["system"] = sys.name;
  out.meta["seed"] = seed;
  out.meta["samples"] = opt.samples;
  out.meta["dimension"] = sys.chart.dim();
  out.meta["tolerances"] = sys.tol.toJson();
  return out;
}

}  // namespace contactflow
