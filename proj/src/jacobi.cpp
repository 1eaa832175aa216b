#include "contactflow/jacobi.hpp"

#include <cmath>
#include <cstdio>

namespace contactflow {

namespace {

std::span<const double> asSpan(const Vec& x) {
  return {x.data(), static_cast<size_t>(x.size())};
}

std::string formatMax(const char* label, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s=%.3e", label, v);
  return buf;
}

}  // namespace

BracketEval jacobiBracket(const ContactForm& form, const ScalarField& f,
                          const ScalarField& g, const Vec& x) {
  BracketEval out;
  out.value = jacobiBracketT<double>(form, f, g, asSpan(x), &out.alt);
  return out;
}

double bivector(const ContactForm& form, const Vec& eta, const Vec& xi, const Vec& x) {
  auto fr = form.frame<double>(asSpan(x));
  size_t d = static_cast<size_t>(form.dim());
  SVec<double> etaHat(d), xiHat(d);
  double etaZ = 0.0, xiZ = 0.0;
  for (size_t i = 0; i < d; ++i) {
    etaZ += eta[static_cast<long>(i)] * fr.Z[i];
    xiZ += xi[static_cast<long>(i)] * fr.Z[i];
  }
  for (size_t i = 0; i < d; ++i) {
    etaHat[i] = eta[static_cast<long>(i)] - etaZ * fr.a[i];
    xiHat[i] = xi[static_cast<long>(i)] - xiZ * fr.a[i];
  }
  SVec<double> vE = form.sharpIn(fr, etaHat);
  SVec<double> vX = form.sharpIn(fr, xiHat);
  return quadForm(fr.A, vE, vX);
}

CheckReport checkIsomorphism(const ContactForm& form, const ScalarField& f,
                             const ScalarField& g, std::span<const Vec> samples,
                             double tol) {
  CheckReport report;
  auto& rec = report.add("bracket_isomorphism");
  auto fShared = std::shared_ptr<const ScalarField>(&f, [](const ScalarField*) {});
  auto gShared = std::shared_ptr<const ScalarField>(&g, [](const ScalarField*) {});
  HamiltonianField Xf(form, fShared);
  HamiltonianField Xg(form, gShared);
  double worstMismatch = 0.0;
  for (const Vec& p : samples) {
    Vec lb = lieBracket(Xf, Xg, p);
    double lhs = alphaPairing(form, lb, p);
    BracketEval br = jacobiBracket(form, f, g, p);
    rec.track(std::abs(lhs - br.value), p);
    worstMismatch = std::max(worstMismatch, br.mismatch());
  }
  rec.pass = rec.worst_residual <= tol;
  rec.detail = "max |<alpha,[X_f,X_g]> - [f,g]|; " +
               formatMax("route_mismatch", worstMismatch);
  return report;
}

CheckReport checkDerivation(const ContactForm& form, const ScalarField& f,
                            const ScalarField& g, std::span<const Vec> samples,
                            double tol) {
  CheckReport report;
  auto& rec = report.add("bracket_derivation");
  auto fShared = std::shared_ptr<const ScalarField>(&f, [](const ScalarField*) {});
  HamiltonianField Xf(form, fShared);
  for (const Vec& p : samples) {
    auto fr = form.frame<double>(asSpan(p));
    Jet jf = evalJet(f, p);
    Jet jg = evalJet(g, p);
    SVec<double> X = Xf.eval(asSpan(p));
    double lhs = 0.0, dfZ = 0.0;
    for (size_t i = 0; i < X.size(); ++i) {
      lhs += jg.gradient[static_cast<long>(i)] * X[i];
      dfZ += jf.gradient[static_cast<long>(i)] * fr.Z[i];
    }
    double rhs = jacobiBracket(form, f, g, p).value + jg.value * dfZ;
    rec.track(std::abs(lhs - rhs), p);
  }
  rec.pass = rec.worst_residual <= tol;
  rec.detail = "max |X_f(g) - ([f,g] + g <df,Z>)|";
  return report;
}

CheckReport involutionEquivalences(const ContactForm& form, const ScalarField& f,
                                   const ScalarField& g, std::span<const Vec> samples,
                                   const BracketConfig& cfg) {
  CheckReport report;

  auto& pre = report.add("semibasic_inputs");
  SemibasicScan sf = scanSemibasic(form, f, samples, cfg.semibasicTol);
  SemibasicScan sg = scanSemibasic(form, g, samples, cfg.semibasicTol);
  pre.worst_residual = std::max(sf.worst, sg.worst);
  pre.notePoint(sf.worst >= sg.worst ? sf.worstPoint : sg.worstPoint);
  pre.pass = sf.semibasic && sg.semibasic;
  pre.detail = "max |<df,Z>| and |<dg,Z>| over samples";
  if (!pre.pass) {
    pre.detail += "; inputs not semi-basic, equivalences not evaluated";
    return report;
  }

  auto fShared = std::shared_ptr<const ScalarField>(&f, [](const ScalarField*) {});
  auto gShared = std::shared_ptr<const ScalarField>(&g, [](const ScalarField*) {});
  HamiltonianField Xf(form, fShared);
  HamiltonianField Xg(form, gShared);

  auto& agree = report.add("bracket_routes_agree");
  double maxBr = 0.0, maxLieFG = 0.0, maxLieGF = 0.0;
  for (const Vec& p : samples) {
    auto fr = form.frame<double>(asSpan(p));
    BracketEval br = jacobiBracket(form, f, g, p);
    SVec<double> xf = Xf.eval(asSpan(p));
    SVec<double> xg = Xg.eval(asSpan(p));
    double dAlpha = quadForm(fr.A, xf, xg);
    // For semi-basic inputs the bracket reduces to d.alpha(X_f, X_g)
    // and to Lambda(df, dg); check both collapses.
    double worst = std::max(std::abs(br.value - dAlpha), br.mismatch());
    agree.track(worst, p);

    Jet jf = evalJet(f, p);
    Jet jg = evalJet(g, p);
    double lieFG = 0.0, lieGF = 0.0;
    for (size_t i = 0; i < xf.size(); ++i) {
      lieFG += jg.gradient[static_cast<long>(i)] * xf[i];
      lieGF += jf.gradient[static_cast<long>(i)] * xg[i];
    }
    maxBr = std::max(maxBr, std::abs(br.value));
    maxLieFG = std::max(maxLieFG, std::abs(lieFG));
    maxLieGF = std::max(maxLieGF, std::abs(lieGF));
  }
  agree.pass = agree.worst_residual <= cfg.crossTol;
  agree.detail = "max over samples of |[f,g] - d.alpha(X_f,X_g)| and route mismatch";

  auto& legs = report.add("zero_legs_consistent");
  bool zBr = maxBr <= cfg.semibasicTol;
  bool zFG = maxLieFG <= cfg.semibasicTol;
  bool zGF = maxLieGF <= cfg.semibasicTol;
  legs.pass = (zBr == zFG) && (zFG == zGF);
  legs.worst_residual = std::max({maxBr, maxLieFG, maxLieGF});
  legs.detail = formatMax("max_bracket", maxBr) + ", " +
                formatMax("max_Xf_g", maxLieFG) + ", " +
                formatMax("max_Xg_f", maxLieGF) +
                (legs.pass ? "; legs vanish or persist together"
                           : "; legs disagree");
  return report;
}

}  // namespace contactflow
