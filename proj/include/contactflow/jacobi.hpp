#pragma once

#include <memory>
#include <span>

#include "contactflow/contact.hpp"
#include "contactflow/report.hpp"

namespace contactflow {

/// Tolerances and sampling for the bracket-level checks.
struct BracketConfig {
  double tol = 1e-7;         // identity being verified
  double crossTol = 1e-9;    // agreement of the two bracket routes
  double semibasicTol = 1e-8;
};

/// Jacobi bracket at a point, computed two ways:
///   value = d.alpha(X_f, X_g) + f <dg,Z> - g <df,Z>
///   alt   = Lambda(df, dg)    + f <dg,Z> - g <df,Z>
/// where Lambda(eta, xi) = d.alpha(sharp(eta_hat), sharp(xi_hat)).  The two
/// must agree to crossTol; the mismatch is part of every report.
template <class S>
S jacobiBracketT(const ContactForm& form, const ScalarField& f, const ScalarField& g,
                 std::span<const S> x, S* alt = nullptr) {
  auto fr = form.frame<S>(x);
  JetS<S> jf = evalJetT<S>(f, x);
  JetS<S> jg = evalJetT<S>(g, x);
  S fZ = dot(jf.grad, fr.Z);
  S gZ = dot(jg.grad, fr.Z);
  size_t d = jf.grad.size();
  SVec<S> etaF(d), etaG(d);
  for (size_t i = 0; i < d; ++i) {
    etaF[i] = jf.grad[i] - fZ * fr.a[i];
    etaG[i] = jg.grad[i] - gZ * fr.a[i];
  }
  SVec<S> vF = form.sharpIn(fr, etaF);
  SVec<S> vG = form.sharpIn(fr, etaG);
  S tail = jf.value * gZ - jg.value * fZ;
  if (alt) *alt = quadForm(fr.A, vF, vG) + tail;
  SVec<S> XF = vF, XG = vG;
  for (size_t i = 0; i < d; ++i) {
    XF[i] += jf.value * fr.Z[i];
    XG[i] += jg.value * fr.Z[i];
  }
  return quadForm(fr.A, XF, XG) + tail;
}

struct BracketEval {
  double value = 0.0;
  double alt = 0.0;
  double mismatch() const { return std::abs(value - alt); }
};

BracketEval jacobiBracket(const ContactForm& form, const ScalarField& f,
                          const ScalarField& g, const Vec& x);

/// Bivector value Lambda(eta, xi) for one-form values given at x.
double bivector(const ContactForm& form, const Vec& eta, const Vec& xi, const Vec& x);

/// The bracket [f, g] as a scalar field in its own right (one derivative
/// level down: usable inside another bracket, not inside two).
class BracketField : public ScalarField {
 public:
  BracketField(const ContactForm& form, std::shared_ptr<const ScalarField> f,
               std::shared_ptr<const ScalarField> g)
      : form_(&form), f_(std::move(f)), g_(std::move(g)) {}
  double eval(std::span<const double> x) const override {
    return jacobiBracketT<double>(*form_, *f_, *g_, x);
  }
  Dual1 eval(std::span<const Dual1> x) const override {
    return jacobiBracketT<Dual1>(*form_, *f_, *g_, x);
  }
  Dual2 eval(std::span<const Dual2>) const override {
    throw std::logic_error("BracketField: second derivatives not supported");
  }

 private:
  const ContactForm* form_;
  std::shared_ptr<const ScalarField> f_, g_;
};

/// Worst-case |<alpha, [X_f, X_g]> - [f, g]| over the samples: the map
/// f -> X_f must carry Jacobi brackets to Lie brackets.
CheckReport checkIsomorphism(const ContactForm& form, const ScalarField& f,
                             const ScalarField& g, std::span<const Vec> samples,
                             double tol);

/// Worst-case |X_f(g) - ([f, g] + g <df, Z>)| over the samples.
CheckReport checkDerivation(const ContactForm& form, const ScalarField& f,
                            const ScalarField& g, std::span<const Vec> samples,
                            double tol);

/// For semi-basic df, dg: the three bracket expressions agree, and the
/// statements "[f,g] = 0", "X_f(g) = 0", "X_g(f) = 0" hold or fail together.
CheckReport involutionEquivalences(const ContactForm& form, const ScalarField& f,
                                   const ScalarField& g, std::span<const Vec> samples,
                                   const BracketConfig& cfg);

}  // namespace contactflow
