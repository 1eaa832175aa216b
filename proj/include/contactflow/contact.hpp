#pragma once

#include <memory>
#include <span>
#include <string>

#include "contactflow/fields.hpp"

namespace contactflow {

/// A contact form alpha on a chart of odd dimension d = 2n+1, given by its
/// coefficient expressions.  Provides the pointwise frame used everywhere
/// else: coefficients a, the exterior-derivative matrix A with the
/// convention  d.alpha(X, Y) = X^T A Y,  and the Reeb field Z solving the
/// stacked system  A Z = 0,  <a, Z> = 1.
///
/// Musical conventions (checked against worked Darboux examples):
///   flat(v)  = A v          (equals -i_v d.alpha)
///   sharp(w) solves A v = w with <a, v> = 0, for semi-basic w.
class ContactForm {
 public:
  ContactForm(Chart chart, ExprList alpha);

  const Chart& chart() const { return chart_; }
  const ExprList& alpha() const { return alpha_; }
  int dim() const { return chart_.dim(); }
  int n() const { return (chart_.dim() - 1) / 2; }

  template <class S>
  struct Frame {
    SVec<S> a;
    SMat<S> A;
    SVec<S> Z;
  };

  template <class S>
  Frame<S> frame(std::span<const S> x) const {
    Frame<S> fr;
    fr.A = dOneformT<S>(alpha_, x, &fr.a);
    SVec<S> zero(static_cast<size_t>(dim()), S(0.0));
    fr.Z = solveStacked(fr.A, fr.a, zero, S(1.0));
    return fr;
  }

  /// Solve A v = w, <a, v> = 0 within an existing frame.
  template <class S>
  SVec<S> sharpIn(const Frame<S>& fr, const SVec<S>& w) const {
    bool allZero = true;
    for (const S& c : w)
      if (!isZeroDeep(c)) { allZero = false; break; }
    if (allZero) return SVec<S>(w.size(), S(0.0));
    return solveStacked(fr.A, fr.a, w, S(0.0));
  }

 private:
  Chart chart_;
  ExprList alpha_;
};

/// Non-degeneracy witness: determinant of the bordered matrix
/// [[0, a^T], [-a, A]]; nonzero exactly where alpha is contact.
double contactCheck(const ContactForm& form, const Vec& x);

struct ReebResult {
  Vec Z;
  double residual = 0.0;   // max of |A Z|_inf and |<a,Z> - 1|
  double condition = 0.0;  // singular-value ratio of the stacked system
};

/// Reeb field by least squares on the stacked system [A; a^T] Z = [0; 1],
/// with an explicit residual so degeneracy shows up as data, not mystery.
ReebResult reeb(const ContactForm& form, const Vec& x);

/// X = <alpha, X> Z + hat(X); returns the vertical coefficient and the
/// horizontal component.
struct Decomposition {
  double vertical = 0.0;
  Vec horizontal;
};
Decomposition decompose(const ContactForm& form, const Vec& X, const Vec& x);

/// Semi-basic part of a one-form value: eta - <eta, Z> alpha.
Vec semibasicPart(const ContactForm& form, const Vec& eta, const Vec& x);

/// Max |<df, Z>| over the samples; true when it stays below tol.
struct SemibasicScan {
  bool semibasic = false;
  double worst = 0.0;
  Vec worstPoint;
};
SemibasicScan scanSemibasic(const ContactForm& form, const ScalarField& f,
                            std::span<const Vec> samples, double tol);

struct SharpResult {
  Vec v;
  double residual = 0.0;  // of the stacked solve; large when w was not semi-basic
};
SharpResult sharp(const ContactForm& form, const Vec& w, const Vec& x);

/// flat(v) = A v.
Vec flat(const ContactForm& form, const Vec& v, const Vec& x);

/// <alpha, X> at x.
double alphaPairing(const ContactForm& form, const Vec& X, const Vec& x);

/// Coefficients of the Lie derivative L_X alpha at x, from Cartan's formula:
/// i_X d.alpha + d(i_X alpha) = -A X + grad(<alpha, X>).
Vec lieDerivativeAlpha(const ContactForm& form, const VectorField& X, const Vec& x);

/// The Reeb field as a flowable vector field.
class ReebField : public VectorField {
 public:
  explicit ReebField(const ContactForm& form) : form_(&form) {}
  SVec<double> eval(std::span<const double> x) const override { return evalT<double>(x); }
  SVec<Dual1> eval(std::span<const Dual1> x) const override { return evalT<Dual1>(x); }

 private:
  template <class S>
  SVec<S> evalT(std::span<const S> x) const {
    return form_->frame<S>(x).Z;
  }
  const ContactForm* form_;
};

/// Contact Hamiltonian field of a scalar:  X_f = f Z + sharp(df - <df,Z> alpha).
/// Key identities, exercised by the test-suite:
///   <alpha, X_f> = f          L_{X_f} alpha = <df, Z> alpha.
class HamiltonianField : public VectorField {
 public:
  HamiltonianField(const ContactForm& form, std::shared_ptr<const ScalarField> f)
      : form_(&form), f_(std::move(f)) {}
  SVec<double> eval(std::span<const double> x) const override { return evalT<double>(x); }
  SVec<Dual1> eval(std::span<const Dual1> x) const override { return evalT<Dual1>(x); }
  const ScalarField& hamiltonian() const { return *f_; }

 private:
  template <class S>
  SVec<S> evalT(std::span<const S> x) const {
    auto fr = form_->frame<S>(x);
    JetS<S> jf = evalJetT<S>(*f_, x);
    S fZ = dot(jf.grad, fr.Z);
    SVec<S> etaHat(jf.grad.size());
    for (size_t i = 0; i < etaHat.size(); ++i)
      etaHat[i] = jf.grad[i] - fZ * fr.a[i];
    SVec<S> v = form_->sharpIn(fr, etaHat);
    for (size_t i = 0; i < v.size(); ++i) v[i] += jf.value * fr.Z[i];
    return v;
  }

  const ContactForm* form_;
  std::shared_ptr<const ScalarField> f_;
};

/// Horizontal projection of another field: X - <alpha, X> Z.
class HorizontalField : public VectorField {
 public:
  HorizontalField(const ContactForm& form, std::shared_ptr<const VectorField> base)
      : form_(&form), base_(std::move(base)) {}
  SVec<double> eval(std::span<const double> x) const override { return evalT<double>(x); }
  SVec<Dual1> eval(std::span<const Dual1> x) const override { return evalT<Dual1>(x); }

 private:
  template <class S>
  SVec<S> evalT(std::span<const S> x) const {
    auto fr = form_->frame<S>(x);
    SVec<S> u = base_->eval(x);
    S vert = dot(fr.a, u);
    for (size_t i = 0; i < u.size(); ++i) u[i] -= vert * fr.Z[i];
    return u;
  }
  const ContactForm* form_;
  std::shared_ptr<const VectorField> base_;
};

/// X^T A Y within a frame.
template <class S>
S quadForm(const SMat<S>& A, const SVec<S>& X, const SVec<S>& Y) {
  S acc(0.0);
  for (int i = 0; i < A.rows(); ++i)
    for (int j = 0; j < A.cols(); ++j)
      acc += X[static_cast<size_t>(i)] * A(i, j) * Y[static_cast<size_t>(j)];
  return acc;
}

}  // namespace contactflow
