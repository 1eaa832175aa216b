#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "contactflow/chart.hpp"
#include "contactflow/expr.hpp"
#include "contactflow/linalg.hpp"

namespace contactflow {

/// Scalar function on a chart, evaluable at three differentiation levels:
/// plain numbers, first-order duals, and nested duals.  Expression-backed
/// fields support all three; derived fields (e.g. a bracket of two others)
/// may support fewer and throw std::logic_error beyond that.
class ScalarField {
 public:
  virtual ~ScalarField() = default;
  virtual double eval(std::span<const double> x) const = 0;
  virtual Dual1 eval(std::span<const Dual1> x) const = 0;
  virtual Dual2 eval(std::span<const Dual2> x) const = 0;
  double eval(const Vec& x) const { return eval(std::span<const double>(x.data(), static_cast<size_t>(x.size()))); }
};

/// Vector field on a chart, evaluable at plain numbers and at first-order
/// duals (the latter is what Lie brackets and pullback arguments need).
class VectorField {
 public:
  virtual ~VectorField() = default;
  virtual SVec<double> eval(std::span<const double> x) const = 0;
  virtual SVec<Dual1> eval(std::span<const Dual1> x) const = 0;
  SVec<double> eval(const Vec& x) const { return eval(std::span<const double>(x.data(), static_cast<size_t>(x.size()))); }
};

/// A list of component expressions; doubles as a one-form (covariant
/// components) and a vector field (contravariant components).
struct ExprList {
  std::vector<std::string> text;
  std::vector<ExprPtr> comp;

  static ExprList fromStrings(std::span<const std::string> strings,
                              std::span<const std::string> coords) {
    ExprList out;
    out.text.assign(strings.begin(), strings.end());
    out.comp.reserve(strings.size());
    for (const auto& s : strings) out.comp.push_back(parse(s, coords));
    return out;
  }

  template <class S>
  SVec<S> evalAll(std::span<const S> x) const {
    SVec<S> v;
    v.reserve(comp.size());
    for (const auto& e : comp) v.push_back(evalExpr<S>(*e, x));
    return v;
  }

  size_t size() const { return comp.size(); }
};

using OneFormDef = ExprList;
using VectorFieldDef = ExprList;

class ExprScalarField : public ScalarField {
 public:
  ExprScalarField(ExprPtr e, std::string text = {})
      : expr_(std::move(e)), text_(std::move(text)) {}
  double eval(std::span<const double> x) const override { return evalExpr<double>(*expr_, x); }
  Dual1 eval(std::span<const Dual1> x) const override { return evalExpr<Dual1>(*expr_, x); }
  Dual2 eval(std::span<const Dual2> x) const override { return evalExpr<Dual2>(*expr_, x); }
  const Expr& expr() const { return *expr_; }
  const std::string& text() const { return text_; }

 private:
  ExprPtr expr_;
  std::string text_;
};

class ExprVectorField : public VectorField {
 public:
  explicit ExprVectorField(ExprList components) : def_(std::move(components)) {}
  SVec<double> eval(std::span<const double> x) const override { return def_.evalAll<double>(x); }
  SVec<Dual1> eval(std::span<const Dual1> x) const override { return def_.evalAll<Dual1>(x); }
  const ExprList& def() const { return def_; }

 private:
  ExprList def_;
};

/// Value and gradient of a scalar at a point.
struct Jet {
  double value = 0.0;
  Vec gradient;
};

/// Scalar-generic jet; S = Dual1 carries second derivatives inside.
template <class S>
struct JetS {
  S value;
  SVec<S> grad;
};

template <class S>
JetS<S> evalJetT(const ScalarField& f, std::span<const S> x) {
  std::vector<Dual<S>> seeded = seedGradient(x);
  Dual<S> r = f.eval(std::span<const Dual<S>>(seeded.data(), seeded.size()));
  JetS<S> out;
  out.value = r.v;
  out.grad.resize(x.size());
  for (size_t i = 0; i < x.size(); ++i) out.grad[i] = r.part(static_cast<int>(i));
  return out;
}

inline Jet evalJet(const ScalarField& f, const Vec& x) {
  auto j = evalJetT<double>(f, std::span<const double>(x.data(), static_cast<size_t>(x.size())));
  Jet out;
  out.value = j.value;
  out.gradient = Eigen::Map<const Vec>(j.grad.data(), static_cast<long>(j.grad.size()));
  return out;
}

inline Jet evalJet(const Expr& e, const Vec& x) {
  ExprScalarField f(std::make_shared<const Expr>(e));
  return evalJet(f, x);
}

/// Component values and Jacobian J(i,j) = d comp_i / d x_j.
struct VecJet {
  Vec value;
  Mat jacobian;
};

inline VecJet evalVecJet(const VectorField& X, const Vec& x) {
  std::span<const double> xs(x.data(), static_cast<size_t>(x.size()));
  std::vector<Dual1> seeded = seedGradient(xs);
  SVec<Dual1> comps = X.eval(std::span<const Dual1>(seeded.data(), seeded.size()));
  VecJet out;
  long d = static_cast<long>(comps.size());
  out.value.resize(d);
  out.jacobian.resize(d, x.size());
  for (long i = 0; i < d; ++i) {
    out.value[i] = comps[static_cast<size_t>(i)].v;
    for (long j = 0; j < x.size(); ++j)
      out.jacobian(i, j) = comps[static_cast<size_t>(i)].part(static_cast<int>(j));
  }
  return out;
}

/// Exterior-derivative matrix of a one-form at a point, with the convention
/// d eta(X, Y) = X^T A Y, i.e. A(i,j) = d_i eta_j - d_j eta_i.  The two
/// entries of each antisymmetric pair are computed as exact negations.
template <class S>
SMat<S> dOneformT(const ExprList& eta, std::span<const S> x, SVec<S>* coeffs = nullptr) {
  int d = static_cast<int>(x.size());
  std::vector<Dual<S>> seeded = seedGradient(x);
  std::span<const Dual<S>> sp(seeded.data(), seeded.size());
  SMat<S> J(d, d);  // J(i,j) = d_j eta_i
  if (coeffs) coeffs->assign(static_cast<size_t>(d), S(0.0));
  for (int i = 0; i < d; ++i) {
    Dual<S> c = evalExpr<Dual<S>>(*eta.comp[static_cast<size_t>(i)], sp);
    if (coeffs) (*coeffs)[static_cast<size_t>(i)] = c.v;
    for (int j = 0; j < d; ++j) J(i, j) = c.part(j);
  }
  SMat<S> A(d, d);
  for (int i = 0; i < d; ++i) {
    A(i, i) = S(0.0);
    for (int j = i + 1; j < d; ++j) {
      A(i, j) = J(j, i) - J(i, j);
      A(j, i) = J(i, j) - J(j, i);
    }
  }
  return A;
}

inline Mat dOneform(const ExprList& eta, const Vec& x) {
  std::span<const double> xs(x.data(), static_cast<size_t>(x.size()));
  SMat<double> A = dOneformT<double>(eta, xs);
  Mat out(A.rows(), A.cols());
  for (int i = 0; i < A.rows(); ++i)
    for (int j = 0; j < A.cols(); ++j) out(i, j) = A(i, j);
  return out;
}

/// Commutator [X, Y]^i = X^j d_j Y^i - Y^j d_j X^i, assembled from exact
/// forward-mode Jacobians.
inline Vec lieBracket(const VectorField& X, const VectorField& Y, const Vec& x) {
  VecJet jx = evalVecJet(X, x);
  VecJet jy = evalVecJet(Y, x);
  return jy.jacobian * jx.value - jx.jacobian * jy.value;
}

}  // namespace contactflow
