#include "contactflow/contact.hpp"

#include <Eigen/Dense>
#include <limits>
#include <stdexcept>

namespace contactflow {

ContactForm::ContactForm(Chart chart, ExprList alpha)
    : chart_(std::move(chart)), alpha_(std::move(alpha)) {
  chart_.validate();
  if (chart_.dim() % 2 == 0)
    throw std::invalid_argument("contact chart dimension must be odd");
  if (alpha_.size() != static_cast<size_t>(chart_.dim()))
    throw std::invalid_argument("contact form needs one coefficient per coordinate");
}

namespace {

std::span<const double> asSpan(const Vec& x) {
  return {x.data(), static_cast<size_t>(x.size())};
}

Mat toEigen(const SMat<double>& A) {
  Mat M(A.rows(), A.cols());
  for (int i = 0; i < A.rows(); ++i)
    for (int j = 0; j < A.cols(); ++j) M(i, j) = A(i, j);
  return M;
}

// The (d+1) x d least-squares matrix [A; a^T] and the coefficient vector a.
struct DoubleFrame {
  Vec a;
  Mat A;
  Mat stacked;
};

DoubleFrame doubleFrame(const ContactForm& form, const Vec& x) {
  SVec<double> coeffs;
  SMat<double> A = dOneformT<double>(form.alpha(), asSpan(x), &coeffs);
  DoubleFrame fr;
  fr.A = toEigen(A);
  fr.a = Eigen::Map<const Vec>(coeffs.data(), static_cast<long>(coeffs.size()));
  int d = form.dim();
  fr.stacked.resize(d + 1, d);
  fr.stacked.topRows(d) = fr.A;
  fr.stacked.bottomRows(1) = fr.a.transpose();
  return fr;
}

}  // namespace

double contactCheck(const ContactForm& form, const Vec& x) {
  DoubleFrame fr = doubleFrame(form, x);
  int d = form.dim();
  Mat M = Mat::Zero(d + 1, d + 1);
  M.block(0, 1, 1, d) = fr.a.transpose();
  M.block(1, 0, d, 1) = -fr.a;
  M.block(1, 1, d, d) = fr.A;
  return M.determinant();
}

ReebResult reeb(const ContactForm& form, const Vec& x) {
  DoubleFrame fr = doubleFrame(form, x);
  int d = form.dim();
  Vec rhs = Vec::Zero(d + 1);
  rhs[d] = 1.0;
  ReebResult out;
  out.Z = fr.stacked.colPivHouseholderQr().solve(rhs);
  out.residual = std::max((fr.A * out.Z).cwiseAbs().maxCoeff(),
                          std::abs(fr.a.dot(out.Z) - 1.0));
  Eigen::JacobiSVD<Mat> svd(fr.stacked);
  double smin = svd.singularValues().minCoeff();
  out.condition = smin > 0.0 ? svd.singularValues().maxCoeff() / smin
                             : std::numeric_limits<double>::infinity();
  return out;
}

Decomposition decompose(const ContactForm& form, const Vec& X, const Vec& x) {
  auto fr = form.frame<double>(asSpan(x));
  Decomposition out;
  Vec a = Eigen::Map<const Vec>(fr.a.data(), static_cast<long>(fr.a.size()));
  Vec Z = Eigen::Map<const Vec>(fr.Z.data(), static_cast<long>(fr.Z.size()));
  out.vertical = a.dot(X);
  out.horizontal = X - out.vertical * Z;
  return out;
}

Vec semibasicPart(const ContactForm& form, const Vec& eta, const Vec& x) {
  auto fr = form.frame<double>(asSpan(x));
  Vec a = Eigen::Map<const Vec>(fr.a.data(), static_cast<long>(fr.a.size()));
  Vec Z = Eigen::Map<const Vec>(fr.Z.data(), static_cast<long>(fr.Z.size()));
  return eta - eta.dot(Z) * a;
}

SemibasicScan scanSemibasic(const ContactForm& form, const ScalarField& f,
                            std::span<const Vec> samples, double tol) {
  SemibasicScan out;
  for (const Vec& p : samples) {
    auto fr = form.frame<double>(asSpan(p));
    Jet j = evalJet(f, p);
    Vec Z = Eigen::Map<const Vec>(fr.Z.data(), static_cast<long>(fr.Z.size()));
    double r = std::abs(j.gradient.dot(Z));
    if (r >= out.worst) {
      out.worst = r;
      out.worstPoint = p;
    }
  }
  out.semibasic = out.worst <= tol;
  return out;
}

SharpResult sharp(const ContactForm& form, const Vec& w, const Vec& x) {
  DoubleFrame fr = doubleFrame(form, x);
  int d = form.dim();
  Vec rhs(d + 1);
  rhs.head(d) = w;
  rhs[d] = 0.0;
  SharpResult out;
  out.v = fr.stacked.colPivHouseholderQr().solve(rhs);
  out.residual = (fr.stacked * out.v - rhs).cwiseAbs().maxCoeff();
  return out;
}

Vec flat(const ContactForm& form, const Vec& v, const Vec& x) {
  DoubleFrame fr = doubleFrame(form, x);
  return fr.A * v;
}

double alphaPairing(const ContactForm& form, const Vec& X, const Vec& x) {
  SVec<double> coeffs = form.alpha().evalAll<double>(asSpan(x));
  Vec a = Eigen::Map<const Vec>(coeffs.data(), static_cast<long>(coeffs.size()));
  return a.dot(X);
}

Vec lieDerivativeAlpha(const ContactForm& form, const VectorField& X, const Vec& x) {
  DoubleFrame fr = doubleFrame(form, x);
  std::vector<Dual1> seeded = seedGradient(asSpan(x));
  std::span<const Dual1> sp(seeded.data(), seeded.size());
  SVec<Dual1> a = form.alpha().evalAll<Dual1>(sp);
  SVec<Dual1> Xc = X.eval(sp);
  Dual1 pairing = dot(a, Xc);
  int d = form.dim();
  Vec gradPairing(d);
  for (int i = 0; i < d; ++i) gradPairing[i] = pairing.part(i);
  Vec Xval(d);
  for (int i = 0; i < d; ++i) Xval[i] = Xc[static_cast<size_t>(i)].v;
  return -(fr.A * Xval) + gradPairing;
}

}  // namespace contactflow
