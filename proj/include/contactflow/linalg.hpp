#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "contactflow/dual.hpp"

namespace contactflow {

/// Vector/matrix containers over an arbitrary scalar (double or nested dual),
/// for the handful of tiny dense solves the geometry needs.  Eigen handles
/// the plain-double diagnostics (rank, condition numbers); these exist so the
/// same solves can run inside automatic differentiation.
template <class S>
using SVec = std::vector<S>;

template <class S>
class SMat {
 public:
  SMat() = default;
  SMat(int rows, int cols) : rows_(rows), cols_(cols), a_(static_cast<size_t>(rows * cols)) {}
  int rows() const { return rows_; }
  int cols() const { return cols_; }
  S& operator()(int r, int c) { return a_[static_cast<size_t>(r * cols_ + c)]; }
  const S& operator()(int r, int c) const { return a_[static_cast<size_t>(r * cols_ + c)]; }

 private:
  int rows_ = 0, cols_ = 0;
  std::vector<S> a_;
};

template <class S>
SVec<S> matVec(const SMat<S>& M, const SVec<S>& x) {
  SVec<S> y(static_cast<size_t>(M.rows()), S(0.0));
  for (int r = 0; r < M.rows(); ++r) {
    S acc(0.0);
    for (int c = 0; c < M.cols(); ++c) acc += M(r, c) * x[static_cast<size_t>(c)];
    y[static_cast<size_t>(r)] = acc;
  }
  return y;
}

template <class S>
S dot(const SVec<S>& a, const SVec<S>& b) {
  S acc(0.0);
  for (size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

/// In-place Gaussian elimination with partial pivoting on the numeric value
/// of each scalar; derivative parts ride along through the row operations.
template <class S>
SVec<S> solveSquare(SMat<S> M, SVec<S> b) {
  int n = M.rows();
  if (M.cols() != n || static_cast<int>(b.size()) != n)
    throw std::invalid_argument("solveSquare: shape mismatch");
  for (int c = 0; c < n; ++c) {
    int piv = c;
    double best = std::abs(valueOf(M(c, c)));
    for (int r = c + 1; r < n; ++r) {
      double m = std::abs(valueOf(M(r, c)));
      if (m > best) { best = m; piv = r; }
    }
    if (best == 0.0) throw std::runtime_error("solveSquare: singular matrix");
    if (piv != c) {
      for (int k = c; k < n; ++k) std::swap(M(c, k), M(piv, k));
      std::swap(b[static_cast<size_t>(c)], b[static_cast<size_t>(piv)]);
    }
    for (int r = c + 1; r < n; ++r) {
      S f = M(r, c) / M(c, c);
      M(r, c) = S(0.0);
      for (int k = c + 1; k < n; ++k) M(r, k) -= f * M(c, k);
      b[static_cast<size_t>(r)] -= f * b[static_cast<size_t>(c)];
    }
  }
  SVec<S> x(static_cast<size_t>(n), S(0.0));
  for (int r = n - 1; r >= 0; --r) {
    S acc = b[static_cast<size_t>(r)];
    for (int k = r + 1; k < n; ++k) acc -= M(r, k) * x[static_cast<size_t>(k)];
    x[static_cast<size_t>(r)] = acc / M(r, r);
  }
  return x;
}

/// Least squares for the stacked system [M; extraRow] v = [rhs; extraVal] via
/// normal equations; the systems here are tiny and well conditioned.
template <class S>
SVec<S> solveStacked(const SMat<S>& M, const SVec<S>& extraRow, const SVec<S>& rhs,
                     const S& extraVal) {
  int n = M.cols();
  SMat<S> G(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      S acc = extraRow[static_cast<size_t>(i)] * extraRow[static_cast<size_t>(j)];
      for (int r = 0; r < M.rows(); ++r) acc += M(r, i) * M(r, j);
      G(i, j) = acc;
    }
  SVec<S> t(static_cast<size_t>(n), S(0.0));
  for (int i = 0; i < n; ++i) {
    S acc = extraRow[static_cast<size_t>(i)] * extraVal;
    for (int r = 0; r < M.rows(); ++r) acc += M(r, i) * rhs[static_cast<size_t>(r)];
    t[static_cast<size_t>(i)] = acc;
  }
  return solveSquare(std::move(G), std::move(t));
}

}  // namespace contactflow
