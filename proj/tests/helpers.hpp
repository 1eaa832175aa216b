#pragma once

// Shared utilities for the test binaries: finite-difference oracles, random
// polynomial generators with printable coefficients, and a subprocess runner
// for exercising the command-line tool.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "contactflow/chart.hpp"
#include "contactflow/fields.hpp"

namespace cf = contactflow;

namespace testutil {

inline std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Central finite difference of a scalar callable; independent of the dual
// arithmetic it is used to check.
inline double fdPartial(const std::function<double(const cf::Vec&)>& f,
                        cf::Vec x, long i, double h = 1e-6) {
  const double xi = x[i];
  x[i] = xi + h;
  const double hi = f(x);
  x[i] = xi - h;
  const double lo = f(x);
  x[i] = xi;
  return (hi - lo) / (2.0 * h);
}

inline cf::Vec fdGradient(const std::function<double(const cf::Vec&)>& f,
                          const cf::Vec& x, double h = 1e-6) {
  cf::Vec g(x.size());
  for (long i = 0; i < x.size(); ++i) g[i] = fdPartial(f, x, i, h);
  return g;
}

// Random quadratic polynomial over the given coordinates, emitted as text so
// tests exercise the same parse path as user input.  Coefficients stay small
// to keep absolute error budgets meaningful on boxes of radius a few units.
inline std::string randomPolynomial(cf::Rng& rng,
                                    const std::vector<std::string>& coords,
                                    double scale = 0.3) {
  std::ostringstream out;
  out << num(rng.uniform(-scale, scale));
  for (std::size_t i = 0; i < coords.size(); ++i) {
    out << " + " << num(rng.uniform(-scale, scale)) << "*" << coords[i];
    for (std::size_t j = i; j < coords.size(); ++j) {
      out << " + " << num(rng.uniform(-scale, scale)) << "*" << coords[i]
          << "*" << coords[j];
    }
  }
  return out.str();
}

inline std::shared_ptr<const cf::ScalarField> makeField(
    const std::string& text, const std::vector<std::string>& coords) {
  return std::make_shared<cf::ExprScalarField>(cf::parse(text, coords), text);
}

// Runs fn, which must throw E; returns the exception message.
template <class E>
std::string messageOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const E& e) {
    return e.what();
  }
  return "<no exception thrown>";
}

// Evaluate through the base class (derived fields hide the Vec overload)
// and convert to an Eigen vector for comparisons.
inline cf::Vec evalVec(const cf::VectorField& X, const cf::Vec& x) {
  auto v = X.eval(std::span<const double>(x.data(), static_cast<std::size_t>(x.size())));
  return Eigen::Map<const cf::Vec>(v.data(), static_cast<long>(v.size()));
}

inline double evalScalar(const cf::ScalarField& f, const cf::Vec& x) {
  return f.eval(std::span<const double>(x.data(), static_cast<std::size_t>(x.size())));
}

inline double maxAbsDiff(const cf::Vec& a, const cf::Vec& b) {
  double worst = 0.0;
  for (long i = 0; i < a.size(); ++i)
    worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

}  // namespace testutil

#ifdef CLI_PATH
#include <cstdlib>
#include <sys/wait.h>

namespace testutil {

struct RunResult {
  int code = -1;
  std::string out;
  std::string err;
};

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Invokes the installed command-line binary with stdout/stderr captured to
// scratch files in the test working directory.
inline RunResult runCli(const std::string& args) {
  static int counter = 0;
  const std::string tag = std::to_string(++counter);
  const std::string outPath = "cli_stdout_" + tag + ".txt";
  const std::string errPath = "cli_stderr_" + tag + ".txt";
  const std::string cmd = std::string(CLI_PATH) + " " + args + " >" + outPath +
                          " 2>" + errPath;
  const int raw = std::system(cmd.c_str());
  RunResult r;
  r.code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  r.out = slurp(outPath);
  r.err = slurp(errPath);
  std::remove(outPath.c_str());
  std::remove(errPath.c_str());
  return r;
}

}  // namespace testutil
#endif
