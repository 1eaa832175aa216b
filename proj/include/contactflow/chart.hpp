#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace contactflow {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// A single coordinate chart: named coordinates, a sampling box, and an
/// optional validity domain.  The box (shrunk by the margin fraction) is
/// where test points are drawn; the domain is where evaluation makes sense
/// at all and is what flows are checked against.  Periodic coordinates wrap
/// with period 2*pi and are never considered out of domain.
struct Chart {
  std::vector<std::string> coords;
  std::vector<bool> periodic;                  // empty => all false
  std::vector<std::array<double, 2>> box;
  std::vector<std::array<double, 2>> domain;   // empty => same as box
  double margin = 0.05;

  int dim() const { return static_cast<int>(coords.size()); }
  bool isPeriodic(int i) const {
    return !periodic.empty() && periodic[static_cast<size_t>(i)];
  }
  std::array<double, 2> domainOf(int i) const {
    return domain.empty() ? box[static_cast<size_t>(i)] : domain[static_cast<size_t>(i)];
  }

  /// True when every non-periodic coordinate lies inside its domain interval.
  bool inDomain(const Vec& x) const;

  /// Throws std::invalid_argument on inconsistent sizes or empty boxes.
  void validate() const;
};

/// Point of a chart; the chart id travels along so reports can say where a
/// residual was observed.
struct Point {
  Vec x;
  std::string chart_id;
};

/// Low-discrepancy (Halton) points in the margin-shrunk box.  Deterministic:
/// the sequence depends only on box, margin, seed and count.
std::vector<Vec> samplePoints(const Chart& chart, int count, uint64_t seed);

/// Deterministic uniform double in [lo, hi) from a counter-mode generator;
/// used where tests need reproducible "random" coefficients.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed ^ 0x9e3779b97f4a7c15ull) {}
  double uniform(double lo = 0.0, double hi = 1.0);
  long long integer(long long lo, long long hi);  // inclusive bounds

 private:
  uint64_t next();
  uint64_t state_;
};

}  // namespace contactflow
