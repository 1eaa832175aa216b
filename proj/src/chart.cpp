#include "contactflow/chart.hpp"

#include <stdexcept>

#include "contactflow/dual.hpp"

namespace contactflow {

bool Chart::inDomain(const Vec& x) const {
  for (int i = 0; i < dim(); ++i) {
    if (isPeriodic(i)) continue;
    auto [lo, hi] = domainOf(i);
    if (x[i] < lo || x[i] > hi) return false;
  }
  return true;
}

void Chart::validate() const {
  size_t d = coords.size();
  if (d == 0) throw std::invalid_argument("chart has no coordinates");
  if (d > static_cast<size_t>(kMaxDim))
    throw std::invalid_argument("chart dimension exceeds supported maximum");
  if (box.size() != d)
    throw std::invalid_argument("chart box size does not match coordinates");
  if (!periodic.empty() && periodic.size() != d)
    throw std::invalid_argument("chart periodic flags do not match coordinates");
  if (!domain.empty() && domain.size() != d)
    throw std::invalid_argument("chart domain size does not match coordinates");
  for (size_t i = 0; i < d; ++i)
    if (!(box[i][0] < box[i][1]))
      throw std::invalid_argument("chart box is empty for coordinate " + coords[i]);
  if (!(margin >= 0.0 && margin < 0.5))
    throw std::invalid_argument("chart margin must lie in [0, 0.5)");
}

namespace {

// Radical-inverse in the given prime base.
double radicalInverse(uint64_t i, int base) {
  double inv = 1.0 / base, f = inv, r = 0.0;
  while (i > 0) {
    r += f * static_cast<double>(i % static_cast<uint64_t>(base));
    i /= static_cast<uint64_t>(base);
    f *= inv;
  }
  return r;
}

constexpr int kPrimes[8] = {2, 3, 5, 7, 11, 13, 17, 19};

}  // namespace

std::vector<Vec> samplePoints(const Chart& chart, int count, uint64_t seed) {
  chart.validate();
  int d = chart.dim();
  // Skip an initial segment; the offset folds the seed in so different seeds
  // give different (still low-discrepancy) point sets.
  uint64_t offset = 13 + seed % 100003;
  std::vector<Vec> out;
  out.reserve(static_cast<size_t>(count));
  for (int k = 0; k < count; ++k) {
    Vec x(d);
    for (int i = 0; i < d; ++i) {
      double u = radicalInverse(offset + static_cast<uint64_t>(k), kPrimes[i]);
      double lo = chart.box[static_cast<size_t>(i)][0];
      double hi = chart.box[static_cast<size_t>(i)][1];
      double m = chart.margin * (hi - lo);
      x[i] = (lo + m) + u * ((hi - m) - (lo + m));
    }
    out.push_back(std::move(x));
  }
  return out;
}

uint64_t Rng::next() {
  // splitmix64: small, portable, and identical everywhere.
  state_ += 0x9e3779b97f4a7c15ull;
  uint64_t z = state_;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

double Rng::uniform(double lo, double hi) {
  double u = static_cast<double>(next() >> 11) * 0x1.0p-53;
  return lo + u * (hi - lo);
}

long long Rng::integer(long long lo, long long hi) {
  uint64_t span = static_cast<uint64_t>(hi - lo + 1);
  return lo + static_cast<long long>(next() % span);
}

}  // namespace contactflow
