#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "contactflow/contact.hpp"
#include "contactflow/systems.hpp"
#include "helpers.hpp"

using namespace contactflow;
using testutil::makeField;
using testutil::randomPolynomial;

namespace {

ContactForm formOf(const std::string& builtinName) {
  SystemDef sys = SystemDef::builtin(builtinName);
  return ContactForm(sys.chart, ExprList::fromStrings(sys.alphaText, sys.chart.coords));
}

Vec makeVec(std::initializer_list<double> v) {
  Vec out(static_cast<long>(v.size()));
  long i = 0;
  for (double c : v) out[i++] = c;
  return out;
}

}  // namespace

TEST_CASE("darboux frame: coefficients, exterior derivative, Reeb field") {
  ContactForm form = formOf("darboux3");
  std::vector<Vec> pts = samplePoints(form.chart(), 16, 7);
  for (const Vec& x : pts) {
    std::span<const double> xs(x.data(), 3);
    auto fr = form.frame<double>(xs);
    CHECK(fr.a[0] == x[1]);  // alpha = dz + p dq
    CHECK(fr.a[1] == 0.0);
    CHECK(fr.a[2] == 1.0);
    // A(i,j) = d_i a_j - d_j a_i; only the q,p pair is nonzero.
    CHECK(fr.A(1, 0) == 1.0);
    CHECK(fr.A(0, 1) == -1.0);
    CHECK(fr.A(0, 0) == 0.0);
    CHECK(fr.A(2, 2) == 0.0);
    CHECK(fr.A(2, 0) == 0.0);
    CHECK(fr.A(0, 2) == 0.0);

    ReebResult rr = reeb(form, x);
    CHECK(rr.residual <= 1e-12);
    CHECK(testutil::maxAbsDiff(rr.Z, makeVec({0, 0, 1})) <= 1e-12);
    CHECK(std::abs(std::abs(contactCheck(form, x)) - 1.0) <= 1e-12);
  }
}

TEST_CASE("Reeb fields of the bundled systems match their closed forms") {
  std::vector<Vec> pts;

  SUBCASE("hopf") {
    ContactForm form = formOf("hopf_s3");
    pts = samplePoints(form.chart(), 32, 11);
    for (const Vec& x : pts) {
      ReebResult rr = reeb(form, x);
      CHECK(rr.residual <= 1e-11);
      CHECK(testutil::maxAbsDiff(rr.Z, makeVec({0, 1, 1})) <= 1e-10);
      // Contact volume coefficient is sin(2u); the bordered determinant is
      // its square.
      const double s = std::sin(2 * x[0]);
      CHECK(contactCheck(form, x) == doctest::Approx(s * s).epsilon(1e-10));
    }
  }

  SUBCASE("canonical action-angle chart") {
    ContactForm form = formOf("canonical_r1s0");
    pts = samplePoints(form.chart(), 32, 12);
    for (const Vec& x : pts) {
      const double y1 = x[2];
      const double z0 = 1.0 / (1.0 + y1 * y1);
      ReebResult rr = reeb(form, x);
      CHECK(rr.residual <= 1e-11);
      CHECK(testutil::maxAbsDiff(rr.Z, makeVec({z0, 2 * y1 * z0, 0})) <= 1e-10);
      const double det = (1 + y1 * y1) * (1 + y1 * y1);
      CHECK(contactCheck(form, x) == doctest::Approx(det).epsilon(1e-10));
    }
  }

  SUBCASE("sphere cotangent chart") {
    ContactForm form = formOf("sphere_geodesic");
    pts = samplePoints(form.chart(), 32, 13);
    for (const Vec& x : pts) {
      const double theta = x[1], psi = x[2];
      Vec want = makeVec({std::sin(psi) / std::sin(theta), std::cos(psi),
                          -std::sin(psi) * std::cos(theta) / std::sin(theta)});
      ReebResult rr = reeb(form, x);
      CHECK(rr.residual <= 1e-10);
      CHECK(testutil::maxAbsDiff(rr.Z, want) <= 1e-9);
      const double s = std::sin(theta);
      CHECK(contactCheck(form, x) == doctest::Approx(s * s).epsilon(1e-9));
    }
  }

  SUBCASE("five-dimensional darboux chart") {
    ContactForm form = formOf("darboux5");
    pts = samplePoints(form.chart(), 16, 14);
    for (const Vec& x : pts) {
      ReebResult rr = reeb(form, x);
      CHECK(rr.residual <= 1e-12);
      CHECK(testutil::maxAbsDiff(rr.Z, makeVec({0, 0, 0, 0, 1})) <= 1e-12);
      CHECK(contactCheck(form, x) == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("hamiltonian fields on the darboux chart match the closed form") {
  ContactForm form = formOf("darboux3");
  Rng rng(501);
  std::vector<Vec> pts = samplePoints(form.chart(), 24, 8);
  for (int trial = 0; trial < 8; ++trial) {
    std::string text = randomPolynomial(rng, form.chart().coords);
    auto f = makeField(text, form.chart().coords);
    HamiltonianField Xf(form, f);
    for (const Vec& x : pts) {
      Jet j = evalJet(*f, x);
      const double fq = j.gradient[0], fp = j.gradient[1], fz = j.gradient[2];
      const double p = x[1];
      Vec want = makeVec({fp, -(fq - p * fz), j.value - p * fp});
      Vec got = testutil::evalVec(Xf, x);
      CHECK_MESSAGE(testutil::maxAbsDiff(got, want) <= 1e-10, "f = ", text);

      // <alpha, X_f> = f.
      CHECK(alphaPairing(form, got, x) == doctest::Approx(j.value).epsilon(1e-12));
    }
  }
}

TEST_CASE("hamiltonian fields of the round-torus integrals are the angle fields") {
  ContactForm form = formOf("hopf_s3");
  auto f1 = makeField("cos(u)^2", form.chart().coords);
  auto f0 = makeField("sin(u)^2", form.chart().coords);
  HamiltonianField X1(form, f1), X0(form, f0);
  std::vector<Vec> pts = samplePoints(form.chart(), 32, 9);
  for (const Vec& x : pts) {
    CHECK(testutil::maxAbsDiff(testutil::evalVec(X1, x), makeVec({0, 1, 0})) <= 1e-10);
    CHECK(testutil::maxAbsDiff(testutil::evalVec(X0, x), makeVec({0, 0, 1})) <= 1e-10);
  }
}

TEST_CASE("lie derivative of alpha: conformal factor <df, Z>") {
  ContactForm form = formOf("darboux3");
  Rng rng(502);
  std::vector<Vec> pts = samplePoints(form.chart(), 12, 10);
  for (int trial = 0; trial < 6; ++trial) {
    std::string text = randomPolynomial(rng, form.chart().coords);
    auto f = makeField(text, form.chart().coords);
    auto Xf = std::make_shared<HamiltonianField>(form, f);
    for (const Vec& x : pts) {
      std::span<const double> xs(x.data(), 3);
      auto fr = form.frame<double>(xs);
      Jet j = evalJet(*f, x);
      double fZ = 0.0;
      for (int i = 0; i < 3; ++i) fZ += j.gradient[i] * fr.Z[static_cast<size_t>(i)];

      Vec lie = lieDerivativeAlpha(form, *Xf, x);
      Vec want(3);
      for (int i = 0; i < 3; ++i) want[i] = fZ * fr.a[static_cast<size_t>(i)];
      CHECK_MESSAGE(testutil::maxAbsDiff(lie, want) <= 1e-9, "f = ", text);
    }
  }

  // The Reeb flow preserves alpha exactly.
  ReebField Z(form);
  for (const Vec& x : samplePoints(form.chart(), 8, 15)) {
    Vec lie = lieDerivativeAlpha(form, Z, x);
    CHECK(lie.cwiseAbs().maxCoeff() <= 1e-11);
  }
}

TEST_CASE("decomposition into Reeb and horizontal parts") {
  ContactForm form = formOf("sphere_geodesic");
  Rng rng(503);
  std::vector<Vec> pts = samplePoints(form.chart(), 16, 16);
  for (const Vec& x : pts) {
    Vec X(3);
    for (int i = 0; i < 3; ++i) X[i] = rng.uniform(-2.0, 2.0);
    Decomposition dec = decompose(form, X, x);

    // Reassembles, and the horizontal part pairs to zero with alpha.
    ReebResult rr = reeb(form, x);
    Vec back = dec.vertical * rr.Z + dec.horizontal;
    CHECK(testutil::maxAbsDiff(back, X) <= 1e-9);
    CHECK(std::abs(alphaPairing(form, dec.horizontal, x)) <= 1e-10);
    CHECK(dec.vertical == doctest::Approx(alphaPairing(form, X, x)).epsilon(1e-10));
  }
}

TEST_CASE("sharp and flat are mutually inverse on semi-basic forms") {
  ContactForm form = formOf("canonical_r1s0");
  Rng rng(504);
  std::vector<Vec> pts = samplePoints(form.chart(), 16, 17);
  for (const Vec& x : pts) {
    Vec eta(3);
    for (int i = 0; i < 3; ++i) eta[i] = rng.uniform(-1.0, 1.0);
    Vec w = semibasicPart(form, eta, x);

    // Semi-basic: pairs to zero with the Reeb field.
    ReebResult rr = reeb(form, x);
    CHECK(std::abs(w.dot(rr.Z)) <= 1e-10);

    SharpResult sr = sharp(form, w, x);
    CHECK(sr.residual <= 1e-9);
    CHECK(std::abs(alphaPairing(form, sr.v, x)) <= 1e-9);
    Vec back = flat(form, sr.v, x);
    CHECK(testutil::maxAbsDiff(back, w) <= 1e-9);
  }

  // A form with a Reeb component is not in the image of flat; the solve
  // reports a visible residual instead of silently projecting.
  const Vec x = pts.front();
  std::span<const double> xs(x.data(), 3);
  auto fr = form.frame<double>(xs);
  Vec alphaValue(3);
  for (int i = 0; i < 3; ++i) alphaValue[i] = fr.a[static_cast<size_t>(i)];
  SharpResult bad = sharp(form, alphaValue, x);
  CHECK(bad.residual > 0.1);
}

TEST_CASE("semi-basic scan flags Reeb-direction dependence") {
  ContactForm darboux = formOf("darboux3");
  std::vector<Vec> pts = samplePoints(darboux.chart(), 32, 18);

  auto height = makeField("z", darboux.chart().coords);
  SemibasicScan s1 = scanSemibasic(darboux, *height, pts, 1e-8);
  CHECK(!s1.semibasic);
  CHECK(s1.worst == doctest::Approx(1.0).epsilon(1e-12));  // <dz, Z> = 1

  auto momentum = makeField("p", darboux.chart().coords);
  SemibasicScan s2 = scanSemibasic(darboux, *momentum, pts, 1e-8);
  CHECK(s2.semibasic);
  CHECK(s2.worst <= 1e-10);

  ContactForm hopf = formOf("hopf_s3");
  auto f1 = makeField("cos(u)^2", hopf.chart().coords);
  SemibasicScan s3 = scanSemibasic(hopf, *f1, samplePoints(hopf.chart(), 32, 19), 1e-8);
  CHECK(s3.semibasic);
}

TEST_CASE("lie bracket of coordinate rotations") {
  const std::vector<std::string> coords = {"q", "p", "z"};
  ExprVectorField X(ExprList::fromStrings(std::vector<std::string>{"0", "q", "0"}, coords));
  ExprVectorField Y(ExprList::fromStrings(std::vector<std::string>{"p", "0", "0"}, coords));
  Vec x = makeVec({0.3, -1.1, 0.5});
  Vec br = lieBracket(X, Y, x);
  CHECK(testutil::maxAbsDiff(br, makeVec({0.3, 1.1, 0})) <= 1e-14);
}

TEST_CASE("horizontal projection kills the alpha pairing") {
  ContactForm form = formOf("darboux5");
  auto raw = std::make_shared<ExprVectorField>(ExprList::fromStrings(
      std::vector<std::string>{"1", "0", "0", "0", "q1"}, form.chart().coords));
  HorizontalField hor(form, raw);
  for (const Vec& x : samplePoints(form.chart(), 16, 20)) {
    Vec v = testutil::evalVec(hor, x);
    CHECK(std::abs(alphaPairing(form, v, x)) <= 1e-11);
  }
}
