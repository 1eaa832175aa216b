#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "contactflow/jacobi.hpp"
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

// Closed form of the bracket on the (q, p, z) darboux chart:
// [f,g] = f_p g_q - f_q g_p + p (f_z g_p - f_p g_z) + f g_z - g f_z.
double darbouxBracket(const ScalarField& f, const ScalarField& g, const Vec& x) {
  Jet jf = evalJet(f, x);
  Jet jg = evalJet(g, x);
  const double p = x[1];
  const double fq = jf.gradient[0], fp = jf.gradient[1], fz = jf.gradient[2];
  const double gq = jg.gradient[0], gp = jg.gradient[1], gz = jg.gradient[2];
  return fp * gq - fq * gp + p * (fz * gp - fp * gz) + jf.value * gz - jg.value * fz;
}

}  // namespace

TEST_CASE("bracket on the darboux chart matches the closed form, both routes") {
  ContactForm form = formOf("darboux3");
  Rng rng(601);
  std::vector<Vec> pts = samplePoints(form.chart(), 32, 21);
  for (int trial = 0; trial < 10; ++trial) {
    std::string ft = randomPolynomial(rng, form.chart().coords);
    std::string gt = randomPolynomial(rng, form.chart().coords);
    auto f = makeField(ft, form.chart().coords);
    auto g = makeField(gt, form.chart().coords);
    for (const Vec& x : pts) {
      const double want = darbouxBracket(*f, *g, x);
      BracketEval br = jacobiBracket(form, *f, *g, x);
      CHECK_MESSAGE(std::abs(br.value - want) <= 1e-9, "f = ", ft, "; g = ", gt);
      CHECK(std::abs(br.alt - want) <= 1e-9);
      CHECK(br.mismatch() <= 1e-10);
    }
  }

  // Hand-checkable pairs.
  auto q = makeField("q", form.chart().coords);
  auto p = makeField("p", form.chart().coords);
  auto one = makeField("1", form.chart().coords);
  Vec x(3);
  x << 0.4, -1.2, 0.3;
  CHECK(jacobiBracket(form, *q, *p, x).value == doctest::Approx(-1.0).epsilon(1e-12));
  // [1, g] = <dg, Z> = g_z for g = q p.
  auto gp = makeField("q*p", form.chart().coords);
  CHECK(std::abs(jacobiBracket(form, *one, *gp, x).value) <= 1e-12);
}

TEST_CASE("bracket is antisymmetric to roundoff") {
  ContactForm form = formOf("darboux3");
  Rng rng(602);
  std::vector<Vec> pts = samplePoints(form.chart(), 64, 22);
  for (int trial = 0; trial < 5; ++trial) {
    auto f = makeField(randomPolynomial(rng, form.chart().coords), form.chart().coords);
    auto g = makeField(randomPolynomial(rng, form.chart().coords), form.chart().coords);
    for (const Vec& x : pts) {
      const double fg = jacobiBracket(form, *f, *g, x).value;
      const double gf = jacobiBracket(form, *g, *f, x).value;
      CHECK(std::abs(fg + gf) <= 1e-12);
      CHECK(std::abs(jacobiBracket(form, *f, *f, x).value) <= 1e-12);
    }
  }
}

TEST_CASE("bracket satisfies the Jacobi identity") {
  ContactForm form = formOf("darboux3");
  Rng rng(603);
  std::vector<Vec> pts = samplePoints(form.chart(), 16, 23);
  for (int trial = 0; trial < 10; ++trial) {
    auto f = makeField(randomPolynomial(rng, form.chart().coords), form.chart().coords);
    auto g = makeField(randomPolynomial(rng, form.chart().coords), form.chart().coords);
    auto h = makeField(randomPolynomial(rng, form.chart().coords), form.chart().coords);

    BracketField gh(form, g, h);
    BracketField hf(form, h, f);
    BracketField fg(form, f, g);
    for (const Vec& x : pts) {
      const double cyc = jacobiBracket(form, *f, gh, x).value +
                         jacobiBracket(form, *g, hf, x).value +
                         jacobiBracket(form, *h, fg, x).value;
      CHECK(std::abs(cyc) <= 1e-6);
    }
  }
}

TEST_CASE("bracket field refuses a second nesting level") {
  ContactForm form = formOf("darboux3");
  auto f = makeField("q", form.chart().coords);
  auto g = makeField("p*z", form.chart().coords);
  BracketField br(form, f, g);
  std::vector<Dual2> x(3, Dual2(0.0));
  CHECK_THROWS_AS(br.eval(std::span<const Dual2>(x.data(), x.size())),
                  std::logic_error);
}

TEST_CASE("f -> X_f carries the bracket to the Lie bracket") {
  Rng rng(604);
  for (const char* name : {"darboux3", "darboux5"}) {
    ContactForm form = formOf(name);
    std::vector<Vec> pts = samplePoints(form.chart(), 16, 24);
    for (int trial = 0; trial < 3; ++trial) {
      auto f = makeField(randomPolynomial(rng, form.chart().coords), form.chart().coords);
      auto g = makeField(randomPolynomial(rng, form.chart().coords), form.chart().coords);

      CheckReport iso = checkIsomorphism(form, *f, *g, pts, 1e-6);
      REQUIRE(iso.find("bracket_isomorphism") != nullptr);
      CHECK(iso.verdict());
      CHECK(iso.find("bracket_isomorphism")->worst_residual <= 1e-6);

      CheckReport der = checkDerivation(form, *f, *g, pts, 1e-7);
      REQUIRE(der.find("bracket_derivation") != nullptr);
      CHECK(der.verdict());
    }
  }
}

TEST_CASE("involution equivalences on the round torus chart") {
  ContactForm form = formOf("hopf_s3");
  std::vector<Vec> pts = samplePoints(form.chart(), 32, 25);
  BracketConfig cfg;

  auto f1 = makeField("cos(u)^2", form.chart().coords);

  SUBCASE("semi-basic pair with vanishing brackets: all legs zero") {
    auto h = makeField("sin(u)", form.chart().coords);
    CheckReport rep = involutionEquivalences(form, *f1, *h, pts, cfg);
    CHECK(rep.verdict());
    REQUIRE(rep.find("zero_legs_consistent") != nullptr);
    CHECK(rep.find("zero_legs_consistent")->worst_residual <= 1e-10);
    CHECK(rep.find("bracket_routes_agree")->pass);
    CHECK(rep.find("semibasic_inputs")->pass);
  }

  SUBCASE("semi-basic pair with persistent brackets: all legs nonzero") {
    auto g = makeField("sin(th1 - th2)", form.chart().coords);
    CheckReport rep = involutionEquivalences(form, *f1, *g, pts, cfg);
    CHECK(rep.verdict());
    REQUIRE(rep.find("zero_legs_consistent") != nullptr);
    // X_{f1} = d/d.theta1, so the bracket is cos(th1 - th2): order one.
    CHECK(rep.find("zero_legs_consistent")->worst_residual > 0.1);
    CHECK(rep.find("zero_legs_consistent")->pass);
    CHECK(rep.find("bracket_routes_agree")->pass);
  }

  SUBCASE("non-semi-basic input short-circuits") {
    auto bad = makeField("sin(th1)", form.chart().coords);
    CheckReport rep = involutionEquivalences(form, *f1, *bad, pts, cfg);
    CHECK(!rep.verdict());
    REQUIRE(rep.find("semibasic_inputs") != nullptr);
    CHECK(!rep.find("semibasic_inputs")->pass);
    CHECK(rep.find("semibasic_inputs")->detail.find("not evaluated") != std::string::npos);
    CHECK(rep.find("bracket_routes_agree") == nullptr);
  }
}

TEST_CASE("bivector agrees with the bracket minus its conformal tail") {
  ContactForm form = formOf("canonical_r1s0");
  Rng rng(605);
  std::vector<Vec> pts = samplePoints(form.chart(), 16, 26);
  auto f = makeField("sin(th0)*y1", form.chart().coords);
  auto g = makeField("cos(th1) + y1^2", form.chart().coords);
  for (const Vec& x : pts) {
    Jet jf = evalJet(*f, x);
    Jet jg = evalJet(*g, x);
    ReebResult rr = reeb(form, x);
    const double fZ = jf.gradient.dot(rr.Z);
    const double gZ = jg.gradient.dot(rr.Z);

    BracketEval br = jacobiBracket(form, *f, *g, x);
    const double lambda = bivector(form, jf.gradient, jg.gradient, x);
    const double tail = jf.value * gZ - jg.value * fZ;
    CHECK(std::abs(br.alt - (lambda + tail)) <= 1e-9);
  }
}

TEST_CASE("control pair on the five-dimensional chart: the isotropy identity") {
  // u = d/d.q1 - p1 d/d.z is horizontal; v = d/d.p1 is not related to it by
  // a symmetry: d.alpha(u, v) = -1 while [u, v] = d/d.z pairs to +1.
  ContactForm form = formOf("darboux5");
  const auto& coords = form.chart().coords;
  ExprVectorField u(ExprList::fromStrings(
      std::vector<std::string>{"1", "0", "0", "0", "-p1"}, coords));
  ExprVectorField v(ExprList::fromStrings(
      std::vector<std::string>{"0", "0", "1", "0", "0"}, coords));

  std::vector<Vec> pts = samplePoints(form.chart(), 16, 27);
  for (const Vec& x : pts) {
    std::span<const double> xs(x.data(), static_cast<size_t>(x.size()));
    auto fr = form.frame<double>(xs);
    SVec<double> uv = u.eval(xs), vv = v.eval(xs);
    CHECK(quadForm(fr.A, uv, vv) == doctest::Approx(-1.0).epsilon(1e-12));

    Vec br = lieBracket(u, v, x);
    Vec ez(5);
    ez << 0, 0, 0, 0, 1;
    CHECK(testutil::maxAbsDiff(br, ez) <= 1e-12);
    CHECK(alphaPairing(form, br, x) == doctest::Approx(1.0).epsilon(1e-12));
  }

  // Commuting horizontal pair: both sides vanish.
  ExprVectorField w(ExprList::fromStrings(
      std::vector<std::string>{"0", "1", "0", "0", "-p2"}, coords));
  for (const Vec& x : pts) {
    std::span<const double> xs(x.data(), static_cast<size_t>(x.size()));
    auto fr = form.frame<double>(xs);
    CHECK(std::abs(quadForm(fr.A, u.eval(xs), w.eval(xs))) <= 1e-12);
    CHECK(lieBracket(u, w, x).cwiseAbs().maxCoeff() <= 1e-12);
  }
}
