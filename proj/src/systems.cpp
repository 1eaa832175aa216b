#include "contactflow/systems.hpp"

#include <algorithm>

namespace contactflow {

nlohmann::json ToleranceSet::toJson() const {
  nlohmann::json j;
  j["reeb"] = reeb;
  j["semibasic"] = semibasic;
  j["involution"] = involution;
  j["bracket_cross"] = bracket_cross;
  j["rank_ratio"] = rank_ratio;
  j["drift"] = drift;
  j["pullback"] = pullback;
  j["rotation"] = rotation;
  j["action"] = action;
  j["isomorphism"] = isomorphism;
  j["derivation"] = derivation;
  j["jacobi_identity"] = jacobi_identity;
  j["antisymmetry"] = antisymmetry;
  j["degenerate"] = degenerate;
  return j;
}

ToleranceSet ToleranceSet::fromJson(const nlohmann::json& j) {
  ToleranceSet t;
  auto grab = [&](const char* key, double& slot) {
    if (auto it = j.find(key); it != j.end()) {
      if (!it->is_number()) throw SpecError(std::string("tolerances.") + key + ": expected a number");
      slot = it->get<double>();
    }
  };
  grab("reeb", t.reeb);
  grab("semibasic", t.semibasic);
  grab("involution", t.involution);
  grab("bracket_cross", t.bracket_cross);
  grab("rank_ratio", t.rank_ratio);
  grab("drift", t.drift);
  grab("pullback", t.pullback);
  grab("rotation", t.rotation);
  grab("action", t.action);
  grab("isomorphism", t.isomorphism);
  grab("derivation", t.derivation);
  grab("jacobi_identity", t.jacobi_identity);
  grab("antisymmetry", t.antisymmetry);
  grab("degenerate", t.degenerate);
  return t;
}

namespace {

/// Parse every expression in the definition so malformed input fails at load
/// time with a path-qualified message.
void validateSystem(const SystemDef& sys) {
  sys.chart.validate();
  if (sys.chart.dim() % 2 == 0)
    throw SpecError("chart: contact charts need odd dimension");
  if (sys.alphaText.size() != static_cast<size_t>(sys.chart.dim()))
    throw SpecError("alpha: expected one coefficient per coordinate");
  auto tryParse = [&](const std::string& path, const std::string& text) {
    try {
      parse(text, sys.chart.coords);
    } catch (const ParseError& e) {
      throw SpecError(path + ": " + e.what());
    }
  };
  for (size_t i = 0; i < sys.alphaText.size(); ++i)
    tryParse("alpha[" + std::to_string(i) + "]", sys.alphaText[i]);
  for (const auto& [name, text] : sys.fieldText) tryParse("fields." + name, text);
  for (const auto& [name, comps] : sys.symmetryText) {
    if (comps.size() != static_cast<size_t>(sys.chart.dim()))
      throw SpecError("symmetries." + name + ": expected one component per coordinate");
    for (size_t i = 0; i < comps.size(); ++i)
      tryParse("symmetries." + name + "[" + std::to_string(i) + "]", comps[i]);
  }
  auto hasField = [&](const std::string& n) {
    return std::any_of(sys.fieldText.begin(), sys.fieldText.end(),
                       [&](const auto& p) { return p.first == n; });
  };
  for (const auto& n : sys.integralNames)
    if (!hasField(n)) throw SpecError("integrals: '" + n + "' is not a declared field");
  if (sys.hamiltonianName != "1" && !hasField(sys.hamiltonianName))
    throw SpecError("hamiltonian: '" + sys.hamiltonianName + "' is not a declared field");
  if (sys.r < 0 || sys.r > (sys.chart.dim() - 1) / 2)
    throw SpecError("r: must lie in [0, n]");
  if (!sys.canonical.empty()) {
    for (const auto& a : sys.canonical.angles) {
      auto it = std::find(sys.chart.coords.begin(), sys.chart.coords.end(), a);
      if (it == sys.chart.coords.end())
        throw SpecError("canonical.angles: '" + a + "' is not a chart coordinate");
      if (!sys.chart.isPeriodic(static_cast<int>(it - sys.chart.coords.begin())))
        throw SpecError("canonical.angles: '" + a + "' is not periodic");
    }
    if (!sys.canonical.y0.empty()) {
      try {
        parse(sys.canonical.y0, sys.canonical.actionNames);
      } catch (const ParseError& e) {
        throw SpecError(std::string("canonical.y0: ") + e.what());
      }
    }
  }
}

}  // namespace

const ContactForm& SystemDef::form() const {
  if (!form_)
    form_ = std::make_shared<const ContactForm>(
        chart, ExprList::fromStrings(alphaText, chart.coords));
  return *form_;
}

std::shared_ptr<const ScalarField> SystemDef::field(const std::string& fieldName) const {
  for (const auto& [n, text] : fieldText)
    if (n == fieldName)
      return std::make_shared<ExprScalarField>(parse(text, chart.coords), text);
  throw SpecError("unknown field '" + fieldName + "'");
}

std::shared_ptr<const ScalarField> SystemDef::hamiltonian() const {
  if (hamiltonianName == "1") return nullptr;
  return field(hamiltonianName);
}

std::vector<std::pair<std::string, std::shared_ptr<const ScalarField>>>
SystemDef::integrals() const {
  std::vector<std::pair<std::string, std::shared_ptr<const ScalarField>>> out;
  out.reserve(integralNames.size());
  for (const auto& n : integralNames) out.emplace_back(n, field(n));
  return out;
}

std::vector<std::pair<std::string, std::shared_ptr<const VectorField>>>
SystemDef::symmetries() const {
  std::vector<std::pair<std::string, std::shared_ptr<const VectorField>>> out;
  out.reserve(symmetryText.size());
  for (const auto& [n, comps] : symmetryText)
    out.emplace_back(n, std::make_shared<ExprVectorField>(
                            ExprList::fromStrings(comps, chart.coords)));
  return out;
}

std::vector<int> SystemDef::angleIndices() const {
  std::vector<int> out;
  if (!canonical.empty()) {
    for (const auto& a : canonical.angles) {
      auto it = std::find(chart.coords.begin(), chart.coords.end(), a);
      out.push_back(static_cast<int>(it - chart.coords.begin()));
    }
    return out;
  }
  for (int i = 0; i < chart.dim(); ++i)
    if (chart.isPeriodic(i)) out.push_back(i);
  return out;
}

void SystemDef::addField(const std::string& fieldName, const std::string& expression,
                         bool asIntegral) {
  try {
    parse(expression, chart.coords);
  } catch (const ParseError& e) {
    throw SpecError("fields." + fieldName + ": " + e.what());
  }
  for (auto& [n, text] : fieldText)
    if (n == fieldName) {
      text = expression;
      if (asIntegral &&
          std::find(integralNames.begin(), integralNames.end(), fieldName) ==
              integralNames.end())
        integralNames.push_back(fieldName);
      return;
    }
  fieldText.emplace_back(fieldName, expression);
  if (asIntegral) integralNames.push_back(fieldName);
}

nlohmann::json SystemDef::toJson() const {
  nlohmann::json j;
  j["version"] = 1;
  j["name"] = name;
  nlohmann::json jc;
  jc["coords"] = chart.coords;
  jc["periodic"] = chart.periodic.empty()
                       ? std::vector<bool>(chart.coords.size(), false)
                       : chart.periodic;
  jc["box"] = chart.box;
  if (!chart.domain.empty()) jc["domain"] = chart.domain;
  jc["margin"] = chart.margin;
  j["chart"] = jc;
  j["alpha"] = alphaText;
  nlohmann::json jf = nlohmann::json::object();
  for (const auto& [n, text] : fieldText) jf[n] = text;
  j["fields"] = jf;
  j["integrals"] = integralNames;
  j["r"] = r;
  j["hamiltonian"] = hamiltonianName;
  if (!symmetryText.empty()) {
    nlohmann::json js = nlohmann::json::object();
    for (const auto& [n, comps] : symmetryText) js[n] = comps;
    j["symmetries"] = js;
  }
  if (!canonical.empty()) {
    nlohmann::json jk;
    jk["angles"] = canonical.angles;
    jk["actions"] = canonical.actionNames;
    jk["y0"] = canonical.y0;
    j["canonical"] = jk;
  }
  j["tolerances"] = tol.toJson();
  j["seed"] = seed;
  return j;
}

namespace {

const nlohmann::json& need(const nlohmann::json& j, const char* key, const char* path) {
  auto it = j.find(key);
  if (it == j.end()) throw SpecError(std::string(path) + ": missing required key '" + key + "'");
  return *it;
}

}  // namespace

SystemDef SystemDef::fromJson(const nlohmann::json& j) {
  if (!j.is_object()) throw SpecError("spec: expected a JSON object");
  const auto& ver = need(j, "version", "spec");
  if (!ver.is_number_integer() || ver.get<int>() != 1)
    throw SpecError("version: expected the integer 1");

  SystemDef sys;
  if (j.contains("name")) sys.name = j["name"].get<std::string>();

  const auto& jc = need(j, "chart", "spec");
  if (!jc.is_object()) throw SpecError("chart: expected an object");
  const auto& coords = need(jc, "coords", "chart");
  if (!coords.is_array() || coords.empty())
    throw SpecError("chart.coords: expected a non-empty array of names");
  sys.chart.coords = coords.get<std::vector<std::string>>();
  const auto& box = need(jc, "box", "chart");
  try {
    sys.chart.box = box.get<std::vector<std::array<double, 2>>>();
  } catch (const nlohmann::json::exception&) {
    throw SpecError("chart.box: expected an array of [lo, hi] pairs");
  }
  if (jc.contains("periodic")) sys.chart.periodic = jc["periodic"].get<std::vector<bool>>();
  if (jc.contains("domain"))
    sys.chart.domain = jc["domain"].get<std::vector<std::array<double, 2>>>();
  if (jc.contains("margin")) sys.chart.margin = jc["margin"].get<double>();

  const auto& alpha = need(j, "alpha", "spec");
  if (!alpha.is_array()) throw SpecError("alpha: expected an array of expressions");
  sys.alphaText = alpha.get<std::vector<std::string>>();

  if (j.contains("fields")) {
    if (!j["fields"].is_object()) throw SpecError("fields: expected an object");
    for (const auto& [key, val] : j["fields"].items()) {
      if (!val.is_string()) throw SpecError("fields." + key + ": expected an expression string");
      sys.fieldText.emplace_back(key, val.get<std::string>());
    }
  }
  if (j.contains("integrals"))
    sys.integralNames = j["integrals"].get<std::vector<std::string>>();
  if (j.contains("r")) sys.r = j["r"].get<int>();
  if (j.contains("hamiltonian")) sys.hamiltonianName = j["hamiltonian"].get<std::string>();
  if (j.contains("symmetries")) {
    if (!j["symmetries"].is_object()) throw SpecError("symmetries: expected an object");
    for (const auto& [key, val] : j["symmetries"].items())
      sys.symmetryText.emplace_back(key, val.get<std::vector<std::string>>());
  }
  if (j.contains("canonical")) {
    const auto& jk = j["canonical"];
    sys.canonical.angles = need(jk, "angles", "canonical").get<std::vector<std::string>>();
    sys.canonical.actionNames = need(jk, "actions", "canonical").get<std::vector<std::string>>();
    sys.canonical.y0 = need(jk, "y0", "canonical").get<std::string>();
  }
  if (j.contains("tolerances")) sys.tol = ToleranceSet::fromJson(j["tolerances"]);
  if (j.contains("seed")) sys.seed = j["seed"].get<uint64_t>();

  validateSystem(sys);
  return sys;
}

namespace {

SystemDef makeDarboux3() {
  SystemDef s;
  s.name = "darboux3";
  s.chart.coords = {"q", "p", "z"};
  s.chart.box = {{{-2, 2}}, {{-2, 2}}, {{-2, 2}}};
  s.alphaText = {"p", "0", "1"};  // dz + p dq
  s.fieldText = {{"Xp", "p"}, {"height", "z"}};
  s.seed = 101;
  return s;
}

SystemDef makeDarboux5() {
  SystemDef s;
  s.name = "darboux5";
  s.chart.coords = {"q1", "q2", "p1", "p2", "z"};
  s.chart.box = {{{-2, 2}}, {{-2, 2}}, {{-2, 2}}, {{-2, 2}}, {{-2, 2}}};
  s.alphaText = {"p1", "p2", "0", "0", "1"};  // dz + p1 dq1 + p2 dq2
  s.symmetryText = {{"slide1", {"1", "0", "0", "0", "-p1"}},
                    {"slide2", {"0", "1", "0", "0", "-p2"}}};
  s.seed = 102;
  return s;
}

SystemDef makeHopf() {
  const double pi = 3.14159265358979323846;
  SystemDef s;
  s.name = "hopf_s3";
  s.chart.coords = {"u", "th1", "th2"};
  s.chart.periodic = {false, true, true};
  s.chart.box = {{{0.0, pi / 2}}, {{0.0, 2 * pi}}, {{0.0, 2 * pi}}};
  s.alphaText = {"0", "cos(u)^2", "sin(u)^2"};
  s.fieldText = {{"f1", "cos(u)^2"}};
  s.integralNames = {"f1"};
  s.r = 1;
  s.symmetryText = {{"rot1", {"0", "1", "0"}}};
  // In action coordinates the th1-action is y1 = cos(u)^2 and the
  // th2-action is y0 = sin(u)^2 = 1 - y1, so th2 plays the theta0 role.
  s.canonical.angles = {"th2", "th1"};
  s.canonical.actionNames = {"y1"};
  s.canonical.y0 = "1 - y1";
  s.seed = 103;
  return s;
}

SystemDef makeCanonicalR1S0() {
  const double pi = 3.14159265358979323846;
  SystemDef s;
  s.name = "canonical_r1s0";
  s.chart.coords = {"th0", "th1", "y1"};
  s.chart.periodic = {true, true, false};
  s.chart.box = {{{0.0, 2 * pi}}, {{0.0, 2 * pi}}, {{0.25, 1.5}}};
  s.alphaText = {"1 - y1^2", "y1", "0"};
  s.fieldText = {{"f1", "y1"}};
  s.integralNames = {"f1"};
  s.r = 1;
  s.canonical.angles = {"th0", "th1"};
  s.canonical.actionNames = {"y1"};
  s.canonical.y0 = "1 - y1^2";
  s.seed = 104;
  return s;
}

SystemDef makeCanonicalR1S1() {
  const double pi = 3.14159265358979323846;
  SystemDef s;
  s.name = "canonical_r1s1";
  s.chart.coords = {"th0", "th1", "y1", "x1", "x2"};
  s.chart.periodic = {true, true, false, false, false};
  s.chart.box = {{{0.0, 2 * pi}}, {{0.0, 2 * pi}}, {{0.25, 1.5}}, {{-1, 1}}, {{-1, 1}}};
  s.alphaText = {"1 - y1^2", "y1", "0", "x2", "0"};
  s.fieldText = {{"f1", "y1"}, {"f2", "x1"}, {"f3", "x2"}};
  s.integralNames = {"f1", "f2", "f3"};
  s.r = 1;
  s.canonical.angles = {"th0", "th1"};
  s.canonical.actionNames = {"y1"};
  s.canonical.y0 = "1 - y1^2";
  s.seed = 105;
  return s;
}

SystemDef makeSphereGeodesic() {
  const double pi = 3.14159265358979323846;
  SystemDef s;
  s.name = "sphere_geodesic";
  s.chart.coords = {"phi", "theta", "psi"};
  s.chart.periodic = {true, false, true};
  // The sampling box keeps |Lz| = |sin(psi) sin(theta)| well away from zero,
  // so Reeb orbits (great circles) stay clear of the coordinate poles; the
  // wider domain is what those orbits actually explore.
  s.chart.box = {{{0.0, 2 * pi}}, {{0.8, 2.34}}, {{0.5, 1.1}}};
  s.chart.domain = {{{0.0, 2 * pi}}, {{0.05, pi - 0.05}}, {{0.0, 2 * pi}}};
  // Pullback of the round-metric momentum form to the unit cosphere chart:
  // psi parametrizes the unit covector (cos psi) d.theta + (sin psi sin theta) d.phi.
  s.alphaText = {"sin(psi)*sin(theta)", "cos(psi)", "0"};
  s.fieldText = {{"Lz", "sin(psi)*sin(theta)"},
                 {"Lx", "-(sin(phi)*cos(psi)) - cos(phi)*cos(theta)*sin(psi)"}};
  s.integralNames = {"Lz", "Lx"};
  s.r = 0;
  s.seed = 106;
  return s;
}

}  // namespace

SystemDef SystemDef::builtin(const std::string& builtinName) {
  SystemDef s;
  if (builtinName == "darboux3") s = makeDarboux3();
  else if (builtinName == "darboux5") s = makeDarboux5();
  else if (builtinName == "hopf_s3") s = makeHopf();
  else if (builtinName == "canonical_r1s0") s = makeCanonicalR1S0();
  else if (builtinName == "canonical_r1s1") s = makeCanonicalR1S1();
  else if (builtinName == "sphere_geodesic") s = makeSphereGeodesic();
  else throw SpecError("unknown builtin system '" + builtinName + "'");
  validateSystem(s);
  return s;
}

std::vector<std::string> SystemDef::builtinNames() {
  return {"darboux3", "darboux5", "hopf_s3", "canonical_r1s0", "canonical_r1s1",
          "sphere_geodesic"};
}

}  // namespace contactflow
