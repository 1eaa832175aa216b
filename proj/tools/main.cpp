#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <memory>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "contactflow/dynamics.hpp"
#include "contactflow/integrability.hpp"
#include "contactflow/systems.hpp"

namespace cf = contactflow;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitInput = 1;
constexpr int kExitVerdict = 2;
constexpr int kExitRuntime = 3;

std::string trim(std::string s) {
  const char* ws = " \t";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

std::vector<std::string> splitList(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(trim(item));
  return out;
}

std::pair<std::string, std::string> splitAssign(const std::string& s) {
  const auto pos = s.find('=');
  if (pos == std::string::npos)
    throw cf::SpecError("expected NAME=VALUE, got '" + s + "'");
  auto name = trim(s.substr(0, pos));
  auto value = trim(s.substr(pos + 1));
  if (name.empty() || value.empty())
    throw cf::SpecError("expected NAME=VALUE, got '" + s + "'");
  return {name, value};
}

double parseDouble(const std::string& s, const std::string& what) {
  try {
    size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw cf::SpecError(what + ": '" + s + "' is not a number");
  }
}

cf::SystemDef loadSystem(const std::string& specPath, const std::string& builtinName) {
  if (!builtinName.empty() && !specPath.empty())
    throw cf::SpecError("give either a spec file or --builtin, not both");
  if (!builtinName.empty()) return cf::SystemDef::builtin(builtinName);
  if (specPath.empty()) throw cf::SpecError("need a spec file or --builtin NAME");
  std::ifstream in(specPath);
  if (!in) throw cf::SpecError("cannot open '" + specPath + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw cf::SpecError("JSON parse error in '" + specPath + "': " + e.what());
  }
  return cf::SystemDef::fromJson(j);
}

std::unique_ptr<const cf::VectorField> flowField(const cf::SystemDef& sys,
                                                 const cf::ContactForm& form,
                                                 bool useReeb, const std::string& fieldName) {
  if (useReeb == !fieldName.empty())
    throw cf::SpecError("choose exactly one of --reeb or --field NAME");
  if (useReeb) return std::make_unique<cf::ReebField>(form);
  return std::make_unique<cf::HamiltonianField>(form, sys.field(fieldName));
}

struct VerifyArgs {
  std::string spec, builtinName;
  std::vector<std::string> addIntegrals;
  int samples = 64;
  uint64_t seed = 0;
};

int cmdVerify(const VerifyArgs& a) {
  cf::SystemDef sys = loadSystem(a.spec, a.builtinName);
  for (const auto& inj : a.addIntegrals) {
    auto [name, expr] = splitAssign(inj);
    sys.addField(name, expr, /*asIntegral=*/true);
  }
  cf::VerifyOptions opt;
  if (a.samples > 0) opt.samples = a.samples;
  opt.seed = a.seed;
  const cf::SystemReport rep = cf::verifySystem(sys, opt);
  std::cout << rep.toJson().dump(2) << "\n";
  return rep.report.verdict() ? kExitPass : kExitVerdict;
}

struct FlowArgs {
  std::string spec, builtinName;
  bool useReeb = false;
  std::string fieldName;
  std::string from;
  double t = 0.0;
  double stride = 0.0;
  double relTol = 1e-10;
  double absTol = 1e-12;
  double maxStep = 0.0;
  std::string out;
  std::string driftOut;
};

int cmdFlow(const FlowArgs& a) {
  const cf::SystemDef sys = loadSystem(a.spec, a.builtinName);
  const cf::ContactForm& form = sys.form();

  const auto parts = splitList(a.from, ',');
  if (static_cast<int>(parts.size()) != sys.chart.dim())
    throw cf::SpecError("--from needs " + std::to_string(sys.chart.dim()) +
                        " comma-separated values");
  cf::Vec x0(sys.chart.dim());
  for (size_t i = 0; i < parts.size(); ++i)
    x0[static_cast<long>(i)] = parseDouble(parts[i], "--from");

  const auto X = flowField(sys, form, a.useReeb, a.fieldName);
  cf::IntegratorConfig cfg;
  cfg.t_end = a.t;
  cfg.rel_tol = a.relTol;
  cfg.abs_tol = a.absTol;
  cfg.max_step = a.maxStep;
  cfg.dense_stride = a.stride;
  const cf::Trajectory tr = cf::flow(*X, x0, cfg, &sys.chart);

  if (a.out.empty()) {
    tr.writeCsv(std::cout);
  } else {
    std::ofstream os(a.out);
    if (!os) throw cf::SpecError("cannot write '" + a.out + "'");
    tr.writeCsv(os);
  }

  nlohmann::json dj;
  dj["system"] = sys.name;
  dj["status"] = tr.status == cf::FlowStatus::Ok          ? "ok"
                 : tr.status == cf::FlowStatus::ChartExit ? "chart_exit"
                                                          : "step_underflow";
  dj["t_end"] = tr.times.empty() ? 0.0 : tr.times.back();
  if (tr.status == cf::FlowStatus::ChartExit) dj["exit_time"] = tr.exit_time;
  const auto ints = sys.integrals();
  nlohmann::json table = nlohmann::json::array();
  for (const auto& [name, drift] :
       cf::monitorInvariants(tr, std::span<const std::pair<std::string, std::shared_ptr<const cf::ScalarField>>>(
                                     ints.data(), ints.size())))
    table.push_back({{"field", name}, {"drift", drift}});
  dj["invariant_drift"] = table;
  if (a.driftOut.empty()) {
    std::cerr << dj.dump(2) << "\n";
  } else {
    std::ofstream os(a.driftOut);
    if (!os) throw cf::SpecError("cannot write '" + a.driftOut + "'");
    os << dj.dump(2) << "\n";
  }
  return tr.status == cf::FlowStatus::Ok ? kExitPass : kExitRuntime;
}

struct ActionsArgs {
  std::string spec, builtinName;
  std::string torus;
  std::string cycles = "auto";
  double t = 40.0;
  int nodes = 256;
};

int cmdActions(const ActionsArgs& a) {
  const cf::SystemDef sys = loadSystem(a.spec, a.builtinName);
  const cf::ContactForm& form = sys.form();
  const cf::Chart& chart = sys.chart;
  const std::vector<int> angleIdx = sys.angleIndices();
  if (angleIdx.empty())
    throw cf::SpecError("system has no angle coordinates; no cycles to integrate");

  cf::Vec base(chart.dim());
  for (int i = 0; i < chart.dim(); ++i) {
    const bool isAngle =
        std::find(angleIdx.begin(), angleIdx.end(), i) != angleIdx.end();
    base[i] = isAngle ? 0.0
                      : 0.5 * (chart.box[static_cast<size_t>(i)][0] +
                               chart.box[static_cast<size_t>(i)][1]);
  }
  nlohmann::json torusJson = nlohmann::json::object();
  if (!a.torus.empty()) {
    for (const auto& item : splitList(a.torus, ',')) {
      auto [name, valueText] = splitAssign(item);
      const auto it = std::find(chart.coords.begin(), chart.coords.end(), name);
      if (it == chart.coords.end())
        throw cf::SpecError("--torus: '" + name + "' is not a chart coordinate");
      const int idx = static_cast<int>(it - chart.coords.begin());
      const double v = parseDouble(valueText, "--torus " + name);
      const auto box = chart.box[static_cast<size_t>(idx)];
      if (!chart.isPeriodic(idx) && (v < box[0] || v > box[1]))
        throw cf::SpecError("--torus: " + name + " = " + valueText +
                            " lies outside its box");
      base[idx] = v;
      torusJson[name] = v;
    }
  }

  std::vector<cf::TorusCycle> cycles;
  if (a.cycles == "auto") {
    for (const int k : angleIdx) cycles.push_back(cf::coordinateCycle(chart, k, base));
  } else {
    std::ifstream in(a.cycles);
    if (!in) throw cf::SpecError("cannot open cycle file '" + a.cycles + "'");
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
      throw cf::SpecError("JSON parse error in '" + a.cycles + "': " + e.what());
    }
    if (!j.is_array()) throw cf::SpecError("cycle file: expected an array of cycles");
    for (const auto& jc : j) {
      cf::TorusCycle c;
      c.label = jc.value("label", std::string("cycle"));
      const auto path = jc.at("path").get<std::vector<std::string>>();
      const std::vector<std::string> par = {"tau"};
      c.path = cf::ExprList::fromStrings(path, par);
      cycles.push_back(std::move(c));
    }
  }

  nlohmann::json out;
  out["system"] = sys.name;
  out["torus"] = torusJson;
  bool ok = true;

  nlohmann::json actions = nlohmann::json::array();
  std::vector<double> actionValues;
  for (const auto& c : cycles) {
    const cf::ActionResult r = cf::actionIntegral(form, c, a.nodes);
    if (!r.closed)
      throw cf::SpecError("cycle '" + c.label + "' is not closed (gap " +
                          std::to_string(r.closure_error) + ")");
    if (r.error_bound > sys.tol.action) ok = false;
    actions.push_back({{"cycle", c.label},
                       {"value", r.value},
                       {"error_bound", r.error_bound}});
    actionValues.push_back(r.value);
  }
  out["actions"] = actions;

  const auto X = flowField(sys, form, sys.hamiltonianName == "1",
                           sys.hamiltonianName == "1" ? std::string() : sys.hamiltonianName);
  const cf::RotationEstimate est = cf::rotationNumbersAuto(
      *X, base, a.t, chart, std::span<const int>(angleIdx.data(), angleIdx.size()));
  out["rotation_numbers"] = std::vector<double>(est.omega.data(),
                                                est.omega.data() + est.omega.size());
  out["rotation_fit_residual"] = est.residual;
  if (!est.linear) ok = false;

  if (a.cycles == "auto" && sys.hamiltonianName == "1" && !sys.canonical.empty() &&
      !sys.canonical.y0.empty() &&
      angleIdx.size() == sys.canonical.actionNames.size() + 1) {
    const long r = static_cast<long>(sys.canonical.actionNames.size());
    cf::Vec y(r);
    for (long k = 0; k < r; ++k) y[k] = actionValues[static_cast<size_t>(k + 1)];
    const cf::ExprScalarField y0f(cf::parse(sys.canonical.y0, sys.canonical.actionNames),
                                  sys.canonical.y0);
    const cf::Jet jy = cf::evalJet(y0f, y);
    const cf::FrequencyResult fr = cf::reebFrequencyConstraints(jy.value, y, jy.gradient);
    nlohmann::json freq;
    freq["z"] = std::vector<double>(fr.z.data(), fr.z.data() + fr.z.size());
    freq["singular"] = fr.singular;
    out["frequencies"] = freq;
    if (fr.singular) {
      ok = false;
    } else {
      const double freqDiff = (est.omega - fr.z).cwiseAbs().maxCoeff();
      const double y0Diff = std::abs(actionValues[0] - jy.value);
      out["cross_check"] = {{"max_frequency_difference", freqDiff},
                            {"theta0_action_vs_y0", y0Diff}};
      if (freqDiff > sys.tol.rotation || y0Diff > sys.tol.action) ok = false;
    }
  }

  out["verdict"] = ok;
  std::cout << out.dump(2) << "\n";
  return ok ? kExitPass : kExitVerdict;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Chart-based toolkit for contact forms, Reeb flows and invariant tori"};
  app.require_subcommand(1);

  VerifyArgs va;
  auto* verify = app.add_subcommand(
      "verify", "Run the structural checks a system declares and report JSON");
  verify->add_option("spec", va.spec, "JSON system description");
  verify->add_option("--builtin", va.builtinName, "built-in system name");
  verify->add_option("--add-integral", va.addIntegrals,
                     "inject NAME=EXPR as an additional declared integral");
  verify->add_option("--samples", va.samples, "sample-point count (default 64)");
  verify->add_option("--seed", va.seed, "override the sampling seed");

  FlowArgs fa;
  auto* flowCmd = app.add_subcommand("flow", "Integrate a flow and write a CSV trajectory");
  flowCmd->add_option("spec", fa.spec, "JSON system description");
  flowCmd->add_option("--builtin", fa.builtinName, "built-in system name");
  flowCmd->add_flag("--reeb", fa.useReeb, "integrate the Reeb field");
  flowCmd->add_option("--field", fa.fieldName,
                      "integrate the hamiltonian field of this scalar");
  flowCmd->add_option("--from", fa.from, "initial point, comma-separated")->required();
  flowCmd->add_option("--t", fa.t, "integration time")->required();
  flowCmd->add_option("--stride", fa.stride, "output sample stride (default t/256)");
  flowCmd->add_option("--rel-tol", fa.relTol, "relative step tolerance");
  flowCmd->add_option("--abs-tol", fa.absTol, "absolute step tolerance");
  flowCmd->add_option("--max-step", fa.maxStep, "largest step size (default t/10)");
  flowCmd->add_option("--out", fa.out, "CSV output path (default stdout)");
  flowCmd->add_option("--drift-out", fa.driftOut,
                      "invariant-drift JSON path (default stderr)");

  ActionsArgs aa;
  auto* actions = app.add_subcommand(
      "actions", "Cycle actions, constraint frequencies and rotation numbers");
  actions->add_option("spec", aa.spec, "JSON system description");
  actions->add_option("--builtin", aa.builtinName, "built-in system name");
  actions->add_option("--torus", aa.torus,
                      "torus location as NAME=VALUE[,NAME=VALUE...] chart coordinates");
  actions->add_option("--cycles", aa.cycles, "'auto' or a JSON cycle file");
  actions->add_option("--t", aa.t, "flow time for the rotation-number fit");
  actions->add_option("--nodes", aa.nodes, "quadrature nodes per cycle");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitPass : kExitInput;
  }

  try {
    if (verify->parsed()) return cmdVerify(va);
    if (flowCmd->parsed()) return cmdFlow(fa);
    if (actions->parsed()) return cmdActions(aa);
    std::cerr << "error: no subcommand\n";
    return kExitInput;
  } catch (const cf::SpecError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const cf::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const cf::EvalError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}
