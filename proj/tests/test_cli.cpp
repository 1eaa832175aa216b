#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "contactflow/systems.hpp"
#include "helpers.hpp"

using nlohmann::json;
using testutil::runCli;

namespace {

// Last row of a CSV trajectory as numbers.
std::vector<double> lastCsvRow(const std::string& csv, std::string* header = nullptr) {
  std::istringstream in(csv);
  std::string line, last, first;
  std::getline(in, first);
  if (header) *header = first;
  while (std::getline(in, line))
    if (!line.empty()) last = line;
  std::vector<double> row;
  std::istringstream ls(last);
  std::string cell;
  while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
  return row;
}

size_t csvRowCount(const std::string& csv) {
  std::istringstream in(csv);
  std::string line;
  size_t rows = 0;
  while (std::getline(in, line))
    if (!line.empty()) ++rows;
  return rows;  // includes the header
}

}  // namespace

TEST_CASE("verify: bundled systems pass and print a full report") {
  auto r = runCli("verify --builtin hopf_s3");
  CHECK(r.code == 0);
  json j = json::parse(r.out);
  CHECK(j.at("verdict") == true);
  CHECK(j.at("meta").at("system") == "hopf_s3");
  CHECK(j.at("meta").at("samples") == 64);
  bool sawReeb = false;
  for (const auto& c : j.at("conditions"))
    if (c.at("condition") == "reeb_residual") {
      sawReeb = true;
      CHECK(c.at("pass") == true);
      CHECK(c.at("worst_residual").get<double>() <= 1e-9);
      CHECK(c.at("worst_point").size() == 3);
    }
  CHECK(sawReeb);
}

TEST_CASE("verify: runs are deterministic byte for byte") {
  auto a = runCli("verify --builtin canonical_r1s0");
  auto b = runCli("verify --builtin canonical_r1s0");
  CHECK(a.code == 0);
  CHECK(a.out == b.out);

  // A different seed changes the sample set but not the verdict.
  auto c = runCli("verify --builtin canonical_r1s0 --seed 999");
  CHECK(c.code == 0);
  CHECK(c.out != a.out);
}

TEST_CASE("verify: injected dependent integral flips the verdict, exit 2") {
  auto r = runCli("verify --builtin hopf_s3 --add-integral \"f1_sq = (cos(u)^2)^2\"");
  CHECK(r.code == 2);
  json j = json::parse(r.out);
  CHECK(j.at("verdict") == false);
  bool countFailed = false, rankFailed = false;
  for (const auto& c : j.at("conditions")) {
    if (c.at("condition") == "integral_count" && c.at("pass") == false)
      countFailed = true;
    if (c.at("condition") == "independence" && c.at("pass") == false) {
      rankFailed = true;
      CHECK(c.at("detail").get<std::string>().find("singular values") !=
            std::string::npos);
    }
  }
  CHECK(countFailed);
  CHECK(rankFailed);
}

TEST_CASE("verify: spec files load identically to their builtin source") {
  contactflow::SystemDef sys = contactflow::SystemDef::builtin("canonical_r1s0");
  {
    std::ofstream f("spec_roundtrip.json");
    f << sys.toJson().dump(2) << "\n";
  }
  auto viaFile = runCli("verify spec_roundtrip.json");
  auto viaName = runCli("verify --builtin canonical_r1s0");
  CHECK(viaFile.code == 0);
  CHECK(viaFile.out == viaName.out);
  std::remove("spec_roundtrip.json");
}

TEST_CASE("verify: input errors exit 1 with a path-naming message") {
  auto missing = runCli("verify no_such_file.json");
  CHECK(missing.code == 1);

  {
    json j = contactflow::SystemDef::builtin("darboux3").toJson();
    j.erase("alpha");
    std::ofstream f("spec_broken.json");
    f << j.dump(2) << "\n";
  }
  auto broken = runCli("verify spec_broken.json");
  CHECK(broken.code == 1);
  CHECK(broken.err.find("alpha") != std::string::npos);
  std::remove("spec_broken.json");

  auto both = runCli("verify --builtin hopf_s3 --add-integral \"oops\"");
  CHECK(both.code == 1);

  auto neither = runCli("verify");
  CHECK(neither.code == 1);
}

TEST_CASE("flow: reeb orbit of the flat chart advances the angles linearly") {
  auto r = runCli(
      "flow --builtin canonical_r1s0 --reeb --from 0,0,1 --t 12.566370614359172");
  CHECK(r.code == 0);
  std::string header;
  std::vector<double> row = lastCsvRow(r.out, &header);
  CHECK(header == "t,x0,x1,x2");
  REQUIRE(row.size() == 4);
  // Two periods of theta0 = t/2, four of theta1 = t; angles are unwrapped.
  CHECK(row[1] == doctest::Approx(2 * 3.14159265358979323846).epsilon(1e-9));
  CHECK(row[2] == doctest::Approx(4 * 3.14159265358979323846).epsilon(1e-9));
  CHECK(row[3] == doctest::Approx(1.0).epsilon(1e-12));

  json drift = json::parse(r.err);
  CHECK(drift.at("status") == "ok");
  CHECK(drift.at("t_end").get<double>() ==
        doctest::Approx(12.566370614359172).epsilon(1e-15));
  REQUIRE(drift.at("invariant_drift").size() == 1);
  CHECK(drift.at("invariant_drift")[0].at("field") == "f1");
  CHECK(drift.at("invariant_drift")[0].at("drift").get<double>() <= 1e-12);
}

TEST_CASE("flow: named hamiltonian field on the darboux chart") {
  auto r = runCli("flow --builtin darboux3 --field Xp --from 0,1,0 --t 1");
  CHECK(r.code == 0);
  std::vector<double> row = lastCsvRow(r.out);
  REQUIRE(row.size() == 4);
  CHECK(row[0] == 1.0);                                // t
  CHECK(row[1] == doctest::Approx(1.0).epsilon(1e-9)); // q advanced by p t
}

TEST_CASE("flow: zero time emits the start row only") {
  auto r = runCli("flow --builtin darboux3 --reeb --from 0.25,0.5,0.75 --t 0");
  CHECK(r.code == 0);
  CHECK(csvRowCount(r.out) == 2);  // header + one row
  std::vector<double> row = lastCsvRow(r.out);
  CHECK(row[0] == 0.0);
  CHECK(row[1] == 0.25);
  CHECK(row[2] == 0.5);
  CHECK(row[3] == 0.75);
}

TEST_CASE("flow: leaving the chart reports exit 3 with the crossing time") {
  auto r = runCli("flow --builtin darboux3 --reeb --from 0,0,1.9 --t 1");
  CHECK(r.code == 3);
  json drift = json::parse(r.err);
  CHECK(drift.at("status") == "chart_exit");
  CHECK(drift.at("exit_time").get<double>() == doctest::Approx(0.1).epsilon(1e-6));
  // The truncated trajectory is still written.
  CHECK(csvRowCount(r.out) >= 2);
}

TEST_CASE("flow: argument errors exit 1") {
  CHECK(runCli("flow --builtin darboux3 --reeb --field Xp --from 0,0,0 --t 1").code == 1);
  CHECK(runCli("flow --builtin darboux3 --from 0,0,0 --t 1").code == 1);
  CHECK(runCli("flow --builtin darboux3 --reeb --from 0,0 --t 1").code == 1);
  CHECK(runCli("flow --builtin darboux3 --field nosuch --from 0,0,0 --t 1").code == 1);
  CHECK(runCli("flow --builtin darboux3 --reeb --t 1").code == 1);
}

TEST_CASE("flow: a field leaving its domain of definition exits 3") {
  json j = contactflow::SystemDef::builtin("darboux3").toJson();
  j["fields"]["bad"] = "log(q)";
  {
    std::ofstream f("spec_logfield.json");
    f << j.dump(2) << "\n";
  }
  auto r = runCli("flow spec_logfield.json --field bad --from -1,0,0 --t 1");
  CHECK(r.code == 3);
  CHECK(r.err.find("log") != std::string::npos);
  std::remove("spec_logfield.json");
}

TEST_CASE("flow: --out and --drift-out write files") {
  auto r = runCli(
      "flow --builtin darboux3 --field Xp --from 0,1,0 --t 1 --out traj.csv "
      "--drift-out drift.json");
  CHECK(r.code == 0);
  CHECK(r.out.empty());
  std::string csv = testutil::slurp("traj.csv");
  CHECK(csvRowCount(csv) > 2);
  json drift = json::parse(testutil::slurp("drift.json"));
  CHECK(drift.at("status") == "ok");
  std::remove("traj.csv");
  std::remove("drift.json");
}

TEST_CASE("actions: the flat chart reproduces frequencies and cross-checks") {
  auto r = runCli("actions --builtin canonical_r1s0 --torus y1=1.0");
  CHECK(r.code == 0);
  json j = json::parse(r.out);
  CHECK(j.at("verdict") == true);

  REQUIRE(j.at("actions").size() == 2);
  CHECK(j.at("actions")[0].at("value").get<double>() ==
        doctest::Approx(0.0).epsilon(1e-12));  // y0 = 1 - y1^2 at y1 = 1
  CHECK(j.at("actions")[1].at("value").get<double>() ==
        doctest::Approx(1.0).epsilon(1e-12));

  auto z = j.at("frequencies").at("z").get<std::vector<double>>();
  REQUIRE(z.size() == 2);
  CHECK(z[0] == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(z[1] == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(j.at("frequencies").at("singular") == false);

  auto omega = j.at("rotation_numbers").get<std::vector<double>>();
  REQUIRE(omega.size() == 2);
  CHECK(std::abs(omega[0] - 0.5) <= 1e-4);
  CHECK(std::abs(omega[1] - 1.0) <= 1e-4);

  CHECK(j.at("cross_check").at("max_frequency_difference").get<double>() <= 1e-4);
  CHECK(j.at("cross_check").at("theta0_action_vs_y0").get<double>() <= 1e-6);
}

TEST_CASE("actions: the round torus splits the unit action") {
  auto r = runCli("actions --builtin hopf_s3 --torus u=0.7853981633974483");
  CHECK(r.code == 0);
  json j = json::parse(r.out);
  CHECK(j.at("verdict") == true);
  CHECK(j.at("actions")[0].at("value").get<double>() ==
        doctest::Approx(0.5).epsilon(1e-10));
  CHECK(j.at("actions")[1].at("value").get<double>() ==
        doctest::Approx(0.5).epsilon(1e-10));
  auto z = j.at("frequencies").at("z").get<std::vector<double>>();
  CHECK(z[0] == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(z[1] == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("actions: torus values outside the chart exit 1") {
  CHECK(runCli("actions --builtin canonical_r1s0 --torus y1=5").code == 1);
  CHECK(runCli("actions --builtin canonical_r1s0 --torus nosuch=1").code == 1);
  CHECK(runCli("actions --builtin canonical_r1s0 --torus y1").code == 1);
  // No angles at all: the darboux chart has no torus cycles.
  CHECK(runCli("actions --builtin darboux3").code == 1);
}

TEST_CASE("actions: explicit cycle files integrate custom loops") {
  {
    json cycles = json::array();
    cycles.push_back({{"label", "theta1_loop"},
                      {"path", {"0", "tau + 0.3*sin(tau)", "1"}}});
    std::ofstream f("cycles_custom.json");
    f << cycles.dump(2) << "\n";
  }
  auto r = runCli("actions --builtin canonical_r1s0 --cycles cycles_custom.json");
  CHECK(r.code == 0);
  json j = json::parse(r.out);
  REQUIRE(j.at("actions").size() == 1);
  CHECK(j.at("actions")[0].at("cycle") == "theta1_loop");
  CHECK(j.at("actions")[0].at("value").get<double>() ==
        doctest::Approx(1.0).epsilon(1e-8));
  // Explicit cycles skip the constraint cross-check.
  CHECK(!j.contains("frequencies"));
  std::remove("cycles_custom.json");

  {
    json cycles = json::array();
    cycles.push_back({{"label", "open"}, {"path", {"0", "tau", "1 + tau"}}});
    std::ofstream f("cycles_open.json");
    f << cycles.dump(2) << "\n";
  }
  auto open = runCli("actions --builtin canonical_r1s0 --cycles cycles_open.json");
  CHECK(open.code == 1);
  CHECK(open.err.find("not closed") != std::string::npos);
  std::remove("cycles_open.json");
}

TEST_CASE("top-level usage") {
  CHECK(runCli("").code == 1);          // a subcommand is required
  CHECK(runCli("bogus").code == 1);
  CHECK(runCli("--help").code == 0);
  CHECK(runCli("verify --builtin nosuch").code == 1);
}
