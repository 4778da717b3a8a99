#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "logmink/json_io.hpp"
#include "logmink/solver.hpp"
#include "test_util.hpp"

// End-to-end checks of the installed command-line tool.  The binary path
// comes in via LOGMINK_CLI_PATH; every invocation runs inside a scratch
// directory so relative outputs (manifests in particular) stay contained.

namespace fs = std::filesystem;
using njson = nlohmann::json;

namespace {

const std::string kCli = LOGMINK_CLI_PATH;

fs::path scratch_dir() {
  static const fs::path dir = [] {
    fs::path d = fs::current_path() / "cli_scratch";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

// Runs the tool with the given arguments, cwd set to the scratch directory.
// Returns the exit status; stdout+stderr land in `log` under scratch.
int run_cli(const std::string& args, const std::string& log = "last_run.log") {
  const std::string cmd = "cd '" + scratch_dir().string() + "' && '" + kCli +
                          "' " + args + " > '" + log + "' 2>&1";
  const int rc = std::system(cmd.c_str());
  REQUIRE(rc != -1);
  REQUIRE(WIFEXITED(rc));
  return WEXITSTATUS(rc);
}

std::string slurp(const std::string& name) {
  std::ifstream in(scratch_dir() / name, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void plant(const std::string& name, const std::string& content) {
  std::ofstream out(scratch_dir() / name, std::ios::binary);
  out << content;
}

bool present(const std::string& name) { return fs::exists(scratch_dir() / name); }

}  // namespace

TEST_CASE("version flag") { CHECK(run_cli("--version") == 0); }

TEST_CASE("a subcommand is required") { CHECK(run_cli("") == 2); }

TEST_CASE("cone volumes from inline slabs") {
  CHECK(run_cli("conevol --dirs '1,0;0,1' --support '1,1' -o square.json") ==
        0);
  njson j = njson::parse(slurp("square.json"));
  CHECK(j.at("dim") == 2);
  REQUIRE(j.at("pairs").size() == 2);
  CHECK(j["pairs"][0].at("mass").get<double>() == doctest::Approx(1.0));
  CHECK(j["pairs"][1].at("mass").get<double>() == doctest::Approx(1.0));

  // manifest sits next to the output and records the run
  REQUIRE(present("square.json.manifest.json"));
  njson man = njson::parse(slurp("square.json.manifest.json"));
  CHECK(man.at("command") == "conevol");
  CHECK(man.at("exit_status") == 0);
  CHECK(man.at("outputs")[0] == "square.json");
  CHECK(man.at("tool_version") == "0.1.0");
}

TEST_CASE("surface measure of a higher order") {
  const std::string dirs = "'1,1,1;1,1,-1;1,-1,1;1,-1,-1'";
  const std::string h = "0.57735026918962573";
  CHECK(run_cli("conevol --dirs " + dirs + " --support '" + h + "," + h +
                "," + h + "," + h + "' --p 2 -o oct_p2.json") == 0);
  njson j = njson::parse(slurp("oct_p2.json"));
  for (const auto& p : j.at("pairs"))
    CHECK(p.at("mass").get<double>() == doctest::Approx(1.5).epsilon(1e-9));
}

TEST_CASE("cone volumes from a polytope file, deterministically") {
  plant("cube.json", logmink::to_json(testutil::cube_body()));
  CHECK(run_cli("conevol cube.json -o cube_measure.json") == 0);
  CHECK(run_cli("conevol cube.json -o cube_measure2.json") == 0);
  CHECK(slurp("cube_measure.json") == slurp("cube_measure2.json"));
  njson j = njson::parse(slurp("cube_measure.json"));
  for (const auto& p : j.at("pairs"))
    CHECK(p.at("mass").get<double>() ==
          doctest::Approx(4.0 / 3.0).epsilon(1e-12));

  // mixing a file with inline slabs is refused
  CHECK(run_cli("conevol cube.json --dirs '1,0;0,1' --support '1,1'") == 2);
}

TEST_CASE("check grades measures by status") {
  plant("eq_measure.json", logmink::to_json(testutil::cube_measure()));
  CHECK(run_cli("check eq_measure.json -o eq_report.json") == 10);
  njson j = njson::parse(slurp("eq_report.json"));
  CHECK(j.at("status") == "SatisfiedWithEquality");
  CHECK(j.at("condition_satisfied") == true);

  plant("strict_measure.json", logmink::to_json(testutil::octahedron_measure()));
  CHECK(run_cli("check strict_measure.json -o strict_report.json") == 0);

  plant("bad_measure.json", logmink::to_json(testutil::violating_measure()));
  CHECK(run_cli("check bad_measure.json -o bad_report.json") == 11);
  njson b = njson::parse(slurp("bad_report.json"));
  CHECK(b.at("status") == "Violated");
  CHECK_FALSE(b.at("witness").is_null());

  logmink::Vec w(3);
  w << 1, 1, 1;
  plant("gap_measure.json",
        logmink::to_json(logmink::measure_from_pairs(
            3, {{testutil::basis_vec(3, 2), 1.0},
                {testutil::basis_vec(3, 0), 0.5},
                {testutil::basis_vec(3, 1), 0.5},
                {w, 1.0}})));
  CHECK(run_cli("check gap_measure.json -o gap_report.json") == 11);
  njson g = njson::parse(slurp("gap_report.json"));
  CHECK(g.at("status") == "SatisfiedWithEquality");
  CHECK(g.at("condition_satisfied") == false);
  CHECK(g.at("unpaired_equalities").size() == 3);
}

TEST_CASE("solve, verify and trace on a strict measure") {
  plant("hex_measure.json",
        logmink::to_json(testutil::hexagon_measure(1.1, 0.9, 1.1)));
  CHECK(run_cli("solve hex_measure.json -o hex_result.json "
                "--trace hex_trace.csv") == 0);
  njson j = njson::parse(slurp("hex_result.json"));
  CHECK(j.at("status") == "ok");
  CHECK(j.at("path") == "Strict");
  CHECK(j.at("residual").get<double>() <= 1e-7);

  std::istringstream csv(slurp("hex_trace.csv"));
  std::string header;
  REQUIRE(std::getline(csv, header));
  CHECK(header == "iteration,objective,residual,step");

  CHECK(run_cli("verify hex_measure.json hex_result.json") == 0);

  // against a different target the recomputed measure must not match
  plant("hex_exact.json", logmink::to_json(testutil::hexagon_measure()));
  CHECK(run_cli("verify hex_exact.json hex_result.json", "mismatch.log") == 1);
  CHECK(slurp("mismatch.log").find("MISMATCH") != std::string::npos);
}

TEST_CASE("solve decomposes equality measures and exports meshes") {
  plant("cube_m.json", logmink::to_json(testutil::cube_measure()));
  CHECK(run_cli("solve cube_m.json -o cube_result.json --off cube.off") == 0);
  njson j = njson::parse(slurp("cube_result.json"));
  CHECK(j.at("path") == "Decomposed");
  REQUIRE(!j.at("decomposition").is_null());
  CHECK(j["decomposition"].at("a").get<double>() ==
        doctest::Approx(0.75).epsilon(1e-9));
  CHECK(j.at("body").at("volume").get<double>() ==
        doctest::Approx(8.0).epsilon(1e-6));
  CHECK(present("cube.off"));
  CHECK(slurp("cube.off").substr(0, 3) == "OFF");

  CHECK(run_cli("verify cube_m.json cube_result.json") == 0);
}

TEST_CASE("solve rejects inadmissible measures through exit codes") {
  plant("viol.json", logmink::to_json(testutil::violating_measure()));
  CHECK(run_cli("solve viol.json -o viol_result.json", "viol.log") == 11);
  CHECK(slurp("viol.log").find("error:") != std::string::npos);
  CHECK_FALSE(present("viol_result.json"));
  // the manifest is still written, carrying the failure
  REQUIRE(present("viol_result.json.manifest.json"));
  njson man = njson::parse(slurp("viol_result.json.manifest.json"));
  CHECK(man.at("exit_status") == 11);

  logmink::Vec w(3);
  w << 1, 1, 1;
  plant("gap_m.json",
        logmink::to_json(logmink::measure_from_pairs(
            3, {{testutil::basis_vec(3, 2), 1.0},
                {testutil::basis_vec(3, 0), 0.5},
                {testutil::basis_vec(3, 1), 0.5},
                {w, 1.0}})));
  CHECK(run_cli("solve gap_m.json -o gap_result.json") == 11);
}

TEST_CASE("an exhausted iteration budget reports divergence") {
  plant("slow.json", logmink::to_json(testutil::hexagon_measure(1.1, 0.9, 1.1)));
  CHECK(run_cli("solve slow.json -o slow_result.json --max-iter 1") == 12);
}

TEST_CASE("transform applies linear maps") {
  plant("cube_body.json", logmink::to_json(testutil::cube_body()));
  CHECK(run_cli("transform cube_body.json --matrix '0,1,0;1,0,0;0,0,1' "
                "-o rotated.json") == 0);
  njson j = njson::parse(slurp("rotated.json"));
  CHECK(j.at("volume").get<double>() == doctest::Approx(8.0).epsilon(1e-9));

  CHECK(run_cli("transform cube_body.json --matrix '1,0,0;0,1,0;0,0,0' "
                "-o collapsed.json") == 3);
  CHECK(run_cli("transform cube_body.json --matrix '1,0;0,1' "
                "-o wrong_size.json") == 2);
}

TEST_CASE("unusable input files exit with code 2") {
  plant("garbage.json", "{ not json ]");
  CHECK(run_cli("check garbage.json") == 2);
  CHECK(run_cli("solve garbage.json") == 2);
  CHECK(run_cli("solve no_such_file.json") == 2);
  CHECK(run_cli("conevol no_such_file.json") == 2);
}
