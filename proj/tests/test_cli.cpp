#include "cli/commands.hpp"
#include "cli/report.hpp"
#include "hobipb/mesh_io.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

using namespace hobipb;
using namespace hobipb::cli;

namespace {

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun run(std::vector<std::string> args) {
  args.insert(args.begin(), "hobipb");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::filesystem::path temp_file(const std::string& name, const std::string& content) {
  const auto dir = std::filesystem::temp_directory_path() / "hobipb_cli_test";
  std::filesystem::create_directories(dir);
  const auto p = dir / name;
  std::ofstream(p) << content;
  return p;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  bool quoted = false;
  for (char c : line) {
    if (c == '"') {
      quoted = !quoted;
    } else if (c == ',' && !quoted) {
      cells.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  cells.push_back(cur);
  return cells;
}

RunReport sample_report() {
  RunReport r;
  r.mesh_source = "icosphere:level=1,radius=2";
  r.num_vertices = 42;
  r.num_faces = 80;
  r.area = 48.1;
  r.scheme = "hobi";
  r.regular_rule = "rule";
  r.regular_rule_degree = 3;
  r.singular_points = 4;
  r.energy = -81.9841;
  r.phi_error = 1.58e-4;
  r.iterations = 8;
  r.residual = 3e-7;
  r.memory_lower_bound_bytes = 12345;
  return r;
}

}  // namespace

TEST(Report, JsonRoundTrip) {
  RunReport r = sample_report();
  r.order = 1.25;
  const auto j = r.to_json();
  const RunReport back = RunReport::from_json(nlohmann::json::parse(j.dump()));
  EXPECT_EQ(back.to_json().dump(), j.dump());
  EXPECT_FALSE(back.exact_energy.has_value());
  EXPECT_EQ(*back.phi_error, 1.58e-4);
}

TEST(Report, RejectsNonFinite) {
  RunReport r = sample_report();
  r.energy = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(r.validate(), std::invalid_argument);
  r = sample_report();
  r.order = std::numeric_limits<double>::infinity();
  EXPECT_THROW(r.to_json(), std::invalid_argument);
}

TEST(Report, CsvHeaderMatchesRowWidth) {
  const auto header = split_csv(RunReport::csv_header());
  const auto row = split_csv(sample_report().csv_row());
  EXPECT_EQ(header.size(), row.size());
  EXPECT_EQ(row[0], "icosphere:level=1,radius=2");
}

TEST(Cli, HelpExitsZero) { EXPECT_EQ(run({"--help"}).code, 0); }

TEST(Cli, MissingSubcommandIsUsageError) { EXPECT_EQ(run({}).code, 2); }

TEST(Cli, VertWithoutFaceIsUsageError) {
  const auto t = write_msms(icosahedral_sphere(1, 2.0));
  const auto v = temp_file("only.vert", t.vert);
  const CliRun r = run({"solve", "--vert", v.string(), "--charge", "0,0,0,1"});
  EXPECT_EQ(r.code, 2);
  EXPECT_FALSE(r.err.empty());
}

TEST(Cli, BadFlagValuesAreUsageErrors) {
  EXPECT_EQ(run({"solve", "--sphere", "1,2", "--scheme", "fmm"}).code, 2);
  EXPECT_EQ(run({"solve", "--sphere", "1.5,2"}).code, 2);
  EXPECT_EQ(run({"solve", "--sphere", "1,2", "--charge", "0,0,1"}).code, 2);
  EXPECT_EQ(run({"solve", "--charge", "0,0,0,1"}).code, 2);
}

TEST(Cli, MalformedInputIsRuntimeErrorOnOneLine) {
  const auto t = write_msms(icosahedral_sphere(1, 2.0));
  const auto v = temp_file("bad.vert", t.vert + "1 2 oops 0 0 1\n");
  const auto f = temp_file("bad.face", t.face);
  const CliRun r = run({"solve", "--vert", v.string(), "--face", f.string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(r.err.rfind("error: ", 0), 0u);
  EXPECT_EQ(std::count(r.err.begin(), r.err.end(), '\n'), 1);
}

TEST(Cli, SolveSphereBornEnergy) {
  const auto c = temp_file("centered.pqr", "0 0 0 1 2.0\n");
  const CliRun r = run({"solve", "--sphere", "2,2.0", "--charges", c.string(), "--eps1", "1", "--eps2", "80", "--kappa",
                     "0", "--scheme", "hobi", "--workers", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  ASSERT_EQ(j.size(), 1u);
  const double e = j[0]["energy_kcal_mol"].get<double>();
  EXPECT_NEAR(e, -81.98, 0.5);
  EXPECT_EQ(j[0]["regular_rule_degree"].get<int>(), 3);

  const CliRun l = run({"solve", "--sphere", "2,2.0", "--charges", c.string(), "--scheme", "lobi", "--workers", "1"});
  ASSERT_EQ(l.code, 0) << l.err;
  const double el = nlohmann::json::parse(l.out)[0]["energy_kcal_mol"].get<double>();
  EXPECT_GT(std::abs(el + 81.98), std::abs(e + 81.98));
}

TEST(Cli, SolveWritesReportAndSummary) {
  const auto out = std::filesystem::temp_directory_path() / "hobipb_cli_test" / "report.csv";
  const CliRun r = run({"solve", "--sphere", "1,2", "--charge", "0,0,0,1", "--format", "csv", "--out", out.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("E_sol="), std::string::npos);
  std::ifstream in(out);
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, RunReport::csv_header());
}

TEST(Cli, ReportsByteStable) {
  const std::vector<std::string> args{"solve", "--sphere", "2,2", "--charge", "0.3,0,0,1", "--workers", "1",
                                      "--deterministic"};
  const CliRun a = run(args), b = run(args);
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
}

TEST(Cli, JsonAndCsvCarryIdenticalNumbers) {
  const std::vector<std::string> base{"solve", "--sphere", "1,2", "--charge", "0.3,0.1,0,1", "--workers", "1",
                                      "--deterministic", "--format"};
  auto jargs = base, cargs = base;
  jargs.push_back("json");
  cargs.push_back("csv");
  const CliRun j = run(jargs), c = run(cargs);
  ASSERT_EQ(j.code, 0);
  ASSERT_EQ(c.code, 0);
  const auto obj = nlohmann::json::parse(j.out)[0];
  std::istringstream lines(c.out);
  std::string header, row;
  std::getline(lines, header);
  std::getline(lines, row);
  const auto names = split_csv(header), cells = split_csv(row);
  ASSERT_EQ(names.size(), cells.size());
  ASSERT_EQ(names.size(), obj.size());
  for (std::size_t k = 0; k < names.size(); ++k) {
    const auto& v = obj.at(names[k]);
    if (v.is_null()) {
      EXPECT_TRUE(cells[k].empty()) << names[k];
    } else if (v.is_string()) {
      EXPECT_EQ(cells[k], v.get<std::string>()) << names[k];
    } else {
      EXPECT_EQ(std::stod(cells[k]), v.get<double>()) << names[k];
    }
  }
}

TEST(Cli, ConvergenceSweepOrders) {
  const CliRun r = run({"convergence", "--levels", "1,2", "--schemes", "hobi,lobi", "--charge", "0,0,0,1", "--workers",
                     "1", "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  ASSERT_EQ(j["runs"].size(), 4u);
  EXPECT_TRUE(j["runs"][0]["order"].is_null());
  EXPECT_LT(j["runs"][1]["phi_error"].get<double>(), j["runs"][0]["phi_error"].get<double>());
  EXPECT_GT(j["runs"][1]["order"].get<double>(), 0.0);
  EXPECT_TRUE(j["lobi_better_at_coarsest"].is_boolean());
}

TEST(Cli, ConvergenceCommandRecordsCoarsestComparison) {
  ConvergenceOptions o;
  o.levels = {1};
  o.radius = 1.0;
  o.schemes = {"hobi", "lobi"};
  o.problem.charges = {"0.9,0,0,1"};
  o.problem.workers = 1;
  const auto res = cmd_convergence(o);
  ASSERT_EQ(res.runs.size(), 2u);
  ASSERT_TRUE(res.lobi_better_at_coarsest.has_value());
  EXPECT_EQ(*res.lobi_better_at_coarsest, *res.runs[1].phi_error < *res.runs[0].phi_error);
}

TEST(Cli, ScalingSingleWorkerEfficiencyOne) {
  ScalingOptions o;
  o.problem.sphere = {1, 2};
  o.problem.charges = {"0,0,0,1"};
  o.workers = {1};
  const auto rows = cmd_scaling(o);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].efficiency, 1.0);
  EXPECT_EQ(rows[0].max_abs_diff, 0.0);
}

TEST(Cli, ScalingTinyProblemManyWorkers) {
  const CliRun r = run({"scaling", "--sphere", "0,2", "--charge", "0.2,0,0,1", "--workers-list", "1,8", "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  ASSERT_EQ(j.size(), 2u);
  EXPECT_LE(j[1]["max_abs_diff"].get<double>(), 1e-13);
}

TEST(Cli, ScalingRejectsZeroWorkers) {
  EXPECT_EQ(run({"scaling", "--sphere", "0,2", "--workers-list", "1,0"}).code, 2);
}
