#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <json.hpp>

#include "brine/free_energy.hpp"
#include "brine/variational.hpp"
#include "brine_cli/cli.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = brine::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// First JSON document in a stream that may hold several.
json first_json(const std::string& text) {
  json j;
  std::istringstream in(text);
  in >> j;
  return j;
}

std::vector<std::vector<double>> parse_csv(const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    std::vector<double> row;
    std::istringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(row);
  }
  return rows;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("brine_cli_" + std::to_string(::getpid()) + "_" +
                                        ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

}  // namespace

TEST_F(CliTest, InspectWithoutSalt) {
  const auto r = run({"inspect", "--model", "mean-field", "--J", "0.2", "--h", "0.1", "--c", "0", "--m", "0.5"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = first_json(r.out);
  EXPECT_EQ(j["xi"].get<double>(), 0.0);
  const double F = brine::make_mean_field(0.2, 2)->free_energy(0.5);
  EXPECT_DOUBLE_EQ(j["big_g"].get<double>(), -0.1 * 0.5 + F);
  EXPECT_DOUBLE_EQ(j["free_energy"].get<double>(), F);
}

TEST_F(CliTest, InspectThetaEchoes) {
  auto r = run({"inspect", "--kappa", "0", "--c", "0.3", "--m", "0.4"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(first_json(r.out)["theta_star"].get<double>(), 0.7);

  r = run({"inspect", "--kappa", "1", "--c", "0.2", "--m", "0"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = first_json(r.out);
  EXPECT_NEAR(j["theta_star"].get<double>(), 0.691635187426487404, 1e-12);
  EXPECT_NEAR(j["p_plus"].get<double>(), 0.276654074970594962, 1e-12);
  EXPECT_NEAR(j["p_minus"].get<double>(), 0.123345925029405038, 1e-12);
  EXPECT_EQ(j["theta"], j["theta_star"]);
  EXPECT_EQ(j["script_g"], j["big_g"]);
}

TEST_F(CliTest, PhaseDiagramOutputs) {
  const std::string csv = path("pd.csv");
  auto r = run({"phase-diagram", "--J", "0.6", "--kappa", "1", "--c-min", "0", "--c-max", "0.25", "--c-steps", "26",
                "-o", csv});
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string text = slurp(csv);
  EXPECT_EQ(text.substr(0, text.find('\n')), "c,h_minus,h_plus");
  const auto rows = parse_csv(text);
  ASSERT_EQ(rows.size(), 26u);
  EXPECT_EQ(rows[0], (std::vector<double>{0.0, 0.0, 0.0}));
  for (std::size_t i = 1; i < rows.size(); ++i) {
    EXPECT_LT(rows[i][1], rows[i][2]);
    EXPECT_LT(rows[i][2], 0.0);
    if (i > 1) {
      EXPECT_LT(rows[i][1], rows[i - 1][1]);
      EXPECT_LT(rows[i][2], rows[i - 1][2]);
    }
  }
  // full precision: a non-trivial entry carries 17 significant digits
  const std::regex seventeen(R"(-?0\.0*[1-9]\d{16}(e-?\d+)?)");
  const auto start = text.find("\n0.1") + 1;
  const std::string line = text.substr(start, text.find('\n', start) - start);
  const std::string hm = line.substr(line.find(',') + 1, line.rfind(',') - line.find(',') - 1);
  EXPECT_TRUE(std::regex_match(hm, seventeen)) << hm;

  const std::string svg = slurp(path("pd.svg"));
  EXPECT_NE(svg.find("<svg"), std::string::npos);
  EXPECT_NE(svg.find("<polygon class=\"band\""), std::string::npos);
  const json manifest = json::parse(slurp(csv + ".manifest.json"));
  EXPECT_EQ(manifest["command"], "phase-diagram");
  EXPECT_EQ(manifest["outputs"].size(), 2u);
  EXPECT_EQ(manifest["outputs"][0]["sha256"].get<std::string>().size(), 64u);

  r = run({"phase-diagram", "--kappa", "0", "--c-steps", "5"});
  ASSERT_EQ(r.code, 0);
  for (const auto& row : parse_csv(r.out)) {
    EXPECT_EQ(row[1], 0.0);
    EXPECT_EQ(row[2], 0.0);
  }
}

TEST_F(CliTest, PhaseDiagramSubcriticalFails) {
  const auto r = run({"phase-diagram", "--J", "0.3"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("J_c"), std::string::npos);
}

TEST_F(CliTest, PhaseDiagramThreadCountDoesNotChangeOutput) {
  ::setenv("BRINE_THREADS", "1", 1);
  const auto one = run({"phase-diagram", "--c-steps", "30"});
  ::setenv("BRINE_THREADS", "4", 1);
  const auto four = run({"phase-diagram", "--c-steps", "30"});
  ::unsetenv("BRINE_THREADS");
  ASSERT_EQ(one.code, 0);
  EXPECT_EQ(one.out, four.out);
}

TEST_F(CliTest, MinimizeExamples) {
  auto r = run({"minimize", "--model", "mean-field", "--J", "0.375", "--h", "0.1", "--c", "0"});
  ASSERT_EQ(r.code, 0) << r.err;
  json j = first_json(r.out);
  double oracle = 1.0;
  for (int i = 0; i < 100000; ++i) oracle = 0.5 * oracle + 0.5 * std::tanh(1.5 * oracle + 0.1);
  EXPECT_NEAR(j["m"].get<double>(), oracle, 1e-10);
  for (const char* key : {"m", "theta", "value", "q_plus", "q_minus", "region", "droplet_fraction"})
    EXPECT_TRUE(j.contains(key)) << key;

  r = run({"minimize", "--kappa", "0", "--c", "0.2", "--h", "0.01"});
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(first_json(r.out)["region"], "liquid");

  const auto model = brine::make_onsager_2d(0.6);
  const std::vector<double> grid{0.1};
  const auto row = brine::phase_boundaries(grid, 1.0, *model).rows[0];
  std::ostringstream h;
  h.precision(17);
  h << 0.5 * (row.hMinus + row.hPlus);
  r = run({"minimize", "--kappa", "1", "--c", "0.1", "--h", h.str()});
  ASSERT_EQ(r.code, 0);
  j = first_json(r.out);
  EXPECT_EQ(j["region"], "phase-separation");
  EXPECT_GT(j["droplet_fraction"].get<double>(), 0.0);
  EXPECT_LT(j["droplet_fraction"].get<double>(), 1.0);
}

TEST_F(CliTest, ExitCodes) {
  auto r = run({"minimize", "--h", "0", "--kappa", "0", "--c", "0.1"});
  EXPECT_EQ(r.code, 3);
  const json payload = first_json(r.out);
  EXPECT_EQ(payload["error"], "non-unique");
  EXPECT_NEAR(payload["m_upper"].get<double>(), brine::onsager_spontaneous_m(0.6), 1e-15);
  EXPECT_EQ(run({"minimize", "--c", "1.5"}).code, 4);
  EXPECT_EQ(run({"minimize", "--c", "-0.1"}).code, 2);
  EXPECT_EQ(run({"minimize", "--kappa", "-1"}).code, 2);
  EXPECT_EQ(run({"minimize", "--J", "abc"}).code, 2);
  EXPECT_EQ(run({"minimize", "--model", "onsager", "--d", "3"}).code, 2);
  EXPECT_EQ(run({"minimize", "--model", "tabulated:/nonexistent.csv"}).code, 2);
  EXPECT_EQ(run({"nonsense"}).code, 2);
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"simulate", "--sweeps", "10", "--burn-in", "20"}).code, 2);
  EXPECT_EQ(run({"--help"}).code, 0);
}

TEST_F(CliTest, TabulatedModel) {
  const std::string table = path("mag.csv");
  {
    std::ofstream f(table);
    f << "h,m\n0,0.9\n0.1,0.93\n0.5,0.97\n1,0.985\n";
  }
  const auto r = run({"minimize", "--model", "tabulated:" + table, "--h", "0.3", "--c", "0"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NEAR(first_json(r.out)["m"].get<double>(), 0.93 + (0.97 - 0.93) * 0.5, 1e-9);
}

TEST_F(CliTest, ConfigPrecedence) {
  const std::string cfg = path("cfg.json"), out = path("m.json");
  {
    std::ofstream f(cfg);
    f << R"({"J": 0.5, "h": 0.1, "c": 0.05})";
  }
  const auto r = run({"minimize", "--config", cfg, "--h", "0.2", "-o", out});
  ASSERT_EQ(r.code, 0) << r.err;
  const json m = json::parse(slurp(out + ".manifest.json"));
  EXPECT_EQ(m["config"]["J"].get<double>(), 0.5);
  EXPECT_EQ(m["config"]["h"].get<double>(), 0.2);
  EXPECT_EQ(m["config"]["c"].get<double>(), 0.05);
  EXPECT_EQ(m["config"]["kappa"].get<double>(), 1.0);
  EXPECT_EQ(m["config"]["model"], "onsager");

  {
    std::ofstream f(cfg);
    f << R"({"J": 0.5, "hh": 0.1})";
  }
  EXPECT_EQ(run({"minimize", "--config", cfg}).code, 2);
  {
    std::ofstream f(cfg);
    f << R"({"J": "strong"})";
  }
  EXPECT_EQ(run({"minimize", "--config", cfg}).code, 2);
}

TEST_F(CliTest, SimulateIsReproducibleFromManifest) {
  const std::string a = path("a.json"), b = path("b.json"), trace = path("trace.csv");
  auto r = run({"simulate", "--L", "8", "--sweeps", "1500", "--burn-in", "300", "--thin", "1", "--seed", "42",
                "--chains", "2", "--kappa", "0.5", "--h", "-0.02", "--samples", trace, "-o", a});
  ASSERT_EQ(r.code, 0) << r.err;
  const json manifest = json::parse(slurp(a + ".manifest.json"));
  EXPECT_EQ(manifest["seeds"], json::array({42}));
  EXPECT_EQ(slurp(trace).substr(0, 10), "sweep,M,Q\n");
  const json stats = json::parse(slurp(a));
  EXPECT_EQ(stats["samples"].get<long long>(), 2 * 1200);
  EXPECT_EQ(stats["salt_count"].get<long long>(), 6);

  r = run({"simulate", "--config", a + ".manifest.json", "-o", b});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(slurp(a), slurp(b));
  EXPECT_EQ(slurp(a + ".manifest.json").find(manifest["outputs"][0]["sha256"].get<std::string>()) != std::string::npos,
            slurp(b + ".manifest.json").find(manifest["outputs"][0]["sha256"].get<std::string>()) != std::string::npos);

  r = run({"simulate", "--L", "8", "--sweeps", "1500", "--burn-in", "300", "--thin", "1", "--seed", "43",
           "--chains", "2", "--kappa", "0.5", "--h", "-0.02"});
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(first_json(r.out).dump(), stats.dump());
}

TEST_F(CliTest, SimulateNoRepulsion) {
  const auto r = run({"simulate", "--J", "0.3", "--kappa", "0", "--c", "0.25", "--L", "12", "--sweeps", "6000",
                      "--burn-in", "500", "--thin", "2"});
  ASSERT_EQ(r.code, 0);
  const json s = first_json(r.out);
  const double c = s["concentration"].get<double>();
  EXPECT_NEAR(s["occ_plus"]["mean"].get<double>(), c, 3 * s["occ_plus"]["stderr"].get<double>());
  EXPECT_NEAR(s["occ_minus"]["mean"].get<double>(), c, 3 * s["occ_minus"]["stderr"].get<double>());
}

TEST_F(CliTest, ValidateSuite) {
  auto r = run({"validate"});
  ASSERT_EQ(r.code, 0) << r.err;
  json j = first_json(r.out);
  EXPECT_TRUE(j["pass"].get<bool>());
  EXPECT_GE(j["checks"].size(), 4u);

  r = run({"validate", "--perturb-acceptance"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("chain joint (M,Q) law vs exact"), std::string::npos);
  EXPECT_FALSE(first_json(r.out)["pass"].get<bool>());

  r = run({"validate", "--kappa", "0", "--sweeps", "200000"});
  ASSERT_EQ(r.code, 0) << r.err;
  j = first_json(r.out);
  int nullChecks = 0;
  for (const auto& c : j["checks"])
    if (c["name"].get<std::string>().find("coupling is null") != std::string::npos) {
      ++nullChecks;
      EXPECT_TRUE(c["pass"].get<bool>());
    }
  EXPECT_EQ(nullChecks, 2);
}

TEST_F(CliTest, FreeEnergyCurve) {
  const auto r = run({"free-energy", "--model", "mean-field", "--J", "0.3", "--grid", "10"});
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(r.out.substr(0, 4), "m,F\n");
  const auto rows = parse_csv(r.out);
  ASSERT_EQ(rows.size(), 10u);
  for (std::size_t i = 0; i < rows.size(); ++i) EXPECT_EQ(rows[i][1], rows[rows.size() - 1 - i][1]);
}

TEST_F(CliTest, BinaryRuns) {
  const char* exe = std::getenv("BRINE_CLI");
  if (!exe) GTEST_SKIP() << "BRINE_CLI not set";
  const std::string out = path("bin.json");
  const std::string cmd = std::string(exe) + " minimize --c 0.05 -o " + out;
  EXPECT_EQ(std::system(cmd.c_str()), 0);
  EXPECT_TRUE(fs::exists(out + ".manifest.json"));
  const std::string bad = std::string(exe) + " minimize --c 2 2>/dev/null";
  const int status = std::system(bad.c_str());
  EXPECT_EQ(WEXITSTATUS(status), 4);
}
