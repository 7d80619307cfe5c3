#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include <gtest/gtest.h>
#include <json.hpp>

#include "mpsent/bnk.hpp"
#include "mpsent/io/csv.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace mpsent;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("mpsent-cli-" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

int run_cli(const std::string& args, const fs::path& log) {
  const std::string cmd = std::string("\"") + MPSENT_CLI + "\" " + args + " >\"" + log.string() + "\" 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) { return io::read_file(p.string()); }

void write(const fs::path& p, const std::string& s) { io::write_file(p.string(), s); }

std::string examples(const std::string& name) { return (fs::path(MPSENT_EXAMPLES) / name).string(); }

}  // namespace

TEST(Cli, UnknownSubcommandIsUsageError) {
  const fs::path dir = scratch("unknown");
  EXPECT_NE(run_cli("frobnicate", dir / "log"), 0);
  EXPECT_NE(run_cli("bnk frobnicate", dir / "log"), 0);
  EXPECT_NE(slurp(dir / "log").find("\"error\":\"Usage\""), std::string::npos);
}

TEST(Cli, LibraryErrorWritesRecord) {
  const fs::path dir = scratch("error");
  EXPECT_EQ(run_cli("bnk irf --horizons 3 --out \"" + (dir / "o").string() + "\"", dir / "log"), 1);
  const json rec = json::parse(slurp(dir / "o" / "error.json"));
  EXPECT_EQ(rec["error"], "InvalidArgument");
  EXPECT_NE(slurp(dir / "log").find("InvalidArgument"), std::string::npos);
}

TEST(Cli, UnknownConfigKeyRejected) {
  const fs::path dir = scratch("badkey");
  write(dir / "c.json", R"({"bnk": {"kapa": 0.1}})");
  EXPECT_EQ(run_cli("bnk solve --config \"" + (dir / "c.json").string() + "\" --out \"" + (dir / "o").string() + "\"",
                    dir / "log"),
            1);
  EXPECT_NE(slurp(dir / "o" / "error.json").find("bnk.kapa"), std::string::npos);
}

TEST(Cli, BnkIrfSignsMatchPatterns) {
  const fs::path dir = scratch("bnkirf");
  ASSERT_EQ(run_cli("bnk irf --config \"" + examples("bnk.json") + "\" --out \"" + (dir / "o").string() + "\"",
                    dir / "log"),
            0);
  const auto table = io::parse_csv(slurp(dir / "o" / "irf.csv"));
  ASSERT_EQ(table.front(), (std::vector<std::string>{"shock", "variable", "horizon", "value"}));
  std::map<std::string, std::map<std::string, std::vector<double>>> v;
  for (std::size_t i = 1; i < table.size(); ++i) v[table[i][0]][table[i][1]].push_back(std::stod(table[i][3]));
  const bnk::Calibration c;
  for (bnk::ShockKind k : bnk::kAllShocks) {
    const auto& s = v.at(bnk::to_string(k));
    const bnk::SignPattern p = bnk::sign_pattern(k);
    const std::size_t he = k == bnk::ShockKind::AnticipatedMP ? static_cast<std::size_t>(c.tau - 1) : 0;
    EXPECT_TRUE(bnk::satisfies(p[bnk::Role::R], s.at("r")[0])) << bnk::to_string(k);
    EXPECT_TRUE(bnk::satisfies(p[bnk::Role::S], s.at("s")[0])) << bnk::to_string(k);
    EXPECT_TRUE(bnk::satisfies(p[bnk::Role::ER], s.at("e_r")[he])) << bnk::to_string(k);
    EXPECT_TRUE(bnk::satisfies(p[bnk::Role::EX], s.at("e_x")[he])) << bnk::to_string(k);
    EXPECT_TRUE(bnk::satisfies(p[bnk::Role::EPi], s.at("e_pi")[he])) << bnk::to_string(k);
    EXPECT_EQ(s.at("r").size(), 40u);
  }
}

TEST(Cli, ManifestRecordsInputsAndOverrides) {
  const fs::path dir = scratch("manifest");
  const std::string data = "date,e,y\n" + [] {
    std::string rows;
    double y = 0.0;
    for (int t = 0; t < 80; ++t) {
      const double e = std::sin(1.7 * t) + 0.3 * std::cos(0.9 * t * t);
      y = 0.6 * y + e + 0.2 * std::sin(3.1 * t);
      rows += std::to_string(2000 + t / 4) + "-Q" + std::to_string(t % 4 + 1) + "," + io::format_double(e) + "," +
              io::format_double(y) + "\n";
    }
    return rows;
  }();
  fs::create_directories(dir / "cfg" / "data");
  write(dir / "cfg" / "data" / "d.csv", data);
  write(dir / "cfg" / "lp.json",
        R"({"seed": 5, "out": "result", "lp": {"data": "data/d.csv", "outcome": "y", "shock": "e", "horizons": 8, "shock_lags": 2}})");
  // relative paths resolve against the config directory, not the cwd
  ASSERT_EQ(run_cli("lp run --config \"" + (dir / "cfg" / "lp.json").string() + "\" --horizons 4", dir / "log"), 0)
      << slurp(dir / "log");
  const fs::path out = dir / "cfg" / "result";
  const json m = json::parse(slurp(out / "manifest.json"));
  EXPECT_EQ(m["command"], "lp run");
  EXPECT_EQ(m["seed"], 5);
  EXPECT_EQ(m["config"]["lp"]["horizons"], 4);
  EXPECT_EQ(m["config"]["lp"]["shock_lags"], 2);
  EXPECT_EQ(m["config"]["lp"]["control_lags"], 1);
  ASSERT_EQ(m["inputs"].size(), 1u);
  EXPECT_EQ(m["inputs"][0]["path"], "data/d.csv");
  EXPECT_EQ(m["inputs"][0]["bytes"], data.size());
  EXPECT_EQ(m["outputs"], json::array({"lp.csv"}));
  const auto lp = io::parse_csv(slurp(out / "lp.csv"));
  EXPECT_EQ(lp.size(), 6u);  // header + h = 0..4
}

TEST(Cli, SeedChangesSyntheticDataAndRerunIsIdentical) {
  const fs::path dir = scratch("seed");
  const std::string base = "synth taylor --config \"" + examples("synth_taylor.json") + "\" --out ";
  ASSERT_EQ(run_cli(base + "\"" + (dir / "a").string() + "\" --seed 3", dir / "log"), 0);
  ASSERT_EQ(run_cli(base + "\"" + (dir / "b").string() + "\" --seed 3", dir / "log"), 0);
  ASSERT_EQ(run_cli(base + "\"" + (dir / "c").string() + "\" --seed 4", dir / "log"), 0);
  EXPECT_EQ(slurp(dir / "a" / "data.csv"), slurp(dir / "b" / "data.csv"));
  EXPECT_EQ(slurp(dir / "a" / "manifest.json"), slurp(dir / "b" / "manifest.json"));
  EXPECT_NE(slurp(dir / "a" / "data.csv"), slurp(dir / "c" / "data.csv"));
  // emitted frames load back bit-exactly
  const auto f = io::load_frame((dir / "a" / "data.csv").string());
  EXPECT_EQ(io::format_frame(f), slurp(dir / "a" / "data.csv"));
}
