// End-to-end checks of the installed command-line interface, including the
// documented exit codes: 2 config error, 4 missing data, 5 oracle failure.

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace {

namespace fs = std::filesystem;

int run_cli(const std::string& args, const fs::path& stdout_file) {
  const std::string cmd = std::string(MFSI_CLI_PATH) + " " + args + " > " +
                          stdout_file.string() + " 2> " + stdout_file.string() + ".err";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::path(::testing::TempDir()) / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write_config(const fs::path& path, const std::string& angles = "[0.25]") {
  std::ofstream out(path);
  out << "[experiment]\nname = demo\ndim = 2\n"
      << "[domain]\nshape = kite\ncenter = [0, 0]\nscale = 1\n"
      << "[source]\nspatial = constant\nspatial_coeffs = [3]\n"
      << "temporal_coeffs = [1, 1]\nt_min = 0\nt_max = 0.1\n"
      << "[band]\nk_min = 0\nk_max_pi = 2.6666666666666665\nn = 16\n"
      << "[observations]\nkind = far\nangles_pi = " << angles << "\n"
      << "[simulation]\nresolution = 96\n"
      << "[lattice]\nlo = [-3, -3]\nhi = [3, 3]\ncounts = [41, 41]\n";
}

}  // namespace

TEST(Cli, SimulateReconstructExtentsSucceed) {
  const fs::path dir = fresh_dir("cli_ok");
  write_config(dir / "demo.cfg");
  EXPECT_EQ(run_cli("simulate --config " + (dir / "demo.cfg").string() + " --out " +
                        (dir / "out").string(),
                    dir / "sim.log"),
            0);
  EXPECT_TRUE(fs::exists(dir / "out" / "demo_dir0.csv"));

  EXPECT_EQ(run_cli("reconstruct --config " + (dir / "demo.cfg").string() + " --out " +
                        (dir / "out").string(),
                    dir / "rec.log"),
            0);
  const std::string log = slurp(dir / "rec.log");
  EXPECT_NE(log.find("strip_contrast="), std::string::npos) << log;
  EXPECT_TRUE(fs::exists(dir / "out" / "demo_field.pgm"));

  EXPECT_EQ(run_cli("extents --config " + (dir / "demo.cfg").string(), dir / "ext.log"), 0);
  EXPECT_NE(slurp(dir / "ext.log").find("extent_dir0_low="), std::string::npos);
}

TEST(Cli, ConfigErrorsExitWithTwo) {
  const fs::path dir = fresh_dir("cli_cfg");
  EXPECT_EQ(run_cli("simulate --config " + (dir / "nonexistent.cfg").string(), dir / "a.log"),
            2);

  std::ofstream bad(dir / "bad.cfg");
  bad << "[experiment]\nname = x\ndim = 5\n";
  bad.close();
  EXPECT_EQ(run_cli("simulate --config " + (dir / "bad.cfg").string(), dir / "b.log"), 2);

  // Zero-measure lattice is a parse-time rejection.
  std::ofstream zero(dir / "zero.cfg");
  zero << "[experiment]\nname = x\ndim = 2\n"
       << "[domain]\nshape = ball\ncenter = [0, 0]\nradius = 0.5\n"
       << "[source]\nspatial = constant\nspatial_coeffs = [1]\n"
       << "temporal_coeffs = [1]\nt_min = 0\nt_max = 0.1\n"
       << "[band]\nk_min = 0\nk_max = 8\nn = 16\n"
       << "[observations]\nkind = far\nangles_pi = [0]\n"
       << "[lattice]\nlo = [0, 0]\nhi = [0, 1]\ncounts = [11, 11]\n";
  zero.close();
  EXPECT_EQ(run_cli("simulate --config " + (dir / "zero.cfg").string(), dir / "c.log"), 2);
}

TEST(Cli, MissingDataExitsWithFour) {
  const fs::path dir = fresh_dir("cli_data");
  write_config(dir / "demo.cfg");
  EXPECT_EQ(run_cli("reconstruct --config " + (dir / "demo.cfg").string() + " --out " +
                        (dir / "empty").string(),
                    dir / "r.log"),
            4);
}

TEST(Cli, ValidateNegativeControlExitsWithFive) {
  const fs::path dir = fresh_dir("cli_validate");
  EXPECT_EQ(run_cli("validate --cases kite_constant --out " + (dir / "v1").string(),
                    dir / "v1.log"),
            0);
  EXPECT_EQ(run_cli("validate --cases kite_constant --inject-mismatch --out " +
                        (dir / "v2").string(),
                    dir / "v2.log"),
            5);
  const std::string log = slurp(dir / "v2.log");
  EXPECT_NE(log.find("factorization_residual"), std::string::npos);
  EXPECT_NE(log.find("FAIL"), std::string::npos);

  EXPECT_EQ(run_cli("validate --cases no_such --out " + (dir / "v3").string(), dir / "v3.log"),
            2);
}
