#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <string>

#include "ncpar/io.hpp"

namespace fs = std::filesystem;

namespace {

const std::string kCli = NCPAR_CLI_PATH;
const fs::path kConfigs = NCPAR_EXAMPLES_DIR;

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("ncpar_cli_" + name);
  fs::remove_all(p);
  return p;
}

int run(const std::string& args) {
  const std::string cmd = kCli + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string first_line(const fs::path& p) {
  const std::string text = ncpar::io::read_file(p);
  return text.substr(0, text.find('\n'));
}

}  // namespace

TEST(Cli, SolveWritesArtifacts) {
  const fs::path out = scratch("solve");
  ASSERT_EQ(run("solve --config " + (kConfigs / "heat1d.cfg").string() + " --out " + out.string()), 0);
  EXPECT_EQ(first_line(out / "trajectory.csv").substr(0, 42), "t,norm_plus_sq,norm_l2_sq,dual_f_sq,abs_g1");
  EXPECT_EQ(first_line(out / "solution_t.csv"), "id,re,im");
  EXPECT_EQ(first_line(out / "report.csv"), "quantity,value");
  EXPECT_EQ(first_line(out / "nodes.csv"), "id,x");
  EXPECT_EQ(first_line(out / "elements.csv"), "id,n0,n1");
  EXPECT_EQ(first_line(out / "facets.csv"), "id,n0,tag");
  for (const auto& entry : fs::directory_iterator(out))
    EXPECT_NE(entry.path().extension(), ".tmp") << entry.path();
}

TEST(Cli, OutputsAreByteIdentical) {
  const fs::path a = scratch("det_a"), b = scratch("det_b");
  const std::string cfg = " --config " + (kConfigs / "custom_robin.cfg").string();
  ASSERT_EQ(run("check" + cfg + " --seed 5 --out " + a.string()), run("check" + cfg + " --seed 5 --out " + b.string()));
  std::size_t files = 0;
  for (const auto& entry : fs::directory_iterator(a)) {
    ++files;
    EXPECT_EQ(ncpar::io::read_file(entry.path()), ncpar::io::read_file(b / entry.path().filename()))
        << entry.path().filename();
  }
  EXPECT_EQ(files, 6u);
}

TEST(Cli, EigsAndSharpness) {
  const fs::path out = scratch("eigs");
  ASSERT_EQ(run("eigs --preset paper_disk --vectors --out " + out.string()), 0);
  EXPECT_EQ(first_line(out / "eigenvalues.csv"), "j,lambda,mass_norm");
  EXPECT_EQ(first_line(out / "eigenvectors.csv"), "row,col,re,im");
  ASSERT_EQ(run("sharpness --config " + (kConfigs / "sharpness.cfg").string() + " --terms 10000 --out " +
                out.string()),
            0);
  const std::string sharp = ncpar::io::read_file(out / "sharpness.csv");
  EXPECT_NE(sharp.find("diverges"), std::string::npos);
  ASSERT_EQ(run("sharpness --epsilon 1 --terms 1000 --out " + out.string()), 0);
  EXPECT_NE(ncpar::io::read_file(out / "sharpness.csv").find("finite"), std::string::npos);
}

TEST(Cli, ConvergenceWritesTable) {
  const fs::path out = scratch("conv");
  ASSERT_EQ(run("convergence --jobs 2 --out " + out.string()), 0);
  const std::string text = ncpar::io::read_file(out / "convergence.csv");
  EXPECT_EQ(text.substr(0, 17), "h,dt,error,order\n");
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 5);
}

TEST(Cli, ExitCodes) {
  const fs::path out = scratch("codes");
  EXPECT_EQ(run("solve --config " + (kConfigs / "growth1d.cfg").string() + " --out " + out.string()), 0);
  // The uniqueness condition fails for a negative potential.
  EXPECT_EQ(run("check --config " + (kConfigs / "growth1d.cfg").string() + " --out " + out.string()), 1);
  EXPECT_EQ(run("solve --config " + (kConfigs / "nonpsd.cfg").string() + " --out " + out.string()), 2);
  EXPECT_EQ(run("sharpness --s 0.4 --out " + out.string()), 2);
  EXPECT_EQ(run("convergence --preset growth1d --out " + out.string()), 2);
  EXPECT_EQ(run("solve --config /nonexistent.cfg"), 2);
  EXPECT_EQ(run("frobnicate"), 2);
  EXPECT_EQ(run(""), 2);
  EXPECT_EQ(run("--help"), 0);
}

TEST(Cli, NumericalFailureExitCode) {
  const fs::path out = scratch("numeric");
  const fs::path cfg = out / "neumann.cfg";
  // No constraint, no Robin mass and no potential: constants lie in the
  // kernel of the (+)-form.
  ncpar::io::write_atomic(cfg, "problem.preset = heat1d\nproblem.dirichlet = none\nproblem.b0 = 0\n");
  EXPECT_EQ(run("solve --config " + cfg.string() + " --out " + out.string()), 3);
}
