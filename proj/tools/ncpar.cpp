// ncpar: command-line driver.
//
//   ncpar solve       --config run.cfg --out DIR
//   ncpar eigs        --config run.cfg --out DIR [--vectors]
//   ncpar convergence --config run.cfg --out DIR [--jobs N]
//   ncpar check       --config run.cfg --out DIR [--seed N]
//   ncpar sharpness   [--s 0.75] [--epsilon E] [--terms N] --out DIR
//
// Exit codes: 0 pass, 1 check failure, 2 config/usage error, 3 numerical failure.

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "ncpar/artifacts.hpp"
#include "ncpar/ncpar.hpp"

namespace fs = std::filesystem;
using namespace ncpar;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitCheckFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct Options {
  std::string config_path;
  std::string preset;
  fs::path out = ".";
  int jobs = 1;
  unsigned long seed = 1;
  bool vectors = false;
  std::optional<double> s;
  std::optional<double> epsilon;
  std::optional<std::int64_t> terms;
};

RunConfig load_config(const Options& o) {
  RunConfig c = o.config_path.empty() ? RunConfig{} : parse_config(io::read_file(o.config_path));
  if (!o.preset.empty()) c.preset = o.preset;
  return c;
}

void print_checks(const RunOutcome& out) {
  for (const CheckResult& c : out.checks) {
    std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << " value=" << io::fmt(c.value)
              << " threshold=" << io::fmt(c.threshold) << '\n';
  }
}

void write_mesh(const fs::path& dir, const Mesh& mesh) {
  io::write_atomic(dir / "nodes.csv", nodes_csv(mesh));
  io::write_atomic(dir / "elements.csv", elements_csv(mesh));
  io::write_atomic(dir / "facets.csv", facets_csv(mesh));
}

int write_solve(const Options& o, const RunOutcome& out) {
  const Discretization& d = out.disc;
  write_mesh(o.out, d.mesh);
  io::write_atomic(o.out / "trajectory.csv", artifacts::trajectory_csv(out.trajectory));
  const CVector u = reconstruct_solution(out.trajectory, d.basis.vectors, d.forms.dofs,
                                         out.trajectory.times.back());
  io::write_atomic(o.out / "solution_t.csv", artifacts::solution_csv(u));
  io::write_atomic(o.out / "report.csv", artifacts::report_csv(out));
  const EstimateReport& e = out.estimates;
  std::cout << "preset " << load_config(o).preset << ": dofs=" << d.forms.N
            << " k=" << out.trajectory.k << " steps=" << out.trajectory.steps() << '\n'
            << "  bound rhs=" << io::fmt(e.rhs) << " sup lhs=" << io::fmt(e.sup_lhs)
            << " energy lhs=" << io::fmt(e.energy_lhs) << '\n';
  print_checks(out);
  return out.all_passed() ? kExitPass : kExitCheckFailure;
}

int cmd_solve(const Options& o) { return write_solve(o, run_solve(load_config(o), o.seed)); }

int cmd_check(const Options& o) {
  RunConfig c = load_config(o);
  c.checks = CheckSelection{true, true, true, true, true, true, true};
  return write_solve(o, run_solve(c, o.seed));
}

int cmd_eigs(const Options& o) {
  const Discretization d = discretize(load_config(o));
  write_mesh(o.out, d.mesh);
  io::write_atomic(o.out / "eigenvalues.csv", artifacts::eigenvalues_csv(d.basis));
  if (o.vectors) io::write_atomic(o.out / "eigenvectors.csv", artifacts::coordinate_csv(d.basis.vectors));
  const OrthogonalityReport r = verify_orthogonality(d.basis, d.forms.K_plus, d.forms.M);
  const bool ok = r.plus_residual <= kOrthoTol && r.mass_offdiag <= kOrthoTol;
  std::cout << "eigenpairs=" << d.basis.size() << " lambda_1=" << io::fmt(d.basis.eigenvalues(0))
            << '\n'
            << (ok ? "PASS" : "FAIL") << " orthogonality plus=" << io::fmt(r.plus_residual)
            << " mass=" << io::fmt(r.mass_offdiag) << '\n';
  return ok ? kExitPass : kExitCheckFailure;
}

int cmd_convergence(const Options& o) {
  const auto rows = run_convergence(load_config(o), o.jobs);
  io::write_atomic(o.out / "convergence.csv", artifacts::convergence_csv(rows));
  for (const ConvergenceRow& r : rows) {
    std::cout << "h=" << io::fmt(r.h) << " dt=" << io::fmt(r.dt) << " error=" << io::fmt(r.error)
              << " order=" << (r.order ? io::fmt(*r.order) : "-") << '\n';
  }
  return kExitPass;
}

int cmd_sharpness(const Options& o) {
  RunConfig c = load_config(o);
  const std::optional<double> s = o.s ? o.s : c.sharpness_s;
  std::optional<double> eps = o.epsilon ? o.epsilon : c.sharpness_epsilon;
  const std::int64_t terms = o.terms ? *o.terms : c.sharpness_terms;
  if (!s && !eps) throw Error(ErrorCode::ConfigError, "cli", "sharpness needs --s or --epsilon");
  if (!eps) eps = find_divergence_epsilon(*s, terms).epsilon;
  const artifacts::SharpnessResult r = artifacts::sharpness_csv(s, *eps, terms);
  io::write_atomic(o.out / "sharpness.csv", r.csv);
  std::cout << r.csv;
  return r.consistent ? kExitPass : kExitCheckFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Faedo-Galerkin solver for non-coercive parabolic problems"};
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config_path, "key = value run file")->check(CLI::ExistingFile);
    sub->add_option("--preset", o.preset, "problem preset (overrides problem.preset)");
    sub->add_option("--out", o.out, "output directory");
    sub->add_option("--jobs", o.jobs, "parallel convergence levels")->check(CLI::PositiveNumber);
    sub->add_option("--seed", o.seed, "seed for random-vector checks");
  };
  CLI::App* solve = app.add_subcommand("solve", "integrate and report a priori bounds");
  CLI::App* eigs = app.add_subcommand("eigs", "generalized eigenbasis");
  CLI::App* conv = app.add_subcommand("convergence", "refinement study against an oracle");
  CLI::App* check = app.add_subcommand("check", "solve with every property check enabled");
  CLI::App* sharp = app.add_subcommand("sharpness", "series of the non-embedding example");
  for (CLI::App* sub : {solve, eigs, conv, check, sharp}) common(sub);
  eigs->add_flag("--vectors", o.vectors, "also write eigenvectors.csv");
  sharp->add_option("--s", o.s, "Sobolev index in (0,1]");
  sharp->add_option("--epsilon", o.epsilon, "series parameter; default (2s-1)/2");
  sharp->add_option("--terms", o.terms, "truncation N")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitConfig;
  }

  try {
    if (*solve) return cmd_solve(o);
    if (*eigs) return cmd_eigs(o);
    if (*conv) return cmd_convergence(o);
    if (*check) return cmd_check(o);
    return cmd_sharpness(o);
  } catch (const Error& e) {
    std::cerr << e.what() << '\n';
    return is_numerical(e.code()) ? kExitNumerical : kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }
}
