#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>

#include <CLI11.hpp>

#include "nemel/config.hpp"
#include "nemel/equilibrium.hpp"
#include "nemel/sim.hpp"
#include "nemel/snapshot.hpp"
#include "nemel/verify.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitInvariant = 4;

void print_validity(const nemel::ValidityReport& r) {
  std::printf("positivity conditions: %s\n", r.satisfies_positivity ? "satisfied" : "VIOLATED");
  for (const auto& v : r.violations) std::printf("  violated: %s\n", v.c_str());
  std::printf("parodi relation:       %s\n", r.parodi_holds ? "holds" : "does not hold");
  std::printf("weak linear set:       %s\n",
              r.weak_conditions_hold ? "satisfied (reported only)" : "violated");
  std::printf("gamma1 = %.17g  gamma2 = %.17g  beta = %.17g  mu0 = %.17g\n", r.gamma1, r.gamma2,
              r.beta, r.mu0);
  std::printf("coercivity delta = %.17g\n", r.delta);
  std::printf("Hieber-Pruess translation: mu_s = %.17g  mu_0 = %.17g  mu_V = %.17g  "
              "mu_D = %.17g  mu_L = %.17g  mu_P = %.17g\n",
              r.hp.mu_s, r.hp.mu_0, r.hp.mu_v, r.hp.mu_d, r.hp.mu_l, r.hp.mu_p);
}

int cmd_validate(const std::string& config_path) {
  // Parse without the gate so the report is printed even for invalid sets.
  const nemel::ParsedConfig parsed = nemel::parse_config(config_path, true);
  print_validity(parsed.validity);
  return parsed.validity.satisfies_positivity ? kExitOk : kExitConfig;
}

int cmd_run(const std::string& config_path, const std::string& out_override, long max_steps,
            bool override_validity) {
  nemel::ParsedConfig parsed = nemel::parse_config(config_path, override_validity);
  nemel::RunConfig& cfg = parsed.run;
  if (!out_override.empty()) cfg.output_dir = out_override;
  if (max_steps >= 0) cfg.max_steps = max_steps;
  cfg.override_validity = override_validity;

  const nemel::RunSummary sum = nemel::run(cfg);
  std::printf("verdict:        %s\n", sum.verdict.c_str());
  std::printf("steps:          %ld\n", sum.steps);
  std::printf("final t:        %.17g\n", sum.final_t);
  std::printf("max |c| drift:  %.3e (relative)\n", sum.max_mass_drift);
  std::printf("min c:          %.17g\n", sum.min_c);
  std::printf("max | |d|-1 |:  %.3e\n", sum.max_len_dev);
  std::printf("final residuals: v=%.3e grad_mu=%.3e d_ring=%.3e director=%.3e\n",
              sum.final_residual.v_inf, sum.final_residual.grad_mu_inf,
              sum.final_residual.d_ring_inf, sum.final_residual.director_inf);
  std::printf("energy log:     %s\n", sum.energy_log_path.c_str());
  return kExitOk;
}

int cmd_equilibrium(const std::string& config_path, const std::string& out_override) {
  nemel::ParsedConfig parsed = nemel::parse_config(config_path, false);
  const nemel::RunConfig& cfg = parsed.run;
  const nemel::Grid& g = cfg.grid;
  const std::string dir = out_override.empty() ? cfg.output_dir : out_override;
  std::filesystem::create_directories(dir);

  std::vector<double> masses;
  for (double c0 : cfg.initial.c0) masses.push_back(c0 * g.Lx * g.Ly);
  nemel::DirectorField d0(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const double theta =
          cfg.initial.theta0 + cfg.initial.amp_d * std::cos(M_PI * g.xc(i) / g.Lx);
      d0.d.x.a[g.cidx(i, j)] = std::cos(theta);
      d0.d.y.a[g.cidx(i, j)] = std::sin(theta);
    }

  nemel::EquilibriumOptions opt;
  opt.pb.tol = cfg.tol.newton;
  opt.joint_tol = cfg.tol.steady;
  const nemel::EquilibriumSolution eq =
      nemel::solve_equilibrium(g, cfg.material, masses, d0, opt);

  auto header = [&](const std::string& field) {
    nemel::SnapshotHeader h;
    h.field = field;
    h.nx = g.nx;
    h.ny = g.ny;
    h.Lx = g.Lx;
    h.Ly = g.Ly;
    h.t = 0.0;
    return h;
  };
  nemel::write_snapshot_field(dir + "/eq_phi.dat", header("phi"), eq.phi.a);
  nemel::write_snapshot_field(dir + "/eq_d1.dat", header("d1"), eq.director.d.x.a);
  nemel::write_snapshot_field(dir + "/eq_d2.dat", header("d2"), eq.director.d.y.a);
  nemel::write_snapshot_field(dir + "/eq_pi.dat", header("pi"), eq.pi.a);
  for (std::size_t m = 0; m < eq.c.size(); ++m) {
    nemel::write_snapshot_field(dir + "/eq_c" + std::to_string(m + 1) + ".dat",
                                header("c" + std::to_string(m + 1)), eq.c[m].a);
  }
  std::printf("poisson-boltzmann residual: %.3e\n", eq.poisson_residual);
  std::printf("director residual:          %.3e\n", eq.director_residual);
  for (std::size_t m = 0; m < eq.Z.size(); ++m) {
    std::printf("Z_%zu = %.17g\n", m + 1, eq.Z[m]);
  }
  std::printf("fields written to %s\n", dir.c_str());
  return kExitOk;
}

int cmd_verify(const std::string& suite, int size) {
  const nemel::verify::SuiteResult res = nemel::verify::run_suite(suite, size);
  for (const auto& c : res.checks) {
    std::printf("%s %s: %s\n", c.passed ? "PASS" : "FAIL", c.name.c_str(), c.detail.c_str());
  }
  std::printf("suite %s: %s\n", res.suite.c_str(), res.passed() ? "PASS" : "FAIL");
  return res.passed() ? kExitOk : kExitInvariant;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"nemel: 2D nematic electrolyte simulator (ion electrodiffusion + "
               "electrostatics + incompressible flow + director dynamics)"};
  app.require_subcommand(1);

  std::string config_path, out_dir, suite;
  long max_steps = -1;
  bool override_validity = false;
  int size = 64;

  auto* validate = app.add_subcommand("validate", "Check Leslie coefficient conditions");
  validate->add_option("config", config_path, "TOML configuration")->required();

  auto* runcmd = app.add_subcommand("run", "Run a dynamic simulation");
  runcmd->add_option("config", config_path, "TOML configuration")->required();
  runcmd->add_option("--out", out_dir, "Output directory override");
  runcmd->add_option("--max-steps", max_steps, "Step cap override");
  runcmd->add_flag("--override-validity", override_validity,
                   "Run even if the Leslie coefficients violate the validity conditions");

  auto* eqcmd = app.add_subcommand("equilibrium", "Solve the coupled equilibrium system");
  eqcmd->add_option("config", config_path, "TOML configuration")->required();
  eqcmd->add_option("--out", out_dir, "Output directory override");

  auto* verify = app.add_subcommand("verify", "Run a hermetic invariant suite");
  verify->add_option("suite", suite, "conservation|dissipation|unitlength|boltzmann|convergence|appendixB")
      ->required();
  verify->add_option("--size", size, "Grid size for simulation-based checks");

  CLI11_PARSE(app, argc, argv);

  try {
    if (validate->parsed()) return cmd_validate(config_path);
    if (runcmd->parsed()) return cmd_run(config_path, out_dir, max_steps, override_validity);
    if (eqcmd->parsed()) return cmd_equilibrium(config_path, out_dir);
    if (verify->parsed()) return cmd_verify(suite, size);
  } catch (const nemel::config_error& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const nemel::numerical_error& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitNumerical;
  }
  return kExitOk;
}
