#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "nemel/sim.hpp"
#include "nemel/snapshot.hpp"
#include "nemel/verify.hpp"

using namespace nemel;

TEST_SUITE_BEGIN("sim");

TEST_CASE("stable_dt formula") {
  const Grid g(64, 64, 1.0, 1.0);
  RunConfig cfg = verify::smoke_config(64, "");
  cfg.initial.preset = "uniform";
  cfg.initial.amp_c = 0.0;
  cfg.initial.amp_d = 0.0;
  const State s = initial_state(cfg);
  SUBCASE("diffusive regime: dt = safety * h^2/4 for unit coefficients") {
    const double dt = stable_dt(g, s, cfg.material, 0.4);
    CHECK(dt == doctest::Approx(0.4 * g.hx * g.hx / 4.0).epsilon(1e-12));
  }
  SUBCASE("doubling resolution quarters dt") {
    RunConfig cfg2 = verify::smoke_config(128, "");
    cfg2.initial.preset = "uniform";
    cfg2.initial.amp_c = 0.0;
    cfg2.initial.amp_d = 0.0;
    const State s2 = initial_state(cfg2);
    const double dt1 = stable_dt(g, s, cfg.material, 0.4);
    const double dt2 = stable_dt(cfg2.grid, s2, cfg2.material, 0.4);
    CHECK(dt1 / dt2 == doctest::Approx(4.0).epsilon(1e-10));
  }
  SUBCASE("huge velocity switches to the advective limit") {
    State fast = s;
    for (int j = 0; j < g.ny; ++j)
      for (int fi = 1; fi < g.nx; ++fi) fast.flow.u[g.xidx(fi, j)] = 1000.0;
    const double dt = stable_dt(g, fast, cfg.material, 0.4);
    CHECK(dt <= 0.4 * g.hx / 1000.0 * 1.0001);
  }
}

TEST_CASE("step is transactional: a failing stage leaves the state unchanged") {
  RunConfig cfg = verify::smoke_config(16, "");
  const State s = initial_state(cfg);
  const State before_u = s;
  Tolerances bad = cfg.tol;
  bad.max_iter = 1;  // fault injection: the elliptic/pressure solves cannot converge
  CHECK_THROWS_AS(step(cfg.grid, s, cfg.material, 1e-5, false, bad), numerical_error);
  for (std::size_t k = 0; k < s.ion.c[0].size(); ++k) {
    CHECK(s.ion.c[0][k] == before_u.ion.c[0][k]);
  }
  CHECK(s.t == before_u.t);
}

TEST_CASE("equilibrium input is a fixed point up to discretization") {
  RunConfig cfg = verify::smoke_config(24, "");
  cfg.initial.preset = "perturbed-equilibrium";
  cfg.initial.amp_c = 0.0;  // exact equilibrium, no perturbation
  cfg.initial.amp_d = 0.2;
  cfg.initial.c0 = {1.2, 0.8};
  const State s = initial_state(cfg);
  const double dt = stable_dt(cfg.grid, s, cfg.material, 0.4);
  const State next = step(cfg.grid, s, cfg.material, dt, false, cfg.tol);
  const double h2 = cfg.grid.hx * cfg.grid.hx;
  for (std::size_t m = 0; m < s.ion.c.size(); ++m) {
    for (std::size_t k = 0; k < s.ion.c[m].size(); ++k) {
      CHECK(std::fabs(next.ion.c[m][k] - s.ion.c[m][k]) <= 20.0 * (h2 + 1e-8) * dt);
    }
  }
  CHECK(max_velocity(next.flow.u, next.flow.v) <= 20.0 * (h2 + 1e-8) * dt);
}

TEST_CASE("run writes logs and snapshots, and t_final = 0 is trivial") {
  const std::string dir =
      (std::filesystem::temp_directory_path() / "nemel_sim_trivial").string();
  std::filesystem::remove_all(dir);
  RunConfig cfg = verify::smoke_config(16, dir);
  cfg.t_final = 0.0;
  const RunSummary sum = run(cfg);
  CHECK(sum.steps == 0);
  CHECK(sum.verdict == "completed");
  CHECK(std::filesystem::exists(dir + "/energy.csv"));
  CHECK(std::filesystem::exists(dir + "/snap_000000_c1.dat"));
  const EnergyLogData log = read_energy_log(dir + "/energy.csv");
  CHECK(log.rows.size() == 1);
  std::filesystem::remove_all(dir);
}

TEST_CASE("invalid coefficients are refused before any work") {
  RunConfig cfg = verify::smoke_config(16, "/tmp/nemel_should_not_exist");
  cfg.material.leslie = LeslieCoefficients{};  // all zero: gamma1 = 0 violates the gate
  CHECK_THROWS_AS(run(cfg), config_error);
}

TEST_CASE("restart reproduces the uninterrupted energy log") {
  namespace fs = std::filesystem;
  const std::string dir_full = (fs::temp_directory_path() / "nemel_sim_full").string();
  const std::string dir_head = (fs::temp_directory_path() / "nemel_sim_head").string();
  const std::string dir_tail = (fs::temp_directory_path() / "nemel_sim_tail").string();
  for (const auto& d : {dir_full, dir_head, dir_tail}) fs::remove_all(d);

  RunConfig cfg = verify::smoke_config(16, dir_full);
  cfg.dt_policy = DtPolicy::Fixed;
  cfg.dt_fixed = 2e-5;
  cfg.t_final = 1e9;
  cfg.max_steps = 40;
  const RunSummary full = run(cfg);
  CHECK(full.steps == 40);

  cfg.output_dir = dir_head;
  cfg.max_steps = 20;
  State mid;
  RunCallbacks grab;
  grab.on_log = [&](long, const State& s, const StepDiagnostics&) { mid = s; };
  run(cfg, std::nullopt, 0, &grab);

  cfg.output_dir = dir_tail;
  cfg.max_steps = 20;
  run(cfg, mid, 20);

  const EnergyLogData logf = read_energy_log(dir_full + "/energy.csv");
  const EnergyLogData logt = read_energy_log(dir_tail + "/energy.csv");
  REQUIRE(logf.rows.size() == 41);
  REQUIRE(logt.rows.size() == 21);
  const std::size_t base = 20;
  for (std::size_t r = 0; r < logt.rows.size(); ++r) {
    for (std::size_t c = 0; c < logf.columns.size(); ++c) {
      const std::string& name = logf.columns[c];
      if (r == 0 && (name == "audit_r" || name == "dt")) continue;  // re-seeded on resume
      const double a = logf.rows[base + r][c];
      const double b = logt.rows[r][c];
      CHECK(std::fabs(a - b) <= 1e-12 * (1.0 + std::fabs(a)));
    }
  }
  for (const auto& d : {dir_full, dir_head, dir_tail}) fs::remove_all(d);
}

TEST_CASE("steady-state detection reports converged-to-equilibrium") {
  const std::string dir =
      (std::filesystem::temp_directory_path() / "nemel_sim_steady").string();
  std::filesystem::remove_all(dir);
  RunConfig cfg = verify::smoke_config(16, dir);
  cfg.initial.preset = "perturbed-equilibrium";
  cfg.initial.c0 = {1.1, 0.9};
  cfg.initial.amp_c = 0.01;
  cfg.initial.amp_d = 0.1;
  cfg.material.permittivity.eps_a = 0.2;
  cfg.tol.steady = 1e-4;
  cfg.t_final = 1e9;
  cfg.max_steps = 100000;
  const RunSummary sum = run(cfg);
  CHECK(sum.verdict == "converged-to-equilibrium");
  CHECK(sum.final_residual.max_component() < cfg.tol.steady);
  std::filesystem::remove_all(dir);
}

TEST_SUITE_END();
