#include "nemel/sim.hpp"

#include <cmath>
#include <filesystem>
#include <limits>

#include "nemel/poisson.hpp"
#include "nemel/snapshot.hpp"

namespace nemel {

namespace {

CellField total_charge(const Grid& g, const IonState& ion,
                       const std::vector<IonSpecies>& species) {
  CellField rho(g);
  for (std::size_t s = 0; s < ion.c.size(); ++s) {
    const double z = species[s].valence;
    if (z == 0.0) continue;
    for (std::size_t k = 0; k < rho.size(); ++k) rho[k] += z * ion.c[s][k];
  }
  return rho;
}

CellField solve_potential(const Grid& g, const State& s, const MaterialParams& params,
                          const Tolerances& tol) {
  EllipticProblem p;
  p.grid = g;
  p.eps = epsilon_field(g, s.director.d, params.permittivity);
  p.rhs = total_charge(g, s.ion, params.species);
  p.tol = tol.poisson;
  p.max_iter = tol.max_iter;
  const CellField* warm = s.phi.size() == g.cells() ? &s.phi : nullptr;
  return solve_aniso_dirichlet(p, nullptr, warm);
}

}  // namespace

double stable_dt(const Grid& g, const State& s, const MaterialParams& params, double safety) {
  const double h = std::min(g.hx, g.hy);
  const double vmax = max_velocity(s.flow.u, s.flow.v);
  const double advective =
      vmax > 0.0 ? h / vmax : std::numeric_limits<double>::infinity();

  double diffusivity = params.leslie.alpha4;
  for (const auto& sp : params.species) {
    double lo, hi;
    sp.diffusion.sym_eigenvalues(lo, hi);
    diffusivity = std::max(diffusivity, hi);
  }
  diffusivity = std::max(diffusivity, 1.0 / params.leslie.gamma1());
  const double diffusive = h * h / (4.0 * diffusivity);

  const double ion_dt =
      np_positivity_dt(g, s.ion, params.species, s.phi, s.flow.u, s.flow.v);

  return safety * std::min(advective, std::min(diffusive, ion_dt));
}

State step(const Grid& g, const State& s, const MaterialParams& params, double dt,
           bool renormalize, const Tolerances& tol, StepDiagnostics* diag) {
  // Stage 1: potential consistent with (c^n, d^n).
  const CellField phi = solve_potential(g, s, params, tol);

  // Stage 2: director rates; ring(d) is retained for the Leslie stress.
  const DirectorRates rates = director_rhs(g, s.director.d, s.flow.u, s.flow.v, phi, params);

  if (diag != nullptr) {
    diag->report = energy(g, s.ion, s.flow.u, s.flow.v, s.director.d, phi, params);
    dissipation(g, s.ion, s.flow.u, s.flow.v, s.director.d, phi, rates.d_ring, params,
                diag->report);
    diag->residual = equilibrium_residual(g, s.ion, s.flow.u, s.flow.v, s.director.d, phi,
                                          params);
    diag->dt = dt;
  }

  DirectorField d_next = director_step(g, s.director, rates.dt_d, dt, renormalize);

  // Stage 3: ions with the stage-consistent potential.
  IonState ion_next = np_step(g, s.ion, params.species, phi, s.flow.u, s.flow.v, dt);

  // Stage 4: momentum with stresses assembled from the start-of-step fields.
  FaceFieldX fx;
  FaceFieldY fy;
  body_force(g, s.director.d, phi, s.flow.u, s.flow.v, rates.d_ring, params, fx, fy);
  NsOptions nso;
  nso.alpha4 = params.leslie.alpha4;
  nso.bc = FlowBc::NoSlip;
  nso.pressure_tol = tol.pressure;
  nso.max_iter = tol.max_iter;
  FlowState flow_next = ns_step(g, s.flow, dt, fx, fy, nso);

  State next(g);
  next.t = s.t + dt;
  next.ion = std::move(ion_next);
  next.flow = std::move(flow_next);
  next.director = std::move(d_next);
  next.phi = phi;
  return next;
}

State initial_state(const RunConfig& cfg) {
  const Grid& g = cfg.grid;
  const std::size_t ns = cfg.material.species.size();
  if (ns == 0) throw config_error("initial_state: at least one species required");
  if (cfg.initial.c0.size() != ns) {
    throw config_error("initial_state: c0 must list one background per species");
  }
  for (double c : cfg.initial.c0) {
    if (!(c > 0.0)) throw config_error("initial_state: backgrounds must be positive");
  }

  State s(g);
  const std::string& preset = cfg.initial.preset;
  // No-flux-compatible perturbation profile: zero wall-normal gradient, so
  // the first steps are free of an unresolved diffusive boundary layer. Also
  // integrates to zero, keeping the configured backgrounds the exact masses.
  auto bump = [&](int i, int j) {
    return std::cos(M_PI * g.xc(i) / g.Lx) * std::cos(M_PI * g.yc(j) / g.Ly);
  };

  auto twist_director = [&]() {
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) {
        const double theta =
            cfg.initial.theta0 + cfg.initial.amp_d * std::cos(M_PI * g.xc(i) / g.Lx);
        s.director.d.x.a[g.cidx(i, j)] = std::cos(theta);
        s.director.d.y.a[g.cidx(i, j)] = std::sin(theta);
      }
  };

  if (preset == "uniform" || preset == "shear-cell") {
    std::vector<CellField> fields;
    for (std::size_t m = 0; m < ns; ++m) fields.emplace_back(g, cfg.initial.c0[m]);
    s.ion = IonState::from_fields(g, std::move(fields));
    for (std::size_t k = 0; k < g.cells(); ++k) {
      s.director.d.x.a[k] = std::cos(cfg.initial.theta0);
      s.director.d.y.a[k] = std::sin(cfg.initial.theta0);
    }
    if (preset == "shear-cell") {
      // Discrete curl of a node stream function: exactly divergence free and
      // zero on all boundary faces.
      auto psi = [&](int ni, int nj) {
        const double x = g.xf(ni), y = g.yf(nj);
        const double sfun = 16.0 * x * (g.Lx - x) * y * (g.Ly - y) / (g.Lx * g.Lx * g.Ly * g.Ly);
        return cfg.initial.amp_v * sfun * sfun;
      };
      for (int j = 0; j < g.ny; ++j)
        for (int fi = 0; fi <= g.nx; ++fi) {
          s.flow.u[g.xidx(fi, j)] = (psi(fi, j + 1) - psi(fi, j)) / g.hy;
        }
      for (int fj = 0; fj <= g.ny; ++fj)
        for (int i = 0; i < g.nx; ++i) {
          s.flow.v[g.yidx(i, fj)] = -(psi(i + 1, fj) - psi(i, fj)) / g.hx;
        }
    }
  } else if (preset == "twist") {
    std::vector<CellField> fields;
    for (std::size_t m = 0; m < ns; ++m) {
      CellField c(g);
      const double sign = m % 2 == 0 ? 1.0 : -1.0;
      for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
          c[g.cidx(i, j)] = cfg.initial.c0[m] * (1.0 + sign * cfg.initial.amp_c * bump(i, j));
        }
      fields.push_back(std::move(c));
    }
    s.ion = IonState::from_fields(g, std::move(fields));
    twist_director();
  } else if (preset == "perturbed-equilibrium") {
    std::vector<double> masses;
    for (double c0 : cfg.initial.c0) masses.push_back(c0 * g.Lx * g.Ly);
    DirectorField d0(g);
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) {
        const double theta =
            cfg.initial.theta0 + cfg.initial.amp_d * std::cos(M_PI * g.xc(i) / g.Lx);
        d0.d.x.a[g.cidx(i, j)] = std::cos(theta);
        d0.d.y.a[g.cidx(i, j)] = std::sin(theta);
      }
    EquilibriumOptions eopt;
    eopt.pb.tol = cfg.tol.newton;
    eopt.joint_tol = std::max(cfg.tol.steady * 1e-2, 1e-10);
    EquilibriumSolution eq = solve_equilibrium(g, cfg.material, masses, d0, eopt);
    std::vector<CellField> fields;
    for (std::size_t m = 0; m < ns; ++m) {
      CellField c = eq.c[m];
      for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
          c[g.cidx(i, j)] *= 1.0 + cfg.initial.amp_c * bump(i, j);
        }
      fields.push_back(std::move(c));
    }
    s.ion = IonState::from_fields(g, std::move(fields));
    s.director = eq.director;
  } else {
    throw config_error("initial_state: unknown preset '" + preset + "'");
  }

  s.director.update_len_dev();
  s.t = 0.0;
  s.phi = solve_potential(g, s, cfg.material, cfg.tol);
  return s;
}

namespace {

void write_state_snapshot(const Grid& g, const State& s, const MaterialParams& params,
                          const Tolerances& tol, const std::string& dir, long step) {
  char tag[32];
  std::snprintf(tag, sizeof(tag), "snap_%06ld", step);
  const std::string base = dir + "/" + tag + "_";
  auto header = [&](const std::string& field, int nx, int ny) {
    SnapshotHeader h;
    h.field = field;
    h.nx = nx;
    h.ny = ny;
    h.Lx = g.Lx;
    h.Ly = g.Ly;
    h.t = s.t;
    return h;
  };
  for (std::size_t m = 0; m < s.ion.c.size(); ++m) {
    write_snapshot_field(base + "c" + std::to_string(m + 1) + ".dat",
                         header("c" + std::to_string(m + 1), g.nx, g.ny), s.ion.c[m].a);
  }
  write_snapshot_field(base + "u.dat", header("u", g.nx + 1, g.ny), s.flow.u.a);
  write_snapshot_field(base + "v.dat", header("v", g.nx, g.ny + 1), s.flow.v.a);
  write_snapshot_field(base + "d1.dat", header("d1", g.nx, g.ny), s.director.d.x.a);
  write_snapshot_field(base + "d2.dat", header("d2", g.nx, g.ny), s.director.d.y.a);
  const CellField phi = solve_potential(g, s, params, tol);
  write_snapshot_field(base + "phi.dat", header("phi", g.nx, g.ny), phi.a);
  write_snapshot_field(base + "pi.dat", header("pi", g.nx, g.ny), s.flow.pi.a);
}

StepDiagnostics evaluate_state(const Grid& g, State& s, const MaterialParams& params,
                               const Tolerances& tol) {
  StepDiagnostics diag;
  s.phi = solve_potential(g, s, params, tol);
  const DirectorRates rates = director_rhs(g, s.director.d, s.flow.u, s.flow.v, s.phi, params);
  diag.report = energy(g, s.ion, s.flow.u, s.flow.v, s.director.d, s.phi, params);
  dissipation(g, s.ion, s.flow.u, s.flow.v, s.director.d, s.phi, rates.d_ring, params,
              diag.report);
  diag.residual =
      equilibrium_residual(g, s.ion, s.flow.u, s.flow.v, s.director.d, s.phi, params);
  return diag;
}

}  // namespace

RunSummary run(const RunConfig& cfg, std::optional<State> resume, long step_offset,
               const RunCallbacks* callbacks) {
  const ValidityReport validity = validate_leslie(cfg.material.leslie, cfg.tol.parodi);
  if (!validity.satisfies_positivity && !cfg.override_validity) {
    std::string msg = "run: Leslie coefficients violate the validity conditions:";
    for (const auto& v : validity.violations) msg += " " + v + ";";
    throw config_error(msg);
  }
  if (cfg.material.species.empty()) throw config_error("run: no species configured");
  for (const auto& sp : cfg.material.species) {
    double lo, hi;
    sp.diffusion.sym_eigenvalues(lo, hi);
    if (!(lo > 0.0)) throw config_error("run: diffusion matrices must be positive definite");
  }
  if (!(cfg.material.permittivity.eps_perp > 0.0) || cfg.material.permittivity.eps_a < 0.0) {
    throw config_error("run: permittivity requires eps_perp > 0 and eps_a >= 0");
  }

  const Grid& g = cfg.grid;
  std::filesystem::create_directories(cfg.output_dir);

  State state = resume.has_value() ? std::move(*resume) : initial_state(cfg);

  RunSummary sum;
  sum.output_dir = cfg.output_dir;
  sum.energy_log_path = cfg.output_dir + "/energy.csv";
  sum.min_c = std::numeric_limits<double>::infinity();
  EnergyLogWriter log(sum.energy_log_path, static_cast<int>(state.ion.c.size()));

  write_state_snapshot(g, state, cfg.material, cfg.tol, cfg.output_dir, step_offset);

  double prev_e = 0.0, prev_d = 0.0, prev_dt = 0.0;
  bool have_prev = false;
  long k = step_offset;
  std::string verdict = "completed";

  const auto log_state = [&](const StepDiagnostics& diag) {
    const double audit_r =
        have_prev ? (diag.report.e_total - prev_e) / prev_dt + prev_d : 0.0;
    std::vector<double> row = {diag.report.e_kinetic,  diag.report.e_elastic,
                               diag.report.e_entropy,  diag.report.e_electric,
                               diag.report.e_total,    diag.report.d_ionic,
                               diag.report.d_viscous,  diag.report.d_rotational,
                               audit_r};
    double minc = std::numeric_limits<double>::infinity();
    for (std::size_t m = 0; m < state.ion.c.size(); ++m) {
      const double mass = cell_sum(g, state.ion.c[m]);
      row.push_back(mass);
      minc = std::min(minc, cell_min(state.ion.c[m]));
      const double drift =
          std::fabs(mass - state.ion.masses[m]) / std::fabs(state.ion.masses[m]);
      sum.max_mass_drift = std::max(sum.max_mass_drift, drift);
    }
    row.push_back(minc);
    row.push_back(state.director.max_len_dev);
    row.push_back(state.flow.div_inf);
    log.write_row(k, state.t, have_prev ? prev_dt : 0.0, row);

    sum.min_c = std::min(sum.min_c, minc);
    sum.max_len_dev = std::max(sum.max_len_dev, state.director.max_len_dev);
    sum.final_residual = diag.residual;
    if (callbacks != nullptr && callbacks->on_log) callbacks->on_log(k, state, diag);
  };

  while (true) {
    const bool time_done = state.t >= cfg.t_final * (1.0 - 1e-12);
    const bool steps_done =
        cfg.max_steps >= 0 && (k - step_offset) >= cfg.max_steps;
    if (time_done || steps_done) {
      StepDiagnostics diag = evaluate_state(g, state, cfg.material, cfg.tol);
      log_state(diag);
      break;
    }

    double dt = cfg.dt_policy == DtPolicy::Fixed
                    ? cfg.dt_fixed
                    : stable_dt(g, state, cfg.material, cfg.safety);
    if (!(dt > 0.0)) throw config_error("run: non-positive time step");
    if (state.t + dt > cfg.t_final) dt = cfg.t_final - state.t;

    StepDiagnostics diag;
    State next = step(g, state, cfg.material, dt, cfg.renormalize, cfg.tol, &diag);
    log_state(diag);

    if (diag.residual.max_component() < cfg.tol.steady && k > step_offset) {
      verdict = "converged-to-equilibrium";
      break;
    }

    prev_e = diag.report.e_total;
    prev_d = diag.report.d_total;
    prev_dt = dt;
    have_prev = true;
    state = std::move(next);
    ++k;

    if (cfg.snapshot_every > 0 && (k - step_offset) % cfg.snapshot_every == 0) {
      write_state_snapshot(g, state, cfg.material, cfg.tol, cfg.output_dir, k);
    }
  }

  write_state_snapshot(g, state, cfg.material, cfg.tol, cfg.output_dir, k);
  sum.steps = k - step_offset;
  sum.final_t = state.t;
  sum.verdict = verdict;
  return sum;
}

}  // namespace nemel
