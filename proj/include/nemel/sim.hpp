#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "nemel/director.hpp"
#include "nemel/energy.hpp"
#include "nemel/equilibrium.hpp"
#include "nemel/flow.hpp"
#include "nemel/grid.hpp"
#include "nemel/material.hpp"
#include "nemel/nernst_planck.hpp"

namespace nemel {

/// Dynamic tuple z = (c, v, d) plus the diagnostic fields of the last step.
struct State {
  double t = 0.0;
  IonState ion;
  FlowState flow;
  DirectorField director;
  CellField phi;  // elliptic solve for (c, d) of the most recent stage

  State() = default;
  explicit State(const Grid& g) : flow(g), director(g), phi(g) {}
};

struct Tolerances {
  double poisson = 1e-10;
  double pressure = 1e-10;
  double steady = 1e-6;
  double newton = 1e-10;
  double parodi = 1e-12;
  int max_iter = 20000;
};

enum class DtPolicy { Fixed, Auto };

struct InitialSpec {
  std::string preset = "uniform";  // uniform | perturbed-equilibrium | twist | shear-cell
  std::vector<double> c0;          // background concentration per species
  double theta0 = 0.0;             // base director angle
  double amp_d = 0.0;              // director twist amplitude (radians)
  double amp_c = 0.0;              // concentration perturbation amplitude
  double amp_v = 0.0;              // stream-function amplitude (shear-cell)
};

struct RunConfig {
  Grid grid;
  MaterialParams material;
  InitialSpec initial;
  DtPolicy dt_policy = DtPolicy::Auto;
  double dt_fixed = 0.0;
  double safety = 0.4;
  double t_final = 0.1;
  long max_steps = -1;  // <0: unlimited
  long snapshot_every = 0;  // 0: initial and final only
  bool renormalize = false;
  bool override_validity = false;
  Tolerances tol;
  std::string output_dir = "out";
};

/// Stability bound dt = safety * min(advective, diffusive, ion-positivity).
double stable_dt(const Grid& g, const State& s, const MaterialParams& params, double safety);

struct StepDiagnostics {
  EnergyReport report;       // energies and dissipation at the step's start state
  ResidualRecord residual;   // distance to equilibrium at the start state
  double dt = 0.0;
};

/// One splitting step (potential -> director -> ions -> flow). The input state
/// is never mutated: any stage failure propagates with the caller's state
/// intact.
State step(const Grid& g, const State& s, const MaterialParams& params, double dt,
           bool renormalize, const Tolerances& tol, StepDiagnostics* diag = nullptr);

State initial_state(const RunConfig& cfg);

struct RunSummary {
  long steps = 0;
  double final_t = 0.0;
  std::string verdict;  // "completed" | "converged-to-equilibrium"
  double max_len_dev = 0.0;
  double min_c = 0.0;
  double max_mass_drift = 0.0;  // relative, over all species and steps
  ResidualRecord final_residual;
  std::string energy_log_path;
  std::string output_dir;
};

struct RunCallbacks {
  // Invoked once per logged state with (step, state, diagnostics of the step
  // about to start). Used by the CLI for progress and by tests.
  std::function<void(long, const State&, const StepDiagnostics&)> on_log;
};

/// Run a trajectory: writes snapshots and the energy log under
/// cfg.output_dir, halts early on steady state. `resume` continues from a
/// given state (its t and step offset) instead of the preset initial state.
RunSummary run(const RunConfig& cfg, std::optional<State> resume = std::nullopt,
               long step_offset = 0, const RunCallbacks* callbacks = nullptr);

}  // namespace nemel
