#pragma once

#include <string>
#include <vector>

#include "nemel/sim.hpp"

namespace nemel::verify {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct SuiteResult {
  std::string suite;
  std::vector<CheckResult> checks;
  bool passed() const;
};

/// Hermetic invariant suites (fixed seeds, no config files):
/// conservation | dissipation | unitlength | boltzmann | convergence | appendixB.
/// `size` scales the grid of the simulation-based checks (default 64).
SuiteResult run_suite(const std::string& name, int size = 64);

std::vector<std::string> suite_names();

/// The standard coupled smoke scenario shared by the suites: two species
/// z = +-1 with opposite concentration bumps, a director twist, valid Parodi
/// coefficients, auto time step.
RunConfig smoke_config(int n, const std::string& out_dir);

/// The same scenario as a config document for driving the CLI.
std::string smoke_config_toml(int n, const std::string& out_dir, long max_steps);

}  // namespace nemel::verify
