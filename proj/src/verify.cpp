#include "nemel/verify.hpp"

#include <cmath>
#include <sstream>

namespace nemel::verify {

bool SuiteResult::passed() const {
  for (const auto& c : checks) {
    if (!c.passed) return false;
  }
  return !checks.empty();
}

std::vector<std::string> suite_names() {
  return {"conservation", "dissipation", "unitlength", "boltzmann", "convergence", "appendixB"};
}

RunConfig smoke_config(int n, const std::string& out_dir) {
  RunConfig cfg;
  cfg.grid = Grid(n, n, 1.0, 1.0);
  cfg.material.leslie = LeslieCoefficients{0.0, -0.5, 0.5, 1.0, 0.5, 0.5};
  cfg.material.species = {IonSpecies{+1.0, Mat2::identity()}, IonSpecies{-1.0, Mat2::identity()}};
  cfg.material.permittivity = Permittivity{1.0, 0.5};
  cfg.initial.preset = "twist";
  cfg.initial.c0 = {1.0, 1.0};
  cfg.initial.theta0 = 0.3;
  cfg.initial.amp_d = 0.3;
  cfg.initial.amp_c = 0.5;
  cfg.t_final = 1e9;  // step-capped by callers
  cfg.safety = 0.4;
  cfg.output_dir = out_dir;
  return cfg;
}

std::string smoke_config_toml(int n, const std::string& out_dir, long max_steps) {
  std::ostringstream os;
  os << "[grid]\nnx = " << n << "\nny = " << n << "\nLx = 1.0\nLy = 1.0\n\n";
  os << "[leslie]\nalpha1 = 0.0\nalpha2 = -0.5\nalpha3 = 0.5\nalpha4 = 1.0\n"
        "alpha5 = 0.5\nalpha6 = 0.5\n\n";
  os << "[permittivity]\neps_perp = 1.0\neps_a = 0.5\n\n";
  os << "[species.1]\nz = 1.0\nD = 1.0\nc0 = 1.0\n\n";
  os << "[species.2]\nz = -1.0\nD = 1.0\nc0 = 1.0\n\n";
  os << "[time]\nt_final = 1e9\ndt = \"auto\"\nsafety = 0.4\nmax_steps = " << max_steps << "\n\n";
  os << "[initial]\npreset = \"twist\"\ntheta0 = 0.3\namp_d = 0.3\namp_c = 0.5\n\n";
  os << "[output]\ndir = \"" << out_dir << "\"\n";
  return os.str();
}

namespace suites {
SuiteResult conservation(int size);
SuiteResult dissipation(int size);
SuiteResult unitlength(int size);
SuiteResult boltzmann(int size);
SuiteResult convergence(int size);
SuiteResult appendix_b(int size);
}  // namespace suites

SuiteResult run_suite(const std::string& name, int size) {
  if (name == "conservation") return suites::conservation(size);
  if (name == "dissipation") return suites::dissipation(size);
  if (name == "unitlength") return suites::unitlength(size);
  if (name == "boltzmann") return suites::boltzmann(size);
  if (name == "convergence") return suites::convergence(size);
  if (name == "appendixB") return suites::appendix_b(size);
  throw config_error("verify: unknown suite '" + name + "'");
}

}  // namespace nemel::verify
