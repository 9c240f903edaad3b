#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <random>

#include "nemel/config.hpp"
#include "nemel/snapshot.hpp"

using namespace nemel;

TEST_SUITE_BEGIN("config_io");

namespace {

const char* kMinimalConfig = R"(
# minimal valid configuration (Parodi coefficients)
[grid]
nx = 16
ny = 16

[leslie]
alpha2 = -0.5
alpha3 = 0.5
alpha4 = 1.0
alpha5 = 0.5
alpha6 = 0.5

[species.1]
z = 1.0
D = 1.0

[species.2]
z = -1.0
D = 1.0
)";

}  // namespace

TEST_CASE("parse_config accepts a minimal file and embeds the validity verdict") {
  const ParsedConfig p = parse_config_text(kMinimalConfig);
  CHECK(p.validity.satisfies_positivity);
  CHECK(p.validity.parodi_holds);
  CHECK(p.run.grid.nx == 16);
  CHECK(p.run.material.species.size() == 2);
  CHECK(p.run.material.species[1].valence == doctest::Approx(-1.0));
  CHECK(p.run.dt_policy == DtPolicy::Auto);
}

TEST_CASE("alpha4 = 0 is rejected citing the violated condition") {
  std::string text = kMinimalConfig;
  const auto pos = text.find("alpha4 = 1.0");
  text.replace(pos, 12, "alpha4 = 0.0");
  try {
    parse_config_text(text);
    FAIL("expected config_error");
  } catch (const config_error& e) {
    CHECK(std::string(e.what()).find("alpha4 > 0") != std::string::npos);
  }
}

TEST_CASE("unknown keys are rejected by name") {
  std::string text = kMinimalConfig;
  text += "\n[leslie]\n";  // duplicate section header is fine, keys merge
  try {
    parse_config_text(std::string(kMinimalConfig) + "\nalpha7 = 1.0\n");
    FAIL("expected config_error");
  } catch (const config_error& e) {
    CHECK(std::string(e.what()).find("alpha7") != std::string::npos);
  }
}

TEST_CASE("unknown sections and bad values are rejected") {
  CHECK_THROWS_AS(parse_config_text(std::string(kMinimalConfig) + "\n[plasma]\nq = 1\n"),
                  config_error);
  CHECK_THROWS_AS(parse_config_text(std::string(kMinimalConfig) + "\n[time]\ndt = \"fast\"\n"),
                  config_error);
  CHECK_THROWS_AS(parse_config_text(std::string(kMinimalConfig) + "\n[time]\nt_final = nope\n"),
                  config_error);
}

TEST_CASE("override keeps invalid coefficients loadable with the verdict embedded") {
  std::string text = kMinimalConfig;
  const auto pos = text.find("alpha4 = 1.0");
  text.replace(pos, 12, "alpha4 = 0.0");
  const ParsedConfig p = parse_config_text(text, true);
  CHECK_FALSE(p.validity.satisfies_positivity);
  CHECK(p.run.override_validity);
}

TEST_CASE("snapshot round-trip is bit identical") {
  namespace fs = std::filesystem;
  const std::string path = (fs::temp_directory_path() / "nemel_snap_test.dat").string();
  std::mt19937 rng(99);
  std::uniform_real_distribution<double> u(-1e3, 1e3);
  SnapshotHeader h;
  h.field = "c1";
  h.nx = 13;
  h.ny = 7;
  h.Lx = 1.0;
  h.Ly = 2.5;
  h.t = 0.987654321234567e-3;
  std::vector<double> values(static_cast<std::size_t>(h.nx) * h.ny);
  for (double& v : values) v = u(rng) * std::pow(10.0, static_cast<int>(u(rng)) % 8);

  write_snapshot_field(path, h, values);
  SnapshotHeader h2;
  const std::vector<double> back = read_snapshot_field(path, h2);
  CHECK(h2.field == h.field);
  CHECK(h2.nx == h.nx);
  CHECK(h2.ny == h.ny);
  CHECK(h2.t == h.t);  // full precision
  REQUIRE(back.size() == values.size());
  for (std::size_t k = 0; k < values.size(); ++k) {
    CHECK(back[k] == values[k]);  // bit identical
  }
  fs::remove(path);
}

TEST_CASE("snapshot errors: magic, dimensions, truncation") {
  namespace fs = std::filesystem;
  const std::string path = (fs::temp_directory_path() / "nemel_snap_bad.dat").string();
  {
    std::FILE* f = std::fopen(path.c_str(), "w");
    std::fprintf(f, "NOPE c1 4 4 1.0 1.0 0.0\n1 2 3 4\n");
    std::fclose(f);
    SnapshotHeader h;
    CHECK_THROWS_AS(read_snapshot_field(path, h), config_error);
  }
  {
    std::FILE* f = std::fopen(path.c_str(), "w");
    std::fprintf(f, "NEMEL1 c1 4 4 1.0 1.0 0.0\n1 2 3 4\n5 6\n");
    std::fclose(f);
    SnapshotHeader h;
    try {
      read_snapshot_field(path, h);
      FAIL("expected config_error");
    } catch (const config_error& e) {
      CHECK(std::string(e.what()).find("byte") != std::string::npos);
    }
  }
  fs::remove(path);
}

TEST_CASE("energy log round-trip within one ulp") {
  namespace fs = std::filesystem;
  const std::string path = (fs::temp_directory_path() / "nemel_log_test.csv").string();
  {
    EnergyLogWriter w(path, 2);
    std::vector<double> row(
        {0.1, 0.2, 0.3, 0.4, 1.0, 1e-18, 2e-7, M_PI, -0.0, 1.0 / 3.0, 2.0 / 3.0, 1e-300,
         5e5, 42.0});
    w.write_row(0, 0.0, 0.0, row);
    w.write_row(1, 1e-4, 1e-4, row);
  }
  const EnergyLogData data = read_energy_log(path);
  CHECK(data.columns.size() == 17);  // 3 + 12 + 2 species
  CHECK(data.columns.front() == "step");
  CHECK(data.columns.back() == "div_inf");
  REQUIRE(data.rows.size() == 2);
  CHECK(data.rows[1][data.column("t")] == 1e-4);
  CHECK(data.rows[0][data.column("E_total")] == 1.0);
  CHECK(data.rows[0][data.column("D_visc")] == 2e-7);
  CHECK(data.rows[0][data.column("mass_1")] == 1.0 / 3.0);
  fs::remove(path);
}

TEST_SUITE_END();
