#pragma once

#include <cstdio>
#include <string>
#include <vector>

#include "nemel/grid.hpp"

namespace nemel {

/// One field per file: header "NEMEL1 <field> <nx> <ny> <Lx> <Ly> <t>", then
/// nx*ny ASCII floats, row-major, 17 significant digits, one row per line.
/// Face fields use their own extents in the header.
struct SnapshotHeader {
  std::string field;
  int nx = 0;
  int ny = 0;
  double Lx = 0.0;
  double Ly = 0.0;
  double t = 0.0;
};

void write_snapshot_field(const std::string& path, const SnapshotHeader& h,
                          const std::vector<double>& values);

/// Reads and validates the header magic and dimension consistency; throws
/// config_error with the byte offset on malformed or truncated input.
std::vector<double> read_snapshot_field(const std::string& path, SnapshotHeader& h);

/// Energy log CSV. Column layout is fixed at construction by the species
/// count: step,t,dt,E_kin,E_elastic,E_entropy,E_elec,E_total,D_ionic,D_visc,
/// D_rot,audit_r,mass_1..N,min_c,max_len_dev,div_inf.
class EnergyLogWriter {
public:
  EnergyLogWriter(const std::string& path, int n_species);
  ~EnergyLogWriter();
  EnergyLogWriter(const EnergyLogWriter&) = delete;
  EnergyLogWriter& operator=(const EnergyLogWriter&) = delete;

  void write_row(long step, double t, double dt, const std::vector<double>& values);

private:
  std::FILE* f_ = nullptr;
  int n_species_ = 0;
};

struct EnergyLogData {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  std::size_t column(const std::string& name) const;
  std::vector<double> series(const std::string& name) const;
};

EnergyLogData read_energy_log(const std::string& path);

}  // namespace nemel
