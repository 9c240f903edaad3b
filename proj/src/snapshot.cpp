#include "nemel/snapshot.hpp"

#include <cinttypes>
#include <cstring>
#include <sstream>

namespace nemel {

void write_snapshot_field(const std::string& path, const SnapshotHeader& h,
                          const std::vector<double>& values) {
  if (values.size() != static_cast<std::size_t>(h.nx) * h.ny) {
    throw config_error("snapshot: value count does not match header dimensions");
  }
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (f == nullptr) throw config_error("snapshot: cannot open " + path + " for writing");
  std::fprintf(f, "NEMEL1 %s %d %d %.16e %.16e %.16e\n", h.field.c_str(), h.nx, h.ny, h.Lx, h.Ly,
               h.t);
  for (int j = 0; j < h.ny; ++j) {
    for (int i = 0; i < h.nx; ++i) {
      std::fprintf(f, "%s%.16e", i == 0 ? "" : " ",
                   values[static_cast<std::size_t>(j) * h.nx + i]);
    }
    std::fputc('\n', f);
  }
  std::fclose(f);
}

std::vector<double> read_snapshot_field(const std::string& path, SnapshotHeader& h) {
  std::FILE* f = std::fopen(path.c_str(), "r");
  if (f == nullptr) throw config_error("snapshot: cannot open " + path);
  char magic[16] = {0};
  char field[64] = {0};
  if (std::fscanf(f, "%15s %63s %d %d %lf %lf %lf", magic, field, &h.nx, &h.ny, &h.Lx, &h.Ly,
                  &h.t) != 7) {
    const long off = std::ftell(f);
    std::fclose(f);
    throw config_error("snapshot: malformed header in " + path + " near byte " +
                       std::to_string(off));
  }
  if (std::strcmp(magic, "NEMEL1") != 0) {
    std::fclose(f);
    throw config_error("snapshot: bad magic in " + path + " (expected NEMEL1)");
  }
  h.field = field;
  if (h.nx <= 0 || h.ny <= 0) {
    std::fclose(f);
    throw config_error("snapshot: non-positive dimensions in " + path);
  }
  std::vector<double> values(static_cast<std::size_t>(h.nx) * h.ny);
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (std::fscanf(f, "%lf", &values[k]) != 1) {
      const long off = std::ftell(f);
      std::fclose(f);
      throw config_error("snapshot: truncated data in " + path + " at byte " +
                         std::to_string(off));
    }
  }
  std::fclose(f);
  return values;
}

EnergyLogWriter::EnergyLogWriter(const std::string& path, int n_species)
    : n_species_(n_species) {
  f_ = std::fopen(path.c_str(), "w");
  if (f_ == nullptr) throw config_error("energy log: cannot open " + path + " for writing");
  std::fprintf(f_, "step,t,dt,E_kin,E_elastic,E_entropy,E_elec,E_total,D_ionic,D_visc,D_rot,"
                   "audit_r");
  for (int k = 1; k <= n_species_; ++k) std::fprintf(f_, ",mass_%d", k);
  std::fprintf(f_, ",min_c,max_len_dev,div_inf\n");
  std::fflush(f_);
}

EnergyLogWriter::~EnergyLogWriter() {
  if (f_ != nullptr) std::fclose(f_);
}

void EnergyLogWriter::write_row(long step, double t, double dt,
                                const std::vector<double>& values) {
  if (values.size() != static_cast<std::size_t>(12 + n_species_)) {
    throw config_error("energy log: wrong number of columns");
  }
  std::fprintf(f_, "%ld,%.16e,%.16e", step, t, dt);
  for (double v : values) std::fprintf(f_, ",%.16e", v);
  std::fputc('\n', f_);
  std::fflush(f_);
}

std::size_t EnergyLogData::column(const std::string& name) const {
  for (std::size_t k = 0; k < columns.size(); ++k) {
    if (columns[k] == name) return k;
  }
  throw config_error("energy log: no column named " + name);
}

std::vector<double> EnergyLogData::series(const std::string& name) const {
  const std::size_t c = column(name);
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r[c]);
  return out;
}

EnergyLogData read_energy_log(const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "r");
  if (f == nullptr) throw config_error("energy log: cannot open " + path);
  EnergyLogData data;
  char line[8192];
  bool header = true;
  while (std::fgets(line, sizeof(line), f) != nullptr) {
    std::stringstream ss(line);
    std::string tok;
    if (header) {
      while (std::getline(ss, tok, ',')) {
        while (!tok.empty() && (tok.back() == '\n' || tok.back() == '\r')) tok.pop_back();
        data.columns.push_back(tok);
      }
      header = false;
      continue;
    }
    std::vector<double> row;
    while (std::getline(ss, tok, ',')) row.push_back(std::strtod(tok.c_str(), nullptr));
    if (!row.empty()) data.rows.push_back(std::move(row));
  }
  std::fclose(f);
  return data;
}

}  // namespace nemel
