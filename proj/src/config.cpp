#include "nemel/config.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace nemel {

namespace {

struct Value {
  enum class Kind { Number, String, Boolean } kind = Kind::Number;
  double num = 0.0;
  std::string str;
  bool boolean = false;
  int line = 0;
};

// section -> key -> value, from a minimal TOML subset: [section] or
// [section.sub] headers, key = value lines, '#' comments, values that are
// numbers, "quoted strings", or true/false.
using Document = std::map<std::string, std::map<std::string, Value>>;

[[noreturn]] void fail(int line, const std::string& msg) {
  throw config_error("config line " + std::to_string(line) + ": " + msg);
}

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

Document parse_document(const std::string& text) {
  Document doc;
  std::istringstream in(text);
  std::string raw;
  std::string section;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::size_t hash = raw.find('#');
    std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail(line_no, "unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty()) fail(line_no, "empty section name");
      doc[section];
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) fail(line_no, "expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key.empty()) fail(line_no, "empty key");
    if (section.empty()) fail(line_no, "key '" + key + "' outside any section");
    if (doc[section].count(key) != 0) fail(line_no, "duplicate key '" + key + "'");

    Value v;
    v.line = line_no;
    if (val.size() >= 2 && val.front() == '"' && val.back() == '"') {
      v.kind = Value::Kind::String;
      v.str = val.substr(1, val.size() - 2);
    } else if (val == "true" || val == "false") {
      v.kind = Value::Kind::Boolean;
      v.boolean = val == "true";
    } else {
      char* end = nullptr;
      v.num = std::strtod(val.c_str(), &end);
      if (end == nullptr || *end != '\0' || val.empty()) {
        fail(line_no, "cannot parse value '" + val + "'");
      }
      if (!std::isfinite(v.num)) fail(line_no, "value '" + val + "' is not finite");
      v.kind = Value::Kind::Number;
    }
    doc[section][key] = v;
  }
  return doc;
}

// Tracks key consumption so leftovers can be reported as unknown.
class Section {
public:
  Section(const Document& doc, const std::string& name) : name_(name) {
    auto it = doc.find(name);
    if (it != doc.end()) entries_ = &it->second;
  }

  bool exists() const { return entries_ != nullptr; }

  const Value* get(const std::string& key) {
    if (entries_ == nullptr) return nullptr;
    consumed_.insert(key);
    auto it = entries_->find(key);
    return it == entries_->end() ? nullptr : &it->second;
  }

  double number(const std::string& key, double fallback) {
    const Value* v = get(key);
    if (v == nullptr) return fallback;
    if (v->kind != Value::Kind::Number) fail(v->line, "[" + name_ + "] " + key + ": expected a number");
    return v->num;
  }

  double required_number(const std::string& key) {
    const Value* v = get(key);
    if (v == nullptr) {
      throw config_error("config: missing required key [" + name_ + "] " + key);
    }
    if (v->kind != Value::Kind::Number) fail(v->line, "[" + name_ + "] " + key + ": expected a number");
    return v->num;
  }

  std::string string(const std::string& key, const std::string& fallback) {
    const Value* v = get(key);
    if (v == nullptr) return fallback;
    if (v->kind != Value::Kind::String) fail(v->line, "[" + name_ + "] " + key + ": expected a string");
    return v->str;
  }

  bool boolean(const std::string& key, bool fallback) {
    const Value* v = get(key);
    if (v == nullptr) return fallback;
    if (v->kind != Value::Kind::Boolean) fail(v->line, "[" + name_ + "] " + key + ": expected true/false");
    return v->boolean;
  }

  void finish() const {
    if (entries_ == nullptr) return;
    for (const auto& [key, value] : *entries_) {
      if (consumed_.count(key) == 0) {
        fail(value.line, "unknown key '" + key + "' in section [" + name_ + "]");
      }
    }
  }

private:
  std::string name_;
  const std::map<std::string, Value>* entries_ = nullptr;
  std::set<std::string> consumed_;
};

}  // namespace

ParsedConfig parse_config_text(const std::string& text, bool allow_invalid_leslie) {
  const Document doc = parse_document(text);

  static const std::set<std::string> known_sections = {
      "grid", "leslie", "permittivity", "time", "initial", "output", "tolerances"};
  for (const auto& [name, entries] : doc) {
    (void)entries;
    if (known_sections.count(name) != 0) continue;
    if (name.rfind("species.", 0) == 0) continue;
    throw config_error("config: unknown section [" + name + "]");
  }

  ParsedConfig out;
  RunConfig& cfg = out.run;

  Section grid(doc, "grid");
  const int nx = static_cast<int>(grid.required_number("nx"));
  const int ny = static_cast<int>(grid.required_number("ny"));
  const double Lx = grid.number("Lx", 1.0);
  const double Ly = grid.number("Ly", 1.0);
  cfg.grid = Grid(nx, ny, Lx, Ly);
  grid.finish();

  Section leslie(doc, "leslie");
  cfg.material.leslie.alpha1 = leslie.number("alpha1", 0.0);
  cfg.material.leslie.alpha2 = leslie.number("alpha2", 0.0);
  cfg.material.leslie.alpha3 = leslie.number("alpha3", 0.0);
  cfg.material.leslie.alpha4 = leslie.number("alpha4", 0.0);
  cfg.material.leslie.alpha5 = leslie.number("alpha5", 0.0);
  cfg.material.leslie.alpha6 = leslie.number("alpha6", 0.0);
  leslie.finish();

  Section perm(doc, "permittivity");
  cfg.material.permittivity.eps_perp = perm.number("eps_perp", 1.0);
  cfg.material.permittivity.eps_a = perm.number("eps_a", 0.0);
  perm.finish();
  if (!(cfg.material.permittivity.eps_perp > 0.0)) {
    throw config_error("config: permittivity requires eps_perp > 0");
  }
  if (cfg.material.permittivity.eps_a < 0.0) {
    throw config_error("config: permittivity requires eps_a >= 0");
  }

  for (int k = 1;; ++k) {
    const std::string name = "species." + std::to_string(k);
    if (doc.count(name) == 0) {
      if (k == 1) throw config_error("config: at least one [species.1] section is required");
      break;
    }
    Section sp(doc, name);
    IonSpecies ion;
    ion.valence = sp.number("z", 0.0);
    const Value* scalar = sp.get("D");
    const Value* d11v = sp.get("d11");
    const Value* d12v = sp.get("d12");
    const Value* d22v = sp.get("d22");
    if (scalar != nullptr && (d11v != nullptr || d12v != nullptr || d22v != nullptr)) {
      throw config_error("config: [" + name + "] give either scalar D or d11/d12/d22");
    }
    if (scalar != nullptr) {
      if (scalar->kind != Value::Kind::Number) fail(scalar->line, "D must be a number");
      ion.diffusion = Mat2{scalar->num, 0.0, 0.0, scalar->num};
    } else {
      const double d11 = d11v != nullptr ? d11v->num : 1.0;
      const double d12 = d12v != nullptr ? d12v->num : 0.0;
      const double d22 = d22v != nullptr ? d22v->num : 1.0;
      ion.diffusion = Mat2{d11, d12, d12, d22};
    }
    double lo, hi;
    ion.diffusion.sym_eigenvalues(lo, hi);
    if (!(lo > 0.0)) {
      throw config_error("config: [" + name + "] diffusion matrix must be positive definite");
    }
    const double c0 = sp.number("c0", 1.0);
    if (!(c0 > 0.0)) throw config_error("config: [" + name + "] c0 must be positive");
    cfg.material.species.push_back(ion);
    cfg.initial.c0.push_back(c0);
    sp.finish();
  }

  Section time(doc, "time");
  cfg.t_final = time.number("t_final", 0.1);
  if (cfg.t_final < 0.0) throw config_error("config: t_final must be >= 0");
  const Value* dtv = time.get("dt");
  if (dtv == nullptr) {
    cfg.dt_policy = DtPolicy::Auto;
  } else if (dtv->kind == Value::Kind::String) {
    if (dtv->str != "auto") fail(dtv->line, "dt must be a number or \"auto\"");
    cfg.dt_policy = DtPolicy::Auto;
  } else if (dtv->kind == Value::Kind::Number) {
    if (!(dtv->num > 0.0)) fail(dtv->line, "dt must be positive");
    cfg.dt_policy = DtPolicy::Fixed;
    cfg.dt_fixed = dtv->num;
  } else {
    fail(dtv->line, "dt must be a number or \"auto\"");
  }
  cfg.safety = time.number("safety", 0.4);
  if (!(cfg.safety > 0.0 && cfg.safety <= 1.0)) {
    throw config_error("config: safety must be in (0, 1]");
  }
  cfg.max_steps = static_cast<long>(time.number("max_steps", -1.0));
  cfg.renormalize = time.boolean("renormalize", false);
  time.finish();

  Section initial(doc, "initial");
  cfg.initial.preset = initial.string("preset", "uniform");
  static const std::set<std::string> presets = {"uniform", "perturbed-equilibrium", "twist",
                                                "shear-cell"};
  if (presets.count(cfg.initial.preset) == 0) {
    throw config_error("config: unknown preset '" + cfg.initial.preset + "'");
  }
  cfg.initial.theta0 = initial.number("theta0", 0.0);
  cfg.initial.amp_d = initial.number("amp_d", 0.0);
  cfg.initial.amp_c = initial.number("amp_c", 0.0);
  cfg.initial.amp_v = initial.number("amp_v", 0.0);
  if (std::fabs(cfg.initial.amp_c) >= 1.0) {
    throw config_error("config: |amp_c| must be < 1 to keep concentrations positive");
  }
  initial.finish();

  Section output(doc, "output");
  cfg.output_dir = output.string("dir", "out");
  cfg.snapshot_every = static_cast<long>(output.number("snapshot_every", 0.0));
  output.finish();

  Section tols(doc, "tolerances");
  cfg.tol.poisson = tols.number("poisson", 1e-10);
  cfg.tol.pressure = tols.number("pressure", 1e-10);
  cfg.tol.steady = tols.number("steady", 1e-6);
  cfg.tol.newton = tols.number("newton", 1e-10);
  cfg.tol.parodi = tols.number("parodi", 1e-12);
  cfg.tol.max_iter = static_cast<int>(tols.number("max_iter", 20000.0));
  tols.finish();

  out.validity = validate_leslie(cfg.material.leslie, cfg.tol.parodi);
  cfg.override_validity = allow_invalid_leslie;
  if (!out.validity.satisfies_positivity && !allow_invalid_leslie) {
    std::string msg = "config: Leslie coefficients violate";
    for (const auto& v : out.validity.violations) msg += " [" + v + "]";
    throw config_error(msg);
  }
  return out;
}

ParsedConfig parse_config(const std::string& path, bool allow_invalid_leslie) {
  std::ifstream in(path);
  if (!in) throw config_error("config: cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), allow_invalid_leslie);
}

}  // namespace nemel
