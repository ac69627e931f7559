#include "fcascade/config.hpp"

#include "fcascade/errors.hpp"
#include "fcascade/models.hpp"

#include <algorithm>
#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

namespace fcascade {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"run", {"model", "seed", "out", "beta"}},
      {"beam", {"N", "L", "lambda", "theta_ref"}},
      {"linear", {"A", "B", "C", "S", "QX", "QY", "QU"}},
      {"quad", {"step", "tail_tol", "max_horizon", "decay_floor", "scheme"}},
      {"sim", {"dt", "T_final", "scheme", "record_every"}},
      {"controller", {"mode", "sample_period", "y_ref"}},
      {"initial", {"x0", "x0_energy", "z0"}},
      {"regulate", {"theta_refs", "compare_modes"}},
  };
  return keys;
}

class Reader {
 public:
  explicit Reader(const IniFile& ini) : ini_(ini) {}

  const IniValue* find(const std::string& section, const std::string& key) const {
    const auto s = ini_.sections.find(section);
    if (s == ini_.sections.end()) return nullptr;
    const auto k = s->second.find(key);
    return k == s->second.end() ? nullptr : &k->second;
  }

  std::string where(const IniValue& v, const std::string& section,
                    const std::string& key) const {
    return ini_.source + ":" + std::to_string(v.line) + " [" + section + "] " + key;
  }

  std::string where(const std::string& section, const std::string& key) const {
    const IniValue* v = find(section, key);
    return v ? where(*v, section, key) : ini_.source + " [" + section + "] " + key;
  }

  double real(const std::string& section, const std::string& key, double fallback) const {
    const IniValue* v = find(section, key);
    if (!v) return fallback;
    const auto vals = parse_reals(v->text, where(*v, section, key));
    if (vals.size() != 1) {
      throw ConfigError(where(*v, section, key), "expected one real number");
    }
    return vals.front();
  }

  long integer(const std::string& section, const std::string& key, long fallback) const {
    const IniValue* v = find(section, key);
    if (!v) return fallback;
    errno = 0;
    char* end = nullptr;
    const long out = std::strtol(v->text.c_str(), &end, 10);
    if (errno != 0 || end == v->text.c_str() || trim(end) != "") {
      throw ConfigError(where(*v, section, key), "expected an integer, got '" + v->text + "'");
    }
    return out;
  }

  std::string text(const std::string& section, const std::string& key,
                   const std::string& fallback) const {
    const IniValue* v = find(section, key);
    return v ? v->text : fallback;
  }

  bool flag(const std::string& section, const std::string& key, bool fallback) const {
    const IniValue* v = find(section, key);
    if (!v) return fallback;
    if (v->text == "true" || v->text == "yes" || v->text == "1") return true;
    if (v->text == "false" || v->text == "no" || v->text == "0") return false;
    throw ConfigError(where(*v, section, key), "expected true or false");
  }

  std::optional<Matrix> matrix(const std::string& section, const std::string& key) const {
    const IniValue* v = find(section, key);
    if (!v) return std::nullopt;
    const std::string at = where(*v, section, key);
    std::vector<std::vector<double>> rows;
    std::stringstream ss(v->text);
    std::string row;
    while (std::getline(ss, row, ';')) rows.push_back(parse_reals(row, at));
    if (rows.empty() || rows.front().empty()) throw ConfigError(at, "empty matrix");
    Matrix out(rows.size(), rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != rows.front().size()) {
        throw ConfigError(at, "row " + std::to_string(i + 1) + " has " +
                                  std::to_string(rows[i].size()) + " entries, expected " +
                                  std::to_string(rows.front().size()));
      }
      for (std::size_t j = 0; j < rows[i].size(); ++j) out(i, j) = rows[i][j];
    }
    return out;
  }

  std::optional<Vector> vector(const std::string& section, const std::string& key) const {
    const IniValue* v = find(section, key);
    if (!v) return std::nullopt;
    const auto vals = parse_reals(v->text, where(*v, section, key));
    return Eigen::Map<const Vector>(vals.data(), static_cast<Eigen::Index>(vals.size()));
  }

 private:
  const IniFile& ini_;
};

template <class Fn>
void checked(const std::string& where, Fn&& fn) {
  try {
    fn();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(where, e.what());
  }
}

}  // namespace

IniFile parse_ini(std::istream& in, const std::string& source) {
  IniFile ini;
  ini.source = source;
  std::string section;
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto comment = raw.find_first_of("#");
    std::string line = trim(comment == std::string::npos ? raw : raw.substr(0, comment));
    if (!line.empty() && line.front() == ';') line.clear();
    if (line.empty()) continue;
    const std::string at = source + ":" + std::to_string(line_no);
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(at, "unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty()) throw ConfigError(at, "empty section name");
      ini.sections[section];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(at, "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(at, "missing key before '='");
    auto& keys = ini.sections[section];
    if (keys.count(key)) {
      throw ConfigError(at, "duplicate key '" + key + "' (first set on line " +
                                std::to_string(keys[key].line) + ")");
    }
    keys[key] = IniValue{value, line_no};
  }
  return ini;
}

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::Beam: return "beam";
    case ModelKind::Scalar: return "scalar";
    case ModelKind::CustomLinear: return "custom-linear";
  }
  return "unknown";
}

std::vector<double> parse_reals(const std::string& text, const std::string& where) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string token;
  while (ss >> token) {
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(token.c_str(), &end);
    if (errno != 0 || end == token.c_str() || *end != '\0') {
      throw ConfigError(where, "not a real number: '" + token + "'");
    }
    out.push_back(v);
  }
  return out;
}

RunConfig load_run_config(std::istream& in, const std::string& source) {
  const IniFile ini = parse_ini(in, source);
  const Reader r(ini);
  for (const auto& [section, keys] : ini.sections) {
    const auto known = known_keys().find(section);
    for (const auto& [key, value] : keys) {
      const std::string at = source + ":" + std::to_string(value.line);
      if (known == known_keys().end()) {
        throw ConfigError(at, "unknown section [" + section + "]");
      }
      if (!known->second.count(key)) {
        throw ConfigError(at, "unknown key '" + key + "' in [" + section + "]");
      }
    }
  }

  RunConfig cfg;
  cfg.source = source;
  const std::string model = r.text("run", "model", "beam");
  if (model == "beam") {
    cfg.model = ModelKind::Beam;
  } else if (model == "scalar") {
    cfg.model = ModelKind::Scalar;
  } else if (model == "custom-linear") {
    cfg.model = ModelKind::CustomLinear;
  } else {
    throw ConfigError(r.where("run", "model"),
                      "unknown model '" + model + "' (expected beam, scalar or custom-linear)");
  }
  const long seed = r.integer("run", "seed", 42);
  if (seed < 0) throw ConfigError(r.where("run", "seed"), "seed must be nonnegative");
  cfg.seed = static_cast<std::uint64_t>(seed);
  cfg.out = r.text("run", "out", cfg.out);
  cfg.beta = r.real("run", "beta", cfg.beta);
  if (!(cfg.beta > 0.0)) throw ConfigError(r.where("run", "beta"), "beta must be positive");

  cfg.beam.N = static_cast<int>(r.integer("beam", "N", cfg.beam.N));
  cfg.beam.L = r.real("beam", "L", cfg.beam.L);
  cfg.beam.lambda = r.real("beam", "lambda", cfg.beam.lambda);
  cfg.beam.theta_ref = r.real("beam", "theta_ref", cfg.beam.theta_ref);
  if (cfg.model == ModelKind::Beam) checked("[beam]", [&] { cfg.beam.check(); });

  Eigen::Index m = 1;
  if (cfg.model == ModelKind::CustomLinear) {
    for (const char* key : {"A", "B", "C", "S"}) {
      if (!r.find("linear", key)) {
        throw ConfigError(source + " [linear] " + key, "required for model = custom-linear");
      }
    }
    cfg.linear.A = *r.matrix("linear", "A");
    cfg.linear.B = *r.matrix("linear", "B");
    cfg.linear.C = *r.matrix("linear", "C");
    cfg.linear.S = *r.matrix("linear", "S");
    cfg.linear.QX = r.matrix("linear", "QX");
    cfg.linear.QY = r.matrix("linear", "QY");
    cfg.linear.QU = r.matrix("linear", "QU");
    const Eigen::Index n = cfg.linear.A.rows();
    m = cfg.linear.C.rows();
    auto need = [&](const char* key, const Matrix& mat, Eigen::Index rows, Eigen::Index cols) {
      if (mat.rows() != rows || (cols >= 0 && mat.cols() != cols)) {
        std::ostringstream msg;
        msg << "is " << mat.rows() << "x" << mat.cols() << ", expected " << rows << "x"
            << (cols >= 0 ? std::to_string(cols) : std::string("r"));
        throw ConfigError(r.where("linear", key), msg.str());
      }
    };
    need("A", cfg.linear.A, n, n);
    need("B", cfg.linear.B, n, -1);
    need("C", cfg.linear.C, m, n);
    need("S", cfg.linear.S, m, m);
    if (cfg.linear.QX) need("QX", *cfg.linear.QX, n, n);
    if (cfg.linear.QY) need("QY", *cfg.linear.QY, m, m);
    if (cfg.linear.QU) need("QU", *cfg.linear.QU, cfg.linear.B.cols(), cfg.linear.B.cols());
  }

  cfg.quad.step = r.real("quad", "step", cfg.quad.step);
  cfg.quad.tail_tol = r.real("quad", "tail_tol", cfg.quad.tail_tol);
  cfg.quad.max_horizon = r.real("quad", "max_horizon", cfg.quad.max_horizon);
  cfg.quad.decay_floor = r.real("quad", "decay_floor", cfg.quad.decay_floor);
  if (cfg.model == ModelKind::Beam) cfg.quad.scheme = Scheme::ETD2;
  checked(r.where("quad", "scheme"), [&] {
    cfg.quad.scheme = parse_scheme(r.text("quad", "scheme", to_string(cfg.quad.scheme)));
  });
  checked("[quad]", [&] { cfg.quad.check(); });

  cfg.sim.dt = r.real("sim", "dt", cfg.sim.dt);
  cfg.sim.T_final = r.real("sim", "T_final", cfg.sim.T_final);
  cfg.sim.record_every = static_cast<int>(r.integer("sim", "record_every", 0));
  checked(r.where("sim", "scheme"), [&] {
    cfg.sim.scheme = parse_scheme(r.text("sim", "scheme", to_string(cfg.sim.scheme)));
  });
  checked("[sim]", [&] { cfg.sim.check(); });

  checked(r.where("controller", "mode"), [&] {
    cfg.controller.mode =
        parse_controller_mode(r.text("controller", "mode", to_string(cfg.controller.mode)));
  });
  cfg.controller.sample_period =
      r.real("controller", "sample_period", cfg.controller.sample_period);
  cfg.controller.y_ref = r.vector("controller", "y_ref");
  if (cfg.controller.y_ref && cfg.controller.y_ref->size() != m) {
    throw ConfigError(r.where("controller", "y_ref"),
                      "expected " + std::to_string(m) + " values");
  }
  checked("[controller]", [&] { cfg.controller.check(); });
  if (cfg.sim.dt > cfg.controller.sample_period) {
    throw ConfigError(r.where("sim", "dt"), "dt must not exceed the sample period");
  }

  const std::string x0 = r.text("initial", "x0", "default");
  if (x0 == "default" || x0 == "random" || x0 == "rest") {
    cfg.initial.x0_kind = x0;
    if (x0 == "rest" && cfg.model != ModelKind::Beam) {
      throw ConfigError(r.where("initial", "x0"), "'rest' is only defined for the beam");
    }
  } else {
    cfg.initial.x0_kind = "values";
    cfg.initial.x0 = *r.vector("initial", "x0");
  }
  cfg.initial.x0_energy = r.real("initial", "x0_energy", cfg.initial.x0_energy);
  if (!(cfg.initial.x0_energy >= 0.0)) {
    throw ConfigError(r.where("initial", "x0_energy"), "must be nonnegative");
  }
  cfg.initial.z0 = r.vector("initial", "z0");
  if (cfg.initial.z0 && cfg.initial.z0->size() != m) {
    throw ConfigError(r.where("initial", "z0"), "expected " + std::to_string(m) + " values");
  }

  if (const auto refs = r.vector("regulate", "theta_refs")) {
    cfg.theta_refs.assign(refs->data(), refs->data() + refs->size());
  }
  cfg.compare_modes = r.flag("regulate", "compare_modes", false);
  return cfg;
}

RunConfig load_run_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path, "cannot open config file");
  return load_run_config(in, path);
}

std::string config_reference() {
  return R"(Config file keys (INI; '#' comments; matrices as rows separated by ';'):
  [run]        model = beam|scalar|custom-linear, seed = 42, out = <prefix>,
               beta = 0.5 (ISS gain for scalar/custom-linear)
  [beam]       N = 32, L = 1, lambda = 1, theta_ref = 0
  [linear]     A, B, C, S (required for custom-linear), QX, QY, QU (optional)
  [quad]       step = 1e-3, tail_tol = 1e-8, max_horizon = 1000,
               decay_floor = 1e-8,
               scheme = rk4|etd2|imex-cn (beam default etd2)
  [sim]        dt = 1e-3, T_final = 10, scheme = imex-cn|rk4|etd2,
               record_every = 0 (0: every controller sample)
  [controller] mode = full|linear, sample_period = 0.05, y_ref = <values>
  [initial]    x0 = default|random|rest|<values>, x0_energy = 1, z0 = <values>
  [regulate]   theta_refs = <values>, compare_modes = false
)";
}

CascadeRealization build_model(const RunConfig& cfg) {
  switch (cfg.model) {
    case ModelKind::Beam:
      return Beam(cfg.beam).realization();
    case ModelKind::Scalar:
      return scalar_cubic_model();
    case ModelKind::CustomLinear: {
      std::optional<CascadeRealization> model;
      checked(cfg.source + " [linear]", [&] {
        model.emplace(make_linear_realization("custom-linear", cfg.linear.A, cfg.linear.B,
                                              cfg.linear.C, cfg.linear.S, cfg.linear.QX,
                                              cfg.linear.QY, cfg.linear.QU));
      });
      return std::move(*model);
    }
  }
  throw ConfigError(cfg.source, "unknown model");
}

}  // namespace fcascade
