#include "fcascade/trace_io.hpp"

#include "fcascade/errors.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

namespace fcascade {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// JSON has no encoding for non-finite numbers.
nlohmann::json num(double v) {
  if (std::isfinite(v)) return v;
  return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  return out;
}

}  // namespace

void write_trace_csv(std::ostream& out, const Trajectory& traj, const Beam* beam) {
  out << "t,V,W,u_norm,defect_norm,x_norm";
  if (beam) out << ",theta,theta_ref,w_1,w_2,w_3,w_4,w_5";
  out << '\n';
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const MonitorRecord& m = traj.monitors[k];
    out << fmt(traj.times[k]) << ',' << fmt(m.V) << ',' << fmt(m.W) << ','
        << fmt(m.u_norm) << ',' << fmt(m.defect_norm) << ',' << fmt(m.x_norm);
    if (beam) {
      out << ',' << fmt(beam->to_original(traj.states[k]).theta) << ','
          << fmt(beam->params().theta_ref);
      for (double w : beam->probe_deflection(traj.states[k])) out << ',' << fmt(w);
    }
    out << '\n';
  }
}

void write_trace_csv_file(const std::string& path, const Trajectory& traj,
                          const Beam* beam) {
  std::ofstream out = open_out(path);
  write_trace_csv(out, traj, beam);
}

void write_json_file(const std::string& path, const nlohmann::json& doc) {
  std::ofstream out = open_out(path);
  out << doc.dump(2) << '\n';
}

nlohmann::json vector_to_json(const Vector& v) {
  nlohmann::json out = nlohmann::json::array();
  for (double x : v) out.push_back(num(x));
  return out;
}

nlohmann::json matrix_to_json(const Matrix& m) {
  nlohmann::json out = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) out.push_back(vector_to_json(m.row(i)));
  return out;
}

nlohmann::json report_to_json(const ValidationReport& report) {
  nlohmann::json out = nlohmann::json::array();
  for (const CheckEntry& e : report.entries) {
    out.push_back({{"name", e.name},
                   {"passed", e.passed},
                   {"value", num(e.value)},
                   {"threshold", num(e.threshold)},
                   {"detail", e.detail}});
  }
  return out;
}

nlohmann::json config_to_json(const RunConfig& cfg) {
  nlohmann::json j;
  j["source"] = cfg.source;
  j["run"] = {{"model", to_string(cfg.model)},
              {"seed", cfg.seed},
              {"out", cfg.out},
              {"beta", cfg.beta}};
  if (cfg.model == ModelKind::Beam) {
    j["beam"] = {{"N", cfg.beam.N},
                 {"L", cfg.beam.L},
                 {"lambda", cfg.beam.lambda},
                 {"theta_ref", cfg.beam.theta_ref}};
  }
  if (cfg.model == ModelKind::CustomLinear) {
    nlohmann::json lin = {{"A", matrix_to_json(cfg.linear.A)},
                          {"B", matrix_to_json(cfg.linear.B)},
                          {"C", matrix_to_json(cfg.linear.C)},
                          {"S", matrix_to_json(cfg.linear.S)}};
    if (cfg.linear.QX) lin["QX"] = matrix_to_json(*cfg.linear.QX);
    if (cfg.linear.QY) lin["QY"] = matrix_to_json(*cfg.linear.QY);
    if (cfg.linear.QU) lin["QU"] = matrix_to_json(*cfg.linear.QU);
    j["linear"] = lin;
  }
  j["quad"] = {{"step", cfg.quad.step},
               {"tail_tol", cfg.quad.tail_tol},
               {"max_horizon", cfg.quad.max_horizon},
               {"decay_floor", cfg.quad.decay_floor},
               {"scheme", to_string(cfg.quad.scheme)}};
  j["sim"] = {{"dt", cfg.sim.dt},
              {"T_final", cfg.sim.T_final},
              {"scheme", to_string(cfg.sim.scheme)},
              {"record_every", cfg.sim.record_every}};
  j["controller"] = {{"mode", to_string(cfg.controller.mode)},
                     {"sample_period", cfg.controller.sample_period},
                     {"y_ref", cfg.controller.y_ref ? vector_to_json(*cfg.controller.y_ref)
                                                    : nlohmann::json(nullptr)}};
  j["initial"] = {{"x0", cfg.initial.x0_kind == "values" ? vector_to_json(cfg.initial.x0)
                                                         : nlohmann::json(cfg.initial.x0_kind)},
                  {"x0_energy", cfg.initial.x0_energy},
                  {"z0", cfg.initial.z0 ? vector_to_json(*cfg.initial.z0)
                                        : nlohmann::json("default")}};
  j["regulate"] = {{"theta_refs", cfg.theta_refs}, {"compare_modes", cfg.compare_modes}};
  return j;
}

}  // namespace fcascade
