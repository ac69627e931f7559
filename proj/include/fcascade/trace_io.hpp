#pragma once

// Trace export: CSV with a frozen column order plus a JSON sidecar.

#include "fcascade/beam.hpp"
#include "fcascade/config.hpp"
#include "fcascade/model.hpp"
#include "fcascade/trajectory.hpp"

#include <json.hpp>

#include <ostream>
#include <string>

namespace fcascade {

/// Columns t,V,W,u_norm,defect_norm,x_norm then, when `beam` is given,
/// theta,theta_ref,w_1..w_5 at the probe stations. Values use 17 significant
/// digits so identical runs give identical bytes.
void write_trace_csv(std::ostream& out, const Trajectory& traj, const Beam* beam);
void write_trace_csv_file(const std::string& path, const Trajectory& traj,
                          const Beam* beam);

void write_json_file(const std::string& path, const nlohmann::json& doc);

/// Fully resolved configuration, as echoed in every sidecar.
nlohmann::json config_to_json(const RunConfig& cfg);

nlohmann::json report_to_json(const ValidationReport& report);

nlohmann::json vector_to_json(const Vector& v);
nlohmann::json matrix_to_json(const Matrix& m);

}  // namespace fcascade
