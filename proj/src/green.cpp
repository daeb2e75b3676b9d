#include "smtlab/green.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include "json.hpp"
#include <sstream>

#include "smtlab/error.hpp"
#include "smtlab/functional.hpp"
#include "smtlab/io.hpp"

namespace smtlab {

using std::numbers::pi;

GreenReport solve_green(SpacePtr space) {
  const auto& mesh = space->mesh();
  Eigen::VectorXd rhs = -space->lumped() / space->area();
  rhs[mesh.origin_vertex] += 1.0;
  auto sol = space->neumann().solve(rhs);
  GreenReport rep;
  rep.G = ScalarField{space, std::move(sol.solution)};
  rep.residual_norm = sol.relative_residual;
  rep.refinement_steps = sol.refinement_steps;
  rep.mean_value = mean(rep.G);
  return rep;
}

FitWindow default_fit_window(const FeSpace& space) {
  return {3.0 * space.origin_mesh_size(), 0.25 * space.flat_radius()};
}

double extract_A0(GreenReport& report) { return extract_A0(report, default_fit_window(*report.G.space)); }

double extract_A0(GreenReport& report, const FitWindow& window) {
  const FeSpace& space = *report.G.space;
  const Mesh& mesh = space.mesh();
  const auto& verts = mesh.vertices;
  std::vector<double> local_h(verts.size(), 0.0);
  for (const auto& t : mesh.triangles)
    for (int i = 0; i < 3; ++i) {
      int a = t[i], b = t[(i + 1) % 3];
      double l = norm(verts[a] - verts[b]);
      local_h[a] = std::max(local_h[a], l);
      local_h[b] = std::max(local_h[b], l);
    }
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < verts.size(); ++i) {
    double r = norm(verts[i]);
    if (r >= window.r_min && r <= window.r_max && (!window.local_mesh_size || r >= 3.0 * local_h[i]))
      idx.push_back(i);
  }
  if (idx.size() < 20) {
    std::ostringstream msg;
    msg << "fit window [" << window.r_min << ", " << window.r_max << "] contains " << idx.size()
        << " vertices; at least 20 are needed (refine the mesh or widen the window)";
    fail(ErrorCode::fit_window, msg.str());
  }
  const double quad = 0.25 / space.area();
  Eigen::MatrixXd A(idx.size(), 2);
  Eigen::VectorXd y(idx.size());
  for (std::size_t k = 0; k < idx.size(); ++k) {
    double r = norm(verts[idx[k]]);
    A(k, 0) = std::log(r);
    A(k, 1) = 1.0;
    y[k] = report.G[idx[k]] - quad * r * r;
  }
  Eigen::Vector2d coef = A.colPivHouseholderQr().solve(y);
  report.log_coefficient_fit = coef[0];
  report.A0 = coef[1];
  report.fit_window = window;
  report.fit_points = idx.size();
  report.fit_rms = std::sqrt((A * coef - y).squaredNorm() / static_cast<double>(idx.size()));
  return report.A0;
}

double half_disc_A0(double delta) { return (std::log(delta) - 0.75) / pi; }

double half_disc_green(double delta, Point x) {
  double r = norm(x);
  return -std::log(r) / pi + r * r / (2.0 * pi * delta * delta) + half_disc_A0(delta);
}

std::string green_report_json(const GreenReport& report, const std::string& field_csv_path) {
  nlohmann::ordered_json j;
  j["A0"] = report.A0;
  j["log_coefficient"] = report.log_coefficient_fit;
  j["fit_window"] = {report.fit_window.r_min, report.fit_window.r_max};
  j["fit_points"] = report.fit_points;
  j["fit_rms"] = report.fit_rms;
  j["residual_norm"] = report.residual_norm;
  j["mean"] = report.mean_value;
  j["field_csv"] = field_csv_path;
  return j.dump(2) + "\n";
}

}  // namespace smtlab
