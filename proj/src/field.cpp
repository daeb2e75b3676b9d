#include "smtlab/field.hpp"

#include <cmath>
#include <sstream>

#include "smtlab/error.hpp"
#include "smtlab/io.hpp"

namespace smtlab {

void validate(const ScalarField& u) {
  if (!u.space) fail(ErrorCode::parameter, "field has no mesh");
  if (u.size() != u.space->size()) {
    std::ostringstream msg;
    msg << "field has " << u.size() << " values but the mesh has " << u.space->size() << " vertices";
    fail(ErrorCode::parameter, msg.str());
  }
  for (Eigen::Index i = 0; i < u.values.size(); ++i)
    if (!std::isfinite(u.values[i]))
      fail(ErrorCode::parameter, "field value at vertex " + std::to_string(i) + " is not finite");
}

ScalarField make_field(SpacePtr space, Eigen::VectorXd values) {
  ScalarField u{std::move(space), std::move(values)};
  validate(u);
  return u;
}

ScalarField interpolate(SpacePtr space, const std::function<double(Point)>& f) {
  const auto& verts = space->mesh().vertices;
  Eigen::VectorXd v(static_cast<Eigen::Index>(verts.size()));
  for (std::size_t i = 0; i < verts.size(); ++i) v[static_cast<Eigen::Index>(i)] = f(verts[i]);
  return make_field(std::move(space), std::move(v));
}

std::optional<double> evaluate(const ScalarField& u, Point p) {
  auto hit = u.space->locator().locate(p);
  if (!hit) return std::nullopt;
  const auto& tri = u.space->mesh().triangles[hit->triangle];
  return (1.0 - hit->b1 - hit->b2) * u.values[tri[0]] + hit->b1 * u.values[tri[1]] + hit->b2 * u.values[tri[2]];
}

std::string field_csv(const ScalarField& u) {
  std::string out = "vertex,x,y,value\n";
  const auto& verts = u.space->mesh().vertices;
  for (std::size_t i = 0; i < verts.size(); ++i) {
    out += std::to_string(i);
    out += ',' + fmt17(verts[i].x) + ',' + fmt17(verts[i].y) + ',' + fmt17(u[i]) + '\n';
  }
  return out;
}

void save_field_csv(const std::string& path, const ScalarField& u) { write_text_file(path, field_csv(u)); }

}  // namespace smtlab
