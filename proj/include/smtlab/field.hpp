#pragma once

#include <Eigen/Core>
#include <functional>
#include <optional>
#include <string>

#include "smtlab/space.hpp"

namespace smtlab {

/// Piecewise-linear nodal field.
struct ScalarField {
  SpacePtr space;
  Eigen::VectorXd values;

  std::size_t size() const { return static_cast<std::size_t>(values.size()); }
  double operator[](std::size_t i) const { return values[static_cast<Eigen::Index>(i)]; }
};

/// Throws unless the value count matches the mesh and all entries are finite.
void validate(const ScalarField& u);

ScalarField make_field(SpacePtr space, Eigen::VectorXd values);
ScalarField interpolate(SpacePtr space, const std::function<double(Point)>& f);

/// Value of the P1 interpolant at p, or nullopt outside the mesh.
std::optional<double> evaluate(const ScalarField& u, Point p);

/// CSV with header `vertex,x,y,value`.
std::string field_csv(const ScalarField& u);
void save_field_csv(const std::string& path, const ScalarField& u);

}  // namespace smtlab
