#pragma once

#include <map>
#include <memory>
#include <tuple>

#include "smtlab/mesh.hpp"
#include "smtlab/space.hpp"

namespace testing {

// Spaces are cached per (shape, level, grading) so the test binary builds each mesh once.
inline smtlab::SpacePtr half_disc_space(int level, double grading = 2.0, double radius = 1.0) {
  static std::map<std::tuple<int, double, double>, smtlab::SpacePtr> cache;
  auto key = std::make_tuple(level, grading, radius);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  smtlab::DomainSpec spec;
  spec.shape = smtlab::HalfDisc{radius};
  spec.refinement_level = level;
  spec.grading_exponent = grading;
  auto space = smtlab::FeSpace::create(smtlab::build_mesh(spec));
  cache.emplace(key, space);
  return space;
}

inline smtlab::SpacePtr rectangle_space(int level, double width = 2.0, double height = 1.0) {
  smtlab::DomainSpec spec;
  spec.shape = smtlab::Rectangle{width, height};
  spec.refinement_level = level;
  return smtlab::FeSpace::create(smtlab::build_mesh(spec));
}

// Composite Gauss-Legendre on [a, b] with n panels of 8 points; independent of the library's rules.
template <class F>
double radial_gauss(F f, double a, double b, int panels) {
  static const double x[4] = {0.1834346424956498, 0.5255324099163290, 0.7966664774136267, 0.9602898564975363};
  static const double w[4] = {0.3626837833783620, 0.3137066458778873, 0.2223810344533745, 0.1012285362903763};
  double h = (b - a) / panels, sum = 0.0;
  for (int p = 0; p < panels; ++p) {
    double mid = a + (p + 0.5) * h;
    for (int i = 0; i < 4; ++i) sum += 0.5 * h * w[i] * (f(mid - 0.5 * h * x[i]) + f(mid + 0.5 * h * x[i]));
  }
  return sum;
}

}  // namespace testing
