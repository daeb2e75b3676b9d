#include <cmath>
#include <numbers>

#include "common.hpp"
#include "doctest.h"
#include "smtlab/error.hpp"
#include "smtlab/functional.hpp"
#include "smtlab/profiles.hpp"

using namespace smtlab;
using std::numbers::pi;

namespace {

ScalarField coordinate(SpacePtr s, int axis) {
  return interpolate(s, [axis](Point p) { return axis == 0 ? p.x : p.y; });
}

}  // namespace

TEST_CASE("functional of the zero field is the weighted measure") {
  auto s = testing::half_disc_space(4);
  ScalarField zero = interpolate(s, [](Point) { return 0.0; });
  for (double beta : {0.2, 0.5, 0.8}) {
    auto v = mt_functional(zero, FunctionalParams::with_alpha(beta, 1.0));
    CHECK(v.value == doctest::Approx(weighted_measure(s->mesh(), beta)).epsilon(1e-9));
    CHECK_FALSE(v.saturated);
  }
}

TEST_CASE("functional of a constant field") {
  auto s = testing::half_disc_space(6);
  const double c = 0.7;
  ScalarField u = interpolate(s, [c](Point) { return c; });
  auto v = mt_functional(u, FunctionalParams::with_alpha(0.5, pi));
  CHECK(v.value == doctest::Approx(std::exp(pi * c * c) * pi).epsilon(1e-5));
  CHECK(v.value == doctest::Approx(std::exp(pi * c * c) * weighted_measure(s->mesh(), 0.5)).epsilon(1e-9));
}

TEST_CASE("functional of a Moser field matches a radial computation") {
  // half-disc of radius 2 so that the cutoff annulus delta < r < 2 delta fits with delta = 1
  auto s = testing::half_disc_space(6, 3.0, 2.0);
  const double beta = 0.25, l = 0.1, delta = 1.0, alpha = 2.0 * pi * (1.0 - beta);
  auto m = moser_function({l, delta}, s);
  // continuum C_l from the zero-mean condition over the half-disc
  auto core = [&](double r) { return moser_profile(r, l, delta, 0.0); };
  auto cut = [&](double r) { return moser_profile(r, l, delta, 1.0); };
  double core_int = testing::radial_gauss([&](double r) { return core(r) * r; }, 0.0, l, 4) +
                    testing::radial_gauss([&](double r) { return core(r) * r; }, l, delta, 400);
  double cut_int = testing::radial_gauss([&](double r) { return cut(r) * r; }, delta, 2.0, 200);
  double C = -core_int / cut_int;
  CHECK(m.C_l == doctest::Approx(C).epsilon(2e-3));
  auto integrand = [&](double r) {
    double u = moser_profile(r, l, delta, C);
    return pi * std::pow(r, 1.0 - 2.0 * beta) * std::exp(alpha * u * u);
  };
  // substitute r = q^2 near the origin to remove the r^(1-2 beta) endpoint behaviour
  double oracle = testing::radial_gauss([&](double q) { return 2.0 * q * integrand(q * q); }, 0.0, std::sqrt(l), 20) +
                  testing::radial_gauss(integrand, l, delta, 400) + testing::radial_gauss(integrand, delta, 2.0, 400);
  // the field is constant out to the boundary, so the polygon's missing sliver is removed exactly
  const double disc_measure = pi * std::pow(2.0, 2.0 - 2.0 * beta) / (2.0 - 2.0 * beta);
  oracle += std::exp(alpha * C * C / pi) * (weighted_measure(s->mesh(), beta) - disc_measure);
  auto v = mt_functional(m.u, FunctionalParams::with_alpha(beta, alpha));
  CHECK(v.value == doctest::Approx(oracle).epsilon(1e-3));
}

TEST_CASE("functional increases strictly with the exponent") {
  auto s = testing::half_disc_space(4);
  ScalarField u = normalize(coordinate(s, 0));
  double prev = 0.0;
  for (double alpha : {0.5, 1.0, 2.0, 3.0, 4.0}) {
    double v = mt_functional(u, FunctionalParams::with_alpha(0.3, alpha)).value;
    CHECK(v > prev);
    prev = v;
  }
}

TEST_CASE("Hoelder bound for subcritical exponents") {
  auto s = testing::half_disc_space(5);
  const double beta = 0.25, alpha = pi;  // alpha / 2 pi = 1/2, dual weight exponent beta / (1/2) = 1/2
  const double q = alpha / (2.0 * pi);
  std::vector<ScalarField> fields{normalize(coordinate(s, 0)), normalize(coordinate(s, 1)),
                                  normalize(moser_function({0.01, 0.4}, s).u),
                                  normalize(interpolate(s, [](Point p) { return std::sin(5.0 * p.x) + p.y * p.y; }))};
  for (const auto& u : fields) {
    double lhs = mt_functional(u, FunctionalParams::with_alpha(beta, alpha)).value;
    double cy = exp_integral(u, 0.0, 2.0 * pi).value;
    double dual = weighted_measure(s->mesh(), beta / (1.0 - q));
    CHECK(lhs <= std::pow(cy, q) * std::pow(dual, 1.0 - q));
  }
}

TEST_CASE("small beta approaches the unweighted functional") {
  auto s = testing::half_disc_space(4);
  ScalarField u = normalize(coordinate(s, 1));
  double weighted = mt_functional(u, FunctionalParams::with_alpha(1e-6, 2.0 * pi)).value;
  double plain = exp_integral(u, 0.0, 2.0 * pi).value;
  CHECK(weighted == doctest::Approx(plain).epsilon(1e-4));
}

TEST_CASE("saturation is tagged instead of overflowing") {
  auto s = testing::half_disc_space(2);
  ScalarField u = interpolate(s, [](Point) { return 30.0; });
  auto v = mt_functional(u, FunctionalParams::with_alpha(0.5, pi));
  CHECK(v.saturated);
  CHECK(std::isfinite(v.value));
  CHECK(v.max_exponent == doctest::Approx(900.0 * pi));
}

TEST_CASE("functional parameters") {
  auto p = FunctionalParams::subcritical_eps(0.5, 0.2);
  CHECK(p.alpha() == doctest::Approx(2.0 * pi * 0.3));
  CHECK(p.alpha() < critical_alpha(0.5));
  CHECK_THROWS_AS(FunctionalParams::subcritical_eps(0.5, 0.5), Error);
  CHECK_THROWS_AS(FunctionalParams::subcritical_eps(0.5, 0.0), Error);
  CHECK_THROWS_AS(FunctionalParams::with_alpha(1.2, 1.0), Error);
  CHECK_THROWS_AS(FunctionalParams::with_alpha(0.5, -1.0), Error);
}

TEST_CASE("Dirichlet energy") {
  auto s = testing::half_disc_space(5);
  CHECK(dirichlet_energy(interpolate(s, [](Point) { return 5.0; })) == doctest::Approx(0.0));
  CHECK(dirichlet_energy(coordinate(s, 0)) == doctest::Approx(pi / 2).epsilon(1e-3));
  CHECK(dirichlet_energy(coordinate(s, 1)) > 0.0);
}

TEST_CASE("mean-zero projection") {
  auto s = testing::half_disc_space(4);
  auto seven = mean_zero_project(interpolate(s, [](Point) { return 7.0; }));
  CHECK(seven.values.cwiseAbs().maxCoeff() < 1e-12);
  ScalarField u = mean_zero_project(interpolate(s, [](Point p) { return std::exp(p.x) + 3.0 * p.y; }));
  CHECK(std::abs(mean(u)) < 1e-12 * u.values.cwiseAbs().maxCoeff());
  ScalarField again = mean_zero_project(u);
  CHECK((again.values - u.values).cwiseAbs().maxCoeff() < 1e-14);

  auto r = testing::rectangle_space(3);
  ScalarField x1 = coordinate(r, 0);
  CHECK((mean_zero_project(x1).values - x1.values).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("normalization") {
  auto s = testing::half_disc_space(4);
  ScalarField x1 = coordinate(s, 0);
  ScalarField twice = x1;
  twice.values *= 2.0;
  ScalarField n1 = normalize(x1);
  CHECK(dirichlet_energy(n1) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK((normalize(twice).values - n1.values).cwiseAbs().maxCoeff() < 1e-13);
  CHECK((normalize(n1).values - n1.values).cwiseAbs().maxCoeff() < 1e-13);
  ScalarField shifted = interpolate(s, [](Point p) { return p.y * p.y; });
  CHECK(n1.values.dot(mean_zero_project(x1).values) > 0.0);
  CHECK(std::abs(mean(normalize(shifted))) < 1e-12);

  try {
    normalize(interpolate(s, [](Point) { return 3.0; }));
    FAIL("expected degenerate_input");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::degenerate_input);
  }
}

TEST_CASE("normalizing a Moser field") {
  auto s = testing::half_disc_space(6, 3.0, 2.0);
  auto m = moser_function({0.01, 1.0}, s);
  CHECK(dirichlet_energy(normalize(m.u)) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(dirichlet_energy(m.u) == doctest::Approx(m.predicted_energy).epsilon(2e-2));
}

TEST_CASE("field validation and CSV export") {
  auto s = testing::half_disc_space(1);
  Eigen::VectorXd bad = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(s->size()) - 1);
  CHECK_THROWS_AS(make_field(s, bad), Error);
  Eigen::VectorXd nan = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(s->size()));
  nan[0] = std::nan("");
  CHECK_THROWS_AS(make_field(s, nan), Error);
  std::string csv = field_csv(coordinate(s, 0));
  CHECK(csv.rfind("vertex,x,y,value\n", 0) == 0);
}

TEST_CASE("point evaluation interpolates linearly") {
  auto s = testing::half_disc_space(3);
  ScalarField u = interpolate(s, [](Point p) { return 2.0 * p.x - p.y + 0.5; });
  for (Point p : {Point{0.1, 0.2}, Point{-0.5, 0.3}, Point{0.0, 0.9}}) {
    auto v = evaluate(u, p);
    REQUIRE(v);
    CHECK(*v == doctest::Approx(2.0 * p.x - p.y + 0.5).epsilon(1e-12));
  }
  CHECK_FALSE(evaluate(u, Point{0.0, -0.5}));
  CHECK_FALSE(evaluate(u, Point{2.0, 0.5}));
}
