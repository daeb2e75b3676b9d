#include <cmath>
#include <cstring>
#include <filesystem>
#include <numbers>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "smtlab/smtlab.h"

extern "C" int capi_smoke(void);

namespace {

// RAII holders for the opaque handles.
template <class T, void (*Free)(T*)>
struct Handle {
  T* p = nullptr;
  Handle() = default;
  Handle(const Handle&) = delete;
  ~Handle() { Free(p); }
  T** out() { return &p; }
  operator T*() const { return p; }
};
using Space = Handle<smtlab_space, smtlab_space_free>;
using Field = Handle<smtlab_field, smtlab_field_free>;
using Green = Handle<smtlab_green, smtlab_green_free>;
using Extremal = Handle<smtlab_extremal, smtlab_extremal_free>;

std::string take(char* s) {
  std::string out = s ? s : "";
  smtlab_string_free(s);
  return out;
}

void make_space(Space& s, int level) {
  smtlab_domain d;
  smtlab_domain_default(&d);
  d.level = level;
  REQUIRE(smtlab_space_create(&d, s.out()) == SMTLAB_OK);
}

}  // namespace

TEST_CASE("C header compiles and works from C") { CHECK(capi_smoke() == 0); }

TEST_CASE("error reporting") {
  Space s;
  smtlab_domain d;
  smtlab_domain_default(&d);
  d.level = -1;
  CHECK(smtlab_space_create(&d, s.out()) != SMTLAB_OK);
  CHECK(std::strlen(smtlab_last_error()) > 0);
  CHECK(s.p == nullptr);

  double v = 0.0;
  CHECK(smtlab_bubble_mass(1.5, 0, &v) == SMTLAB_ERR_DOMAIN);
  CHECK(std::string(smtlab_status_name(SMTLAB_ERR_DOMAIN)) == "domain");
  CHECK(std::string(smtlab_status_name(SMTLAB_ERR_INVALID_ARGUMENT)) == "invalid_argument");
  CHECK(smtlab_bubble_mass(0.5, 0, nullptr) == SMTLAB_ERR_INVALID_ARGUMENT);
  CHECK(smtlab_bubble_mass(0.5, 0, &v) == SMTLAB_OK);
  CHECK(std::string(smtlab_last_error()).empty());
  CHECK(std::abs(v - 2.0) < 1e-6);

  make_space(s, 4);
  Field m;
  CHECK(smtlab_moser_field(s, 0.5, 0.4, m.out(), nullptr) == SMTLAB_ERR_GEOMETRY);
}

TEST_CASE("space, fields and functional") {
  Space s;
  make_space(s, 5);
  smtlab_space_info info;
  REQUIRE(smtlab_space_get_info(s, &info) == SMTLAB_OK);
  CHECK(info.vertices > 100);
  double wm = 0.0;
  REQUIRE(smtlab_weighted_measure(s, 0.5, 0.1, &wm) == SMTLAB_OK);
  CHECK(wm == doctest::Approx(std::numbers::pi * 0.1).epsilon(1e-9));

  Field m, u;
  smtlab_moser_info mi;
  REQUIRE(smtlab_moser_field(s, 0.05, 0.4, m.out(), &mi) == SMTLAB_OK);
  REQUIRE(smtlab_field_normalize(m, u.out()) == SMTLAB_OK);
  double e = 0.0, mean = 1.0, J = 0.0;
  int sat = -1;
  REQUIRE(smtlab_field_energy(u, &e) == SMTLAB_OK);
  REQUIRE(smtlab_field_mean(u, &mean) == SMTLAB_OK);
  CHECK(e == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(mean) < 1e-12);
  REQUIRE(smtlab_mt_functional(u, 0.5, std::numbers::pi, &J, &sat) == SMTLAB_OK);
  CHECK(J > 0.0);
  CHECK(sat == 0);

  std::vector<double> vals(smtlab_field_size(u));
  REQUIRE(smtlab_field_values(u, vals.data(), vals.size()) == SMTLAB_OK);
  CHECK(smtlab_field_values(u, vals.data(), vals.size() - 1) == SMTLAB_ERR_INVALID_ARGUMENT);
  Field copy;
  REQUIRE(smtlab_field_create(s, vals.data(), vals.size(), copy.out()) == SMTLAB_OK);
  double e2 = 0.0;
  smtlab_field_energy(copy, &e2);
  CHECK(e2 == e);
  Field bad;
  CHECK(smtlab_field_create(s, vals.data(), 3, bad.out()) != SMTLAB_OK);
}

TEST_CASE("Green report and JSON through the C API") {
  Space s;
  make_space(s, 5);
  Green g;
  REQUIRE(smtlab_green_solve(s, g.out()) == SMTLAB_OK);
  smtlab_green_info gi;
  REQUIRE(smtlab_green_get_info(g, &gi) == SMTLAB_OK);
  CHECK(gi.fit_points >= 20);
  auto j = nlohmann::json::parse(take([&] {
    char* out = nullptr;
    REQUIRE(smtlab_green_json(g, "green.csv", &out) == SMTLAB_OK);
    return out;
  }()));
  CHECK(j["A0"].get<double>() == gi.A0);
  smtlab_threshold t;
  REQUIRE(smtlab_threshold_compute(s, 0.5, gi.A0, &t) == SMTLAB_OK);
  CHECK(t.total == t.weighted_volume + t.bubble_term);
}

TEST_CASE("subcritical solve through the C API") {
  Space s;
  make_space(s, 4);
  smtlab_solver_options o;
  smtlab_solver_options_default(&o);
  CHECK(o.damping == 0.5);
  Extremal r;
  REQUIRE(smtlab_maximize(s, 0.5, 0.3, &o, nullptr, r.out()) == SMTLAB_OK);
  smtlab_extremal_info info;
  REQUIRE(smtlab_extremal_get_info(r, &info) == SMTLAB_OK);
  CHECK(info.converged == 1);
  CHECK(info.el_residual < 1e-8);

  Field u;
  REQUIRE(smtlab_extremal_field(r, u.out()) == SMTLAB_OK);
  double res = 1.0;
  REQUIRE(smtlab_el_residual(u, 0.5, 0.3, &res) == SMTLAB_OK);
  CHECK(res < 1e-8);
  double lo = 0.0, hi = 0.0;
  REQUIRE(smtlab_truncation_split(u, 0.5, info.c_eps, &lo, &hi) == SMTLAB_OK);
  CHECK(lo + hi == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(smtlab_truncation_split(u, 1.5, info.c_eps, &lo, &hi) == SMTLAB_ERR_DOMAIN);
  double radii[2] = {0.1, 2.0}, frac[2];
  REQUIRE(smtlab_concentration(u, radii, 2, frac) == SMTLAB_OK);
  CHECK(frac[0] <= frac[1]);
  smtlab_bubble_comparison cmp;
  REQUIRE(smtlab_compare_bubble(r, 1.0, &cmp) == SMTLAB_OK);
  CHECK(cmp.center_value == 0.0);

  const smtlab_extremal* list[1] = {r};
  std::string csv = take([&] {
    char* out = nullptr;
    REQUIRE(smtlab_extremal_sweep_csv(list, 1, &out) == SMTLAB_OK);
    return out;
  }());
  CHECK(csv.rfind("beta,eps,J,", 0) == 0);

  // warm start from the solution itself
  o.init = SMTLAB_INIT_PREVIOUS;
  Extremal again;
  REQUIRE(smtlab_maximize(s, 0.5, 0.3, &o, u, again.out()) == SMTLAB_OK);
  smtlab_extremal_info info2;
  smtlab_extremal_get_info(again, &info2);
  CHECK(std::abs(info2.J - info.J) < 1e-8);
  o.init = SMTLAB_INIT_CUSTOM;
  Extremal none;
  CHECK(smtlab_maximize(s, 0.5, 0.3, &o, nullptr, none.out()) != SMTLAB_OK);
}

TEST_CASE("test family through the C API") {
  smtlab_domain d;
  smtlab_domain_default(&d);
  d.level = 5;
  d.grading = 3.0;
  Space s;
  REQUIRE(smtlab_space_create(&d, s.out()) == SMTLAB_OK);
  Green g;
  REQUIRE(smtlab_green_solve(s, g.out()) == SMTLAB_OK);
  smtlab_test_family tf;
  Field f;
  REQUIRE(smtlab_test_family_margin(g, 1e-3, 0.5, 1.0, nullptr, &tf, f.out()) == SMTLAB_OK);
  CHECK(tf.margin == doctest::Approx(tf.J - tf.threshold.total));
  double e = 0.0;
  smtlab_field_energy(f, &e);
  CHECK(e == tf.energy);
  CHECK(smtlab_test_family_margin(g, 0.2, 0.5, 1.0, nullptr, &tf, nullptr) == SMTLAB_ERR_PARAMETER);
}

TEST_CASE("mesh round trip through files") {
  Space s;
  make_space(s, 3);
  auto path = (std::filesystem::temp_directory_path() / "smtlab_capi_mesh.txt").string();
  REQUIRE(smtlab_space_save(s, path.c_str()) == SMTLAB_OK);
  Space t;
  REQUIRE(smtlab_space_load(path.c_str(), t.out()) == SMTLAB_OK);
  smtlab_space_info a, b;
  smtlab_space_get_info(s, &a);
  smtlab_space_get_info(t, &b);
  CHECK(a.vertices == b.vertices);
  CHECK(a.area == b.area);
  std::filesystem::remove(path);
  Space missing;
  CHECK(smtlab_space_load("/nonexistent/mesh.txt", missing.out()) == SMTLAB_ERR_IO);
}
