// Exercises the shared-library C interface end to end: handle lifecycles,
// error codes and messages, and the scenario runner.

#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <string>

#include "kgeo.h"

static int g_failures = 0;

#define REQUIRE(cond)                                                       \
  do {                                                                      \
    if (!(cond)) {                                                          \
      std::fprintf(stderr, "[FAIL] %s:%d: %s\n", __FILE__, __LINE__, #cond); \
      ++g_failures;                                                         \
    }                                                                       \
  } while (0)

int main() {
  namespace fs = std::filesystem;

  // invalid construction reports a code and a message
  kgeo_surface* bad = nullptr;
  REQUIRE(kgeo_surface_create_torus(4, &bad) == KGEO_ERR_INVALID_ARGUMENT);
  REQUIRE(std::strlen(kgeo_last_error()) > 0);

  kgeo_surface* torus = nullptr;
  REQUIRE(kgeo_surface_create_torus(64, &torus) == KGEO_OK);
  REQUIRE(kgeo_surface_node_count(torus) == 64 * 64);

  kgeo_metric* flat = nullptr;
  REQUIRE(kgeo_metric_flat(torus, &flat) == KGEO_OK);

  kgeo_field* one = nullptr;
  REQUIRE(kgeo_field_constant(torus, 1.0, &one) == KGEO_OK);
  double vol = 0.0;
  REQUIRE(kgeo_integrate(one, flat, &vol) == KGEO_OK);
  REQUIRE(vol == 2.0);

  // positivity failure surfaces as a typed status
  kgeo_field* steep = nullptr;
  REQUIRE(kgeo_field_preset(torus, "cosine", 2.0 / (M_PI * M_PI), 1, &steep) == KGEO_OK);
  kgeo_metric* should_fail = nullptr;
  REQUIRE(kgeo_metric_from_potential(flat, steep, &should_fail) == KGEO_ERR_POSITIVITY);

  // series pipeline
  kgeo_field* psi0 = nullptr;
  REQUIRE(kgeo_field_preset(torus, "cosine", 0.1, 1, &psi0) == KGEO_OK);
  kgeo_series* series = nullptr;
  REQUIRE(kgeo_series_solve(flat, psi0, 6, &series) == KGEO_OK);
  REQUIRE(kgeo_series_order(series) == 6);

  kgeo_field* theta2 = nullptr;
  REQUIRE(kgeo_series_theta(series, 2, &theta2) == KGEO_OK);
  REQUIRE(std::abs(kgeo_field_sup_norm(theta2) - 0.5 * M_PI * M_PI * 0.01) < 1e-12);

  double residual = 1.0;
  REQUIRE(kgeo_series_hcma_residual(series, 0.05, &residual) == KGEO_OK);
  REQUIRE(residual < 1e-7);

  double radius = 0.0;
  REQUIRE(kgeo_series_radius(series, 0, &radius) == KGEO_OK);
  REQUIRE(radius > 0.0);

  double t_fail = 0.0;
  int found = -1;
  REQUIRE(kgeo_series_positivity_horizon(series, 0.2, 8, &t_fail, &found) == KGEO_OK);
  REQUIRE(found == 0);

  kgeo_path* path = nullptr;
  REQUIRE(kgeo_path_from_series(series, &path) == KGEO_OK);
  double e = 0.0;
  REQUIRE(kgeo_path_energy(path, 0.0, &e) == KGEO_OK);
  REQUIRE(std::abs(e - 0.01) < 1e-12);  // int of (0.1 cos)^2 over dVol = 2 * eps^2/2

  // divisor pipeline
  kgeo_field* h = nullptr;
  REQUIRE(kgeo_field_constant(torus, 0.01, &h) == KGEO_OK);
  kgeo_bidegree* bid = nullptr;
  REQUIRE(kgeo_bidegree_solve(flat, h, 4, &bid) == KGEO_OK);
  double res = 1.0;
  REQUIRE(kgeo_bidegree_residual(bid, 4, &res) == KGEO_OK);
  REQUIRE(res < 1e-10);
  double defect = 1.0;
  REQUIRE(kgeo_bidegree_equivariance(bid, 8, &defect) == KGEO_OK);
  REQUIRE(defect < 1e-10);

  kgeo_field *re = nullptr, *im = nullptr;
  REQUIRE(kgeo_bidegree_theta(bid, 1, 1, &re, &im) == KGEO_OK);
  REQUIRE(std::abs(kgeo_field_sup_norm(re) - 0.01) < 1e-14);
  REQUIRE(kgeo_field_sup_norm(im) < 1e-15);

  kgeo_path* ray = nullptr;
  double trust = 0.0;
  REQUIRE(kgeo_bidegree_ray(bid, 9.0, 13.0, 21, &ray, &trust) == KGEO_OK);
  REQUIRE(trust > 0.0);
  double ray_res = 1.0;
  REQUIRE(kgeo_path_geodesic_residual(ray, 11.0, &ray_res) == KGEO_OK);
  REQUIRE(ray_res < 1e-7);

  // rotation path on the radial grid
  kgeo_surface* cp1 = nullptr;
  REQUIRE(kgeo_surface_create_radial_cp1(128, 10.0, &cp1) == KGEO_OK);
  kgeo_path* rot = nullptr;
  REQUIRE(kgeo_path_rotation_ray(cp1, &rot) == KGEO_OK);
  double rres = 1.0;
  REQUIRE(kgeo_path_geodesic_residual(rot, 0.5, &rres) == KGEO_OK);
  REQUIRE(rres < 1e-8);
  double len = 0.0;
  REQUIRE(kgeo_path_length(rot, 0.0, 1.0, &len) == KGEO_OK);
  REQUIRE(std::abs(len - std::sqrt(8.0 * M_PI / 3.0)) < 1e-4);
  double c0 = 0.0;
  REQUIRE(kgeo_path_c0(rot, 1.0, &c0) == KGEO_OK);
  REQUIRE(c0 > 0.0);

  // scenario runner through the C surface
  const fs::path out = fs::temp_directory_path() / "kgeo_capi_out";
  fs::remove_all(out);
  int exit_code = -1;
  char* report = nullptr;
  REQUIRE(kgeo_run_scenario(R"({"problem":"ivp","ivp":{"order":4}})", nullptr,
                            out.string().c_str(), 3, 1.0, &exit_code, &report) == KGEO_OK);
  REQUIRE(exit_code == 0);
  REQUIRE(report != nullptr);
  REQUIRE(fs::exists(out / "summary.json"));
  kgeo_string_free(report);

  int cfg_exit = -1;
  REQUIRE(kgeo_run_scenario(R"({"problem":"ivp","bogus":1})", nullptr, out.string().c_str(), 3,
                            1.0, &cfg_exit, nullptr) == KGEO_OK);
  REQUIRE(cfg_exit == 3);

  kgeo_path_destroy(rot);
  kgeo_surface_destroy(cp1);
  kgeo_path_destroy(ray);
  kgeo_field_destroy(re);
  kgeo_field_destroy(im);
  kgeo_bidegree_destroy(bid);
  kgeo_field_destroy(h);
  kgeo_path_destroy(path);
  kgeo_field_destroy(theta2);
  kgeo_series_destroy(series);
  kgeo_field_destroy(psi0);
  kgeo_field_destroy(steep);
  kgeo_field_destroy(one);
  kgeo_metric_destroy(flat);
  kgeo_surface_destroy(torus);
  kgeo_surface_destroy(nullptr);  // tolerated

  if (g_failures == 0) {
    std::printf("C API: all checks passed\n");
    return 0;
  }
  std::printf("C API: %d check(s) failed\n", g_failures);
  return 1;
}
