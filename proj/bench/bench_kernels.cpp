// Parallel kernels against their serial references on the grids the acceptance runs use.
#include <chrono>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>

#include <omp.h>

#include "shearguide/assembly.hpp"
#include "shearguide/preconditioner.hpp"

using namespace shearguide;

namespace {

double time_it(const std::function<void()>& f, int reps) {
  f();
  const auto t0 = std::chrono::steady_clock::now();
  for (int i = 0; i < reps; ++i) f();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() / reps;
}

void report(const char* name, const ShearForm& form, int reps) {
  const std::size_t n = form.size();
  std::mt19937_64 rng(3);
  std::normal_distribution<double> d;
  std::vector<double> x(n), y(n), z(n);
  for (auto& v : x) v = d(rng);
  FastDiagPreconditioner pre(form.split, true);
  pre.set_shift(0.5 * pre.separable_bottom());

  const double ta = time_it([&] { form.a->apply(x, y); }, reps);
  const double tas = time_it([&] { form.a->apply_serial(x, z); }, reps);
  double diff = 0;
  for (std::size_t i = 0; i < n; ++i) diff = std::max(diff, std::abs(y[i] - z[i]));
  const double tp = time_it([&] { pre.apply(x, y); }, reps);
  const double tps = time_it([&] { pre.apply_serial(x, z); }, reps);
  for (std::size_t i = 0; i < n; ++i) diff = std::max(diff, std::abs(y[i] - z[i]));
  std::printf("%-28s %9zu  A: %9.3f ms / %9.3f ms (x%.2f)  P: %9.3f ms / %9.3f ms (x%.2f)  max|diff| %.1e\n", name, n,
              1e3 * ta, 1e3 * tas, tas / ta, 1e3 * tp, 1e3 * tps, tps / tp, diff);
}

}  // namespace

int main() {
  std::printf("OpenMP threads: %d\n", omp_get_max_threads());
  std::printf("%-28s %9s  %-44s  %-44s\n", "form", "dofs", "Kron apply: parallel / serial", "FastDiag: parallel / serial");
  const double w = std::numbers::pi * std::sqrt(2.0);
  for (std::size_t n2 : {64, 128, 256}) {
    GridSpec g{16 * n2 / 64, 8, n2, XGrading{2.0 * w}};
    const auto f = assemble_reduced2d(ShearParam(1.0), Rect(0, 1, 0, w), 85.0, g, 2);
    char name[64];
    std::snprintf(name, sizeof name, "reduced2d n2=%zu L=85", n2);
    report(name, f, 20);
  }
  for (std::size_t n : {16, 32}) {
    const auto f = assemble_waveguide(ShearParam(1.0), Rect(0, 1, 0, 1), 6.0, GridSpec{2 * n, n, n, {}},
                                      FormMode::half_dn);
    char name[64];
    std::snprintf(name, sizeof name, "half_dn %zux%zux%zu", 2 * n, n, n);
    report(name, f, 10);
  }
}
