// Times the serial pairwise-L1 kernel against the OpenMP one and checks the
// outputs agree bitwise. Run manually: build/bench/bench_kernels

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "macrostate/kernels.hpp"
#include "macrostate/util.hpp"

namespace {

template <typename Fn>
double best_of_ms(Fn&& fn, int repeats) {
  double best = 1e300;
  for (int r = 0; r < repeats; ++r) {
    auto t0 = std::chrono::steady_clock::now();
    fn();
    auto t1 = std::chrono::steady_clock::now();
    best = std::min(best, std::chrono::duration<double, std::milli>(t1 - t0).count());
  }
  return best;
}

}  // namespace

int main() {
#ifdef _OPENMP
  std::printf("OpenMP enabled, max threads %d\n", omp_get_max_threads());
#else
  std::printf("built without OpenMP; parallel kernel falls back to serial\n");
#endif

  const struct {
    std::size_t n, dim;
  } cases[] = {{256, 64}, {512, 128}, {1024, 128}};

  std::mt19937_64 rng(7);
  for (const auto& c : cases) {
    std::vector<double> points(c.n * c.dim);
    for (double& v : points) v = macrostate::uniform_range(rng, -1.0, 1.0);
    std::vector<double> serial(c.n * c.n), parallel(c.n * c.n);

    double t_serial = best_of_ms(
        [&] { macrostate::kernels::pairwise_l1_serial(points.data(), c.n, c.dim, serial.data()); },
        3);
    double t_parallel = best_of_ms(
        [&] {
          macrostate::kernels::pairwise_l1_parallel(points.data(), c.n, c.dim, parallel.data());
        },
        3);

    double max_delta = 0.0;
    for (std::size_t i = 0; i < serial.size(); ++i) {
      max_delta = std::max(max_delta, std::abs(serial[i] - parallel[i]));
    }
    std::printf("n=%5zu dim=%4zu  serial %9.3f ms  parallel %9.3f ms  speedup %5.2fx  max|delta| %g\n",
                c.n, c.dim, t_serial, t_parallel, t_serial / t_parallel, max_delta);
  }
  return 0;
}
