#include "macrostate/kernels.hpp"

#include <cmath>
#include <cstddef>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace macrostate::kernels {

namespace {

inline double l1_distance(const double* a, const double* b, std::size_t dim) {
  double sum = 0.0;
  for (std::size_t k = 0; k < dim; ++k) sum += std::abs(a[k] - b[k]);
  return sum;
}

}  // namespace

void pairwise_l1_serial(const double* points, std::size_t n, std::size_t dim, double* out) {
  for (std::size_t i = 0; i < n; ++i) {
    out[i * n + i] = 0.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      double d = l1_distance(points + i * dim, points + j * dim, dim);
      out[i * n + j] = d;
      out[j * n + i] = d;
    }
  }
}

void pairwise_l1_parallel(const double* points, std::size_t n, std::size_t dim, double* out) {
  // Each (i, j) pair is computed once and written to two distinct cells, so
  // iterations are independent and the result is bitwise identical to the
  // serial kernel at any thread count.
  const std::ptrdiff_t sn = static_cast<std::ptrdiff_t>(n);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
  for (std::ptrdiff_t i = 0; i < sn; ++i) {
    const std::size_t ui = static_cast<std::size_t>(i);
    out[ui * n + ui] = 0.0;
    for (std::size_t j = ui + 1; j < n; ++j) {
      double d = l1_distance(points + ui * dim, points + j * dim, dim);
      out[ui * n + j] = d;
      out[j * n + ui] = d;
    }
  }
}

void pairwise_l1(const double* points, std::size_t n, std::size_t dim, double* out) {
#ifdef _OPENMP
  pairwise_l1_parallel(points, n, dim, out);
#else
  pairwise_l1_serial(points, n, dim, out);
#endif
}

}  // namespace macrostate::kernels
