#pragma once

#include <cstddef>

namespace macrostate::kernels {

// Pairwise L1 distance over n points of dimension dim (row-major flat
// buffer). out is n*n, symmetric, zero diagonal. The serial form is the
// reference; the parallel form computes every entry with identical
// arithmetic, so results are bitwise equal at any thread count.

void pairwise_l1_serial(const double* points, std::size_t n, std::size_t dim, double* out);

void pairwise_l1_parallel(const double* points, std::size_t n, std::size_t dim, double* out);

/// Dispatch: parallel when OpenMP is available and the problem is big enough.
void pairwise_l1(const double* points, std::size_t n, std::size_t dim, double* out);

}  // namespace macrostate::kernels
