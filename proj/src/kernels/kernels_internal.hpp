#pragma once

#include <cstddef>

#include "fairex/kernels.hpp"

namespace fairex::kernels {

#if defined(FAIREX_BUILD_AVX2)
namespace avx2 {
double Dot(const double* a, const double* b, std::size_t n);
double Sum(const double* a, std::size_t n);
void Axpy(double alpha, const double* x, double* y, std::size_t n);
void Multiply(const double* a, const double* b, double* out, std::size_t n);
}  // namespace avx2
#endif

#if defined(FAIREX_BUILD_NEON)
namespace neon {
double Dot(const double* a, const double* b, std::size_t n);
double Sum(const double* a, std::size_t n);
void Axpy(double alpha, const double* x, double* y, std::size_t n);
void Multiply(const double* a, const double* b, double* out, std::size_t n);
}  // namespace neon
#endif

}  // namespace fairex::kernels
