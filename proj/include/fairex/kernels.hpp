#pragma once
// Dense double-precision vector kernels with runtime ISA selection.
//
// Every kernel has a scalar reference implementation. Vectorized variants
// (AVX2+FMA on x86-64, NEON on AArch64) are compiled into separate
// translation units and selected once at startup from CPU feature bits.
// Vector variants reassociate sums, so results agree with the scalar path
// to rounding, not bit-for-bit.

#include <cstddef>
#include <span>
#include <string_view>

namespace fairex::kernels {

enum class Isa { kScalar, kAvx2, kNeon };

std::string_view IsaName(Isa isa);

// Best ISA the running CPU supports among those compiled in.
Isa DetectIsa();

// ISA currently used by the free functions below.
Isa ActiveIsa();

// Forces a specific ISA (tests and benchmarks). Returns false and leaves the
// selection unchanged when `isa` is unavailable on this CPU/build.
bool SetActiveIsa(Isa isa);

bool IsaAvailable(Isa isa);

struct KernelTable {
  double (*dot)(const double* a, const double* b, std::size_t n);
  double (*sum)(const double* a, std::size_t n);
  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // out[i] = a[i] * b[i]
  void (*multiply)(const double* a, const double* b, double* out,
                   std::size_t n);
};

const KernelTable& Table(Isa isa);

namespace scalar {
double Dot(const double* a, const double* b, std::size_t n);
double Sum(const double* a, std::size_t n);
void Axpy(double alpha, const double* x, double* y, std::size_t n);
void Multiply(const double* a, const double* b, double* out, std::size_t n);
}  // namespace scalar

// Dispatching entry points. Spans must have equal length.
double Dot(std::span<const double> a, std::span<const double> b);
double Sum(std::span<const double> a);
void Axpy(double alpha, std::span<const double> x, std::span<double> y);
void Multiply(std::span<const double> a, std::span<const double> b,
              std::span<double> out);

}  // namespace fairex::kernels
