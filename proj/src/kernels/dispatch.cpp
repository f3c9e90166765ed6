#include <atomic>
#include <cassert>

#include "kernels_internal.hpp"

namespace fairex::kernels {
namespace {

constexpr KernelTable kScalarTable{&scalar::Dot, &scalar::Sum, &scalar::Axpy,
                                   &scalar::Multiply};

#if defined(FAIREX_BUILD_AVX2)
constexpr KernelTable kAvx2Table{&avx2::Dot, &avx2::Sum, &avx2::Axpy,
                                 &avx2::Multiply};
#endif

#if defined(FAIREX_BUILD_NEON)
constexpr KernelTable kNeonTable{&neon::Dot, &neon::Sum, &neon::Axpy,
                                 &neon::Multiply};
#endif

std::atomic<Isa>& Selected() {
  static std::atomic<Isa> selected{DetectIsa()};
  return selected;
}

const KernelTable& Current() { return Table(Selected().load(std::memory_order_relaxed)); }

}  // namespace

std::string_view IsaName(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return "scalar";
    case Isa::kAvx2:
      return "avx2";
    case Isa::kNeon:
      return "neon";
  }
  return "unknown";
}

bool IsaAvailable(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return true;
    case Isa::kAvx2:
#if defined(FAIREX_BUILD_AVX2)
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case Isa::kNeon:
#if defined(FAIREX_BUILD_NEON)
      return true;  // baseline on AArch64
#else
      return false;
#endif
  }
  return false;
}

Isa DetectIsa() {
  if (IsaAvailable(Isa::kAvx2)) return Isa::kAvx2;
  if (IsaAvailable(Isa::kNeon)) return Isa::kNeon;
  return Isa::kScalar;
}

Isa ActiveIsa() { return Selected().load(std::memory_order_relaxed); }

bool SetActiveIsa(Isa isa) {
  if (!IsaAvailable(isa)) return false;
  Selected().store(isa, std::memory_order_relaxed);
  return true;
}

const KernelTable& Table(Isa isa) {
  switch (isa) {
#if defined(FAIREX_BUILD_AVX2)
    case Isa::kAvx2:
      return kAvx2Table;
#endif
#if defined(FAIREX_BUILD_NEON)
    case Isa::kNeon:
      return kNeonTable;
#endif
    default:
      return kScalarTable;
  }
}

double Dot(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  return Current().dot(a.data(), b.data(), a.size());
}

double Sum(std::span<const double> a) { return Current().sum(a.data(), a.size()); }

void Axpy(double alpha, std::span<const double> x, std::span<double> y) {
  assert(x.size() == y.size());
  Current().axpy(alpha, x.data(), y.data(), x.size());
}

void Multiply(std::span<const double> a, std::span<const double> b,
              std::span<double> out) {
  assert(a.size() == b.size() && a.size() == out.size());
  Current().multiply(a.data(), b.data(), out.data(), a.size());
}

}  // namespace fairex::kernels
