#pragma once

// Dense double-precision kernels used by the reference scorer's inner loops.
// Each kernel has a scalar reference implementation and, on x86-64 builds, an
// AVX2/FMA variant. The variant is chosen once per process (first use) from
// CPUID, or forced with SCORELENS_ISA=scalar|avx2.

#include <cstddef>
#include <span>
#include <string_view>

namespace scorelens::kernels {

enum class Isa { scalar, avx2 };

std::string_view to_string(Isa isa);

struct KernelTable {
  Isa isa;
  // sum_i a[i] * b[i]
  double (*dot)(const double* a, const double* b, std::size_t n);
  // y[i] += alpha * x[i]
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // y[r] = sum_c w[r * cols + c] * x[c]   (w row-major, rows x cols)
  void (*matvec)(const double* w, std::size_t rows, std::size_t cols, const double* x, double* y);
};

bool isa_supported(Isa isa);

/// Kernel table for a specific ISA. Throws InvalidArgument if unsupported.
const KernelTable& table(Isa isa);

/// The table selected for this process.
const KernelTable& active();

namespace scalar {
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void matvec(const double* w, std::size_t rows, std::size_t cols, const double* x, double* y);
}  // namespace scalar

#if defined(SCORELENS_HAVE_AVX2)
namespace avx2 {
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void matvec(const double* w, std::size_t rows, std::size_t cols, const double* x, double* y);
}  // namespace avx2
#endif

inline double dot(std::span<const double> a, std::span<const double> b) {
  return active().dot(a.data(), b.data(), a.size());
}

inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  active().axpy(alpha, x.data(), y.data(), x.size());
}

inline void matvec(std::span<const double> w, std::size_t rows, std::size_t cols, std::span<const double> x,
                   std::span<double> y) {
  active().matvec(w.data(), rows, cols, x.data(), y.data());
}

}  // namespace scorelens::kernels
