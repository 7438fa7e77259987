#include "scorelens/kernels/kernels.hpp"

#include <cstdlib>
#include <string>

#include "scorelens/error.hpp"

namespace scorelens::kernels {

namespace {

constexpr KernelTable kScalar{Isa::scalar, &scalar::dot, &scalar::axpy, &scalar::matvec};

#if defined(SCORELENS_HAVE_AVX2)
constexpr KernelTable kAvx2{Isa::avx2, &avx2::dot, &avx2::axpy, &avx2::matvec};
#endif

const KernelTable& select() {
  if (const char* forced = std::getenv("SCORELENS_ISA")) {
    const std::string name(forced);
    if (name == "scalar") return kScalar;
    if (name == "avx2" && isa_supported(Isa::avx2)) return table(Isa::avx2);
  }
  if (isa_supported(Isa::avx2)) return table(Isa::avx2);
  return kScalar;
}

}  // namespace

std::string_view to_string(Isa isa) {
  return isa == Isa::avx2 ? "avx2" : "scalar";
}

bool isa_supported(Isa isa) {
  switch (isa) {
    case Isa::scalar: return true;
    case Isa::avx2:
#if defined(SCORELENS_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
  }
  return false;
}

const KernelTable& table(Isa isa) {
  if (!isa_supported(isa)) throw InvalidArgument("kernel ISA not supported: " + std::string(to_string(isa)));
#if defined(SCORELENS_HAVE_AVX2)
  if (isa == Isa::avx2) return kAvx2;
#endif
  return kScalar;
}

const KernelTable& active() {
  static const KernelTable& chosen = select();
  return chosen;
}

}  // namespace scorelens::kernels
