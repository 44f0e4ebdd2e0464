#include <cstdlib>

#include "ttade/simd.hpp"

namespace ttade::simd {

namespace {

Isa detect() {
  const char* force = std::getenv("TTADE_FORCE_SCALAR");
  if (force && *force && *force != '0') return Isa::Scalar;
#if defined(__x86_64__) || defined(__i386__)
  __builtin_cpu_init();
  if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) return Isa::Avx2;
#endif
  return Isa::Scalar;
}

}  // namespace

Isa active_isa() {
  static const Isa isa = detect();
  return isa;
}

const char* isa_name(Isa isa) { return isa == Isa::Avx2 ? "avx2" : "scalar"; }

void tree_det(const TreeShape& s, const double* const* t, std::size_t count, double* out) {
  if (active_isa() == Isa::Avx2)
    tree_det_avx2(s, t, count, out);
  else
    tree_det_scalar(s, t, count, out);
}

void herm_min_pivot(int n, const double* re, const double* im, std::size_t count, double* min_pivot) {
  if (active_isa() == Isa::Avx2)
    herm_min_pivot_avx2(n, re, im, count, min_pivot);
  else
    herm_min_pivot_scalar(n, re, im, count, min_pivot);
}

}  // namespace ttade::simd
