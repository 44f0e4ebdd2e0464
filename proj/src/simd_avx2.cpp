#include <immintrin.h>

#include <limits>
#include <vector>

#include "ttade/simd.hpp"

#pragma GCC diagnostic ignored "-Wignored-attributes"

namespace ttade::simd {

void tree_det_avx2(const TreeShape& s, const double* const* t, std::size_t count, double* out) {
  std::vector<__m256d> N(s.n), D(s.n);
  const __m256d two = _mm256_set1_pd(2.0);
  const int root = s.post_order.back();
  std::size_t p = 0;
  for (; p + 4 <= count; p += 4) {
    for (int v : s.post_order) {
      __m256d P = _mm256_set1_pd(1.0), Q = _mm256_setzero_pd();
      for (auto [c, e] : s.kids[v]) {
        const __m256d te = _mm256_loadu_pd(t[e] + p);
        Q = _mm256_fmadd_pd(Q, N[c], _mm256_mul_pd(_mm256_mul_pd(P, te), D[c]));
        P = _mm256_mul_pd(P, N[c]);
      }
      N[v] = _mm256_fmsub_pd(two, P, Q);
      D[v] = P;
    }
    _mm256_storeu_pd(out + p, N[root]);
  }
  if (p < count) {
    std::vector<const double*> tail(s.edges());
    for (int e = 0; e < s.edges(); ++e) tail[e] = t[e] + p;
    tree_det_scalar(s, tail.data(), count - p, out + p);
  }
}

void herm_min_pivot_avx2(int n, const double* re, const double* im, std::size_t count, double* min_pivot) {
  std::vector<__m256d> lr(n * n), li(n * n), d(n);
  const __m256d one = _mm256_set1_pd(1.0), tiny = _mm256_set1_pd(1e-300);
  std::size_t p = 0;
  for (; p + 4 <= count; p += 4) {
    __m256d mn = _mm256_set1_pd(std::numeric_limits<double>::infinity());
    for (int k = 0; k < n; ++k) {
      __m256d dk = _mm256_loadu_pd(re + (k * n + k) * count + p);
      for (int j = 0; j < k; ++j) {
        const __m256d m2 = _mm256_fmadd_pd(lr[k * n + j], lr[k * n + j], _mm256_mul_pd(li[k * n + j], li[k * n + j]));
        dk = _mm256_fnmadd_pd(m2, d[j], dk);
      }
      mn = _mm256_min_pd(dk, mn);
      d[k] = dk;
      const __m256d inv = _mm256_blendv_pd(one, _mm256_div_pd(one, dk), _mm256_cmp_pd(dk, tiny, _CMP_GT_OQ));
      for (int i = k + 1; i < n; ++i) {
        __m256d ar = _mm256_loadu_pd(re + (i * n + k) * count + p);
        __m256d ai = _mm256_loadu_pd(im + (i * n + k) * count + p);
        for (int j = 0; j < k; ++j) {
          const __m256d xr = lr[i * n + j], xi = li[i * n + j];
          const __m256d yr = lr[k * n + j], yi = li[k * n + j];  // conj taken below
          const __m256d pr = _mm256_fmadd_pd(xr, yr, _mm256_mul_pd(xi, yi));
          const __m256d pi = _mm256_fmsub_pd(xi, yr, _mm256_mul_pd(xr, yi));
          ar = _mm256_fnmadd_pd(pr, d[j], ar);
          ai = _mm256_fnmadd_pd(pi, d[j], ai);
        }
        lr[i * n + k] = _mm256_mul_pd(ar, inv);
        li[i * n + k] = _mm256_mul_pd(ai, inv);
      }
    }
    _mm256_storeu_pd(min_pivot + p, mn);
  }
  if (p < count) {
    // the tail is re-laid out so the scalar kernel sees a dense batch
    const std::size_t rest = count - p;
    std::vector<double> r2(n * n * rest), i2(n * n * rest);
    for (int e = 0; e < n * n; ++e)
      for (std::size_t q = 0; q < rest; ++q) {
        r2[e * rest + q] = re[e * count + p + q];
        i2[e * rest + q] = im[e * count + p + q];
      }
    herm_min_pivot_scalar(n, r2.data(), i2.data(), rest, min_pivot + p);
  }
}

}  // namespace ttade::simd
