// Compiled with -mavx2 -mfma; only reached after a CPUID check.

#include <immintrin.h>

#include "gibbslab/simd/kernels.hpp"

namespace gibbslab::simd {
namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

void field_density_avx2(const double* modes, std::size_t n_modes, std::size_t n_points,
                        const double* alpha_re, const double* alpha_im, double* rho) {
  std::size_t x = 0;
  for (; x + 4 <= n_points; x += 4) {
    __m256d re = _mm256_setzero_pd();
    __m256d im = _mm256_setzero_pd();
    for (std::size_t j = 0; j < n_modes; ++j) {
      const __m256d u = _mm256_loadu_pd(modes + j * n_points + x);
      re = _mm256_fmadd_pd(_mm256_set1_pd(alpha_re[j]), u, re);
      im = _mm256_fmadd_pd(_mm256_set1_pd(alpha_im[j]), u, im);
    }
    _mm256_storeu_pd(rho + x, _mm256_fmadd_pd(re, re, _mm256_mul_pd(im, im)));
  }
  for (; x < n_points; ++x) {
    double re = 0.0;
    double im = 0.0;
    for (std::size_t j = 0; j < n_modes; ++j) {
      const double u = modes[j * n_points + x];
      re += alpha_re[j] * u;
      im += alpha_im[j] * u;
    }
    rho[x] = re * re + im * im;
  }
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
  }
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

void her_rank1_avx2(double weight, const double* c_re, const double* c_im, std::size_t n,
                    double* g_re, double* g_im) {
  for (std::size_t i = 0; i < n; ++i) {
    const double ar = weight * c_re[i];
    const double ai = weight * c_im[i];
    const __m256d var = _mm256_set1_pd(ar);
    const __m256d vai = _mm256_set1_pd(ai);
    double* row_re = g_re + i * n;
    double* row_im = g_im + i * n;
    const std::size_t len = i + 1;
    std::size_t j = 0;
    for (; j + 4 <= len; j += 4) {
      const __m256d cr = _mm256_loadu_pd(c_re + j);
      const __m256d ci = _mm256_loadu_pd(c_im + j);
      __m256d gr = _mm256_loadu_pd(row_re + j);
      __m256d gi = _mm256_loadu_pd(row_im + j);
      gr = _mm256_fmadd_pd(var, cr, gr);
      gr = _mm256_fmadd_pd(vai, ci, gr);
      gi = _mm256_fmadd_pd(vai, cr, gi);
      gi = _mm256_fnmadd_pd(var, ci, gi);
      _mm256_storeu_pd(row_re + j, gr);
      _mm256_storeu_pd(row_im + j, gi);
    }
    for (; j < len; ++j) {
      row_re[j] += ar * c_re[j] + ai * c_im[j];
      row_im[j] += ai * c_re[j] - ar * c_im[j];
    }
  }
}

double herm_form_avx2(const double* g_re, const double* g_im, const double* c_re,
                      const double* c_im, std::size_t n) {
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double* row_re = g_re + i * n;
    const double* row_im = g_im + i * n;
    __m256d yr = _mm256_setzero_pd();
    __m256d yi = _mm256_setzero_pd();
    std::size_t j = 0;
    for (; j + 4 <= n; j += 4) {
      const __m256d gr = _mm256_loadu_pd(row_re + j);
      const __m256d gi = _mm256_loadu_pd(row_im + j);
      const __m256d cr = _mm256_loadu_pd(c_re + j);
      const __m256d ci = _mm256_loadu_pd(c_im + j);
      yr = _mm256_fmadd_pd(gr, cr, yr);
      yr = _mm256_fnmadd_pd(gi, ci, yr);
      yi = _mm256_fmadd_pd(gr, ci, yi);
      yi = _mm256_fmadd_pd(gi, cr, yi);
    }
    double sr = hsum(yr);
    double si = hsum(yi);
    for (; j < n; ++j) {
      sr += row_re[j] * c_re[j] - row_im[j] * c_im[j];
      si += row_re[j] * c_im[j] + row_im[j] * c_re[j];
    }
    total += c_re[i] * sr + c_im[i] * si;
  }
  return total;
}

constexpr KernelTable kAvx2{field_density_avx2, dot_avx2, her_rank1_avx2, herm_form_avx2};

}  // namespace

namespace detail {
const KernelTable* avx2_table() { return &kAvx2; }
}  // namespace detail

}  // namespace gibbslab::simd
