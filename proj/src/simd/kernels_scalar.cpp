#include "gibbslab/simd/kernels.hpp"

namespace gibbslab::simd {
namespace {

void field_density_scalar(const double* modes, std::size_t n_modes, std::size_t n_points,
                          const double* alpha_re, const double* alpha_im, double* rho) {
  for (std::size_t x = 0; x < n_points; ++x) {
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

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

void her_rank1_scalar(double weight, const double* c_re, const double* c_im, std::size_t n,
                      double* g_re, double* g_im) {
  for (std::size_t i = 0; i < n; ++i) {
    const double ar = weight * c_re[i];
    const double ai = weight * c_im[i];
    double* row_re = g_re + i * n;
    double* row_im = g_im + i * n;
    for (std::size_t j = 0; j <= i; ++j) {
      row_re[j] += ar * c_re[j] + ai * c_im[j];
      row_im[j] += ai * c_re[j] - ar * c_im[j];
    }
  }
}

double herm_form_scalar(const double* g_re, const double* g_im, const double* c_re,
                        const double* c_im, std::size_t n) {
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double* row_re = g_re + i * n;
    const double* row_im = g_im + i * n;
    double yr = 0.0;
    double yi = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      yr += row_re[j] * c_re[j] - row_im[j] * c_im[j];
      yi += row_re[j] * c_im[j] + row_im[j] * c_re[j];
    }
    total += c_re[i] * yr + c_im[i] * yi;
  }
  return total;
}

constexpr KernelTable kScalar{field_density_scalar, dot_scalar, her_rank1_scalar,
                              herm_form_scalar};

}  // namespace

const KernelTable& scalar_kernels() { return kScalar; }

}  // namespace gibbslab::simd
