#pragma once

// Data-parallel inner loops shared by the classical and quantum sides.
//
// Every kernel has a scalar reference implementation and, on x86-64, an
// AVX2+FMA variant. The variant is picked once at startup from CPUID and can
// be overridden (tests pin both levels and compare results).
//
// Complex data is passed in planar form: separate real and imaginary arrays.

#include <cstddef>
#include <span>
#include <string_view>

namespace gibbslab::simd {

enum class Level { Scalar, Avx2 };

struct KernelTable {
  // rho[x] = |sum_j alpha_j modes[j][x]|^2 for real, mode-major modes
  // (n_modes rows of n_points each).
  void (*field_density)(const double* modes, std::size_t n_modes, std::size_t n_points,
                        const double* alpha_re, const double* alpha_im, double* rho);

  double (*dot)(const double* a, const double* b, std::size_t n);

  // Lower triangle (j <= i) of the row-major n x n matrix g += weight * c c^*.
  void (*her_rank1)(double weight, const double* c_re, const double* c_im, std::size_t n,
                    double* g_re, double* g_im);

  // Re(c^* g c) for a full row-major Hermitian n x n matrix g.
  double (*herm_form)(const double* g_re, const double* g_im, const double* c_re,
                      const double* c_im, std::size_t n);
};

const KernelTable& scalar_kernels();

// nullptr when the AVX2 translation unit was not built or the CPU lacks AVX2/FMA.
const KernelTable* avx2_kernels();

Level detected_level();
Level active_level();

// Throws std::invalid_argument when the requested level is unavailable.
void set_level(Level level);

const KernelTable& kernels();
std::string_view level_name(Level level);

// RAII override, used by the equivalence tests.
class ScopedLevel {
 public:
  explicit ScopedLevel(Level level) : previous_(active_level()) { set_level(level); }
  ~ScopedLevel() { set_level(previous_); }
  ScopedLevel(const ScopedLevel&) = delete;
  ScopedLevel& operator=(const ScopedLevel&) = delete;

 private:
  Level previous_;
};

inline void field_density(std::span<const double> modes, std::size_t n_modes,
                          std::span<const double> alpha_re, std::span<const double> alpha_im,
                          std::span<double> rho) {
  kernels().field_density(modes.data(), n_modes, rho.size(), alpha_re.data(), alpha_im.data(),
                          rho.data());
}

inline double dot(std::span<const double> a, std::span<const double> b) {
  return kernels().dot(a.data(), b.data(), a.size());
}

inline void her_rank1(double weight, std::span<const double> c_re, std::span<const double> c_im,
                      std::span<double> g_re, std::span<double> g_im) {
  kernels().her_rank1(weight, c_re.data(), c_im.data(), c_re.size(), g_re.data(), g_im.data());
}

inline double herm_form(std::span<const double> g_re, std::span<const double> g_im,
                        std::span<const double> c_re, std::span<const double> c_im) {
  return kernels().herm_form(g_re.data(), g_im.data(), c_re.data(), c_im.data(), c_re.size());
}

}  // namespace gibbslab::simd
