#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include <doctest.h>

#include "gibbslab/classical/ensemble.hpp"
#include "gibbslab/simd/kernels.hpp"
#include "gibbslab/spectral/basis.hpp"

using namespace gibbslab;

namespace {

std::vector<double> random_vector(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> normal;
  std::vector<double> v(n);
  for (auto& x : v) x = normal(rng);
  return v;
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

TEST_CASE("scalar kernels are always available and selectable") {
  simd::ScopedLevel scoped(simd::Level::Scalar);
  CHECK(simd::active_level() == simd::Level::Scalar);
  CHECK(simd::level_name(simd::Level::Scalar) != simd::level_name(simd::Level::Avx2));
}

TEST_CASE("requesting an unavailable level throws") {
  if (simd::avx2_kernels() == nullptr) {
    CHECK_THROWS_AS(simd::set_level(simd::Level::Avx2), std::invalid_argument);
  } else {
    CHECK(simd::detected_level() == simd::Level::Avx2);
  }
}

TEST_CASE("AVX2 kernels match the scalar reference") {
  const simd::KernelTable* fast = simd::avx2_kernels();
  if (fast == nullptr) {
    MESSAGE("AVX2 not available; equivalence test skipped");
    return;
  }
  const simd::KernelTable& ref = simd::scalar_kernels();
  std::mt19937_64 rng(7);

  for (std::size_t n : {1u, 3u, 4u, 5u, 7u, 8u, 13u, 64u, 101u, 1024u}) {
    CAPTURE(n);
    const auto a = random_vector(rng, n);
    const auto b = random_vector(rng, n);
    const double d_ref = ref.dot(a.data(), b.data(), n);
    const double d_fast = fast->dot(a.data(), b.data(), n);
    CHECK(std::abs(d_ref - d_fast) <= 1e-12 * (1.0 + std::abs(d_ref)) * std::sqrt(static_cast<double>(n)));

    for (std::size_t modes : {1u, 2u, 5u}) {
      const auto m = random_vector(rng, modes * n);
      const auto re = random_vector(rng, modes);
      const auto im = random_vector(rng, modes);
      std::vector<double> rho_ref(n), rho_fast(n);
      ref.field_density(m.data(), modes, n, re.data(), im.data(), rho_ref.data());
      fast->field_density(m.data(), modes, n, re.data(), im.data(), rho_fast.data());
      for (std::size_t x = 0; x < n; ++x) CHECK(rho_fast[x] == doctest::Approx(rho_ref[x]).epsilon(1e-12));
    }

    if (n <= 101) {
      const auto c_re = random_vector(rng, n);
      const auto c_im = random_vector(rng, n);
      std::vector<double> g_re(n * n, 0.0), g_im(n * n, 0.0), h_re(n * n, 0.0), h_im(n * n, 0.0);
      ref.her_rank1(0.37, c_re.data(), c_im.data(), n, g_re.data(), g_im.data());
      fast->her_rank1(0.37, c_re.data(), c_im.data(), n, h_re.data(), h_im.data());
      std::vector<double> diff(n * n);
      for (std::size_t i = 0; i < n * n; ++i) diff[i] = std::abs(g_re[i] - h_re[i]) + std::abs(g_im[i] - h_im[i]);
      CHECK(max_abs(diff) <= 1e-13 * (1.0 + max_abs(g_re)));

      // Full Hermitian matrix for the quadratic form.
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
          g_re[i * n + j] = g_re[j * n + i];
          g_im[i * n + j] = -g_im[j * n + i];
        }
      const auto v_re = random_vector(rng, n);
      const auto v_im = random_vector(rng, n);
      const double q_ref = ref.herm_form(g_re.data(), g_im.data(), v_re.data(), v_im.data(), n);
      const double q_fast = fast->herm_form(g_re.data(), g_im.data(), v_re.data(), v_im.data(), n);
      CHECK(q_fast == doctest::Approx(q_ref).epsilon(1e-11));

      // Rank one: c^* (c c^*) c = |c|^4.
      std::vector<double> r_re(n * n, 0.0), r_im(n * n, 0.0);
      ref.her_rank1(1.0, c_re.data(), c_im.data(), n, r_re.data(), r_im.data());
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
          r_re[i * n + j] = r_re[j * n + i];
          r_im[i * n + j] = -r_im[j * n + i];
        }
      double norm2 = 0.0;
      for (std::size_t i = 0; i < n; ++i) norm2 += c_re[i] * c_re[i] + c_im[i] * c_im[i];
      CHECK(fast->herm_form(r_re.data(), r_im.data(), c_re.data(), c_im.data(), n) ==
            doctest::Approx(norm2 * norm2).epsilon(1e-11));
    }
  }
}

TEST_CASE("nonlinear energy agrees across kernel levels") {
  if (simd::avx2_kernels() == nullptr) return;
  spectral::OneBodySpec spec;
  spec.grid_points = 257;
  const auto basis = spectral::eigendecompose(spectral::build_operator(spec), 4);
  const auto kernel = spectral::InteractionKernel::delta(1.3);
  std::vector<std::complex<double>> alpha{{0.3, -0.2}, {0.1, 0.4}, {-0.5, 0.05}, {0.2, 0.2}};
  double values[2];
  int i = 0;
  for (auto level : {simd::Level::Scalar, simd::Level::Avx2}) {
    simd::ScopedLevel scoped(level);
    classical::NonlinearEnergy energy(basis, kernel);
    values[i++] = energy(alpha);
  }
  CHECK(values[1] == doctest::Approx(values[0]).epsilon(1e-12));
}
