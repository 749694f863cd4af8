#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include <doctest.h>

#include "gibbslab/error.hpp"
#include "gibbslab/fock/space.hpp"
#include "gibbslab/fock/state.hpp"
#include "gibbslab/spectral/interaction.hpp"
#include "helpers.hpp"
#include "oracles/oracles.hpp"

using namespace gibbslab;
using namespace gibbslab::fock;

namespace {

spectral::TwoBodyTensor random_tensor(std::mt19937_64& rng, std::size_t k) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  spectral::TwoBodyTensor w(k);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j)
      for (std::size_t a = 0; a < k; ++a)
        for (std::size_t b = 0; b < k; ++b) w(i, j, a, b) = u(rng);
  // Impose W[i,j,k,l] = W[j,i,l,k] = W[k,l,i,j].
  spectral::TwoBodyTensor s(k);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j)
      for (std::size_t a = 0; a < k; ++a)
        for (std::size_t b = 0; b < k; ++b)
          s(i, j, a, b) = 0.25 * (w(i, j, a, b) + w(j, i, b, a) + w(a, b, i, j) + w(b, a, j, i));
  return s;
}

// 1/2 sum W[i,j,k,l] a_i^+ a_j^+ a_l a_k from explicit sparse products on a
// basis one particle larger, restricted to the target basis.
Eigen::MatrixXd brute_force_interaction(std::size_t modes, std::size_t n_max, const spectral::TwoBodyTensor& w) {
  const FockBasis big(modes, n_max + 2);
  std::vector<LadderPair> ops;
  for (std::size_t j = 0; j < modes; ++j) ops.push_back(ladder(big, j));
  SparseMatrix total(static_cast<Eigen::Index>(big.dim()), static_cast<Eigen::Index>(big.dim()));
  for (std::size_t i = 0; i < modes; ++i)
    for (std::size_t j = 0; j < modes; ++j)
      for (std::size_t k = 0; k < modes; ++k)
        for (std::size_t l = 0; l < modes; ++l) {
          if (w(i, j, k, l) == 0.0) continue;
          SparseMatrix term = ops[i].raise * ops[j].raise * ops[l].lower * ops[k].lower;
          total += 0.5 * w(i, j, k, l) * term;
        }
  const FockBasis small(modes, n_max);
  Eigen::MatrixXd out(small.dim(), small.dim());
  const Eigen::MatrixXd dense(total);
  for (std::size_t r = 0; r < small.dim(); ++r)
    for (std::size_t c = 0; c < small.dim(); ++c)
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          dense(big.find(small.state(r)), big.find(small.state(c)));
  return out;
}

}  // namespace

TEST_CASE("Fock basis dimensions and ordering") {
  CHECK(FockBasis(1, 10).dim() == 11);
  CHECK(FockBasis(3, 10).dim() == 286);
  const FockBasis vac(2, 0);
  CHECK(vac.dim() == 1);
  CHECK(vac.state(0) == MultiIndex{0, 0});

  const FockBasis b(3, 4);
  CHECK(b.dim() == binomial(7, 3));
  std::size_t expected_offset = 0;
  for (std::size_t n = 0; n <= 4; ++n) {
    CHECK(b.sector_offset(n) == expected_offset);
    CHECK(b.sector_size(n) == binomial(n + 2, 2));
    for (const auto& m : b.sector_states(n)) {
      CHECK(total(m) == static_cast<int>(n));
      for (int x : m) CHECK(x >= 0);
    }
    expected_offset += b.sector_size(n);
  }
  for (std::size_t i = 0; i < b.dim(); ++i) CHECK(b.find(b.state(i)) == static_cast<std::ptrdiff_t>(i));
  CHECK(b.find({5, 0, 0}) == -1);
  CHECK(b.find_in_sector({0, 0, 2}) == static_cast<std::ptrdiff_t>(b.sector_size(2)) - 1);
  // colex: last entry most significant
  CHECK(b.sector_states(1)[0] == MultiIndex{1, 0, 0});
  CHECK(b.sector_states(1)[2] == MultiIndex{0, 0, 1});

  CHECK_THROWS_AS(FockBasis(10, 10, 20000), BudgetError);
  CHECK_NOTHROW(FockBasis(2, 197, 20000));
}

TEST_CASE("ladder operators") {
  const FockBasis b(1, 10);
  const auto a = ladder(b, 0);
  const Eigen::MatrixXd number = Eigen::MatrixXd(a.raise * a.lower);
  for (Eigen::Index n = 0; n <= 10; ++n) CHECK(number(n, n) == doctest::Approx(static_cast<double>(n)));
  CHECK((number - Eigen::MatrixXd(number.diagonal().asDiagonal())).norm() == 0.0);
  Eigen::VectorXd vacuum = Eigen::VectorXd::Zero(11);
  vacuum(0) = 1.0;
  CHECK((a.lower * vacuum).norm() == 0.0);
  const Eigen::MatrixXd comm = Eigen::MatrixXd(a.lower * a.raise - a.raise * a.lower);
  for (Eigen::Index i = 0; i < 10; ++i)
    for (Eigen::Index j = 0; j < 10; ++j) CHECK(comm(i, j) == doctest::Approx(i == j ? 1.0 : 0.0).scale(1.0));
  CHECK((Eigen::MatrixXd(a.raise) - Eigen::MatrixXd(a.lower).transpose()).norm() == 0.0);

  const FockBasis two(2, 5);
  const auto a0 = ladder(two, 0);
  const auto a1 = ladder(two, 1);
  const Eigen::MatrixXd cross = Eigen::MatrixXd(a0.lower * a1.raise - a1.raise * a0.lower);
  for (std::size_t i = 0; i < two.dim(); ++i) {
    if (total(two.state(i)) >= 5) continue;
    for (std::size_t j = 0; j < two.dim(); ++j) {
      if (total(two.state(j)) >= 5) continue;
      CHECK(cross(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) == doctest::Approx(0.0).scale(1.0));
    }
  }
}

TEST_CASE("annihilation amplitude") {
  CHECK(annihilation_amplitude({3, 2}, {1, 1}) == doctest::Approx(std::sqrt(3.0 * 2.0)));
  CHECK(annihilation_amplitude({3, 2}, {2, 0}) == doctest::Approx(std::sqrt(3.0)));
  CHECK(annihilation_amplitude({1, 2}, {2, 0}) == 0.0);
}

TEST_CASE("Hamiltonian structure") {
  const auto basis = testutil::dirichlet_basis(1, 512);
  const auto tensor = spectral::interaction_elements(basis, spectral::InteractionKernel::delta(1.0));
  const auto fb = build_fock_basis(1, 8);
  const double lambda = 0.3;
  const auto h = build_hamiltonian(fb, basis.eigenvalues, tensor, lambda);
  for (std::size_t n = 0; n <= 8; ++n) {
    const double nn = static_cast<double>(n);
    CHECK(h.blocks[n](0, 0) ==
          doctest::Approx(basis.eigenvalues[0] * nn + lambda * tensor(0, 0, 0, 0) * nn * (nn - 1.0) / 2.0));
  }

  SUBCASE("free Hamiltonian is diagonal") {
    const auto basis3 = testutil::dirichlet_basis(3, 256);
    const auto t3 = spectral::interaction_elements(basis3, spectral::InteractionKernel::delta(1.0));
    const auto fb3 = build_fock_basis(3, 4);
    const auto h0 = build_hamiltonian(fb3, basis3.eigenvalues, t3, 0.0).dense();
    for (std::size_t i = 0; i < fb3->dim(); ++i) {
      double e = 0.0;
      for (std::size_t j = 0; j < 3; ++j) e += basis3.eigenvalues[j] * fb3->state(i)[j];
      const auto ii = static_cast<Eigen::Index>(i);
      CHECK(h0(ii, ii) == doctest::Approx(e));
    }
    CHECK((h0 - Eigen::MatrixXd(h0.diagonal().asDiagonal())).norm() == 0.0);
    const auto number = number_operator(fb3).dense();
    CHECK((number - Eigen::MatrixXd(number.diagonal().asDiagonal())).norm() == 0.0);
  }

  SUBCASE("interaction matches explicit ladder products and vanishes below two particles") {
    std::mt19937_64 rng(5);
    for (std::size_t k : {2u, 3u}) {
      const auto w = random_tensor(rng, k);
      const std::vector<double> zeros(k, 0.0);
      const auto fbk = build_fock_basis(k, 4);
      const auto interaction = build_hamiltonian(fbk, zeros, w, 1.0);
      const Eigen::MatrixXd dense = interaction.dense();
      CHECK((dense - brute_force_interaction(k, 4, w)).cwiseAbs().maxCoeff() <= 1e-12);
      CHECK(interaction.hermiticity_error() <= 1e-12);
      CHECK(interaction.blocks[0].norm() == 0.0);
      CHECK(interaction.blocks[1].norm() == 0.0);
    }
  }

  CHECK_THROWS_AS(build_hamiltonian(fb, basis.eigenvalues, tensor, -1.0), std::invalid_argument);
  const std::vector<double> wrong{1.0, 2.0};
  CHECK_THROWS_AS(build_hamiltonian(fb, wrong, tensor, 1.0), std::invalid_argument);
}

TEST_CASE("Gibbs state") {
  SUBCASE("single mode geometric sum") {
    const auto fb = build_fock_basis(1, 10);
    spectral::TwoBodyTensor w(1);
    const std::vector<double> lambda{1.0};
    const auto g = gibbs_state(build_hamiltonian(fb, lambda, w, 0.0), 1.0);
    const double exact = std::log((1.0 - std::exp(-11.0)) / (1.0 - std::exp(-1.0)));
    CHECK(std::abs(g.log_z - exact) <= 1e-12);
    CHECK(std::abs(g.log_z - oracle::geometric_log_z(1.0, 1.0, 10)) <= 1e-12);
    CHECK(g.state.validate().ok());
  }
  SUBCASE("low temperature limit is the vacuum") {
    const auto basis = testutil::dirichlet_basis(2, 256);
    const auto tensor = spectral::interaction_elements(basis, spectral::InteractionKernel::delta(1.0));
    const auto fb = build_fock_basis(2, 6);
    const auto g = gibbs_state(build_hamiltonian(fb, basis.eigenvalues, tensor, 1.0), 0.05);
    CHECK(g.state.sector_mass(0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(particle_number(g.state) <= 1e-12);
  }
  SUBCASE("invariants and variational principle") {
    const auto basis = testutil::dirichlet_basis(2, 256);
    const auto tensor = spectral::interaction_elements(basis, spectral::InteractionKernel::delta(1.0));
    const auto fb = build_fock_basis(2, 6);
    const auto h = build_hamiltonian(fb, basis.eigenvalues, tensor, 0.5);
    const double t = 4.0;
    const auto g = gibbs_state(h, t);
    CHECK_FALSE(g.state.is_dense());
    const auto v = g.state.validate();
    CHECK(v.ok());
    CHECK(v.hermiticity <= 1e-12);
    CHECK(v.trace_error <= 1e-10);
    CHECK(v.min_eigenvalue >= -1e-12);
    const double f_gibbs = free_energy(g.state, h, t);
    CHECK(f_gibbs == doctest::Approx(-t * g.log_z).epsilon(1e-10));

    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> mix(0.01, 0.5);
    for (int trial = 0; trial < 20; ++trial) {
      const auto other = testutil::random_state(rng, fb, trial % 4 == 0);
      const double s = mix(rng);
      const Eigen::MatrixXcd blended = (1.0 - s) * g.state.dense() + s * other.dense();
      const auto perturbed = FockState::from_dense(fb, blended);
      CHECK(free_energy(perturbed, h, t) >= f_gibbs - 1e-9);
    }
    CHECK_THROWS_AS(gibbs_state(h, 0.0), std::invalid_argument);
  }
}

TEST_CASE("reduced density matrices: examples") {
  const auto fb = build_fock_basis(1, 4);
  const auto two = FockState::occupation(fb, {2});
  const auto g1 = reduced_density_matrix(two, 1);
  CHECK(g1.rows() == 1);
  CHECK(g1(0, 0).real() == doctest::Approx(2.0));
  CHECK(reduced_density_matrix(two, 2)(0, 0).real() == doctest::Approx(1.0));
  CHECK(reduced_density_matrix(two, 3)(0, 0).real() == doctest::Approx(0.0).scale(1.0));
  CHECK(particle_number(two) == doctest::Approx(2.0));
  CHECK_THROWS_AS(reduced_density_matrix(two, 5), std::invalid_argument);
  CHECK_THROWS_AS(reduced_density_matrix(two, 0), std::invalid_argument);

  const auto vac = FockState::vacuum(build_fock_basis(3, 5));
  for (std::size_t k = 1; k <= 3; ++k) {
    CHECK(reduced_density_matrix(vac, k).cwiseAbs().maxCoeff() == 0.0);
    CHECK(reduced_dm_normal_ordered(vac, k).cwiseAbs().maxCoeff() == 0.0);
  }
  CHECK(particle_number(vac) == 0.0);
}

TEST_CASE("partial trace equals normal ordering on random states") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t k_modes = 1 + static_cast<std::size_t>(trial % 3);
    const std::size_t n_max = 3 + static_cast<std::size_t>(trial % 6);
    const auto fb = build_fock_basis(k_modes, n_max);
    const auto state = testutil::random_state(rng, fb, trial % 2 == 0);
    CAPTURE(k_modes);
    CAPTURE(n_max);
    for (std::size_t k = 1; k <= std::min<std::size_t>(3, n_max); ++k) {
      const auto pt = reduced_density_matrix(state, k);
      const auto no = reduced_dm_normal_ordered(state, k);
      CHECK((pt - no).cwiseAbs().maxCoeff() <= 1e-10);
      CHECK((pt - pt.adjoint()).cwiseAbs().maxCoeff() <= 1e-12);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(pt);
      CHECK(eig.eigenvalues().minCoeff() >= -1e-10);
    }
    CHECK(std::abs(reduced_density_matrix(state, 1).trace().real() - particle_number(state)) <= 1e-10);
  }
}

TEST_CASE("free Gibbs closed forms") {
  const auto basis = testutil::dirichlet_basis(2, 512);
  const auto tensor = spectral::interaction_elements(basis, spectral::InteractionKernel::delta(1.0));
  const double t = 5.0;
  const auto cut = choose_cutoff(basis.eigenvalues, t, 1e-12);
  const auto fb = build_fock_basis(2, cut.n_max);
  const auto g = gibbs_state(build_hamiltonian(fb, basis.eigenvalues, tensor, 0.0), t);
  CHECK(g.state.top_sector_mass() < 1e-10);
  const auto g1 = reduced_density_matrix(g.state, 1);
  double expected_n = 0.0;
  for (std::size_t j = 0; j < 2; ++j) {
    const double bose = oracle::bose_occupation(basis.eigenvalues[j], t);
    expected_n += bose;
    CHECK(std::abs(g1(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j)).real() - bose) <= 1e-8);
  }
  CHECK(std::abs(g1(0, 1)) <= 1e-12);
  CHECK(std::abs(particle_number(g.state) - expected_n) <= 1e-8);
  // log Z factorizes into geometric sums up to the tail
  double log_z = 0.0;
  for (double l : basis.eigenvalues) log_z += -std::log1p(-std::exp(-l / t));
  CHECK(std::abs(g.log_z - log_z) <= 1e-9);
}

TEST_CASE("cutoff policy against direct sector sums") {
  const std::vector<double> lambda{3.4674011002723395, 10.869604401089358};
  for (double t : {5.0, 10.0, 20.0}) {
    const auto cut = choose_cutoff(lambda, t, 1e-8);
    auto tail = [&](std::size_t n_max) {
      double top = 0.0, z = 0.0;
      for (std::size_t a = 0; a <= n_max; ++a)
        for (std::size_t b = 0; a + b <= n_max; ++b) {
          const double p = std::exp(-(lambda[0] * a + lambda[1] * b) / t);
          z += p;
          if (a + b + 1 >= n_max) top += p;
        }
      return top / z;
    };
    CHECK(cut.tail_mass == doctest::Approx(tail(cut.n_max)).epsilon(1e-9));
    CHECK(cut.tail_mass < 1e-8);
    CHECK(tail(cut.n_max - 1) >= 1e-8);
    CHECK(cut.dim == binomial(cut.n_max + 2, 2));
  }
  CHECK_THROWS_AS(choose_cutoff(lambda, 1000.0, 1e-8, 20000), BudgetError);
  CHECK_THROWS_AS(choose_cutoff(lambda, -1.0, 1e-8), std::invalid_argument);
}

TEST_CASE("energy decomposition") {
  const auto basis = testutil::dirichlet_basis(3, 256);
  const auto tensor = spectral::interaction_elements(basis, spectral::InteractionKernel::delta(1.0));
  SUBCASE("two particles in one mode") {
    const auto basis1 = testutil::dirichlet_basis(1, 256);
    const auto t1 = spectral::interaction_elements(basis1, spectral::InteractionKernel::delta(1.0));
    const auto fb = build_fock_basis(1, 3);
    const double lam = 0.7;
    const auto h = build_hamiltonian(fb, basis1.eigenvalues, t1, lam);
    const auto e = energy_decomposition(FockState::occupation(fb, {2}), h, basis1.eigenvalues, t1, lam);
    CHECK(e.total == doctest::Approx(2.0 * basis1.eigenvalues[0] + lam * t1(0, 0, 0, 0)));
    CHECK(e.one_body + e.two_body == doctest::Approx(e.total).epsilon(1e-12));
  }
  SUBCASE("zero coupling") {
    const auto fb = build_fock_basis(3, 3);
    std::mt19937_64 rng(3);
    const auto state = testutil::random_state(rng, fb, false);
    const auto h = build_hamiltonian(fb, basis.eigenvalues, tensor, 0.0);
    const auto e = energy_decomposition(state, h, basis.eigenvalues, tensor, 0.0);
    CHECK(e.two_body == 0.0);
    CHECK(e.one_body == doctest::Approx(e.total).epsilon(1e-12));
  }
  SUBCASE("random mixed states") {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 20; ++trial) {
      const std::size_t k = 1 + static_cast<std::size_t>(trial % 3);
      const std::size_t n_max = 2 + static_cast<std::size_t>(trial % 7);
      const auto w = random_tensor(rng, k);
      std::vector<double> lambda(basis.eigenvalues.begin(), basis.eigenvalues.begin() + static_cast<long>(k));
      const auto fb = build_fock_basis(k, n_max);
      const auto h = build_hamiltonian(fb, lambda, w, 0.8);
      const auto state = testutil::random_state(rng, fb, trial % 3 == 0);
      const auto e = energy_decomposition(state, h, lambda, w, 0.8);
      CHECK(std::abs(e.one_body + e.two_body - e.total) <= 1e-9 * std::abs(e.total));
    }
  }
}

TEST_CASE("entropies") {
  const auto fb = build_fock_basis(1, 1);
  auto diag = [&](double p0) {
    std::vector<Eigen::MatrixXcd> blocks{Eigen::MatrixXcd::Constant(1, 1, p0), Eigen::MatrixXcd::Constant(1, 1, 1.0 - p0)};
    return FockState::from_blocks(fb, blocks);
  };
  const auto p = diag(0.9);
  const auto q = diag(0.5);
  CHECK(relative_entropy(p, p) == doctest::Approx(0.0).scale(1.0));
  const double kl_pq = 0.9 * std::log(0.9 / 0.5) + 0.1 * std::log(0.1 / 0.5);
  const double kl_qp = 0.5 * std::log(0.5 / 0.9) + 0.5 * std::log(0.5 / 0.1);
  CHECK(relative_entropy(p, q) == doctest::Approx(kl_pq).epsilon(1e-12));
  CHECK(relative_entropy(q, p) == doctest::Approx(kl_qp).epsilon(1e-12));
  CHECK(relative_entropy(p, q) != doctest::Approx(relative_entropy(q, p)));
  CHECK(von_neumann_entropy(q) == doctest::Approx(std::log(2.0)));
  CHECK(std::isinf(relative_entropy(q, diag(1.0))));
  CHECK(relative_entropy(diag(1.0), q) == doctest::Approx(std::log(2.0)));

  SUBCASE("commuting geometric states") {
    const auto fb10 = build_fock_basis(1, 10);
    spectral::TwoBodyTensor w(1);
    const std::vector<double> one{1.0};
    const auto a = gibbs_state(build_hamiltonian(fb10, one, w, 0.0), 2.0).state;
    const auto b = gibbs_state(build_hamiltonian(fb10, one, w, 0.0), 0.7).state;
    CHECK(relative_entropy(a, b) ==
          doctest::Approx(oracle::geometric_kl(std::exp(-1.0 / 2.0), std::exp(-1.0 / 0.7), 10)).epsilon(1e-10));
  }
  SUBCASE("nonnegativity on random pairs") {
    std::mt19937_64 rng(1234);
    const auto fb2 = build_fock_basis(2, 3);
    for (int trial = 0; trial < 100; ++trial) {
      const auto a = testutil::random_state(rng, fb2, trial % 2 == 0);
      const auto b = testutil::random_state(rng, fb2, false);
      CHECK(relative_entropy(a, b) >= -1e-10);
    }
    const auto dense = testutil::random_state(rng, fb2, true);
    CHECK_THROWS_AS(relative_entropy(dense, dense), std::invalid_argument);
  }
}

TEST_CASE("relative free energy") {
  const auto basis = testutil::dirichlet_basis(2, 256);
  const auto tensor = spectral::interaction_elements(basis, spectral::InteractionKernel::delta(1.0));
  const double t = 6.0;
  const double lam = 1.0 / t;
  const auto fb = build_fock_basis(2, 30);
  const auto free_g = gibbs_state(build_hamiltonian(fb, basis.eigenvalues, tensor, 0.0), t);
  const auto g = gibbs_state(build_hamiltonian(fb, basis.eigenvalues, tensor, lam), t);
  CHECK(relative_free_energy(free_g.state, free_g.state, tensor, 0.0, t) == doctest::Approx(0.0).scale(1.0));
  const double value = relative_free_energy(g.state, free_g.state, tensor, lam, t);
  const double identity = t * (free_g.log_z - g.log_z);
  CHECK(std::abs(value - identity) <= 1e-8 * std::abs(identity));

  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 5; ++trial) {
    const auto other = testutil::random_state(rng, fb, false);
    std::vector<Eigen::MatrixXcd> blocks;
    for (std::size_t n = 0; n < fb->sectors(); ++n) blocks.push_back(0.9 * g.state.block(n) + 0.1 * other.block(n));
    const auto perturbed = FockState::from_blocks(fb, blocks);
    CHECK(relative_free_energy(perturbed, free_g.state, tensor, lam, t) >= value - 1e-8);
  }
}

TEST_CASE("state constructors and CSV") {
  const auto fb = build_fock_basis(2, 3);
  CHECK_THROWS_AS(FockState::occupation(fb, {3, 1}), std::invalid_argument);
  CHECK_THROWS_AS(FockState::from_dense(build_fock_basis(3, 30), Eigen::MatrixXcd::Zero(1, 1)), BudgetError);
  const auto s = FockState::occupation(fb, {1, 1});
  CHECK(s.validate().ok());
  CHECK(s.trace() == doctest::Approx(1.0));
  const auto dir = testutil::scratch_dir("fock_csv");
  write_state_csv(s, dir / "state.csv");
  CHECK(testutil::slurp(dir / "state.csv") == "row,col,real,imag\n4,4,1,0\n");
  write_reduced_csv(reduced_density_matrix(s, 1), 2, 1, dir / "g1.csv");
  const auto g1 = testutil::slurp(dir / "g1.csv");
  CHECK(g1.rfind("row,col,real,imag\n", 0) == 0);
}
