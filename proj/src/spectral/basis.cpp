#include "gibbslab/spectral/basis.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "gibbslab/csv.hpp"
#include "gibbslab/error.hpp"

namespace gibbslab::spectral {

namespace {

struct RawEigen {
  std::vector<double> values;
  Eigen::MatrixXd vectors;  // n x m, Euclidean-orthonormal columns
};

RawEigen lowest_tridiagonal(const DiscreteOperator& op, lapack_int count) {
  const auto n = static_cast<lapack_int>(op.size());
  std::vector<double> d = op.diagonal;
  std::vector<double> e = op.off_diagonal;
  e.push_back(0.0);
  RawEigen out;
  out.values.resize(static_cast<std::size_t>(n));
  out.vectors.resize(n, count);
  std::vector<lapack_int> support(2 * static_cast<std::size_t>(count));
  lapack_int found = 0;
  const lapack_int info =
      LAPACKE_dstevr(LAPACK_COL_MAJOR, 'V', 'I', n, d.data(), e.data(), 0.0, 0.0, 1, count, 0.0,
                     &found, out.values.data(), out.vectors.data(), n, support.data());
  if (info != 0 || found != count) {
    throw NumericalError("tridiagonal eigensolver failed (info=" + std::to_string(info) + ")");
  }
  out.values.resize(static_cast<std::size_t>(count));
  return out;
}

RawEigen lowest_dense(const DiscreteOperator& op, lapack_int count) {
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(op.dense());
  if (solver.info() != Eigen::Success) throw NumericalError("symmetric eigensolver failed");
  RawEigen out;
  out.values.assign(solver.eigenvalues().data(), solver.eigenvalues().data() + count);
  out.vectors = solver.eigenvectors().leftCols(count);
  return out;
}

// Replace the columns [begin, end) spanning one eigenspace by the
// Gram-Schmidt sequence of the projected grid indicators e_0, e_1, ...
void canonicalize_block(Eigen::MatrixXd& vectors, Eigen::Index begin, Eigen::Index end) {
  const Eigen::Index dim = end - begin;
  const Eigen::MatrixXd block = vectors.middleCols(begin, dim);
  const double scale = block.rowwise().norm().maxCoeff();
  Eigen::MatrixXd coeffs(dim, dim);  // accepted directions in coefficient space
  Eigen::Index accepted = 0;
  for (Eigen::Index t = 0; t < block.rows() && accepted < dim; ++t) {
    Eigen::VectorXd c = block.row(t).transpose();
    for (Eigen::Index a = 0; a < accepted; ++a) c -= coeffs.col(a).dot(c) * coeffs.col(a);
    for (Eigen::Index a = 0; a < accepted; ++a) c -= coeffs.col(a).dot(c) * coeffs.col(a);
    const double norm = c.norm();
    if (norm > 1e-3 * scale) coeffs.col(accepted++) = c / norm;
  }
  if (accepted != dim) throw NumericalError("could not canonicalize a degenerate eigenspace");
  vectors.middleCols(begin, dim) = block * coeffs;
}

void fix_sign(Eigen::Ref<Eigen::VectorXd> v) {
  const double threshold = 1e-8 * v.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v(i)) > threshold) {
      if (v(i) < 0.0) v = -v;
      return;
    }
  }
}

}  // namespace

SpectralBasis eigendecompose(const DiscreteOperator& op, std::size_t modes) {
  const std::size_t n = op.size();
  if (modes == 0) throw std::invalid_argument("eigendecompose: need at least one mode");
  if (modes > n / 4) {
    throw std::invalid_argument("eigendecompose: K=" + std::to_string(modes) +
                                " exceeds grid_points/4 = " + std::to_string(n / 4));
  }
  // Two extra pairs so a degenerate eigenspace straddling K is seen whole.
  const auto requested = static_cast<lapack_int>(std::min(n, modes + 2));
  RawEigen raw = op.is_tridiagonal() ? lowest_tridiagonal(op, requested)
                                     : lowest_dense(op, requested);

  const auto count = static_cast<Eigen::Index>(raw.values.size());
  for (Eigen::Index begin = 0; begin < count;) {
    Eigen::Index end = begin + 1;
    const double tol = 1e-8 * std::max(1.0, std::abs(raw.values[begin]));
    while (end < count && std::abs(raw.values[end] - raw.values[begin]) <= tol) ++end;
    if (end - begin > 1) canonicalize_block(raw.vectors, begin, end);
    begin = end;
  }

  SpectralBasis basis;
  basis.spec = op.spec;
  basis.grid = op.grid;
  basis.eigenvalues.assign(raw.values.begin(), raw.values.begin() + static_cast<long>(modes));
  basis.modes.resize(static_cast<Eigen::Index>(modes), static_cast<Eigen::Index>(n));
  const double inv_sqrt_dx = 1.0 / std::sqrt(op.grid.spacing);
  for (std::size_t j = 0; j < modes; ++j) {
    Eigen::VectorXd v = raw.vectors.col(static_cast<Eigen::Index>(j));
    fix_sign(v);
    basis.modes.row(static_cast<Eigen::Index>(j)) = v.transpose() * inv_sqrt_dx;
  }

  if (!(basis.eigenvalues.front() > 0.0)) {
    throw NumericalError("lowest eigenvalue is not positive; operator is not positive definite");
  }
  if (const double err = basis.orthonormality_error(); err > 1e-8) {
    throw NumericalError("eigenvectors fail orthonormality: " + std::to_string(err));
  }
  if (const double res = basis.max_relative_residual(op); res > 1e-6) {
    throw NumericalError("eigenpair residual too large: " + std::to_string(res));
  }
  return basis;
}

double SpectralBasis::orthonormality_error() const {
  const Eigen::MatrixXd gram = modes * modes.transpose() * grid.spacing;
  return (gram - Eigen::MatrixXd::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();
}

double SpectralBasis::max_relative_residual(const DiscreteOperator& op) const {
  double worst = 0.0;
  std::vector<double> hu(grid_size());
  for (std::size_t j = 0; j < size(); ++j) {
    const auto u = mode(j);
    op.apply(u, hu);
    double sq = 0.0;
    for (std::size_t x = 0; x < hu.size(); ++x) {
      const double r = hu[x] - eigenvalues[j] * u[x];
      sq += r * r;
    }
    worst = std::max(worst, std::sqrt(sq * grid.spacing) / eigenvalues[j]);
  }
  return worst;
}

double wkb_eigenvalue(double exponent, double mass, double j) {
  const double inv_a = 1.0 / exponent;
  // B = int_0^1 sqrt(1 - t^a) dt
  const double b = std::exp(std::lgamma(1.0 + inv_a) + std::lgamma(1.5) - std::lgamma(1.5 + inv_a));
  const double action = std::numbers::pi * (j - 0.5) / (2.0 * b);
  return std::pow(action, 2.0 * exponent / (exponent + 2.0)) + mass;
}

double default_half_width(double exponent, double mass, std::size_t modes) {
  const double lambda_k = wkb_eigenvalue(exponent, mass, static_cast<double>(modes));
  return std::pow(10.0 * std::max(lambda_k, 1.0), 1.0 / exponent);
}

double interval_eigenvalue(Boundary boundary, double mass, std::size_t j) {
  if (j == 0) throw std::invalid_argument("interval_eigenvalue: index is 1-based");
  const double pi = std::numbers::pi;
  double k = 0.0;
  switch (boundary) {
    case Boundary::Dirichlet:
      k = static_cast<double>(j) * pi / 2.0;
      break;
    case Boundary::Neumann:
      k = static_cast<double>(j - 1) * pi / 2.0;
      break;
    case Boundary::Periodic:
      k = static_cast<double>(j / 2) * pi;
      break;
  }
  return k * k + mass;
}

void write_spectrum_csv(const SpectralBasis& basis, const std::filesystem::path& path) {
  std::vector<std::string> header{"j", "lambda_j"};
  for (std::size_t x = 0; x < basis.grid_size(); ++x) header.push_back("u_" + std::to_string(x));
  CsvWriter csv(path, std::move(header));
  for (std::size_t j = 0; j < basis.size(); ++j) {
    csv.cell(j + 1).cell(basis.eigenvalues[j]);
    for (double v : basis.mode(j)) csv.cell(v);
    csv.end_row();
  }
}

void write_grid_csv(const Grid& grid, const std::filesystem::path& path) {
  CsvWriter csv(path, {"i", "x", "weight"});
  for (std::size_t i = 0; i < grid.size(); ++i) {
    csv.cell(i).cell(grid.nodes[i]).cell(grid.spacing).end_row();
  }
}

}  // namespace gibbslab::spectral
