#include "gibbslab/spectral/interaction.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "gibbslab/simd/kernels.hpp"

namespace gibbslab::spectral {

namespace {

void check_difference_grid(const std::vector<double>& values, std::size_t grid_points,
                           const char* what) {
  if (values.size() != 2 * grid_points - 1) {
    throw std::invalid_argument(std::string(what) + ": expected " +
                                std::to_string(2 * grid_points - 1) + " difference samples, got " +
                                std::to_string(values.size()));
  }
  for (double v : values) {
    if (!(v >= 0.0)) throw std::invalid_argument(std::string(what) + ": kernel values must be >= 0");
  }
}

}  // namespace

std::vector<double> sample_on_differences(const Grid& grid, const std::function<double(double)>& w) {
  const auto n = static_cast<long>(grid.size());
  std::vector<double> values(static_cast<std::size_t>(2 * n - 1));
  for (long d = -(n - 1); d <= n - 1; ++d) {
    values[static_cast<std::size_t>(d + n - 1)] = w(static_cast<double>(d) * grid.spacing);
  }
  return values;
}

InteractionKernel InteractionKernel::bounded(const Grid& grid, const std::function<double(double)>& w) {
  return {BoundedGridKernel{sample_on_differences(grid, w)}};
}

void InteractionKernel::validate(std::size_t grid_points) const {
  if (const auto* d = std::get_if<DeltaKernel>(&variant)) {
    if (!(d->coupling >= 0.0)) throw std::invalid_argument("delta coupling must be >= 0");
  } else if (const auto* b = std::get_if<BoundedGridKernel>(&variant)) {
    check_difference_grid(b->values, grid_points, "bounded kernel");
  } else {
    const auto& m = std::get<MixedKernel>(variant);
    for (const auto& pm : m.point_masses) {
      if (!(pm.mass >= 0.0)) throw std::invalid_argument("point masses must be >= 0");
      if (!std::isfinite(pm.location)) throw std::invalid_argument("point mass location must be finite");
    }
    if (!m.bounded_part.empty()) check_difference_grid(m.bounded_part, grid_points, "mixed kernel");
  }
}

bool InteractionKernel::is_zero() const {
  auto all_zero = [](const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; });
  };
  if (const auto* d = std::get_if<DeltaKernel>(&variant)) return d->coupling == 0.0;
  if (const auto* b = std::get_if<BoundedGridKernel>(&variant)) return all_zero(b->values);
  const auto& m = std::get<MixedKernel>(variant);
  return std::all_of(m.point_masses.begin(), m.point_masses.end(),
                     [](const PointMass& pm) { return pm.mass == 0.0; }) &&
         all_zero(m.bounded_part);
}

PairOperator::PairOperator(const Grid& grid, const InteractionKernel& kernel) : grid_(grid) {
  kernel.validate(grid.size());
  auto set_bounded = [this](const std::vector<double>& values) {
    if (values.empty()) return;
    // Only the even part of w enters the pair energy.
    reversed_.resize(values.size());
    for (std::size_t t = 0; t < values.size(); ++t) {
      reversed_[t] = 0.5 * (values[t] + values[values.size() - 1 - t]);
    }
    has_bounded_ = true;
  };
  if (const auto* d = std::get_if<DeltaKernel>(&kernel.variant)) {
    delta_coupling_ = d->coupling;
    pure_delta_ = true;
  } else if (const auto* b = std::get_if<BoundedGridKernel>(&kernel.variant)) {
    set_bounded(b->values);
  } else {
    const auto& m = std::get<MixedKernel>(kernel.variant);
    for (const auto& pm : m.point_masses) {
      if (std::abs(pm.location) < 1e-12 * grid.spacing) {
        delta_coupling_ += pm.mass;
      } else {
        shifted_masses_.push_back({std::abs(pm.location), pm.mass});
      }
    }
    set_bounded(m.bounded_part);
  }
}

void PairOperator::add_shifted(std::span<const double> g, double shift, double scale,
                               std::span<double> out) const {
  // out(x) += scale * g(x - shift), linear interpolation; zero outside a
  // non-periodic grid.
  const auto n = static_cast<long>(g.size());
  const double offset = -shift / grid_.spacing;
  const double base = std::floor(offset);
  const double theta = offset - base;
  const long q = static_cast<long>(base);
  auto at = [&](long idx) -> double {
    if (grid_.periodic) return g[static_cast<std::size_t>(((idx % n) + n) % n)];
    return (idx < 0 || idx >= n) ? 0.0 : g[static_cast<std::size_t>(idx)];
  };
  for (long i = 0; i < n; ++i) {
    out[static_cast<std::size_t>(i)] += scale * ((1.0 - theta) * at(i + q) + theta * at(i + q + 1));
  }
}

void PairOperator::apply(std::span<const double> g, std::span<double> out) const {
  const std::size_t n = grid_.size();
  if (g.size() != n || out.size() != n) throw std::invalid_argument("PairOperator: size mismatch");
  for (std::size_t x = 0; x < n; ++x) out[x] = delta_coupling_ * g[x];
  for (const auto& pm : shifted_masses_) {
    add_shifted(g, pm.location, 0.5 * pm.mass, out);
    add_shifted(g, -pm.location, 0.5 * pm.mass, out);
  }
  if (has_bounded_) {
    // reversed_[t] = w((n-1-t) dx), so row i needs reversed_[n-1-i .. 2n-2-i].
    for (std::size_t i = 0; i < n; ++i) {
      const std::span<const double> row(reversed_.data() + (n - 1 - i), n);
      out[i] += grid_.spacing * simd::dot(row, g);
    }
  }
}

double PairOperator::form(std::span<const double> f, std::span<const double> g) const {
  std::vector<double> wg(g.size());
  apply(g, wg);
  return grid_.spacing * simd::dot(f, wg);
}

double PairOperator::self_form(std::span<const double> rho) const {
  if (pure_delta_) return delta_coupling_ * grid_.spacing * simd::dot(rho, rho);
  return form(rho, rho);
}

bool TwoBodyTensor::is_zero() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return v == 0.0; });
}

double TwoBodyTensor::symmetry_error() const {
  double worst = 0.0;
  const std::size_t k = modes_;
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = 0; b < k; ++b)
      for (std::size_t c = 0; c < k; ++c)
        for (std::size_t d = 0; d < k; ++d) {
          const double v = (*this)(a, b, c, d);
          worst = std::max({worst, std::abs(v - (*this)(c, d, a, b)), std::abs(v - (*this)(b, a, d, c))});
        }
  return worst;
}

Eigen::MatrixXd TwoBodyTensor::symmetric_pair_matrix() const {
  const auto index = colex_compositions(modes_, 2);
  // Ordered pairs (i, j) realizing each occupation multi-index.
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> sequences(index.size());
  for (std::size_t s = 0; s < index.size(); ++s) {
    std::vector<std::size_t> occupied;
    for (std::size_t j = 0; j < modes_; ++j)
      for (int c = 0; c < index[s][j]; ++c) occupied.push_back(j);
    sequences[s].emplace_back(occupied[0], occupied[1]);
    if (occupied[0] != occupied[1]) sequences[s].emplace_back(occupied[1], occupied[0]);
  }
  const auto dim = static_cast<Eigen::Index>(index.size());
  Eigen::MatrixXd out(dim, dim);
  for (Eigen::Index r = 0; r < dim; ++r) {
    for (Eigen::Index c = 0; c < dim; ++c) {
      double sum = 0.0;
      for (const auto& [i, j] : sequences[static_cast<std::size_t>(r)])
        for (const auto& [k, l] : sequences[static_cast<std::size_t>(c)]) sum += (*this)(i, j, k, l);
      out(r, c) = sum / std::sqrt(static_cast<double>(sequences[static_cast<std::size_t>(r)].size() *
                                                      sequences[static_cast<std::size_t>(c)].size()));
    }
  }
  return out;
}

TwoBodyTensor interaction_elements(const SpectralBasis& basis, const InteractionKernel& kernel) {
  const std::size_t k = basis.size();
  const std::size_t n = basis.grid_size();
  const PairOperator op(basis.grid, kernel);
  TwoBodyTensor tensor(k);
  if (kernel.is_zero()) return tensor;

  // products[i*k + l] = u_i u_l on the grid; applied[j*k + l] = W (u_j u_l)
  std::vector<std::vector<double>> products(k * k, std::vector<double>(n));
  std::vector<std::vector<double>> applied(k * k, std::vector<double>(n));
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t l = 0; l < k; ++l) {
      const auto ui = basis.mode(i);
      const auto ul = basis.mode(l);
      for (std::size_t x = 0; x < n; ++x) products[i * k + l][x] = ui[x] * ul[x];
    }
  }
  for (std::size_t p = 0; p < k * k; ++p) op.apply(products[p], applied[p]);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j)
      for (std::size_t kk = 0; kk < k; ++kk)
        for (std::size_t l = 0; l < k; ++l) {
          tensor(i, j, kk, l) = basis.grid.spacing * simd::dot(products[i * k + kk], applied[j * k + l]);
        }
  return tensor;
}

}  // namespace gibbslab::spectral
