#pragma once

// Nonnegative pair interactions w(x - y) and their two-body matrix elements
// in a spectral basis.

#include <cstddef>
#include <functional>
#include <span>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "gibbslab/combinatorics.hpp"
#include "gibbslab/spectral/basis.hpp"

namespace gibbslab::spectral {

// w = g * delta_0.
struct DeltaKernel {
  double coupling = 0.0;
};

// w sampled on the grid differences: values[d + n - 1] = w(d * dx) for
// d = -(n-1) .. n-1, so 2n - 1 entries for an n-point grid.
struct BoundedGridKernel {
  std::vector<double> values;
};

// A point mass at s is symmetrized to (m/2)(delta_s + delta_{-s}); this leaves
// the quartic energy unchanged and keeps the two-body tensor symmetric.
struct PointMass {
  double location = 0.0;
  double mass = 0.0;
};

struct MixedKernel {
  std::vector<PointMass> point_masses;
  std::vector<double> bounded_part;  // same layout as BoundedGridKernel; may be empty
};

struct InteractionKernel {
  std::variant<DeltaKernel, BoundedGridKernel, MixedKernel> variant;

  static InteractionKernel delta(double coupling) { return {DeltaKernel{coupling}}; }
  static InteractionKernel zero() { return delta(0.0); }
  // Samples a callable w(x) on the difference grid of `grid`.
  static InteractionKernel bounded(const Grid& grid, const std::function<double(double)>& w);

  // Throws std::invalid_argument for negative masses/values or a difference
  // grid that does not match `grid_points`.
  void validate(std::size_t grid_points) const;
  bool is_zero() const;
};

std::vector<double> sample_on_differences(const Grid& grid, const std::function<double(double)>& w);

// The integral operator (W g)(x) = int w(x - y) g(y) dy on grid functions.
class PairOperator {
 public:
  PairOperator(const Grid& grid, const InteractionKernel& kernel);

  void apply(std::span<const double> g, std::span<double> out) const;
  // B(f, g) = iint f(x) w(x - y) g(y) dx dy.
  double form(std::span<const double> f, std::span<const double> g) const;
  // B(rho, rho); uses the SIMD dot directly for a pure delta kernel.
  double self_form(std::span<const double> rho) const;

  const Grid& grid() const { return grid_; }

 private:
  void add_shifted(std::span<const double> g, double shift, double scale, std::span<double> out) const;

  Grid grid_;
  double delta_coupling_ = 0.0;
  std::vector<PointMass> shifted_masses_;  // already symmetrized, location != 0
  std::vector<double> reversed_;           // bounded part, reversed difference samples
  bool has_bounded_ = false;
  bool pure_delta_ = false;
};

// W[i,j,k,l] = <u_i (x) u_j | w | u_k (x) u_l>; real because the modes are real.
class TwoBodyTensor {
 public:
  TwoBodyTensor() = default;
  explicit TwoBodyTensor(std::size_t modes) : modes_(modes), data_(modes * modes * modes * modes, 0.0) {}

  std::size_t modes() const { return modes_; }
  double operator()(std::size_t i, std::size_t j, std::size_t k, std::size_t l) const {
    return data_[((i * modes_ + j) * modes_ + k) * modes_ + l];
  }
  double& operator()(std::size_t i, std::size_t j, std::size_t k, std::size_t l) {
    return data_[((i * modes_ + j) * modes_ + k) * modes_ + l];
  }
  bool is_zero() const;

  // max deviation from W[i,j,k,l] = W[k,l,i,j] and W[i,j,k,l] = W[j,i,l,k].
  double symmetry_error() const;

  // The two-body operator on Sym^2(C^K) in the normalized occupation basis
  // (colex order of `colex_compositions(K, 2)`).
  Eigen::MatrixXd symmetric_pair_matrix() const;

 private:
  std::size_t modes_ = 0;
  std::vector<double> data_;
};

TwoBodyTensor interaction_elements(const SpectralBasis& basis, const InteractionKernel& kernel);

}  // namespace gibbslab::spectral
