#pragma once

#include "skt/types.hpp"

#include <array>
#include <filesystem>
#include <vector>

namespace skt {

/**
 * Tensor-product cosine basis on the box prod_a (0, L_a), d in {1, 2}.
 *
 *   e_k(x) = prod_a c_{k_a} cos(k_a pi x_a / L_a),  c_0 = 1/sqrt(L), c_m = sqrt(2/L)
 *
 * These are the Neumann eigenfunctions of the Laplacian, so projection
 * commutes with it and the no-flux condition holds mode by mode.
 *
 * Collocation uses G >= 2M midpoints per axis, x_g = (g + 1/2) L / G. On that
 * grid the midpoint rule integrates products of cosines exactly up to total
 * frequency 2G - 1, which covers the Gram matrix and the weak form of the
 * cubic flux against any retained mode.
 *
 * Layout: mode k = k_0 * M + k_1, grid point g = g_0 * G + g_1 (axis 0 slowest).
 * Fields and coefficient arrays are row-per-species matrices.
 */
class SpectralBasis {
 public:
  SpectralBasis(int dim, std::vector<double> lengths, int modes_per_axis, int grid_per_axis);

  int dim() const { return dim_; }
  const std::vector<double>& lengths() const { return lengths_; }
  int modes_per_axis() const { return modes_; }
  int grid_per_axis() const { return grid_; }
  Index num_modes() const { return num_modes_; }
  Index num_points() const { return num_points_; }
  double volume() const { return volume_; }

  /// Midpoint quadrature weight (identical for every grid point).
  double cell_weight() const { return cell_weight_; }
  Vector quadrature_weights() const;
  /// num_points x dim matrix of grid coordinates.
  Matrix points() const;

  /// Laplacian eigenvalues lambda_k = sum_a (k_a pi / L_a)^2.
  const Vector& eigenvalues() const { return eigenvalues_; }
  /// Per-axis wave numbers of mode k.
  std::array<int, 2> mode_index(Index k) const;
  /// Mode indices sorted by eigenvalue (ties by index).
  const std::vector<Index>& modes_by_eigenvalue() const { return by_eigenvalue_; }
  /// sup_x |e_k(x)|^2.
  double sup_norm_sq(Index k) const;

  /// Coefficients (v, e_k) for each row of grid samples.
  Matrix project(const Matrix& fields) const;
  /// Grid samples of sum_k c_k e_k for each coefficient row.
  Matrix synthesize(const Matrix& coeffs) const;
  /// Per-axis derivative samples, computed from the sine series.
  std::vector<Matrix> gradient(const Matrix& coeffs) const;
  /// Coefficients of Pi_N div F from flux samples F (one matrix per axis):
  /// (div F, e_k) = -(F, grad e_k), exact under the no-flux condition.
  Matrix weak_divergence(const std::vector<Matrix>& flux) const;

  /// Grid samples of e_k.
  Vector mode_samples(Index k) const;

 private:
  Matrix to_grid(const Matrix& coeffs, const Matrix& op0, const Matrix& op1) const;
  Matrix to_modes(const Matrix& fields, const Matrix& op0, const Matrix& op1) const;

  int dim_;
  std::vector<double> lengths_;
  int modes_;
  int grid_;
  Index num_modes_;
  Index num_points_;
  double volume_;
  double cell_weight_;
  // Per-axis G x M collocation matrices: cosine values and their x-derivative.
  std::vector<Matrix> cos_;
  std::vector<Matrix> dcos_;
  Vector eigenvalues_;
  std::vector<Index> by_eigenvalue_;
};

/// Coefficients plus time; rows are species, columns modes.
struct GalerkinState {
  Matrix coeffs;
  double time{0.0};
};

/// Writes grid samples as CSV: x0[,x1],u0,u1,...
void write_field_csv(const SpectralBasis& basis, const Matrix& fields,
                     const std::filesystem::path& path);

}  // namespace skt
