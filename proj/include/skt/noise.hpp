#pragma once

#include "skt/spectral.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace skt {

/**
 * Concrete noise operators sigma_ij : L^2 -> L_2(Y; L^2), with Y truncated to
 * the span of eta_1..eta_K and eta_k identified with the K lowest basis modes
 * psi_k (ordered by eigenvalue):
 *
 *   diagonal-multiplicative:      sigma_ij(u) eta_k = delta_ij c q_k u_i psi_k
 *   additive-smooth:              sigma_ij(u) eta_k = delta_ij c q_k psi_k
 *   off-diagonal-multiplicative:  sigma_ij(u) eta_k = c q_k u_i psi_k / n
 */
enum class NoiseFamily { diagonal_multiplicative, additive_smooth, off_diagonal_multiplicative };

std::string to_string(NoiseFamily f);
NoiseFamily noise_family_from_string(const std::string& s);

struct NoiseSpec {
  NoiseFamily family{NoiseFamily::diagonal_multiplicative};
  int rank{1};                 // K
  std::vector<double> q{1.0};  // q_k > 0, length K
  double scale{0.0};           // c >= 0
  std::uint64_t seed{0};

  /// q_k = (k + 1)^(-exponent), k = 0..K-1.
  static std::vector<double> decay_weights(int rank, double exponent);
  void validate() const;
  bool multiplicative() const { return family != NoiseFamily::additive_smooth; }
};

/// Increments d beta_jk, j = species, k = direction; N(0, dt) entries.
struct WienerIncrement {
  Matrix dW;  // n x K
  double dt{0.0};
};

/// Deterministic in (seed, path_id, step_index). Entry (j, k) is normal
/// number j*K + k of the step's Philox stream.
WienerIncrement sample_increment(const NoiseSpec& spec, std::size_t n, std::uint64_t path_id,
                                 std::uint64_t step_index, double dt);

/// In-place variant for hot loops; `out` is resized to n x K.
void sample_increment_into(const NoiseSpec& spec, std::size_t n, std::uint64_t path_id,
                           std::uint64_t step_index, double dt, WienerIncrement& out);

/// NoiseSpec bound to a basis and species count, with the psi_k samples
/// cached. Immutable after construction.
class NoiseOperator {
 public:
  NoiseOperator(NoiseSpec spec, const SpectralBasis& basis, std::size_t n);

  const NoiseSpec& spec() const { return spec_; }
  std::size_t species() const { return n_; }
  /// Basis mode index of direction k.
  Index direction_mode(int k) const { return modes_[static_cast<std::size_t>(k)]; }
  const Matrix& directions() const { return psi_; }  // K x P

  /// sum_j sum_k sigma_ij(u) eta_k d beta_jk on the grid (n x P).
  Matrix apply(const Matrix& state_grid, const WienerIncrement& inc) const;

  /// sum_ij sum_k ||sigma_ij(u) eta_k||^2.
  double hs_norm_sq(const Matrix& state_grid) const;
  /// Same for sigma(u) - sigma(v).
  double hs_norm_sq_difference(const Matrix& u_grid, const Matrix& v_grid) const;
  /// sum_j ||sigma_ij(u)||_HS for each species i.
  Vector row_hs_norms(const Matrix& state_grid) const;
  /// sum_i w_i sum_j sum_k ||Pi_N sigma_ij(u) eta_k||^2.
  double projected_hs_norm_sq(const Matrix& state_grid, const Vector& weights) const;

  /// C_sigma with hs_norm_sq(u) <= C (1 + ||u||^2) and, for multiplicative
  /// families, hs_norm_sq_difference(u, v) <= C ||u - v||^2.
  double growth_constant() const;
  /// C with sum_j ||sigma_ij(u)||_HS <= C ||u_i||; absent for additive noise.
  std::optional<double> vanishing_constant() const;

 private:
  Vector weighted_sup_sq() const;
  /// Per species: int u_i^2 sum_k q_k^2 psi_k^2 dx.
  Vector weighted_l2(const Matrix& state_grid) const;

  NoiseSpec spec_;
  SpectralBasis basis_;
  std::size_t n_;
  std::vector<Index> modes_;
  Matrix psi_;         // K x P
  Vector psi_q2_sum_;  // P: sum_k q_k^2 psi_k(x)^2
};

Matrix apply_sigma(const NoiseSpec& spec, const SpectralBasis& basis, const Matrix& state_grid,
                   const WienerIncrement& inc);
double hs_norm_sq(const NoiseSpec& spec, const SpectralBasis& basis, const Matrix& state_grid);

}  // namespace skt
