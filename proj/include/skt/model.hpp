#pragma once

#include "skt/types.hpp"

#include <optional>
#include <vector>

namespace skt {

/**
 * Coefficients of the quadratic-rate cross-diffusion system
 *
 *   A_ij(u) = delta_ij (a_i0 + sum_k a_ik u_k^2) + 2 a_ij u_i u_j
 *
 * together with the entropy weights pi_i of H(u) = 1/2 sum_i pi_i |u_i|^2.
 * Invariants: a0 > 0, a > 0 entrywise, pi > 0.
 */
struct ModelParams {
  std::size_t n{0};
  Vector a0;
  Matrix a;
  Vector pi;

  /// Builds params with pi from the detailed-balance solver, or all ones when
  /// no reversible measure exists.
  static ModelParams with_solved_weights(Vector a0, Matrix a);

  /// Throws ConfigError naming the first violated invariant.
  void validate() const;
};

enum class CoercivityRoute { detailed_balance, self_diffusion, none };

/// Outcome of the two coercivity tests on the coefficient matrix.
struct ConditionReport {
  std::optional<double> alpha1;  // only when detailed balance holds for pi
  double alpha2{0.0};
  bool detailed_balance{false};
  bool admissible{false};
  double alpha{0.0};
  CoercivityRoute route{CoercivityRoute::none};
  /// Weights for which the quadratic-form bound holds: pi on the
  /// detailed-balance route, all ones on the self-diffusion route.
  Vector weights;
};

/// Relative tolerance for the Kolmogorov cycle test and pair equations.
inline constexpr double kDetailedBalanceTol = 1e-10;

/// Reversible measure pi (pi_1 = 1) with pi_i a_ij = pi_j a_ji for all pairs,
/// or nullopt when the Kolmogorov 3-cycle criterion fails.
std::optional<Vector> solve_detailed_balance(const Matrix& a);

/// True when pi_i a_ij = pi_j a_ji holds for all i != j to kDetailedBalanceTol.
bool satisfies_detailed_balance(const Matrix& a, const Vector& pi);

/// alpha1 = min_i (a_ii - 1/3 sum_{j!=i} a_ij).
double alpha_detailed_balance(const Matrix& a);

/// alpha2 = min_i (a_ii - 1/3 sum_{j!=i} ((a_ij + a_ji) - sqrt(a_ij a_ji))).
/// The single square root is the sharp pairwise constant; with 2*sqrt the
/// bound fails already for symmetric 2x2 matrices.
double alpha_self_diffusion(const Matrix& a);

ConditionReport check_conditions(const ModelParams& p);

Matrix eval_diffusion_matrix(const ModelParams& p, const Vector& u);

/// Same as eval_diffusion_matrix with the cross term 2 a_ij max(u_i,0) u_j.
Matrix eval_truncated_matrix(const ModelParams& p, const Vector& u);

/// sum_ij w_i A_ij z_i z_j - (sum_i w_i a_i0 z_i^2 + 3 alpha sum_i w_i u_i^2 z_i^2)
/// with w = report.weights. Non-negative for admissible reports.
double quadratic_form_gap(const ModelParams& p, const ConditionReport& report,
                          const Vector& u, const Vector& z);

/// Sum of |w_i A_ij z_i z_j|, used to scale gap tolerances.
double quadratic_form_scale(const ModelParams& p, const ConditionReport& report,
                            const Vector& u, const Vector& z);

/// h_s(z) = z (log z - 1) + 1 for s = 1, z^s / s otherwise.
double entropy_density(double s, double z);

/// H(u) = 1/2 sum_i pi_i int u_i^2 for grid fields (rows = species) and
/// quadrature weights (one per grid point).
double entropy(const ModelParams& p, const Matrix& fields, const Vector& quad_weights);

}  // namespace skt
