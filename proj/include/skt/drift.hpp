#pragma once

#include "skt/model.hpp"
#include "skt/spectral.hpp"

namespace skt {

/// Which flux the drift is built from. `linear` keeps only a_i0 grad u_i (the
/// decoupled heat equations); `none` switches the drift off.
enum class DriftForm { cross_diffusion, linear, none };

struct DriftOptions {
  DriftForm form{DriftForm::cross_diffusion};
  /// Use A+ (cross term 2 a_ij max(u_i,0) u_j) instead of A.
  bool truncated{false};
};

/// Pointwise fields behind one drift evaluation.
struct FluxFields {
  Matrix u;                   // n x P
  std::vector<Matrix> grad;   // per axis, n x P
  std::vector<Matrix> flux;   // per axis, F_i = sum_j A_ij grad u_j
};

FluxFields evaluate_flux(const SpectralBasis& basis, const ModelParams& p, const Matrix& coeffs,
                         const DriftOptions& opts);

/// Coefficients of Pi_N div(sum_j A_ij(u) grad u_j) for each species,
/// evaluated pseudo-spectrally. The constant mode is exactly zero.
Matrix drift_apply(const SpectralBasis& basis, const ModelParams& p, const GalerkinState& state,
                   const DriftOptions& opts = {});
Matrix drift_apply(const SpectralBasis& basis, const FluxFields& fields);

/// sum_i w_i int grad u_i . F_i dx on the grid.
double dissipation(const SpectralBasis& basis, const Vector& weights, const FluxFields& fields);

}  // namespace skt
