#include "skt/drift.hpp"

namespace skt {

FluxFields evaluate_flux(const SpectralBasis& basis, const ModelParams& p, const Matrix& coeffs,
                         const DriftOptions& opts) {
  if (coeffs.rows() != static_cast<Index>(p.n)) throw ShapeError("state has wrong species count");
  FluxFields f;
  f.u = basis.synthesize(coeffs);
  f.grad = basis.gradient(coeffs);
  f.flux.reserve(f.grad.size());

  switch (opts.form) {
    case DriftForm::none:
      for (const auto& g : f.grad) f.flux.push_back(Matrix::Zero(g.rows(), g.cols()));
      break;
    case DriftForm::linear:
      for (const auto& g : f.grad) f.flux.push_back(p.a0.asDiagonal() * g);
      break;
    case DriftForm::cross_diffusion: {
      // F_i = (a_i0 + sum_k a_ik u_k^2) grad u_i + 2 u_i(+) sum_j a_ij u_j grad u_j
      Matrix self = p.a * f.u.array().square().matrix();
      self.colwise() += p.a0;
      const Matrix lead = opts.truncated ? Matrix(f.u.cwiseMax(0.0)) : f.u;
      for (const auto& g : f.grad) {
        const Matrix cross = p.a * f.u.cwiseProduct(g);
        f.flux.push_back(self.cwiseProduct(g) + 2.0 * lead.cwiseProduct(cross));
      }
      break;
    }
  }
  return f;
}

Matrix drift_apply(const SpectralBasis& basis, const FluxFields& fields) {
  return basis.weak_divergence(fields.flux);
}

Matrix drift_apply(const SpectralBasis& basis, const ModelParams& p, const GalerkinState& state,
                   const DriftOptions& opts) {
  return drift_apply(basis, evaluate_flux(basis, p, state.coeffs, opts));
}

double dissipation(const SpectralBasis& basis, const Vector& weights, const FluxFields& fields) {
  Vector per_species = Vector::Zero(fields.u.rows());
  for (std::size_t a = 0; a < fields.flux.size(); ++a) {
    per_species += fields.grad[a].cwiseProduct(fields.flux[a]).rowwise().sum();
  }
  return basis.cell_weight() * weights.dot(per_species);
}

}  // namespace skt
