#include "skt/noise.hpp"

#include "skt/philox.hpp"

#include <cmath>

namespace skt {

std::string to_string(NoiseFamily f) {
  switch (f) {
    case NoiseFamily::diagonal_multiplicative: return "diagonal-multiplicative";
    case NoiseFamily::additive_smooth: return "additive-smooth";
    case NoiseFamily::off_diagonal_multiplicative: return "off-diagonal-multiplicative";
  }
  return "?";
}

NoiseFamily noise_family_from_string(const std::string& s) {
  if (s == "diagonal-multiplicative") return NoiseFamily::diagonal_multiplicative;
  if (s == "additive-smooth") return NoiseFamily::additive_smooth;
  if (s == "off-diagonal-multiplicative") return NoiseFamily::off_diagonal_multiplicative;
  throw ConfigError("unknown noise family '" + s + "'");
}

std::vector<double> NoiseSpec::decay_weights(int rank, double exponent) {
  std::vector<double> q(static_cast<std::size_t>(std::max(rank, 0)));
  for (int k = 0; k < rank; ++k) q[static_cast<std::size_t>(k)] = std::pow(k + 1.0, -exponent);
  return q;
}

void NoiseSpec::validate() const {
  if (rank < 1) throw ConfigError("noise rank K must be >= 1");
  if (static_cast<int>(q.size()) != rank) throw ShapeError("noise weights q must have length K");
  for (double v : q) {
    if (!(v > 0.0)) throw ConfigError("noise weights q_k must be positive");
  }
  if (!(scale >= 0.0)) throw ConfigError("noise scale c must be >= 0");
}

void sample_increment_into(const NoiseSpec& spec, std::size_t n, std::uint64_t path_id,
                           std::uint64_t step_index, double dt, WienerIncrement& out) {
  if (!(dt > 0.0)) throw ConfigError("increment requires dt > 0");
  const Index K = spec.rank;
  const Index total = static_cast<Index>(n) * K;
  out.dW.resize(static_cast<Index>(n), K);
  out.dt = dt;
  const Philox4x32::Key key{static_cast<std::uint32_t>(spec.seed),
                            static_cast<std::uint32_t>(spec.seed >> 32)};
  const double sd = std::sqrt(dt);
  double* dst = out.dW.data();  // row-major: entry (j, k) at j*K + k
  for (Index b = 0; 2 * b < total; ++b) {
    const Philox4x32::Counter ctr{static_cast<std::uint32_t>(b),
                                  static_cast<std::uint32_t>(step_index),
                                  static_cast<std::uint32_t>(path_id),
                                  static_cast<std::uint32_t>(path_id >> 32)};
    const auto z = normal_pair(Philox4x32::generate(ctr, key));
    dst[2 * b] = sd * z[0];
    if (2 * b + 1 < total) dst[2 * b + 1] = sd * z[1];
  }
}

WienerIncrement sample_increment(const NoiseSpec& spec, std::size_t n, std::uint64_t path_id,
                                 std::uint64_t step_index, double dt) {
  WienerIncrement inc;
  sample_increment_into(spec, n, path_id, step_index, dt, inc);
  return inc;
}

NoiseOperator::NoiseOperator(NoiseSpec spec, const SpectralBasis& basis, std::size_t n)
    : spec_(std::move(spec)), basis_(basis), n_(n) {
  spec_.validate();
  if (n_ < 1) throw ConfigError("noise needs at least one species");
  if (spec_.rank > basis.num_modes()) {
    throw ConfigError("noise rank K exceeds the number of basis modes");
  }
  const auto& order = basis.modes_by_eigenvalue();
  psi_.resize(spec_.rank, basis.num_points());
  for (int k = 0; k < spec_.rank; ++k) {
    modes_.push_back(order[static_cast<std::size_t>(k)]);
    psi_.row(k) = basis.mode_samples(modes_.back()).transpose();
  }
  const Eigen::Map<const Vector> q(spec_.q.data(), spec_.rank);
  psi_q2_sum_ = psi_.array().square().matrix().transpose() * q.array().square().matrix();
}

Matrix NoiseOperator::apply(const Matrix& state_grid, const WienerIncrement& inc) const {
  if (state_grid.rows() != static_cast<Index>(n_) || state_grid.cols() != psi_.cols()) {
    throw ShapeError("noise: state grid does not conform");
  }
  if (inc.dW.rows() != static_cast<Index>(n_) || inc.dW.cols() != spec_.rank) {
    throw ShapeError("noise: increment does not conform");
  }
  const Eigen::Map<const Eigen::RowVectorXd> q(spec_.q.data(), spec_.rank);
  const double c = spec_.scale;
  switch (spec_.family) {
    case NoiseFamily::diagonal_multiplicative: {
      const Matrix xi = (inc.dW.array().rowwise() * q.array()).matrix() * psi_;
      return c * state_grid.cwiseProduct(xi);
    }
    case NoiseFamily::additive_smooth:
      return c * ((inc.dW.array().rowwise() * q.array()).matrix() * psi_);
    case NoiseFamily::off_diagonal_multiplicative: {
      const Eigen::RowVectorXd summed = inc.dW.colwise().sum().cwiseProduct(q);
      const Eigen::RowVectorXd xi = summed * psi_;
      return (c / static_cast<double>(n_)) * (state_grid.array().rowwise() * xi.array()).matrix();
    }
  }
  return {};
}

Vector NoiseOperator::weighted_l2(const Matrix& state_grid) const {
  return basis_.cell_weight() * (state_grid.array().square().matrix() * psi_q2_sum_);
}

double NoiseOperator::hs_norm_sq(const Matrix& state_grid) const {
  const double c2 = spec_.scale * spec_.scale;
  const auto n = static_cast<double>(n_);
  switch (spec_.family) {
    case NoiseFamily::diagonal_multiplicative:
      return c2 * weighted_l2(state_grid).sum();
    case NoiseFamily::additive_smooth:
      return c2 * n * basis_.cell_weight() * psi_q2_sum_.sum();
    case NoiseFamily::off_diagonal_multiplicative:
      return c2 / n * weighted_l2(state_grid).sum();
  }
  return 0.0;
}

double NoiseOperator::hs_norm_sq_difference(const Matrix& u_grid, const Matrix& v_grid) const {
  if (!spec_.multiplicative()) return 0.0;
  return hs_norm_sq(u_grid - v_grid);
}

Vector NoiseOperator::row_hs_norms(const Matrix& state_grid) const {
  const double c = spec_.scale;
  switch (spec_.family) {
    case NoiseFamily::diagonal_multiplicative:
    case NoiseFamily::off_diagonal_multiplicative:
      // off-diagonal: n identical entries of norm (c/n) ||u_i psi||
      return c * weighted_l2(state_grid).cwiseSqrt();
    case NoiseFamily::additive_smooth:
      return Vector::Constant(static_cast<Index>(n_),
                              c * std::sqrt(basis_.cell_weight() * psi_q2_sum_.sum()));
  }
  return {};
}

double NoiseOperator::projected_hs_norm_sq(const Matrix& state_grid, const Vector& weights) const {
  const double c2 = spec_.scale * spec_.scale;
  double total = 0.0;
  for (int k = 0; k < spec_.rank; ++k) {
    const double qk2 = spec_.q[static_cast<std::size_t>(k)] * spec_.q[static_cast<std::size_t>(k)];
    if (spec_.family == NoiseFamily::additive_smooth) {
      // psi_k is a retained mode, so the projection is the identity on it.
      total += c2 * qk2 * weights.sum();
      continue;
    }
    const Matrix prod = (state_grid.array().rowwise() * psi_.row(k).array()).matrix();
    const Vector norms = basis_.project(prod).rowwise().squaredNorm();
    const double factor =
        spec_.family == NoiseFamily::off_diagonal_multiplicative ? 1.0 / static_cast<double>(n_) : 1.0;
    total += c2 * qk2 * factor * weights.dot(norms);
  }
  return total;
}

Vector NoiseOperator::weighted_sup_sq() const {
  Vector s(spec_.rank);
  for (int k = 0; k < spec_.rank; ++k) {
    const double qk = spec_.q[static_cast<std::size_t>(k)];
    s[k] = qk * qk * basis_.sup_norm_sq(modes_[static_cast<std::size_t>(k)]);
  }
  return s;
}

double NoiseOperator::growth_constant() const {
  const double c2 = spec_.scale * spec_.scale;
  const auto n = static_cast<double>(n_);
  switch (spec_.family) {
    case NoiseFamily::diagonal_multiplicative:
      return c2 * weighted_sup_sq().sum();
    case NoiseFamily::additive_smooth: {
      double q2 = 0.0;
      for (double v : spec_.q) q2 += v * v;
      return c2 * n * q2;
    }
    case NoiseFamily::off_diagonal_multiplicative:
      return c2 / n * weighted_sup_sq().sum();
  }
  return 0.0;
}

std::optional<double> NoiseOperator::vanishing_constant() const {
  if (!spec_.multiplicative()) return std::nullopt;
  return spec_.scale * std::sqrt(weighted_sup_sq().sum());
}

Matrix apply_sigma(const NoiseSpec& spec, const SpectralBasis& basis, const Matrix& state_grid,
                   const WienerIncrement& inc) {
  return NoiseOperator(spec, basis, static_cast<std::size_t>(state_grid.rows()))
      .apply(state_grid, inc);
}

double hs_norm_sq(const NoiseSpec& spec, const SpectralBasis& basis, const Matrix& state_grid) {
  return NoiseOperator(spec, basis, static_cast<std::size_t>(state_grid.rows()))
      .hs_norm_sq(state_grid);
}

}  // namespace skt
