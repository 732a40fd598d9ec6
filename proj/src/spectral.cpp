#include "skt/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <numeric>

namespace skt {

namespace {

using RowMap = Eigen::Map<Matrix>;
using ConstRowMap = Eigen::Map<const Matrix>;

double axis_norm(int k, double length) {
  return k == 0 ? 1.0 / std::sqrt(length) : std::sqrt(2.0 / length);
}

}  // namespace

SpectralBasis::SpectralBasis(int dim, std::vector<double> lengths, int modes_per_axis,
                             int grid_per_axis)
    : dim_(dim), lengths_(std::move(lengths)), modes_(modes_per_axis), grid_(grid_per_axis) {
  if (dim_ != 1 && dim_ != 2) throw ConfigError("basis dimension must be 1 or 2");
  if (static_cast<int>(lengths_.size()) != dim_) throw ShapeError("need one length per axis");
  for (double L : lengths_) {
    if (!(L > 0.0)) throw ConfigError("box lengths must be positive");
  }
  if (modes_ < 1) throw ConfigError("modes_per_axis must be >= 1");
  if (grid_ < 2 * modes_) throw ConfigError("grid_per_axis must be >= 2 * modes_per_axis");

  num_modes_ = dim_ == 1 ? modes_ : Index{modes_} * modes_;
  num_points_ = dim_ == 1 ? grid_ : Index{grid_} * grid_;
  volume_ = std::accumulate(lengths_.begin(), lengths_.end(), 1.0, std::multiplies<>());
  cell_weight_ = volume_ / static_cast<double>(num_points_);

  for (int a = 0; a < dim_; ++a) {
    const double L = lengths_[a];
    Matrix c(grid_, modes_);
    Matrix dc(grid_, modes_);
    for (int g = 0; g < grid_; ++g) {
      const double x = (g + 0.5) * L / grid_;
      for (int m = 0; m < modes_; ++m) {
        const double wave = m * std::numbers::pi / L;
        const double norm = axis_norm(m, L);
        c(g, m) = norm * std::cos(wave * x);
        dc(g, m) = -norm * wave * std::sin(wave * x);
      }
    }
    cos_.push_back(std::move(c));
    dcos_.push_back(std::move(dc));
  }

  eigenvalues_.resize(num_modes_);
  for (Index k = 0; k < num_modes_; ++k) {
    const auto idx = mode_index(k);
    double lam = 0.0;
    for (int a = 0; a < dim_; ++a) {
      const double wave = idx[a] * std::numbers::pi / lengths_[a];
      lam += wave * wave;
    }
    eigenvalues_[k] = lam;
  }
  by_eigenvalue_.resize(num_modes_);
  std::iota(by_eigenvalue_.begin(), by_eigenvalue_.end(), Index{0});
  std::stable_sort(by_eigenvalue_.begin(), by_eigenvalue_.end(),
                   [&](Index i, Index j) { return eigenvalues_[i] < eigenvalues_[j]; });
}

Vector SpectralBasis::quadrature_weights() const {
  return Vector::Constant(num_points_, cell_weight_);
}

Matrix SpectralBasis::points() const {
  Matrix pts(num_points_, dim_);
  for (Index g = 0; g < num_points_; ++g) {
    const Index g0 = dim_ == 1 ? g : g / grid_;
    pts(g, 0) = (static_cast<double>(g0) + 0.5) * lengths_[0] / grid_;
    if (dim_ == 2) pts(g, 1) = (static_cast<double>(g % grid_) + 0.5) * lengths_[1] / grid_;
  }
  return pts;
}

std::array<int, 2> SpectralBasis::mode_index(Index k) const {
  if (dim_ == 1) return {static_cast<int>(k), 0};
  return {static_cast<int>(k / modes_), static_cast<int>(k % modes_)};
}

double SpectralBasis::sup_norm_sq(Index k) const {
  const auto idx = mode_index(k);
  double s = 1.0;
  for (int a = 0; a < dim_; ++a) s *= idx[a] == 0 ? 1.0 / lengths_[a] : 2.0 / lengths_[a];
  return s;
}

Matrix SpectralBasis::to_grid(const Matrix& coeffs, const Matrix& op0, const Matrix& op1) const {
  if (coeffs.cols() != num_modes_) throw ShapeError("coefficient array has wrong mode count");
  if (dim_ == 1) return coeffs * op0.transpose();
  Matrix out(coeffs.rows(), num_points_);
  for (Index r = 0; r < coeffs.rows(); ++r) {
    ConstRowMap k(coeffs.row(r).data(), modes_, modes_);
    RowMap u(out.row(r).data(), grid_, grid_);
    u.noalias() = op0 * k * op1.transpose();
  }
  return out;
}

Matrix SpectralBasis::to_modes(const Matrix& fields, const Matrix& op0, const Matrix& op1) const {
  if (fields.cols() != num_points_) throw ShapeError("grid field has wrong point count");
  if (dim_ == 1) return cell_weight_ * (fields * op0);
  Matrix out(fields.rows(), num_modes_);
  for (Index r = 0; r < fields.rows(); ++r) {
    ConstRowMap f(fields.row(r).data(), grid_, grid_);
    RowMap k(out.row(r).data(), modes_, modes_);
    k.noalias() = cell_weight_ * (op0.transpose() * f * op1);
  }
  return out;
}

Matrix SpectralBasis::project(const Matrix& fields) const {
  return to_modes(fields, cos_[0], cos_[dim_ - 1]);
}

Matrix SpectralBasis::synthesize(const Matrix& coeffs) const {
  return to_grid(coeffs, cos_[0], cos_[dim_ - 1]);
}

std::vector<Matrix> SpectralBasis::gradient(const Matrix& coeffs) const {
  std::vector<Matrix> grad;
  if (dim_ == 1) {
    grad.push_back(to_grid(coeffs, dcos_[0], dcos_[0]));
  } else {
    grad.push_back(to_grid(coeffs, dcos_[0], cos_[1]));
    grad.push_back(to_grid(coeffs, cos_[0], dcos_[1]));
  }
  return grad;
}

Matrix SpectralBasis::weak_divergence(const std::vector<Matrix>& flux) const {
  if (static_cast<int>(flux.size()) != dim_) throw ShapeError("need one flux component per axis");
  if (dim_ == 1) return -to_modes(flux[0], dcos_[0], dcos_[0]);
  Matrix out = to_modes(flux[0], dcos_[0], cos_[1]);
  out += to_modes(flux[1], cos_[0], dcos_[1]);
  return -out;
}

Vector SpectralBasis::mode_samples(Index k) const {
  if (k < 0 || k >= num_modes_) throw ShapeError("mode index out of range");
  Matrix unit = Matrix::Zero(1, num_modes_);
  unit(0, k) = 1.0;
  return synthesize(unit).row(0).transpose();
}

void write_field_csv(const SpectralBasis& basis, const Matrix& fields,
                     const std::filesystem::path& path) {
  if (fields.cols() != basis.num_points()) throw ShapeError("grid field has wrong point count");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  out << "x0";
  if (basis.dim() == 2) out << ",x1";
  for (Index r = 0; r < fields.rows(); ++r) out << ",u" << r;
  out << '\n';
  const Matrix pts = basis.points();
  char buf[32];
  for (Index g = 0; g < basis.num_points(); ++g) {
    for (int a = 0; a < basis.dim(); ++a) {
      std::snprintf(buf, sizeof buf, "%.17g", pts(g, a));
      out << (a ? "," : "") << buf;
    }
    for (Index r = 0; r < fields.rows(); ++r) {
      std::snprintf(buf, sizeof buf, "%.17g", fields(r, g));
      out << ',' << buf;
    }
    out << '\n';
  }
}

}  // namespace skt
