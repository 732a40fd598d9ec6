#include "skt/model.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace skt {

namespace {

bool close_rel(double x, double y, double tol) {
  return std::abs(x - y) <= tol * std::max(std::abs(x), std::abs(y));
}

}  // namespace

ModelParams ModelParams::with_solved_weights(Vector a0, Matrix a) {
  ModelParams p;
  p.n = static_cast<std::size_t>(a0.size());
  p.a0 = std::move(a0);
  p.a = std::move(a);
  if (p.a.rows() != static_cast<Index>(p.n) || p.a.cols() != static_cast<Index>(p.n)) {
    throw ShapeError("coefficient matrix a must be n x n");
  }
  auto pi = solve_detailed_balance(p.a);
  p.pi = pi ? *pi : Vector::Ones(static_cast<Index>(p.n));
  p.validate();
  return p;
}

void ModelParams::validate() const {
  const auto m = static_cast<Index>(n);
  if (n < 1) throw ConfigError("species count n must be >= 1");
  if (a0.size() != m) throw ShapeError("a0 must have length n");
  if (a.rows() != m || a.cols() != m) throw ShapeError("a must be n x n");
  if (pi.size() != m) throw ShapeError("pi must have length n");
  for (Index i = 0; i < m; ++i) {
    if (!(a0[i] > 0.0)) throw ConfigError("a_i0 must be strictly positive");
    if (!(pi[i] > 0.0)) throw ConfigError("entropy weights pi_i must be strictly positive");
    for (Index j = 0; j < m; ++j) {
      if (!(a(i, j) > 0.0)) {
        std::ostringstream msg;
        msg << "a_" << i + 1 << j + 1 << " must be strictly positive";
        throw ConfigError(msg.str());
      }
    }
  }
}

std::optional<Vector> solve_detailed_balance(const Matrix& a) {
  const Index n = a.rows();
  if (a.cols() != n) throw ShapeError("a must be square");
  if ((a.array() <= 0.0).any()) throw ConfigError("a must be strictly positive");

  // Kolmogorov: a reversible measure exists iff every 3-cycle product
  // matches its reverse. 2-cycles are trivially balanced.
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      for (Index k = j + 1; k < n; ++k) {
        const double forward = a(i, j) * a(j, k) * a(k, i);
        const double backward = a(j, i) * a(k, j) * a(i, k);
        if (!close_rel(forward, backward, kDetailedBalanceTol)) return std::nullopt;
      }
    }
  }

  Vector pi(n);
  pi[0] = 1.0;
  for (Index j = 1; j < n; ++j) pi[j] = a(0, j) / a(j, 0);
  return pi;
}

bool satisfies_detailed_balance(const Matrix& a, const Vector& pi) {
  const Index n = a.rows();
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      if (!close_rel(pi[i] * a(i, j), pi[j] * a(j, i), kDetailedBalanceTol)) return false;
    }
  }
  return true;
}

double alpha_detailed_balance(const Matrix& a) {
  const Index n = a.rows();
  double alpha = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < n; ++i) {
    double off = 0.0;
    for (Index j = 0; j < n; ++j) {
      if (j != i) off += a(i, j);
    }
    alpha = std::min(alpha, a(i, i) - off / 3.0);
  }
  return alpha;
}

double alpha_self_diffusion(const Matrix& a) {
  const Index n = a.rows();
  double alpha = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < n; ++i) {
    double off = 0.0;
    for (Index j = 0; j < n; ++j) {
      if (j != i) off += (a(i, j) + a(j, i)) - std::sqrt(a(i, j) * a(j, i));
    }
    alpha = std::min(alpha, a(i, i) - off / 3.0);
  }
  return alpha;
}

ConditionReport check_conditions(const ModelParams& p) {
  p.validate();
  ConditionReport r;
  r.detailed_balance = satisfies_detailed_balance(p.a, p.pi);
  if (r.detailed_balance) r.alpha1 = alpha_detailed_balance(p.a);
  r.alpha2 = alpha_self_diffusion(p.a);

  const auto n = static_cast<Index>(p.n);
  if (r.detailed_balance && *r.alpha1 > 0.0) {
    r.route = CoercivityRoute::detailed_balance;
    r.alpha = *r.alpha1;
    r.weights = p.pi;
  } else if (r.alpha2 > 0.0) {
    r.route = CoercivityRoute::self_diffusion;
    r.alpha = r.alpha2;
    r.weights = Vector::Ones(n);
  } else {
    r.route = CoercivityRoute::none;
    r.alpha = r.alpha2;
    r.weights = p.pi;
  }
  r.admissible = r.route != CoercivityRoute::none;
  return r;
}

Matrix eval_diffusion_matrix(const ModelParams& p, const Vector& u) {
  const Vector u2 = u.array().square();
  Matrix A = 2.0 * p.a.cwiseProduct(u * u.transpose());
  A.diagonal() += p.a0 + p.a * u2;
  return A;
}

Matrix eval_truncated_matrix(const ModelParams& p, const Vector& u) {
  const Vector u2 = u.array().square();
  const Vector up = u.cwiseMax(0.0);
  Matrix A = 2.0 * p.a.cwiseProduct(up * u.transpose());
  A.diagonal() += p.a0 + p.a * u2;
  return A;
}

double quadratic_form_gap(const ModelParams& p, const ConditionReport& report,
                          const Vector& u, const Vector& z) {
  const Vector& w = report.weights;
  const Matrix A = eval_diffusion_matrix(p, u);
  const Vector wz = w.cwiseProduct(z);
  const double form = wz.dot(A * z);
  const double bound = (w.array() * p.a0.array() * z.array().square()).sum() +
                       3.0 * report.alpha *
                           (w.array() * u.array().square() * z.array().square()).sum();
  return form - bound;
}

double quadratic_form_scale(const ModelParams& p, const ConditionReport& report,
                            const Vector& u, const Vector& z) {
  const Matrix A = eval_diffusion_matrix(p, u);
  const Vector wz = report.weights.cwiseProduct(z);
  return (wz * z.transpose()).cwiseProduct(A).cwiseAbs().sum();
}

double entropy_density(double s, double z) {
  if (z < 0.0) throw std::domain_error("entropy density requires z >= 0");
  if (s < 1.0) throw std::domain_error("entropy density requires s >= 1");
  if (s == 1.0) {
    if (z == 0.0) return 1.0;
    return z * (std::log(z) - 1.0) + 1.0;
  }
  return std::pow(z, s) / s;
}

double entropy(const ModelParams& p, const Matrix& fields, const Vector& quad_weights) {
  if (fields.rows() != static_cast<Index>(p.n) || fields.cols() != quad_weights.size()) {
    throw ShapeError("entropy: field and quadrature weights do not conform");
  }
  const Vector l2 = fields.array().square().matrix() * quad_weights;
  return 0.5 * p.pi.dot(l2);
}

}  // namespace skt
