#include "oracles.hpp"
#include "skt/model.hpp"

#include <doctest.h>

#include <numbers>

using namespace skt;

namespace {

Matrix mat2(double a, double b, double c, double d) {
  Matrix m(2, 2);
  m << a, b, c, d;
  return m;
}

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Index>(v.size()));
  Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

ModelParams params(Vector a0, Matrix a, Vector pi) {
  ModelParams p;
  p.n = static_cast<std::size_t>(a0.size());
  p.a0 = std::move(a0);
  p.a = std::move(a);
  p.pi = std::move(pi);
  return p;
}

}  // namespace

TEST_CASE("detailed balance solver on small cases") {
  auto pi = solve_detailed_balance(mat2(1, 2, 1, 1));
  REQUIRE(pi);
  CHECK((*pi)[0] == doctest::Approx(1.0));
  CHECK((*pi)[1] == doctest::Approx(2.0));

  Matrix sym(3, 3);
  sym << 1, 2, 3, 2, 1, 4, 3, 4, 1;
  pi = solve_detailed_balance(sym);
  REQUIRE(pi);
  CHECK((pi->array() - 1.0).abs().maxCoeff() < 1e-15);

  // a12 a23 a31 = 3*2*1 = 6 differs from a21 a32 a13 = 1*1*1.
  Matrix cyc(3, 3);
  cyc << 1, 3, 1, 1, 1, 2, 1, 1, 1;
  CHECK_FALSE(solve_detailed_balance(cyc));
  // No positive pi: the two pair equations through species 1 force pi2 = 3,
  // pi3 = 1, and then pi2 a23 = 6 != pi3 a32 = 1.
  CHECK(3.0 * cyc(1, 2) != doctest::Approx(1.0 * cyc(2, 1)));
}

TEST_CASE("detailed balance solver recovers random reversible measures") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const Index n = 2 + trial % 5;
    Vector pi(n);
    pi[0] = 1.0;
    for (Index i = 1; i < n; ++i) pi[i] = oracle::log_uniform(rng, 0.1, 10.0);
    const Matrix a = oracle::reversible_matrix(rng, pi, 0.01, 100.0);
    const auto got = solve_detailed_balance(a);
    REQUIRE(got);
    CHECK(((got->array() - pi.array()) / pi.array()).abs().maxCoeff() < 1e-12);
    for (Index i = 0; i < n; ++i) {
      for (Index j = 0; j < n; ++j) {
        CHECK(std::abs((*got)[i] * a(i, j) - (*got)[j] * a(j, i)) <= 1e-10 * (*got)[i] * a(i, j));
      }
    }
  }
}

TEST_CASE("coercivity constants") {
  SUBCASE("symmetric weak coupling") {
    const auto r = check_conditions(params(vec({1, 1}), mat2(1, 0.5, 0.5, 1), vec({1, 1})));
    CHECK(r.detailed_balance);
    REQUIRE(r.alpha1);
    CHECK(*r.alpha1 == doctest::Approx(5.0 / 6.0));
    // Symmetric pairs: (a_ij + a_ji) - sqrt(a_ij a_ji) = a_ij, so alpha2 = alpha1.
    CHECK(r.alpha2 == doctest::Approx(5.0 / 6.0));
    CHECK(r.admissible);
    CHECK(r.route == CoercivityRoute::detailed_balance);
    CHECK(r.alpha == doctest::Approx(5.0 / 6.0));
  }
  SUBCASE("single species") {
    Matrix a(1, 1);
    a << 2.5;
    const auto r = check_conditions(params(vec({1}), a, vec({1})));
    CHECK(*r.alpha1 == 2.5);
    CHECK(r.alpha2 == 2.5);
  }
  SUBCASE("strong symmetric coupling is inadmissible") {
    const auto r = check_conditions(params(vec({1, 1}), mat2(1, 4, 4, 1), vec({1, 1})));
    CHECK(*r.alpha1 == doctest::Approx(-1.0 / 3.0));
    CHECK(r.alpha2 == doctest::Approx(-1.0 / 3.0));
    CHECK_FALSE(r.admissible);
    CHECK(r.route == CoercivityRoute::none);
  }
  SUBCASE("non-reversible falls back to unit weights") {
    Matrix a(3, 3);
    a << 5, 0.3, 0.1, 0.1, 5, 0.2, 0.2, 0.1, 5;
    const auto p = ModelParams::with_solved_weights(vec({1, 1, 1}), a);
    CHECK((p.pi.array() == 1.0).all());
    const auto r = check_conditions(p);
    CHECK_FALSE(r.detailed_balance);
    CHECK_FALSE(r.alpha1);
    CHECK(r.admissible);
    CHECK(r.route == CoercivityRoute::self_diffusion);
    CHECK((r.weights.array() == 1.0).all());
  }
}

TEST_CASE("the doubled square root in the self-diffusion constant is too weak") {
  // With 2*sqrt the cross term of a = [[1,4],[4,1]] cancels and alpha2 would
  // be 1. The quadratic form then falls below the claimed bound.
  const auto p = params(vec({1, 1}), mat2(1, 4, 4, 1), vec({1, 1}));
  ConditionReport claimed;
  claimed.admissible = true;
  claimed.alpha = 1.0;
  claimed.weights = vec({1, 1});
  const Vector u = vec({1, 1});
  const Vector z = vec({1, -1});
  const Matrix A = eval_diffusion_matrix(p, u);
  CHECK(z.dot(A * z) == doctest::Approx(0.0));
  CHECK(quadratic_form_gap(p, claimed, u, z) == doctest::Approx(-8.0));
  CHECK(alpha_self_diffusion(p.a) < 0.0);
}

TEST_CASE("diffusion matrix evaluation") {
  const auto p = params(vec({1, 1}), mat2(1, 0.5, 0.5, 1), vec({1, 1}));
  const Matrix A = eval_diffusion_matrix(p, vec({1, 2}));
  CHECK(A(0, 0) == doctest::Approx(6.0));
  CHECK(A(0, 1) == doctest::Approx(2.0));
  CHECK(A(1, 0) == doctest::Approx(2.0));
  CHECK(A(1, 1) == doctest::Approx(13.5));

  const Matrix Z = eval_diffusion_matrix(p, vec({0, 0}));
  CHECK(Z(0, 0) == 1.0);
  CHECK(Z(0, 1) == 0.0);
  CHECK(Z(1, 1) == 1.0);

  Matrix a(1, 1);
  a << 2;
  CHECK(eval_diffusion_matrix(params(vec({1}), a, vec({1})), vec({1}))(0, 0) == doctest::Approx(7.0));
}

TEST_CASE("truncated diffusion matrix") {
  const auto p = params(vec({1, 1}), mat2(1, 0.5, 0.5, 1), vec({1, 1}));
  const Matrix T = eval_truncated_matrix(p, vec({-1, 2}));
  // Cross factor max(u_1, 0) = 0 removes row 1's 2 a_1j u_1 u_j terms.
  CHECK(T(0, 0) == doctest::Approx(4.0));
  CHECK(T(0, 1) == 0.0);
  CHECK(T(1, 0) == doctest::Approx(-2.0));
  CHECK(T(1, 1) == doctest::Approx(13.5));

  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> U(0.0, 5.0);
  for (int t = 0; t < 100; ++t) {
    const Vector u = vec({U(rng), U(rng)});
    CHECK((eval_truncated_matrix(p, u) - eval_diffusion_matrix(p, u)).cwiseAbs().maxCoeff() == 0.0);
  }
  const Matrix D = eval_truncated_matrix(p, vec({0, 0}));
  CHECK(D(0, 1) == 0.0);
  CHECK(D(0, 0) == 1.0);
}

TEST_CASE("weighted diffusion matrix is symmetric under detailed balance") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> U(-3.0, 3.0);
  for (int t = 0; t < 100; ++t) {
    const Index n = 2 + t % 4;
    Vector pi(n);
    pi[0] = 1.0;
    for (Index i = 1; i < n; ++i) pi[i] = oracle::log_uniform(rng, 0.1, 10.0);
    auto p = ModelParams::with_solved_weights(Vector::Ones(n), oracle::reversible_matrix(rng, pi, 0.1, 10.0));
    Vector u(n);
    for (Index i = 0; i < n; ++i) u[i] = U(rng);
    const Matrix PA = p.pi.asDiagonal() * eval_diffusion_matrix(p, u);
    for (Index i = 0; i < n; ++i) {
      for (Index j = 0; j < n; ++j) {
        CHECK(std::abs(PA(i, j) - PA(j, i)) <= 1e-12 * std::max(1.0, std::abs(PA(i, j))));
      }
    }
  }
}

TEST_CASE("quadratic form gap") {
  const auto p = params(vec({1, 1}), mat2(1, 0.5, 0.5, 1), vec({1, 1}));
  const auto r = check_conditions(p);
  CHECK(quadratic_form_gap(p, r, vec({1, 2}), vec({1, -1})) == doctest::Approx(1.0));
  CHECK(quadratic_form_gap(p, r, vec({1, 2}), vec({0, 0})) == 0.0);

  Matrix a(1, 1);
  a << 3.0;
  const auto p1 = params(vec({0.7}), a, vec({1}));
  const auto r1 = check_conditions(p1);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> U(-10.0, 10.0);
  for (int t = 0; t < 100; ++t) {
    const Vector u = vec({U(rng)});
    const Vector z = vec({U(rng)});
    CHECK(std::abs(quadratic_form_gap(p1, r1, u, z)) <= 1e-12 * quadratic_form_scale(p1, r1, u, z));
  }
}

TEST_CASE("entropy density") {
  CHECK(entropy_density(1.0, 1.0) == doctest::Approx(0.0));
  CHECK(entropy_density(2.0, 3.0) == doctest::Approx(4.5));
  CHECK(entropy_density(1.0, 0.0) == 1.0);
  CHECK_THROWS_AS(entropy_density(1.0, -0.1), std::domain_error);
}

TEST_CASE("entropy functional") {
  Matrix a = mat2(1, 0.5, 0.5, 1);
  const auto p = params(vec({1, 1}), a, vec({1, 2}));
  // Unit-volume domain sampled at 4 points.
  const Vector w = Vector::Constant(4, 0.25);
  CHECK(entropy(p, Matrix::Ones(2, 4), w) == doctest::Approx(1.5));
  CHECK(entropy(p, Matrix::Zero(2, 4), w) == 0.0);

  // cos x on (0, pi), midpoint rule on 64 points is exact for cos^2.
  Matrix one(1, 1);
  one << 1.0;
  const auto p1 = params(vec({1}), one, vec({1}));
  const int G = 64;
  Matrix u(1, G);
  for (int g = 0; g < G; ++g) u(0, g) = std::cos((g + 0.5) * std::numbers::pi / G);
  const Vector wg = Vector::Constant(G, std::numbers::pi / G);
  CHECK(entropy(p1, u, wg) == doctest::Approx(std::numbers::pi / 4).epsilon(1e-13));

  // Homogeneity: 1 in pi, 2 in u.
  auto scaled = p;
  scaled.pi *= 3.0;
  const Matrix v = Matrix::Random(2, 4);
  CHECK(entropy(scaled, v, w) == doctest::Approx(3.0 * entropy(p, v, w)).epsilon(1e-12));
  CHECK(entropy(p, 2.5 * v, w) == doctest::Approx(6.25 * entropy(p, v, w)).epsilon(1e-12));
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(params(vec({1, 0}), mat2(1, 1, 1, 1), vec({1, 1})).validate(), ConfigError);
  CHECK_THROWS_AS(params(vec({1, 1}), mat2(1, -1, 1, 1), vec({1, 1})).validate(), ConfigError);
  CHECK_THROWS_AS(params(vec({1, 1}), mat2(1, 1, 1, 1), vec({1})).validate(), ShapeError);
}
