#include <doctest.h>

#include "stheta/polyalg.hpp"

#include <Eigen/LU>

#include <random>

using namespace stheta;
using Q = Rational;

namespace {

ExactPoly var(int m, int n, int i, int j) { return ExactPoly::variable(m, n, i, j); }
ExactPoly cst(int m, int n, Q q, int pi_pow = 0) { return ExactPoly::constant(m, n, pi_scalar<GaussRational>(q, pi_pow)); }

CMatrix<GaussRational> gq(const QMatrix& a) { return coeff_matrix<GaussRational>(a); }

QMatrix qmat(std::initializer_list<std::initializer_list<long long>> rows) {
  QMatrix a(rows.size(), rows.begin()->size());
  int i = 0;
  for (auto r : rows) {
    int j = 0;
    for (auto v : r) a(i, j++) = Q(v);
    ++i;
  }
  return a;
}

ExactPoly random_poly(std::mt19937_64& rng, int m, int n, int max_deg, int nterms) {
  std::uniform_int_distribution<int> coef(-5, 5), var_pick(0, m * n - 1), deg_pick(0, max_deg);
  ExactPoly p(m, n);
  for (int t = 0; t < nterms; ++t) {
    Monomial mono{std::vector<std::uint16_t>(std::size_t(m) * n, 0), 0};
    const int d = deg_pick(rng);
    for (int k = 0; k < d; ++k) mono.exps[var_pick(rng)] += 1;
    p.add_term(mono, GaussRational(Q(coef(rng)), Q(coef(rng))));
  }
  return p;
}

QMatrix random_symmetric_invertible(std::mt19937_64& rng, int m) {
  std::uniform_int_distribution<int> d(-3, 3);
  while (true) {
    QMatrix a(m, m);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j <= i; ++j) a(i, j) = a(j, i) = Q(d(rng));
    try {
      (void)inverse(a);
      return a;
    } catch (const std::domain_error&) {
    }
  }
}

const double kPi = std::numbers::pi;

}  // namespace

TEST_CASE("evaluation") {
  const auto u = var(1, 1, 0, 0);
  CHECK(evaluate(u * u, Eigen::MatrixXcd::Constant(1, 1, 3.0)) == std::complex<double>(9.0));
  const ExactPoly det = var(2, 2, 0, 0) * var(2, 2, 1, 1) - var(2, 2, 0, 1) * var(2, 2, 1, 0);
  CHECK(evaluate(det, Eigen::MatrixXcd::Identity(2, 2)) == std::complex<double>(1.0));
  QMatrix b = QMatrix::Zero(2, 2);
  b(1, 1) = Q(-4);
  const ExactExpPoly g(ExactPoly::one(2, 1), gq(b), 1);
  CHECK(std::abs(evaluate(g, Eigen::MatrixXcd::Zero(2, 1)) - 1.0) < 1e-15);
  Eigen::MatrixXcd pt(2, 1);
  pt << 0.0, 0.5;
  CHECK(std::abs(evaluate(g, pt) - std::exp(-kPi)) < 1e-15);
  CHECK_THROWS_AS(evaluate(u, Eigen::MatrixXcd::Zero(2, 1)), std::invalid_argument);
}

TEST_CASE("partial derivatives") {
  const auto u = var(1, 1, 0, 0);
  CHECK(partial(u * u, 0, 0) == u.scaled(GaussRational(2)));
  const ExactPoly det = var(2, 2, 0, 0) * var(2, 2, 1, 1) - var(2, 2, 0, 1) * var(2, 2, 1, 0);
  CHECK(partial(det, 0, 0) == var(2, 2, 1, 1));
  CHECK_THROWS_AS(partial(det, 2, 0), std::invalid_argument);

  QMatrix b(1, 1);
  b(0, 0) = Q(-4);
  const ExactExpPoly g(ExactPoly::one(1, 1), gq(b), 1);
  const ExactExpPoly dg = partial(g, 0, 0);
  CHECK(dg.poly() == u.scaled(pi_scalar<GaussRational>(Q(-8), 1)));
  CHECK(dg.b_pi_pow() == 1);
}

TEST_CASE("Euler operator") {
  const auto u = var(1, 1, 0, 0);
  CHECK(euler_entry(u * u, 0, 0) == (u * u).scaled(GaussRational(2)));
  const ExactPoly det = var(2, 2, 0, 0) * var(2, 2, 1, 1) - var(2, 2, 0, 1) * var(2, 2, 1, 0);
  CHECK(euler_entry(det, 0, 1).is_zero());
  CHECK(euler_entry(det, 0, 0) == det);

  QMatrix b = QMatrix::Zero(2, 2);
  b(1, 1) = Q(-4);
  const ExactExpPoly g(ExactPoly::one(2, 1), gq(b), 1);
  const auto u2 = var(2, 1, 1, 0);
  CHECK(euler_entry(g, 0, 0).poly() == (u2 * u2).scaled(pi_scalar<GaussRational>(Q(-8), 1)));
}

TEST_CASE("Laplace operator") {
  const auto u = var(1, 1, 0, 0);
  CHECK(trace_laplace(u * u, gq(qmat({{1}}))) == cst(1, 1, 2));
  CHECK(trace_laplace(u * u, gq(inverse(qmat({{2}})))) == cst(1, 1, 1));
  const ExactPoly det = var(2, 2, 0, 0) * var(2, 2, 1, 1) - var(2, 2, 0, 1) * var(2, 2, 1, 0);
  CHECK(trace_laplace(det, gq(QMatrix::Identity(2, 2))).is_zero());

  std::mt19937_64 rng(7);
  for (int t = 0; t < 5; ++t) {
    const auto p = random_poly(rng, 3, 2, 4, 6);
    const auto ainv = gq(inverse(random_symmetric_invertible(rng, 3)));
    CHECK(laplace_entry(p, ainv, 0, 1) == laplace_entry(p, ainv, 1, 0));
  }
}

TEST_CASE("operator exponentials") {
  const auto u = var(1, 1, 0, 0);
  const auto id = gq(qmat({{1}}));
  CHECK(exp_trace_laplace(u * u, id, pi_scalar<GaussRational>(Q(-1, 8), -1)) == u * u - cst(1, 1, Q(1, 4), -1));

  std::mt19937_64 rng(11);
  for (int t = 0; t < 4; ++t) {
    const int m = 2, n = 2;
    const auto p = random_poly(rng, m, n, 6, 8);
    const QMatrix a = random_symmetric_invertible(rng, m);
    const auto ainv = gq(inverse(a));
    const auto c = pi_scalar<GaussRational>(Q(-1, 8), -1);
    const auto minus_c = pi_scalar<GaussRational>(Q(1, 8), -1);
    // group law
    CHECK(exp_trace_laplace(exp_trace_laplace(p, ainv, minus_c), ainv, c) == p);
    const auto c2 = pi_scalar<GaussRational>(Q(3, 5), -1);
    CHECK(exp_trace_laplace(exp_trace_laplace(p, ainv, c), ainv, c2) ==
          exp_trace_laplace(p, ainv, pi_scalar<GaussRational>(Q(-1, 8) + Q(3, 5), -1)));

    // scaling U -> aU
    const auto two_i = gq(QMatrix::Identity(m, m) * Q(2));
    const auto id_n = gq(QMatrix::Identity(n, n));
    const auto pa = substitute_linear(p, two_i, id_n);
    CHECK(exp_trace_laplace(pa, ainv, c) ==
          substitute_linear(exp_trace_laplace(p, ainv, pi_scalar<GaussRational>(Q(-4, 8), -1)), two_i, id_n));

    // U -> UN
    QMatrix nq(2, 2);
    nq << Q(1), Q(2), Q(-1, 2), Q(3);
    const auto nm = gq(nq);
    const auto id_m = gq(QMatrix::Identity(m, m));
    const auto pn = substitute_linear(p, id_m, nm);
    const QMatrix ntn = nq.transpose() * nq;
    CHECK(exp_trace_laplace(pn, ainv, c) == substitute_linear(exp_weighted_laplace(p, ainv, gq(ntn), c), id_m, nm));

    // U -> MU replaces A^{-1} by M A^{-1} M^T
    QMatrix mq(2, 2);
    mq << Q(2), Q(1), Q(0), Q(-1, 3);
    const auto mm = gq(mq);
    const QMatrix new_inv = mq * inverse(a) * mq.transpose();
    CHECK(exp_trace_laplace(substitute_linear(p, mm, id_n), ainv, c) ==
          substitute_linear(exp_trace_laplace(p, gq(new_inv), c), mm, id_n));
  }
}

TEST_CASE("linear substitution") {
  const ExactPoly det = var(2, 2, 0, 0) * var(2, 2, 1, 1) - var(2, 2, 0, 1) * var(2, 2, 1, 0);
  QMatrix n = QMatrix::Zero(2, 2);
  n(0, 0) = Q(2);
  n(1, 1) = Q(3);
  CHECK(substitute_linear(det, gq(QMatrix::Identity(2, 2)), gq(n)) == det.scaled(GaussRational(6)));
  const auto u = var(1, 1, 0, 0);
  CHECK(substitute_linear(u, gq(qmat({{2}})), gq(qmat({{1}}))) == u.scaled(GaussRational(2)));
  CHECK_THROWS_AS(substitute_linear(u, gq(QMatrix::Identity(2, 2)), gq(qmat({{1}}))), std::invalid_argument);
}

TEST_CASE("Vigneras operator on small examples") {
  const auto u = var(1, 1, 0, 0);
  const auto ainv = gq(inverse(qmat({{2}})));
  const auto f = exp_trace_laplace(u * u, ainv, pi_scalar<GaussRational>(Q(-1, 8), -1));
  CHECK(max_norm(vigneras_defect(f, ainv, 2)) == 0.0);

  QMatrix b = QMatrix::Zero(2, 2);
  b(1, 1) = Q(-4);
  const ExactExpPoly g(ExactPoly::one(2, 1), gq(b), 1);
  const auto ainv2 = gq(inverse(qmat({{2, 0}, {0, -2}})));
  CHECK(vigneras_defect(g, ainv2, -1)(0, 0).is_zero());
  CHECK_FALSE(vigneras_defect(g, ainv2, 0)(0, 0).is_zero());

  CHECK(max_norm(vigneras_defect(ExactPoly::one(2, 2), gq(QMatrix::Identity(2, 2)), 0)) == 0.0);
  const auto u11 = var(2, 2, 0, 0);
  CHECK(max_norm(vigneras_defect(u11, gq(QMatrix::Identity(2, 2)), 1)) > 0.0);
}

TEST_CASE("homogeneity degree") {
  const ExactPoly det = var(2, 2, 0, 0) * var(2, 2, 1, 1) - var(2, 2, 0, 1) * var(2, 2, 1, 0);
  CHECK(homogeneity_degree(det) == 1);
  CHECK_FALSE(homogeneity_degree(var(2, 2, 0, 0)).has_value());
  CHECK(homogeneity_degree(ExactPoly::one(3, 2)) == 0);
  CHECK_FALSE(homogeneity_degree(ExactPoly(2, 2)).has_value());
  CHECK(homogeneity_degree(det.cast<std::complex<double>>()) == 1);
}

TEST_CASE("basis of homogeneous polynomials") {
  const auto b22 = basis_homopol(2, 2, 1);
  REQUIRE(b22.size() == 1);
  const ExactPoly det = var(2, 2, 0, 0) * var(2, 2, 1, 1) - var(2, 2, 0, 1) * var(2, 2, 1, 0);
  CHECK((b22[0] == det || b22[0] == -det));
  CHECK(basis_homopol(2, 1, 2).size() == 3);
  CHECK(basis_homopol(1, 2, 1).empty());
  CHECK(basis_homopol(3, 2, 0).size() == 1);
  CHECK_THROWS_AS(basis_homopol(3, 3, 4, 100), ResourceLimitError);

  std::mt19937_64 rng(3);
  std::normal_distribution<double> nd;
  for (auto [m, n, alpha] : {std::tuple{3, 2, 1}, {3, 2, 2}, {2, 2, 3}, {3, 1, 3}, {4, 2, 1}}) {
    const auto basis = basis_homopol(m, n, alpha);
    const auto minors = minor_products(m, n, alpha);
    std::vector<ExactPoly> both = basis;
    both.insert(both.end(), minors.begin(), minors.end());
    CHECK(span_rank(basis) == basis.size());
    CHECK(span_rank(minors) == basis.size());
    CHECK(span_rank(both) == basis.size());
    for (const auto& p : basis) {
      CHECK(homogeneity_degree(p) == alpha);
      const FloatPoly pf = p.cast<std::complex<double>>();
      for (int t = 0; t < 5; ++t) {
        Eigen::MatrixXcd nmat(n, n);
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) nmat(i, j) = {nd(rng), nd(rng)};
        const FloatPoly lhs = substitute_linear(pf, Eigen::MatrixXcd::Identity(m, m).eval(), nmat);
        const FloatPoly rhs = pf.scaled(std::pow(nmat.determinant(), alpha));
        CHECK(coefficient_norm(lhs - rhs) <= 1e-12 * coefficient_norm(rhs));
      }
    }
  }
}

TEST_CASE("commutator with powers of the Laplacian") {
  const auto u = var(1, 1, 0, 0);
  const auto id = gq(qmat({{1}}));
  const auto p = u * u;
  CHECK(euler_entry(trace_laplace(p, id), 0, 0) - trace_laplace(euler_entry(p, 0, 0), id) == cst(1, 1, -4));

  std::mt19937_64 rng(5);
  for (int t = 0; t < 3; ++t) {
    const auto q = random_poly(rng, 2, 2, 6, 6);
    const auto ainv = gq(inverse(random_symmetric_invertible(rng, 2)));
    ExactPoly lap_prev = q;  // trDelta^{k-1} q
    for (int k = 1; k <= 3; ++k) {
      const ExactPoly lap_k = trace_laplace(lap_prev, ainv);
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
          ExactPoly e_then = euler_entry(q, i, j);
          for (int r = 0; r < k; ++r) e_then = trace_laplace(e_then, ainv);
          const ExactPoly lhs = euler_entry(lap_k, i, j) - e_then;
          CHECK(lhs == laplace_entry(lap_prev, ainv, i, j).scaled(GaussRational(-2 * k)));
        }
      lap_prev = lap_k;
    }
  }
}

TEST_CASE("solutions with a Gaussian factor for A = -I") {
  for (auto [m, n, beta] : {std::tuple{1, 1, 0}, {1, 1, 1}, {2, 1, 2}, {2, 2, 1}}) {
    const auto id = gq(QMatrix::Identity(m, m));
    const auto minus_id = gq(QMatrix(-QMatrix::Identity(m, m)));
    for (const auto& p : basis_homopol(m, n, beta)) {
      const auto poly = exp_trace_laplace(p, id, pi_scalar<GaussRational>(Q(-1, 8), -1));
      const ExactExpPoly f(poly, gq(QMatrix(-QMatrix::Identity(m, m) * Q(2))), 1);
      CHECK(max_norm(vigneras_defect(f, minus_id, -(beta + m))) == 0.0);
    }
  }
}

TEST_CASE("float coefficients fold powers of pi") {
  const auto u = var(1, 1, 0, 0);
  const FloatPoly f = exp_trace_laplace(u * u, gq(qmat({{1}})), pi_scalar<GaussRational>(Q(-1, 8), -1))
                          .cast<std::complex<double>>();
  CHECK(f.size() == 2);
  for (const auto& [mono, c] : f.terms()) {
    CHECK(mono.pi_pow == 0);
    if (mono.degree() == 0) CHECK(std::abs(c + 1.0 / (4 * kPi)) < 1e-15);
  }
  CompiledPoly cp(f);
  std::vector<double> scratch;
  const double x = 0.7;
  CHECK(std::abs(cp(&x, scratch) - (x * x - 1.0 / (4 * kPi))) < 1e-15);
}
