#include <doctest.h>

#include "stheta/quadform.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <random>
#include <set>

using namespace stheta;

namespace {

IntMatrix imat(std::initializer_list<std::initializer_list<long long>> rows) {
  IntMatrix a(rows.size(), rows.begin()->size());
  int i = 0;
  for (auto r : rows) {
    int j = 0;
    for (auto v : r) a(i, j++) = v;
    ++i;
  }
  return a;
}

IntMatrix random_form(std::mt19937_64& rng, int m, long long max_det) {
  std::uniform_int_distribution<int> d(-3, 3);
  while (true) {
    IntMatrix a(m, m);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j <= i; ++j) a(i, j) = a(j, i) = d(rng);
    const BigInt det = exact_determinant(a);
    if (det != 0 && abs(det) <= max_det) return a;
  }
}

}  // namespace

TEST_CASE("exact determinant and predicates") {
  const IntMatrix e8 = fixture_form("e8");
  CHECK(exact_determinant(e8) == 1);
  CHECK(is_even(e8));
  CHECK(is_unimodular(e8));
  CHECK(is_even(imat({{2}})));
  CHECK_FALSE(is_unimodular(imat({{2}})));
  CHECK(is_even(imat({{0, 1}, {1, 0}})));
  CHECK(is_unimodular(imat({{0, 1}, {1, 0}})));
  CHECK(exact_determinant(fixture_form("d4")) == 4);
  CHECK(exact_determinant(imat({{0, 1, 0}, {1, 0, 0}, {0, 0, 3}})) == -3);
  CHECK_THROWS_AS(QuadForm(imat({{1, 2}, {2, 4}})), std::invalid_argument);
  CHECK_THROWS_AS(QuadForm(imat({{1, 2}, {3, 4}})), std::invalid_argument);
}

TEST_CASE("fixtures") {
  CHECK(fixture_form("h2+e8").rows() == 10);
  CHECK(fixture_form("-e8") == IntMatrix(-fixture_form("e8")));
  CHECK(fixture_form("diag:2,-2") == imat({{2, 0}, {0, -2}}));
  CHECK_THROWS_AS(fixture_form("nope"), std::invalid_argument);
  CHECK_THROWS_AS(fixture_form("diag:2,x"), std::invalid_argument);
}

TEST_CASE("decomposition examples") {
  {
    const auto dec = decompose(QuadForm(imat({{1, 0}, {0, -1}})));
    CHECK(dec.r == 1);
    CHECK(dec.s == 1);
    CHECK(dec.aplus.isApprox(Eigen::Matrix2d(Eigen::Vector2d(1, 0).asDiagonal())));
    CHECK(dec.aminus.isApprox(Eigen::Matrix2d(Eigen::Vector2d(0, -1).asDiagonal())));
    CHECK(dec.majorant.isApprox(Eigen::Matrix2d::Identity()));
    CHECK(dec.exact.has_value());
  }
  {
    const auto dec = decompose(QuadForm(imat({{0, 1}, {1, 0}})));
    Eigen::Matrix2d ap, am;
    ap << 0.5, 0.5, 0.5, 0.5;
    am << -0.5, 0.5, 0.5, -0.5;
    CHECK((dec.aplus - ap).norm() < 1e-14);
    CHECK((dec.aminus - am).norm() < 1e-14);
    CHECK((dec.majorant - Eigen::Matrix2d::Identity()).norm() < 1e-14);
    CHECK(std::abs(std::abs(dec.S(0, 0)) - 1 / std::sqrt(2.0)) < 1e-14);
    REQUIRE(dec.exact.has_value());
    CHECK(dec.exact->majorant == QMatrix::Identity(2, 2));
    const auto [up, um] = project(dec, Eigen::Vector2d(1, 0));
    CHECK((up - Eigen::Vector2d(0.5, 0.5)).norm() < 1e-14);
    CHECK((um - Eigen::Vector2d(0.5, -0.5)).norm() < 1e-14);
  }
  {
    const auto dec = decompose(QuadForm(imat({{2}})));
    CHECK(std::abs(dec.S(0, 0) - 1 / std::sqrt(2.0)) < 1e-14);
    CHECK(dec.aminus.norm() == 0.0);
    CHECK(dec.majorant(0, 0) == 2.0);
  }
  {
    const auto dec = decompose(QuadForm(fixture_form("diag:2,2,-2")));
    REQUIRE(dec.exact.has_value());
    CHECK(dec.exact->majorant == QMatrix(QMatrix::Identity(3, 3) * Rational(2)));
  }
}

TEST_CASE("decomposition invariants on the fixture set") {
  std::vector<IntMatrix> forms = {imat({{2}}), fixture_form("diag:2,-2"), fixture_form("h2"), fixture_form("h2+h2"),
                                  fixture_form("e8"), fixture_form("diag:1,1,-1"), imat({{1, 2}, {2, 1}})};
  std::mt19937_64 rng(1);
  for (int t = 0; t < 5; ++t) forms.push_back(random_form(rng, 4, 200));
  for (const auto& a : forms) {
    const auto dec = decompose(QuadForm(a));
    CHECK(decomposition_defect(dec) < 1e-12);
    CHECK(dec.r + dec.s == a.rows());
    std::normal_distribution<double> nd;
    Eigen::MatrixXd u(a.rows(), 2);
    for (Eigen::Index i = 0; i < u.size(); ++i) u.data()[i] = nd(rng);
    const auto [up, um] = project(dec, u);
    const Eigen::MatrixXd ad = a.cast<double>();
    CHECK(((up + um) - u).norm() < 1e-12);
    CHECK(std::abs((up.transpose() * ad * up).trace() - (u.transpose() * dec.aplus * u).trace()) <
          1e-12 * (1 + u.squaredNorm() * ad.norm()));
    CHECK(std::abs((um.transpose() * ad * um).trace() - (u.transpose() * dec.aminus * u).trace()) <
          1e-12 * (1 + u.squaredNorm() * ad.norm()));
    const auto [upp, upm] = project(dec, up);
    CHECK((upp - up).norm() < 1e-12 * (1 + up.norm()));
    CHECK(upm.norm() < 1e-12 * (1 + up.norm()));
  }
  // A form whose positive projector is irrational stays in floating mode.
  CHECK_FALSE(decompose(QuadForm(imat({{1, 1}, {1, -1}}))).exact.has_value());
}

TEST_CASE("Smith normal form") {
  std::mt19937_64 rng(9);
  for (int t = 0; t < 20; ++t) {
    const IntMatrix a = random_form(rng, 4, 500);
    const SmithForm sf = smith_normal_form(a);
    CHECK(sf.u * a * sf.v == sf.d);
    CHECK(abs(exact_determinant(sf.u)) == 1);
    CHECK(abs(exact_determinant(sf.v)) == 1);
    for (int i = 0; i < 4; ++i) {
      CHECK(sf.d(i, i) > 0);
      if (i + 1 < 4) CHECK(sf.d(i + 1, i + 1) % sf.d(i, i) == 0);
      for (int j = 0; j < 4; ++j)
        if (i != j) CHECK(sf.d(i, j) == 0);
    }
  }
}

TEST_CASE("coset representatives") {
  const auto r1 = coset_reps(QuadForm(imat({{2}})), 1);
  REQUIRE(r1.size() == 2);
  CHECK(r1[0](0, 0) == 0);
  CHECK(r1[1](0, 0) == Rational(1, 2));
  CHECK(coset_reps(QuadForm(fixture_form("diag:2,-2")), 1).size() == 4);
  CHECK(coset_reps(QuadForm(fixture_form("e8")), 2).size() == 1);
  CHECK(coset_reps(QuadForm(fixture_form("diag:2,2")), 2).size() == 16);
  CHECK_THROWS_AS(coset_reps(QuadForm(fixture_form("diag:2,2")), 2, 10), ResourceLimitError);

  std::mt19937_64 rng(4);
  for (int t = 0; t < 5; ++t) {
    const IntMatrix a = random_form(rng, 3, 30);
    const QuadForm form(a);
    for (int n : {1, 2}) {
      const auto reps = coset_reps(form, n);
      BigInt expect = 1;
      for (int k = 0; k < n; ++k) expect *= abs(form.det());
      CHECK(BigInt(reps.size()) == expect);
      std::set<std::vector<Rational>> seen;
      for (const auto& j : reps) {
        const QMatrix aj = form.rational() * j;
        bool integral = true, reduced = true;
        for (Eigen::Index k = 0; k < aj.size(); ++k) integral = integral && denominator(aj.data()[k]) == 1;
        for (Eigen::Index k = 0; k < j.size(); ++k) reduced = reduced && j.data()[k] >= 0 && j.data()[k] < 1;
        CHECK(integral);
        CHECK(reduced);
        seen.insert(std::vector<Rational>(j.data(), j.data() + j.size()));
      }
      CHECK(seen.size() == reps.size());
    }
  }
}

TEST_CASE("lattice points: small examples") {
  const auto p1 = lattice_points(Eigen::MatrixXd::Identity(1, 1), Eigen::VectorXd::Zero(1), 4);
  CHECK(p1.size() == 5);
  CHECK(p1.front()[0] == -2);
  CHECK(p1.back()[0] == 2);
  CHECK(lattice_points(Eigen::MatrixXd::Identity(2, 2), Eigen::VectorXd::Zero(2), 1).size() == 5);
  const auto p3 = lattice_points(Eigen::MatrixXd::Constant(1, 1, 2.0), Eigen::VectorXd::Constant(1, 0.5), 2);
  REQUIRE(p3.size() == 2);
  CHECK(p3[0][0] == -1);
  CHECK(p3[1][0] == 0);
  CHECK(lattice_points(Eigen::MatrixXd::Identity(2, 2), Eigen::VectorXd::Zero(2), 0).size() == 1);
  CHECK_THROWS_AS(lattice_points(-Eigen::MatrixXd::Identity(2, 2), Eigen::VectorXd::Zero(2), 1), std::domain_error);
  CHECK_THROWS_AS(lattice_points(Eigen::MatrixXd::Identity(2, 2), Eigen::VectorXd::Zero(2), 100, 10), ResourceLimitError);
}

TEST_CASE("lattice points agree with brute force") {
  std::mt19937_64 rng(21);
  std::uniform_int_distribution<int> dim_pick(1, 4);
  std::uniform_real_distribution<double> unif(-1, 1), r2_pick(0, 25);
  for (int t = 0; t < 30; ++t) {
    const int d = dim_pick(rng);
    Eigen::MatrixXd b(d, d);
    for (Eigen::Index k = 0; k < b.size(); ++k) b.data()[k] = unif(rng);
    const Eigen::MatrixXd g = b * b.transpose() + 0.3 * Eigen::MatrixXd::Identity(d, d);
    Eigen::VectorXd c(d);
    for (int k = 0; k < d; ++k) c(k) = unif(rng);
    const double r2 = r2_pick(rng);
    const auto pts = lattice_points(g, c, r2);
    LatticeEnumerator en(g);
    // Box from the ellipsoid's bounding box: |y_i| <= sqrt(r2 * (G^-1)_ii).
    const Eigen::MatrixXd ginv = g.inverse();
    std::vector<long long> lo(d), hi(d);
    for (int k = 0; k < d; ++k) {
      const double w = std::sqrt(r2 * ginv(k, k)) + 1;
      lo[k] = static_cast<long long>(std::floor(-c(k) - w));
      hi[k] = static_cast<long long>(std::ceil(-c(k) + w));
    }
    std::set<std::vector<long long>> brute;
    std::vector<long long> x = lo;
    while (true) {
      if (en.quad_value(x, c) <= r2) brute.insert(x);
      int pos = d - 1;
      while (pos >= 0 && ++x[pos] > hi[pos]) x[pos] = lo[pos], --pos;
      if (pos < 0) break;
    }
    const std::set<std::vector<long long>> got(pts.begin(), pts.end());
    CHECK(got.size() == pts.size());
    CHECK(got == brute);
  }
}
