#pragma once

// Integral symmetric forms, the A = A+ + A- splitting with majorant M = A+ - A-,
// discriminant cosets A^{-1} Z^{m x n} / Z^{m x n}, and pruned enumeration of
// lattice points in ellipsoids.

#include "stheta/rational.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace stheta {

/// Exact determinant by fraction-free (Bareiss) elimination.
BigInt exact_determinant(const IntMatrix& a);

class QuadForm {
 public:
  /// Throws std::invalid_argument unless a is square, symmetric and nonsingular.
  explicit QuadForm(IntMatrix a);

  int dim() const { return static_cast<int>(a_.rows()); }
  const IntMatrix& matrix() const { return a_; }
  const BigInt& det() const { return det_; }
  QMatrix rational() const { return to_rational(a_); }
  Eigen::MatrixXd real() const { return a_.cast<double>(); }

 private:
  IntMatrix a_;
  BigInt det_;
};

bool is_even(const IntMatrix& a);
bool is_unimodular(const IntMatrix& a);

/// Rational versions of the splitting, present only when the positive spectral
/// projector of A happens to be rational.
struct ExactSplitting {
  QMatrix proj_plus;  // orthogonal projector onto the positive eigenspace
  QMatrix aplus;
  QMatrix aminus;
  QMatrix majorant;
};

struct QuadFormDecomposition {
  IntMatrix a;
  int r = 0;
  int s = 0;
  Eigen::MatrixXd S;          // S^T A S = Iota, positive columns first
  Eigen::MatrixXd iota;       // diag(I_r, -I_s)
  Eigen::MatrixXd aplus;      // positive semidefinite, rank r
  Eigen::MatrixXd aminus;     // negative semidefinite, rank s
  Eigen::MatrixXd majorant;   // M = A+ - A-, positive definite
  Eigen::MatrixXd proj_plus;  // U+ = proj_plus * U
  std::optional<ExactSplitting> exact;

  int m() const { return static_cast<int>(a.rows()); }
  bool definite() const { return s == 0; }
  QMatrix rational() const { return to_rational(a); }
};

QuadFormDecomposition decompose(const QuadForm& form);

/// Largest violation of the decomposition invariants (for diagnostics and tests).
double decomposition_defect(const QuadFormDecomposition& dec);

/// (U+, U-) with U+ + U- = U.
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> project(const QuadFormDecomposition& dec, const Eigen::MatrixXd& u);

/// Smith normal form D = U A V, with D diagonal, d_1 | d_2 | ..., d_i > 0.
struct SmithForm {
  IntMatrix d;
  IntMatrix u;
  IntMatrix v;
};
SmithForm smith_normal_form(const IntMatrix& a);

inline constexpr std::size_t kDefaultCosetCap = 1u << 20;

/// Canonical representatives (entries in [0,1)) of A^{-1} Z^{m x n} / Z^{m x n}, sorted.
std::vector<QMatrix> coset_reps(const QuadForm& form, int n, std::size_t cap = kDefaultCosetCap);

/// Depth-first Fincke-Pohst enumeration of integer x with (x+c)^T G (x+c) <= R^2.
class LatticeEnumerator {
 public:
  /// Throws std::domain_error unless gram is symmetric positive definite.
  explicit LatticeEnumerator(const Eigen::MatrixXd& gram);

  int dim() const { return dim_; }
  const Eigen::MatrixXd& gram() const { return gram_; }
  /// Upper triangular R with R^T R = G.
  const Eigen::MatrixXd& cholesky_upper() const { return r_; }
  double sqrt_det() const { return sqrt_det_; }

  /// (x+c)^T G (x+c), evaluated the same way for enumeration and brute force.
  double quad_value(const std::vector<long long>& x, const Eigen::VectorXd& center) const;

  /// Range of the last coordinate over the ellipsoid (empty if lo > hi).
  std::pair<long long, long long> top_range(const Eigen::VectorXd& center, double r2) const;

  /// visit(x, q) for every point with the last coordinate fixed to top, in a deterministic order.
  template <class Visit>
  void enumerate_slice(const Eigen::VectorXd& center, double r2, long long top, Visit&& visit) const;

  /// visit(x, q) for every point; last coordinate outermost, ascending values at every level.
  template <class Visit>
  void enumerate(const Eigen::VectorXd& center, double r2, Visit&& visit) const {
    const auto [lo, hi] = top_range(center, r2);
    for (long long t = lo; t <= hi; ++t) enumerate_slice(center, r2, t, visit);
  }

 private:
  int dim_ = 0;
  Eigen::MatrixXd gram_;
  Eigen::MatrixXd r_;
  Eigen::MatrixXd mu_;  // mu(i, j) = R(i, j) / R(i, i) for j > i
  Eigen::VectorXd diag2_;
  double sqrt_det_ = 1;
};

/// All integer vectors (as in LatticeEnumerator::enumerate). Throws ResourceLimitError past cap.
std::vector<std::vector<long long>> lattice_points(const Eigen::MatrixXd& gram, const Eigen::VectorXd& center,
                                                   double r2, std::size_t cap = 100'000'000);

/// Named forms: "e8", "-e8", "h2", "a1", "a2", "d4", "diag:a,b,...", and block sums joined by '+'.
IntMatrix fixture_form(const std::string& name);
std::vector<std::string> fixture_names();

// ---------------------------------------------------------------------------

template <class Visit>
void LatticeEnumerator::enumerate_slice(const Eigen::VectorXd& center, double r2, long long top, Visit&& visit) const {
  if (center.size() != dim_) throw std::invalid_argument("lattice center has the wrong dimension");
  if (!(r2 >= 0)) return;
  const int d = dim_;
  const double slack = 1e-9 * (1.0 + r2);
  std::vector<long long> x(d, 0);
  std::vector<double> y(d, 0.0);       // x + center
  std::vector<double> partial(d + 1, 0.0);  // partial[i] = contribution of levels >= i
  std::vector<long long> hi(d, 0);

  // Computes the integer interval at level i given levels above; returns false if empty.
  auto bounds = [&](int i, long long& lo_out, long long& hi_out) {
    double shift = center(i);
    for (int j = i + 1; j < d; ++j) shift += mu_(i, j) * y[j];
    const double rem = r2 - partial[i + 1];
    if (rem < -slack) return false;
    const double w = std::sqrt(std::max(rem, 0.0) / diag2_(i)) + slack;
    lo_out = static_cast<long long>(std::ceil(-shift - w));
    hi_out = static_cast<long long>(std::floor(-shift + w));
    return lo_out <= hi_out;
  };
  auto level_value = [&](int i) {
    double t = y[i];
    for (int j = i + 1; j < d; ++j) t += mu_(i, j) * y[j];
    return diag2_(i) * t * t;
  };

  int i = d - 1;
  {
    long long lo, h;
    if (!bounds(i, lo, h) || top < lo || top > h) return;
    x[i] = top;
    y[i] = top + center(i);
    partial[i] = partial[i + 1] + level_value(i);
    hi[i] = top;
  }
  // Descend.
  while (true) {
    if (i == 0) {
      const double q = quad_value(x, center);
      if (q <= r2) visit(static_cast<const std::vector<long long>&>(x), q);
      // advance at level 0 (or climb)
      while (true) {
        if (i == d - 1) return;
        if (x[i] < hi[i]) {
          ++x[i];
          y[i] = x[i] + center(i);
          partial[i] = partial[i + 1] + level_value(i);
          break;
        }
        ++i;
      }
      continue;
    }
    --i;
    long long lo, h;
    if (bounds(i, lo, h)) {
      x[i] = lo;
      hi[i] = h;
      y[i] = lo + center(i);
      partial[i] = partial[i + 1] + level_value(i);
      continue;
    }
    // Empty interval: climb to the next level with room.
    ++i;
    while (true) {
      if (i == d - 1) return;
      if (x[i] < hi[i]) {
        ++x[i];
        y[i] = x[i] + center(i);
        partial[i] = partial[i + 1] + level_value(i);
        break;
      }
      ++i;
    }
  }
}

}  // namespace stheta
