#pragma once

// The Siegel upper half-space H_n, the symplectic action, symmetric square
// roots and branch-consistent powers z^r = exp(r log z), arg z in (-pi, pi].

#include "stheta/rational.hpp"

#include <Eigen/Core>
#include <Eigen/Eigenvalues>

#include <complex>
#include <numbers>
#include <stdexcept>

namespace stheta {

/// e(x) = exp(2 pi i x).
inline std::complex<double> e_of(std::complex<double> x) {
  return std::exp(std::complex<double>(0, 2 * std::numbers::pi) * x);
}

/// e(q) for rational q, reduced mod 1 first so the phase is accurate.
std::complex<double> e_of(const Rational& q);

class SiegelPoint {
 public:
  /// Throws std::invalid_argument on asymmetric input, std::domain_error if Y is not positive definite.
  SiegelPoint(Eigen::MatrixXd x, Eigen::MatrixXd y);
  static SiegelPoint from_complex(const Eigen::MatrixXcd& z);
  /// i * I_n.
  static SiegelPoint i_identity(int n);

  int genus() const { return static_cast<int>(x_.rows()); }
  const Eigen::MatrixXd& x() const { return x_; }
  const Eigen::MatrixXd& y() const { return y_; }
  Eigen::MatrixXcd z() const;

 private:
  Eigen::MatrixXd x_;
  Eigen::MatrixXd y_;
};

/// Symmetric positive definite square root through the eigendecomposition.
template <class Derived>
Eigen::MatrixXd sqrt_posdef(const Eigen::MatrixBase<Derived>& y) {
  const Eigen::MatrixXd a = y;
  if (a.rows() != a.cols()) throw std::invalid_argument("sqrt_posdef needs a square matrix");
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) throw std::invalid_argument("sqrt_posdef needs a symmetric matrix");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (a + a.transpose()));
  if (es.info() != Eigen::Success || es.eigenvalues().minCoeff() <= 0)
    throw std::domain_error("sqrt_posdef needs a positive definite matrix");
  Eigen::MatrixXd r = es.eigenvectors() * es.eigenvalues().cwiseSqrt().asDiagonal() * es.eigenvectors().transpose();
  return 0.5 * (r + r.transpose());
}

class SymplecticMatrix {
 public:
  /// Throws std::invalid_argument unless M^T J M = J exactly.
  explicit SymplecticMatrix(IntMatrix m);
  static SymplecticMatrix from_blocks(const IntMatrix& a, const IntMatrix& b, const IntMatrix& c, const IntMatrix& d);
  /// [[I, S], [0, I]] for integral symmetric S.
  static SymplecticMatrix translation(const IntMatrix& s);
  /// J = [[0, -I], [I, 0]].
  static SymplecticMatrix inversion(int n);

  int genus() const { return static_cast<int>(m_.rows() / 2); }
  const IntMatrix& matrix() const { return m_; }
  IntMatrix a() const { return m_.topLeftCorner(genus(), genus()); }
  IntMatrix b() const { return m_.topRightCorner(genus(), genus()); }
  IntMatrix c() const { return m_.bottomLeftCorner(genus(), genus()); }
  IntMatrix d() const { return m_.bottomRightCorner(genus(), genus()); }

  friend SymplecticMatrix operator*(const SymplecticMatrix& x, const SymplecticMatrix& y) {
    return SymplecticMatrix(x.m_ * y.m_);
  }

 private:
  IntMatrix m_;
};

/// M<Z> = (AZ + B)(CZ + D)^{-1}. Throws std::domain_error if CZ + D is singular.
SiegelPoint act(const SymplecticMatrix& m, const SiegelPoint& z);

/// || (C conj(Z) + D)^T Im(M<Z>) (C Z + D) - Y ||, relative to ||Y||.
double imaginary_part_residual(const SymplecticMatrix& m, const SiegelPoint& z, const SiegelPoint& w);

/// exp(r log z) with the principal logarithm. Throws std::domain_error at z = 0.
std::complex<double> scalar_power(std::complex<double> z, const Rational& r);

/// exp(rho * sum log mu_k) over the eigenvalues mu_k of W. Throws std::domain_error if an
/// eigenvalue lies on the closed negative real axis.
std::complex<double> det_power(const Eigen::MatrixXcd& w, const Rational& rho);

}  // namespace stheta
