#include "stheta/siegel.hpp"

#include <Eigen/LU>

#include <sstream>

namespace stheta {

std::complex<double> e_of(const Rational& q) {
  const double f = to_double(frac(q));
  return {std::cos(2 * std::numbers::pi * f), std::sin(2 * std::numbers::pi * f)};
}

SiegelPoint::SiegelPoint(Eigen::MatrixXd x, Eigen::MatrixXd y) : x_(std::move(x)), y_(std::move(y)) {
  if (x_.rows() == 0 || x_.rows() != x_.cols() || y_.rows() != x_.rows() || y_.cols() != x_.cols())
    throw std::invalid_argument("Siegel point needs square X and Y of the same size");
  const double sx = std::max(1.0, x_.cwiseAbs().maxCoeff());
  const double sy = std::max(1.0, y_.cwiseAbs().maxCoeff());
  if ((x_ - x_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * sx) throw std::invalid_argument("X must be symmetric");
  if ((y_ - y_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * sy) throw std::invalid_argument("Y must be symmetric");
  x_ = 0.5 * (x_ + x_.transpose());
  y_ = 0.5 * (y_ + y_.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(y_, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success || !(es.eigenvalues().minCoeff() > 0))
    throw std::domain_error("Y must be positive definite");
}

SiegelPoint SiegelPoint::from_complex(const Eigen::MatrixXcd& z) { return SiegelPoint(z.real(), z.imag()); }

SiegelPoint SiegelPoint::i_identity(int n) {
  return SiegelPoint(Eigen::MatrixXd::Zero(n, n), Eigen::MatrixXd::Identity(n, n));
}

Eigen::MatrixXcd SiegelPoint::z() const {
  Eigen::MatrixXcd z(x_.rows(), x_.cols());
  z.real() = x_;
  z.imag() = y_;
  return z;
}

SymplecticMatrix::SymplecticMatrix(IntMatrix m) : m_(std::move(m)) {
  if (m_.rows() == 0 || m_.rows() != m_.cols() || m_.rows() % 2 != 0)
    throw std::invalid_argument("symplectic matrix must be 2n x 2n");
  const int n = genus();
  IntMatrix j = IntMatrix::Zero(2 * n, 2 * n);
  j.topRightCorner(n, n) = -IntMatrix::Identity(n, n);
  j.bottomLeftCorner(n, n) = IntMatrix::Identity(n, n);
  if (m_.transpose() * j * m_ != j) throw std::invalid_argument("matrix is not symplectic (M^T J M != J)");
}

SymplecticMatrix SymplecticMatrix::from_blocks(const IntMatrix& a, const IntMatrix& b, const IntMatrix& c,
                                               const IntMatrix& d) {
  const Eigen::Index n = a.rows();
  for (const IntMatrix* blk : {&a, &b, &c, &d})
    if (blk->rows() != n || blk->cols() != n) throw std::invalid_argument("symplectic blocks must all be n x n");
  IntMatrix m(2 * n, 2 * n);
  m << a, b, c, d;
  return SymplecticMatrix(m);
}

SymplecticMatrix SymplecticMatrix::translation(const IntMatrix& s) {
  const Eigen::Index n = s.rows();
  return from_blocks(IntMatrix::Identity(n, n), s, IntMatrix::Zero(n, n), IntMatrix::Identity(n, n));
}

SymplecticMatrix SymplecticMatrix::inversion(int n) {
  return from_blocks(IntMatrix::Zero(n, n), -IntMatrix::Identity(n, n), IntMatrix::Identity(n, n),
                     IntMatrix::Zero(n, n));
}

SiegelPoint act(const SymplecticMatrix& m, const SiegelPoint& z) {
  if (m.genus() != z.genus()) throw std::invalid_argument("genus mismatch in symplectic action");
  const Eigen::MatrixXcd zc = z.z();
  const Eigen::MatrixXcd num = m.a().cast<std::complex<double>>() * zc + m.b().cast<std::complex<double>>();
  const Eigen::MatrixXcd den = m.c().cast<std::complex<double>>() * zc + m.d().cast<std::complex<double>>();
  Eigen::FullPivLU<Eigen::MatrixXcd> lu(den);
  if (!lu.isInvertible()) throw std::domain_error("CZ + D is singular");
  // W = num * den^{-1}; solve den^T W^T = num^T.
  Eigen::MatrixXcd w = den.transpose().fullPivLu().solve(num.transpose()).transpose();
  w = 0.5 * (w + w.transpose());
  SiegelPoint out = SiegelPoint::from_complex(w);
#ifndef NDEBUG
  if (imaginary_part_residual(m, z, out) > 1e-8) throw std::logic_error("imaginary part relation violated");
#endif
  return out;
}

double imaginary_part_residual(const SymplecticMatrix& m, const SiegelPoint& z, const SiegelPoint& w) {
  const Eigen::MatrixXcd c = m.c().cast<std::complex<double>>();
  const Eigen::MatrixXcd d = m.d().cast<std::complex<double>>();
  const Eigen::MatrixXcd zc = z.z();
  const Eigen::MatrixXcd lhs = (c * zc.conjugate() + d).transpose() * w.y().cast<std::complex<double>>() * (c * zc + d);
  return (lhs - z.y().cast<std::complex<double>>()).norm() / std::max(1.0, z.y().norm());
}

std::complex<double> scalar_power(std::complex<double> z, const Rational& r) {
  if (r == 0) return 1.0;
  if (z == std::complex<double>(0.0)) throw std::domain_error("power of zero");
  // Integer exponents of exactly representable values stay exact.
  if (denominator(r) == 1 && abs(numerator(r)) <= 64) return std::pow(z, numerator(r).convert_to<int>());
  return std::exp(to_double(r) * std::log(z));
}

std::complex<double> det_power(const Eigen::MatrixXcd& w, const Rational& rho) {
  if (w.rows() != w.cols()) throw std::invalid_argument("det_power needs a square matrix");
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(w, false);
  if (es.info() != Eigen::Success) throw std::domain_error("eigenvalue computation failed");
  std::complex<double> logsum = 0;
  const double scale = std::max(1.0, w.norm());
  for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) {
    const std::complex<double> mu = es.eigenvalues()(k);
    if (std::abs(mu.imag()) <= 1e-13 * scale && mu.real() <= 1e-13 * scale) {
      std::ostringstream os;
      os << "eigenvalue " << mu << " lies on the branch cut of the principal logarithm";
      throw std::domain_error(os.str());
    }
    logsum += std::log(mu);
  }
  if (rho == 0) return 1.0;
  return std::exp(to_double(rho) * logsum);
}

}  // namespace stheta
