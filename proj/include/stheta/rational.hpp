#pragma once

// Exact scalars: arbitrary precision rationals and Gaussian rationals, plus the
// Eigen glue needed to put them in dense matrices.

#include "stheta/errors.hpp"

#include <boost/multiprecision/gmp.hpp>

#include <Eigen/Core>

#include <complex>
#include <stdexcept>
#include <string>
#include <string_view>

namespace stheta {

using BigInt = boost::multiprecision::number<boost::multiprecision::gmp_int,
                                             boost::multiprecision::et_off>;
using Rational = boost::multiprecision::number<boost::multiprecision::gmp_rational,
                                               boost::multiprecision::et_off>;

/// Parses "p/q", "p" or a plain decimal such as "0.25" (converted exactly).
Rational parse_rational(std::string_view text);

/// Always "p/q" in lowest terms with q >= 1.
std::string to_string(const Rational& q);

inline double to_double(const Rational& q) { return q.convert_to<double>(); }

/// Representative of q modulo 1 in [0, 1).
Rational frac(const Rational& q);

BigInt floor_div(const BigInt& a, const BigInt& b);

/// a + bi with a, b rational.
struct GaussRational {
  Rational re;
  Rational im;

  GaussRational() = default;
  GaussRational(int v) : re(v) {}  // NOLINT: implicit, mirrors the scalar literals
  GaussRational(Rational r) : re(std::move(r)) {}  // NOLINT
  GaussRational(Rational r, Rational i) : re(std::move(r)), im(std::move(i)) {}

  bool is_zero() const { return re == 0 && im == 0; }
  GaussRational conj() const { return {re, -im}; }
  Rational norm() const { return re * re + im * im; }

  GaussRational& operator+=(const GaussRational& o) {
    re += o.re;
    im += o.im;
    return *this;
  }
  GaussRational& operator-=(const GaussRational& o) {
    re -= o.re;
    im -= o.im;
    return *this;
  }
  GaussRational& operator*=(const GaussRational& o) {
    Rational r = re * o.re - im * o.im;
    im = re * o.im + im * o.re;
    re = std::move(r);
    return *this;
  }
  GaussRational& operator/=(const GaussRational& o) {
    const Rational n = o.norm();
    if (n == 0) throw std::domain_error("division by zero Gaussian rational");
    *this *= o.conj();
    re /= n;
    im /= n;
    return *this;
  }

  friend GaussRational operator+(GaussRational a, const GaussRational& b) { return a += b; }
  friend GaussRational operator-(GaussRational a, const GaussRational& b) { return a -= b; }
  friend GaussRational operator*(GaussRational a, const GaussRational& b) { return a *= b; }
  friend GaussRational operator/(GaussRational a, const GaussRational& b) { return a /= b; }
  friend GaussRational operator-(const GaussRational& a) { return {-a.re, -a.im}; }
  friend bool operator==(const GaussRational& a, const GaussRational& b) {
    return a.re == b.re && a.im == b.im;
  }
  friend bool operator!=(const GaussRational& a, const GaussRational& b) { return !(a == b); }
};

}  // namespace stheta

namespace Eigen {

template <>
struct NumTraits<stheta::Rational> : GenericNumTraits<stheta::Rational> {
  typedef stheta::Rational Real;
  typedef stheta::Rational NonInteger;
  typedef stheta::Rational Nested;
  typedef stheta::Rational Literal;
  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = 8,
    AddCost = 64,
    MulCost = 128
  };
  static inline Real epsilon() { return 0; }
  static inline Real dummy_precision() { return 0; }
  static inline int digits10() { return 0; }
  static inline Real highest() { return 0; }
  static inline Real lowest() { return 0; }
};

template <>
struct NumTraits<stheta::GaussRational> : GenericNumTraits<stheta::GaussRational> {
  typedef stheta::GaussRational Real;
  typedef stheta::GaussRational NonInteger;
  typedef stheta::GaussRational Nested;
  typedef stheta::GaussRational Literal;
  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = 16,
    AddCost = 128,
    MulCost = 512
  };
  static inline Real epsilon() { return 0; }
  static inline Real dummy_precision() { return 0; }
  static inline int digits10() { return 0; }
  static inline Real highest() { return 0; }
  static inline Real lowest() { return 0; }
};

}  // namespace Eigen

namespace stheta {

inline std::complex<double> to_complex(const GaussRational& c) {
  return {to_double(c.re), to_double(c.im)};
}

/// Uniform access to the two coefficient fields used by the polynomial code:
/// exact Gaussian rationals and IEEE complex doubles.
template <class C>
struct CoeffOps;

template <>
struct CoeffOps<GaussRational> {
  static constexpr bool exact = true;
  static bool is_zero(const GaussRational& c) { return c.is_zero(); }
  static GaussRational from_int(long long v) { return GaussRational(Rational(v)); }
  static GaussRational from_rational(const Rational& q) { return GaussRational(q); }
  static std::complex<double> to_complex(const GaussRational& c) { return stheta::to_complex(c); }
  static double magnitude(const GaussRational& c) { return std::abs(to_complex(c)); }
};

template <>
struct CoeffOps<std::complex<double>> {
  static constexpr bool exact = false;
  static bool is_zero(const std::complex<double>& c) { return c == std::complex<double>(0.0); }
  static std::complex<double> from_int(long long v) { return {static_cast<double>(v), 0.0}; }
  static std::complex<double> from_rational(const Rational& q) { return {to_double(q), 0.0}; }
  static std::complex<double> to_complex(const std::complex<double>& c) { return c; }
  static double magnitude(const std::complex<double>& c) { return std::abs(c); }
};

template <class C>
using CMatrix = Eigen::Matrix<C, Eigen::Dynamic, Eigen::Dynamic>;
using QMatrix = CMatrix<Rational>;
using IntMatrix = Eigen::Matrix<long long, Eigen::Dynamic, Eigen::Dynamic>;

/// Rational matrix inverse by Gauss-Jordan elimination. Throws std::domain_error if singular.
QMatrix inverse(const QMatrix& a);

QMatrix to_rational(const IntMatrix& a);
Eigen::MatrixXd to_double(const QMatrix& a);

template <class C>
CMatrix<C> coeff_matrix(const QMatrix& a) {
  CMatrix<C> out(a.rows(), a.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) out(i, j) = CoeffOps<C>::from_rational(a(i, j));
  return out;
}

inline Eigen::MatrixXcd complex_matrix(const Eigen::MatrixXd& a) { return a.cast<std::complex<double>>(); }

}  // namespace stheta
