#pragma once

// Polynomials in an m x n matrix of variables U, optionally times a fixed
// Gaussian exp(tr(U^T B U)), together with the matrix differential operators
//   E_ij      = sum_d U_di d/dU_dj
//   (Delta_A)_ij = sum_ab d/dU_ai (A^-1)_ab d/dU_bj
// and the finite operator exponentials exp(c tr Delta_A).
//
// Coefficients are either exact (GaussRational, with an integer power of pi
// carried in the monomial key) or std::complex<double> (pi folded in).

#include "stheta/rational.hpp"

#include <cmath>
#include <compare>
#include <cstdint>
#include <map>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace stheta {

struct Monomial {
  std::vector<std::uint16_t> exps;  // row-major, index i * cols + j
  int pi_pow = 0;

  auto operator<=>(const Monomial&) const = default;
  bool operator==(const Monomial&) const = default;

  int degree() const {
    int d = 0;
    for (auto e : exps) d += e;
    return d;
  }
};

/// c * pi^k. In floating mode the power of pi is folded into the value on use.
template <class C>
struct PiScalar {
  C value;
  int pi_pow = 0;
};

template <class C>
PiScalar<C> pi_scalar(const Rational& q, int pi_pow = 0) {
  return {CoeffOps<C>::from_rational(q), pi_pow};
}

inline double pi_power(int k) { return std::pow(std::numbers::pi, k); }

template <class C>
class MatPoly {
 public:
  using Coeff = C;
  using Terms = std::map<Monomial, C>;

  MatPoly() = default;
  MatPoly(int m, int n) : m_(m), n_(n) {
    if (m < 1 || n < 1) throw std::invalid_argument("polynomial shape must be positive");
  }

  static MatPoly constant(int m, int n, const PiScalar<C>& c) {
    MatPoly p(m, n);
    p.add_term(Monomial{std::vector<std::uint16_t>(std::size_t(m) * n, 0), c.pi_pow}, c.value);
    return p;
  }
  static MatPoly one(int m, int n) { return constant(m, n, {CoeffOps<C>::from_int(1), 0}); }
  /// The coordinate U_ij, zero-based.
  static MatPoly variable(int m, int n, int i, int j) {
    MatPoly p(m, n);
    p.check_index(i, j);
    Monomial mono{std::vector<std::uint16_t>(std::size_t(m) * n, 0), 0};
    mono.exps[std::size_t(i) * n + j] = 1;
    p.add_term(std::move(mono), CoeffOps<C>::from_int(1));
    return p;
  }

  int rows() const { return m_; }
  int cols() const { return n_; }
  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }

  /// Total degree in U; -1 for the zero polynomial.
  int degree() const {
    int d = -1;
    for (const auto& [mono, c] : terms_) d = std::max(d, mono.degree());
    return d;
  }

  void check_index(int i, int j) const {
    if (i < 0 || i >= m_ || j < 0 || j >= n_)
      throw std::invalid_argument("variable index (" + std::to_string(i) + "," + std::to_string(j) +
                                  ") out of range for " + std::to_string(m_) + "x" + std::to_string(n_));
  }
  void check_same_shape(const MatPoly& o) const {
    if (m_ != o.m_ || n_ != o.n_) throw std::invalid_argument("polynomial shape mismatch");
  }

  /// Adds value * U^mono. Zero results are erased; in floating mode the pi power is folded.
  void add_term(Monomial mono, C value) {
    if (mono.exps.size() != std::size_t(m_) * n_) throw std::invalid_argument("monomial shape mismatch");
    if constexpr (!CoeffOps<C>::exact) {
      if (mono.pi_pow != 0) {
        value *= pi_power(mono.pi_pow);
        mono.pi_pow = 0;
      }
    }
    if (CoeffOps<C>::is_zero(value)) return;
    auto [it, inserted] = terms_.try_emplace(std::move(mono), value);
    if (!inserted) {
      it->second += value;
      if (CoeffOps<C>::is_zero(it->second)) terms_.erase(it);
    }
  }

  MatPoly& operator+=(const MatPoly& o) {
    check_same_shape(o);
    for (const auto& [mono, c] : o.terms_) add_term(mono, c);
    return *this;
  }
  MatPoly& operator-=(const MatPoly& o) {
    check_same_shape(o);
    for (const auto& [mono, c] : o.terms_) add_term(mono, -c);
    return *this;
  }
  friend MatPoly operator+(MatPoly a, const MatPoly& b) { return a += b; }
  friend MatPoly operator-(MatPoly a, const MatPoly& b) { return a -= b; }
  friend MatPoly operator-(const MatPoly& a) { return a.scaled(CoeffOps<C>::from_int(-1)); }

  friend MatPoly operator*(const MatPoly& a, const MatPoly& b) {
    a.check_same_shape(b);
    MatPoly out(a.m_, a.n_);
    for (const auto& [ma, ca] : a.terms_)
      for (const auto& [mb, cb] : b.terms_) {
        Monomial mono = ma;
        for (std::size_t k = 0; k < mono.exps.size(); ++k) mono.exps[k] += mb.exps[k];
        mono.pi_pow += mb.pi_pow;
        out.add_term(std::move(mono), ca * cb);
      }
    return out;
  }
  MatPoly& operator*=(const MatPoly& o) { return *this = *this * o; }

  MatPoly scaled(const C& c) const { return scaled(PiScalar<C>{c, 0}); }
  MatPoly scaled(const PiScalar<C>& c) const {
    MatPoly out(m_, n_);
    if (CoeffOps<C>::is_zero(c.value)) return out;
    for (const auto& [mono, v] : terms_) {
      Monomial k = mono;
      k.pi_pow += c.pi_pow;
      out.add_term(std::move(k), v * c.value);
    }
    return out;
  }

  MatPoly zero_like() const { return MatPoly(m_, n_); }

  /// Converts the coefficient field. Exact to floating folds the pi powers.
  template <class D>
  MatPoly<D> cast() const {
    MatPoly<D> out(m_, n_);
    for (const auto& [mono, c] : terms_) {
      if constexpr (std::is_same_v<C, D>) {
        out.add_term(mono, c);
      } else {
        static_assert(!CoeffOps<D>::exact, "cannot cast floating coefficients to exact ones");
        out.add_term(mono, D(CoeffOps<C>::to_complex(c)));
      }
    }
    return out;
  }

  friend bool operator==(const MatPoly& a, const MatPoly& b) {
    return a.m_ == b.m_ && a.n_ == b.n_ && a.terms_ == b.terms_;
  }

 private:
  int m_ = 1;
  int n_ = 1;
  Terms terms_;
};

/// p(U) * exp(tr(U^T B U)) with B = b * pi^b_pi_pow symmetric.
template <class C>
class ExpQuadPoly {
 public:
  using Coeff = C;

  ExpQuadPoly() = default;
  ExpQuadPoly(MatPoly<C> poly, CMatrix<C> b, int b_pi_pow = 0)
      : poly_(std::move(poly)), b_(std::move(b)), b_pi_pow_(b_pi_pow) {
    if (b_.rows() != poly_.rows() || b_.cols() != poly_.rows())
      throw std::invalid_argument("Gaussian matrix must be m x m");
    for (Eigen::Index i = 0; i < b_.rows(); ++i)
      for (Eigen::Index j = 0; j < i; ++j) {
        if constexpr (CoeffOps<C>::exact) {
          if (b_(i, j) != b_(j, i)) throw std::invalid_argument("Gaussian matrix must be symmetric");
        } else {
          if (std::abs(b_(i, j) - b_(j, i)) > 1e-12 * (1.0 + std::abs(b_(i, j))))
            throw std::invalid_argument("Gaussian matrix must be symmetric");
        }
      }
    if constexpr (!CoeffOps<C>::exact) {
      if (b_pi_pow_ != 0) {
        b_ *= C(pi_power(b_pi_pow_));
        b_pi_pow_ = 0;
      }
    }
  }

  int rows() const { return poly_.rows(); }
  int cols() const { return poly_.cols(); }
  const MatPoly<C>& poly() const { return poly_; }
  const CMatrix<C>& b() const { return b_; }
  int b_pi_pow() const { return b_pi_pow_; }
  bool is_zero() const { return poly_.is_zero(); }

  /// The Gaussian matrix as complex doubles with pi folded in.
  Eigen::MatrixXcd gaussian_matrix() const {
    Eigen::MatrixXcd out(b_.rows(), b_.cols());
    for (Eigen::Index i = 0; i < b_.rows(); ++i)
      for (Eigen::Index j = 0; j < b_.cols(); ++j)
        out(i, j) = CoeffOps<C>::to_complex(b_(i, j)) * pi_power(b_pi_pow_);
    return out;
  }

  ExpQuadPoly with_poly(MatPoly<C> p) const {
    ExpQuadPoly out = *this;
    poly_.check_same_shape(p);
    out.poly_ = std::move(p);
    return out;
  }
  ExpQuadPoly zero_like() const { return with_poly(poly_.zero_like()); }

  void check_same_exponent(const ExpQuadPoly& o) const {
    bool same = b_pi_pow_ == o.b_pi_pow_ && b_.rows() == o.b_.rows();
    if (same)
      for (Eigen::Index i = 0; i < b_.rows() && same; ++i)
        for (Eigen::Index j = 0; j < b_.cols() && same; ++j) same = b_(i, j) == o.b_(i, j);
    if (!same) throw std::invalid_argument("Gaussian factors differ");
  }

  ExpQuadPoly& operator+=(const ExpQuadPoly& o) {
    check_same_exponent(o);
    poly_ += o.poly_;
    return *this;
  }
  ExpQuadPoly& operator-=(const ExpQuadPoly& o) {
    check_same_exponent(o);
    poly_ -= o.poly_;
    return *this;
  }
  friend ExpQuadPoly operator+(ExpQuadPoly a, const ExpQuadPoly& b) { return a += b; }
  friend ExpQuadPoly operator-(ExpQuadPoly a, const ExpQuadPoly& b) { return a -= b; }

  ExpQuadPoly scaled(const C& c) const { return with_poly(poly_.scaled(c)); }
  ExpQuadPoly scaled(const PiScalar<C>& c) const { return with_poly(poly_.scaled(c)); }

  template <class D>
  ExpQuadPoly<D> cast() const {
    if constexpr (std::is_same_v<C, D>) {
      return *this;
    } else {
      CMatrix<D> b(b_.rows(), b_.cols());
      for (Eigen::Index i = 0; i < b_.rows(); ++i)
        for (Eigen::Index j = 0; j < b_.cols(); ++j) b(i, j) = D(CoeffOps<C>::to_complex(b_(i, j)));
      return ExpQuadPoly<D>(poly_.template cast<D>(), b, b_pi_pow_);
    }
  }

  friend bool operator==(const ExpQuadPoly& a, const ExpQuadPoly& b) {
    if (!(a.poly_ == b.poly_) || a.b_pi_pow_ != b.b_pi_pow_) return false;
    for (Eigen::Index i = 0; i < a.b_.rows(); ++i)
      for (Eigen::Index j = 0; j < a.b_.cols(); ++j)
        if (a.b_(i, j) != b.b_(i, j)) return false;
    return true;
  }

 private:
  MatPoly<C> poly_;
  CMatrix<C> b_;
  int b_pi_pow_ = 0;
};

/// Entry (i, j) is the image of the input under the (i, j) entry of a matrix operator.
template <class R>
struct OperatorMatrix {
  int n = 0;
  std::vector<R> entries;

  const R& operator()(int i, int j) const { return entries[std::size_t(i) * n + j]; }
  R& operator()(int i, int j) { return entries[std::size_t(i) * n + j]; }
};

// ---------------------------------------------------------------------------
// First-order pieces

template <class C>
MatPoly<C> partial(const MatPoly<C>& p, int i, int j) {
  p.check_index(i, j);
  const std::size_t idx = std::size_t(i) * p.cols() + j;
  MatPoly<C> out = p.zero_like();
  for (const auto& [mono, c] : p.terms()) {
    const auto e = mono.exps[idx];
    if (e == 0) continue;
    Monomial k = mono;
    k.exps[idx] = e - 1;
    out.add_term(std::move(k), c * CoeffOps<C>::from_int(e));
  }
  return out;
}

template <class C>
MatPoly<C> times_variable(const MatPoly<C>& p, int i, int j) {
  p.check_index(i, j);
  const std::size_t idx = std::size_t(i) * p.cols() + j;
  MatPoly<C> out = p.zero_like();
  for (const auto& [mono, c] : p.terms()) {
    Monomial k = mono;
    k.exps[idx] += 1;
    out.add_term(std::move(k), c);
  }
  return out;
}

/// Product rule: d/dU_ij (p e^{tr U^T B U}) = (dp/dU_ij + 2 (B U)_ij p) e^{...}.
template <class C>
ExpQuadPoly<C> partial(const ExpQuadPoly<C>& g, int i, int j) {
  MatPoly<C> out = partial(g.poly(), i, j);
  const C two = CoeffOps<C>::from_int(2);
  for (int a = 0; a < g.rows(); ++a) {
    if (CoeffOps<C>::is_zero(g.b()(i, a))) continue;
    out += times_variable(g.poly(), a, j).scaled(PiScalar<C>{two * g.b()(i, a), g.b_pi_pow()});
  }
  return g.with_poly(std::move(out));
}

template <class C>
ExpQuadPoly<C> times_variable(const ExpQuadPoly<C>& g, int i, int j) {
  return g.with_poly(times_variable(g.poly(), i, j));
}

/// E_ij p = sum_d U_di dp/dU_dj (zero-based i, j in [0, n)).
template <class R>
R euler_entry(const R& p, int i, int j) {
  if (i < 0 || i >= p.cols() || j < 0 || j >= p.cols()) throw std::invalid_argument("Euler index out of range");
  R out = p.zero_like();
  for (int d = 0; d < p.rows(); ++d) out += times_variable(partial(p, d, j), d, i);
  return out;
}

template <class C>
void check_inverse_form(const CMatrix<C>& ainv, int m) {
  if (ainv.rows() != m || ainv.cols() != m) throw std::invalid_argument("inverse form must be m x m");
}

/// (Delta_A)_ij p where ainv = A^{-1}.
template <class R>
R laplace_entry(const R& p, const CMatrix<typename R::Coeff>& ainv, int i, int j) {
  using C = typename R::Coeff;
  check_inverse_form(ainv, p.rows());
  if (i < 0 || i >= p.cols() || j < 0 || j >= p.cols()) throw std::invalid_argument("Laplace index out of range");
  const int m = p.rows();
  std::vector<R> first;
  first.reserve(m);
  for (int b = 0; b < m; ++b) first.push_back(partial(p, b, j));
  R out = p.zero_like();
  for (int a = 0; a < m; ++a) {
    R mixed = p.zero_like();
    for (int b = 0; b < m; ++b)
      if (!CoeffOps<C>::is_zero(ainv(a, b)) && !first[b].is_zero()) mixed += first[b].scaled(ainv(a, b));
    if (!mixed.is_zero()) out += partial(mixed, a, i);
  }
  return out;
}

template <class R>
R trace_laplace(const R& p, const CMatrix<typename R::Coeff>& ainv) {
  R out = p.zero_like();
  for (int j = 0; j < p.cols(); ++j) out += laplace_entry(p, ainv, j, j);
  return out;
}

/// tr(Delta_A W) p = sum_ij W_ji (Delta_A)_ij p.
template <class R>
R weighted_laplace(const R& p, const CMatrix<typename R::Coeff>& ainv, const CMatrix<typename R::Coeff>& w) {
  using C = typename R::Coeff;
  if (w.rows() != p.cols() || w.cols() != p.cols()) throw std::invalid_argument("weight must be n x n");
  R out = p.zero_like();
  for (int i = 0; i < p.cols(); ++i)
    for (int j = 0; j < p.cols(); ++j)
      if (!CoeffOps<C>::is_zero(w(j, i))) out += laplace_entry(p, ainv, i, j).scaled(w(j, i));
  return out;
}

/// sum_k c^k/k! L^k p for an operator L that strictly lowers the degree.
template <class C, class Op>
MatPoly<C> exp_operator(const MatPoly<C>& p, const PiScalar<C>& c, Op&& op) {
  MatPoly<C> result = p;
  MatPoly<C> term = p;
  for (int k = 1; !term.is_zero(); ++k) {
    term = op(term).scaled(c).scaled(CoeffOps<C>::from_rational(Rational(1, k)));
    result += term;
  }
  return result;
}

/// exp(c tr Delta_A) p, a finite sum on polynomials.
template <class C>
MatPoly<C> exp_trace_laplace(const MatPoly<C>& p, const CMatrix<C>& ainv, const PiScalar<C>& c) {
  return exp_operator(p, c, [&](const MatPoly<C>& q) { return trace_laplace(q, ainv); });
}

/// exp(c tr(Delta_A W)) p.
template <class C>
MatPoly<C> exp_weighted_laplace(const MatPoly<C>& p, const CMatrix<C>& ainv, const CMatrix<C>& w,
                                const PiScalar<C>& c) {
  return exp_operator(p, c, [&](const MatPoly<C>& q) { return weighted_laplace(q, ainv, w); });
}

/// Entrywise D_A f = (E - Delta_A / 4 pi) f.
template <class R>
OperatorMatrix<R> vigneras_apply(const R& f, const CMatrix<typename R::Coeff>& ainv) {
  using C = typename R::Coeff;
  const int n = f.cols();
  OperatorMatrix<R> out{n, {}};
  out.entries.reserve(std::size_t(n) * n);
  const auto quarter = pi_scalar<C>(Rational(1, 4), -1);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) out.entries.push_back(euler_entry(f, i, j) - laplace_entry(f, ainv, i, j).scaled(quarter));
  return out;
}

/// D_A f - lambda I f.
template <class R>
OperatorMatrix<R> vigneras_defect(const R& f, const CMatrix<typename R::Coeff>& ainv, int lambda) {
  using C = typename R::Coeff;
  OperatorMatrix<R> out = vigneras_apply(f, ainv);
  for (int i = 0; i < out.n; ++i) out(i, i) -= f.scaled(CoeffOps<C>::from_int(lambda));
  return out;
}

/// sum |c| pi^k over the terms.
template <class C>
double coefficient_norm(const MatPoly<C>& p) {
  double s = 0;
  for (const auto& [mono, c] : p.terms()) s += CoeffOps<C>::magnitude(c) * pi_power(mono.pi_pow);
  return s;
}
template <class C>
double coefficient_norm(const ExpQuadPoly<C>& g) {
  return coefficient_norm(g.poly());
}

template <class R>
double max_norm(const OperatorMatrix<R>& op) {
  double r = 0;
  for (const auto& e : op.entries) r = std::max(r, coefficient_norm(e));
  return r;
}

/// Exact zero for exact coefficients, otherwise norm <= tol * scale.
template <class R>
bool is_negligible(const R& p, double tol, double scale) {
  if constexpr (CoeffOps<typename R::Coeff>::exact) return p.is_zero();
  else return coefficient_norm(p) <= tol * std::max(scale, 1.0);
}

// ---------------------------------------------------------------------------
// Substitution and evaluation

/// p(L U N) for L m x m, N n x n.
template <class C>
MatPoly<C> substitute_linear(const MatPoly<C>& p, const CMatrix<C>& l, const CMatrix<C>& nmat) {
  const int m = p.rows(), n = p.cols();
  if (l.rows() != m || l.cols() != m || nmat.rows() != n || nmat.cols() != n)
    throw std::invalid_argument("substitution matrices have the wrong shape");
  // lin[i*n+j] = (L U N)_ij as a linear polynomial.
  std::vector<MatPoly<C>> lin;
  lin.reserve(std::size_t(m) * n);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) {
      MatPoly<C> q(m, n);
      for (int a = 0; a < m; ++a)
        for (int b = 0; b < n; ++b) {
          const C c = l(i, a) * nmat(b, j);
          if (CoeffOps<C>::is_zero(c)) continue;
          q += MatPoly<C>::variable(m, n, a, b).scaled(c);
        }
      lin.push_back(std::move(q));
    }
  std::vector<std::vector<MatPoly<C>>> powers(lin.size());
  auto power = [&](std::size_t v, int e) -> const MatPoly<C>& {
    auto& cache = powers[v];
    if (cache.empty()) cache.push_back(MatPoly<C>::one(m, n));
    while (int(cache.size()) <= e) cache.push_back(cache.back() * lin[v]);
    return cache[e];
  };
  MatPoly<C> out(m, n);
  for (const auto& [mono, c] : p.terms()) {
    MatPoly<C> t = MatPoly<C>::constant(m, n, {c, mono.pi_pow});
    for (std::size_t v = 0; v < mono.exps.size(); ++v)
      if (mono.exps[v] > 0) t *= power(v, mono.exps[v]);
    out += t;
  }
  return out;
}

/// Numerical value at a complex m x n matrix.
template <class C>
std::complex<double> evaluate(const MatPoly<C>& p, const Eigen::MatrixXcd& u) {
  if (u.rows() != p.rows() || u.cols() != p.cols()) throw std::invalid_argument("evaluation point has the wrong shape");
  std::complex<double> s = 0;
  for (const auto& [mono, c] : p.terms()) {
    std::complex<double> t = CoeffOps<C>::to_complex(c) * pi_power(mono.pi_pow);
    for (int i = 0; i < p.rows(); ++i)
      for (int j = 0; j < p.cols(); ++j) {
        const auto e = mono.exps[std::size_t(i) * p.cols() + j];
        if (e) t *= std::pow(u(i, j), int(e));
      }
    s += t;
  }
  return s;
}

template <class C>
std::complex<double> evaluate(const ExpQuadPoly<C>& g, const Eigen::MatrixXcd& u) {
  const std::complex<double> q = (u.transpose() * g.gaussian_matrix() * u).trace();
  return evaluate(g.poly(), u) * std::exp(q);
}

/// Flat representation for repeated evaluation at real points.
class CompiledPoly {
 public:
  CompiledPoly() = default;
  template <class C>
  explicit CompiledPoly(const MatPoly<C>& p) : nvars_(std::size_t(p.rows()) * p.cols()) {
    max_exp_.assign(nvars_, 0);
    for (const auto& [mono, c] : p.terms()) {
      coeffs_.push_back(CoeffOps<C>::to_complex(c) * pi_power(mono.pi_pow));
      for (std::size_t v = 0; v < nvars_; ++v) {
        exps_.push_back(mono.exps[v]);
        max_exp_[v] = std::max<int>(max_exp_[v], mono.exps[v]);
        degree_ = std::max(degree_, mono.degree());
      }
    }
    stride_ = 1;
    for (int e : max_exp_) stride_ = std::max(stride_, e + 1);
  }

  std::size_t num_vars() const { return nvars_; }
  std::size_t num_terms() const { return coeffs_.size(); }
  int degree() const { return degree_; }
  bool is_constant() const { return degree_ <= 0; }

  /// x has num_vars() entries (row-major U). scratch is resized as needed.
  std::complex<double> operator()(const double* x, std::vector<double>& scratch) const {
    scratch.resize(nvars_ * stride_);
    for (std::size_t v = 0; v < nvars_; ++v) {
      double* pw = &scratch[v * stride_];
      pw[0] = 1.0;
      for (int e = 1; e <= max_exp_[v]; ++e) pw[e] = pw[e - 1] * x[v];
    }
    std::complex<double> s = 0;
    for (std::size_t t = 0; t < coeffs_.size(); ++t) {
      double mono = 1.0;
      const std::uint16_t* e = &exps_[t * nvars_];
      for (std::size_t v = 0; v < nvars_; ++v)
        if (e[v]) mono *= scratch[v * stride_ + e[v]];
      s += coeffs_[t] * mono;
    }
    return s;
  }

 private:
  std::size_t nvars_ = 0;
  std::vector<std::complex<double>> coeffs_;
  std::vector<std::uint16_t> exps_;
  std::vector<int> max_exp_;
  int stride_ = 1;
  int degree_ = -1;
};

// ---------------------------------------------------------------------------
// Homogeneous polynomials P(UN) = det(N)^alpha P(U)

/// alpha with E P = alpha I P, or nullopt (including for the zero polynomial).
template <class C>
std::optional<int> homogeneity_degree(const MatPoly<C>& p, double tol = 1e-12) {
  if (p.is_zero()) return std::nullopt;
  const int n = p.cols();
  const int m = p.rows();
  int alpha = 0;
  for (int d = 0; d < m; ++d) alpha += p.terms().begin()->first.exps[std::size_t(d) * n];
  const double scale = coefficient_norm(p);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      MatPoly<C> r = euler_entry(p, i, j);
      if (i == j) r -= p.scaled(CoeffOps<C>::from_int(alpha));
      if (!is_negligible(r, tol, scale)) return std::nullopt;
    }
  return alpha;
}

using ExactPoly = MatPoly<GaussRational>;
using FloatPoly = MatPoly<std::complex<double>>;
using ExactExpPoly = ExpQuadPoly<GaussRational>;
using FloatExpPoly = ExpQuadPoly<std::complex<double>>;

inline constexpr std::size_t kDefaultMonomialCap = 2'000'000;

/// Integer-coefficient basis of P_alpha^{m,n}, computed as the kernel of the
/// off-diagonal Euler operators on monomials of column degree alpha.
std::vector<ExactPoly> basis_homopol(int m, int n, int alpha, std::size_t monomial_cap = kDefaultMonomialCap);

/// All alpha-fold products of n x n minors of U (with repetition).
std::vector<ExactPoly> minor_products(int m, int n, int alpha);

/// Dimension of the complex span.
std::size_t span_rank(const std::vector<ExactPoly>& polys);

/// Number of monomials of total degree d in v variables, saturating at SIZE_MAX.
std::size_t monomial_count(int vars, int degree);

}  // namespace stheta
