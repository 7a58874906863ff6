#pragma once

// Coefficient functions solving the Vigneras system and truncated evaluation
// of the Siegel theta series
//   theta_{H,K}(Z) = det Y^{-lambda/2} sum_{U in H + Z^{m x n}} f(U Y^{1/2}) e(tr(U^T A U Z)/2 + tr(K^T A U))
// with a rigorous (floating-evaluated) bound on the discarded tail.

#include "stheta/polyalg.hpp"
#include "stheta/quadform.hpp"
#include "stheta/siegel.hpp"

#include <complex>
#include <cstddef>
#include <optional>
#include <variant>

namespace stheta {

/// exp(-tr Delta_A / 8 pi) P for homogeneous P and positive definite A.
/// Throws std::invalid_argument if P is not homogeneous or A is not positive definite.
ExactPoly build_f_posdef(const ExactPoly& P, const QuadForm& form);

/// P(U) = P_alpha(U+) P_beta(U-), with U+ = Pi+ U the projection onto the positive eigenspace.
/// Throws std::invalid_argument if a factor is not homogeneous or the product vanishes identically.
ExactPoly split_product(const ExactPoly& p_alpha, const ExactPoly& p_beta, const QMatrix& proj_plus);
FloatPoly split_product(const FloatPoly& p_alpha, const FloatPoly& p_beta, const Eigen::MatrixXd& proj_plus);

/// g(U) = exp(-tr Delta_M / 8 pi)(P)(U) exp(2 pi tr(U^T A- U)). Needs dec.exact
/// (std::domain_error otherwise); the result is checked to solve D_A g = (alpha - beta - s) g exactly.
ExactExpPoly build_g_indef(const ExactPoly& p_alpha, const ExactPoly& p_beta, const QuadFormDecomposition& dec);

/// Floating version for forms whose positive projector is irrational; checked to 1e-9 relative.
FloatExpPoly build_g_indef_numeric(const ExactPoly& p_alpha, const ExactPoly& p_beta,
                                   const QuadFormDecomposition& dec);

struct PolyCoeff {
  int alpha = 0;
  ExactPoly P;  // homogeneous of degree alpha
  ExactPoly p;  // exp(-tr Delta_A / 8 pi) P
};

struct IndefCoeff {
  int alpha = 0;
  int beta = 0;
  ExactPoly p_alpha;
  ExactPoly p_beta;
  FloatPoly P;  // P_alpha(U+) P_beta(U-)
  FloatExpPoly g;
  std::optional<ExactExpPoly> g_exact;
};

struct ThetaSpec {
  QuadFormDecomposition dec;
  QMatrix H;
  QMatrix K;
  int lambda = 0;
  std::variant<PolyCoeff, IndefCoeff> coeff;

  int m() const { return dec.m(); }
  int n() const { return static_cast<int>(H.cols()); }
  int alpha() const;
  int beta() const;
  /// The polynomial part of f (or of g), as evaluated at U Y^{1/2}.
  FloatPoly coefficient_poly() const;
  /// The homogeneous polynomial P.
  FloatPoly homogeneous_poly() const;
  /// M^{-1}, from the exact majorant when available.
  Eigen::MatrixXd majorant_inverse() const;
  /// M, from the exact majorant when available.
  Eigen::MatrixXd majorant() const;
  /// Validates D_A f = lambda I f. Returns the residual (0 in exact mode).
  double vigneras_residual() const;
};

/// Requires s = 0 and homogeneous P. H, K default to zero (pass empty matrices).
ThetaSpec make_posdef_spec(const QuadForm& form, const ExactPoly& P, QMatrix H = {}, QMatrix K = {});
/// Works for any signature; exact when the positive projector is rational.
ThetaSpec make_indef_spec(const QuadForm& form, const ExactPoly& p_alpha, const ExactPoly& p_beta, QMatrix H = {},
                          QMatrix K = {});
ThetaSpec with_characteristics(const ThetaSpec& spec, QMatrix H, QMatrix K);

struct ThetaValue {
  std::complex<double> value;
  double tail_bound = 0;
  std::size_t terms_used = 0;
  double radius = 0;  // R with q(U) <= R^2 summed
};

/// sum over y in c + Z^d of prefactor * poly(L y) exp(-pi y^T G y + i pi y^T Q y + 2 pi i k^T y).
struct GaussianSum {
  Eigen::MatrixXd gram;        // G, positive definite
  Eigen::VectorXd center;      // c
  Eigen::MatrixXd phase_quad;  // Q
  Eigen::VectorXd phase_lin;   // k
  Eigen::MatrixXd poly_map;    // L: y -> row-major polynomial variables
  FloatPoly poly;
  std::complex<double> prefactor = 1.0;
};

/// Bound on the sum of |summand| over q(y) > r2 (needs r2 >= max degree / 2 pi).
double gaussian_tail_bound(const GaussianSum& sum, double r2);

/// Enumeration cap: THETA_MAX_POINTS if set, else 10^8.
std::size_t max_points_from_env();

/// Truncated sum with tail bound < eps. Throws ResourceLimitError if eps needs more than max_points terms.
ThetaValue evaluate_sum(const GaussianSum& sum, double eps, std::size_t max_points = max_points_from_env());

GaussianSum theta_sum(const ThetaSpec& spec, const SiegelPoint& z);
GaussianSum borcherds_sum(const ThetaSpec& spec, const SiegelPoint& z);

ThetaValue theta_eval(const ThetaSpec& spec, const SiegelPoint& z, double eps);
/// sum_U exp(-tr(Delta_M Y^{-1})/8 pi)(P)(U) e(tr(U^T A+ U Z)/2 + tr(U^T A- U conj Z)/2 + tr(K^T A U)).
/// Equals det Y^{-(s/2 + beta)} theta_eval.
ThetaValue theta_eval_borcherds(const ThetaSpec& spec, const SiegelPoint& z, double eps);

/// Column-stacked Kronecker product kron(a, b), block (j, l) = a(j, l) * b.
Eigen::MatrixXd kron(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

}  // namespace stheta
