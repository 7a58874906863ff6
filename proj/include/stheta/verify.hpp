#pragma once

// Executable checks of the operator identities (exact) and of the theta
// transformation laws, Fourier transforms and Poisson summation (numerical).

#include "stheta/theta.hpp"

#include <complex>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace stheta {

struct CheckReport {
  std::string name;
  std::complex<double> lhs;
  std::complex<double> rhs;
  std::string detail;  // digest for symbolic checks
  double residual = 0;
  double tolerance = 0;
  bool passed = false;
  std::map<std::string, double> metadata;

  void finish() { passed = residual <= tolerance; }
};

/// theta_{H,K}(Z+S) against e(-tr(H^T A H S)/2 - tr(S0 1 A0 H)/2) theta_{H,K~}(Z); absolute residual.
CheckReport check_translation(const ThetaSpec& spec, const SiegelPoint& z, const IntMatrix& s, double eps = 1e-12,
                              double tol = 1e-10);

/// The phase and the shifted K~ of the translation law, in exact arithmetic.
std::pair<Rational, QMatrix> translation_data(const ThetaSpec& spec, const IntMatrix& s);

/// The scalar factor of the inversion law multiplying the coset sum.
std::complex<double> inversion_factor(const ThetaSpec& spec, const SiegelPoint& z);

/// theta_{H,K}(-Z^{-1}) against the coset sum; residual relative to the larger magnitude.
CheckReport check_inversion(const ThetaSpec& spec, const SiegelPoint& z, double eps = 1e-12, double tol = 1e-8);

/// Max norm of (D_A f - lambda I f)_ij; exact zero required for exact coefficients.
CheckReport check_vigneras(const ThetaSpec& spec);
CheckReport check_vigneras(const ExactPoly& f, const QuadForm& form, int lambda);
CheckReport check_vigneras(const ExactExpPoly& g, const QuadForm& form, int lambda);

/// [E_ij, (tr Delta_A)^k] p = -2k (Delta_A)_ij (tr Delta_A)^{k-1} p on random p of degree <= degree
/// and random invertible symmetric integral A.
struct CommutatorOptions {
  int m = 2;
  int n = 2;
  int degree = 6;
  int trials = 20;
  int max_k = 3;
  int forms = 5;
  std::uint64_t seed = 1;
};
CheckReport check_commutator(const CommutatorOptions& opt);

/// Integral of h(y) exp(-pi y^T G y) over R^d (d <= 2) by product Gauss-Hermite rules with doubled node counts.
struct QuadratureResult {
  std::complex<double> value;
  double error = 0;
  int nodes = 0;
};
QuadratureResult gaussian_quadrature(const Eigen::MatrixXd& gram,
                                     const std::function<std::complex<double>(const Eigen::VectorXd&)>& h,
                                     double tol = 1e-11);

/// f(U) = p(U) e(tr(U^T A U Z)/2) for an arbitrary polynomial and positive definite A.
CheckReport check_fourier_poly(const ExactPoly& p, const QuadForm& form, const SiegelPoint& z,
                               const Eigen::MatrixXd& v);
/// f_Z built from the homogeneous polynomial of a ThetaSpec (definite or indefinite form), transformed at V.
CheckReport check_fourier(const ThetaSpec& spec, const SiegelPoint& z, const Eigen::MatrixXd& v);
/// int p(U + V) exp(-pi tr U^T U) dU against exp(tr Delta / 4 pi)(p)(V).
CheckReport check_gauss_transform(const ExactPoly& p, const Eigen::MatrixXd& v, double tol = 1e-8);
/// sum_{Z^{m x n}} f_Z against sum_{A^{-1} Z^{m x n}} of its Fourier transform.
CheckReport check_poisson(const ThetaSpec& spec, const SiegelPoint& z, double eps = 1e-12, double tol = 1e-8);

/// Solution-space checks: every basis element of P_alpha (alpha <= max_alpha) through build_f_posdef.
std::vector<CheckReport> check_posdef_solutions(const QuadForm& form, int n, int max_alpha);
/// Every product P_alpha(U+) P_beta(U-) (alpha, beta <= max_degree) that does not vanish, through build_g_indef.
std::vector<CheckReport> check_indef_solutions(const QuadForm& form, int n, int max_degree);

struct SuiteOptions {
  std::optional<std::string> form;
  std::optional<int> genus;
  std::uint64_t seed = 1;
  double eps = 1e-12;
};

/// Suites: operators, translation, inversion, fourier, poisson, all. Throws std::invalid_argument otherwise.
std::vector<CheckReport> run_suite(const std::string& suite, const SuiteOptions& opt);

/// Random point of H_n with Y >= y_min I.
SiegelPoint random_siegel_point(int n, std::uint64_t seed, double y_min = 1.0);

}  // namespace stheta
