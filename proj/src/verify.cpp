#include "stheta/verify.hpp"

#include "stheta/errors.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>
#include <random>
#include <sstream>

namespace stheta {

namespace {

using cd = std::complex<double>;
constexpr double kPi = std::numbers::pi;
constexpr cd kI(0, 1);

Eigen::MatrixXcd unstack(const Eigen::VectorXd& y, int m, int n) {
  Eigen::MatrixXcd u(m, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < m; ++i) u(i, j) = y(j * m + i);
  return u;
}

// Exact sign and branch-rule factors.
cd sign_power(const Rational& e) { return scalar_power(-1.0, e); }

// i^{-mn/2} (-1)^{beta s} |det A|^{-n/2} det(-Z^{-1})^{r/2+alpha} det(conj Z)^{-(s/2+beta)}.
cd fourier_factor(const ThetaSpec& spec, const SiegelPoint& z) {
  const int m = spec.m(), n = spec.n(), r = spec.dec.r, s = spec.dec.s;
  const int alpha = spec.alpha(), beta = spec.beta();
  const Eigen::MatrixXcd zc = z.z();
  const Eigen::MatrixXcd w = -zc.inverse();
  const double absdet = std::abs(to_double(Rational(exact_determinant(spec.dec.a))));
  cd f = scalar_power(kI, Rational(-m * n, 2)) * sign_power(Rational(beta * s)) * std::pow(absdet, -0.5 * n);
  f *= det_power(w, Rational(r, 2) + alpha);
  if (s > 0 || beta > 0) f *= det_power(zc.conjugate(), -(Rational(s, 2) + beta));
  return f;
}

// exp(-tr(Delta_M Y^{-1}) / 8 pi) P.
FloatPoly majorant_poly(const ThetaSpec& spec, const Eigen::MatrixXd& y) {
  return exp_weighted_laplace(spec.homogeneous_poly(), complex_matrix(spec.majorant_inverse()),
                              complex_matrix(y.inverse()), PiScalar<cd>{-0.125, -1});
}

// f_Z(U) = P~_Y(U) exp(-pi tr(U^T M U Y) + i pi tr(U^T A U X)).
cd f_z(const FloatPoly& ptilde, const Eigen::MatrixXd& mj, const Eigen::MatrixXd& a, const SiegelPoint& z,
       const Eigen::MatrixXcd& u) {
  const cd q = (u.transpose() * mj * u * z.y()).trace();
  const cd ph = (u.transpose() * a * u * z.x()).trace();
  return evaluate(ptilde, u) * std::exp(-kPi * q + kI * kPi * ph);
}

void require_small(int m, int n) {
  if (m * n > 2) throw std::invalid_argument("quadrature checks need m * n <= 2");
}

struct HermiteRule {
  std::vector<double> x, w;
};

const HermiteRule& hermite_rule(int n) {
  static std::mutex mu;
  static std::map<int, HermiteRule> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  // Golub-Welsch on the Jacobi matrix of the weight exp(-x^2).
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) jac(k, k - 1) = jac(k - 1, k) = std::sqrt(0.5 * k);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jac);
  HermiteRule rule;
  for (int k = 0; k < n; ++k) {
    rule.x.push_back(es.eigenvalues()(k));
    const double v = es.eigenvectors()(0, k);
    rule.w.push_back(std::sqrt(kPi) * v * v);
  }
  return cache.emplace(n, std::move(rule)).first->second;
}

IntMatrix random_symmetric(std::mt19937_64& rng, int n, int bound) {
  std::uniform_int_distribution<int> d(-bound, bound);
  IntMatrix s(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j) s(i, j) = s(j, i) = d(rng);
  return s;
}

IntMatrix random_invertible(std::mt19937_64& rng, int m) {
  while (true) {
    IntMatrix a = random_symmetric(rng, m, 3);
    if (exact_determinant(a) != 0) return a;
  }
}

ExactPoly random_poly(std::mt19937_64& rng, int m, int n, int degree) {
  std::uniform_int_distribution<int> nterms(1, 6), deg(0, degree), var(0, m * n - 1), num(-5, 5), den(1, 4);
  ExactPoly p(m, n);
  const int t = nterms(rng);
  for (int k = 0; k < t; ++k) {
    Monomial mono{std::vector<std::uint16_t>(std::size_t(m) * n, 0), 0};
    const int dk = deg(rng);
    for (int e = 0; e < dk; ++e) ++mono.exps[var(rng)];
    p.add_term(mono, GaussRational(Rational(num(rng), den(rng)), Rational(num(rng), den(rng))));
  }
  return p;
}

QMatrix pattern(int m, int n, int parity, const Rational& value) {
  QMatrix h = QMatrix::Zero(m, n);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j)
      if ((i + j) % 2 == parity) h(i, j) = value;
  return h;
}

QMatrix half_pattern(int m, int n, int parity) { return pattern(m, n, parity, Rational(1, 2)); }

std::string describe(const char* what, const std::string& form, int n) {
  return std::string(what) + "[" + form + ", n=" + std::to_string(n) + "]";
}

}  // namespace

SiegelPoint random_siegel_point(int n, std::uint64_t seed, double y_min) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-0.5, 0.5);
  Eigen::MatrixXd x(n, n), b(n, n);
  for (Eigen::Index k = 0; k < x.size(); ++k) x.data()[k] = unif(rng), b.data()[k] = unif(rng);
  x = 0.5 * (x + x.transpose()).eval();
  return SiegelPoint(x, y_min * Eigen::MatrixXd::Identity(n, n) + 0.5 * b * b.transpose());
}

// ---------------------------------------------------------------------------
// Transformation laws

std::pair<Rational, QMatrix> translation_data(const ThetaSpec& spec, const IntMatrix& s) {
  const int m = spec.m(), n = spec.n();
  if (s.rows() != n || s.cols() != n || s != s.transpose())
    throw std::invalid_argument("translation needs an integral symmetric n x n matrix");
  const QMatrix a = spec.dec.rational();
  const QMatrix sq = to_rational(s);
  const QMatrix& h = spec.H;
  Rational phase = -Rational((h.transpose() * a * h * sq).trace()) / 2;
  QMatrix corr(m, n);  // A0 1_{mn} S0
  for (int mu = 0; mu < m; ++mu)
    for (int nu = 0; nu < n; ++nu) {
      corr(mu, nu) = a(mu, mu) * sq(nu, nu);
      phase -= corr(mu, nu) * h(mu, nu) / 2;
    }
  QMatrix kt = spec.K + h * sq + inverse(a) * corr / Rational(2);
  return {phase, kt};
}

CheckReport check_translation(const ThetaSpec& spec, const SiegelPoint& z, const IntMatrix& s, double eps,
                              double tol) {
  CheckReport rep;
  rep.name = "translation";
  const auto [phase, kt] = translation_data(spec, s);
  const SiegelPoint zs(z.x() + s.cast<double>(), z.y());
  const ThetaValue lhs = theta_eval(spec, zs, eps);
  const ThetaValue rhs = theta_eval(with_characteristics(spec, spec.H, kt), z, eps);
  rep.lhs = lhs.value;
  rep.rhs = e_of(phase) * rhs.value;
  rep.residual = std::abs(rep.lhs - rep.rhs);
  rep.tolerance = tol;
  rep.metadata = {{"eps", eps},
                  {"radius", lhs.radius},
                  {"terms", double(lhs.terms_used + rhs.terms_used)},
                  {"tail_bound", lhs.tail_bound + rhs.tail_bound}};
  rep.finish();
  return rep;
}

cd inversion_factor(const ThetaSpec& spec, const SiegelPoint& z) {
  const int m = spec.m(), n = spec.n(), r = spec.dec.r, s = spec.dec.s;
  const int alpha = spec.alpha(), beta = spec.beta();
  const double absdet = std::abs(to_double(Rational(exact_determinant(spec.dec.a))));
  cd f = scalar_power(kI, Rational(-m * n, 2));
  f *= sign_power(Rational((s + 2 * beta) * n + 2 * beta * s, 2));
  f *= std::pow(absdet, -0.5 * n);
  f *= det_power(z.z(), Rational(r - s, 2) + alpha - beta);
  f *= e_of(Rational((spec.H.transpose() * spec.dec.rational() * spec.K).trace()));
  return f;
}

CheckReport check_inversion(const ThetaSpec& spec, const SiegelPoint& z, double eps, double tol) {
  CheckReport rep;
  rep.name = "inversion";
  const int n = spec.n();
  const auto reps = coset_reps(QuadForm(spec.dec.a), n);
  const SiegelPoint zi = act(SymplecticMatrix::inversion(n), z);
  const ThetaValue lhs = theta_eval(spec, zi, eps);
  const cd factor = inversion_factor(spec, z);
  const double eps_j = eps / (double(reps.size()) * std::max(1.0, std::abs(factor)));
  cd sum = 0;
  double tails = lhs.tail_bound;
  std::size_t terms = lhs.terms_used;
  for (const QMatrix& j : reps) {
    const ThetaValue v = theta_eval(with_characteristics(spec, QMatrix(j + spec.K), QMatrix(-spec.H)), z, eps_j);
    sum += v.value;
    tails += std::abs(factor) * v.tail_bound;
    terms += v.terms_used;
  }
  rep.lhs = lhs.value;
  rep.rhs = factor * sum;
  // Relative to the larger magnitude; values below 1e-6 (vanishing series) are compared on that absolute scale.
  rep.residual = std::abs(rep.lhs - rep.rhs) / std::max({std::abs(rep.lhs), std::abs(rep.rhs), 1e-6});
  rep.tolerance = tol;
  rep.metadata = {{"eps", eps}, {"cosets", double(reps.size())}, {"terms", double(terms)}, {"tail_bound", tails}};
  rep.finish();
  return rep;
}

// ---------------------------------------------------------------------------
// Operator identities

CheckReport check_vigneras(const ExactPoly& f, const QuadForm& form, int lambda) {
  CheckReport rep;
  rep.name = "vigneras";
  rep.residual = max_norm(vigneras_defect(f, coeff_matrix<GaussRational>(inverse(form.rational())), lambda));
  rep.tolerance = 0;
  rep.detail = "max_ij |(D_A f - lambda f)_ij|, lambda = " + std::to_string(lambda);
  rep.finish();
  return rep;
}

CheckReport check_vigneras(const ExactExpPoly& g, const QuadForm& form, int lambda) {
  CheckReport rep;
  rep.name = "vigneras";
  rep.residual = max_norm(vigneras_defect(g, coeff_matrix<GaussRational>(inverse(form.rational())), lambda));
  rep.tolerance = 0;
  rep.detail = "max_ij |(D_A g - lambda g)_ij|, lambda = " + std::to_string(lambda);
  rep.finish();
  return rep;
}

CheckReport check_vigneras(const ThetaSpec& spec) {
  CheckReport rep;
  rep.name = "vigneras";
  const auto* ic = std::get_if<IndefCoeff>(&spec.coeff);
  const bool exact = !ic || ic->g_exact.has_value();
  rep.residual = spec.vigneras_residual();
  rep.tolerance = exact ? 0.0 : 1e-9 * std::max(1.0, coefficient_norm(ic->g));
  rep.detail = "lambda = " + std::to_string(spec.lambda) + (exact ? ", exact" : ", floating");
  rep.finish();
  return rep;
}

CheckReport check_commutator(const CommutatorOptions& opt) {
  CheckReport rep;
  rep.name = "commutator[m=" + std::to_string(opt.m) + ", n=" + std::to_string(opt.n) + "]";
  std::mt19937_64 rng(opt.seed);
  double worst = 0;
  long checks = 0;
  for (int f = 0; f < opt.forms; ++f) {
    const IntMatrix a = random_invertible(rng, opt.m);
    const auto ainv = coeff_matrix<GaussRational>(inverse(to_rational(a)));
    for (int t = 0; t < opt.trials; ++t) {
      const ExactPoly p = random_poly(rng, opt.m, opt.n, opt.degree);
      std::vector<ExactPoly> tp{p};
      for (int k = 1; k <= opt.max_k; ++k) tp.push_back(trace_laplace(tp.back(), ainv));
      for (int i = 0; i < opt.n; ++i)
        for (int j = 0; j < opt.n; ++j) {
          ExactPoly tep = euler_entry(p, i, j);
          for (int k = 1; k <= opt.max_k; ++k) {
            tep = trace_laplace(tep, ainv);
            const ExactPoly lhs = euler_entry(tp[k], i, j) - tep;
            const ExactPoly rhs = laplace_entry(tp[k - 1], ainv, i, j).scaled(GaussRational(Rational(-2 * k)));
            worst = std::max(worst, coefficient_norm(lhs - rhs));
            ++checks;
          }
        }
    }
  }
  rep.residual = worst;
  rep.tolerance = 0;
  rep.detail = "[E_ij, (tr Delta_A)^k] + 2k (Delta_A)_ij (tr Delta_A)^{k-1}";
  rep.metadata = {{"identities", double(checks)}, {"degree", double(opt.degree)}, {"max_k", double(opt.max_k)}};
  rep.finish();
  return rep;
}

std::vector<CheckReport> check_posdef_solutions(const QuadForm& form, int n, int max_alpha) {
  std::vector<CheckReport> out;
  for (int alpha = 0; alpha <= max_alpha; ++alpha) {
    CheckReport rep;
    rep.name = "posdef_solutions[m=" + std::to_string(form.dim()) + ", n=" + std::to_string(n) +
               ", alpha=" + std::to_string(alpha) + "]";
    rep.tolerance = 0;
    const auto basis = basis_homopol(form.dim(), n, alpha);
    for (const auto& P : basis) {
      try {
        rep.residual = std::max(rep.residual, check_vigneras(build_f_posdef(P, form), form, alpha).residual);
      } catch (const std::logic_error&) {
        rep.residual = std::numeric_limits<double>::infinity();
      }
    }
    rep.metadata = {{"dimension", double(basis.size())}};
    rep.finish();
    out.push_back(rep);
  }
  return out;
}

std::vector<CheckReport> check_indef_solutions(const QuadForm& form, int n, int max_degree) {
  std::vector<CheckReport> out;
  const auto dec = decompose(form);
  for (int alpha = 0; alpha <= max_degree; ++alpha)
    for (int beta = 0; beta <= max_degree; ++beta) {
      CheckReport rep;
      rep.name = "indef_solutions[m=" + std::to_string(form.dim()) + ", n=" + std::to_string(n) +
                 ", alpha=" + std::to_string(alpha) + ", beta=" + std::to_string(beta) + "]";
      const int lambda = alpha - beta - dec.s;
      const auto ba = basis_homopol(form.dim(), n, alpha);
      const auto bb = basis_homopol(form.dim(), n, beta);
      int built = 0, vanished = 0;
      rep.tolerance = 0;
      for (const auto& pa : ba)
        for (const auto& pb : bb) {
          try {
            if (dec.exact) {
              const ExactExpPoly g = build_g_indef(pa, pb, dec);
              rep.residual = std::max(rep.residual, check_vigneras(g, form, lambda).residual);
            } else {
              const FloatExpPoly g = build_g_indef_numeric(pa, pb, dec);
              const Eigen::MatrixXcd ainv = complex_matrix(to_double(inverse(form.rational())));
              rep.residual = std::max(rep.residual, max_norm(vigneras_defect(g, ainv, lambda)));
              rep.tolerance = std::max(rep.tolerance, 1e-9 * std::max(1.0, coefficient_norm(g)));
            }
            ++built;
          } catch (const std::invalid_argument&) {
            ++vanished;  // P_alpha(U+) P_beta(U-) is identically zero
          } catch (const std::logic_error&) {
            rep.residual = std::numeric_limits<double>::infinity();
          }
        }
      rep.detail = "lambda = " + std::to_string(lambda);
      rep.metadata = {{"solutions", double(built)}, {"vanishing_products", double(vanished)}};
      rep.finish();
      out.push_back(rep);
    }
  return out;
}

// ---------------------------------------------------------------------------
// Fourier transforms and Poisson summation

QuadratureResult gaussian_quadrature(const Eigen::MatrixXd& gram, const std::function<cd(const Eigen::VectorXd&)>& h,
                                     double tol) {
  const Eigen::Index d = gram.rows();
  if (d < 1 || d > 2 || gram.cols() != d) throw std::invalid_argument("quadrature supports dimension 1 or 2");
  Eigen::LLT<Eigen::MatrixXd> llt(gram);
  if (llt.info() != Eigen::Success) throw std::domain_error("quadrature weight is not positive definite");
  const Eigen::MatrixXd r = llt.matrixU();
  const Eigen::MatrixXd rinv = r.inverse() / std::sqrt(kPi);  // y = rinv w
  const double jac = std::abs(rinv.determinant());
  cd prev = std::numeric_limits<double>::quiet_NaN();
  for (int nodes = 40; nodes <= 320; nodes *= 2) {
    const HermiteRule& rule = hermite_rule(nodes);
    cd acc = 0;
    Eigen::VectorXd w(d);
    if (d == 1) {
      for (int a = 0; a < nodes; ++a) {
        if (rule.w[a] == 0) continue;
        w(0) = rule.x[a];
        acc += rule.w[a] * h(rinv * w);
      }
    } else {
      for (int a = 0; a < nodes; ++a)
        for (int b = 0; b < nodes; ++b) {
          const double wt = rule.w[a] * rule.w[b];
          if (wt == 0) continue;
          w << rule.x[a], rule.x[b];
          acc += wt * h(rinv * w);
        }
    }
    const cd cur = jac * acc;
    const double diff = std::abs(cur - prev);
    if (diff <= tol * std::max(1.0, std::abs(cur))) return {cur, diff, nodes};
    prev = cur;
  }
  throw std::runtime_error("Gauss-Hermite quadrature did not converge with 320 nodes per axis");
}

CheckReport check_fourier_poly(const ExactPoly& p, const QuadForm& form, const SiegelPoint& z,
                               const Eigen::MatrixXd& v) {
  const int m = p.rows(), n = p.cols();
  require_small(m, n);
  if (form.dim() != m || z.genus() != n || v.rows() != m || v.cols() != n)
    throw std::invalid_argument("shapes of form, Z and V do not match the polynomial");
  if (decompose(form).s != 0) throw std::invalid_argument("check_fourier_poly needs a positive definite form");
  CheckReport rep;
  rep.name = "fourier_poly";
  const Eigen::MatrixXd a = form.real();
  const FloatPoly pf = p.cast<cd>();
  const Eigen::MatrixXcd vc = complex_matrix(v);
  const auto q = gaussian_quadrature(kron(z.y(), a), [&](const Eigen::VectorXd& y) {
    const Eigen::MatrixXcd u = unstack(y, m, n);
    const cd ph = 0.5 * (u.transpose() * a * u * z.x()).trace() + (vc.transpose() * a * u).trace();
    return evaluate(pf, u) * std::exp(2.0 * kPi * kI * ph);
  });
  const Eigen::MatrixXcd zinv = z.z().inverse();
  const FloatPoly shifted = exp_weighted_laplace(pf, complex_matrix(a.inverse()), zinv, PiScalar<cd>{cd(0, 0.25), -1});
  rep.lhs = q.value;
  rep.rhs = std::pow(a.determinant(), -0.5 * n) * det_power(-kI * z.z(), Rational(-m, 2)) *
            e_of(-0.5 * (vc.transpose() * a * vc * zinv).trace()) * evaluate(shifted, Eigen::MatrixXcd(-vc * zinv));
  rep.residual = std::abs(rep.lhs - rep.rhs);
  rep.tolerance = std::max(1e-6, q.error);
  rep.metadata = {{"nodes", double(q.nodes)}, {"quadrature_error", q.error}};
  rep.finish();
  return rep;
}

CheckReport check_fourier(const ThetaSpec& spec, const SiegelPoint& z, const Eigen::MatrixXd& v) {
  const int m = spec.m(), n = spec.n();
  require_small(m, n);
  if (z.genus() != n || v.rows() != m || v.cols() != n) throw std::invalid_argument("shapes of Z and V do not match");
  CheckReport rep;
  rep.name = "fourier";
  const Eigen::MatrixXd a = spec.dec.a.cast<double>();
  const Eigen::MatrixXd mj = spec.majorant();
  const FloatPoly py = majorant_poly(spec, z.y());
  const Eigen::MatrixXcd vc = complex_matrix(v);
  // The Gaussian exp(-pi tr(U^T M U Y)) is the weight; the rest of f_Z e(tr(V^T A U)) is integrated against it.
  const auto q = gaussian_quadrature(kron(z.y(), mj), [&](const Eigen::VectorXd& y) {
    const Eigen::MatrixXcd u = unstack(y, m, n);
    const cd ph = 0.5 * (u.transpose() * a * u * z.x()).trace() + (vc.transpose() * a * u).trace();
    return evaluate(py, u) * std::exp(2.0 * kPi * kI * ph);
  });
  const SiegelPoint w = act(SymplecticMatrix::inversion(n), z);
  rep.lhs = q.value;
  rep.rhs = fourier_factor(spec, z) * f_z(majorant_poly(spec, w.y()), mj, a, w, vc);
  rep.residual = std::abs(rep.lhs - rep.rhs);
  rep.tolerance = std::max(1e-6, q.error);
  rep.metadata = {{"nodes", double(q.nodes)}, {"quadrature_error", q.error}};
  rep.finish();
  return rep;
}

CheckReport check_gauss_transform(const ExactPoly& p, const Eigen::MatrixXd& v, double tol) {
  const int m = p.rows(), n = p.cols();
  require_small(m, n);
  if (v.rows() != m || v.cols() != n) throw std::invalid_argument("V has the wrong shape");
  CheckReport rep;
  rep.name = "gauss_transform";
  const FloatPoly pf = p.cast<cd>();
  const Eigen::MatrixXcd vc = complex_matrix(v);
  const auto q = gaussian_quadrature(Eigen::MatrixXd::Identity(m * n, m * n), [&](const Eigen::VectorXd& y) {
    return evaluate(pf, Eigen::MatrixXcd(unstack(y, m, n) + vc));
  });
  const ExactPoly t =
      exp_trace_laplace(p, coeff_matrix<GaussRational>(QMatrix::Identity(m, m)), pi_scalar<GaussRational>(Rational(1, 4), -1));
  rep.lhs = q.value;
  rep.rhs = evaluate(t, vc);
  rep.residual = std::abs(rep.lhs - rep.rhs);
  rep.tolerance = tol;
  rep.metadata = {{"nodes", double(q.nodes)}, {"quadrature_error", q.error}};
  rep.finish();
  return rep;
}

CheckReport check_poisson(const ThetaSpec& spec, const SiegelPoint& z, double eps, double tol) {
  const int m = spec.m(), n = spec.n();
  if (z.genus() != n) throw std::invalid_argument("genus mismatch");
  CheckReport rep;
  rep.name = "poisson";
  const ThetaSpec plain = with_characteristics(spec, QMatrix(), QMatrix());
  const ThetaValue lhs = theta_eval_borcherds(plain, z, eps);

  const SiegelPoint w = act(SymplecticMatrix::inversion(n), z);
  const Eigen::MatrixXd ainv = to_double(inverse(spec.dec.rational()));
  GaussianSum dual;
  dual.gram = kron(w.y(), ainv * spec.majorant() * ainv);
  dual.gram = 0.5 * (dual.gram + dual.gram.transpose()).eval();
  dual.center = Eigen::VectorXd::Zero(m * n);
  dual.phase_quad = kron(w.x(), ainv);
  dual.phase_lin = Eigen::VectorXd::Zero(m * n);
  dual.poly_map = Eigen::MatrixXd::Zero(m * n, m * n);
  // V = A^{-1} W: V_ij = sum_k (A^{-1})_ik W_kj with W_kj = y[j m + k].
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < m; ++k) dual.poly_map(i * n + j, j * m + k) = ainv(i, k);
  dual.poly = majorant_poly(spec, w.y());
  dual.prefactor = fourier_factor(spec, z);
  const ThetaValue rhs = evaluate_sum(dual, eps);

  rep.lhs = lhs.value;
  rep.rhs = rhs.value;
  rep.residual = std::abs(rep.lhs - rep.rhs);
  rep.tolerance = tol;
  rep.metadata = {{"eps", eps},
                  {"terms", double(lhs.terms_used + rhs.terms_used)},
                  {"tail_bound", lhs.tail_bound + rhs.tail_bound}};
  rep.finish();
  return rep;
}

// ---------------------------------------------------------------------------
// Suites

namespace {

ExactPoly one(int m, int n) { return ExactPoly::one(m, n); }
ExactPoly var(int m, int n, int i, int j) { return ExactPoly::variable(m, n, i, j); }

// Default spec of a form: P = 1 for definite forms, alpha = beta = 0 otherwise.
ThetaSpec plain_spec(const QuadForm& form, int n) {
  if (decompose(form).s == 0) return make_posdef_spec(form, one(form.dim(), n));
  return make_indef_spec(form, one(form.dim(), n), one(form.dim(), n));
}

// Y large enough to keep the enumeration of big lattices in higher genus cheap.
double default_ymin(int m, int n) { return m * n > 8 ? 3.0 : 1.0; }

void tag(CheckReport& r, const std::string& label) { r.name += label; }

void operators_suite(const SuiteOptions& opt, std::vector<CheckReport>& out) {
  for (auto [m, n] : {std::pair{2, 1}, std::pair{2, 2}, std::pair{3, 2}}) {
    CommutatorOptions co;
    co.m = m;
    co.n = n;
    co.seed = opt.seed + 97 * m + n;
    out.push_back(check_commutator(co));
  }
  if (opt.form) {
    const QuadForm form(fixture_form(*opt.form));
    const int n = opt.genus.value_or(1);
    const auto reps = decompose(form).s == 0 ? check_posdef_solutions(form, n, 2) : check_indef_solutions(form, n, 2);
    for (auto r : reps) tag(r, "{" + *opt.form + "}"), out.push_back(r);
    return;
  }
  const std::vector<std::pair<std::string, std::vector<int>>> posdef = {{"a2", {1, 2}}, {"a2+a1", {2}}};
  for (const auto& [name, genera] : posdef)
    for (int n : genera)
      for (auto r : check_posdef_solutions(QuadForm(fixture_form(name)), n, 3)) tag(r, "{" + name + "}"), out.push_back(r);
  for (const char* name : {"diag:2,-2", "h2", "diag:2,2,-2"})
    for (auto r : check_indef_solutions(QuadForm(fixture_form(name)), 1, 2)) tag(r, std::string("{") + name + "}"), out.push_back(r);
}

void translation_cases(const std::string& name, int n, std::uint64_t seed, double eps, std::vector<CheckReport>& out) {
  const QuadForm form(fixture_form(name));
  const int m = form.dim();
  const ThetaSpec base = plain_spec(form, n);
  std::mt19937_64 rng(seed);
  const SiegelPoint z = random_siegel_point(n, seed, default_ymin(m, n));
  const QMatrix zero = QMatrix::Zero(m, n);
  const std::vector<std::pair<QMatrix, QMatrix>> chars = {
      {zero, zero}, {half_pattern(m, n, 0), zero}, {zero, half_pattern(m, n, 1)}, {half_pattern(m, n, 0), half_pattern(m, n, 1)}};
  for (std::size_t c = 0; c < chars.size(); ++c)
    for (int t = 0; t < 3; ++t) {
      const IntMatrix s = random_symmetric(rng, n, 2);
      auto r = check_translation(with_characteristics(base, chars[c].first, chars[c].second), z, s, eps);
      tag(r, describe("", name, n) + "{chars=" + std::to_string(c) + "}");
      out.push_back(r);
    }
}

void inversion_cases(const std::string& name, int n, std::uint64_t seed, double eps, std::vector<CheckReport>& out) {
  const QuadForm form(fixture_form(name));
  const int m = form.dim();
  const ThetaSpec base = plain_spec(form, n);
  const double ymin = default_ymin(m, n);
  for (const auto& z : {SiegelPoint(Eigen::MatrixXd::Zero(n, n), ymin * Eigen::MatrixXd::Identity(n, n)),
                        random_siegel_point(n, seed, ymin)}) {
    // Half characteristics often make both sides vanish; thirds and fifths keep the value generic.
    for (int c = 0; c < 3; ++c) {
      const ThetaSpec spec = c == 0   ? base
                             : c == 1 ? with_characteristics(base, half_pattern(m, n, 0), half_pattern(m, n, 1))
                                      : with_characteristics(base, pattern(m, n, 0, Rational(1, 3)),
                                                             pattern(m, n, 1, Rational(1, 5)));
      auto r = check_inversion(spec, z, eps);
      tag(r, describe("", name, n) + "{chars=" + std::to_string(c) + "}");
      out.push_back(r);
    }
  }
}

SiegelPoint point1(double x, double y) {
  return SiegelPoint(Eigen::MatrixXd::Constant(1, 1, x), Eigen::MatrixXd::Constant(1, 1, y));
}

void fourier_suite(const SuiteOptions& opt, std::vector<CheckReport>& out) {
  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> unif(-0.6, 0.6);
  auto rv = [&](int m, int n) {
    Eigen::MatrixXd v(m, n);
    for (Eigen::Index k = 0; k < v.size(); ++k) v.data()[k] = unif(rng);
    return v;
  };
  const ExactPoly u = var(1, 1, 0, 0);
  for (const ExactPoly& p : {one(1, 1), u * u, u, u * u * u - u.scaled(GaussRational(Rational(3)))}) {
    out.push_back(check_gauss_transform(p, Eigen::MatrixXd::Zero(1, 1)));
    out.push_back(check_gauss_transform(p, rv(1, 1)));
  }
  for (int t = 0; t < 3; ++t) {
    out.push_back(check_gauss_transform(random_poly(rng, 2, 1, 4), rv(2, 1)));
    out.push_back(check_gauss_transform(random_poly(rng, 1, 2, 4), rv(1, 2)));
  }

  const QuadForm a1(fixture_form("a1"));
  for (const ExactPoly& p : {one(1, 1), u, u * u * u})
    for (const auto& z : {point1(0, 1), point1(0.3, 0.8)}) {
      out.push_back(check_fourier_poly(p, a1, z, Eigen::MatrixXd::Zero(1, 1)));
      out.push_back(check_fourier_poly(p, a1, z, rv(1, 1)));
    }
  out.push_back(check_fourier_poly(random_poly(rng, 2, 1, 3), QuadForm(fixture_form("a2")), point1(-0.2, 1.1), rv(2, 1)));
  out.push_back(check_fourier_poly(random_poly(rng, 1, 2, 3), a1, random_siegel_point(2, opt.seed, 0.8), rv(1, 2)));

  std::vector<ThetaSpec> specs = {make_posdef_spec(a1, one(1, 1)), make_posdef_spec(a1, u * u),
                                  make_indef_spec(QuadForm(fixture_form("diag:2,-2")), one(2, 1), one(2, 1)),
                                  make_indef_spec(QuadForm(fixture_form("diag:2,-2")), var(2, 1, 0, 0), var(2, 1, 1, 0)),
                                  make_indef_spec(QuadForm(fixture_form("h2")), var(2, 1, 0, 0), one(2, 1)),
                                  make_posdef_spec(QuadForm(fixture_form("a2")), var(2, 1, 0, 0) * var(2, 1, 1, 0))};
  const ExactPoly d12 = ExactPoly::one(1, 2);
  specs.push_back(make_posdef_spec(a1, d12));
  if (opt.form) {
    const QuadForm form(fixture_form(*opt.form));
    const int n = opt.genus.value_or(1);
    if (form.dim() * n <= 2) specs.push_back(plain_spec(form, n));
  }
  for (const auto& spec : specs) {
    const int n = spec.n();
    const SiegelPoint zi(Eigen::MatrixXd::Zero(n, n), Eigen::MatrixXd::Identity(n, n));
    out.push_back(check_fourier(spec, zi, Eigen::MatrixXd::Zero(spec.m(), n)));
    out.push_back(check_fourier(spec, random_siegel_point(n, opt.seed + 5, 0.7), rv(spec.m(), n)));
  }
}

void poisson_suite(const SuiteOptions& opt, std::vector<CheckReport>& out) {
  const QuadForm a1(fixture_form("a1"));
  const ExactPoly u = var(1, 1, 0, 0);
  std::vector<std::pair<ThetaSpec, SiegelPoint>> cases = {
      {make_posdef_spec(a1, one(1, 1)), point1(0, 1)},
      {make_posdef_spec(QuadForm(fixture_form("diag:1")), one(1, 1)), point1(0, 1)},
      {make_posdef_spec(a1, u), point1(0, 1)},
      {make_posdef_spec(a1, u * u), point1(0.25, 0.9)},
      {make_indef_spec(QuadForm(fixture_form("diag:2,-2")), one(2, 1), one(2, 1)), point1(0.25, 1)},
      {make_indef_spec(QuadForm(fixture_form("h2")), var(2, 1, 0, 0), one(2, 1)), point1(-0.1, 1.2)},
  };
  if (opt.form) {
    const QuadForm form(fixture_form(*opt.form));
    const int n = opt.genus.value_or(1);
    cases.emplace_back(plain_spec(form, n), random_siegel_point(n, opt.seed, default_ymin(form.dim(), n)));
  }
  for (const auto& [spec, z] : cases) out.push_back(check_poisson(spec, z, opt.eps));
}

}  // namespace

std::vector<CheckReport> run_suite(const std::string& suite, const SuiteOptions& opt) {
  static const std::vector<std::string> known = {"operators", "translation", "inversion", "fourier", "poisson", "all"};
  if (std::find(known.begin(), known.end(), suite) == known.end())
    throw std::invalid_argument("unknown suite '" + suite + "'");
  if (opt.genus && (*opt.genus < 1 || *opt.genus > 4)) throw std::invalid_argument("genus must be between 1 and 4");
  std::vector<CheckReport> out;
  const bool all = suite == "all";
  if (all || suite == "operators") operators_suite(opt, out);
  if (all || suite == "translation") {
    if (opt.form) {
      translation_cases(*opt.form, opt.genus.value_or(1), opt.seed, opt.eps, out);
    } else {
      for (const char* name : {"a1", "e8", "diag:2,-2"})
        for (int n : {1, 2}) translation_cases(name, n, opt.seed + n, opt.eps, out);
    }
  }
  if (all || suite == "inversion") {
    if (opt.form) {
      inversion_cases(*opt.form, opt.genus.value_or(1), opt.seed, opt.eps, out);
    } else {
      for (const auto& [name, n] : std::vector<std::pair<std::string, int>>{
               {"a1", 1}, {"e8", 1}, {"diag:2,2", 2}, {"diag:2,-2", 1}, {"h2", 1}, {"a2", 2}})
        inversion_cases(name, n, opt.seed + n, opt.eps, out);
    }
  }
  if (all || suite == "fourier") fourier_suite(opt, out);
  if (all || suite == "poisson") poisson_suite(opt, out);
  return out;
}

}  // namespace stheta
