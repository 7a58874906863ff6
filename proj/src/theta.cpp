#include "stheta/theta.hpp"

#include "stheta/errors.hpp"

#include <Eigen/LU>
#include <boost/math/special_functions/binomial.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <map>
#include <numbers>
#include <iomanip>
#include <sstream>
#include <string>
#include <thread>

namespace stheta {

namespace {

using cd = std::complex<double>;
constexpr double kPi = std::numbers::pi;

template <class C>
CMatrix<C> identity_coeff(int n) {
  return coeff_matrix<C>(QMatrix::Identity(n, n));
}

int require_homogeneous(const ExactPoly& p, const char* what) {
  const auto deg = homogeneity_degree(p);
  if (!deg) throw std::invalid_argument(std::string(what) + " is not homogeneous of matrix type");
  return *deg;
}

QMatrix zero_if_empty(QMatrix h, int m, int n) {
  if (h.size() == 0) return QMatrix::Zero(m, n);
  if (h.rows() != m || h.cols() != n) throw std::invalid_argument("characteristic must be m x n");
  return h;
}

template <class R>
bool exact_zero(const OperatorMatrix<R>& op) {
  return std::all_of(op.entries.begin(), op.entries.end(), [](const R& e) { return e.is_zero(); });
}

Eigen::VectorXd column_stack(const Eigen::MatrixXd& a) {
  return Eigen::Map<const Eigen::VectorXd>(a.data(), a.size());
}

// Neumaier's variant of Kahan summation, one per real component.
struct CompensatedSum {
  double re = 0, re_c = 0, im = 0, im_c = 0;

  static void add(double& s, double& c, double x) {
    const double t = s + x;
    if (std::abs(s) >= std::abs(x)) c += (s - t) + x;
    else c += (x - t) + s;
    s = t;
  }
  void add(cd z) {
    add(re, re_c, z.real());
    add(im, im_c, z.imag());
  }
  void add(const CompensatedSum& o) {
    add(re, re_c, o.re);
    add(re, re_c, o.re_c);
    add(im, im_c, o.im);
    add(im, im_c, o.im_c);
  }
  cd value() const { return {re + re_c, im + im_c}; }
};

// |poly(L y)| <= sum_k a_k q^{e_k} with q = y^T G y.
struct TailModel {
  int d = 0;
  double delta = 0;        // covering radius of the Babai cell in the q metric
  double density = 0;      // V_d / sqrt(det G)
  std::map<double, double> coeff;  // e_k -> a_k
  double prefactor = 1;

  explicit TailModel(const GaussianSum& sum) {
    d = static_cast<int>(sum.gram.rows());
    Eigen::LLT<Eigen::MatrixXd> llt(sum.gram);
    if (llt.info() != Eigen::Success) throw std::domain_error("Gram matrix is not positive definite");
    const Eigen::MatrixXd r = llt.matrixU();
    delta = 0.5 * r.diagonal().norm();
    const double sqrt_det = r.diagonal().prod();
    density = std::pow(kPi, 0.5 * d) / std::tgamma(0.5 * d + 1) / sqrt_det;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sum.gram, Eigen::EigenvaluesOnly);
    const double lmin = es.eigenvalues().minCoeff();
    const double lnorm2 = sum.poly_map.size() == 0 ? 0.0 : (sum.poly_map.transpose() * sum.poly_map).eval()
                                                               .selfadjointView<Eigen::Lower>()
                                                               .eigenvalues()
                                                               .maxCoeff();
    const double kappa = lnorm2 / lmin;
    for (const auto& [mono, c] : sum.poly.terms()) {
      const int deg = mono.degree();
      coeff[0.5 * deg] += std::abs(c) * pi_power(mono.pi_pow) * std::pow(kappa, 0.5 * deg);
    }
    prefactor = std::abs(sum.prefactor);
  }

  double max_exponent() const { return coeff.empty() ? 0.0 : coeff.rbegin()->first; }

  double bound(double r2) const {
    const double sr = std::sqrt(r2);
    const double nbar = density * std::pow(sr + delta, d);
    double total = 0;
    for (const auto& [e, a] : coeff) {
      total += a * std::pow(r2, e) * std::exp(-kPi * r2) * nbar;
      double integral = 0;
      for (int j = 0; j <= d - 1; ++j) {
        const double s = e + 0.5 * (j - 1);
        integral += boost::math::binomial_coefficient<double>(d - 1, j) * std::pow(delta, d - 1 - j) *
                    std::pow(kPi, -(s + 1)) * boost::math::tgamma(s + 1, kPi * r2);
      }
      total += a * density * 0.5 * d * integral;
    }
    return prefactor * total;
  }

  // Lattice points expected in the ball of radius sqrt(r2).
  double volume_estimate(double r2) const { return density * std::pow(std::sqrt(r2), d); }
};

int thread_count(std::size_t jobs) {
  unsigned hw = std::thread::hardware_concurrency();
  if (const char* env = std::getenv("THETA_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) hw = static_cast<unsigned>(v);
  }
  if (hw == 0) hw = 1;
  return static_cast<int>(std::max<std::size_t>(1, std::min<std::size_t>(hw, jobs)));
}

}  // namespace

Eigen::MatrixXd kron(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  Eigen::MatrixXd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index j = 0; j < a.rows(); ++j)
    for (Eigen::Index l = 0; l < a.cols(); ++l) out.block(j * b.rows(), l * b.cols(), b.rows(), b.cols()) = a(j, l) * b;
  return out;
}

// ---------------------------------------------------------------------------
// Coefficient functions

ExactPoly build_f_posdef(const ExactPoly& P, const QuadForm& form) {
  if (P.rows() != form.dim()) throw std::invalid_argument("polynomial rows must match the form dimension");
  const int alpha = require_homogeneous(P, "P");
  if (decompose(form).s != 0) throw std::invalid_argument("build_f_posdef needs a positive definite form");
  const auto ainv = coeff_matrix<GaussRational>(inverse(form.rational()));
  ExactPoly p = exp_trace_laplace(P, ainv, pi_scalar<GaussRational>(Rational(-1, 8), -1));
  if (!exact_zero(vigneras_defect(p, ainv, alpha)))
    throw std::logic_error("constructed coefficient does not solve the Vigneras system");
  return p;
}

ExactPoly split_product(const ExactPoly& p_alpha, const ExactPoly& p_beta, const QMatrix& proj_plus) {
  p_alpha.check_same_shape(p_beta);
  const int m = p_alpha.rows(), n = p_alpha.cols();
  if (proj_plus.rows() != m || proj_plus.cols() != m) throw std::invalid_argument("projector must be m x m");
  require_homogeneous(p_alpha, "P_alpha");
  require_homogeneous(p_beta, "P_beta");
  const auto id_n = identity_coeff<GaussRational>(n);
  const auto plus = coeff_matrix<GaussRational>(proj_plus);
  const auto minus = coeff_matrix<GaussRational>(QMatrix(QMatrix::Identity(m, m) - proj_plus));
  ExactPoly out = substitute_linear(p_alpha, plus, id_n) * substitute_linear(p_beta, minus, id_n);
  if (out.is_zero()) throw std::invalid_argument("P_alpha(U+) P_beta(U-) vanishes identically for this form");
  return out;
}

FloatPoly split_product(const FloatPoly& p_alpha, const FloatPoly& p_beta, const Eigen::MatrixXd& proj_plus) {
  p_alpha.check_same_shape(p_beta);
  const int m = p_alpha.rows(), n = p_alpha.cols();
  if (proj_plus.rows() != m || proj_plus.cols() != m) throw std::invalid_argument("projector must be m x m");
  const Eigen::MatrixXcd id_n = Eigen::MatrixXcd::Identity(n, n);
  const Eigen::MatrixXcd plus = complex_matrix(proj_plus);
  const Eigen::MatrixXcd minus = Eigen::MatrixXcd::Identity(m, m) - plus;
  FloatPoly out = substitute_linear(p_alpha, plus, id_n) * substitute_linear(p_beta, minus, id_n);
  if (coefficient_norm(out) <= 1e-12 * std::max(1.0, coefficient_norm(p_alpha) * coefficient_norm(p_beta)))
    throw std::invalid_argument("P_alpha(U+) P_beta(U-) vanishes identically for this form");
  return out;
}

ExactExpPoly build_g_indef(const ExactPoly& p_alpha, const ExactPoly& p_beta, const QuadFormDecomposition& dec) {
  if (!dec.exact) throw std::domain_error("exact construction needs a rational positive projector");
  if (p_alpha.rows() != dec.m()) throw std::invalid_argument("polynomial rows must match the form dimension");
  const int alpha = require_homogeneous(p_alpha, "P_alpha");
  const int beta = require_homogeneous(p_beta, "P_beta");
  const ExactPoly P = split_product(p_alpha, p_beta, dec.exact->proj_plus);
  const auto minv = coeff_matrix<GaussRational>(inverse(dec.exact->majorant));
  const ExactPoly p = exp_trace_laplace(P, minv, pi_scalar<GaussRational>(Rational(-1, 8), -1));
  ExactExpPoly g(p, coeff_matrix<GaussRational>(QMatrix(dec.exact->aminus * Rational(2))), 1);
  const auto ainv = coeff_matrix<GaussRational>(inverse(dec.rational()));
  if (!exact_zero(vigneras_defect(g, ainv, alpha - beta - dec.s)))
    throw std::logic_error("constructed coefficient does not solve the Vigneras system");
  return g;
}

FloatExpPoly build_g_indef_numeric(const ExactPoly& p_alpha, const ExactPoly& p_beta,
                                   const QuadFormDecomposition& dec) {
  if (p_alpha.rows() != dec.m()) throw std::invalid_argument("polynomial rows must match the form dimension");
  const int alpha = require_homogeneous(p_alpha, "P_alpha");
  const int beta = require_homogeneous(p_beta, "P_beta");
  const FloatPoly P = split_product(p_alpha.cast<cd>(), p_beta.cast<cd>(), dec.proj_plus);
  const Eigen::MatrixXcd minv = complex_matrix(dec.majorant.inverse());
  const FloatPoly p = exp_trace_laplace(P, minv, PiScalar<cd>{-0.125, -1});
  FloatExpPoly g(p, complex_matrix(2 * dec.aminus), 1);
  const Eigen::MatrixXd ad = dec.a.cast<double>();
  const Eigen::MatrixXcd ainv = complex_matrix(ad.inverse());
  const double scale = coefficient_norm(g) * (1 + ainv.norm()) * (1 + dec.aminus.norm()) * (1 + P.degree());
  if (max_norm(vigneras_defect(g, ainv, alpha - beta - dec.s)) > 1e-9 * std::max(1.0, scale))
    throw std::logic_error("constructed coefficient does not solve the Vigneras system");
  return g;
}

// ---------------------------------------------------------------------------
// ThetaSpec

int ThetaSpec::alpha() const {
  return std::visit([](const auto& c) { return c.alpha; }, coeff);
}

int ThetaSpec::beta() const {
  if (const auto* c = std::get_if<IndefCoeff>(&coeff)) return c->beta;
  return 0;
}

FloatPoly ThetaSpec::coefficient_poly() const {
  if (const auto* c = std::get_if<PolyCoeff>(&coeff)) return c->p.cast<cd>();
  return std::get<IndefCoeff>(coeff).g.poly();
}

FloatPoly ThetaSpec::homogeneous_poly() const {
  if (const auto* c = std::get_if<PolyCoeff>(&coeff)) return c->P.cast<cd>();
  return std::get<IndefCoeff>(coeff).P;
}

Eigen::MatrixXd ThetaSpec::majorant() const {
  if (dec.exact) return to_double(dec.exact->majorant);
  return dec.majorant;
}

Eigen::MatrixXd ThetaSpec::majorant_inverse() const {
  if (dec.exact) return to_double(inverse(dec.exact->majorant));
  return dec.majorant.inverse();
}

double ThetaSpec::vigneras_residual() const {
  const QMatrix ainv_q = inverse(dec.rational());
  if (const auto* c = std::get_if<PolyCoeff>(&coeff))
    return max_norm(vigneras_defect(c->p, coeff_matrix<GaussRational>(ainv_q), lambda));
  const auto& ic = std::get<IndefCoeff>(coeff);
  if (ic.g_exact) return max_norm(vigneras_defect(*ic.g_exact, coeff_matrix<GaussRational>(ainv_q), lambda));
  return max_norm(vigneras_defect(ic.g, complex_matrix(to_double(ainv_q)), lambda));
}

ThetaSpec make_posdef_spec(const QuadForm& form, const ExactPoly& P, QMatrix H, QMatrix K) {
  ThetaSpec spec;
  spec.dec = decompose(form);
  if (spec.dec.s != 0) throw std::invalid_argument("a polynomial coefficient needs a positive definite form");
  if (P.rows() != form.dim()) throw std::invalid_argument("polynomial rows must match the form dimension");
  PolyCoeff c;
  c.P = P;
  c.alpha = require_homogeneous(P, "P");
  c.p = build_f_posdef(P, form);
  spec.lambda = c.alpha;
  spec.H = zero_if_empty(std::move(H), form.dim(), P.cols());
  spec.K = zero_if_empty(std::move(K), form.dim(), P.cols());
  spec.coeff = std::move(c);
  return spec;
}

ThetaSpec make_indef_spec(const QuadForm& form, const ExactPoly& p_alpha, const ExactPoly& p_beta, QMatrix H,
                          QMatrix K) {
  ThetaSpec spec;
  spec.dec = decompose(form);
  IndefCoeff c;
  c.p_alpha = p_alpha;
  c.p_beta = p_beta;
  c.alpha = require_homogeneous(p_alpha, "P_alpha");
  c.beta = require_homogeneous(p_beta, "P_beta");
  if (spec.dec.exact) {
    c.g_exact = build_g_indef(p_alpha, p_beta, spec.dec);
    c.g = c.g_exact->cast<cd>();
    c.P = split_product(p_alpha, p_beta, spec.dec.exact->proj_plus).cast<cd>();
  } else {
    c.g = build_g_indef_numeric(p_alpha, p_beta, spec.dec);
    c.P = split_product(p_alpha.cast<cd>(), p_beta.cast<cd>(), spec.dec.proj_plus);
  }
  spec.lambda = c.alpha - c.beta - spec.dec.s;
  spec.H = zero_if_empty(std::move(H), form.dim(), p_alpha.cols());
  spec.K = zero_if_empty(std::move(K), form.dim(), p_alpha.cols());
  spec.coeff = std::move(c);
  return spec;
}

ThetaSpec with_characteristics(const ThetaSpec& spec, QMatrix H, QMatrix K) {
  ThetaSpec out = spec;
  out.H = zero_if_empty(std::move(H), spec.m(), spec.n());
  out.K = zero_if_empty(std::move(K), spec.m(), spec.n());
  return out;
}

// ---------------------------------------------------------------------------
// Summation engine

double gaussian_tail_bound(const GaussianSum& sum, double r2) {
  const TailModel model(sum);
  if (r2 < model.max_exponent() / kPi) throw std::invalid_argument("tail bound needs r2 >= max degree / 2 pi");
  return model.bound(r2);
}

std::size_t max_points_from_env() {
  if (const char* env = std::getenv("THETA_MAX_POINTS")) {
    char* end = nullptr;
    const double v = std::strtod(env, &end);
    if (end != env && v >= 1) return static_cast<std::size_t>(v);
  }
  return 100'000'000;
}

ThetaValue evaluate_sum(const GaussianSum& sum, double eps, std::size_t max_points) {
  const Eigen::Index d = sum.gram.rows();
  if (d == 0 || sum.gram.cols() != d || sum.center.size() != d || sum.phase_quad.rows() != d ||
      sum.phase_quad.cols() != d || sum.phase_lin.size() != d || sum.poly_map.cols() != d ||
      sum.poly_map.rows() != Eigen::Index(sum.poly.rows()) * sum.poly.cols())
    throw std::invalid_argument("inconsistent Gaussian sum dimensions");
  if (!(eps > 0)) throw std::invalid_argument("eps must be positive");
  if (sum.poly.is_zero()) return {};

  const TailModel model(sum);
  const double start = std::max(1.0, model.max_exponent() / kPi);
  double lo = start, hi = start;
  if (model.bound(hi) >= eps) {
    while (model.bound(hi) >= eps) {
      lo = hi;
      hi *= 2;
      if (hi > 1e12) throw ResourceLimitError("tail bound does not reach eps");
    }
    for (int it = 0; it < 60 && hi - lo > 1e-6 * hi; ++it) {
      const double mid = 0.5 * (lo + hi);
      (model.bound(mid) < eps ? hi : lo) = mid;
    }
  }
  const double r2 = hi;
  const double estimate = model.volume_estimate(r2);
  if (estimate > static_cast<double>(max_points)) {
    std::ostringstream msg;
    msg << "eps = " << eps << " needs about " << std::setprecision(3) << estimate
        << " lattice points, above the cap of " << max_points;
    throw ResourceLimitError(msg.str());
  }

  const LatticeEnumerator en(sum.gram);
  const auto [top_lo, top_hi] = en.top_range(sum.center, r2);
  const std::size_t slices = top_hi >= top_lo ? static_cast<std::size_t>(top_hi - top_lo + 1) : 0;
  std::vector<CompensatedSum> partial(slices);
  std::vector<std::size_t> counts(slices, 0);
  std::atomic<std::size_t> next{0}, total{0};
  std::atomic<bool> over{false};
  const CompiledPoly poly(sum.poly);
  const bool constant = poly.is_constant();

  auto worker = [&] {
    std::vector<double> scratch;
    Eigen::VectorXd y(d), x_poly(sum.poly_map.rows());
    for (std::size_t idx; (idx = next++) < slices && !over;) {
      CompensatedSum acc;
      std::size_t count = 0;
      en.enumerate_slice(sum.center, r2, top_lo + static_cast<long long>(idx),
                         [&](const std::vector<long long>& x, double q) {
                           for (Eigen::Index k = 0; k < d; ++k) y(k) = static_cast<double>(x[k]) + sum.center(k);
                           const double phase = kPi * y.dot(sum.phase_quad * y) + 2 * kPi * sum.phase_lin.dot(y);
                           cd val;
                           if (constant) {
                             val = poly(nullptr, scratch);
                           } else {
                             x_poly.noalias() = sum.poly_map * y;
                             val = poly(x_poly.data(), scratch);
                           }
                           acc.add(val * std::exp(-kPi * q) * cd(std::cos(phase), std::sin(phase)));
                           ++count;
                         });
      partial[idx] = acc;
      counts[idx] = count;
      if ((total += count) > max_points) over = true;
    }
  };
  const int nthreads = thread_count(slices);
  if (nthreads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (over) throw ResourceLimitError("enumeration exceeded the cap of " + std::to_string(max_points) + " points");

  CompensatedSum acc;
  std::size_t used = 0;
  for (std::size_t k = 0; k < slices; ++k) {
    acc.add(partial[k]);
    used += counts[k];
  }
  return {sum.prefactor * acc.value(), model.bound(r2), used, std::sqrt(r2)};
}

namespace {

GaussianSum common_sum(const ThetaSpec& spec, const SiegelPoint& z) {
  const int m = spec.m(), n = spec.n();
  if (z.genus() != n) throw std::invalid_argument("genus of Z does not match the characteristics");
  GaussianSum s;
  const Eigen::MatrixXd a = spec.dec.a.cast<double>();
  s.gram = kron(z.y(), spec.majorant());
  s.gram = 0.5 * (s.gram + s.gram.transpose()).eval();
  s.center = column_stack(to_double(spec.H));
  s.phase_quad = kron(z.x(), a);
  s.phase_lin = column_stack(to_double(QMatrix(spec.dec.rational() * spec.K)));
  s.poly_map = Eigen::MatrixXd::Zero(Eigen::Index(m) * n, Eigen::Index(m) * n);
  return s;
}

}  // namespace

GaussianSum theta_sum(const ThetaSpec& spec, const SiegelPoint& z) {
  const int m = spec.m(), n = spec.n();
  GaussianSum s = common_sum(spec, z);
  const Eigen::MatrixXd root = sqrt_posdef(z.y());
  // (U Y^{1/2})_ik = sum_j U_ij root_jk, with U_ij = y[j m + i].
  for (int i = 0; i < m; ++i)
    for (int k = 0; k < n; ++k)
      for (int j = 0; j < n; ++j) s.poly_map(i * n + k, j * m + i) = root(j, k);
  s.poly = spec.coefficient_poly();
  s.prefactor = std::pow(z.y().determinant(), -0.5 * spec.lambda);
  return s;
}

GaussianSum borcherds_sum(const ThetaSpec& spec, const SiegelPoint& z) {
  const int m = spec.m(), n = spec.n();
  GaussianSum s = common_sum(spec, z);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) s.poly_map(i * n + j, j * m + i) = 1;
  s.poly = exp_weighted_laplace(spec.homogeneous_poly(), complex_matrix(spec.majorant_inverse()),
                                complex_matrix(z.y().inverse()), PiScalar<cd>{-0.125, -1});
  return s;
}

ThetaValue theta_eval(const ThetaSpec& spec, const SiegelPoint& z, double eps) {
  return evaluate_sum(theta_sum(spec, z), eps);
}

ThetaValue theta_eval_borcherds(const ThetaSpec& spec, const SiegelPoint& z, double eps) {
  return evaluate_sum(borcherds_sum(spec, z), eps);
}

}  // namespace stheta
