#include "stheta/quadform.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include <algorithm>
#include <cctype>
#include <numeric>
#include <sstream>

namespace stheta {

BigInt exact_determinant(const IntMatrix& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("determinant of a non-square matrix");
  const Eigen::Index n = a.rows();
  if (n == 0) return 1;
  std::vector<std::vector<BigInt>> m(n, std::vector<BigInt>(n));
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) m[i][j] = a(i, j);
  BigInt prev = 1;
  int sign = 1;
  for (Eigen::Index k = 0; k < n - 1; ++k) {
    if (m[k][k] == 0) {
      Eigen::Index p = k + 1;
      while (p < n && m[p][k] == 0) ++p;
      if (p == n) return 0;
      std::swap(m[p], m[k]);
      sign = -sign;
    }
    for (Eigen::Index i = k + 1; i < n; ++i)
      for (Eigen::Index j = k + 1; j < n; ++j) m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
    prev = m[k][k];
  }
  return sign * m[n - 1][n - 1];
}

QuadForm::QuadForm(IntMatrix a) : a_(std::move(a)) {
  if (a_.rows() == 0 || a_.rows() != a_.cols()) throw std::invalid_argument("quadratic form must be a nonempty square matrix");
  if (a_ != a_.transpose()) throw std::invalid_argument("quadratic form must be symmetric");
  det_ = exact_determinant(a_);
  if (det_ == 0) throw std::invalid_argument("quadratic form is degenerate (det A = 0)");
}

bool is_even(const IntMatrix& a) {
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    if (a(i, i) % 2 != 0) return false;
  return true;
}

bool is_unimodular(const IntMatrix& a) {
  const BigInt d = exact_determinant(a);
  return d == 1 || d == -1;
}

namespace {

// Continued-fraction approximation with bounded denominator, or nullopt if none is close.
std::optional<Rational> rationalize(double x, long long max_den = 1'000'000, double tol = 1e-9) {
  if (!std::isfinite(x)) return std::nullopt;
  long long h0 = 0, h1 = 1, k0 = 1, k1 = 0;
  double v = x;
  for (int it = 0; it < 64; ++it) {
    const double a = std::floor(v);
    if (std::abs(a) > 1e15) break;
    const long long ai = static_cast<long long>(a);
    const long long h2 = ai * h1 + h0, k2 = ai * k1 + k0;
    if (k2 > max_den) break;
    h0 = h1;
    h1 = h2;
    k0 = k1;
    k1 = k2;
    if (std::abs(static_cast<double>(h1) / static_cast<double>(k1) - x) <= tol) return Rational(h1, k1);
    const double frac_part = v - a;
    if (frac_part < 1e-15) break;
    v = 1.0 / frac_part;
  }
  return std::nullopt;
}

std::optional<ExactSplitting> exact_splitting(const QMatrix& a, const Eigen::MatrixXd& proj, int r) {
  const Eigen::Index m = a.rows();
  QMatrix p(m, m);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < m; ++j) {
      auto q = rationalize(proj(i, j));
      if (!q) return std::nullopt;
      p(i, j) = *q;
    }
  if (p != QMatrix(p.transpose())) return std::nullopt;
  if (QMatrix(p * p) != p) return std::nullopt;
  if (QMatrix(a * p) != QMatrix(p * a)) return std::nullopt;
  Rational tr = 0;
  for (Eigen::Index i = 0; i < m; ++i) tr += p(i, i);
  if (tr != r) return std::nullopt;
  ExactSplitting e;
  e.proj_plus = p;
  e.aplus = a * p;
  e.aminus = a - e.aplus;
  e.majorant = e.aplus - e.aminus;
  return e;
}

}  // namespace

QuadFormDecomposition decompose(const QuadForm& form) {
  const Eigen::MatrixXd a = form.real();
  const int m = form.dim();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
  if (es.info() != Eigen::Success) throw std::domain_error("eigendecomposition failed");
  const Eigen::VectorXd& lam = es.eigenvalues();
  const double scale = std::max(1.0, lam.cwiseAbs().maxCoeff());
  for (int k = 0; k < m; ++k)
    if (std::abs(lam(k)) < 1e-12 * scale) throw std::domain_error("quadratic form is numerically singular");

  // Positive eigenvalues first, in descending order, then the negative ones.
  std::vector<int> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int x, int y) { return lam(x) > lam(y); });

  QuadFormDecomposition dec;
  dec.a = form.matrix();
  dec.S.resize(m, m);
  dec.iota = Eigen::MatrixXd::Zero(m, m);
  dec.proj_plus = Eigen::MatrixXd::Zero(m, m);
  for (int c = 0; c < m; ++c) {
    const int k = order[c];
    const Eigen::VectorXd v = es.eigenvectors().col(k);
    dec.S.col(c) = v / std::sqrt(std::abs(lam(k)));
    if (lam(k) > 0) {
      ++dec.r;
      dec.iota(c, c) = 1;
      dec.proj_plus += v * v.transpose();
    } else {
      ++dec.s;
      dec.iota(c, c) = -1;
    }
  }
  dec.proj_plus = 0.5 * (dec.proj_plus + dec.proj_plus.transpose());
  dec.aplus = a * dec.proj_plus;
  dec.aplus = 0.5 * (dec.aplus + dec.aplus.transpose());
  dec.aminus = a - dec.aplus;
  dec.majorant = dec.aplus - dec.aminus;

  auto exact = exact_splitting(form.rational(), dec.proj_plus, dec.r);
  if (exact && (to_double(exact->proj_plus) - dec.proj_plus).cwiseAbs().maxCoeff() <= 1e-9) {
    dec.proj_plus = to_double(exact->proj_plus);
    dec.aplus = to_double(exact->aplus);
    dec.aminus = to_double(exact->aminus);
    dec.majorant = to_double(exact->majorant);
    dec.exact = std::move(exact);
  }
  return dec;
}

double decomposition_defect(const QuadFormDecomposition& dec) {
  const Eigen::MatrixXd a = dec.a.cast<double>();
  const double na = std::max(1.0, a.norm());
  double d = 0;
  d = std::max(d, (dec.S.transpose() * a * dec.S - dec.iota).norm());
  d = std::max(d, (a - dec.aplus - dec.aminus).norm() / na);
  d = std::max(d, (dec.majorant - dec.aplus + dec.aminus).norm() / na);
  const Eigen::MatrixXd sinv = dec.S.inverse();
  d = std::max(d, (dec.majorant - sinv.transpose() * sinv).norm() / na);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ep(dec.aplus), em(dec.aminus), emaj(dec.majorant);
  const double tol = 1e-10 * na;
  int rank_plus = 0, rank_minus = 0;
  for (Eigen::Index k = 0; k < ep.eigenvalues().size(); ++k) {
    if (ep.eigenvalues()(k) < -tol) d = std::max(d, -ep.eigenvalues()(k));
    if (ep.eigenvalues()(k) > tol) ++rank_plus;
    if (em.eigenvalues()(k) > tol) d = std::max(d, em.eigenvalues()(k));
    if (em.eigenvalues()(k) < -tol) ++rank_minus;
  }
  if (rank_plus != dec.r || rank_minus != dec.s) d = std::max(d, 1.0);
  if (emaj.eigenvalues().minCoeff() <= 0) d = std::max(d, 1.0);
  return d;
}

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> project(const QuadFormDecomposition& dec, const Eigen::MatrixXd& u) {
  if (u.rows() != dec.m()) throw std::invalid_argument("projection input must have m rows");
  Eigen::MatrixXd up = dec.proj_plus * u;
  Eigen::MatrixXd um = u - up;
  return {std::move(up), std::move(um)};
}

SmithForm smith_normal_form(const IntMatrix& a) {
  const Eigen::Index rows = a.rows(), cols = a.cols();
  SmithForm sf{a, IntMatrix::Identity(rows, rows), IntMatrix::Identity(cols, cols)};
  IntMatrix& d = sf.d;
  auto guard = [](long long v) {
    if (std::llabs(v) > (1LL << 60)) throw ResourceLimitError("Smith normal form entries overflow");
  };
  const Eigen::Index n = std::min(rows, cols);
  for (Eigen::Index t = 0; t < n; ++t) {
    while (true) {
      // Smallest nonzero entry of the trailing block to the pivot.
      Eigen::Index pi = -1, pj = -1;
      for (Eigen::Index i = t; i < rows; ++i)
        for (Eigen::Index j = t; j < cols; ++j)
          if (d(i, j) != 0 && (pi < 0 || std::llabs(d(i, j)) < std::llabs(d(pi, pj)))) {
            pi = i;
            pj = j;
          }
      if (pi < 0) return sf;
      d.row(t).swap(d.row(pi));
      sf.u.row(t).swap(sf.u.row(pi));
      d.col(t).swap(d.col(pj));
      sf.v.col(t).swap(sf.v.col(pj));

      bool clean = true;
      for (Eigen::Index i = t + 1; i < rows; ++i) {
        const long long q = d(i, t) / d(t, t);
        if (q != 0) {
          d.row(i) -= q * d.row(t);
          sf.u.row(i) -= q * sf.u.row(t);
          for (Eigen::Index j = 0; j < cols; ++j) guard(d(i, j));
        }
        if (d(i, t) != 0) clean = false;
      }
      for (Eigen::Index j = t + 1; j < cols; ++j) {
        const long long q = d(t, j) / d(t, t);
        if (q != 0) {
          d.col(j) -= q * d.col(t);
          sf.v.col(j) -= q * sf.v.col(t);
          for (Eigen::Index i = 0; i < rows; ++i) guard(d(i, j));
        }
        if (d(t, j) != 0) clean = false;
      }
      if (!clean) continue;
      // Divisibility: fold a row with a non-multiple into the pivot row.
      Eigen::Index bad = -1;
      for (Eigen::Index i = t + 1; i < rows && bad < 0; ++i)
        for (Eigen::Index j = t + 1; j < cols; ++j)
          if (d(i, j) % d(t, t) != 0) {
            bad = i;
            break;
          }
      if (bad < 0) break;
      d.row(t) += d.row(bad);
      sf.u.row(t) += sf.u.row(bad);
    }
    if (d(t, t) < 0) {
      d.row(t) *= -1;
      sf.u.row(t) *= -1;
    }
  }
  return sf;
}

std::vector<QMatrix> coset_reps(const QuadForm& form, int n, std::size_t cap) {
  if (n < 1) throw std::invalid_argument("genus must be positive");
  const int m = form.dim();
  const BigInt det = abs(form.det());
  BigInt total = 1;
  for (int k = 0; k < n; ++k) total *= det;
  if (total > BigInt(cap))
    throw ResourceLimitError("coset count |det A|^n = " + total.str() + " exceeds the cap of " + std::to_string(cap));

  // A^{-1} Z^m = V D^{-1} Z^m.
  const SmithForm sf = smith_normal_form(form.matrix());
  std::vector<std::vector<Rational>> cols;
  std::vector<long long> k(m, 0);
  while (true) {
    std::vector<Rational> col(m);
    for (int i = 0; i < m; ++i) {
      Rational acc = 0;
      for (int j = 0; j < m; ++j) acc += Rational(sf.v(i, j)) * Rational(k[j], sf.d(j, j));
      col[i] = frac(acc);
    }
    cols.push_back(std::move(col));
    int pos = m - 1;
    while (pos >= 0 && ++k[pos] == sf.d(pos, pos)) k[pos--] = 0;
    if (pos < 0) break;
  }
  std::sort(cols.begin(), cols.end());
  cols.erase(std::unique(cols.begin(), cols.end()), cols.end());
  if (BigInt(cols.size()) != det) throw std::logic_error("coset enumeration produced the wrong count");

  std::vector<QMatrix> reps;
  reps.reserve(static_cast<std::size_t>(total));
  std::vector<std::size_t> idx(n, 0);
  while (true) {
    QMatrix j(m, n);
    for (int c = 0; c < n; ++c)
      for (int i = 0; i < m; ++i) j(i, c) = cols[idx[c]][i];
    reps.push_back(std::move(j));
    int pos = n - 1;
    while (pos >= 0 && ++idx[pos] == cols.size()) idx[pos--] = 0;
    if (pos < 0) break;
  }
  return reps;
}

LatticeEnumerator::LatticeEnumerator(const Eigen::MatrixXd& gram) : dim_(static_cast<int>(gram.rows())), gram_(gram) {
  if (gram.rows() == 0 || gram.rows() != gram.cols()) throw std::invalid_argument("Gram matrix must be square");
  if ((gram - gram.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, gram.cwiseAbs().maxCoeff()))
    throw std::domain_error("Gram matrix is not symmetric");
  gram_ = 0.5 * (gram + gram.transpose());
  Eigen::LLT<Eigen::MatrixXd> llt(gram_);
  if (llt.info() != Eigen::Success) throw std::domain_error("Gram matrix is not positive definite");
  r_ = llt.matrixU();
  diag2_.resize(dim_);
  mu_ = Eigen::MatrixXd::Zero(dim_, dim_);
  sqrt_det_ = 1;
  for (int i = 0; i < dim_; ++i) {
    if (!(r_(i, i) > 0)) throw std::domain_error("Gram matrix is not positive definite");
    diag2_(i) = r_(i, i) * r_(i, i);
    sqrt_det_ *= r_(i, i);
    for (int j = i + 1; j < dim_; ++j) mu_(i, j) = r_(i, j) / r_(i, i);
  }
}

double LatticeEnumerator::quad_value(const std::vector<long long>& x, const Eigen::VectorXd& center) const {
  double q = 0;
  for (int i = 0; i < dim_; ++i) {
    const double yi = static_cast<double>(x[i]) + center(i);
    double row = 0;
    for (int j = 0; j < dim_; ++j) row += gram_(i, j) * (static_cast<double>(x[j]) + center(j));
    q += yi * row;
  }
  return q;
}

std::pair<long long, long long> LatticeEnumerator::top_range(const Eigen::VectorXd& center, double r2) const {
  if (center.size() != dim_) throw std::invalid_argument("lattice center has the wrong dimension");
  if (!(r2 >= 0)) return {1, 0};
  const int i = dim_ - 1;
  const double slack = 1e-9 * (1.0 + r2);
  const double w = std::sqrt(r2 / diag2_(i)) + slack;
  return {static_cast<long long>(std::ceil(-center(i) - w)), static_cast<long long>(std::floor(-center(i) + w))};
}

std::vector<std::vector<long long>> lattice_points(const Eigen::MatrixXd& gram, const Eigen::VectorXd& center,
                                                   double r2, std::size_t cap) {
  if (r2 < 0) throw std::invalid_argument("squared radius must be nonnegative");
  LatticeEnumerator en(gram);
  std::vector<std::vector<long long>> out;
  en.enumerate(center, r2, [&](const std::vector<long long>& x, double) {
    if (out.size() >= cap) throw ResourceLimitError("lattice point count exceeds the cap of " + std::to_string(cap));
    out.push_back(x);
  });
  return out;
}

namespace {

IntMatrix e8_gram() {
  // Bourbaki labelling: chain 1-3-4-5-6-7-8 with node 2 attached to node 4.
  IntMatrix a = IntMatrix::Zero(8, 8);
  for (int i = 0; i < 8; ++i) a(i, i) = 2;
  const int edges[][2] = {{1, 3}, {3, 4}, {4, 5}, {5, 6}, {6, 7}, {7, 8}, {2, 4}};
  for (auto [x, y] : edges) a(x - 1, y - 1) = a(y - 1, x - 1) = -1;
  return a;
}

IntMatrix block_sum(const IntMatrix& a, const IntMatrix& b) {
  IntMatrix out = IntMatrix::Zero(a.rows() + b.rows(), a.cols() + b.cols());
  out.topLeftCorner(a.rows(), a.cols()) = a;
  out.bottomRightCorner(b.rows(), b.cols()) = b;
  return out;
}

IntMatrix single_fixture(std::string name) {
  name.erase(std::remove_if(name.begin(), name.end(), [](unsigned char c) { return std::isspace(c); }), name.end());
  bool negate = false;
  if (!name.empty() && name[0] == '-') {
    negate = true;
    name = name.substr(1);
  }
  IntMatrix a;
  if (name == "e8") {
    a = e8_gram();
  } else if (name == "h2") {
    a.resize(2, 2);
    a << 0, 1, 1, 0;
  } else if (name == "a1") {
    a = IntMatrix::Constant(1, 1, 2);
  } else if (name == "a2") {
    a.resize(2, 2);
    a << 2, -1, -1, 2;
  } else if (name == "d4") {
    a.resize(4, 4);
    a << 2, -1, 0, 0, -1, 2, -1, -1, 0, -1, 2, 0, 0, -1, 0, 2;
  } else if (name.rfind("diag:", 0) == 0) {
    std::vector<long long> entries;
    std::stringstream ss(name.substr(5));
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        std::size_t used = 0;
        entries.push_back(std::stoll(item, &used));
        if (used != item.size()) throw std::invalid_argument("");
      } catch (const std::exception&) {
        throw std::invalid_argument("bad diagonal entry '" + item + "' in fixture name");
      }
    }
    if (entries.empty()) throw std::invalid_argument("empty diagonal fixture");
    a = IntMatrix::Zero(entries.size(), entries.size());
    for (std::size_t k = 0; k < entries.size(); ++k) a(k, k) = entries[k];
  } else {
    throw std::invalid_argument("unknown form fixture '" + name + "'");
  }
  if (negate) a = -a;
  return a;
}

}  // namespace

IntMatrix fixture_form(const std::string& name) {
  // Split on '+' but keep "diag:..." lists (which never contain '+') intact.
  IntMatrix out;
  std::stringstream ss(name);
  std::string part;
  bool first = true;
  while (std::getline(ss, part, '+')) {
    if (part.empty()) throw std::invalid_argument("empty component in fixture name '" + name + "'");
    IntMatrix a = single_fixture(part);
    out = first ? a : block_sum(out, a);
    first = false;
  }
  if (first) throw std::invalid_argument("empty fixture name");
  return out;
}

std::vector<std::string> fixture_names() {
  return {"a1", "a2", "d4", "e8", "-e8", "h2", "h2+e8", "diag:2,-2", "diag:2,2,-2", "diag:<a>,<b>,..."};
}

}  // namespace stheta
