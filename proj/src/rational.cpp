#include "stheta/rational.hpp"

#include <cctype>

namespace stheta {

namespace {

BigInt parse_integer(std::string_view s, std::string_view whole) {
  if (s.empty()) throw std::invalid_argument("empty integer in rational '" + std::string(whole) + "'");
  std::size_t pos = 0;
  if (s[0] == '+' || s[0] == '-') pos = 1;
  if (pos == s.size()) throw std::invalid_argument("bad rational '" + std::string(whole) + "'");
  for (std::size_t k = pos; k < s.size(); ++k)
    if (!std::isdigit(static_cast<unsigned char>(s[k])))
      throw std::invalid_argument("bad rational '" + std::string(whole) + "'");
  std::string digits(s[0] == '+' ? s.substr(1) : s);
  return BigInt(digits);
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  const std::string_view s = trim(text);
  if (const auto slash = s.find('/'); slash != std::string_view::npos) {
    const BigInt p = parse_integer(trim(s.substr(0, slash)), text);
    const BigInt q = parse_integer(trim(s.substr(slash + 1)), text);
    if (q == 0) throw std::invalid_argument("zero denominator in '" + std::string(text) + "'");
    return Rational(p, q);
  }
  if (const auto dot = s.find('.'); dot != std::string_view::npos) {
    std::string_view int_part = s.substr(0, dot);
    const std::string_view frac_part = s.substr(dot + 1);
    bool negative = false;
    if (!int_part.empty() && (int_part[0] == '-' || int_part[0] == '+')) {
      negative = int_part[0] == '-';
      int_part.remove_prefix(1);
    }
    if (int_part.empty() && frac_part.empty())
      throw std::invalid_argument("bad rational '" + std::string(text) + "'");
    const BigInt ip = int_part.empty() ? BigInt(0) : parse_integer(int_part, text);
    const BigInt fp = frac_part.empty() ? BigInt(0) : parse_integer(frac_part, text);
    if (!frac_part.empty() && (frac_part[0] == '-' || frac_part[0] == '+'))
      throw std::invalid_argument("bad rational '" + std::string(text) + "'");
    BigInt scale = 1;
    for (std::size_t k = 0; k < frac_part.size(); ++k) scale *= 10;
    Rational r = Rational(ip) + Rational(fp, scale);
    return negative ? Rational(-r) : r;
  }
  return Rational(parse_integer(s, text));
}

std::string to_string(const Rational& q) {
  return numerator(q).str() + "/" + denominator(q).str();
}

BigInt floor_div(const BigInt& a, const BigInt& b) {
  BigInt q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) q -= 1;
  return q;
}

Rational frac(const Rational& q) {
  const BigInt fl = floor_div(numerator(q), denominator(q));
  return q - Rational(fl);
}

QMatrix inverse(const QMatrix& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("inverse of a non-square matrix");
  const Eigen::Index n = a.rows();
  QMatrix work = a;
  QMatrix inv = QMatrix::Identity(n, n);
  for (Eigen::Index col = 0; col < n; ++col) {
    Eigen::Index pivot = col;
    while (pivot < n && work(pivot, col) == 0) ++pivot;
    if (pivot == n) throw std::domain_error("singular rational matrix");
    if (pivot != col) {
      work.row(pivot).swap(work.row(col));
      inv.row(pivot).swap(inv.row(col));
    }
    const Rational p = work(col, col);
    for (Eigen::Index j = 0; j < n; ++j) {
      work(col, j) /= p;
      inv(col, j) /= p;
    }
    for (Eigen::Index i = 0; i < n; ++i) {
      if (i == col || work(i, col) == 0) continue;
      const Rational f = work(i, col);
      for (Eigen::Index j = 0; j < n; ++j) {
        work(i, j) -= f * work(col, j);
        inv(i, j) -= f * inv(col, j);
      }
    }
  }
  return inv;
}

QMatrix to_rational(const IntMatrix& a) {
  QMatrix out(a.rows(), a.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) out(i, j) = Rational(a(i, j));
  return out;
}

Eigen::MatrixXd to_double(const QMatrix& a) {
  Eigen::MatrixXd out(a.rows(), a.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) out(i, j) = to_double(a(i, j));
  return out;
}

}  // namespace stheta
