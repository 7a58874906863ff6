#include "stheta/polyalg.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace stheta {

std::size_t monomial_count(int vars, int degree) {
  // binom(degree + vars - 1, vars - 1), saturating.
  if (vars <= 0) return degree == 0 ? 1 : 0;
  const int k = vars - 1;
  const unsigned __int128 limit = std::numeric_limits<std::size_t>::max();
  unsigned __int128 r = 1;
  for (int i = 1; i <= k; ++i) {
    r = r * static_cast<unsigned __int128>(degree + i) / static_cast<unsigned __int128>(i);
    if (r > limit) return std::numeric_limits<std::size_t>::max();
  }
  return static_cast<std::size_t>(r);
}

namespace {

// All exponent vectors of length m summing to d, in lexicographically descending order.
void compositions(int m, int d, std::vector<std::uint16_t>& cur, std::vector<std::vector<std::uint16_t>>& out) {
  if (int(cur.size()) == m - 1) {
    cur.push_back(static_cast<std::uint16_t>(d));
    out.push_back(cur);
    cur.pop_back();
    return;
  }
  for (int e = d; e >= 0; --e) {
    cur.push_back(static_cast<std::uint16_t>(e));
    compositions(m, d - e, cur, out);
    cur.pop_back();
  }
}

// Reduced row echelon form in place; returns pivot columns.
template <class F>
std::vector<int> rref(std::vector<std::vector<F>>& rows, int ncols) {
  std::vector<int> pivots;
  std::size_t r = 0;
  for (int c = 0; c < ncols && r < rows.size(); ++c) {
    std::size_t p = r;
    while (p < rows.size() && rows[p][c] == F(0)) ++p;
    if (p == rows.size()) continue;
    std::swap(rows[p], rows[r]);
    const F inv = F(1) / rows[r][c];
    for (auto& x : rows[r]) x = x * inv;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (i == r || rows[i][c] == F(0)) continue;
      const F f = rows[i][c];
      for (int k = c; k < ncols; ++k)
        if (rows[r][k] != F(0)) rows[i][k] = rows[i][k] - f * rows[r][k];
    }
    pivots.push_back(c);
    ++r;
  }
  return pivots;
}

ExactPoly determinant_poly(int m, int n, const std::vector<int>& rows_sel) {
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  ExactPoly det(m, n);
  do {
    int inversions = 0;
    for (int a = 0; a < n; ++a)
      for (int b = a + 1; b < n; ++b)
        if (perm[a] > perm[b]) ++inversions;
    Monomial mono{std::vector<std::uint16_t>(std::size_t(m) * n, 0), 0};
    for (int k = 0; k < n; ++k) mono.exps[std::size_t(rows_sel[k]) * n + perm[k]] += 1;
    det.add_term(std::move(mono), GaussRational(inversions % 2 ? -1 : 1));
  } while (std::next_permutation(perm.begin(), perm.end()));
  return det;
}

}  // namespace

std::vector<ExactPoly> basis_homopol(int m, int n, int alpha, std::size_t monomial_cap) {
  if (m < 1 || n < 1) throw std::invalid_argument("basis_homopol needs m, n >= 1");
  if (alpha < 0) throw std::invalid_argument("basis_homopol needs alpha >= 0");
  if (alpha == 0) return {ExactPoly::one(m, n)};
  if (m < n) return {};
  if (monomial_count(m * n, n * alpha) > monomial_cap)
    throw ResourceLimitError("monomial space of degree " + std::to_string(n * alpha) + " in " +
                             std::to_string(m * n) + " variables exceeds the cap of " + std::to_string(monomial_cap));

  // E_ii P = alpha P forces every column to have degree alpha.
  std::vector<std::vector<std::uint16_t>> col_monos;
  std::vector<std::uint16_t> cur;
  compositions(m, alpha, cur, col_monos);

  std::vector<Monomial> unknowns;
  std::vector<std::size_t> digits(n, 0);
  while (true) {
    Monomial mono{std::vector<std::uint16_t>(std::size_t(m) * n, 0), 0};
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < m; ++i) mono.exps[std::size_t(i) * n + j] = col_monos[digits[j]][i];
    unknowns.push_back(std::move(mono));
    int pos = n - 1;
    while (pos >= 0 && ++digits[pos] == col_monos.size()) digits[pos--] = 0;
    if (pos < 0) break;
  }
  const int nu = static_cast<int>(unknowns.size());

  // Rows: coefficients of E_ij(sum_k x_k mono_k) for i != j, keyed by result monomial.
  std::map<std::pair<int, Monomial>, std::size_t> row_index;
  std::vector<std::vector<Rational>> rows;
  for (int k = 0; k < nu; ++k) {
    ExactPoly x(m, n);
    x.add_term(unknowns[k], GaussRational(1));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        if (i == j) continue;
        const ExactPoly image = euler_entry(x, i, j);
        for (const auto& [mono, c] : image.terms()) {
          auto key = std::make_pair(i * n + j, mono);
          auto it = row_index.find(key);
          if (it == row_index.end()) {
            it = row_index.emplace(key, rows.size()).first;
            rows.emplace_back(nu, Rational(0));
          }
          rows[it->second][k] += c.re;
        }
      }
  }

  const std::vector<int> pivots = rref(rows, nu);
  std::vector<bool> is_pivot(nu, false);
  for (int c : pivots) is_pivot[c] = true;

  std::vector<ExactPoly> basis;
  for (int free = 0; free < nu; ++free) {
    if (is_pivot[free]) continue;
    std::vector<Rational> v(nu, Rational(0));
    v[free] = 1;
    for (std::size_t r = 0; r < pivots.size(); ++r) v[pivots[r]] = -rows[r][free];
    BigInt lcm = 1;
    for (const auto& q : v)
      if (q != 0) lcm = boost::multiprecision::lcm(lcm, denominator(q));
    BigInt g = 0;
    for (auto& q : v) {
      q *= Rational(lcm);
      if (q != 0) g = boost::multiprecision::gcd(g, numerator(q));
    }
    int sign = 0;
    for (const auto& q : v)
      if (q != 0) {
        sign = q > 0 ? 1 : -1;
        break;
      }
    ExactPoly p(m, n);
    for (int k = 0; k < nu; ++k)
      if (v[k] != 0) p.add_term(unknowns[k], GaussRational(v[k] / Rational(g) * sign));
    basis.push_back(std::move(p));
  }
  return basis;
}

std::vector<ExactPoly> minor_products(int m, int n, int alpha) {
  if (alpha == 0) return {ExactPoly::one(m, n)};
  if (m < n) return {};
  std::vector<ExactPoly> minors;
  std::vector<bool> mask(m, false);
  std::fill(mask.begin(), mask.begin() + n, true);
  do {
    std::vector<int> sel;
    for (int i = 0; i < m; ++i)
      if (mask[i]) sel.push_back(i);
    minors.push_back(determinant_poly(m, n, sel));
  } while (std::prev_permutation(mask.begin(), mask.end()));

  std::vector<ExactPoly> out;
  std::vector<std::size_t> idx(alpha, 0);
  while (true) {
    ExactPoly p = ExactPoly::one(m, n);
    for (auto k : idx) p *= minors[k];
    out.push_back(std::move(p));
    // Next non-decreasing index tuple.
    int pos = alpha - 1;
    while (pos >= 0 && idx[pos] == minors.size() - 1) --pos;
    if (pos < 0) break;
    ++idx[pos];
    for (int q = pos + 1; q < alpha; ++q) idx[q] = idx[pos];
  }
  return out;
}

std::size_t span_rank(const std::vector<ExactPoly>& polys) {
  std::map<Monomial, int> cols;
  for (const auto& p : polys)
    for (const auto& [mono, c] : p.terms()) cols.emplace(mono, 0);
  int nc = 0;
  for (auto& [mono, idx] : cols) idx = nc++;
  std::vector<std::vector<GaussRational>> rows;
  for (const auto& p : polys) {
    std::vector<GaussRational> row(nc, GaussRational(0));
    for (const auto& [mono, c] : p.terms()) row[cols[mono]] = c;
    rows.push_back(std::move(row));
  }
  return rref(rows, nc).size();
}

}  // namespace stheta
