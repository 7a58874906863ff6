#include "stheta/json_io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace stheta {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

const Json& field(const Json& j, const char* key) {
  require(j.is_object() && j.contains(key), std::string("missing field '") + key + "'");
  return j.at(key);
}

// Checks a rectangular nested array and returns (rows, cols).
std::pair<int, int> shape_of(const Json& j) {
  require(j.is_array() && !j.empty(), "matrix must be a non-empty array of rows");
  const std::size_t cols = j.front().is_array() ? j.front().size() : 0;
  require(cols > 0, "matrix rows must be non-empty arrays");
  for (const auto& row : j) require(row.is_array() && row.size() == cols, "matrix rows must have equal length");
  return {static_cast<int>(j.size()), static_cast<int>(cols)};
}

template <class T, class F>
Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic> read_matrix(const Json& j, F&& entry) {
  const auto [rows, cols] = shape_of(j);
  Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic> a(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int k = 0; k < cols; ++k) a(i, k) = entry(j[i][k]);
  return a;
}

template <class M, class F>
Json write_matrix(const M& a, F&& entry) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index k = 0; k < a.cols(); ++k) row.push_back(entry(a(i, k)));
    out.push_back(std::move(row));
  }
  return out;
}

Json poly_fields(const ExactPoly& p) {
  Json terms = Json::array();
  const int m = p.rows(), n = p.cols();
  for (const auto& [mono, c] : p.terms()) {
    Json e = Json::array();
    for (int i = 0; i < m; ++i) {
      Json row = Json::array();
      for (int k = 0; k < n; ++k) row.push_back(mono.exps[std::size_t(i) * n + k]);
      e.push_back(std::move(row));
    }
    terms.push_back({{"exp", std::move(e)}, {"re", to_json(c.re)}, {"im", to_json(c.im)}, {"pi_pow", mono.pi_pow}});
  }
  return {{"m", m}, {"n", n}, {"terms", std::move(terms)}};
}

}  // namespace

Rational rational_from_json(const Json& j) {
  if (j.is_number_integer()) return Rational(j.get<long long>());
  require(j.is_string(), "rational must be a string such as \"1/2\" or an integer, got " + j.dump());
  return parse_rational(j.get<std::string>());
}

Json to_json(const Rational& q) { return to_string(q); }

Json to_json(const QMatrix& a) {
  return write_matrix(a, [](const Rational& q) { return to_json(q); });
}
Json to_json(const IntMatrix& a) {
  return write_matrix(a, [](long long v) { return Json(v); });
}
Json to_json(const Eigen::MatrixXd& a) {
  return write_matrix(a, [](double v) { return Json(v); });
}

QMatrix qmatrix_from_json(const Json& j) { return read_matrix<Rational>(j, rational_from_json); }

IntMatrix intmatrix_from_json(const Json& j) {
  return read_matrix<long long>(j, [](const Json& e) {
    require(e.is_number_integer(), "expected an integer entry, got " + e.dump());
    return e.get<long long>();
  });
}

Eigen::MatrixXd matrix_from_json(const Json& j) {
  return read_matrix<double>(j, [](const Json& e) {
    if (e.is_string()) return to_double(parse_rational(e.get<std::string>()));
    require(e.is_number(), "expected a numeric entry, got " + e.dump());
    return e.get<double>();
  });
}

Json to_json(const ExactPoly& p) { return poly_fields(p); }

ExactPoly poly_from_json(const Json& j) {
  const int m = field(j, "m").get<int>(), n = field(j, "n").get<int>();
  require(m >= 1 && n >= 1, "polynomial shape must be positive");
  ExactPoly p(m, n);
  for (const auto& t : field(j, "terms")) {
    const Json& e = field(t, "exp");
    const auto [rows, cols] = shape_of(e);
    require(rows == m && cols == n, "exponent matrix must be m x n");
    Monomial mono{std::vector<std::uint16_t>(std::size_t(m) * n, 0), t.value("pi_pow", 0)};
    for (int i = 0; i < m; ++i)
      for (int k = 0; k < n; ++k) {
        const Json& x = e[i][k];
        require(x.is_number_integer() && x.get<long long>() >= 0 && x.get<long long>() < 65536,
                "exponents must be small nonnegative integers");
        mono.exps[std::size_t(i) * n + k] = static_cast<std::uint16_t>(x.get<long long>());
      }
    const Rational re = t.contains("re") ? rational_from_json(t.at("re")) : Rational(0);
    const Rational im = t.contains("im") ? rational_from_json(t.at("im")) : Rational(0);
    p.add_term(std::move(mono), GaussRational(re, im));
  }
  return p;
}

Json to_json(const ExactExpPoly& g) {
  Json out = poly_fields(g.poly());
  out["B"] = write_matrix(g.b(), [](const GaussRational& c) {
    if (c.im != 0) throw std::invalid_argument("Gaussian matrix must be real for JSON output");
    return to_json(c.re);
  });
  out["B_pi_pow"] = g.b_pi_pow();
  return out;
}

ExactExpPoly exppoly_from_json(const Json& j) {
  ExactPoly p = poly_from_json(j);
  const QMatrix b = qmatrix_from_json(field(j, "B"));
  require(b.rows() == p.rows() && b.cols() == p.rows(), "B must be m x m");
  return ExactExpPoly(std::move(p), coeff_matrix<GaussRational>(b), j.value("B_pi_pow", 0));
}

IntMatrix form_from_json(const Json& j) {
  if (j.is_string()) return fixture_form(j.get<std::string>());
  return intmatrix_from_json(j);
}

Json to_json(const QuadFormDecomposition& dec) {
  Json out = {{"A", to_json(dec.a)},
              {"m", dec.m()},
              {"r", dec.r},
              {"s", dec.s},
              {"S", to_json(dec.S)},
              {"iota", to_json(dec.iota)},
              {"A_plus", to_json(dec.aplus)},
              {"A_minus", to_json(dec.aminus)},
              {"majorant", to_json(dec.majorant)},
              {"proj_plus", to_json(dec.proj_plus)}};
  if (dec.exact) {
    out["exact"] = {{"proj_plus", to_json(dec.exact->proj_plus)},
                    {"A_plus", to_json(dec.exact->aplus)},
                    {"A_minus", to_json(dec.exact->aminus)},
                    {"majorant", to_json(dec.exact->majorant)}};
  } else {
    out["exact"] = nullptr;
  }
  return out;
}

QuadFormDecomposition decomposition_from_json(const Json& j) {
  QuadFormDecomposition dec;
  dec.a = intmatrix_from_json(field(j, "A"));
  dec.r = field(j, "r").get<int>();
  dec.s = field(j, "s").get<int>();
  dec.S = matrix_from_json(field(j, "S"));
  dec.iota = matrix_from_json(field(j, "iota"));
  dec.aplus = matrix_from_json(field(j, "A_plus"));
  dec.aminus = matrix_from_json(field(j, "A_minus"));
  dec.majorant = matrix_from_json(field(j, "majorant"));
  dec.proj_plus = matrix_from_json(field(j, "proj_plus"));
  if (j.contains("exact") && !j.at("exact").is_null()) {
    const Json& e = j.at("exact");
    dec.exact = ExactSplitting{qmatrix_from_json(field(e, "proj_plus")), qmatrix_from_json(field(e, "A_plus")),
                               qmatrix_from_json(field(e, "A_minus")), qmatrix_from_json(field(e, "majorant"))};
  }
  require(dec.r + dec.s == dec.m(), "signature does not add up to the dimension");
  return dec;
}

bool same_decomposition(const QuadFormDecomposition& a, const QuadFormDecomposition& b) {
  if (a.a != b.a || a.r != b.r || a.s != b.s || a.S != b.S || a.iota != b.iota || a.aplus != b.aplus ||
      a.aminus != b.aminus || a.majorant != b.majorant || a.proj_plus != b.proj_plus)
    return false;
  if (a.exact.has_value() != b.exact.has_value()) return false;
  if (!a.exact) return true;
  return a.exact->proj_plus == b.exact->proj_plus && a.exact->aplus == b.exact->aplus &&
         a.exact->aminus == b.exact->aminus && a.exact->majorant == b.exact->majorant;
}

Json to_json(const SiegelPoint& z) { return {{"X", to_json(z.x())}, {"Y", to_json(z.y())}}; }

SiegelPoint siegel_from_json(const Json& j) {
  return SiegelPoint(matrix_from_json(field(j, "X")), matrix_from_json(field(j, "Y")));
}

Json to_json(const SymplecticMatrix& m) {
  return {{"blocks", {{"A", to_json(m.a())}, {"B", to_json(m.b())}, {"C", to_json(m.c())}, {"D", to_json(m.d())}}}};
}

SymplecticMatrix symplectic_from_json(const Json& j) {
  const Json& b = field(j, "blocks");
  return SymplecticMatrix::from_blocks(intmatrix_from_json(field(b, "A")), intmatrix_from_json(field(b, "B")),
                                       intmatrix_from_json(field(b, "C")), intmatrix_from_json(field(b, "D")));
}

EvalRequest eval_request_from_json(const Json& j) {
  require(j.is_object(), "spec must be a JSON object");
  const QuadForm form(form_from_json(field(j, "A")));
  const SiegelPoint z = siegel_from_json(field(j, "Z"));
  const int m = form.dim(), n = z.genus();
  auto characteristic = [&](const char* key) {
    if (!j.contains(key)) return QMatrix(QMatrix::Zero(m, n));
    QMatrix h = qmatrix_from_json(j.at(key));
    require(h.rows() == m && h.cols() == n, std::string(key) + " must be m x n");
    return h;
  };
  const QMatrix h = characteristic("H"), k = characteristic("K");

  const Json coeff = j.value("coeff", Json::object());
  const std::string type = coeff.value("type", decompose(form).s == 0 ? "posdef" : "indef");
  auto poly = [&](const char* key) {
    if (!coeff.contains(key)) return ExactPoly::one(m, n);
    ExactPoly p = poly_from_json(coeff.at(key));
    require(p.rows() == m && p.cols() == n, std::string(key) + " must be a polynomial in an m x n matrix");
    return p;
  };

  EvalRequest req{type == "posdef"  ? make_posdef_spec(form, poly("P_alpha"), h, k)
                  : type == "indef" ? make_indef_spec(form, poly("P_alpha"), poly("P_beta"), h, k)
                                    : throw std::invalid_argument("coeff type must be 'posdef' or 'indef'"),
                  z, j.value("eps", 1e-10)};
  require(req.eps > 0, "eps must be positive");
  return req;
}

Json to_json(const ThetaValue& v) {
  return {{"value", {v.value.real(), v.value.imag()}},
          {"tail_bound", v.tail_bound},
          {"terms_used", v.terms_used},
          {"radius", v.radius}};
}

Json to_json(const CheckReport& r) {
  Json out = {{"name", r.name},
              {"lhs", {r.lhs.real(), r.lhs.imag()}},
              {"rhs", {r.rhs.real(), r.rhs.imag()}},
              {"residual", r.residual},
              {"tolerance", r.tolerance},
              {"passed", r.passed},
              {"metadata", r.metadata}};
  if (!r.detail.empty()) out["detail"] = r.detail;
  return out;
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), "cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw std::invalid_argument("malformed JSON in '" + path + "': " + e.what());
  }
}

}  // namespace stheta
