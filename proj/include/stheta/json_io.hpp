#pragma once

// JSON encodings shared by the command line tool and its tests. Rationals are
// "p/q" strings; float matrices are plain nested arrays; all matrices are row-major.

#include "stheta/theta.hpp"
#include "stheta/verify.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace stheta {

using Json = nlohmann::json;

/// Accepts "p/q", "p", decimal strings and JSON integers. Throws std::invalid_argument otherwise.
Rational rational_from_json(const Json& j);
Json to_json(const Rational& q);

Json to_json(const QMatrix& a);
Json to_json(const IntMatrix& a);
Json to_json(const Eigen::MatrixXd& a);
QMatrix qmatrix_from_json(const Json& j);
IntMatrix intmatrix_from_json(const Json& j);
Eigen::MatrixXd matrix_from_json(const Json& j);

/// {"m","n","terms":[{"exp":[[..]],"re","im","pi_pow"}]}, terms in monomial order.
Json to_json(const ExactPoly& p);
ExactPoly poly_from_json(const Json& j);
/// The polynomial fields plus "B" (rational strings) and "B_pi_pow".
Json to_json(const ExactExpPoly& g);
ExactExpPoly exppoly_from_json(const Json& j);

/// A fixture name or an integer matrix.
IntMatrix form_from_json(const Json& j);

Json to_json(const QuadFormDecomposition& dec);
QuadFormDecomposition decomposition_from_json(const Json& j);
bool same_decomposition(const QuadFormDecomposition& a, const QuadFormDecomposition& b);

/// {"X":[[..]],"Y":[[..]]}
Json to_json(const SiegelPoint& z);
SiegelPoint siegel_from_json(const Json& j);
/// {"blocks":{"A","B","C","D"}}
Json to_json(const SymplecticMatrix& m);
SymplecticMatrix symplectic_from_json(const Json& j);

struct EvalRequest {
  ThetaSpec spec;
  SiegelPoint z;
  double eps = 1e-10;
};

/// {"A", "H", "K", "coeff":{"type":"posdef"|"indef","P_alpha","P_beta"}, "Z", "eps"}.
/// Missing H, K default to zero and missing polynomials to 1; the genus comes from Z.
EvalRequest eval_request_from_json(const Json& j);

Json to_json(const ThetaValue& v);
Json to_json(const CheckReport& r);

/// Reads a JSON document from a file; std::invalid_argument on I/O or parse failure.
Json read_json_file(const std::string& path);

}  // namespace stheta
