#include <doctest.h>

#include "stheta/json_io.hpp"

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sys/wait.h>

using namespace stheta;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

// Runs the command line tool with stderr discarded.
Run run(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " " + STHETA_CLI + std::string(" ") + args + " 2>/dev/null";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 4096> buf{};
  std::size_t got = 0;
  while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), got);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string write_temp(const std::string& name, const std::string& text) {
  const auto path = std::filesystem::temp_directory_path() / ("stheta_test_" + name);
  std::ofstream(path) << text;
  return path.string();
}

ExactPoly var(int m, int n, int i, int j) { return ExactPoly::variable(m, n, i, j); }

}  // namespace

TEST_CASE("rationals and matrices round trip") {
  CHECK(to_json(Rational(-3, 6)) == "-1/2");
  CHECK(to_json(Rational(4)) == "4/1");
  CHECK(rational_from_json(Json("0.25")) == Rational(1, 4));
  CHECK(rational_from_json(Json(7)) == Rational(7));
  CHECK_THROWS_AS(rational_from_json(Json(0.5)), std::invalid_argument);

  QMatrix q(2, 1);
  q << Rational(1, 3), Rational(-5, 7);
  CHECK(qmatrix_from_json(to_json(q)) == q);
  const IntMatrix a = fixture_form("e8");
  CHECK(intmatrix_from_json(to_json(a)) == a);
  CHECK_THROWS_AS(intmatrix_from_json(Json::parse("[[1,2],[3]]")), std::invalid_argument);
  CHECK_THROWS_AS(intmatrix_from_json(Json::parse("[[1.5]]")), std::invalid_argument);
}

TEST_CASE("polynomials round trip") {
  for (int alpha : {1, 2}) {
    for (const auto& p : basis_homopol(2, 2, alpha)) {
      const Json j = to_json(p);
      CHECK(poly_from_json(j) == p);
      CHECK(poly_from_json(Json::parse(j.dump())) == p);
    }
  }
  const ThetaSpec spec = make_indef_spec(QuadForm(fixture_form("diag:2,-2")), var(2, 1, 0, 0) * var(2, 1, 0, 0),
                                         var(2, 1, 1, 0));
  const ExactExpPoly& g = *std::get<IndefCoeff>(spec.coeff).g_exact;
  const Json jg = to_json(g);
  CHECK(jg.at("B_pi_pow") == 1);
  CHECK(jg.at("B")[1][1] == "-4/1");
  const ExactExpPoly back = exppoly_from_json(jg);
  CHECK(back.poly() == g.poly());
  CHECK((back.b() == g.b()));
  CHECK(back.b_pi_pow() == g.b_pi_pow());
  CHECK_THROWS_AS(poly_from_json(Json::parse(R"({"m":1,"n":1,"terms":[{"exp":[[1,2]],"re":"1"}]})")),
                  std::invalid_argument);
}

TEST_CASE("decompositions and points round trip") {
  for (const char* name : {"e8", "h2", "diag:2,2,-2", "a2"}) {
    const auto dec = decompose(QuadForm(fixture_form(name)));
    CHECK(same_decomposition(decomposition_from_json(Json::parse(to_json(dec).dump())), dec));
  }
  IntMatrix irr(2, 2);
  irr << 1, 1, 1, -1;
  const auto dirr = decompose(QuadForm(irr));
  CHECK(to_json(dirr).at("exact").is_null());
  CHECK(same_decomposition(decomposition_from_json(to_json(dirr)), dirr));

  const SiegelPoint z = random_siegel_point(2, 4);
  const SiegelPoint z2 = siegel_from_json(Json::parse(to_json(z).dump()));
  CHECK(z2.x() == z.x());
  CHECK(z2.y() == z.y());
  const SymplecticMatrix j = SymplecticMatrix::inversion(2);
  CHECK(symplectic_from_json(to_json(j)).matrix() == j.matrix());
}

TEST_CASE("spec files") {
  const Json j = Json::parse(R"({"A":"a1","H":[["1/2"]],"Z":{"X":[[0]],"Y":[[1]]},"eps":1e-11})");
  const EvalRequest req = eval_request_from_json(j);
  CHECK(req.spec.H(0, 0) == Rational(1, 2));
  CHECK(req.spec.K(0, 0) == 0);
  CHECK(req.eps == 1e-11);
  CHECK(req.spec.lambda == 0);
  const auto v = theta_eval(req.spec, req.z, req.eps);
  CHECK(std::abs(v.value - 0.4157612) < 1e-6);

  const Json ind = Json::parse(R"({"A":[[0,1],[1,0]],"coeff":{"type":"indef",
      "P_alpha":{"m":2,"n":1,"terms":[{"exp":[[1],[0]],"re":"1","im":"0","pi_pow":0}]}},
      "Z":{"X":[[0.25]],"Y":[[1]]}})");
  const EvalRequest ri = eval_request_from_json(ind);
  CHECK(ri.spec.alpha() == 1);
  CHECK(ri.spec.beta() == 0);
  CHECK(ri.eps == 1e-10);

  CHECK_THROWS_AS(eval_request_from_json(Json::parse(R"({"A":"a1","Z":{"X":[[0]],"Y":[[-1]]}})")), std::domain_error);
  CHECK_THROWS_AS(eval_request_from_json(Json::parse(R"({"A":"a1","coeff":{"type":"odd"},"Z":{"X":[[0]],"Y":[[1]]}})")),
                  std::invalid_argument);
  CHECK_THROWS_AS(eval_request_from_json(Json::parse(R"({"A":"a1","H":[["1/2","0"]],"Z":{"X":[[0]],"Y":[[1]]}})")),
                  std::invalid_argument);
}

TEST_CASE("command line: basis, cosets, decompose") {
  const Run b = run("basis --m 2 --n 2 --alpha 1");
  REQUIRE(b.code == 0);
  const Json jb = Json::parse(b.out);
  CHECK(jb.at("dimension") == 1);
  const ExactPoly det = var(2, 2, 0, 0) * var(2, 2, 1, 1) - var(2, 2, 0, 1) * var(2, 2, 1, 0);
  CHECK(poly_from_json(jb.at("basis")[0]) == det);

  const Run c = run("cosets --form diag:2,-2 --genus 1");
  REQUIRE(c.code == 0);
  const Json jc = Json::parse(c.out);
  CHECK(jc.at("count") == 4);
  CHECK(jc.at("representatives").size() == 4);
  CHECK(qmatrix_from_json(jc.at("representatives")[3]) == QMatrix::Constant(2, 1, Rational(1, 2)));

  const Run d = run("decompose --form h2");
  REQUIRE(d.code == 0);
  CHECK(same_decomposition(decomposition_from_json(Json::parse(d.out)), decompose(QuadForm(fixture_form("h2")))));

  const std::string file = write_temp("form.json", R"({"A":[[2,1],[1,2]]})");
  const Run f = run("decompose --form " + file);
  REQUIRE(f.code == 0);
  CHECK(Json::parse(f.out).at("r") == 2);

  const Run fx = run("fixtures --list");
  REQUIRE(fx.code == 0);
  CHECK(Json::parse(fx.out).size() == fixture_names().size());
}

TEST_CASE("command line: eval and exit codes") {
  const std::string spec = write_temp("spec.json", R"({"A":"a1","coeff":{"type":"posdef"},"Z":{"X":[[0]],"Y":[[1]]}})");
  const Run e = run("eval --spec " + spec + " --eps 1e-12");
  REQUIRE(e.code == 0);
  const Json je = Json::parse(e.out);
  CHECK(std::abs(je.at("value")[0].get<double>() - 1.0037348) < 1e-7);
  CHECK(je.at("tail_bound").get<double>() < 1e-12);

  const std::string e8 = write_temp("e8.json", R"({"A":"e8","Z":{"X":[[0]],"Y":[[1]]},"eps":1e-12})");
  CHECK(run("eval --spec " + e8, "THETA_MAX_POINTS=50").code == 3);
  CHECK(run("eval --spec " + e8).code == 0);

  CHECK(run("").code == 1);
  CHECK(run("cosets --form no_such_form").code == 1);
  CHECK(run("basis --m 0 --n 1 --alpha 1").code == 1);
  CHECK(run("verify --suite nonsense").code == 1);
  const std::string bad = write_temp("bad.json", "{ not json");
  CHECK(run("eval --spec " + bad).code == 1);
  const std::string sing = write_temp("sing.json", R"({"A":[[1,1],[1,1]],"Z":{"X":[[0]],"Y":[[1]]}})");
  CHECK(run("eval --spec " + sing).code == 1);
}

TEST_CASE("command line: verify is deterministic") {
  const Run a = run("verify --suite poisson --seed 7");
  const Run b = run("verify --suite poisson --seed 7");
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  std::size_t lines = 0;
  for (char ch : a.out) lines += ch == '\n';
  CHECK(lines >= 2);

  const Run t = run("verify --suite translation --form a1 --genus 2 --seed 2");
  CHECK(t.code == 0);
  const Run t2 = run("verify --suite translation --form a1 --genus 2 --seed 2");
  CHECK(t.out == t2.out);
}
