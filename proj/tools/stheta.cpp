// Command line front end. Prints JSON on stdout, diagnostics on stderr.
// Exit codes: 0 ok, 1 invalid input, 2 failed check, 3 resource cap.

#include "stheta/errors.hpp"
#include "stheta/json_io.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>

using namespace stheta;

namespace {

constexpr int kInvalid = 1;
constexpr int kCheckFailed = 2;
constexpr int kResource = 3;

// A fixture name, or a JSON file holding a matrix or an object with "A".
IntMatrix load_form(const std::string& arg) {
  if (std::filesystem::is_regular_file(arg)) {
    const Json j = read_json_file(arg);
    return form_from_json(j.is_object() ? j.at("A") : j);
  }
  return fixture_form(arg);
}

void print(const Json& j) { std::cout << j.dump(2) << "\n"; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Siegel theta series for integral quadratic forms"};
  app.require_subcommand(1, 1);

  int bm = 0, bn = 0, balpha = 0;
  auto* basis = app.add_subcommand("basis", "Basis of the homogeneous polynomials P_alpha in an m x n matrix");
  basis->add_option("--m", bm, "rows")->required()->check(CLI::PositiveNumber);
  basis->add_option("--n", bn, "columns")->required()->check(CLI::PositiveNumber);
  basis->add_option("--alpha", balpha, "homogeneity degree")->required()->check(CLI::NonNegativeNumber);

  std::string form_arg;
  auto* decomp = app.add_subcommand("decompose", "Signature, majorant and projections of a form");
  decomp->add_option("--form", form_arg, "fixture name or JSON file")->required();

  int genus = 1;
  auto* cosets = app.add_subcommand("cosets", "Representatives of A^{-1} Z^{m x n} / Z^{m x n}");
  cosets->add_option("--form", form_arg, "fixture name or JSON file")->required();
  cosets->add_option("--genus", genus, "n")->check(CLI::PositiveNumber);

  std::string spec_path;
  double eps = 0;
  auto* eval = app.add_subcommand("eval", "Evaluate a theta series from a spec file");
  eval->add_option("--spec", spec_path, "spec JSON file")->required()->check(CLI::ExistingFile);
  auto* eps_opt = eval->add_option("--eps", eps, "truncation error bound (overrides the file)")->check(CLI::PositiveNumber);

  std::string suite = "all";
  std::uint64_t seed = 1;
  std::optional<std::string> vform;
  std::optional<int> vgenus;
  auto* verify = app.add_subcommand("verify", "Run a verification suite, one JSON report per line");
  verify->add_option("--suite", suite)->check(CLI::IsMember({"operators", "translation", "inversion", "fourier", "poisson", "all"}));
  verify->add_option("--form", vform, "restrict to one fixture");
  verify->add_option("--genus", vgenus, "genus for --form")->check(CLI::Range(1, 4));
  verify->add_option("--seed", seed, "seed of the randomized checks");

  bool list = false;
  auto* fixtures = app.add_subcommand("fixtures", "Named quadratic forms");
  fixtures->add_flag("--list", list, "list the fixture names")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kInvalid;
  }

  try {
    if (*basis) {
      const auto polys = basis_homopol(bm, bn, balpha);
      Json out = {{"m", bm}, {"n", bn}, {"alpha", balpha}, {"dimension", polys.size()}, {"basis", Json::array()}};
      for (const auto& p : polys) out["basis"].push_back(to_json(p));
      print(out);
    } else if (*decomp) {
      print(to_json(decompose(QuadForm(load_form(form_arg)))));
    } else if (*cosets) {
      const QuadForm form(load_form(form_arg));
      const auto reps = coset_reps(form, genus);
      Json out = {{"A", to_json(form.matrix())}, {"genus", genus}, {"count", reps.size()}, {"representatives", Json::array()}};
      for (const auto& r : reps) out["representatives"].push_back(to_json(r));
      print(out);
    } else if (*eval) {
      EvalRequest req = eval_request_from_json(read_json_file(spec_path));
      if (*eps_opt) req.eps = eps;
      print(to_json(theta_eval(req.spec, req.z, req.eps)));
    } else if (*verify) {
      SuiteOptions opt;
      opt.form = vform;
      opt.genus = vgenus;
      opt.seed = seed;
      std::size_t failed = 0;
      const auto reports = run_suite(suite, opt);
      for (const auto& r : reports) {
        std::cout << to_json(r).dump() << "\n";
        if (!r.passed) ++failed;
      }
      std::cout << Json{{"summary", {{"checks", reports.size()}, {"failed", failed}}}}.dump() << "\n";
      return failed == 0 ? 0 : kCheckFailed;
    } else if (*fixtures) {
      Json out = Json::array();
      for (const auto& name : fixture_names()) {
        Json entry = {{"name", name}};
        if (name.find('<') == std::string::npos) {
          const QuadForm form(fixture_form(name));
          const auto dec = decompose(form);
          entry["A"] = to_json(form.matrix());
          entry["det"] = form.det().str();
          entry["signature"] = {dec.r, dec.s};
        }
        out.push_back(std::move(entry));
      }
      print(out);
    }
  } catch (const ResourceLimitError& e) {
    std::cerr << "resource limit: " << e.what() << "\n";
    return kResource;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kInvalid;
  } catch (const std::domain_error& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kInvalid;
  } catch (const Json::exception& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kInvalid;
  } catch (const std::exception& e) {
    std::cerr << "check failed: " << e.what() << "\n";
    return kCheckFailed;
  }
  return 0;
}
