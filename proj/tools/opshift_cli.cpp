// Command-line front end: generate test operators, compute spectral shift
// functions for operator pairs, verify persisted samples against the trace
// formula, build intermediate-contraction certificates, and exercise the
// dilation / double-operator-integral primitives.

#include <Eigen/SVD>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "opshift/calculus.hpp"
#include "opshift/common.hpp"
#include "opshift/dilation.hpp"
#include "opshift/doi.hpp"
#include "opshift/intermediate.hpp"
#include "opshift/laurent.hpp"
#include "opshift/matrix_io.hpp"
#include "opshift/operators.hpp"
#include "opshift/ssf.hpp"

namespace {

using json = nlohmann::json;
using namespace opshift;

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot open " + path + " for writing");
  out << text;
}

json complex_json(Complex z) { return json::array({z.real(), z.imag()}); }

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3e", x);
  return buf;
}

OperatorKind pair_kind(const std::string& cls) {
  if (cls == "contraction") return OperatorKind::Contraction;
  if (cls == "unitary") return OperatorKind::Unitary;
  if (cls == "selfadjoint") return OperatorKind::Hermitian;
  if (cls == "dissipative" || cls == "dissipative-resolvent" ||
      cls == "dissipative-additive") {
    return OperatorKind::Dissipative;
  }
  throw InputError("unknown operator class: " + cls);
}

// Trace-formula test battery per operator class. Contraction densities are
// analytic-side objects, so only analytic monomials pair with them; unitary
// and Hermitian samples carry exact structure and admit two-sided batteries.
std::vector<TestFunction> battery_for(OperatorKind kind) {
  std::vector<TestFunction> fs;
  switch (kind) {
    case OperatorKind::Contraction:
      for (int p = 1; p <= 3; ++p) {
        fs.push_back(TestFunction::circle(LaurentPoly::monomial(p)));
      }
      break;
    case OperatorKind::Unitary:
      for (int p = 1; p <= 3; ++p) {
        fs.push_back(TestFunction::circle(LaurentPoly::monomial(p)));
      }
      fs.push_back(TestFunction::circle(LaurentPoly::monomial(-1)));
      break;
    case OperatorKind::Hermitian:
      for (int p = 1; p <= 3; ++p) {
        std::vector<Complex> c(static_cast<std::size_t>(p) + 1, Complex(0.0));
        c.back() = Complex(1.0);
        fs.push_back(TestFunction::line_polynomial(std::move(c)));
      }
      fs.push_back(TestFunction::line_cayley(LaurentPoly::monomial(1)));
      break;
    case OperatorKind::Dissipative:
      for (int p = 1; p <= 3; ++p) {
        fs.push_back(TestFunction::line_cayley(LaurentPoly::monomial(p)));
      }
      break;
  }
  return fs;
}

SSFSample compute_sample(const std::string& cls, const Matrix& a,
                         const Matrix& b, const QuadratureSpec& spec) {
  if (cls == "contraction") return ssf_contraction_pair(a, b, spec);
  if (cls == "unitary") return ssf_unitary_pair(a, b, spec);
  if (cls == "selfadjoint") return ssf_selfadjoint_pair(a, b, spec);
  if (cls == "dissipative-resolvent") {
    return ssf_dissipative_resolvent_pair(a, b, spec);
  }
  if (cls == "dissipative-additive") return ssf_dissipative_additive(a, b, spec);
  throw InputError("unknown pair class: " + cls +
                   " (expected contraction | unitary | selfadjoint | "
                   "dissipative-resolvent | dissipative-additive)");
}

json run_battery(OperatorKind kind, const Matrix& a, const Matrix& b,
                 const SSFSample& xi, double& maxAbsolute, double& maxRelative,
                 bool print) {
  json out = json::array();
  maxAbsolute = 0.0;
  maxRelative = 0.0;
  for (const TestFunction& f : battery_for(kind)) {
    const VerifyResult v = verify_trace_formula(kind, a, b, f, xi);
    maxAbsolute = std::max(maxAbsolute, v.absolute);
    maxRelative = std::max(maxRelative, v.relative);
    out.push_back(json{{"label", f.label()},
                       {"trace_lhs", complex_json(v.traceLhs)},
                       {"integral_rhs", complex_json(v.integralRhs)},
                       {"absolute", v.absolute},
                       {"relative", v.relative}});
    if (print) {
      std::cout << "  " << f.label() << ": lhs=(" << v.traceLhs.real() << ","
                << v.traceLhs.imag() << ") rhs=(" << v.integralRhs.real()
                << "," << v.integralRhs.imag() << ") abs=" << fmt(v.absolute)
                << " rel=" << fmt(v.relative) << "\n";
    }
  }
  return out;
}

json diagnostics_json(const SSFSample& xi) {
  json d = json::object();
  for (const auto& [key, value] : xi.diagnostics) d[key] = value;
  return d;
}

double smallest_singular_value(const Matrix& m) {
  Eigen::JacobiSVD<Matrix> svd(m);
  return m.rows() == 0 ? 0.0 : svd.singularValues().minCoeff();
}

struct QuadCliOptions {
  QuadratureSpec spec;
  void attach(CLI::App* cmd) {
    cmd->add_option("--t-nodes", spec.tNodes,
                    "Gauss-Legendre nodes for the coupling parameter")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--theta-grid", spec.thetaGrid,
                    "circle grid size (power of two, >= 8)")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--steps", spec.pathSteps, "eigenphase continuation steps")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--tolerance", spec.tolerance, "pipeline tolerance");
    cmd->add_flag("--shift-grid", spec.shiftedGrid,
                  "use the half-step shifted circle grid");
  }
};

void ensure_parent_dir(const std::string& path) {
  const std::filesystem::path parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
}

int run_gen(const std::string& cls, int dim, unsigned seed,
            const std::string& out) {
  const OperatorKind kind = pair_kind(cls);
  const Matrix m = random_ensemble(kind, dim, seed);
  ensure_parent_dir(out);
  save_matrix(out, m);
  std::cout << "wrote " << out << " (" << cls << ", dim " << dim << ", seed "
            << seed << ")\n";
  return 0;
}

int run_ssf(const std::string& cls, const std::string& pathA,
            const std::string& pathB, const QuadratureSpec& spec,
            const std::string& outDir) {
  const OperatorKind kind = pair_kind(cls);
  const Matrix a = classify(kind, load_matrix(pathA)).m;
  const Matrix b = classify(kind, load_matrix(pathB)).m;

  const SSFSample xi = compute_sample(cls, a, b, spec);

  std::filesystem::create_directories(outDir);
  const std::string csvPath = (std::filesystem::path(outDir) / "ssf.csv").string();
  write_text_file(csvPath, ssf_to_csv(xi));

  std::cout << "trace-formula battery (" << cls << "):\n";
  double maxAbs = 0.0, maxRel = 0.0;
  const json battery = run_battery(kind, a, b, xi, maxAbs, maxRel, true);

  json report{{"pair_class", cls},
              {"dim", a.rows()},
              {"domain", domain_name(xi.domain)},
              {"gauge", gauge_name(xi.gauge)},
              {"shifted_grid", xi.shiftedGrid},
              {"grid_size", xi.grid.size()},
              {"arc_count", xi.arcs.size()},
              {"jump_count", xi.jumps.size()},
              {"point_term_count", xi.pointTerms.size()},
              {"quadrature",
               {{"t_nodes", spec.tNodes},
                {"theta_grid", spec.thetaGrid},
                {"path_steps", spec.pathSteps},
                {"tolerance", spec.tolerance}}},
              {"diagnostics", diagnostics_json(xi)},
              {"battery", battery},
              {"max_absolute", maxAbs},
              {"max_relative", maxRel}};
  const std::string reportPath =
      (std::filesystem::path(outDir) / "report.json").string();
  write_text_file(reportPath, report.dump(2) + "\n");

  std::cout << "max_absolute=" << fmt(maxAbs) << " max_relative=" << fmt(maxRel)
            << "\n";
  std::cout << "wrote " << csvPath << "\n";
  std::cout << "wrote " << reportPath << "\n";
  return 0;
}

int run_verify(const std::string& cls, const std::string& pathA,
               const std::string& pathB, const std::string& csvPath,
               double tol) {
  const OperatorKind kind = pair_kind(cls);
  const Matrix a = classify(kind, load_matrix(pathA)).m;
  const Matrix b = classify(kind, load_matrix(pathB)).m;
  const SSFSample xi = ssf_from_csv(read_text_file(csvPath), kind);

  std::cout << "trace-formula battery (" << cls << ", from " << csvPath
            << "):\n";
  double maxAbs = 0.0, maxRel = 0.0;
  run_battery(kind, a, b, xi, maxAbs, maxRel, true);

  if (maxRel <= tol) {
    std::cout << "VERIFY PASS (max relative " << fmt(maxRel) << " <= tol "
              << fmt(tol) << ")\n";
    return 0;
  }
  std::cout << "VERIFY FAIL (max relative " << fmt(maxRel) << " > tol "
            << fmt(tol) << ")\n";
  return 1;
}

int run_intermediate(const std::string& pathA, const std::string& pathB,
                     const QuadratureSpec& spec, const std::string& outDir) {
  Matrix t0 = classify(OperatorKind::Contraction, load_matrix(pathA)).m;
  Matrix t1 = classify(OperatorKind::Contraction, load_matrix(pathB)).m;

  // Same endpoint repair as intermediate_general, tracked here so the
  // certificate battery verifies the endpoints the chain actually connects.
  bool regularized0 = false, regularized1 = false;
  for (auto [q, flag] : {std::pair<Matrix*, bool*>{&t0, &regularized0},
                         std::pair<Matrix*, bool*>{&t1, &regularized1}}) {
    if (smallest_singular_value(*q) < 1e-8) {
      *q = fredholm_regularize(*q, 1e-8).q;
      const double s = operator_norm(*q);
      if (s > 1.0) *q /= s;
      *flag = true;
    }
  }

  const IntermediateResult res = intermediate_contraction(t0, t1, spec);

  std::filesystem::create_directories(outDir);
  const auto dir = std::filesystem::path(outDir);
  write_text_file((dir / "xi0.csv").string(), ssf_to_csv(res.xi0));
  write_text_file((dir / "xi1.csv").string(), ssf_to_csv(res.xi1));
  write_text_file((dir / "xi.csv").string(), ssf_to_csv(res.xi));

  std::cout << "factorization residuals: " << fmt(res.factorizationResidual0)
            << " " << fmt(res.factorizationResidual1) << "\n";
  std::cout << "min Im xi0 = " << res.minImXi0
            << ", max Im xi1 = " << res.maxImXi1 << "\n";
  std::cout << "trace-formula battery (intermediate chain):\n";
  double maxAbs = 0.0, maxRel = 0.0;
  const json battery = run_battery(OperatorKind::Contraction, t0, t1, res.xi,
                                   maxAbs, maxRel, true);

  json cert{{"factorization_residual_0", res.factorizationResidual0},
            {"factorization_residual_1", res.factorizationResidual1},
            {"min_im_xi0", res.minImXi0},
            {"max_im_xi1", res.maxImXi1},
            {"regularized_endpoint_0", regularized0},
            {"regularized_endpoint_1", regularized1},
            {"diagnostics", diagnostics_json(res.xi)},
            {"battery", battery},
            {"max_absolute", maxAbs},
            {"max_relative", maxRel}};
  const std::string certPath = (dir / "certificates.json").string();
  write_text_file(certPath, cert.dump(2) + "\n");
  std::cout << "max_absolute=" << fmt(maxAbs) << " max_relative=" << fmt(maxRel)
            << "\n";
  std::cout << "wrote " << certPath << "\n";
  return 0;
}

int run_dilate(const std::string& pathA, int order, const std::string& outDir) {
  const Matrix t = classify(OperatorKind::Contraction, load_matrix(pathA)).m;
  const Matrix w = power_dilation(t, order);

  std::filesystem::create_directories(outDir);
  const auto dir = std::filesystem::path(outDir);
  save_matrix((dir / "w.json").string(), w);

  const Eigen::Index d = t.rows();
  json compressions = json::array();
  double maxCompression = 0.0;
  Matrix wp = Matrix::Identity(w.rows(), w.cols());
  Matrix tp = Matrix::Identity(d, d);
  for (int p = 1; p <= order; ++p) {
    wp = wp * w;
    tp = tp * t;
    const double resid = operator_norm(wp.topLeftCorner(d, d) - tp);
    maxCompression = std::max(maxCompression, resid);
    compressions.push_back(json{{"power", p}, {"residual", resid}});
  }

  const KernelIsometryReport iso = kernel_isometry_check(t);
  json report{{"order", order},
              {"dim", d},
              {"dilation_dim", w.rows()},
              {"unitarity_residual", unitary_residual(w)},
              {"compression_residuals", compressions},
              {"max_compression_residual", maxCompression},
              {"kernel_isometry",
               {{"kernel_dim", iso.kernelDim},
                {"cokernel_dim", iso.cokernelDim},
                {"norm_residual", iso.normResidual},
                {"range_residual", iso.rangeResidual},
                {"pass", iso.pass}}}};
  const std::string reportPath = (dir / "dilation.json").string();
  write_text_file(reportPath, report.dump(2) + "\n");

  std::cout << "unitarity residual " << fmt(unitary_residual(w))
            << ", max compression residual " << fmt(maxCompression) << "\n";
  std::cout << "wrote " << (dir / "w.json").string() << "\n";
  std::cout << "wrote " << reportPath << "\n";
  return 0;
}

int run_doi(const std::string& pathA, const std::string& pathB, int degree,
            int grid, const std::string& outDir) {
  const Matrix t0 = classify(OperatorKind::Contraction, load_matrix(pathA)).m;
  const Matrix t1 = classify(OperatorKind::Contraction, load_matrix(pathB)).m;
  if (degree < 1) throw InputError("doi: degree must be >= 1");
  const LaurentPoly f = LaurentPoly::monomial(degree);

  const Matrix viaDoi = lipschitz_difference(f, t1, t0);
  const Matrix direct = eval_on_contraction(f, t1) - eval_on_contraction(f, t0);
  const double differenceResidual = operator_norm(viaDoi - direct);

  const DoiTraceResult tr = doi_trace(f, t0, t1 - t0, grid);

  std::filesystem::create_directories(outDir);
  json report{{"degree", degree},
              {"grid", grid},
              {"difference_residual", differenceResidual},
              {"trace_value", complex_json(tr.traceValue)},
              {"trace_identity_residual", tr.identityResidual}};
  const std::string reportPath =
      (std::filesystem::path(outDir) / "doi.json").string();
  write_text_file(reportPath, report.dump(2) + "\n");

  std::cout << "difference residual " << fmt(differenceResidual)
            << ", trace identity residual " << fmt(tr.identityResidual) << "\n";
  std::cout << "wrote " << reportPath << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "spectral shift functions for pairs of contractions, unitaries, "
      "self-adjoint and dissipative matrices"};
  app.require_subcommand(1);

  const std::vector<std::string> genClasses{"contraction", "unitary",
                                            "selfadjoint", "dissipative"};
  const std::vector<std::string> pairClasses{"contraction", "unitary",
                                             "selfadjoint",
                                             "dissipative-resolvent",
                                             "dissipative-additive"};

  // gen
  std::string genClass, genOut;
  int genDim = 6;
  unsigned genSeed = 1;
  CLI::App* genCmd = app.add_subcommand("gen", "generate a random test operator");
  genCmd->add_option("--class", genClass, "operator class")
      ->required()
      ->check(CLI::IsMember(genClasses));
  genCmd->add_option("--dim", genDim, "matrix dimension")
      ->check(CLI::PositiveNumber);
  genCmd->add_option("--seed", genSeed, "random seed");
  genCmd->add_option("--out", genOut, "output JSON path")->required();

  // ssf
  std::string ssfClass, ssfA, ssfB, ssfOut;
  QuadCliOptions ssfQuad;
  CLI::App* ssfCmd = app.add_subcommand(
      "ssf", "compute the spectral shift function of an operator pair");
  ssfCmd->add_option("--class", ssfClass, "pair class")
      ->required()
      ->check(CLI::IsMember(pairClasses));
  ssfCmd->add_option("--a", ssfA, "first operator (JSON)")->required();
  ssfCmd->add_option("--b", ssfB, "second operator (JSON)")->required();
  ssfCmd->add_option("--out", ssfOut, "output directory")->required();
  ssfQuad.attach(ssfCmd);

  // verify
  std::string verClass, verA, verB, verCsv;
  double verTol = 1e-6;
  CLI::App* verCmd = app.add_subcommand(
      "verify", "verify a persisted SSF sample against the trace formula");
  verCmd->add_option("--class", verClass, "pair class")
      ->required()
      ->check(CLI::IsMember(pairClasses));
  verCmd->add_option("--a", verA, "first operator (JSON)")->required();
  verCmd->add_option("--b", verB, "second operator (JSON)")->required();
  verCmd->add_option("--csv", verCsv, "SSF sample (CSV)")->required();
  verCmd->add_option("--tol", verTol, "max relative residual accepted");

  // intermediate
  std::string intA, intB, intOut;
  QuadCliOptions intQuad;
  CLI::App* intCmd = app.add_subcommand(
      "intermediate",
      "intermediate-contraction certificate for a contraction pair");
  intCmd->add_option("--a", intA, "first contraction (JSON)")->required();
  intCmd->add_option("--b", intB, "second contraction (JSON)")->required();
  intCmd->add_option("--out", intOut, "output directory")->required();
  intQuad.attach(intCmd);

  // dilate
  std::string dilA, dilOut;
  int dilOrder = 8;
  CLI::App* dilCmd = app.add_subcommand(
      "dilate", "unitary power dilation of a contraction");
  dilCmd->add_option("--a", dilA, "contraction (JSON)")->required();
  dilCmd->add_option("--order", dilOrder, "power-dilation order")
      ->check(CLI::PositiveNumber);
  dilCmd->add_option("--out", dilOut, "output directory")->required();

  // doi
  std::string doiA, doiB, doiOut;
  int doiDegree = 4;
  int doiGrid = 2048;
  CLI::App* doiCmd = app.add_subcommand(
      "doi", "double-operator-integral identities for a contraction pair");
  doiCmd->add_option("--a", doiA, "first contraction (JSON)")->required();
  doiCmd->add_option("--b", doiB, "second contraction (JSON)")->required();
  doiCmd->add_option("--degree", doiDegree, "monomial degree")
      ->check(CLI::PositiveNumber);
  doiCmd->add_option("--theta-grid", doiGrid, "circle grid for the trace check")
      ->check(CLI::PositiveNumber);
  doiCmd->add_option("--out", doiOut, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (genCmd->parsed()) return run_gen(genClass, genDim, genSeed, genOut);
    if (ssfCmd->parsed()) {
      return run_ssf(ssfClass, ssfA, ssfB, ssfQuad.spec, ssfOut);
    }
    if (verCmd->parsed()) return run_verify(verClass, verA, verB, verCsv, verTol);
    if (intCmd->parsed()) {
      return run_intermediate(intA, intB, intQuad.spec, intOut);
    }
    if (dilCmd->parsed()) return run_dilate(dilA, dilOrder, dilOut);
    if (doiCmd->parsed()) return run_doi(doiA, doiB, doiDegree, doiGrid, doiOut);
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const ConvergenceError& e) {
    std::cerr << "convergence error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
