#include "specvec/cli.hpp"

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "specvec/generate.hpp"
#include "specvec/identity.hpp"
#include "specvec/matrix_io.hpp"
#include "specvec/report.hpp"
#include "specvec/verify.hpp"

namespace specvec {

namespace {

constexpr double kInterlacingRelSlack = 1e-10;
constexpr double kGramRelBound = 1e-14;
constexpr double kProductBound = 1e-9;

struct CommonFlags {
  std::string input;
  std::string json_path;
  double tol = SpectralTolerances{}.off_diag_stop;
  double distinct = IdentityOptions{}.distinct_threshold;
  int max_sweeps = SpectralTolerances{}.max_sweeps;
  unsigned threads = 0;

  IdentityOptions options() const {
    IdentityOptions o;
    o.spectral.off_diag_stop = tol;
    o.spectral.max_sweeps = max_sweeps;
    o.spectral.validate();
    o.distinct_threshold = distinct;
    o.threads = threads;
    return o;
  }
};

void add_common(CLI::App* cmd, CommonFlags& f, bool needs_input = true) {
  auto* in = cmd->add_option("--input", f.input, "Matrix file");
  if (needs_input) in->required();
  cmd->add_option("--json", f.json_path, "Write the JSON report here instead of stdout");
  cmd->add_option("--tol", f.tol, "Relative off-diagonal stop for the Jacobi kernels")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--max-sweeps", f.max_sweeps, "Jacobi sweep limit")->check(CLI::PositiveNumber);
  cmd->add_option("--distinct", f.distinct, "Relative gap below which spectrum values count as repeated")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--threads", f.threads, "Worker threads (default: SPECVEC_THREADS or hardware)");
}

void emit(const Json& j, const std::string& path, std::ostream& out) {
  if (path.empty())
    out << dump(j);
  else
    write_text_file(path, dump(j));
}

Json input_digest(const DenseMatrixd& a, const SpectralTolerances& tol) {
  Json sv = Json::array();
  const auto s = singular_values(a, tol);
  for (Index k = 0; k < s.size(); ++k) sv.push_back(number_json(s(k)));
  return Json{{"rows", a.rows()}, {"cols", a.cols()}, {"frobenius_norm", number_json(frobenius_norm(a))},
              {"singular_values", std::move(sv)}};
}

Json base_report(const char* command) {
  return Json{{"tool", tool_json()}, {"command", command}, {"index_base", 1}};
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto z = parse_complex_literal(item, MatrixField::Real);
    out.push_back(z.real());
  }
  return out;
}

// recover -------------------------------------------------------------------

int run_recover(const CommonFlags& f, const std::string& side, bool with_oracle, std::ostream& out) {
  const auto opts = f.options();
  const auto a = read_matrix_file(f.input);
  Json report = base_report("recover");
  report["input"] = input_digest(a, opts.spectral);
  report["tolerances"] = tolerances_json(opts);

  std::optional<OracleGrids<double>> oracle;
  if (with_oracle) oracle = oracle_magnitudes(a, opts.spectral);

  Index indeterminate = 0;
  Json interlacing = Json::object();
  auto do_side = [&](Side s) {
    const auto rec = s == Side::Left ? recover_left_magnitudes(a, opts) : recover_right_magnitudes(a, opts);
    std::optional<ErrorReport<double>> err;
    if (oracle) err = compare(rec.magnitudes, s == Side::Left ? oracle->left : oracle->right, rec.gaps);
    report[to_string(s)] = magnitude_json(rec, err);
    indeterminate += rec.magnitudes.indeterminate_count();
    interlacing[s == Side::Left ? "row_deletions" : "column_deletions"] =
        interlacing_json(interlacing_sweep(a, s, kInterlacingRelSlack, opts.spectral));
  };
  if (side == "left" || side == "both") do_side(Side::Left);
  if (side == "right" || side == "both") do_side(Side::Right);
  report["interlacing"] = std::move(interlacing);
  report["indeterminate_cells"] = indeterminate;
  emit(report, f.json_path, out);
  return indeterminate > 0 ? kExitIndeterminate : kExitOk;
}

// eig-identity --------------------------------------------------------------

int run_eig_identity(const CommonFlags& f, std::ostream& out) {
  const auto opts = f.options();
  const auto a = read_matrix_file(f.input);
  const HermitianMatrixd m(a.matrix());
  const auto rec = recover_eigvec_magnitudes(m, opts);
  const auto oracle = eigen_oracle_magnitudes(m, opts.spectral);

  Json report = base_report("eig-identity");
  report["input"] = Json{{"dim", m.dim()}, {"frobenius_norm", number_json(m.matrix().norm())}};
  report["tolerances"] = tolerances_json(opts);
  report["eigen"] = magnitude_json(rec, compare(rec.magnitudes, oracle, rec.gaps));
  report["product_identity_residual"] = number_json(check_eig_product_identity(m, opts));
  report["indeterminate_cells"] = rec.magnitudes.indeterminate_count();
  emit(report, f.json_path, out);
  return rec.magnitudes.indeterminate_count() > 0 ? kExitIndeterminate : kExitOk;
}

// verify --------------------------------------------------------------------

struct CheckSelection {
  bool interlacing = false;
  bool gram = false;
  bool product = false;
};

CheckSelection parse_checks(const std::string& text) {
  CheckSelection sel;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item == "all")
      sel = {true, true, true};
    else if (item == "interlacing")
      sel.interlacing = true;
    else if (item == "gram")
      sel.gram = true;
    else if (item == "product")
      sel.product = true;
    else
      throw std::invalid_argument("unknown check '" + item + "'");
  }
  return sel;
}

/// Interlacing on spectra supplied directly: {"full": [...], "deleted": [[...], ...]}.
int run_verify_spectra(const std::string& path, const std::string& json_path, std::ostream& out) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  const auto doc = nlohmann::json::parse(in);
  const auto full_list = doc.at("full").get<std::vector<double>>();
  RealVector<double> full = Eigen::Map<const RealVector<double>>(full_list.data(), static_cast<Index>(full_list.size()));
  const double slack = kInterlacingRelSlack * (full.size() > 0 ? full(0) : 0.0);

  Json results = Json::array();
  bool passed = true;
  Index idx = 0;
  for (const auto& d : doc.at("deleted")) {
    const auto list = d.get<std::vector<double>>();
    const RealVector<double> del = Eigen::Map<const RealVector<double>>(list.data(), static_cast<Index>(list.size()));
    const auto rep = check_interlacing(full, del, slack);
    Json viol = Json::array();
    for (const auto& v : rep.violations)
      viol.push_back(Json{{"k", v.k + 1},
                          {"lhs", number_json(v.lhs)},
                          {"rhs", number_json(v.rhs)},
                          {"bound", v.which == InterlacingBound::Upper ? "upper" : "lower"}});
    results.push_back(Json{{"deletion", ++idx},
                           {"max_violation", number_json(rep.max_violation_magnitude)},
                           {"violations", std::move(viol)}});
    passed = passed && rep.ok();
  }
  Json report = base_report("verify");
  report["checks"] = Json{{"interlacing", Json{{"slack", slack}, {"spectra", std::move(results)}, {"passed", passed}}}};
  report["passed"] = passed;
  emit(report, json_path, out);
  return passed ? kExitOk : kExitError;
}

int run_verify(const CommonFlags& f, const std::string& checks, std::ostream& out) {
  const auto sel = parse_checks(checks);
  const auto opts = f.options();
  const auto a = read_matrix_file(f.input);
  Json report = base_report("verify");
  report["input"] = input_digest(a, opts.spectral);
  report["tolerances"] = tolerances_json(opts);
  Json results = Json::object();
  bool passed = true;

  if (sel.interlacing) {
    const auto rows = interlacing_sweep(a, Side::Left, kInterlacingRelSlack, opts.spectral);
    const auto cols = interlacing_sweep(a, Side::Right, kInterlacingRelSlack, opts.spectral);
    const bool ok = rows.ok() && cols.ok();
    results["interlacing"] =
        Json{{"row_deletions", interlacing_json(rows)}, {"column_deletions", interlacing_json(cols)}, {"passed", ok}};
    passed = passed && ok;
  }
  if (sel.gram) {
    const double norm2 = frobenius_norm(a) * frobenius_norm(a);
    double worst_row = 0, worst_col = 0;
    for (Index j = 0; j < a.rows(); ++j) worst_row = std::max(worst_row, check_gram_deletion(a, j));
    for (Index s = 0; s < a.cols(); ++s) worst_col = std::max(worst_col, check_gram_deletion_col(a, s));
    const double bound = kGramRelBound * norm2;
    const bool ok = worst_row <= bound && worst_col <= bound;
    results["gram"] = Json{{"max_residual_rows", number_json(worst_row)},
                           {"max_residual_columns", number_json(worst_col)},
                           {"bound", number_json(bound)},
                           {"passed", ok}};
    passed = passed && ok;
  }
  if (sel.product) {
    const auto r = product_identity_residuals(a, opts);
    const bool ok = r.max() <= kProductBound;
    results["product"] = Json{{"left_residual", number_json(r.left)},
                              {"right_residual", number_json(r.right)},
                              {"bound", kProductBound},
                              {"passed", ok}};
    passed = passed && ok;
  }
  report["checks"] = std::move(results);
  report["passed"] = passed;
  emit(report, f.json_path, out);
  return passed ? kExitOk : kExitError;
}

// perturb -------------------------------------------------------------------

int run_perturb(const CommonFlags& f, double eps, Index trials, std::uint64_t seed, std::ostream& out) {
  const auto opts = f.options();
  const auto a = read_matrix_file(f.input);
  Json report = base_report("perturb");
  report["input"] = input_digest(a, opts.spectral);
  report["tolerances"] = tolerances_json(opts);
  report["stability"] = stability_json(perturb_study(a, eps, trials, seed, opts));
  emit(report, f.json_path, out);
  return kExitOk;
}

// gen -----------------------------------------------------------------------

struct GenFlags {
  Index rows = 0;
  Index cols = 0;
  std::string spectrum;
  bool random = false;
  std::uint64_t seed = 0;
  bool complex = false;
  std::string output;
};

int run_gen(const GenFlags& g, std::ostream& out) {
  Rng rng(g.seed);
  DenseMatrixd a;
  if (g.random) {
    if (g.rows < 1 || g.cols < 1) throw std::invalid_argument("--random needs --rows and --cols");
    a = random_matrix<double>(g.rows, g.cols, rng, g.complex);
  } else {
    const auto spectrum = parse_list(g.spectrum);
    if (spectrum.empty()) throw std::invalid_argument("--spectrum needs at least one value");
    const Index k = static_cast<Index>(spectrum.size());
    const Index rows = g.rows > 0 ? g.rows : k;
    const Index cols = g.cols > 0 ? g.cols : k;
    a = matrix_with_spectrum<double>(rows, cols, spectrum, rng, g.complex);
  }
  if (g.output.empty())
    out << format_matrix(a);
  else
    write_text_file(g.output, format_matrix(a));
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Singular-vector magnitudes from singular values of submatrices", "specvec"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  CommonFlags recover_flags;
  std::string side = "both";
  bool with_oracle = false;
  auto* recover = app.add_subcommand("recover", "Recover |u_ij|^2 and |v_ls|^2 from singular values");
  add_common(recover, recover_flags);
  recover->add_option("--side", side, "left, right or both")->check(CLI::IsMember({"left", "right", "both"}));
  recover->add_flag("--oracle", with_oracle, "Compare against a direct SVD");

  CommonFlags eig_flags;
  auto* eig = app.add_subcommand("eig-identity", "Recover |v_ij|^2 of a Hermitian matrix from eigenvalues");
  add_common(eig, eig_flags);

  CommonFlags verify_flags;
  std::string checks = "all";
  std::string spectra;
  auto* verify = app.add_subcommand("verify", "Run interlacing, Gram-deletion and product-identity checks");
  add_common(verify, verify_flags, false);
  verify->add_option("--checks", checks, "Comma list of interlacing,gram,product,all");
  verify->add_option("--spectra", spectra, "JSON file {\"full\": [...], \"deleted\": [[...], ...]}");

  CommonFlags perturb_flags;
  double eps = 0;
  Index trials = 10;
  std::uint64_t seed = 0;
  auto* perturb = app.add_subcommand("perturb", "Measure recovered-magnitude drift under seeded perturbations");
  add_common(perturb, perturb_flags);
  perturb->add_option("--eps", eps, "Relative Frobenius size of the perturbation")->required();
  perturb->add_option("--trials", trials, "Number of trials")->check(CLI::PositiveNumber);
  perturb->add_option("--seed", seed, "Generator seed");

  GenFlags gen_flags;
  auto* gen = app.add_subcommand("gen", "Write a seeded test matrix");
  gen->add_option("--rows", gen_flags.rows, "Rows (default: spectrum length)");
  gen->add_option("--cols", gen_flags.cols, "Columns (default: spectrum length)");
  auto* spec_opt = gen->add_option("--spectrum", gen_flags.spectrum, "Comma list of singular values");
  auto* rand_opt = gen->add_flag("--random", gen_flags.random, "Gaussian entries instead of a fixed spectrum");
  spec_opt->excludes(rand_opt);
  gen->add_option("--seed", gen_flags.seed, "Generator seed");
  gen->add_flag("--complex", gen_flags.complex, "Complex entries / unitary factors");
  gen->add_option("--output", gen_flags.output, "Output file (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitError;
  }

  try {
    if (*recover) return run_recover(recover_flags, side, with_oracle, out);
    if (*eig) return run_eig_identity(eig_flags, out);
    if (*verify) {
      if (!spectra.empty()) return run_verify_spectra(spectra, verify_flags.json_path, out);
      if (verify_flags.input.empty()) throw std::invalid_argument("verify needs --input or --spectra");
      return run_verify(verify_flags, checks, out);
    }
    if (*perturb) return run_perturb(perturb_flags, eps, trials, seed, out);
    if (*gen) {
      if (!gen_flags.random && gen_flags.spectrum.empty())
        throw std::invalid_argument("gen needs --spectrum or --random");
      return run_gen(gen_flags, out);
    }
  } catch (const std::exception& e) {
    err << "specvec: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}

}  // namespace specvec
