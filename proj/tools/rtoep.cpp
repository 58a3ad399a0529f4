// rtoep: command-line front end.
//
//   rtoep norms --domain <spec> --alpha-max <tuple> [--tol x] [--out file.csv]
//   rtoep product-check --domain <spec> --symbols <file> --kmax <tuple> [--tol x]
//         [--quad-tol x] [--threads n] [--seed s] [--export-matrix out.csv] --report out.json
//   rtoep fiber analyze --set "<expr>" [--decompose] [--budget n] [--out report.json]
//   rtoep experiment <kind> --config <file> [--report out.json]
//
// Exit codes: 0 verdict computed, 1 configuration error, 2 numeric failure.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "rt/config.hpp"
#include "rt/experiments.hpp"
#include "rt/fiber.hpp"
#include "rt/index_set_parser.hpp"
#include "rt/moments.hpp"
#include "rt/toeplitz.hpp"

namespace {

using rt::json;

void emit(const json& report, const std::string& path) {
  if (path.empty())
    std::cout << report.dump(2) << '\n';
  else
    rt::write_report(report, path);
}

int cmd_norms(const std::string& domain, const std::string& alpha_max, std::optional<double> tol,
              const std::string& out_path) {
  const auto bound = rt::text::parse_tuple(alpha_max);
  const auto d = rt::parse_domain(domain, bound.size());
  const rt::MomentTable T(d, tol);
  const rt::TruncationLattice L(bound);
  const auto pts = L.points();
  T.precompute(pts);
  std::ofstream file;
  if (!out_path.empty()) {
    file.open(out_path);
    if (!file) throw rt::ConfigError("cannot write " + out_path);
  }
  std::ostream& out = out_path.empty() ? std::cout : file;
  out << "alpha,norm_sq,coefficient\n";
  for (const auto& a : pts)
    out << '"' << a.to_string() << "\"," << rt::format_real(T.norm(a)) << ',' << rt::format_real(T.coefficient(a))
        << '\n';
  T.persist();
  return 0;
}

struct ProductArgs {
  std::string domain, symbols, kmax, report, matrix;
  std::optional<double> tol, quad_tol;
  unsigned threads = 0;
  std::uint64_t seed = 0;
};

int cmd_product_check(const ProductArgs& a) {
  const auto kmax = rt::text::parse_tuple(a.kmax);
  const auto d = rt::parse_domain(a.domain, kmax.size());
  std::vector<rt::SymbolSpec> syms;
  const auto lines = rt::read_symbols_file(a.symbols);
  for (std::size_t j = 0; j < lines.size(); ++j) {
    try {
      syms.push_back(rt::parse_symbol_spec(lines[j], d, a.seed + j));
    } catch (const rt::ConfigError& e) {
      throw rt::ConfigError(a.symbols + ": symbol " + std::to_string(j + 1) + ": " + e.what());
    }
  }
  const rt::MomentTable T(d, a.quad_tol);
  auto pc = rt::product_check(T, syms, rt::TruncationLattice(kmax), a.tol, rt::EngineOptions{a.threads});
  if (!a.matrix.empty()) rt::write_operator_csv(pc.op, a.matrix);
  emit(pc.report, a.report);
  T.persist();
  std::cerr << "zero_flag=" << (pc.verdict.zero_flag ? "true" : "false")
            << " norm_estimate=" << rt::format_real(pc.verdict.operator_norm_estimate)
            << " k0=" << pc.verdict.k0_used.to_string() << '\n';
  return 0;
}

int cmd_fiber_analyze(const std::string& set_src, bool decompose, std::size_t budget, const std::string& out) {
  const auto E = rt::parse_index_set(set_src);
  const auto r = rt::satisfies_condition_I(E, budget);
  json rep = rt::report_header("fiber_analyze");
  rep["set"] = E.to_string();
  rep["dim"] = E.dim();
  rep["condition_I"] = r.holds;
  rep["verdict"] = r.holds ? "condition (I) holds" : "condition (I) fails";
  rep["witness"] = r.witness ? json(r.witness->to_string()) : json(nullptr);
  if (decompose) {
    const auto& dec = r.certificate;
    json layers = json::array(), deleted = json::array();
    for (std::size_t j = 0; j <= dec.n; ++j) layers.push_back({{"j", j}, {"E", dec.E(j).to_string()}});
    for (std::size_t j = 1; j <= dec.n; ++j) deleted.push_back({{"j", j}, {"F", dec.F(j).to_string()}});
    rep["layers"] = std::move(layers);
    rep["deleted"] = std::move(deleted);
  }
  emit(rep, out);
  return 0;
}

int cmd_experiment(const std::string& kind, const std::string& config, const std::string& report) {
  const auto cfg = rt::Config::load(config);
  auto spec = rt::experiment_spec_from(cfg, kind);
  if (!report.empty()) spec.report_path = report;
  const auto rep = rt::run_experiment(spec);
  emit(rep, spec.report_path);
  if (!spec.report_path.empty()) std::cerr << spec.kind << ": " << rep.at("verdict").get<std::string>() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Toeplitz products on Reinhardt domains"};
  app.require_subcommand(0, 1);
  bool version = false;
  app.add_flag("--version", version, "Print schema and engine versions");

  std::string domain, alpha_max, out;
  std::optional<double> tol;
  auto* norms = app.add_subcommand("norms", "Monomial norms and Bergman coefficients");
  norms->add_option("--domain", domain, "Domain spec, e.g. polydisk(1,1)")->required();
  norms->add_option("--alpha-max", alpha_max, "Largest multi-index, e.g. (10,10)")->required();
  norms->add_option("--tol", tol, "Quadrature tolerance");
  norms->add_option("--out", out, "CSV output (stdout when omitted)");

  ProductArgs pa;
  auto* product = app.add_subcommand("product-check", "Zero-product verdict for T_{phi_m}...T_{phi_1}");
  product->add_option("--domain", pa.domain, "Domain spec")->required();
  product->add_option("--symbols", pa.symbols, "Symbols file, phi_1 first")->required()->check(CLI::ExistingFile);
  product->add_option("--kmax", pa.kmax, "Lattice bound, e.g. (10,10)")->required();
  product->add_option("--tol", pa.tol, "Zero tolerance (default 1e-6 times the product of sup bounds)");
  product->add_option("--quad-tol", pa.quad_tol, "Quadrature tolerance");
  product->add_option("--threads", pa.threads, "1 = sequential");
  product->add_option("--seed", pa.seed, "Seed for sup estimates");
  product->add_option("--export-matrix", pa.matrix, "Write the operator as CSV");
  product->add_option("--report", pa.report, "JSON report (stdout when omitted)");

  auto* fiber = app.add_subcommand("fiber", "Index-set combinatorics");
  fiber->require_subcommand(1);
  std::string set_src, fiber_out;
  bool decompose = false;
  std::size_t budget = rt::kDefaultSymbolicBudget;
  auto* analyze = fiber->add_subcommand("analyze", "Condition (I) verdict and deletion process");
  analyze->add_option("--set", set_src, "Index set, e.g. \"AP(2,2) x FULL\"")->required();
  analyze->add_flag("--decompose", decompose, "Include the layers E_j and deleted parts F_j");
  analyze->add_option("--budget", budget, "Product-term budget");
  analyze->add_option("--out", fiber_out, "JSON report (stdout when omitted)");

  std::string kind, config, exp_report;
  auto* experiment = app.add_subcommand("experiment", "Run an experiment from a config file");
  experiment->add_option("kind", kind, "proposition1 | corollary1 | theorem1_box_reduction | moment_vanishing")
      ->required()
      ->check(CLI::IsMember(rt::experiment_kinds()));
  experiment->add_option("--config", config, "Config file")->required()->check(CLI::ExistingFile);
  experiment->add_option("--report", exp_report, "Overrides [experiment] report");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (version) {
      std::cout << "rtoep engine " << rt::kEngineVersion << ", report schema " << rt::kSchemaVersion << '\n';
      return 0;
    }
    if (*norms) return cmd_norms(domain, alpha_max, tol, out);
    if (*product) return cmd_product_check(pa);
    if (*analyze) return cmd_fiber_analyze(set_src, decompose, budget, fiber_out);
    if (*experiment) return cmd_experiment(kind, config, exp_report);
    std::cout << app.help();
    return 1;
  } catch (const rt::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const rt::NumericError& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return 2;
  } catch (const rt::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
