#include "cli.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "fbst/ci_test.hpp"
#include "fbst/convolution.hpp"
#include "fbst/error.hpp"
#include "fbst/tables.hpp"

namespace fbst::cli {
namespace {

namespace fs = std::filesystem;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct TestFlags {
  double alpha = 1.0;
  std::uint64_t samples = 1'000'000;
  std::size_t bins = 100;
  std::string mode = "both";
  std::uint64_t seed = 0;
  std::string out;
  std::string emit_truth;
  std::optional<double> threshold;
};

void add_test_flags(CLI::App* cmd, TestFlags& f) {
  cmd->add_option("--alpha", f.alpha, "Dirichlet prior hyperparameter (all cells)")->check(CLI::PositiveNumber);
  cmd->add_option("--samples", f.samples, "Monte Carlo draws per slice");
  cmd->add_option("--bins", f.bins, "bins per truth function");
  cmd->add_option("--mode", f.mode, "discretization: h, v or both")
      ->check(CLI::IsMember({"h", "v", "both", "horizontal", "vertical"}));
  cmd->add_option("--seed", f.seed, "RNG seed")->required();
  cmd->add_option("--out", f.out, "report path (default: stdout)");
  cmd->add_option("--emit-truth", f.emit_truth, "directory for per-slice truth-function TSVs");
  cmd->add_option("--threshold", f.threshold, "exit with code 3 when composite evidence is below this");
}

TestMode parse_mode(const std::string& m) {
  if (m == "h" || m == "horizontal") return TestMode::horizontal;
  if (m == "v" || m == "vertical") return TestMode::vertical;
  return TestMode::both;
}

AxisMode parse_axis(const std::string& m) {
  return (m == "h" || m == "horizontal") ? AxisMode::horizontal : AxisMode::vertical;
}

CiTestSpec make_spec(const TestFlags& f, ColumnNames columns) {
  CiTestSpec spec;
  spec.columns = std::move(columns);
  spec.prior = DirichletPrior(f.alpha);
  spec.n_samples = f.samples;
  spec.n_bins = f.bins;
  spec.mode = parse_mode(f.mode);
  spec.seed = f.seed;
  spec.keep_truth_functions = !f.emit_truth.empty();
  try {
    spec.validate();
  } catch (const DomainError& e) {
    throw UsageError(e.what());
  }
  return spec;
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open '" + path + "'");
  return in;
}

void write_text(const std::string& path, const std::string& text, std::ostream& fallback) {
  if (path.empty()) {
    fallback << text;
    return;
  }
  std::ofstream file(path);
  if (!file) throw SchemaError("cannot write '" + path + "'");
  file << text;
}

std::string file_safe(const std::string& label) {
  std::string out = label;
  for (char& ch : out) {
    if (!std::isalnum(static_cast<unsigned char>(ch)) && ch != '-' && ch != '.') ch = '_';
  }
  return out;
}

void write_tsv_file(const fs::path& path, const TruthFunction& w) {
  std::ofstream file(path);
  if (!file) throw SchemaError("cannot write '" + path.string() + "'");
  write_tsv(file, w);
}

void emit_truth(const std::string& dir, const EvalueReport& report) {
  fs::create_directories(dir);
  for (const auto& s : report.slices) {
    const std::string stem = "slice_" + file_safe(s.label);
    if (s.horizontal_truth) write_tsv_file(fs::path(dir) / (stem + "_horizontal.tsv"), *s.horizontal_truth);
    if (s.vertical_truth) write_tsv_file(fs::path(dir) / (stem + "_vertical.tsv"), *s.vertical_truth);
  }
  if (report.composite_horizontal_truth) {
    write_tsv_file(fs::path(dir) / "composite_horizontal.tsv", *report.composite_horizontal_truth);
  }
  if (report.composite_vertical_truth) {
    write_tsv_file(fs::path(dir) / "composite_vertical.tsv", *report.composite_vertical_truth);
  }
}

int finish_test(const EvalueReport& report, const TestFlags& f, std::ostream& out) {
  write_text(f.out, to_json(report) + "\n", out);
  if (!f.emit_truth.empty()) emit_truth(f.emit_truth, report);
  if (f.threshold) {
    const double evidence = report.composite_vertical ? report.composite_vertical->lower
                                                      : report.composite_horizontal->upper;
    if (evidence < *f.threshold) return kBelowThreshold;
  }
  return kOk;
}

void run_demo(double mu1, double sigma1, double mu2, double sigma2, std::size_t bins,
              const std::string& mode_flag, const std::string& out_path, std::ostream& out,
              std::ostream& err) {
  const AxisMode mode = parse_axis(mode_flag);
  const auto w1 = lognormal_reference(mu1, sigma1, bins, mode);
  const auto w2 = lognormal_reference(mu2, sigma2, bins, mode);
  const TruthFunction ws[] = {w1, w2};
  const auto product = composite_truth_function(ws, bins);
  const double mu = mu1 + mu2;
  const double sigma = std::sqrt(sigma1 * sigma1 + sigma2 * sigma2);

  std::ostringstream tsv;
  tsv << "#log_f_left\tlog_f_right\tmass\tcdf_lower\tcdf_upper\teval_lower\teval_upper\tanalytic_cdf\n";
  tsv << std::setprecision(17);
  double worst = 0.0;
  for (const auto& b : product.bins()) {
    const Evalue at = elementary_evalue(product, b.log_f_right);
    const double exact = normal_cdf(b.log_f_right, mu, sigma);
    worst = std::max(worst, mode == AxisMode::vertical
                                ? std::abs(at.lower - exact)
                                : std::max({0.0, at.lower - exact, exact - at.upper}));
    tsv << b.log_f_left << '\t' << b.log_f_right << '\t' << b.mass << '\t' << b.cdf_lower << '\t'
        << b.cdf_upper << '\t' << at.lower << '\t' << at.upper << '\t' << exact << '\n';
  }
  write_text(out_path, tsv.str(), out);
  err << (mode == AxisMode::vertical ? "sup |condensed - analytic| = " : "max bracket violation = ")
      << worst << '\n';
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bayesian conditional-independence testing with e-values", "fbst"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));

  std::string cpt_path, gen_out;
  std::size_t gen_n = 0;
  std::uint64_t gen_seed = 0;
  auto* gen = app.add_subcommand("gen", "sample a dataset from a CPT model");
  gen->add_option("--cpt", cpt_path, "CPT model (JSON)")->required();
  gen->add_option("--n", gen_n, "number of records")->required();
  gen->add_option("--seed", gen_seed, "RNG seed")->required();
  gen->add_option("--out", gen_out, "CSV path (default: stdout)");

  std::string data_path, y_col, z_col, x_col;
  TestFlags test_flags;
  auto* test = app.add_subcommand("test", "test Y independent of Z given X on a CSV dataset");
  test->add_option("--data", data_path, "CSV with a header row")->required();
  test->add_option("--y", y_col, "Y column")->required();
  test->add_option("--z", z_col, "Z column")->required();
  test->add_option("--given", x_col, "conditioning column")->required();
  add_test_flags(test, test_flags);

  std::vector<std::string> table_paths;
  TestFlags tables_flags;
  auto* test_tables = app.add_subcommand("test-tables", "test from per-slice count grids");
  test_tables->add_option("--tables", table_paths, "one CSV count grid per conditioning value")->required();
  add_test_flags(test_tables, tables_flags);

  double mu1 = 0.0, sigma1 = 1.0, mu2 = 0.0, sigma2 = 1.0;
  std::size_t demo_bins = 100;
  std::string demo_mode = "h", demo_out;
  auto* demo = app.add_subcommand("demo-lognormal", "convolve two discretized log-normals against the exact product");
  demo->add_option("--mu1", mu1);
  demo->add_option("--sigma1", sigma1)->check(CLI::PositiveNumber);
  demo->add_option("--mu2", mu2);
  demo->add_option("--sigma2", sigma2)->check(CLI::PositiveNumber);
  demo->add_option("--bins", demo_bins)->check(CLI::Range(std::size_t{1}, std::size_t{100000}));
  demo->add_option("--mode", demo_mode)->check(CLI::IsMember({"h", "v", "horizontal", "vertical"}));
  demo->add_option("--out", demo_out, "TSV path (default: stdout)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*gen) {
      auto in = open_input(cpt_path);
      const auto model = parse_cpt(in);
      const auto dataset = sample_dataset(model, gen_n, gen_seed);
      std::ostringstream csv;
      emit_csv(csv, dataset, ColumnNames{});
      write_text(gen_out, csv.str(), out);
      return kOk;
    }
    if (*test) {
      const auto spec = make_spec(test_flags, ColumnNames{x_col, y_col, z_col});
      auto in = open_input(data_path);
      return finish_test(ci_test_csv(in, spec), test_flags, out);
    }
    if (*test_tables) {
      const auto spec = make_spec(tables_flags, ColumnNames{});
      std::vector<ContingencyTable> tables;
      for (std::size_t i = 0; i < table_paths.size(); ++i) {
        auto in = open_input(table_paths[i]);
        try {
          tables.push_back(read_table_csv(in, i + 1));
        } catch (const ParseError& e) {
          throw SchemaError(table_paths[i] + ": " + e.what());
        }
      }
      return finish_test(ci_test_from_tables(tables, spec), tables_flags, out);
    }
    if (*demo) {
      run_demo(mu1, sigma1, mu2, sigma2, demo_bins, demo_mode, demo_out, out, err);
      return kOk;
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kError;
  }
  return kUsage;
}

}  // namespace fbst::cli
