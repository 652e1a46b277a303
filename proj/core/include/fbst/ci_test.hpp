#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fbst/convolution.hpp"
#include "fbst/posterior.hpp"
#include "fbst/tables.hpp"
#include "fbst/truth_function.hpp"

namespace fbst {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kReportSchema = "fbst-report/1";

enum class TestMode { horizontal, vertical, both };

const char* to_string(TestMode mode) noexcept;

/// Test of Y independent of Z given X, decomposed into one independence
/// hypothesis per observed value of X.
struct CiTestSpec {
  ColumnNames columns;
  DirichletPrior prior{1.0};
  std::uint64_t n_samples = 1'000'000;
  std::size_t n_bins = 100;
  TestMode mode = TestMode::both;
  std::uint64_t seed = 0;
  /// Keep per-slice and composite truth functions in the report.
  bool keep_truth_functions = false;

  /// Throws DomainError on n_samples < n_bins < 2 or Y and Z naming the same column.
  void validate() const;
  bool wants(AxisMode m) const noexcept;
};

struct SliceResult {
  std::string label;
  std::uint64_t total = 0;
  double log_f_star = 0.0;
  /// Empty slice or flat posterior: Ev = 1 by definition, point-mass truth function.
  bool degenerate = false;
  /// The constrained maximum lies on the simplex boundary.
  bool boundary = false;
  std::optional<Evalue> horizontal;
  std::optional<Evalue> vertical;
  std::optional<TruthFunction> horizontal_truth;
  std::optional<TruthFunction> vertical_truth;
};

struct EvalueReport {
  ColumnNames columns;
  std::vector<std::string> y_labels;
  std::vector<std::string> z_labels;
  std::vector<SliceResult> slices;
  std::optional<Evalue> composite_horizontal;
  std::optional<Evalue> composite_vertical;
  std::optional<TruthFunction> composite_horizontal_truth;
  std::optional<TruthFunction> composite_vertical_truth;
  double log_f_star_total = 0.0;

  // provenance
  std::uint64_t seed = 0;
  std::uint64_t n_samples = 0;
  std::size_t n_bins = 0;
  std::string prior;
  TestMode mode = TestMode::both;
};

/// Aggregates the dataset by observed X values and runs ci_test_from_tables.
/// Throws DomainError naming the column when Y or Z has fewer than two observed categories.
EvalueReport ci_test(const Dataset& dataset, const CiTestSpec& spec);

/// Same as ci_test, reading the three named columns from CSV. Throws SchemaError
/// for unknown columns.
EvalueReport ci_test_csv(std::istream& csv, const CiTestSpec& spec);

/// Runs the per-slice pipeline and the composite fold on prepared tables.
/// Throws DomainError when the tables differ in shape or are smaller than 2 x 2.
///
/// Slices are convolved in a canonical order and seeded from their content,
/// so relabeling X, Y or Z (or swapping Y and Z) leaves every e-value bit-identical.
EvalueReport ci_test_from_tables(std::span<const ContingencyTable> tables, const CiTestSpec& spec);

/// JSON document described in docs/report-schema.md.
std::string to_json(const EvalueReport& report);

}  // namespace fbst
