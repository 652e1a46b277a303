#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace fbst {

/// One observation. Category indices are 1-based.
struct Record {
  std::uint32_t x = 0;
  std::uint32_t y = 0;
  std::uint32_t z = 0;

  friend bool operator==(const Record&, const Record&) = default;
};

struct Cardinalities {
  std::size_t k = 0;  // states of X
  std::size_t r = 0;  // states of Y
  std::size_t c = 0;  // states of Z

  friend bool operator==(const Cardinalities&, const Cardinalities&) = default;
};

/// Raw (x, y, z) samples plus the label of every category index.
///
/// `x_labels[i]` is the original text of category index i + 1; likewise for y and z.
class Dataset {
 public:
  Dataset() = default;
  Dataset(std::vector<Record> records, Cardinalities dims,
          std::vector<std::string> x_labels, std::vector<std::string> y_labels,
          std::vector<std::string> z_labels);

  /// Builds a dataset whose labels are the decimal indices "1".."k".
  static Dataset with_index_labels(std::vector<Record> records, Cardinalities dims);

  const std::vector<Record>& records() const noexcept { return records_; }
  const Cardinalities& dims() const noexcept { return dims_; }
  std::size_t size() const noexcept { return records_.size(); }
  bool empty() const noexcept { return records_.empty(); }

  const std::vector<std::string>& x_labels() const noexcept { return x_labels_; }
  const std::vector<std::string>& y_labels() const noexcept { return y_labels_; }
  const std::vector<std::string>& z_labels() const noexcept { return z_labels_; }

  friend bool operator==(const Dataset&, const Dataset&) = default;

 private:
  std::vector<Record> records_;
  Cardinalities dims_;
  std::vector<std::string> x_labels_;
  std::vector<std::string> y_labels_;
  std::vector<std::string> z_labels_;
};

struct ColumnNames {
  std::string x = "X";
  std::string y = "Y";
  std::string z = "Z";
};

/// Reads a headed CSV and extracts the three named columns.
///
/// A column whose values are all positive integers keeps them as indices
/// (cardinality = largest value). Any other column is mapped to dense indices
/// in first-appearance order.
///
/// Throws SchemaError for an empty source or a missing column and ParseError
/// (carrying the 1-based line number) for malformed rows.
Dataset ingest_csv(std::istream& source, const ColumnNames& columns);

/// Writes the dataset as CSV with a header row. Categories are written as
/// their indices, so `ingest_csv(emit_csv(d))` reproduces `d` whenever every
/// declared category occurs.
void emit_csv(std::ostream& out, const Dataset& dataset, const ColumnNames& columns);

/// r x c grid of counts of (Y, Z) for one value of X.
class ContingencyTable {
 public:
  ContingencyTable() = default;
  /// `counts` is row-major with `rows * cols` entries.
  ContingencyTable(std::size_t rows, std::size_t cols, std::vector<std::uint64_t> counts,
                   std::size_t slice = 1, std::string label = {});
  /// Nested-vector convenience; all rows must have the same length.
  static ContingencyTable from_rows(const std::vector<std::vector<std::uint64_t>>& rows,
                                    std::size_t slice = 1, std::string label = {});

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::uint64_t at(std::size_t y, std::size_t z) const { return counts_[y * cols_ + z]; }
  const std::vector<std::uint64_t>& counts() const noexcept { return counts_; }

  const std::vector<std::uint64_t>& row_totals() const noexcept { return row_totals_; }
  const std::vector<std::uint64_t>& col_totals() const noexcept { return col_totals_; }
  std::uint64_t grand_total() const noexcept { return grand_total_; }

  /// 1-based index of the conditioning value this slice belongs to.
  std::size_t slice() const noexcept { return slice_; }
  const std::string& label() const noexcept { return label_; }

  /// No records fell into this slice.
  bool is_empty() const noexcept { return grand_total_ == 0; }

  ContingencyTable transposed() const;

  friend bool operator==(const ContingencyTable&, const ContingencyTable&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::uint64_t> counts_;
  std::vector<std::uint64_t> row_totals_;
  std::vector<std::uint64_t> col_totals_;
  std::uint64_t grand_total_ = 0;
  std::size_t slice_ = 1;
  std::string label_;
};

/// One table per x in 1..k, in order. Unobserved x values yield all-zero tables.
std::vector<ContingencyTable> contingency_slices(const Dataset& dataset);

/// Reads one r x c count grid: comma-separated non-negative integers, one row
/// per line. Blank lines and lines starting with '#' are skipped.
ContingencyTable read_table_csv(std::istream& source, std::size_t slice = 1,
                                std::string label = {});

/// Generative model for (X, Y, Z).
///
/// Z depends on X alone (`ZMode::given_x`, p(Z|X) has k rows) or on X and Y
/// (`ZMode::given_xy`, p(Z|X,Y) has k*r rows, indexed x*r + y with 0-based x, y).
struct CptModel {
  enum class ZMode { given_x, given_xy };

  std::vector<double> px;
  std::vector<std::vector<double>> py_given_x;
  ZMode z_mode = ZMode::given_x;
  std::vector<std::vector<double>> pz;

  Cardinalities dims() const;
  /// Throws DomainError unless every vector is a probability vector (sum within 1e-9)
  /// with consistent dimensions.
  void validate() const;
  const std::vector<double>& z_distribution(std::size_t x, std::size_t y) const;
};

/// Parses the JSON CPT document (see docs/cpt-format.md). Throws SchemaError.
CptModel parse_cpt(std::istream& source);
std::string to_json(const CptModel& model);

/// Draws `n` i.i.d. records. Same (model, n, seed) always yields the same dataset.
Dataset sample_dataset(const CptModel& model, std::size_t n, std::uint64_t seed);

}  // namespace fbst
