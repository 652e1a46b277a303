#include "fbst/tables.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "fbst/error.hpp"

namespace fbst {
namespace {

std::vector<std::string> split_csv_line(const std::string& line, std::size_t line_no) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(ch);
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else {
      field.push_back(ch);
    }
  }
  if (quoted) throw ParseError(line_no, "unterminated quote");
  fields.push_back(std::move(field));
  return fields;
}

std::string trim(std::string s) {
  const auto not_space = [](unsigned char ch) { return !std::isspace(ch); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

bool parse_positive_index(const std::string& s, std::uint32_t& out) {
  if (s.empty() || s.size() > 9) return false;
  std::uint32_t v = 0;
  for (char ch : s) {
    if (ch < '0' || ch > '9') return false;
    v = v * 10 + static_cast<std::uint32_t>(ch - '0');
  }
  if (v == 0) return false;
  out = v;
  return true;
}

// Converts one column of raw values to 1-based indices and labels.
struct EncodedColumn {
  std::vector<std::uint32_t> indices;
  std::vector<std::string> labels;
};

EncodedColumn encode_column(const std::vector<std::string>& values) {
  EncodedColumn out;
  out.indices.resize(values.size());
  bool integral = true;
  std::uint32_t max_index = 0;
  for (std::size_t i = 0; i < values.size() && integral; ++i) {
    integral = parse_positive_index(values[i], out.indices[i]);
    max_index = std::max(max_index, out.indices[i]);
  }
  if (integral) {
    out.labels.reserve(max_index);
    for (std::uint32_t v = 1; v <= max_index; ++v) out.labels.push_back(std::to_string(v));
    return out;
  }
  std::unordered_map<std::string, std::uint32_t> seen;
  for (std::size_t i = 0; i < values.size(); ++i) {
    auto [it, inserted] = seen.try_emplace(values[i], static_cast<std::uint32_t>(seen.size() + 1));
    if (inserted) out.labels.push_back(values[i]);
    out.indices[i] = it->second;
  }
  return out;
}

void check_probability_vector(const std::vector<double>& p, std::size_t expected,
                              const std::string& what) {
  if (p.size() != expected) {
    throw DomainError(what + ": expected " + std::to_string(expected) + " entries, got " +
                      std::to_string(p.size()));
  }
  double sum = 0.0;
  for (double v : p) {
    if (!(v >= 0.0)) throw DomainError(what + ": negative or NaN probability");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw DomainError(what + ": probabilities do not sum to 1");
}

}  // namespace

Dataset::Dataset(std::vector<Record> records, Cardinalities dims, std::vector<std::string> x_labels,
                 std::vector<std::string> y_labels, std::vector<std::string> z_labels)
    : records_(std::move(records)),
      dims_(dims),
      x_labels_(std::move(x_labels)),
      y_labels_(std::move(y_labels)),
      z_labels_(std::move(z_labels)) {
  if (dims_.k == 0 || dims_.r == 0 || dims_.c == 0) {
    throw DomainError("dataset cardinalities must be at least 1");
  }
  if (x_labels_.size() != dims_.k || y_labels_.size() != dims_.r || z_labels_.size() != dims_.c) {
    throw DomainError("dataset label counts do not match cardinalities");
  }
  for (const Record& rec : records_) {
    if (rec.x < 1 || rec.x > dims_.k || rec.y < 1 || rec.y > dims_.r || rec.z < 1 ||
        rec.z > dims_.c) {
      throw DomainError("record index outside declared cardinalities");
    }
  }
}

Dataset Dataset::with_index_labels(std::vector<Record> records, Cardinalities dims) {
  const auto labels = [](std::size_t n) {
    std::vector<std::string> out;
    out.reserve(n);
    for (std::size_t i = 1; i <= n; ++i) out.push_back(std::to_string(i));
    return out;
  };
  return Dataset(std::move(records), dims, labels(dims.k), labels(dims.r), labels(dims.c));
}

Dataset ingest_csv(std::istream& source, const ColumnNames& columns) {
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(source, line)) throw SchemaError("empty CSV input");
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  auto header = split_csv_line(line, line_no);
  for (auto& h : header) h = trim(h);

  const auto locate = [&](const std::string& name) {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw SchemaError("missing column '" + name + "'");
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t ix = locate(columns.x);
  const std::size_t iy = locate(columns.y);
  const std::size_t iz = locate(columns.z);

  std::vector<std::string> xs, ys, zs;
  while (std::getline(source, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    auto fields = split_csv_line(line, line_no);
    if (fields.size() != header.size()) {
      throw ParseError(line_no, "expected " + std::to_string(header.size()) + " fields, got " +
                                    std::to_string(fields.size()));
    }
    for (std::size_t idx : {ix, iy, iz}) {
      fields[idx] = trim(fields[idx]);
      if (fields[idx].empty()) throw ParseError(line_no, "empty value in column '" + header[idx] + "'");
    }
    xs.push_back(std::move(fields[ix]));
    ys.push_back(std::move(fields[iy]));
    zs.push_back(std::move(fields[iz]));
  }
  if (xs.empty()) throw SchemaError("CSV has a header but no data rows");

  auto ex = encode_column(xs);
  auto ey = encode_column(ys);
  auto ez = encode_column(zs);
  std::vector<Record> records(xs.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    records[i] = Record{ex.indices[i], ey.indices[i], ez.indices[i]};
  }
  Cardinalities dims{ex.labels.size(), ey.labels.size(), ez.labels.size()};
  return Dataset(std::move(records), dims, std::move(ex.labels), std::move(ey.labels),
                 std::move(ez.labels));
}

void emit_csv(std::ostream& out, const Dataset& dataset, const ColumnNames& columns) {
  out << columns.x << ',' << columns.y << ',' << columns.z << '\n';
  for (const Record& rec : dataset.records()) {
    out << rec.x << ',' << rec.y << ',' << rec.z << '\n';
  }
}

ContingencyTable::ContingencyTable(std::size_t rows, std::size_t cols,
                                   std::vector<std::uint64_t> counts, std::size_t slice,
                                   std::string label)
    : rows_(rows), cols_(cols), counts_(std::move(counts)), slice_(slice), label_(std::move(label)) {
  if (rows_ == 0 || cols_ == 0) throw DomainError("contingency table needs at least one cell");
  if (counts_.size() != rows_ * cols_) throw DomainError("contingency table size mismatch");
  row_totals_.assign(rows_, 0);
  col_totals_.assign(cols_, 0);
  for (std::size_t y = 0; y < rows_; ++y) {
    for (std::size_t z = 0; z < cols_; ++z) {
      row_totals_[y] += at(y, z);
      col_totals_[z] += at(y, z);
    }
  }
  grand_total_ = std::accumulate(row_totals_.begin(), row_totals_.end(), std::uint64_t{0});
  if (label_.empty()) label_ = std::to_string(slice_);
}

ContingencyTable ContingencyTable::from_rows(const std::vector<std::vector<std::uint64_t>>& rows,
                                             std::size_t slice, std::string label) {
  if (rows.empty()) throw DomainError("contingency table needs at least one row");
  const std::size_t cols = rows.front().size();
  std::vector<std::uint64_t> flat;
  flat.reserve(rows.size() * cols);
  for (const auto& row : rows) {
    if (row.size() != cols) throw DomainError("ragged contingency table");
    flat.insert(flat.end(), row.begin(), row.end());
  }
  return ContingencyTable(rows.size(), cols, std::move(flat), slice, std::move(label));
}

ContingencyTable ContingencyTable::transposed() const {
  std::vector<std::uint64_t> t(counts_.size());
  for (std::size_t y = 0; y < rows_; ++y) {
    for (std::size_t z = 0; z < cols_; ++z) t[z * rows_ + y] = at(y, z);
  }
  return ContingencyTable(cols_, rows_, std::move(t), slice_, label_);
}

std::vector<ContingencyTable> contingency_slices(const Dataset& dataset) {
  const auto& d = dataset.dims();
  std::vector<std::vector<std::uint64_t>> grids(d.k, std::vector<std::uint64_t>(d.r * d.c, 0));
  for (const Record& rec : dataset.records()) {
    ++grids[rec.x - 1][(rec.y - 1) * d.c + (rec.z - 1)];
  }
  std::vector<ContingencyTable> out;
  out.reserve(d.k);
  for (std::size_t x = 0; x < d.k; ++x) {
    out.emplace_back(d.r, d.c, std::move(grids[x]), x + 1, dataset.x_labels()[x]);
  }
  return out;
}

ContingencyTable read_table_csv(std::istream& source, std::size_t slice, std::string label) {
  std::vector<std::vector<std::uint64_t>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(source, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    std::vector<std::uint64_t> row;
    for (auto& field : split_csv_line(line, line_no)) {
      field = trim(field);
      std::uint64_t v = 0;
      if (field.empty() || field.find_first_not_of("0123456789") != std::string::npos) {
        throw ParseError(line_no, "count '" + field + "' is not a non-negative integer");
      }
      std::istringstream(field) >> v;
      row.push_back(v);
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw ParseError(line_no, "row length differs from the first row");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw SchemaError("count grid is empty");
  return ContingencyTable::from_rows(rows, slice, std::move(label));
}

Cardinalities CptModel::dims() const {
  const std::size_t c = pz.empty() ? 0 : pz.front().size();
  const std::size_t r = py_given_x.empty() ? 0 : py_given_x.front().size();
  return Cardinalities{px.size(), r, c};
}

void CptModel::validate() const {
  const auto d = dims();
  if (d.k == 0 || d.r == 0 || d.c == 0) throw DomainError("CPT model has an empty dimension");
  check_probability_vector(px, d.k, "px");
  if (py_given_x.size() != d.k) throw DomainError("py_given_x must have k rows");
  for (std::size_t x = 0; x < d.k; ++x) {
    check_probability_vector(py_given_x[x], d.r, "py_given_x[" + std::to_string(x + 1) + "]");
  }
  const std::size_t expected_rows = z_mode == ZMode::given_x ? d.k : d.k * d.r;
  if (pz.size() != expected_rows) {
    throw DomainError("pz must have " + std::to_string(expected_rows) + " rows");
  }
  for (std::size_t i = 0; i < pz.size(); ++i) {
    check_probability_vector(pz[i], d.c, "pz[" + std::to_string(i) + "]");
  }
}

const std::vector<double>& CptModel::z_distribution(std::size_t x, std::size_t y) const {
  return z_mode == ZMode::given_x ? pz[x] : pz[x * py_given_x.front().size() + y];
}

CptModel parse_cpt(std::istream& source) {
  nlohmann::json doc;
  try {
    source >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("CPT document is not valid JSON: ") + e.what());
  }
  CptModel model;
  try {
    const auto k = doc.at("k").get<std::size_t>();
    const auto r = doc.at("r").get<std::size_t>();
    const auto c = doc.at("c").get<std::size_t>();
    model.px = doc.at("px").get<std::vector<double>>();
    model.py_given_x = doc.at("py_given_x").get<std::vector<std::vector<double>>>();
    const auto mode = doc.at("mode").get<std::string>();
    if (mode == "z_given_x") {
      model.z_mode = CptModel::ZMode::given_x;
      model.pz = doc.at("pz").get<std::vector<std::vector<double>>>();
    } else if (mode == "z_given_xy") {
      model.z_mode = CptModel::ZMode::given_xy;
      const auto nested = doc.at("pz").get<std::vector<std::vector<std::vector<double>>>>();
      if (nested.size() != k) throw SchemaError("pz must have k blocks in z_given_xy mode");
      for (const auto& block : nested) {
        if (block.size() != r) throw SchemaError("each pz block must have r rows in z_given_xy mode");
        model.pz.insert(model.pz.end(), block.begin(), block.end());
      }
    } else {
      throw SchemaError("mode must be 'z_given_x' or 'z_given_xy', got '" + mode + "'");
    }
    const auto d = model.dims();
    if (d.k != k || d.r != r || d.c != c) throw SchemaError("declared k, r, c disagree with tables");
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("malformed CPT document: ") + e.what());
  }
  try {
    model.validate();
  } catch (const DomainError& e) {
    throw SchemaError(std::string("invalid CPT: ") + e.what());
  }
  return model;
}

std::string to_json(const CptModel& model) {
  const auto d = model.dims();
  nlohmann::json doc;
  doc["k"] = d.k;
  doc["r"] = d.r;
  doc["c"] = d.c;
  doc["px"] = model.px;
  doc["py_given_x"] = model.py_given_x;
  if (model.z_mode == CptModel::ZMode::given_x) {
    doc["mode"] = "z_given_x";
    doc["pz"] = model.pz;
  } else {
    doc["mode"] = "z_given_xy";
    nlohmann::json blocks = nlohmann::json::array();
    for (std::size_t x = 0; x < d.k; ++x) {
      blocks.push_back(std::vector<std::vector<double>>(model.pz.begin() + x * d.r,
                                                        model.pz.begin() + (x + 1) * d.r));
    }
    doc["pz"] = blocks;
  }
  return doc.dump(2);
}

Dataset sample_dataset(const CptModel& model, std::size_t n, std::uint64_t seed) {
  model.validate();
  const auto d = model.dims();
  using Discrete = std::discrete_distribution<std::uint32_t>;
  Discrete draw_x(model.px.begin(), model.px.end());
  std::vector<Discrete> draw_y;
  for (const auto& p : model.py_given_x) draw_y.emplace_back(p.begin(), p.end());
  std::vector<Discrete> draw_z;
  for (const auto& p : model.pz) draw_z.emplace_back(p.begin(), p.end());

  std::mt19937_64 rng(seed);
  std::vector<Record> records(n);
  for (auto& rec : records) {
    const std::uint32_t x = draw_x(rng);
    const std::uint32_t y = draw_y[x](rng);
    const std::size_t zi = model.z_mode == CptModel::ZMode::given_x ? x : x * d.r + y;
    const std::uint32_t z = draw_z[zi](rng);
    rec = Record{x + 1, y + 1, z + 1};
  }
  return Dataset::with_index_labels(std::move(records), d);
}

}  // namespace fbst
