#include "fbst/ci_test.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "detail.hpp"
#include "fbst/error.hpp"

namespace fbst {
namespace {

struct SliceWork {
  std::size_t index = 0;
  std::vector<double> key;  // sorted concentrations
  double kernel_star = 0.0;
  std::uint64_t seed = 0;
};

std::string describe_prior(const DirichletPrior& prior) {
  if (!prior.is_scalar()) return "grid";
  std::ostringstream os;
  os << prior.scalar();
  return os.str();
}

nlohmann::ordered_json number_or_null(double v) {
  return std::isfinite(v) ? nlohmann::ordered_json(v) : nlohmann::ordered_json(nullptr);
}

nlohmann::ordered_json evalue_json(const std::optional<Evalue>& h, const std::optional<Evalue>& v) {
  nlohmann::ordered_json out = nlohmann::ordered_json::object();
  if (h) out["horizontal"] = {{"lower", h->lower}, {"upper", h->upper}};
  if (v) out["vertical"] = v->lower;
  return out;
}

}  // namespace

const char* to_string(TestMode mode) noexcept {
  switch (mode) {
    case TestMode::horizontal: return "horizontal";
    case TestMode::vertical: return "vertical";
    case TestMode::both: return "both";
  }
  return "both";
}

void CiTestSpec::validate() const {
  if (n_bins < 2) throw DomainError("n_bins must be at least 2");
  if (n_samples < n_bins) throw DomainError("n_samples must be at least n_bins");
  if (columns.y == columns.z) throw DomainError("Y and Z must be different columns");
  if (columns.x == columns.y || columns.x == columns.z) {
    throw DomainError("the conditioning column must differ from Y and Z");
  }
}

bool CiTestSpec::wants(AxisMode m) const noexcept {
  if (mode == TestMode::both) return true;
  return (mode == TestMode::horizontal) == (m == AxisMode::horizontal);
}

EvalueReport ci_test(const Dataset& dataset, const CiTestSpec& spec) {
  spec.validate();
  if (dataset.empty()) throw DomainError("dataset is empty");
  std::set<std::uint32_t> ys, zs, xs;
  for (const Record& rec : dataset.records()) {
    ys.insert(rec.y);
    zs.insert(rec.z);
    xs.insert(rec.x);
  }
  if (ys.size() < 2) throw DomainError("column '" + spec.columns.y + "' has fewer than two observed categories");
  if (zs.size() < 2) throw DomainError("column '" + spec.columns.z + "' has fewer than two observed categories");

  auto slices = contingency_slices(dataset);
  std::vector<ContingencyTable> observed;
  for (auto& t : slices) {
    if (xs.count(static_cast<std::uint32_t>(t.slice())) != 0) observed.push_back(std::move(t));
  }
  EvalueReport report = ci_test_from_tables(observed, spec);
  report.y_labels = dataset.y_labels();
  report.z_labels = dataset.z_labels();
  return report;
}

EvalueReport ci_test_csv(std::istream& csv, const CiTestSpec& spec) {
  spec.validate();
  return ci_test(ingest_csv(csv, spec.columns), spec);
}

EvalueReport ci_test_from_tables(std::span<const ContingencyTable> tables, const CiTestSpec& spec) {
  spec.validate();
  if (tables.empty()) throw DomainError("no contingency tables to test");
  const std::size_t rows = tables.front().rows();
  const std::size_t cols = tables.front().cols();
  for (const auto& t : tables) {
    if (t.rows() != rows || t.cols() != cols) throw DomainError("contingency tables differ in shape");
  }
  if (rows < 2 || cols < 2) throw DomainError("independence needs at least a 2x2 table");
  spec.prior.check_shape(rows, cols);

  EvalueReport report;
  report.columns = spec.columns;
  report.seed = spec.seed;
  report.n_samples = spec.n_samples;
  report.n_bins = spec.n_bins;
  report.prior = describe_prior(spec.prior);
  report.mode = spec.mode;
  for (std::size_t y = 1; y <= rows; ++y) report.y_labels.push_back(std::to_string(y));
  for (std::size_t z = 1; z <= cols; ++z) report.z_labels.push_back(std::to_string(z));

  const std::size_t k = tables.size();
  std::vector<DirichletPosterior> posteriors;
  std::vector<ConstrainedMap> maps;
  std::vector<SliceWork> work(k);
  posteriors.reserve(k);
  maps.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    posteriors.push_back(DirichletPosterior::from_table(tables[i], spec.prior));
    try {
      maps.push_back(constrained_map(posteriors.back()));
    } catch (const DomainError& e) {
      throw DomainError("slice '" + tables[i].label() + "': " + e.what());
    }
    work[i].index = i;
    work[i].key = posteriors.back().concentrations();
    std::sort(work[i].key.begin(), work[i].key.end());
    work[i].kernel_star = maps.back().log_kernel_star;
  }

  // Canonical slice order and content-derived seeds make the result independent of labels.
  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (work[a].key != work[b].key) return work[a].key < work[b].key;
    return work[a].kernel_star < work[b].kernel_star;
  });
  for (std::size_t pos = 0, dup = 0; pos < k; ++pos) {
    dup = (pos > 0 && work[order[pos]].key == work[order[pos - 1]].key) ? dup + 1 : 0;
    work[order[pos]].seed = detail::mix(detail::hash_doubles(spec.seed, work[order[pos]].key), dup);
  }

  std::vector<TruthFunction> horizontal(k), vertical(k);
  report.slices.resize(k);
  for (std::size_t i = 0; i < k; ++i) {
    const auto& table = tables[i];
    const auto& post = posteriors[i];
    const auto& map = maps[i];
    SliceResult& s = report.slices[i];
    s.label = table.label();
    s.total = table.grand_total();
    s.log_f_star = map.log_f_star;
    s.boundary = map.boundary;
    s.degenerate = table.is_empty() || post.is_flat();

    if (s.degenerate) {
      horizontal[i] = point_mass(AxisMode::horizontal, map.log_kernel_star, "degenerate slice", post.log_norm_const());
      vertical[i] = point_mass(AxisMode::vertical, map.log_kernel_star, "degenerate slice", post.log_norm_const());
    } else {
      const auto kernels = sample_log_kernels(post, spec.n_samples, work[i].seed);
      if (spec.wants(AxisMode::horizontal)) {
        horizontal[i] = discretize_horizontal(kernels, spec.n_bins, post.log_norm_const());
      }
      if (spec.wants(AxisMode::vertical)) {
        vertical[i] = discretize_vertical(kernels, spec.n_bins, post.log_norm_const());
      }
    }
    const std::string label = "slice " + s.label;
    if (spec.wants(AxisMode::horizontal)) {
      horizontal[i].set_source_label(label);
      s.horizontal = s.degenerate ? Evalue{1.0, 1.0} : elementary_evalue(horizontal[i], map.log_kernel_star);
      if (spec.keep_truth_functions) s.horizontal_truth = horizontal[i];
    }
    if (spec.wants(AxisMode::vertical)) {
      vertical[i].set_source_label(label);
      s.vertical = s.degenerate ? Evalue{1.0, 1.0} : elementary_evalue(vertical[i], map.log_kernel_star);
      if (spec.keep_truth_functions) s.vertical_truth = vertical[i];
    }
  }

  std::vector<double> thresholds;
  std::vector<double> log_f_stars;
  for (std::size_t i : order) {
    thresholds.push_back(maps[i].log_kernel_star);
    log_f_stars.push_back(maps[i].log_f_star);
  }
  report.log_f_star_total = std::accumulate(log_f_stars.begin(), log_f_stars.end(), 0.0);

  const auto fold = [&](AxisMode mode, const std::vector<TruthFunction>& ws, std::optional<Evalue>& ev,
                        std::optional<TruthFunction>& kept) {
    std::vector<TruthFunction> ordered;
    ordered.reserve(k);
    for (std::size_t i : order) ordered.push_back(ws[i]);
    TruthFunction w = composite_truth_function(ordered, spec.n_bins);
    const bool all_degenerate = std::all_of(report.slices.begin(), report.slices.end(),
                                            [](const SliceResult& s) { return s.degenerate; });
    if (k == 1) {
      const auto& only = report.slices.front();
      ev = mode == AxisMode::horizontal ? only.horizontal : only.vertical;
    } else {
      w.set_source_label("composite");
      const double total = std::accumulate(thresholds.begin(), thresholds.end(), 0.0);
      ev = all_degenerate ? Evalue{1.0, 1.0} : elementary_evalue(w, total);
    }
    if (spec.keep_truth_functions) kept = std::move(w);
  };
  if (spec.wants(AxisMode::horizontal)) {
    fold(AxisMode::horizontal, horizontal, report.composite_horizontal, report.composite_horizontal_truth);
  }
  if (spec.wants(AxisMode::vertical)) {
    fold(AxisMode::vertical, vertical, report.composite_vertical, report.composite_vertical_truth);
  }
  return report;
}

std::string to_json(const EvalueReport& report) {
  using nlohmann::ordered_json;
  ordered_json doc;
  doc["schema"] = kReportSchema;
  doc["hypothesis"] = {{"y", report.columns.y}, {"z", report.columns.z}, {"given", report.columns.x}};
  doc["categories"] = {{"y", report.y_labels}, {"z", report.z_labels}};
  ordered_json slices = ordered_json::array();
  for (const auto& s : report.slices) {
    ordered_json js;
    js["label"] = s.label;
    js["total"] = s.total;
    js["log_f_star"] = number_or_null(s.log_f_star);
    js["degenerate"] = s.degenerate;
    js["boundary"] = s.boundary;
    js["evalue"] = evalue_json(s.horizontal, s.vertical);
    slices.push_back(std::move(js));
  }
  doc["slices"] = std::move(slices);
  ordered_json composite;
  composite["log_f_star"] = number_or_null(report.log_f_star_total);
  composite["evalue"] = evalue_json(report.composite_horizontal, report.composite_vertical);
  doc["composite"] = std::move(composite);
  doc["provenance"] = {{"seed", report.seed},
                       {"n_samples", report.n_samples},
                       {"n_bins", report.n_bins},
                       {"alpha", report.prior},
                       {"mode", to_string(report.mode)},
                       {"version", kVersion}};
  return doc.dump(2);
}

}  // namespace fbst
