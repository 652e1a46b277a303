#include "fbst/truth_function.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>

#include "fbst/error.hpp"

namespace fbst {
namespace {

constexpr double kMassTolerance = 1e-9;

// Overlaps below this fraction of an atom's mass are rounding slivers: they
// count toward bin mass but not toward bin edges.
constexpr double kSliver = 1e-12;

void fill_cdf(std::vector<TruthBin>& bins) {
  double cum = 0.0;
  for (auto& b : bins) {
    b.cdf_lower = cum;
    cum += b.mass;
    b.cdf_upper = cum;
  }
}

}  // namespace

const char* to_string(AxisMode mode) noexcept {
  return mode == AxisMode::horizontal ? "horizontal" : "vertical";
}

TruthFunction::TruthFunction(AxisMode mode, std::vector<TruthBin> bins, std::uint64_t n_samples,
                             std::string source_label, double log_offset)
    : mode_(mode),
      bins_(std::move(bins)),
      n_samples_(n_samples),
      source_label_(std::move(source_label)),
      log_offset_(log_offset) {
  validate();
}

std::vector<Atom> TruthFunction::atoms() const {
  std::vector<Atom> out;
  out.reserve(bins_.size());
  for (const auto& b : bins_) out.push_back(Atom{b.representative, b.mass, b.log_f_left, b.log_f_right});
  return out;
}

void TruthFunction::validate() const {
  if (bins_.empty()) throw DomainError("truth function has no bins");
  double total = 0.0;
  for (std::size_t i = 0; i < bins_.size(); ++i) {
    const auto& b = bins_[i];
    if (!(b.log_f_left <= b.log_f_right)) throw DomainError("bin " + std::to_string(i) + " has left > right");
    if (!(b.mass >= 0.0)) throw DomainError("bin " + std::to_string(i) + " has negative mass");
    if (b.cdf_lower > b.cdf_upper + kMassTolerance) {
      throw DomainError("bin " + std::to_string(i) + " has cdf_lower > cdf_upper");
    }
    if (i > 0) {
      const auto& prev = bins_[i - 1];
      if (b.log_f_left < prev.log_f_left || b.log_f_right < prev.log_f_right) {
        throw DomainError("bin edges are not nondecreasing at bin " + std::to_string(i));
      }
      if (b.cdf_lower + kMassTolerance < prev.cdf_lower || b.cdf_upper + kMassTolerance < prev.cdf_upper) {
        throw DomainError("bin cdf bounds decrease at bin " + std::to_string(i));
      }
    }
    total += b.mass;
  }
  if (std::abs(total - 1.0) > kMassTolerance) throw DomainError("truth function mass does not sum to 1");
  if (std::abs(bins_.back().cdf_upper - 1.0) > kMassTolerance) {
    throw DomainError("truth function does not reach cdf 1");
  }
}

TruthFunction point_mass(AxisMode mode, double log_f, std::string label, double log_offset) {
  TruthBin bin{log_f, log_f, 1.0, 0.0, 1.0, log_f};
  TruthFunction out(mode, {bin}, 0, std::move(label), log_offset);
  out.mark_degenerate();
  return out;
}

TruthFunction discretize_horizontal(std::span<const double> values, std::size_t n_bins,
                                    double log_offset) {
  if (values.empty()) throw DomainError("cannot discretize an empty sample");
  if (n_bins < 1) throw DomainError("need at least one bin");
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  if (!std::isfinite(lo) || !std::isfinite(hi)) throw DomainError("non-finite log density in sample");
  if (lo == hi) {
    auto out = point_mass(AxisMode::horizontal, lo, "sample", log_offset);
    return out;
  }
  const double width = (hi - lo) / static_cast<double>(n_bins);
  std::vector<std::uint64_t> counts(n_bins, 0);
  for (double v : values) {
    const auto idx = static_cast<std::size_t>((v - lo) / width);
    ++counts[std::min(idx, n_bins - 1)];
  }
  const double n = static_cast<double>(values.size());
  std::vector<TruthBin> bins(n_bins);
  std::uint64_t cum = 0;
  for (std::size_t i = 0; i < n_bins; ++i) {
    auto& b = bins[i];
    b.log_f_left = lo + static_cast<double>(i) * width;
    b.log_f_right = i + 1 == n_bins ? hi : lo + static_cast<double>(i + 1) * width;
    b.representative = 0.5 * (b.log_f_left + b.log_f_right);
    b.mass = static_cast<double>(counts[i]) / n;
    b.cdf_lower = static_cast<double>(cum) / n;
    cum += counts[i];
    b.cdf_upper = static_cast<double>(cum) / n;
  }
  return TruthFunction(AxisMode::horizontal, std::move(bins), values.size(), "sample", log_offset);
}

std::vector<TruthBin> quantile_bins(std::span<const Atom> atoms, std::size_t n_bins) {
  if (atoms.empty()) throw DomainError("cannot condense an empty atom list");
  if (n_bins < 1) throw DomainError("need at least one bin");
  // Extended precision keeps the prefix sums of ~1e6 equal masses on the breakpoints.
  std::vector<long double> cum(atoms.size() + 1, 0.0L);
  for (std::size_t j = 0; j < atoms.size(); ++j) cum[j + 1] = cum[j] + atoms[j].mass;
  const long double total = cum.back();

  std::vector<TruthBin> bins;
  bins.reserve(n_bins);
  std::size_t j = 0;
  for (std::size_t k = 0; k < n_bins; ++k) {
    const long double lo = static_cast<long double>(k) / n_bins;
    const long double hi = k + 1 == n_bins ? std::max(total, 1.0L) : static_cast<long double>(k + 1) / n_bins;
    long double mass = 0.0L;
    long double weighted = 0.0L;
    bool have_edge = false;
    TruthBin b;
    std::size_t jj = j;
    while (jj < atoms.size() && cum[jj] < hi) {
      const long double overlap = std::min(cum[jj + 1], hi) - std::max(cum[jj], lo);
      if (overlap > 0.0L) {
        mass += overlap;
        weighted += overlap * atoms[jj].log_f;
        if (overlap > kSliver * atoms[jj].mass) {
          if (!have_edge) b.log_f_left = atoms[jj].log_f;
          b.log_f_right = atoms[jj].log_f;
          have_edge = true;
        }
      }
      if (cum[jj + 1] <= hi) {
        ++jj;
      } else {
        break;
      }
    }
    // Advance past atoms fully consumed by this bin.
    while (j < atoms.size() && cum[j + 1] <= hi) ++j;
    if (!have_edge) {
      const std::size_t at = std::min(j, atoms.size() - 1);
      b.log_f_left = b.log_f_right = atoms[at].log_f;
    }
    b.mass = static_cast<double>(mass);
    b.representative = mass > 0.0L ? static_cast<double>(weighted / mass) : b.log_f_left;
    b.representative = std::clamp(b.representative, b.log_f_left, b.log_f_right);
    bins.push_back(b);
  }
  // Edges of neighbouring bins may only touch when an atom is split.
  for (std::size_t k = 1; k < bins.size(); ++k) {
    bins[k].log_f_left = std::max(bins[k].log_f_left, bins[k - 1].log_f_left);
    bins[k].log_f_right = std::max(bins[k].log_f_right, bins[k - 1].log_f_right);
  }
  fill_cdf(bins);
  return bins;
}

TruthFunction discretize_vertical(std::span<const double> values, std::size_t n_bins,
                                  double log_offset) {
  if (values.empty()) throw DomainError("cannot discretize an empty sample");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  if (!std::isfinite(sorted.front()) || !std::isfinite(sorted.back())) {
    throw DomainError("non-finite log density in sample");
  }
  if (sorted.front() == sorted.back()) {
    return point_mass(AxisMode::vertical, sorted.front(), "sample", log_offset);
  }
  const double m = 1.0 / static_cast<double>(sorted.size());
  std::vector<Atom> atoms;
  atoms.reserve(sorted.size());
  for (double v : sorted) atoms.push_back(Atom{v, m, v, v});
  return TruthFunction(AxisMode::vertical, quantile_bins(atoms, n_bins), values.size(), "sample",
                       log_offset);
}

std::vector<double> sample_log_kernels(const DirichletPosterior& posterior, std::uint64_t n_samples,
                                       std::uint64_t seed) {
  Rng rng(seed);
  KernelSampler draw(posterior);
  std::vector<double> out(n_samples);
  for (auto& v : out) v = draw(rng);
  return out;
}

TruthFunction estimate_truth_function(const DirichletPosterior& posterior,
                                      const TruthOptions& options, AxisMode mode) {
  if (options.n_bins < 2 || options.n_samples < options.n_bins) {
    throw DomainError("need n_samples >= n_bins >= 2");
  }
  if (posterior.is_flat()) {
    return point_mass(mode, 0.0, "flat posterior", posterior.log_norm_const());
  }
  const auto kernels = sample_log_kernels(posterior, options.n_samples, options.seed);
  auto out = mode == AxisMode::horizontal
                 ? discretize_horizontal(kernels, options.n_bins, posterior.log_norm_const())
                 : discretize_vertical(kernels, options.n_bins, posterior.log_norm_const());
  out.set_source_label("posterior");
  return out;
}

Evalue elementary_evalue(const TruthFunction& w, double threshold) {
  const auto& bins = w.bins();
  if (std::isnan(threshold)) throw DomainError("threshold is NaN");
  if (w.axis_mode() == AxisMode::horizontal) {
    double lower = 0.0;
    double upper = 0.0;
    std::size_t n_lower = 0;
    std::size_t n_upper = 0;
    for (const auto& b : bins) {
      if (b.log_f_right <= threshold) {
        lower += b.mass;
        ++n_lower;
      }
      if (b.log_f_left <= threshold) {
        upper += b.mass;
        ++n_upper;
      }
    }
    if (n_lower == bins.size()) lower = 1.0;
    if (n_upper == bins.size()) upper = 1.0;
    return Evalue{std::clamp(lower, 0.0, 1.0), std::clamp(upper, 0.0, 1.0)};
  }

  if (threshold < bins.front().log_f_left) return Evalue{0.0, 0.0};
  if (threshold >= bins.back().log_f_right) return Evalue{1.0, 1.0};
  // Last bin starting at or below the threshold.
  auto it = std::upper_bound(bins.begin(), bins.end(), threshold,
                             [](double t, const TruthBin& b) { return t < b.log_f_left; });
  const TruthBin& b = *std::prev(it);
  double before = 0.0;
  for (auto p = bins.begin(); p != std::prev(it); ++p) before += p->mass;
  const double width = b.log_f_right - b.log_f_left;
  const double frac = width > 0.0 ? std::clamp((threshold - b.log_f_left) / width, 0.0, 1.0) : 1.0;
  const double v = std::clamp(before + frac * b.mass, 0.0, 1.0);
  return Evalue{v, v};
}

void write_tsv(std::ostream& out, const TruthFunction& w) {
  const auto old_flags = out.flags();
  const auto old_precision = out.precision();
  out << "#log_f_left\tlog_f_right\tmass\tcdf_lower\tcdf_upper\n";
  out << std::setprecision(17);
  for (const auto& b : w.bins()) {
    out << b.log_f_left + w.log_offset() << '\t' << b.log_f_right + w.log_offset() << '\t' << b.mass
        << '\t' << b.cdf_lower << '\t' << b.cdf_upper << '\n';
  }
  out.flags(old_flags);
  out.precision(old_precision);
}

}  // namespace fbst
