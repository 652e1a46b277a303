#include "fbst/convolution.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/distributions/normal.hpp>

#include "fbst/error.hpp"

namespace fbst {
namespace {

void fill_cdf(std::vector<TruthBin>& bins) {
  double cum = 0.0;
  for (auto& b : bins) {
    b.cdf_lower = cum;
    cum += b.mass;
    b.cdf_upper = cum;
  }
}

TruthFunction condense(const RawConvolution& raw, std::size_t n_bins) {
  return raw.mode == AxisMode::horizontal ? condense_horizontal(raw, n_bins)
                                          : condense_vertical(raw, n_bins);
}

}  // namespace

RawConvolution make_raw(AxisMode mode, std::vector<Atom> atoms, double log_offset) {
  std::stable_sort(atoms.begin(), atoms.end(),
                   [](const Atom& a, const Atom& b) { return a.log_f < b.log_f; });
  RawConvolution raw;
  raw.mode = mode;
  raw.log_offset = log_offset;
  raw.cumulative.resize(atoms.size());
  double cum = 0.0;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    cum += atoms[i].mass;
    raw.cumulative[i] = cum;
  }
  raw.atoms = std::move(atoms);
  return raw;
}

RawConvolution convolve(const TruthFunction& wa, const TruthFunction& wb) {
  if (wa.axis_mode() != wb.axis_mode()) throw DomainError("cannot convolve truth functions of mixed axis modes");
  const auto a = wa.atoms();
  const auto b = wb.atoms();
  std::vector<Atom> atoms;
  atoms.reserve(a.size() * b.size());
  for (const Atom& u : a) {
    for (const Atom& v : b) {
      atoms.push_back(Atom{u.log_f + v.log_f, u.mass * v.mass, u.lo + v.lo, u.hi + v.hi});
    }
  }
  return make_raw(wa.axis_mode(), std::move(atoms), wa.log_offset() + wb.log_offset());
}

TruthFunction condense_horizontal(const RawConvolution& raw, std::size_t n_bins) {
  const std::size_t n_atoms = raw.atoms.size();
  if (n_bins < 1 || n_atoms < n_bins) {
    throw DomainError("horizontal condensation needs at least as many atoms as bins");
  }
  const std::size_t group = n_atoms / n_bins;
  std::vector<TruthBin> bins(n_bins);
  for (std::size_t k = 0; k < n_bins; ++k) {
    const std::size_t first = k * group;
    const std::size_t last = k + 1 == n_bins ? n_atoms - 1 : first + group - 1;
    TruthBin& b = bins[k];
    b.log_f_left = raw.atoms[first].lo;
    b.log_f_right = raw.atoms[first].hi;
    for (std::size_t i = first; i <= last; ++i) {
      b.log_f_left = std::min(b.log_f_left, raw.atoms[i].lo);
      b.log_f_right = std::max(b.log_f_right, raw.atoms[i].hi);
      b.mass += raw.atoms[i].mass;
    }
    b.cdf_lower = raw.cumulative[first];
    b.cdf_upper = raw.cumulative[last];
    b.representative = 0.5 * (b.log_f_left + b.log_f_right);
  }
  // Widen envelopes so both edge sequences are nondecreasing.
  for (std::size_t k = n_bins - 1; k-- > 0;) {
    bins[k].log_f_left = std::min(bins[k].log_f_left, bins[k + 1].log_f_left);
  }
  for (std::size_t k = 1; k < n_bins; ++k) {
    bins[k].log_f_right = std::max(bins[k].log_f_right, bins[k - 1].log_f_right);
  }
  TruthFunction out(AxisMode::horizontal, std::move(bins), n_atoms, "horizontal condensation",
                    raw.log_offset);
  out.mark_remainder(n_atoms % n_bins != 0);
  return out;
}

TruthFunction condense_vertical(const RawConvolution& raw, std::size_t n_bins) {
  return TruthFunction(AxisMode::vertical, quantile_bins(raw.atoms, n_bins), raw.atoms.size(),
                       "vertical condensation", raw.log_offset);
}

TruthFunction composite_truth_function(std::span<const TruthFunction> ws, std::size_t n_bins) {
  if (ws.empty()) throw DomainError("composite needs at least one truth function");
  for (const auto& w : ws) {
    if (w.axis_mode() != ws.front().axis_mode()) {
      throw DomainError("composite over truth functions of mixed axis modes");
    }
  }
  TruthFunction acc = ws.front();
  for (std::size_t i = 1; i < ws.size(); ++i) {
    const RawConvolution raw = convolve(acc, ws[i]);
    const std::size_t budget = acc.axis_mode() == AxisMode::horizontal
                                   ? std::min(n_bins, raw.atoms.size())
                                   : n_bins;
    acc = condense(raw, budget);
  }
  return acc;
}

Evalue composite_evalue(std::span<const TruthFunction> ws, std::span<const double> thresholds,
                        std::size_t n_bins) {
  if (ws.size() != thresholds.size()) throw DomainError("one threshold per truth function required");
  if (ws.size() == 1) return elementary_evalue(ws.front(), thresholds.front());
  const TruthFunction w = composite_truth_function(ws, n_bins);
  double total = 0.0;
  for (double t : thresholds) total += t;
  return elementary_evalue(w, total);
}

double normal_cdf(double x, double mu, double sigma) {
  return 0.5 * std::erfc(-(x - mu) / (sigma * std::numbers::sqrt2));
}

TruthFunction lognormal_reference(double mu, double sigma, std::size_t n_bins, AxisMode mode) {
  if (!(sigma > 0.0)) throw DomainError("sigma must be positive");
  if (n_bins < 1) throw DomainError("need at least one bin");
  constexpr double kTail = 6.0;
  const boost::math::normal_distribution<double> std_normal(0.0, 1.0);
  const double p_lo = boost::math::cdf(std_normal, -kTail);
  const double kept = 1.0 - 2.0 * p_lo;
  std::vector<TruthBin> bins(n_bins);
  const double n = static_cast<double>(n_bins);
  if (mode == AxisMode::horizontal) {
    const double width = 2.0 * kTail / n;
    for (std::size_t i = 0; i < n_bins; ++i) {
      const double a = -kTail + static_cast<double>(i) * width;
      const double b = i + 1 == n_bins ? kTail : -kTail + static_cast<double>(i + 1) * width;
      bins[i].log_f_left = mu + sigma * a;
      bins[i].log_f_right = mu + sigma * b;
      bins[i].representative = 0.5 * (bins[i].log_f_left + bins[i].log_f_right);
      bins[i].mass = (boost::math::cdf(std_normal, b) - boost::math::cdf(std_normal, a)) / kept;
    }
  } else {
    double a = -kTail;
    for (std::size_t i = 0; i < n_bins; ++i) {
      const double b = i + 1 == n_bins
                           ? kTail
                           : boost::math::quantile(std_normal, p_lo + kept * static_cast<double>(i + 1) / n);
      const double pa = boost::math::cdf(std_normal, a);
      const double pb = boost::math::cdf(std_normal, b);
      const double cond_mean = pb > pa ? (boost::math::pdf(std_normal, a) - boost::math::pdf(std_normal, b)) / (pb - pa)
                                       : 0.5 * (a + b);
      bins[i].log_f_left = mu + sigma * a;
      bins[i].log_f_right = mu + sigma * b;
      bins[i].representative = std::clamp(mu + sigma * cond_mean, bins[i].log_f_left, bins[i].log_f_right);
      bins[i].mass = 1.0 / n;
      a = b;
    }
  }
  fill_cdf(bins);
  return TruthFunction(mode, std::move(bins), 0, "lognormal reference");
}

}  // namespace fbst
