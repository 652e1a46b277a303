#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "fbst/posterior.hpp"

namespace fbst {

enum class AxisMode { horizontal, vertical };

const char* to_string(AxisMode mode) noexcept;

/// One bin of a discretized truth function.
///
/// Mass inside the bin lies in [log_f_left, log_f_right]. `representative`
/// is the point at which the bin's mass is placed when it is convolved.
struct TruthBin {
  double log_f_left = 0.0;
  double log_f_right = 0.0;
  double mass = 0.0;
  double cdf_lower = 0.0;
  double cdf_upper = 0.0;
  double representative = 0.0;
};

/// A point mass used as input to discretization and convolution.
///
/// [lo, hi] is the interval the mass is known to lie in; lo = hi = log_f for
/// exact atoms.
struct Atom {
  double log_f = 0.0;
  double mass = 0.0;
  double lo = 0.0;
  double hi = 0.0;
};

/// Elementary or composite e-value. Vertical results are points (lower == upper).
struct Evalue {
  double lower = 0.0;
  double upper = 0.0;

  double mid() const noexcept { return 0.5 * (lower + upper); }
  friend bool operator==(const Evalue&, const Evalue&) = default;
};

/// Discretized CDF of the log posterior density, viewed as a random variable
/// under the posterior.
///
/// Bin coordinates are on an internal scale; adding `log_offset()` gives the
/// normalized log density. Estimates built from a posterior use the
/// unnormalized kernel internally and carry log_norm_const as the offset, so
/// thresholds passed to elementary_evalue must be on the kernel scale too.
class TruthFunction {
 public:
  TruthFunction() = default;
  /// Throws DomainError if the bins violate an invariant (see validate()).
  TruthFunction(AxisMode mode, std::vector<TruthBin> bins, std::uint64_t n_samples,
                std::string source_label, double log_offset = 0.0);

  AxisMode axis_mode() const noexcept { return mode_; }
  const std::vector<TruthBin>& bins() const noexcept { return bins_; }
  std::size_t size() const noexcept { return bins_.size(); }
  std::uint64_t n_samples() const noexcept { return n_samples_; }
  const std::string& source_label() const noexcept { return source_label_; }
  double log_offset() const noexcept { return log_offset_; }

  /// Single point mass (constant density or empty slice).
  bool degenerate() const noexcept { return degenerate_; }
  /// Atom count was not divisible by the bin budget; the last group absorbed the rest.
  bool remainder_absorbed() const noexcept { return remainder_absorbed_; }

  TruthFunction& mark_degenerate(bool v = true) noexcept { degenerate_ = v; return *this; }
  TruthFunction& mark_remainder(bool v = true) noexcept { remainder_absorbed_ = v; return *this; }
  TruthFunction& set_source_label(std::string label) { source_label_ = std::move(label); return *this; }

  /// Atoms at each bin's representative with the bin edges as envelope.
  std::vector<Atom> atoms() const;

  /// Throws DomainError when a structural invariant is violated.
  void validate() const;

 private:
  AxisMode mode_ = AxisMode::horizontal;
  std::vector<TruthBin> bins_;
  std::uint64_t n_samples_ = 0;
  std::string source_label_;
  double log_offset_ = 0.0;
  bool degenerate_ = false;
  bool remainder_absorbed_ = false;
};

/// A single bin of mass one at `log_f`.
TruthFunction point_mass(AxisMode mode, double log_f, std::string label, double log_offset = 0.0);

/// Equal-width histogram over [min, max] of the values.
TruthFunction discretize_horizontal(std::span<const double> log_densities, std::size_t n_bins,
                                    double log_offset = 0.0);

/// Equal-mass bins (1 / n_bins each) over the sorted values, splitting a value
/// that straddles a breakpoint.
TruthFunction discretize_vertical(std::span<const double> log_densities, std::size_t n_bins,
                                  double log_offset = 0.0);

/// Quantile grouping shared by discretize_vertical and vertical condensation.
/// `atoms` must be sorted by log_f with total mass 1.
std::vector<TruthBin> quantile_bins(std::span<const Atom> atoms, std::size_t n_bins);

struct TruthOptions {
  std::uint64_t n_samples = 1'000'000;
  std::size_t n_bins = 100;
  std::uint64_t seed = 0;
};

/// n_samples log-kernel draws from the posterior, in draw order.
std::vector<double> sample_log_kernels(const DirichletPosterior& posterior,
                                       std::uint64_t n_samples, std::uint64_t seed);

/// Monte Carlo truth function on the kernel scale, offset by log_norm_const.
/// A flat posterior yields a flagged point mass at kernel 0.
/// Throws DomainError unless n_samples >= n_bins >= 2.
TruthFunction estimate_truth_function(const DirichletPosterior& posterior,
                                      const TruthOptions& options, AxisMode mode);

/// W(threshold), with threshold on the truth function's internal scale.
///
/// Horizontal: the interval [mass of bins entirely <= threshold, mass of bins
/// starting <= threshold]. Vertical: the CDF interpolated linearly inside the
/// containing bin.
Evalue elementary_evalue(const TruthFunction& w, double threshold);

/// Writes the `#log_f_left log_f_right mass cdf_lower cdf_upper` TSV.
/// Edges are written on the normalized scale (internal + log_offset).
void write_tsv(std::ostream& out, const TruthFunction& w);

}  // namespace fbst
