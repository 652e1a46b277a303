#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "fbst/truth_function.hpp"

namespace fbst {

/// All pairwise sums of two discrete log-density distributions, sorted.
///
/// `cumulative[i]` is the CDF through atom i in sorted order.
struct RawConvolution {
  AxisMode mode = AxisMode::horizontal;
  std::vector<Atom> atoms;
  std::vector<double> cumulative;
  double log_offset = 0.0;
};

/// Sorts the atoms by log_f (stable, so ties keep input order) and accumulates.
RawConvolution make_raw(AxisMode mode, std::vector<Atom> atoms, double log_offset = 0.0);

/// Distribution of the product of the underlying densities, i.e. the sum of
/// their logs. Atoms are the bin representatives; envelopes add.
/// Ties in log_f are broken by source index pair (a-major).
/// Throws DomainError when the axis modes differ.
RawConvolution convolve(const TruthFunction& wa, const TruthFunction& wb);

/// Groups the atoms into n_bins consecutive runs of equal atom count.
/// cdf_lower/cdf_upper are the cumulative at the first/last atom of the run;
/// bin edges are the run's envelope, widened so they stay nondecreasing.
/// A remainder goes to the last run and is flagged.
/// Throws DomainError if there are fewer atoms than bins.
TruthFunction condense_horizontal(const RawConvolution& raw, std::size_t n_bins);

/// Cuts the CDF at 1/n, 2/n, ..., 1, splitting an atom that straddles a cut.
/// Each bin records the mass-weighted mean of its atoms as representative.
TruthFunction condense_vertical(const RawConvolution& raw, std::size_t n_bins);

/// Left fold of convolve + condense over `ws`, evaluated at the sum of the
/// thresholds. With one input this is elementary_evalue.
/// Throws DomainError on empty input, a size mismatch, or mixed axis modes.
Evalue composite_evalue(std::span<const TruthFunction> ws, std::span<const double> thresholds,
                        std::size_t n_bins);

/// Result of the fold, for export; `composite_evalue` reads its answer from this.
TruthFunction composite_truth_function(std::span<const TruthFunction> ws, std::size_t n_bins);

/// Discretized CDF of N(mu, sigma^2) truncated at mu +- 6 sigma: the law of
/// log Y for Y ~ lnN(mu, sigma^2). Bin masses are exact normal probabilities.
/// Horizontal bins have equal width, vertical bins equal mass with the
/// conditional mean as representative. Throws DomainError unless sigma > 0.
TruthFunction lognormal_reference(double mu, double sigma, std::size_t n_bins, AxisMode mode);

/// Phi((x - mu) / sigma).
double normal_cdf(double x, double mu, double sigma);

}  // namespace fbst
