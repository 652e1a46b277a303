#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "fbst/tables.hpp"

namespace fbst {

using Rng = std::mt19937_64;

/// Dirichlet hyperparameters for one slice: a single value broadcast to every
/// cell, or a full row-major grid.
class DirichletPrior {
 public:
  /// Throws DomainError unless alpha > 0.
  explicit DirichletPrior(double alpha = 1.0);
  /// Throws DomainError unless every entry is > 0 and the size is rows * cols.
  DirichletPrior(std::size_t rows, std::size_t cols, std::vector<double> grid);

  double at(std::size_t y, std::size_t z) const;
  bool is_scalar() const noexcept { return grid_.empty(); }
  double scalar() const noexcept { return scalar_; }
  /// Throws DomainError if a grid prior does not match the table shape.
  void check_shape(std::size_t rows, std::size_t cols) const;

 private:
  double scalar_ = 1.0;
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> grid_;
};

/// A point of the (rows * cols - 1)-simplex, stored row-major.
class SimplexPoint {
 public:
  SimplexPoint() = default;
  /// Throws DomainError on negative entries or a sum further than 1e-12 from 1.
  SimplexPoint(std::size_t rows, std::size_t cols, std::vector<double> theta);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  double at(std::size_t y, std::size_t z) const { return theta_[y * cols_ + z]; }
  const std::vector<double>& values() const noexcept { return theta_; }

  std::vector<double> row_sums() const;
  std::vector<double> col_sums() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> theta_;
};

/// Dirichlet law over one slice's cell probabilities, a_yz = n_yz + alpha_yz.
///
/// Densities are normalized and handled in log space. `log_kernel` is the
/// unnormalized part sum (a - 1) log theta; `log_density` adds log_norm_const.
/// Terms with a zero exponent contribute nothing, even at theta = 0.
class DirichletPosterior {
 public:
  /// Throws DomainError unless all concentrations are > 0.
  DirichletPosterior(std::size_t rows, std::size_t cols, std::vector<double> concentrations);

  static DirichletPosterior from_table(const ContingencyTable& table,
                                       const DirichletPrior& prior = DirichletPrior{});

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  double concentration(std::size_t y, std::size_t z) const { return conc_[y * cols_ + z]; }
  const std::vector<double>& concentrations() const noexcept { return conc_; }

  /// log Gamma(sum a) - sum log Gamma(a), plus any shift applied via shifted().
  double log_norm_const() const noexcept { return log_norm_const_; }

  /// True when every concentration is 1, i.e. the density is constant.
  bool is_flat() const noexcept;

  /// -infinity when a cell with positive exponent has theta = 0.
  /// Throws DomainError on a shape mismatch.
  double log_kernel(const SimplexPoint& point) const;
  double log_density(const SimplexPoint& point) const;

  /// Exact draw by gamma-variate normalization. Cells are drawn in canonical
  /// (sorted-concentration) order, so the result depends only on the rng state.
  SimplexPoint sample(Rng& rng) const;

  /// Copy whose normalizing constant is moved by `delta`; every log density
  /// moves by the same amount.
  DirichletPosterior shifted(double delta) const;

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> conc_;
  double log_norm_const_ = 0.0;
};

/// Draws log-kernel values without materializing simplex points.
///
/// Depends only on the multiset of concentrations: any permutation of the cells
/// (row or column relabeling, transposition) produces bit-identical draws.
class KernelSampler {
 public:
  explicit KernelSampler(const DirichletPosterior& posterior);

  double operator()(Rng& rng);

 private:
  std::vector<double> exponents_;  // a - 1, canonical order
  double total_exponent_ = 0.0;
  std::vector<std::gamma_distribution<double>> gammas_;
  std::vector<double> scratch_;
};

/// Posterior mode restricted to theta_yz = p_y * q_z.
struct ConstrainedMap {
  SimplexPoint theta_star;
  double log_f_star = 0.0;       // normalized log density at theta_star
  double log_kernel_star = 0.0;  // unnormalized part, comparable to KernelSampler output
  /// Some marginal has zero mass, so theta_star sits on the simplex boundary.
  bool boundary = false;
};

/// Closed form: p_y proportional to the row sums of the exponents (a - 1),
/// q_z to the column sums. Throws DomainError if any of those sums is negative.
///
/// Bit-identical under row/column permutation and transposition of the grid.
ConstrainedMap constrained_map(const DirichletPosterior& posterior);
ConstrainedMap constrained_map(const ContingencyTable& table,
                               const DirichletPrior& prior = DirichletPrior{});

}  // namespace fbst
