#include "fbst/posterior.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "detail.hpp"
#include "fbst/error.hpp"

namespace fbst {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Cell indices ordered by concentration; ties keep their relative order.
std::vector<std::size_t> canonical_order(const std::vector<double>& conc) {
  std::vector<std::size_t> order(conc.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return conc[a] < conc[b]; });
  return order;
}

}  // namespace

DirichletPrior::DirichletPrior(double alpha) : scalar_(alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw DomainError("Dirichlet hyperparameter must be positive, got " + std::to_string(alpha));
  }
}

DirichletPrior::DirichletPrior(std::size_t rows, std::size_t cols, std::vector<double> grid)
    : rows_(rows), cols_(cols), grid_(std::move(grid)) {
  if (grid_.size() != rows_ * cols_ || grid_.empty()) {
    throw DomainError("prior grid size does not match its shape");
  }
  for (double a : grid_) {
    if (!(a > 0.0) || !std::isfinite(a)) throw DomainError("Dirichlet hyperparameters must be positive");
  }
}

double DirichletPrior::at(std::size_t y, std::size_t z) const {
  return grid_.empty() ? scalar_ : grid_[y * cols_ + z];
}

void DirichletPrior::check_shape(std::size_t rows, std::size_t cols) const {
  if (!grid_.empty() && (rows != rows_ || cols != cols_)) {
    throw DomainError("prior grid is " + std::to_string(rows_) + "x" + std::to_string(cols_) +
                      " but the table is " + std::to_string(rows) + "x" + std::to_string(cols));
  }
}

SimplexPoint::SimplexPoint(std::size_t rows, std::size_t cols, std::vector<double> theta)
    : rows_(rows), cols_(cols), theta_(std::move(theta)) {
  if (theta_.size() != rows_ * cols_ || theta_.empty()) {
    throw DomainError("simplex point size does not match its shape");
  }
  double sum = 0.0;
  for (double t : theta_) {
    if (!(t >= 0.0)) throw DomainError("simplex point has a negative entry");
    sum += t;
  }
  if (std::abs(sum - 1.0) > 1e-12) throw DomainError("simplex point does not sum to 1");
}

std::vector<double> SimplexPoint::row_sums() const {
  std::vector<double> out(rows_, 0.0);
  for (std::size_t y = 0; y < rows_; ++y) {
    for (std::size_t z = 0; z < cols_; ++z) out[y] += at(y, z);
  }
  return out;
}

std::vector<double> SimplexPoint::col_sums() const {
  std::vector<double> out(cols_, 0.0);
  for (std::size_t y = 0; y < rows_; ++y) {
    for (std::size_t z = 0; z < cols_; ++z) out[z] += at(y, z);
  }
  return out;
}

DirichletPosterior::DirichletPosterior(std::size_t rows, std::size_t cols,
                                       std::vector<double> concentrations)
    : rows_(rows), cols_(cols), conc_(std::move(concentrations)) {
  if (conc_.size() != rows_ * cols_ || conc_.empty()) {
    throw DomainError("concentration grid size does not match its shape");
  }
  std::vector<double> log_gammas;
  log_gammas.reserve(conc_.size());
  for (double a : conc_) {
    if (!(a > 0.0) || !std::isfinite(a)) throw DomainError("Dirichlet concentrations must be positive");
    log_gammas.push_back(std::lgamma(a));
  }
  log_norm_const_ = std::lgamma(detail::sorted_sum(conc_)) - detail::sorted_sum(log_gammas);
}

DirichletPosterior DirichletPosterior::from_table(const ContingencyTable& table,
                                                  const DirichletPrior& prior) {
  prior.check_shape(table.rows(), table.cols());
  std::vector<double> conc(table.rows() * table.cols());
  for (std::size_t y = 0; y < table.rows(); ++y) {
    for (std::size_t z = 0; z < table.cols(); ++z) {
      conc[y * table.cols() + z] = static_cast<double>(table.at(y, z)) + prior.at(y, z);
    }
  }
  return DirichletPosterior(table.rows(), table.cols(), std::move(conc));
}

bool DirichletPosterior::is_flat() const noexcept {
  return std::all_of(conc_.begin(), conc_.end(), [](double a) { return a == 1.0; });
}

double DirichletPosterior::log_kernel(const SimplexPoint& point) const {
  if (point.rows() != rows_ || point.cols() != cols_) {
    throw DomainError("simplex point shape does not match the posterior");
  }
  std::vector<double> terms;
  terms.reserve(conc_.size());
  for (std::size_t i = 0; i < conc_.size(); ++i) {
    const double e = conc_[i] - 1.0;
    if (e == 0.0) continue;
    const double t = point.values()[i];
    if (t == 0.0) return e > 0.0 ? -kInf : kInf;
    terms.push_back(e * std::log(t));
  }
  return detail::sorted_sum(std::move(terms));
}

double DirichletPosterior::log_density(const SimplexPoint& point) const {
  return log_norm_const_ + log_kernel(point);
}

SimplexPoint DirichletPosterior::sample(Rng& rng) const {
  const auto order = canonical_order(conc_);
  std::vector<double> theta(conc_.size());
  double total = 0.0;
  for (std::size_t i : order) {
    std::gamma_distribution<double> gamma(conc_[i], 1.0);
    theta[i] = gamma(rng);
    total += theta[i];
  }
  for (double& t : theta) t /= total;
  // Renormalize the residual rounding so the point passes the 1e-12 check.
  const double sum = std::accumulate(theta.begin(), theta.end(), 0.0);
  for (double& t : theta) t /= sum;
  return SimplexPoint(rows_, cols_, std::move(theta));
}

DirichletPosterior DirichletPosterior::shifted(double delta) const {
  DirichletPosterior out = *this;
  out.log_norm_const_ += delta;
  return out;
}

KernelSampler::KernelSampler(const DirichletPosterior& posterior) {
  auto conc = posterior.concentrations();
  std::sort(conc.begin(), conc.end());
  exponents_.reserve(conc.size());
  gammas_.reserve(conc.size());
  for (double a : conc) {
    exponents_.push_back(a - 1.0);
    gammas_.emplace_back(a, 1.0);
  }
  scratch_.resize(conc.size());
}

double KernelSampler::operator()(Rng& rng) {
  double total = 0.0;
  for (std::size_t k = 0; k < gammas_.size(); ++k) {
    scratch_[k] = gammas_[k](rng);
    total += scratch_[k];
  }
  double kernel = 0.0;
  for (std::size_t k = 0; k < exponents_.size(); ++k) {
    if (exponents_[k] != 0.0) kernel += exponents_[k] * std::log(scratch_[k] / total);
  }
  return kernel;
}

ConstrainedMap constrained_map(const DirichletPosterior& posterior) {
  const std::size_t rows = posterior.rows();
  const std::size_t cols = posterior.cols();
  std::vector<double> exps(posterior.concentrations());
  for (double& e : exps) e -= 1.0;

  std::vector<double> row_sum(rows), col_sum(cols);
  for (std::size_t y = 0; y < rows; ++y) {
    row_sum[y] = detail::sorted_sum({exps.begin() + y * cols, exps.begin() + (y + 1) * cols});
  }
  for (std::size_t z = 0; z < cols; ++z) {
    std::vector<double> col(rows);
    for (std::size_t y = 0; y < rows; ++y) col[y] = exps[y * cols + z];
    col_sum[z] = detail::sorted_sum(std::move(col));
  }
  const double total = detail::sorted_sum(exps);
  for (double s : row_sum) {
    if (s < 0.0) throw DomainError("constrained MAP undefined: negative row exponent sum");
  }
  for (double s : col_sum) {
    if (s < 0.0) throw DomainError("constrained MAP undefined: negative column exponent sum");
  }

  ConstrainedMap out;
  std::vector<double> p(rows), q(cols);
  if (total == 0.0) {
    if (std::any_of(exps.begin(), exps.end(), [](double e) { return e != 0.0; })) {
      throw DomainError("constrained MAP undefined: exponents of mixed sign sum to zero");
    }
    // Flat density: every point is a maximizer; report the centre.
    std::fill(p.begin(), p.end(), 1.0 / static_cast<double>(rows));
    std::fill(q.begin(), q.end(), 1.0 / static_cast<double>(cols));
  } else {
    for (std::size_t y = 0; y < rows; ++y) p[y] = row_sum[y] / total;
    for (std::size_t z = 0; z < cols; ++z) q[z] = col_sum[z] / total;
  }
  out.boundary = std::any_of(p.begin(), p.end(), [](double v) { return v == 0.0; }) ||
                 std::any_of(q.begin(), q.end(), [](double v) { return v == 0.0; });

  std::vector<double> theta(rows * cols);
  std::vector<double> terms;
  bool vanishes = false;
  for (std::size_t y = 0; y < rows; ++y) {
    for (std::size_t z = 0; z < cols; ++z) {
      theta[y * cols + z] = p[y] * q[z];
      const double e = exps[y * cols + z];
      if (e == 0.0) continue;
      if (p[y] == 0.0 || q[z] == 0.0) {
        vanishes = vanishes || e > 0.0;
        continue;
      }
      terms.push_back(e * (std::log(p[y]) + std::log(q[z])));
    }
  }
  const double theta_sum = std::accumulate(theta.begin(), theta.end(), 0.0);
  for (double& t : theta) t /= theta_sum;
  out.theta_star = SimplexPoint(rows, cols, std::move(theta));
  out.log_kernel_star = vanishes ? -kInf : detail::sorted_sum(std::move(terms));
  out.log_f_star = out.log_kernel_star + posterior.log_norm_const();
  return out;
}

ConstrainedMap constrained_map(const ContingencyTable& table, const DirichletPrior& prior) {
  return constrained_map(DirichletPosterior::from_table(table, prior));
}

}  // namespace fbst
