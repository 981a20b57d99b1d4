#include "cisim/stats/epsilon.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>

#include "cisim/common/error.hpp"
#include "cisim/stats/distributions.hpp"

namespace cisim {

namespace {

void require_square(const Matrix& m, const char* what) {
  for (const auto& row : m) {
    if (row.size() != m.size()) throw Error(std::string(what) + ": matrix is not square");
  }
}

Eigen::MatrixXd to_eigen(const Matrix& m) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(m.size()), static_cast<Eigen::Index>(m.size()));
  for (std::size_t i = 0; i < m.size(); ++i) {
    for (std::size_t j = 0; j < m.size(); ++j) {
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = m[i][j];
    }
  }
  return out;
}

}  // namespace

Matrix sample_covariance(const Matrix& scores) {
  if (scores.size() < 2) throw Error("covariance needs at least two subjects");
  const std::size_t k = scores.front().size();
  std::vector<double> mean(k, 0.0);
  for (const auto& row : scores) {
    if (row.size() != k) throw Error("covariance: ragged score matrix");
    for (std::size_t j = 0; j < k; ++j) mean[j] += row[j];
  }
  for (double& m : mean) m /= static_cast<double>(scores.size());
  Matrix cov(k, std::vector<double>(k, 0.0));
  for (const auto& row : scores) {
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = 0; j < k; ++j) cov[i][j] += (row[i] - mean[i]) * (row[j] - mean[j]);
    }
  }
  const double denom = static_cast<double>(scores.size() - 1);
  for (auto& row : cov) {
    for (double& v : row) v /= denom;
  }
  return cov;
}

double gg_epsilon_from_covariance(const Matrix& s) {
  require_square(s, "gg_epsilon");
  const std::size_t k = s.size();
  if (k < 2) throw Error("gg_epsilon needs at least two conditions");
  if (k == 2) return 1.0;
  const double kd = static_cast<double>(k);
  std::vector<double> row_mean(k, 0.0), col_mean(k, 0.0);
  double grand = 0.0, diag = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    diag += s[i][i];
    for (std::size_t j = 0; j < k; ++j) {
      row_mean[i] += s[i][j];
      col_mean[j] += s[i][j];
      grand += s[i][j];
    }
  }
  for (std::size_t i = 0; i < k; ++i) {
    row_mean[i] /= kd;
    col_mean[i] /= kd;
  }
  grand /= kd * kd;
  diag /= kd;
  double centered = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      const double d = s[i][j] - row_mean[i] - col_mean[j] + grand;
      centered += d * d;
    }
  }
  if (centered == 0.0) return 1.0;
  const double eps = kd * kd * (diag - grand) * (diag - grand) / ((kd - 1.0) * centered);
  return std::clamp(eps, 1.0 / (kd - 1.0), 1.0);
}

double gg_epsilon(const Matrix& cell_scores) {
  if (cell_scores.empty() || cell_scores.front().size() < 2) {
    throw Error("gg_epsilon needs at least two conditions");
  }
  if (cell_scores.size() < 2) throw Error("gg_epsilon needs at least two subjects");
  if (cell_scores.front().size() == 2) return 1.0;
  return gg_epsilon_from_covariance(sample_covariance(cell_scores));
}

double gg_epsilon_from_contrast_covariance(const Matrix& v) {
  require_square(v, "gg_epsilon");
  const std::size_t p = v.size();
  if (p == 0) throw Error("gg_epsilon needs at least one contrast");
  if (p == 1) return 1.0;
  double trace = 0.0, trace_sq = 0.0;
  for (std::size_t i = 0; i < p; ++i) {
    trace += v[i][i];
    for (std::size_t j = 0; j < p; ++j) trace_sq += v[i][j] * v[j][i];
  }
  if (trace_sq == 0.0) return 1.0;
  const double pd = static_cast<double>(p);
  return std::clamp(trace * trace / (pd * trace_sq), 1.0 / pd, 1.0);
}

Matrix orthonormal_contrasts(std::size_t k) {
  if (k < 2) throw Error("contrasts need at least two levels");
  Matrix c(k, std::vector<double>(k - 1, 0.0));
  for (std::size_t j = 1; j < k; ++j) {
    // Column j-1 compares level j with the mean of levels 0..j-1.
    const double norm = std::sqrt(static_cast<double>(j * (j + 1)));
    for (std::size_t i = 0; i < j; ++i) c[i][j - 1] = 1.0 / norm;
    c[j][j - 1] = -static_cast<double>(j) / norm;
  }
  return c;
}

MauchlyResult mauchly_test(const Matrix& v, double error_df) {
  require_square(v, "mauchly_test");
  const std::size_t p = v.size();
  MauchlyResult r;
  if (p < 2) return r;
  const double pd = static_cast<double>(p);
  const auto m = to_eigen(v);
  const double trace = m.trace();
  const double det = m.determinant();
  r.df = pd * (pd + 1.0) / 2.0 - 1.0;
  if (!(trace > 0.0)) return r;
  r.w = std::max(det, 0.0) / std::pow(trace / pd, pd);
  if (r.w <= 0.0) {
    r.chi_square = std::numeric_limits<double>::infinity();
    r.p = 0.0;
    return r;
  }
  const double scale = error_df - (2.0 * pd * pd + pd + 2.0) / (6.0 * pd);
  r.chi_square = -scale * std::log(r.w);
  r.p = chi_square_upper_tail(r.chi_square, r.df);
  return r;
}

}  // namespace cisim
