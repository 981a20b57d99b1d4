#pragma once

#include <cstddef>
#include <vector>

namespace cisim {

using Matrix = std::vector<std::vector<double>>;

/// Sample covariance (n - 1 denominator) of the columns of a
/// subject x condition matrix.
Matrix sample_covariance(const Matrix& scores);

/// Box's epsilon from a k x k condition covariance matrix in the
/// double-centered form
///   k^2 (mean(diag S) - mean(S))^2 / ((k - 1) sum_ij (s_ij - r_i - c_j + m)^2),
/// clamped to [1/(k-1), 1].
double gg_epsilon_from_covariance(const Matrix& covariance);

/// Greenhouse-Geisser epsilon of a subject x condition score matrix.
/// Two conditions always give 1.
double gg_epsilon(const Matrix& cell_scores);

/// Epsilon from the covariance of p orthonormal contrast scores:
/// tr(V)^2 / (p tr(V V)), clamped to [1/p, 1]. Equivalent to the
/// double-centered form for a main effect and also covers interactions.
double gg_epsilon_from_contrast_covariance(const Matrix& contrast_covariance);

/// Orthonormal Helmert-style contrasts for k levels (k x (k - 1)).
Matrix orthonormal_contrasts(std::size_t k);

struct MauchlyResult {
  double w = 1.0;
  double chi_square = 0.0;
  double df = 0.0;
  double p = 1.0;
};

/// Mauchly's sphericity test on a p x p contrast covariance estimated with
/// `error_df` degrees of freedom.
MauchlyResult mauchly_test(const Matrix& contrast_covariance, double error_df);

}  // namespace cisim
