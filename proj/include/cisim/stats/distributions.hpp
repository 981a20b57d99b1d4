#pragma once

namespace cisim {

/// Upper tail P(F > f) of the F distribution; degrees of freedom may be
/// non-integer (Greenhouse-Geisser corrected).
double f_upper_tail(double f, double df_num, double df_den);

/// Two-sided P(|T| > |t|) for Student's t.
double t_two_sided(double t, double df);

/// Upper tail of the chi-square distribution.
double chi_square_upper_tail(double x, double df);

/// CDF of the studentized range of `k` means with `df` error degrees of
/// freedom, by numerical integration over the normal range distribution
/// and the chi scale. Absolute error is below 1e-8 in practice; df may be
/// infinite.
double studentized_range_cdf(double q, int k, double df);

double studentized_range_upper_tail(double q, int k, double df);

}  // namespace cisim
