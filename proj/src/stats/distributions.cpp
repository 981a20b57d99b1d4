#include "cisim/stats/distributions.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/fisher_f.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "cisim/common/error.hpp"

namespace cisim {

namespace {

using boost::math::quadrature::gauss_kronrod;

constexpr double kTolerance = 1e-12;
constexpr unsigned kMaxDepth = 15;

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }

// P(range of k iid standard normals <= w).
double normal_range_cdf(double w, int k) {
  if (w <= 0.0) return 0.0;
  auto integrand = [w, k](double z) {
    const double inner = normal_cdf(z) - normal_cdf(z - w);
    return normal_pdf(z) * std::pow(std::max(inner, 0.0), k - 1);
  };
  // The integrand vanishes below z = -9 and above z = w + 9 to double precision.
  const double hi = std::min(9.0, w + 9.0);
  double value = gauss_kronrod<double, 31>::integrate(integrand, -9.0, hi, kMaxDepth, kTolerance);
  return std::clamp(k * value, 0.0, 1.0);
}

// Density of s = sqrt(chi2_df / df).
double chi_scale_pdf(double s, double df) {
  if (s <= 0.0) return 0.0;
  const double half = 0.5 * df;
  const double log_pdf = half * std::log(df) + (df - 1.0) * std::log(s) - half * s * s -
                         boost::math::lgamma(half) - (half - 1.0) * std::numbers::ln2;
  return std::exp(log_pdf);
}

}  // namespace

double f_upper_tail(double f, double df_num, double df_den) {
  if (!(df_num > 0.0) || !(df_den > 0.0)) throw Error("F distribution needs positive degrees of freedom");
  if (std::isnan(f)) throw Error("F statistic is NaN");
  if (f <= 0.0) return 1.0;
  if (std::isinf(f)) return 0.0;
  const boost::math::fisher_f_distribution<double> dist(df_num, df_den);
  return boost::math::cdf(boost::math::complement(dist, f));
}

double t_two_sided(double t, double df) {
  if (!(df > 0.0)) throw Error("t distribution needs positive degrees of freedom");
  if (std::isinf(t)) return 0.0;
  const boost::math::students_t_distribution<double> dist(df);
  return 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t)));
}

double chi_square_upper_tail(double x, double df) {
  if (!(df > 0.0)) throw Error("chi-square distribution needs positive degrees of freedom");
  if (x <= 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  const boost::math::chi_squared_distribution<double> dist(df);
  return boost::math::cdf(boost::math::complement(dist, x));
}

double studentized_range_cdf(double q, int k, double df) {
  if (k < 2) throw Error("studentized range needs at least two means");
  if (!(df > 0.0)) throw Error("studentized range needs positive degrees of freedom");
  if (std::isnan(q)) throw Error("studentized range statistic is NaN");
  if (q <= 0.0) return 0.0;
  if (std::isinf(q)) return 1.0;
  if (std::isinf(df) || df > 1e7) return normal_range_cdf(q, k);

  auto integrand = [q, k, df](double s) { return chi_scale_pdf(s, df) * normal_range_cdf(q * s, k); };

  // Split the chi-scale density into a core around its mode and two tails
  // so that the adaptive rule sees the peak even for large df.
  const double mode = df > 1.0 ? std::sqrt((df - 1.0) / df) : 0.0;
  const double spread = 1.0 / std::sqrt(2.0 * df);
  const double lo = std::max(0.0, mode - 12.0 * spread);
  const double hi = mode + 12.0 * spread;
  double total = gauss_kronrod<double, 31>::integrate(integrand, lo, hi, kMaxDepth, kTolerance);
  if (lo > 0.0) total += gauss_kronrod<double, 31>::integrate(integrand, 0.0, lo, kMaxDepth, kTolerance);
  total += gauss_kronrod<double, 31>::integrate(integrand, hi, std::numeric_limits<double>::infinity(),
                                                kMaxDepth, kTolerance);
  return std::clamp(total, 0.0, 1.0);
}

double studentized_range_upper_tail(double q, int k, double df) {
  return 1.0 - studentized_range_cdf(q, k, df);
}

}  // namespace cisim
