#include "cisim/signal/dsp.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <vector>

#include "cisim/signal/fft.hpp"

namespace cisim {

namespace {

// Below this many multiply-adds the direct sum beats the FFT round trip.
constexpr std::size_t kDirectConvolutionLimit = 1u << 16;

constexpr double kKaiserBeta = 8.0;

// Kernel lookup resolution, in table points per input sample.
constexpr int kKernelOversample = 1024;

// Cutoff sits a little under the target Nyquist when decimating so the
// kernel's transition band does not fold back.
constexpr double kDecimationRolloff = 0.95;

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

std::vector<double> convolve_direct(std::span<const double> x, std::span<const double> h) {
  std::vector<double> y(x.size() + h.size() - 1, 0.0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double xi = x[i];
    if (xi == 0.0) continue;
    for (std::size_t j = 0; j < h.size(); ++j) y[i + j] += xi * h[j];
  }
  return y;
}

std::vector<double> convolve_fft(std::span<const double> x, std::span<const double> h) {
  const std::size_t out_len = x.size() + h.size() - 1;
  RealFft fft(next_pow2(out_len));
  std::vector<std::complex<double>> xs(fft.bins()), hs(fft.bins());
  fft.forward(x, xs);
  fft.forward(h, hs);
  const double scale = 1.0 / static_cast<double>(fft.size());
  for (std::size_t k = 0; k < xs.size(); ++k) xs[k] *= hs[k] * scale;
  std::vector<double> y(out_len);
  fft.inverse(xs, y);
  return y;
}

double sinc(double t) {
  if (t == 0.0) return 1.0;
  const double a = std::numbers::pi * t;
  return std::sin(a) / a;
}

double kaiser(double t, double half_width) {
  const double r = t / half_width;
  if (r <= -1.0 || r >= 1.0) return 0.0;
  return std::cyl_bessel_i(0.0, kKaiserBeta * std::sqrt(1.0 - r * r)) /
         std::cyl_bessel_i(0.0, kKaiserBeta);
}

// Tabulated one-sided kernel cutoff * sinc(cutoff * d) * kaiser(d) for
// d in [0, half]; evaluated by linear interpolation.
class KernelTable {
 public:
  KernelTable(double cutoff, int half) {
    table_.resize(static_cast<std::size_t>(half) * kKernelOversample + 2);
    for (std::size_t i = 0; i < table_.size(); ++i) {
      const double d = static_cast<double>(i) / kKernelOversample;
      table_[i] = cutoff * sinc(cutoff * d) * kaiser(d, half);
    }
  }

  double operator()(double d) const {
    const double pos = std::abs(d) * kKernelOversample;
    const auto i = static_cast<std::size_t>(pos);
    if (i + 1 >= table_.size()) return 0.0;
    const double frac = pos - static_cast<double>(i);
    return table_[i] + frac * (table_[i + 1] - table_[i]);
  }

 private:
  std::vector<double> table_;
};

}  // namespace

Waveform convolve(const Waveform& x, const Waveform& h) {
  if (x.empty() || h.empty()) throw SignalError("convolve: empty input");
  if (x.sample_rate_hz() != h.sample_rate_hz()) {
    throw SignalError("convolve: sample-rate mismatch (" + std::to_string(x.sample_rate_hz()) +
                      " vs " + std::to_string(h.sample_rate_hz()) + " Hz)");
  }
  const bool direct = x.size() * h.size() <= kDirectConvolutionLimit ||
                      std::min(x.size(), h.size()) <= 32;
  auto y = direct ? convolve_direct(x.samples(), h.samples()) : convolve_fft(x.samples(), h.samples());
  return Waveform(std::move(y), x.sample_rate_hz());
}

Waveform resample(const Waveform& x, int target_rate_hz) {
  if (target_rate_hz <= 0) {
    throw SignalError("resample: target rate must be positive, got " + std::to_string(target_rate_hz));
  }
  const int source = x.sample_rate_hz();
  if (source == target_rate_hz) return x;

  const double step = static_cast<double>(source) / target_rate_hz;
  const double cutoff =
      target_rate_hz < source ? kDecimationRolloff * target_rate_hz / source : 1.0;
  const auto out_len = static_cast<std::size_t>(
      std::llround(static_cast<double>(x.size()) * target_rate_hz / source));
  const auto in = x.samples();
  const auto n_in = static_cast<long long>(in.size());
  constexpr int half = kResampleTaps / 2;
  const KernelTable kernel(cutoff, half);

  std::vector<double> y(out_len, 0.0);
  for (std::size_t m = 0; m < out_len; ++m) {
    const double pos = static_cast<double>(m) * step;
    const auto base = static_cast<long long>(std::floor(pos));
    double acc = 0.0;
    for (long long k = base - half + 1; k <= base + half; ++k) {
      if (k < 0 || k >= n_in) continue;
      const double d = pos - static_cast<double>(k);
      acc += in[static_cast<std::size_t>(k)] * kernel(d);
    }
    y[m] = acc;
  }
  return Waveform(std::move(y), target_rate_hz);
}

double rms(const Waveform& x) {
  if (x.empty()) throw SignalError("rms: empty waveform");
  double sum = 0.0;
  for (double v : x.samples()) sum += v * v;
  return std::sqrt(sum / static_cast<double>(x.size()));
}

Waveform equalize_rms(const Waveform& x, double target_rms) {
  if (!(target_rms > 0.0)) throw SignalError("equalize_rms: target RMS must be positive");
  const double current = rms(x);
  if (current == 0.0) throw SignalError("equalize_rms: all-zero input has no defined scaling");
  const double gain = target_rms / current;
  std::vector<double> y(x.samples().begin(), x.samples().end());
  for (double& v : y) v *= gain;
  return Waveform(std::move(y), x.sample_rate_hz());
}

}  // namespace cisim
