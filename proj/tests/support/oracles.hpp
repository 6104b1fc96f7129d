#pragma once

// Reference computations used by the tests. They avoid the library's FFT and
// quadrature paths so that agreement is meaningful.

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <vector>

#include "hom/interference.hpp"
#include "hom/spectral.hpp"

namespace oracle {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// X(w) = (2 pi)^-1/2 * sum_j f(t_j) exp(i w t_j) dt, plain loop.
inline std::complex<double> dtft(const hom::ComplexSignal& f, double w) {
  std::complex<double> acc = 0.0;
  for (std::size_t j = 0; j < f.size(); ++j)
    acc += f[j] * std::polar(1.0, w * f.abscissa(j));
  return acc * f.step() / std::sqrt(kTwoPi);
}

/// Gaussian amplitude spectrum exp(-(w - c)^2 / (2 s^2)) on a centered grid.
inline hom::AmplitudeSpectrum gaussian_amplitude(double center, double s, double dw, std::size_t n,
                                                 double phase_slope = 0.0) {
  std::vector<std::complex<double>> v(n);
  const double start = -0.5 * static_cast<double>(n) * dw;
  for (std::size_t i = 0; i < n; ++i) {
    const double w = start + static_cast<double>(i) * dw;
    v[i] = std::polar(std::exp(-(w - center) * (w - center) / (2 * s * s)), phase_slope * w);
  }
  return hom::AmplitudeSpectrum(
      hom::ComplexSignal(hom::GridSpec{start, dw, n, hom::AxisKind::angular_frequency}, v));
}

inline hom::IntensitySpectrum gaussian_intensity(double center, double s, double dw, std::size_t n,
                                                 double scale = 1.0) {
  std::vector<double> v(n);
  const double start = -0.5 * static_cast<double>(n) * dw;
  for (std::size_t i = 0; i < n; ++i) {
    const double w = start + static_cast<double>(i) * dw;
    v[i] = scale * std::exp(-(w - center) * (w - center) / (2 * s * s));
  }
  return hom::IntensitySpectrum(
      hom::RealSignal(hom::GridSpec{start, dw, n, hom::AxisKind::angular_frequency}, v));
}

/// Composite Simpson rule on [a, b] with n (even) intervals.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n) {
  const double h = (b - a) / n;
  double acc = f(a) + f(b);
  for (int i = 1; i < n; ++i) acc += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return acc * h / 3.0;
}

/// Rate for identical rectangular gates: 1 - 1/2 int tri(u - tau) cos(dw u) c(u) du,
/// evaluated with Simpson on each triangle half.
inline double coincidence_rate(double width, double dw, double s1, double s2, double tau) {
  const double a = 0.25 * (1 / (s1 * s1) + 1 / (s2 * s2));
  auto g = [&](double u) {
    const double tri = (width - std::abs(u - tau)) / (width * width);
    return tri * std::cos(dw * u) * std::exp(-a * u * u);
  };
  const int n = 4000;
  return 1.0 - 0.5 * (simpson(g, tau - width, tau, n) + simpson(g, tau, tau + width, n));
}

/// Two-laser configuration: Gaussian packets centered at zero delay.
inline hom::ExperimentConfig two_lasers(double gate_width, double delta_f_hz, double linewidth_hz,
                                        double delay_step = 0.1e-9) {
  const double sigma = hom::sigma_for_linewidth(linewidth_hz);
  const double w0 = kTwoPi * 193.25e12;
  const double dw = kTwoPi * delta_f_hz;
  hom::ExperimentConfig cfg;
  cfg.packet1 = hom::WavePacket{0.0, sigma, w0 + dw / 2, 0.0};
  cfg.packet2 = hom::WavePacket{0.0, sigma, w0 - dw / 2, 0.0};
  cfg.gate = hom::GateConfig{gate_width, 0.0};
  cfg.delays = hom::symmetric_delays(6 * sigma + gate_width, delay_step);
  return cfg;
}

/// Central difference of f along coordinate i with relative step h.
template <typename F, typename V>
double central_difference(F&& f, V x, std::size_t i, double rel = 1e-6) {
  const double step = rel * std::max(std::abs(x[i]), 1e-300);
  V up = x, down = x;
  up[i] += step;
  down[i] -= step;
  return (f(up) - f(down)) / (up[i] - down[i]);
}

}  // namespace oracle
