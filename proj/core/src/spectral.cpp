#include "hom/spectral.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>

#include "fft.hpp"

namespace hom {

namespace {

constexpr double kInvSqrt2Pi = 0.39894228040143267794;

bool same_grid(const GridSpec& a, const GridSpec& b) {
  const double tol = 1e-12 * std::max(std::abs(a.step), std::abs(b.step));
  return a.axis == b.axis && a.count == b.count && std::abs(a.step - b.step) <= tol &&
         std::abs(a.start - b.start) <= tol * static_cast<double>(a.count);
}

ComplexSignal unit_normalized(const ComplexSignal& x) {
  const double e = energy(x);
  if (!(e > 0.0) || !std::isfinite(e)) throw Error("spectrum has no energy");
  const double scale = 1.0 / std::sqrt(e);
  std::vector<std::complex<double>> v(x.values().begin(), x.values().end());
  for (auto& z : v) z *= scale;
  return ComplexSignal(x.grid(), std::move(v));
}

}  // namespace

template <typename T>
std::pair<SampledFunction<T>, SampledFunction<T>> align(const SampledFunction<T>& a,
                                                        const SampledFunction<T>& b) {
  if (a.axis() != b.axis()) throw Error("mismatched grids: axis kinds differ");
  if (same_grid(a.grid(), b.grid())) return {a, b};
  const auto& fine = a.step() <= b.step() ? a : b;
  const double h = fine.step();
  const double lo = std::min(a.start(), b.start());
  const double hi = std::max(a.grid().last(), b.grid().last());
  const double below = std::ceil((fine.start() - lo) / h - 1e-9);
  const double total = std::ceil((hi - lo) / h - 1e-9) + 2.0;
  if (!std::isfinite(total) || total > 1e8) throw Error("mismatched grids: cannot be aligned");
  GridSpec common{fine.start() - below * h, h, static_cast<std::size_t>(total), a.axis()};
  return {resample(a, common), resample(b, common)};
}

template std::pair<RealSignal, RealSignal> align(const RealSignal&, const RealSignal&);
template std::pair<ComplexSignal, ComplexSignal> align(const ComplexSignal&, const ComplexSignal&);

AmplitudeSpectrum::AmplitudeSpectrum(ComplexSignal samples) : samples_(std::move(samples)) {
  if (samples_.axis() != AxisKind::angular_frequency)
    throw Error("amplitude spectrum needs an angular-frequency axis");
}

IntensitySpectrum::IntensitySpectrum(RealSignal samples) : samples_(std::move(samples)) {
  if (samples_.axis() != AxisKind::angular_frequency)
    throw Error("intensity spectrum needs an angular-frequency axis");
  for (double v : samples_.values())
    if (!(v >= 0.0) || !std::isfinite(v)) throw Error("intensity spectrum must be finite and >= 0");
}

AmplitudeSpectrum spectrum_of(const ComplexSignal& mode) {
  if (mode.size() == 0) throw Error("empty mode");
  if (mode.axis() != AxisKind::time) throw Error("spectrum_of needs a time-axis mode");
  const std::size_t n = mode.size();
  const std::size_t big_n = std::bit_ceil(4 * n);
  std::vector<std::complex<double>> buf(big_n, 0.0);
  std::copy(mode.values().begin(), mode.values().end(), buf.begin());
  detail::dft_backward(buf);

  const double dt = mode.step();
  const double t0 = mode.start();
  const double dw = 2.0 * std::numbers::pi / (static_cast<double>(big_n) * dt);
  const auto half = static_cast<std::ptrdiff_t>(big_n / 2);
  std::vector<std::complex<double>> out(big_n);
  for (std::ptrdiff_t k = -half; k < half; ++k) {
    const double w = static_cast<double>(k) * dw;
    const auto idx = static_cast<std::size_t>((k + static_cast<std::ptrdiff_t>(big_n)) %
                                              static_cast<std::ptrdiff_t>(big_n));
    out[static_cast<std::size_t>(k + half)] = buf[idx] * std::polar(dt * kInvSqrt2Pi, w * t0);
  }
  GridSpec grid{-static_cast<double>(half) * dw, dw, big_n, AxisKind::angular_frequency};
  return AmplitudeSpectrum(ComplexSignal(grid, std::move(out)));
}

IntensitySpectrum intensity_of(const AmplitudeSpectrum& spectrum) {
  const auto& s = spectrum.samples();
  std::vector<double> v(s.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::norm(s[i]);
  return IntensitySpectrum(RealSignal(s.grid(), std::move(v)));
}

double spectral_fidelity(const AmplitudeSpectrum& x1, const AmplitudeSpectrum& x2) {
  auto [a, b] = align(x1.samples(), x2.samples());
  const auto na = unit_normalized(a);
  const auto nb = unit_normalized(b);
  std::vector<std::complex<double>> prod(na.size());
  for (std::size_t i = 0; i < prod.size(); ++i) prod[i] = na[i] * std::conj(nb[i]);
  return std::norm(trapezoid<std::complex<double>>(prod, na.step()));
}

double distinguishability_k_amplitude(const AmplitudeSpectrum& x1, const AmplitudeSpectrum& x2) {
  auto [a, b] = align(x1.samples(), x2.samples());
  const auto na = unit_normalized(a);
  const auto nb = unit_normalized(b);
  std::vector<double> prod(na.size());
  for (std::size_t i = 0; i < prod.size(); ++i) prod[i] = std::abs(na[i]) * std::abs(nb[i]);
  const double overlap = trapezoid<double>(prod, na.step());
  return std::clamp(1.0 - overlap * overlap, 0.0, 1.0);
}

double distinguishability_k_intensity(const IntensitySpectrum& i1, const IntensitySpectrum& i2,
                                      double relative_floor) {
  auto floored = [relative_floor](const RealSignal& s) {
    const auto vals = s.values();
    const double peak = *std::max_element(vals.begin(), vals.end());
    if (!(peak > 0.0)) throw Error("degenerate spectrum");
    std::vector<double> v(vals.begin(), vals.end());
    const double cut = relative_floor * peak;
    for (auto& x : v)
      if (x < cut) x = 0.0;
    return RealSignal(s.grid(), std::move(v));
  };
  auto [a, b] = align(floored(i1.samples()), floored(i2.samples()));
  std::vector<double> cross(a.size());
  for (std::size_t i = 0; i < cross.size(); ++i) cross[i] = std::sqrt(a[i] * b[i]);
  const double h = a.step();
  const double num = trapezoid<double>(cross, h);
  const double n1 = trapezoid<double>(a.values(), h);
  const double n2 = trapezoid<double>(b.values(), h);
  if (!(n1 > 0.0) || !(n2 > 0.0)) throw Error("degenerate spectrum");
  return std::clamp(1.0 - num * num / (n1 * n2), 0.0, 1.0);
}

double coherence_time(double linewidth_fwhm_hz) {
  if (!(linewidth_fwhm_hz > 0.0) || !std::isfinite(linewidth_fwhm_hz))
    throw Error("linewidth must be > 0");
  return 0.66 / linewidth_fwhm_hz;
}

double sigma_for_linewidth(double linewidth_fwhm_hz) {
  if (!(linewidth_fwhm_hz > 0.0) || !std::isfinite(linewidth_fwhm_hz))
    throw Error("linewidth must be > 0");
  return std::sqrt(std::numbers::ln2) / (std::numbers::pi * linewidth_fwhm_hz);
}

double gaussian_intensity_k(double center1, double std1, double center2, double std2) {
  if (!(std1 > 0.0) || !(std2 > 0.0)) throw Error("gaussian std must be > 0");
  const double s = std1 * std1 + std2 * std2;
  const double d = center1 - center2;
  return 1.0 - (2.0 * std1 * std2 / s) * std::exp(-d * d / (2.0 * s));
}

std::array<double, 4> gaussian_intensity_k_gradient(double center1, double std1, double center2,
                                                    double std2) {
  if (!(std1 > 0.0) || !(std2 > 0.0)) throw Error("gaussian std must be > 0");
  const double s = std1 * std1 + std2 * std2;
  const double d = center1 - center2;
  const double p = 2.0 * std1 * std2 / s;
  const double e = std::exp(-d * d / (2.0 * s));
  const double dk_dc1 = p * e * d / s;
  const double dp_ds1 = 2.0 * std2 * (std2 * std2 - std1 * std1) / (s * s);
  const double dp_ds2 = 2.0 * std1 * (std1 * std1 - std2 * std2) / (s * s);
  const double de_ds1 = e * d * d * std1 / (s * s);
  const double de_ds2 = e * d * d * std2 / (s * s);
  return {dk_dc1, -(dp_ds1 * e + p * de_ds1), -dk_dc1, -(dp_ds2 * e + p * de_ds2)};
}

}  // namespace hom
