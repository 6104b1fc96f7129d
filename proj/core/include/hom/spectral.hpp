#pragma once

#include <array>

#include "hom/sampled_function.hpp"

namespace hom {

/// Complex amplitude spectrum X(w), w relative to the reference frequency.
class AmplitudeSpectrum {
 public:
  explicit AmplitudeSpectrum(ComplexSignal samples);
  const ComplexSignal& samples() const noexcept { return samples_; }

 private:
  ComplexSignal samples_;
};

/// Non-negative intensity spectrum I(w) ~ |X(w)|^2.
class IntensitySpectrum {
 public:
  explicit IntensitySpectrum(RealSignal samples);
  const RealSignal& samples() const noexcept { return samples_; }

 private:
  RealSignal samples_;
};

/// Unitary Fourier transform X(w) = (2 pi)^-1/2 * int f(t) exp(+i w t) dt of a
/// time-axis mode, zero-padded to at least 4x its length (power of two).
/// Output axis is centered: w_k = k * dw for k in [-N/2, N/2).
AmplitudeSpectrum spectrum_of(const ComplexSignal& mode);

IntensitySpectrum intensity_of(const AmplitudeSpectrum& spectrum);

/// F = |int X1 X2^* dw|^2 with both spectra normalized to unit intensity.
double spectral_fidelity(const AmplitudeSpectrum& x1, const AmplitudeSpectrum& x2);

/// K = 1 - (int |X1||X2| dw)^2 on unit-normalized spectra (phase removed).
double distinguishability_k_amplitude(const AmplitudeSpectrum& x1, const AmplitudeSpectrum& x2);

inline constexpr double kDefaultIntensityFloor = 1e-12;

/// Self-normalizing intensity form
///   K = 1 - (int sqrt(I1 I2))^2 / (int I1 * int I2).
/// Samples below floor * peak are treated as zero before the square root.
double distinguishability_k_intensity(const IntensitySpectrum& i1, const IntensitySpectrum& i2,
                                      double relative_floor = kDefaultIntensityFloor);

/// tau_c = 0.66 / linewidth, linewidth being the intensity FWHM in Hz.
double coherence_time(double linewidth_fwhm_hz);

/// Packet sigma whose |X|^2 has the given FWHM (Hz).
double sigma_for_linewidth(double linewidth_fwhm_hz);

/// K for two Gaussian intensities exp(-(w-c)^2/(2 s^2)) (amplitudes cancel):
///   K = 1 - 2 s1 s2 / (s1^2 + s2^2) * exp(-(c1-c2)^2 / (2 (s1^2 + s2^2))).
double gaussian_intensity_k(double center1, double std1, double center2, double std2);

/// Gradient of gaussian_intensity_k w.r.t. (center1, std1, center2, std2).
std::array<double, 4> gaussian_intensity_k_gradient(double center1, double std1, double center2,
                                                    double std2);

/// Brings two functions onto a common grid: the coarser one is linearly
/// interpolated onto the finer grid, extended to cover both supports.
template <typename T>
std::pair<SampledFunction<T>, SampledFunction<T>> align(const SampledFunction<T>& a,
                                                        const SampledFunction<T>& b);

}  // namespace hom
