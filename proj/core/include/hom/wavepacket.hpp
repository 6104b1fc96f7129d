#pragma once

#include "hom/sampled_function.hpp"

namespace hom {

/// Gaussian temporal amplitude
///   f(t) = exp(-(t - tau_center)^2 / (2 sigma^2)) / (sigma sqrt(2 pi)) * exp(-i (omega t + phase)).
/// omega_center is the absolute optical angular frequency; sampled fields are
/// stored in baseband relative to a common reference frequency.
struct WavePacket {
  double tau_center = 0.0;    // s
  double sigma = 1e-9;        // s
  double omega_center = 1.0;  // rad/s
  double phase = 0.0;         // rad

  void validate() const;

  /// Analytic value of the trapezoid-free integral of |f(t)|^2.
  double analytic_energy() const;
};

/// Rectangular detection gate (amplitude-modulator chop) of width p_t.
struct GateConfig {
  double width = 4e-9;  // s
  double center = 0.0;  // s, relative to packet arrival

  void validate() const;
};

inline constexpr double kDefaultTimeStep = 0.05e-9;

/// Time grid with step 0.05 ns spanning center +/- 8 max(sigma, gate width).
GridSpec default_time_grid(double center, double sigma, double gate_width);

/// Baseband complex amplitude of `packet` relative to `reference_omega`.
/// Throws "bad grid" for a non-positive step and "insufficient support" when
/// the grid does not contain [tau - 6 sigma, tau + 6 sigma].
ComplexSignal evaluate_temporal(const WavePacket& packet, const GridSpec& grid,
                                double reference_omega);

/// Zeroes samples outside the half-open window [c - w/2, c + w/2).
/// The window center is absolute on the time axis of `mode`.
ComplexSignal apply_gate(const ComplexSignal& mode, const GateConfig& gate);

}  // namespace hom
