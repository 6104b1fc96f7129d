#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "hom/spectral.hpp"
#include "hom/wavepacket.hpp"

namespace hom {

/// Detection delays tau_i = start + i * step.
struct DelayGrid {
  double start = -100e-9;
  double step = 0.1e-9;
  std::size_t count = 2001;

  double at(std::size_t i) const { return start + static_cast<double>(i) * step; }
  double span() const { return step * static_cast<double>(count == 0 ? 0 : count - 1); }
};

/// Symmetric delay grid [-half_span, half_span] with the given step.
DelayGrid symmetric_delays(double half_span, double step);

struct ExperimentConfig {
  WavePacket packet1;
  WavePacket packet2;
  GateConfig gate;
  DelayGrid delays;
  double mean_counts_per_bin = 1000.0;
  std::uint64_t rng_seed = 0;
  bool noise_enabled = false;

  void validate() const;
  /// Mean of the two optical frequencies; all sampled fields are relative to it.
  double reference_omega() const;
  /// omega1 - omega2.
  double detuning() const;
};

struct Interferogram {
  std::vector<double> delays;  // s
  std::vector<double> counts;
  std::optional<ExperimentConfig> model_truth;
};

/// Normalized coincidence rate (R_dist = 1) at master/slave gate delay `tau`.
///
/// Each arm carries a constant-amplitude coherent field whose instantaneous
/// frequency is distributed as the packet's |X(w)|^2 and whose phase is
/// uniformly random. Averaging the gated beam-splitter output intensities over
/// that ensemble gives
///   R(tau) = 1 - 1/2 * int tri(u - tau) cos(dw u) c(u) du,
/// where tri is the (unit-area) distribution of slave-minus-master detection
/// times for two rectangular gates of width p_t and
/// c(u) = exp(-u^2 (sigma1^-2 + sigma2^-2) / 4) is the relative coherence.
/// Range [0.5, 1.5]; the envelope synchronization point is tau = 0.
double coincidence_rate(const ExperimentConfig& cfg, double tau);

struct McEstimate {
  double rate = 0.0;
  double standard_error = 0.0;
};

/// Monte Carlo estimate of coincidence_rate by sampling the field ensemble,
/// propagating the gated fields through a symmetric beam splitter
/// ((E1 + iE2)/sqrt2, (iE1 + E2)/sqrt2) and integrating the output intensities
/// over the master and slave gates. Returns <W_A W_B> / (<W_A><W_B>) with a
/// delta-method standard error. Bit-identical for a fixed seed regardless of
/// `threads`.
McEstimate mc_coincidence_oracle(const ExperimentConfig& cfg, double tau, std::size_t n_samples,
                                 unsigned threads = 1);

/// Poisson (or ideal) coincidence counts over cfg.delays.
Interferogram synthesize_interferogram(const ExperimentConfig& cfg, unsigned threads = 1);

/// Gated complex spectra of the two arms (packet mode x rectangular gate).
std::pair<AmplitudeSpectrum, AmplitudeSpectrum> gated_amplitude_spectra(const ExperimentConfig& cfg);

/// Intensity spectra of the two gated temporal modes.
std::pair<IntensitySpectrum, IntensitySpectrum> gated_spectra(const ExperimentConfig& cfg);

}  // namespace hom
