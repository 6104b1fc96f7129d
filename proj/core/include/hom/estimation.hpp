#pragma once

#include <Eigen/Dense>
#include <array>
#include <string>
#include <vector>

#include "hom/interference.hpp"
#include "hom/least_squares.hpp"
#include "hom/spectral.hpp"

namespace hom {

/// y(x) = amplitude * exp(-(x - center)^2 / (2 std^2)) + offset.
/// Covariance rows/columns follow (amplitude, center, std, offset).
struct GaussianFit {
  double amplitude = 0.0;
  double center = 0.0;
  double std = 1.0;
  double offset = 0.0;
  Eigen::Matrix4d covariance = Eigen::Matrix4d::Zero();
  double residual_norm = 0.0;

  double operator()(double x) const;
};

/// Unweighted least-squares Gaussian fit with moment-based initialization.
/// Throws Error("degenerate data") when the peak does not rise above the
/// offset by more than 5x the sample-noise estimate.
GaussianFit fit_gaussian(const RealSignal& samples, const LmOptions& options = {});

enum class FringeModel { fringe, envelope_only, constant };

/// C(tau) = r_dist * [1 - amplitude * exp(-(tau - tau0)^2 / (2 w^2)) cos(dw (tau - tau0))].
/// Covariance rows/columns follow (r_dist, amplitude, delta_omega, w, tau0);
/// parameters absent from the chosen model have zero rows.
struct FringeFit {
  double r_dist = 0.0;
  double r_min = 0.0;
  double amplitude = 0.0;
  double delta_omega = 0.0;
  double envelope_width = 0.0;
  double tau0 = 0.0;
  FringeModel model = FringeModel::fringe;
  Eigen::Matrix<double, 5, 5> covariance = Eigen::Matrix<double, 5, 5>::Zero();
  Eigen::Matrix2d extrema_covariance = Eigen::Matrix2d::Zero();  // of (r_dist, r_min)
  double residual_norm = 0.0;
  std::vector<std::string> flags;

  bool fringe_detected() const { return model == FringeModel::fringe; }
  double operator()(double tau) const;
};

struct FringeFitOptions {
  double outer_fraction = 0.2;     // delay-span fraction averaged for the R_dist guess
  double detection_threshold = 3;  // DFT peak / noise floor
  LmOptions lm{};
};

/// Poisson-weighted (1 / max(C, 1)) fit of the beat-note fringe model. Falls
/// back to an envelope-only model (delta_omega = 0, flag "no_fringe") when the
/// dominant DFT peak is below threshold or the fringe fit does not improve the
/// weighted chi^2 of the envelope-only fit by more than threshold^2, and to a
/// flat model (flags "no_fringe", "flat") when even the envelope cannot be
/// resolved. A fringe candidate whose fit does not converge is rejected the
/// same way and flagged "fringe_unconverged".
FringeFit fit_fringe(const Interferogram& data, const FringeFitOptions& options = {});

/// V = (R_dist - R_min) / R_dist.
double visibility(double r_dist, double r_min);

/// Multi-photon-corrected visibility
///   ((R_dist - R_dist/2) - (R_min - R_dist/2)) / (R_dist - R_dist/2) = V / 0.5.
double corrected_visibility(double r_dist, double r_min);

/// d(corrected_visibility) / d(r_dist, r_min).
std::array<double, 2> corrected_visibility_gradient(double r_dist, double r_min);

/// K for two fitted spectral Gaussians.
double k_from_fits(const GaussianFit& g1, const GaussianFit& g2);

/// dK / d(a1, c1, s1, o1, a2, c2, s2, o2).
std::array<double, 8> k_gradient(const GaussianFit& g1, const GaussianFit& g2);

struct ComplementarityRecord {
  double pt = 0.0;  // s
  double k = 0.0, sigma_k = 0.0;
  double v = 0.0, sigma_v = 0.0;
  double vcal = 0.0, sigma_vcal = 0.0;
  double s = 0.0, sigma_s = 0.0;
  double k_raw = 0.0;  // K from the raw sampled spectra, for cross-checking
  std::vector<std::string> flags;
};

/// First-order propagation of the spectral and fringe fit covariances into
/// (K, V, Vcal, S = K^2 + Vcal^2). The two sources are independent.
ComplementarityRecord propagate_errors(const GaussianFit& g1, const GaussianFit& g2,
                                       const FringeFit& fringe, double pt);

/// Fits both spectra and the interferogram and assembles the record.
ComplementarityRecord estimate_complementarity(const IntensitySpectrum& i1,
                                               const IntensitySpectrum& i2,
                                               const Interferogram& data, double pt,
                                               const FringeFitOptions& options = {});

}  // namespace hom
