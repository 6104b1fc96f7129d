#include "hom/estimation.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <numbers>
#include <optional>

#include "fft.hpp"
#include "hom/error.hpp"

namespace hom {

namespace {

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  if (v.size() % 2 == 1) return *mid;
  const double upper = *mid;
  const double lower = *std::max_element(v.begin(), mid);
  return 0.5 * (lower + upper);
}

bool covariance_ok(const Eigen::MatrixXd& c) {
  if (!c.allFinite()) return false;
  for (Eigen::Index i = 0; i < c.rows(); ++i)
    if (c(i, i) < 0.0) return false;
  return (c - c.transpose()).cwiseAbs().maxCoeff() <= 1e-9 * (c.cwiseAbs().maxCoeff() + 1e-300);
}

// Fringe model evaluation shared by the fit and by FringeFit::operator().
struct FringeTerms {
  double e, cs, sn, u;
};

FringeTerms terms(double tau, double dw, double w, double tau0) {
  const double u = tau - tau0;
  return {std::exp(-u * u / (2.0 * w * w)), std::cos(dw * u), std::sin(dw * u), u};
}

// d model / d(R, A, dw, w, tau0) at tau.
Eigen::Matrix<double, 5, 1> fringe_gradient(double tau, double r, double a, double dw, double w,
                                            double tau0) {
  const auto t = terms(tau, dw, w, tau0);
  const double g = t.e * t.cs;
  Eigen::Matrix<double, 5, 1> grad;
  grad << 1.0 - a * g, -r * g, r * a * t.e * t.sn * t.u,
      -r * a * t.cs * t.e * t.u * t.u / (w * w * w),
      -r * a * (t.e * t.u * t.cs / (w * w) + t.e * dw * t.sn);
  return grad;
}

struct FringeData {
  std::vector<double> tau, counts, sqrt_weight;
  double step = 0.0;
};

// Sets r_min = inf over tau of the fitted model and its (R_dist, R_min) covariance.
void finish_extrema(FringeFit& fit, const FringeData& d) {
  double best = fit.r_dist;
  double best_tau = std::numeric_limits<double>::infinity();
  const double lo = d.tau.front();
  const double hi = d.tau.back();
  const double h = d.step / 8.0;
  const auto steps = static_cast<std::size_t>(std::ceil((hi - lo) / h));
  auto probe = [&](double tau) {
    const double v = fit(tau);
    if (v < best) {
      best = v;
      best_tau = tau;
    }
  };
  for (std::size_t k = 0; k <= steps; ++k) probe(std::min(hi, lo + static_cast<double>(k) * h));
  if (fit.tau0 >= lo && fit.tau0 <= hi) probe(fit.tau0);
  fit.r_min = best;

  Eigen::Matrix<double, 2, 5> jac = Eigen::Matrix<double, 2, 5>::Zero();
  jac(0, 0) = 1.0;
  if (std::isfinite(best_tau)) {
    const double w = fit.envelope_width > 0.0 ? fit.envelope_width : 1.0;
    jac.row(1) = fringe_gradient(best_tau, fit.r_dist, fit.amplitude, fit.delta_omega, w, fit.tau0)
                     .transpose();
  } else {
    jac(1, 0) = 1.0;
  }
  fit.extrema_covariance = jac * fit.covariance * jac.transpose();
  fit.extrema_covariance = 0.5 * (fit.extrema_covariance + fit.extrema_covariance.transpose()).eval();
}

FringeFit constant_fit(const FringeData& d) {
  double sw = 0.0, swc = 0.0;
  for (std::size_t i = 0; i < d.tau.size(); ++i) {
    const double w = d.sqrt_weight[i] * d.sqrt_weight[i];
    sw += w;
    swc += w * d.counts[i];
  }
  FringeFit fit;
  fit.model = FringeModel::constant;
  fit.r_dist = swc / sw;
  double chi2 = 0.0;
  for (std::size_t i = 0; i < d.tau.size(); ++i) {
    const double r = d.sqrt_weight[i] * (d.counts[i] - fit.r_dist);
    chi2 += r * r;
  }
  const double dof = static_cast<double>(d.tau.size() - 1);
  fit.covariance(0, 0) = chi2 / dof / sw;
  fit.residual_norm = std::sqrt(chi2);
  fit.flags = {"no_fringe", "flat"};
  return fit;
}

// Fits R(1 - A g(tau)) with g the fringe or the bare envelope. `params` holds
// (R, A, dw, w, tau0); dw is held at 0 for the envelope-only model.
FringeFit run_fringe_lm(const FringeData& d, Eigen::Matrix<double, 5, 1> p0, bool with_fringe,
                        const LmOptions& options) {
  const std::size_t m = d.tau.size();
  // Free-parameter map into the 5-vector.
  const std::vector<int> free = with_fringe ? std::vector<int>{0, 1, 2, 3, 4}
                                            : std::vector<int>{0, 1, 3, 4};
  auto expand = [&](const Eigen::VectorXd& x) {
    Eigen::Matrix<double, 5, 1> full = p0;
    for (std::size_t j = 0; j < free.size(); ++j) full[free[j]] = x[static_cast<Eigen::Index>(j)];
    if (!with_fringe) full[2] = 0.0;
    return full;
  };
  ResidualFunction fn = [&](const Eigen::VectorXd& x, Eigen::VectorXd& r, Eigen::MatrixXd& jac) {
    const auto p = expand(x);
    for (std::size_t i = 0; i < m; ++i) {
      const auto t = terms(d.tau[i], p[2], p[3], p[4]);
      const double model = p[0] * (1.0 - p[1] * t.e * t.cs);
      const auto idx = static_cast<Eigen::Index>(i);
      r[idx] = d.sqrt_weight[i] * (model - d.counts[i]);
      const auto grad = fringe_gradient(d.tau[i], p[0], p[1], p[2], p[3], p[4]);
      for (std::size_t j = 0; j < free.size(); ++j)
        jac(idx, static_cast<Eigen::Index>(j)) = d.sqrt_weight[i] * grad[free[j]];
    }
  };
  Eigen::VectorXd x0(static_cast<Eigen::Index>(free.size()));
  for (std::size_t j = 0; j < free.size(); ++j) x0[static_cast<Eigen::Index>(j)] = p0[free[j]];
  const LmResult res = levenberg_marquardt(fn, x0, m, options);

  const auto p = expand(res.params);
  FringeFit fit;
  fit.model = with_fringe ? FringeModel::fringe : FringeModel::envelope_only;
  fit.r_dist = p[0];
  fit.amplitude = p[1];
  fit.delta_omega = std::abs(p[2]);
  fit.envelope_width = std::abs(p[3]);
  fit.tau0 = p[4];
  for (std::size_t a = 0; a < free.size(); ++a)
    for (std::size_t b = 0; b < free.size(); ++b)
      fit.covariance(free[a], free[b]) =
          res.covariance(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
  // Sign flips of dw and w leave the model unchanged; keep the covariance consistent.
  for (int j : {2, 3}) {
    if (p[j] < 0.0) {
      fit.covariance.row(j) *= -1.0;
      fit.covariance.col(j) *= -1.0;
    }
  }
  fit.residual_norm = std::sqrt(res.cost);
  if (!with_fringe) fit.flags = {"no_fringe"};
  return fit;
}

}  // namespace

// ---------------------------------------------------------------------------
// Gaussian spectra

double GaussianFit::operator()(double x) const {
  const double u = (x - center) / std;
  return amplitude * std::exp(-0.5 * u * u) + offset;
}

GaussianFit fit_gaussian(const RealSignal& samples, const LmOptions& options) {
  const std::size_t n = samples.size();
  if (n < 8) throw Error("fit_gaussian needs at least 8 samples");
  const auto y = samples.values();
  const std::size_t edge = std::max<std::size_t>(1, n / 10);
  const double offset0 = std::min(median({y.begin(), y.begin() + static_cast<std::ptrdiff_t>(edge)}),
                                  median({y.end() - static_cast<std::ptrdiff_t>(edge), y.end()}));
  const auto imax = static_cast<std::size_t>(std::max_element(y.begin(), y.end()) - y.begin());
  const double height = y[imax] - offset0;
  std::vector<double> diffs(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) diffs[i] = std::abs(y[i + 1] - y[i]);
  const double noise = 1.4826 * median(std::move(diffs)) / std::numbers::sqrt2;
  if (!(height > 0.0) || height <= 5.0 * noise) throw Error("degenerate data");

  // Moments over the contiguous region above 5% of the peak.
  const double thr = 0.05 * height;
  std::size_t lo = imax, hi = imax;
  while (lo > 0 && y[lo - 1] - offset0 >= thr) --lo;
  while (hi + 1 < n && y[hi + 1] - offset0 >= thr) ++hi;
  lo = lo > 0 ? lo - 1 : lo;
  hi = hi + 1 < n ? hi + 1 : hi;
  double sw = 0.0, swx = 0.0;
  for (std::size_t i = lo; i <= hi; ++i) {
    const double w = std::max(y[i] - offset0, 0.0);
    sw += w;
    swx += w * samples.abscissa(i);
  }
  const double c0 = swx / sw;
  double swxx = 0.0;
  for (std::size_t i = lo; i <= hi; ++i) {
    const double w = std::max(y[i] - offset0, 0.0);
    const double dx = samples.abscissa(i) - c0;
    swxx += w * dx * dx;
  }
  const double s0 = std::max(std::sqrt(swxx / sw), samples.step());

  ResidualFunction fn = [&](const Eigen::VectorXd& p, Eigen::VectorXd& r, Eigen::MatrixXd& jac) {
    const double a = p[0], c = p[1], s = p[2], o = p[3];
    for (std::size_t i = 0; i < n; ++i) {
      const double dx = samples.abscissa(i) - c;
      const double e = std::exp(-dx * dx / (2.0 * s * s));
      const auto idx = static_cast<Eigen::Index>(i);
      r[idx] = a * e + o - y[i];
      jac(idx, 0) = e;
      jac(idx, 1) = a * e * dx / (s * s);
      jac(idx, 2) = a * e * dx * dx / (s * s * s);
      jac(idx, 3) = 1.0;
    }
  };
  Eigen::VectorXd x0(4);
  x0 << height, c0, s0, offset0;
  const LmResult res = levenberg_marquardt(fn, x0, n, options);

  GaussianFit fit;
  fit.amplitude = res.params[0];
  fit.center = res.params[1];
  fit.std = std::abs(res.params[2]);
  fit.offset = res.params[3];
  fit.covariance = res.covariance;
  if (res.params[2] < 0.0) {
    fit.covariance.row(2) *= -1.0;
    fit.covariance.col(2) *= -1.0;
  }
  fit.residual_norm = std::sqrt(res.cost);
  return fit;
}

// ---------------------------------------------------------------------------
// Fringe fit

double FringeFit::operator()(double tau) const {
  if (model == FringeModel::constant) return r_dist;
  const auto t = terms(tau, delta_omega, envelope_width, tau0);
  return r_dist * (1.0 - amplitude * t.e * t.cs);
}

FringeFit fit_fringe(const Interferogram& data, const FringeFitOptions& options) {
  const std::size_t n = data.delays.size();
  if (n != data.counts.size()) throw Error("interferogram delays/counts size mismatch");
  if (n < 50) throw Error("fit_fringe needs at least 50 bins");
  FringeData d;
  d.tau = data.delays;
  d.counts = data.counts;
  d.step = (d.tau.back() - d.tau.front()) / static_cast<double>(n - 1);
  if (!(d.step > 0.0)) throw Error("interferogram delays must increase");
  d.sqrt_weight.resize(n);
  double total_var = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(d.counts[i] >= 0.0) || !std::isfinite(d.counts[i]))
      throw Error("interferogram counts must be finite and >= 0");
    const double var = std::max(d.counts[i], 1.0);
    d.sqrt_weight[i] = 1.0 / std::sqrt(var);
    total_var += var;
  }

  const auto n_out = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::lround(options.outer_fraction * static_cast<double>(n) / 2.0)));
  double r0 = 0.0;
  for (std::size_t i = 0; i < n_out; ++i) r0 += d.counts[i] + d.counts[n - 1 - i];
  r0 /= static_cast<double>(2 * n_out);
  if (!(r0 > 0.0)) throw Error("degenerate interferogram: no counts in the outer region");

  std::vector<double> dev(n);
  for (std::size_t i = 0; i < n; ++i) dev[i] = d.counts[i] - r0;

  // Dominant nonzero DFT peak of the excursion.
  constexpr std::size_t kPad = 8;
  const std::size_t big_n = std::bit_ceil(kPad * n);
  std::vector<std::complex<double>> buf(big_n, 0.0);
  std::copy(dev.begin(), dev.end(), buf.begin());
  detail::dft_backward(buf);
  std::vector<double> mag(big_n / 2 + 1);
  for (std::size_t k = 0; k < mag.size(); ++k) mag[k] = std::abs(buf[k]);
  const double floor_level =
      std::max(median({mag.begin() + 1, mag.end()}), std::sqrt(total_var));
  const std::size_t k_min = 2 * big_n / n;  // at least two cycles across the span
  std::size_t k_peak = 0;
  for (std::size_t k = std::max<std::size_t>(k_min, 2); k + 1 < mag.size(); ++k)
    if (mag[k] >= mag[k - 1] && mag[k] >= mag[k + 1] && (k_peak == 0 || mag[k] > mag[k_peak]))
      k_peak = k;
  const bool fringe = k_peak != 0 && mag[k_peak] >= options.detection_threshold * floor_level;

  // Noise variance of a single bin from second differences (~0 for ideal curves).
  std::vector<double> dd;
  dd.reserve(n - 2);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double s2 = d.counts[i + 1] - 2.0 * d.counts[i] + d.counts[i - 1];
    dd.push_back(s2 * s2 / 6.0);
  }
  const double bin_var = median(std::move(dd)) / 0.4549;

  std::optional<FringeFit> with_beat;
  bool unconverged = false;
  if (fringe) {
    const double y0 = mag[k_peak - 1], y1 = mag[k_peak], y2 = mag[k_peak + 1];
    const double denom = y0 - 2.0 * y1 + y2;
    const double frac = denom != 0.0 ? 0.5 * (y0 - y2) / denom : 0.0;
    const double nu = (static_cast<double>(k_peak) + frac) / (static_cast<double>(big_n) * d.step);
    const double dw0 = 2.0 * std::numbers::pi * nu;
    const double period = 1.0 / nu;

    std::complex<double> z = 0.0;
    double swt = 0.0, sw = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      z += dev[i] * std::polar(1.0, dw0 * d.tau[i]);
      const double q = dev[i] * dev[i];
      swt += q * d.tau[i];
      sw += q;
    }
    const double tau_c = swt / sw;
    const double theta = std::arg(-z);
    const double tau0 = theta / dw0 + std::round((tau_c - theta / dw0) / period) * period;

    double near_sum = 0.0;
    std::size_t near_n = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (std::abs(d.tau[i] - tau0) <= 0.1 * period) {
        near_sum += d.counts[i];
        ++near_n;
      }
    }
    const double near = near_n ? near_sum / static_cast<double>(near_n) : r0;
    const double a0 = std::max((r0 - near) / r0, 1e-3);
    double energy = 0.0;
    for (double v : dev) energy += v * v - bin_var;
    const double span = d.tau.back() - d.tau.front();
    double w0 = 2.0 * d.step * std::max(energy, 0.0) / (r0 * r0 * a0 * a0 * std::sqrt(std::numbers::pi));
    w0 = std::clamp(w0, 4.0 * d.step, 0.5 * span);

    Eigen::Matrix<double, 5, 1> p0;
    p0 << r0, a0, dw0, w0, tau0;
    try {
      with_beat = run_fringe_lm(d, p0, true, options.lm);
    } catch (const FitError&) {
      unconverged = true;
    } catch (const Error&) {
      // singular fringe model: treat as undetected
    }
  }

  // Envelope-only: a dip (or bump) without a resolvable beat note.
  std::optional<FringeFit> envelope;
  double ext = 0.0;
  std::size_t iext = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(dev[i]) > std::abs(ext)) {
      ext = dev[i];
      iext = i;
    }
  }
  const double a0 = -ext / r0;
  double area = 0.0;
  for (double v : dev)
    if (v * ext > 0.0) area += std::abs(v);
  area *= d.step;
  if (std::abs(ext) > 0.0 && std::abs(ext) > 3.0 * std::sqrt(bin_var)) {
    const double span = d.tau.back() - d.tau.front();
    const double w0 = std::clamp(area / (std::abs(ext) * std::sqrt(2.0 * std::numbers::pi)),
                                 2.0 * d.step, 0.5 * span);
    Eigen::Matrix<double, 5, 1> p0;
    p0 << r0, a0, 0.0, w0, d.tau[iext];
    try {
      FringeFit fit = run_fringe_lm(d, p0, false, options.lm);
      if (std::isfinite(fit.envelope_width) && fit.envelope_width > 0.0 &&
          fit.envelope_width < 10.0 * span)
        envelope = std::move(fit);
    } catch (const Error&) {
      // fall through to the flat model
    }
  }

  // The beat must also beat the envelope-only model on weighted chi^2.
  if (with_beat) {
    const double chi2_beat = with_beat->residual_norm * with_beat->residual_norm;
    const double threshold = options.detection_threshold * options.detection_threshold;
    if (!envelope ||
        chi2_beat + threshold < envelope->residual_norm * envelope->residual_norm) {
      finish_extrema(*with_beat, d);
      return *with_beat;
    }
  }
  FringeFit fit = envelope ? *envelope : constant_fit(d);
  if (unconverged) fit.flags.push_back("fringe_unconverged");
  finish_extrema(fit, d);
  return fit;
}

// ---------------------------------------------------------------------------
// Visibility and complementarity

double visibility(double r_dist, double r_min) {
  if (!(r_dist > 0.0)) throw Error("visibility needs R_dist > 0");
  if (!(r_min >= 0.0) || r_min > r_dist) throw Error("visibility needs 0 <= R_min <= R_dist");
  return (r_dist - r_min) / r_dist;
}

double corrected_visibility(double r_dist, double r_min) {
  visibility(r_dist, r_min);
  const double floor = 0.5 * r_dist;
  return ((r_dist - floor) - (r_min - floor)) / (r_dist - floor);
}

std::array<double, 2> corrected_visibility_gradient(double r_dist, double r_min) {
  visibility(r_dist, r_min);
  return {2.0 * r_min / (r_dist * r_dist), -2.0 / r_dist};
}

double k_from_fits(const GaussianFit& g1, const GaussianFit& g2) {
  return gaussian_intensity_k(g1.center, g1.std, g2.center, g2.std);
}

std::array<double, 8> k_gradient(const GaussianFit& g1, const GaussianFit& g2) {
  const auto g = gaussian_intensity_k_gradient(g1.center, g1.std, g2.center, g2.std);
  return {0.0, g[0], g[1], 0.0, 0.0, g[2], g[3], 0.0};
}

ComplementarityRecord propagate_errors(const GaussianFit& g1, const GaussianFit& g2,
                                       const FringeFit& fringe, double pt) {
  if (!covariance_ok(g1.covariance) || !covariance_ok(g2.covariance) ||
      !covariance_ok(fringe.extrema_covariance))
    throw Error("singular covariance");
  ComplementarityRecord rec;
  rec.pt = pt;
  rec.k = k_from_fits(g1, g2);
  const auto gk = k_gradient(g1, g2);
  Eigen::Matrix<double, 4, 1> j1, j2;
  j1 << gk[0], gk[1], gk[2], gk[3];
  j2 << gk[4], gk[5], gk[6], gk[7];
  const double var_k = j1.dot(g1.covariance * j1) + j2.dot(g2.covariance * j2);

  rec.v = visibility(fringe.r_dist, fringe.r_min);
  rec.vcal = corrected_visibility(fringe.r_dist, fringe.r_min);
  const auto gv = corrected_visibility_gradient(fringe.r_dist, fringe.r_min);
  const Eigen::Vector2d jv(gv[0], gv[1]);
  const double var_vcal = jv.dot(fringe.extrema_covariance * jv);

  rec.sigma_k = std::sqrt(std::max(var_k, 0.0));
  rec.sigma_vcal = std::sqrt(std::max(var_vcal, 0.0));
  rec.sigma_v = 0.5 * rec.sigma_vcal;
  rec.s = rec.k * rec.k + rec.vcal * rec.vcal;
  rec.sigma_s = std::hypot(2.0 * rec.k * rec.sigma_k, 2.0 * rec.vcal * rec.sigma_vcal);
  rec.flags = fringe.flags;
  return rec;
}

ComplementarityRecord estimate_complementarity(const IntensitySpectrum& i1,
                                               const IntensitySpectrum& i2,
                                               const Interferogram& data, double pt,
                                               const FringeFitOptions& options) {
  const GaussianFit g1 = fit_gaussian(i1.samples(), options.lm);
  const GaussianFit g2 = fit_gaussian(i2.samples(), options.lm);
  const FringeFit fringe = fit_fringe(data, options);
  ComplementarityRecord rec = propagate_errors(g1, g2, fringe, pt);
  rec.k_raw = distinguishability_k_intensity(i1, i2);
  return rec;
}

}  // namespace hom
