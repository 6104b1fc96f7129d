#include "hom/interference.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <numbers>
#include <random>

#include "hom/parallel.hpp"

namespace hom {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kInvSqrt2 = 0.70710678118654752440;

// Coefficient a in c(u) = exp(-a u^2).
double coherence_coefficient(const ExperimentConfig& cfg) {
  const double s1 = cfg.packet1.sigma;
  const double s2 = cfg.packet2.sigma;
  return 0.25 * (1.0 / (s1 * s1) + 1.0 / (s2 * s2));
}

// Number of trapezoid intervals per triangle half.
std::size_t intervals_per_half(double width, double detuning, double coeff) {
  double h = width / 512.0;
  if (detuning != 0.0) h = std::min(h, kTwoPi / std::abs(detuning) / 256.0);
  h = std::min(h, 1.0 / std::sqrt(2.0 * coeff) / 64.0);
  return std::max<std::size_t>(512, static_cast<std::size_t>(std::ceil(width / h)));
}

std::uint64_t bits_of(double x) { return std::bit_cast<std::uint64_t>(x); }

// Accumulated first and second moments of (X = W_A W_B, A = W_A, B = W_B).
struct Moments {
  double x = 0, a = 0, b = 0, xx = 0, aa = 0, bb = 0, xa = 0, xb = 0;
  std::size_t n = 0;

  void add(double wa, double wb) {
    const double wx = wa * wb;
    x += wx;
    a += wa;
    b += wb;
    xx += wx * wx;
    aa += wa * wa;
    bb += wb * wb;
    xa += wx * wa;
    xb += wx * wb;
    ++n;
  }
  void merge(const Moments& o) {
    x += o.x, a += o.a, b += o.b, xx += o.xx, aa += o.aa, bb += o.bb, xa += o.xa, xb += o.xb;
    n += o.n;
  }
};

// Integrated output intensities of one ensemble member over both gates.
class FieldSampler {
 public:
  FieldSampler(const ExperimentConfig& cfg, double tau) : cfg_(cfg), tau_(tau) {
    const double width = cfg.gate.width;
    const double d1 = cfg.packet1.omega_center - cfg.reference_omega();
    const double d2 = cfg.packet2.omega_center - cfg.reference_omega();
    spread1_ = 1.0 / (cfg.packet1.sigma * std::numbers::sqrt2);
    spread2_ = 1.0 / (cfg.packet2.sigma * std::numbers::sqrt2);
    mean1_ = d1;
    mean2_ = d2;
    const double fastest = std::max(std::abs(d1), std::abs(d2)) + 6.0 * std::max(spread1_, spread2_);
    const double cycles = width * fastest / kTwoPi;
    steps_ = std::max<std::size_t>(64, static_cast<std::size_t>(std::ceil(cycles * 48.0)));
    steps_ += steps_ % 2;  // Simpson needs an even interval count
  }

  template <typename Rng>
  std::pair<double, double> draw(Rng& rng) const {
    std::uniform_real_distribution<double> phase(0.0, kTwoPi);
    std::normal_distribution<double> nu1(mean1_, spread1_);
    std::normal_distribution<double> nu2(mean2_, spread2_);
    const double phi = phase(rng);
    const double w1 = nu1(rng);
    const double w2 = nu2(rng);
    const double master = cfg_.gate.center;
    return {integrate(master, w1, w2, phi, true), integrate(master + tau_, w1, w2, phi, false)};
  }

 private:
  // Simpson rule over the gate centered at `center` of |output port|^2, normalized by width.
  double integrate(double center, double w1, double w2, double phi, bool port_a) const {
    const double width = cfg_.gate.width;
    const double h = width / static_cast<double>(steps_);
    const double t0 = center - 0.5 * width;
    std::complex<double> e1 = std::polar(1.0, -(w1 * t0 + phi));
    std::complex<double> e2 = std::polar(1.0, -(w2 * t0));
    const std::complex<double> r1 = std::polar(1.0, -w1 * h);
    const std::complex<double> r2 = std::polar(1.0, -w2 * h);
    const std::complex<double> i(0.0, 1.0);
    double acc = 0.0;
    for (std::size_t k = 0; k <= steps_; ++k) {
      const std::complex<double> out =
          port_a ? (e1 + i * e2) * kInvSqrt2 : (i * e1 + e2) * kInvSqrt2;
      const double weight = (k == 0 || k == steps_) ? 1.0 : (k % 2 == 1 ? 4.0 : 2.0);
      acc += weight * std::norm(out);
      e1 *= r1;
      e2 *= r2;
    }
    return acc * h / (3.0 * width);
  }

  const ExperimentConfig& cfg_;
  double tau_;
  double mean1_ = 0, mean2_ = 0, spread1_ = 0, spread2_ = 0;
  std::size_t steps_ = 64;
};

}  // namespace

DelayGrid symmetric_delays(double half_span, double step) {
  if (!(half_span > 0.0) || !(step > 0.0)) throw Error("bad delay grid");
  const auto half = static_cast<std::size_t>(std::ceil(half_span / step - 1e-9));
  return DelayGrid{-static_cast<double>(half) * step, step, 2 * half + 1};
}

void ExperimentConfig::validate() const {
  packet1.validate();
  packet2.validate();
  gate.validate();
  if (!(delays.step > 0.0) || delays.count < 2) throw Error("bad delay grid");
  if (!(mean_counts_per_bin > 0.0) || !std::isfinite(mean_counts_per_bin))
    throw Error("mean_counts_per_bin must be > 0");
  const double dw = detuning();
  if (dw != 0.0 && delays.span() < 3.0 * kTwoPi / std::abs(dw))
    throw Error("delay grid must span at least 3 beat periods");
}

double ExperimentConfig::reference_omega() const {
  return 0.5 * (packet1.omega_center + packet2.omega_center);
}

double ExperimentConfig::detuning() const { return packet1.omega_center - packet2.omega_center; }

double coincidence_rate(const ExperimentConfig& cfg, double tau) {
  const double p = cfg.gate.width;
  const double dw = cfg.detuning();
  const double a = coherence_coefficient(cfg);
  const std::size_t m = intervals_per_half(p, dw, a);
  const double h = p / static_cast<double>(m);

  // Kernel tri(v) = (p - |v|) / p^2 on v = u - tau in [-p, p]; trapezoid with a
  // node on the kink at v = 0.
  double acc = 0.0;
  for (std::size_t k = 0; k <= 2 * m; ++k) {
    const double v = -p + static_cast<double>(k) * h;
    const double u = tau + v;
    const double weight = (k == 0 || k == 2 * m) ? 0.5 : 1.0;
    const double tri = (p - std::abs(v)) / (p * p);
    acc += weight * tri * std::cos(dw * u) * std::exp(-a * u * u);
  }
  return 1.0 - 0.5 * acc * h;
}

McEstimate mc_coincidence_oracle(const ExperimentConfig& cfg, double tau, std::size_t n_samples,
                                 unsigned threads) {
  cfg.validate();
  if (n_samples < 10000) throw Error("mc_coincidence_oracle needs n_samples >= 1e4");
  constexpr std::size_t kBlock = 1024;
  const std::size_t blocks = (n_samples + kBlock - 1) / kBlock;
  const FieldSampler sampler(cfg, tau);
  std::vector<Moments> partial(blocks);
  parallel_for(blocks, threads, [&](std::size_t b) {
    std::mt19937_64 rng(derive_seed(cfg.rng_seed, bits_of(tau), b));
    const std::size_t count = std::min(kBlock, n_samples - b * kBlock);
    Moments m;
    for (std::size_t s = 0; s < count; ++s) {
      const auto [wa, wb] = sampler.draw(rng);
      m.add(wa, wb);
    }
    partial[b] = m;
  });
  Moments total;
  for (const auto& m : partial) total.merge(m);

  const double n = static_cast<double>(total.n);
  const double ex = total.x / n, ea = total.a / n, eb = total.b / n;
  const double rate = ex / (ea * eb);
  // Sample covariance of (X, A, B) and the gradient of X / (A B).
  const double vxx = total.xx / n - ex * ex;
  const double vaa = total.aa / n - ea * ea;
  const double vbb = total.bb / n - eb * eb;
  const double vxa = total.xa / n - ex * ea;
  const double vxb = total.xb / n - ex * eb;
  const double vab = ex - ea * eb;
  const std::array<double, 3> g{1.0 / (ea * eb), -rate / ea, -rate / eb};
  const double var = g[0] * g[0] * vxx + g[1] * g[1] * vaa + g[2] * g[2] * vbb +
                     2.0 * (g[0] * g[1] * vxa + g[0] * g[2] * vxb + g[1] * g[2] * vab);
  return McEstimate{rate, std::sqrt(std::max(var, 0.0) / n)};
}

Interferogram synthesize_interferogram(const ExperimentConfig& cfg, unsigned threads) {
  cfg.validate();
  Interferogram out;
  out.delays.resize(cfg.delays.count);
  out.counts.resize(cfg.delays.count);
  parallel_for(cfg.delays.count, threads, [&](std::size_t i) {
    const double tau = cfg.delays.at(i);
    const double mean = cfg.mean_counts_per_bin * coincidence_rate(cfg, tau);
    out.delays[i] = tau;
    if (cfg.noise_enabled) {
      std::mt19937_64 rng(derive_seed(cfg.rng_seed, 0x5157ULL, i));
      std::poisson_distribution<long long> poisson(mean);
      out.counts[i] = static_cast<double>(poisson(rng));
    } else {
      out.counts[i] = mean;
    }
  });
  out.model_truth = cfg;
  return out;
}

std::pair<AmplitudeSpectrum, AmplitudeSpectrum> gated_amplitude_spectra(const ExperimentConfig& cfg) {
  cfg.validate();
  const double t1 = cfg.packet1.tau_center;
  const double t2 = cfg.packet2.tau_center;
  const double sigma = std::max(cfg.packet1.sigma, cfg.packet2.sigma);
  GridSpec grid = default_time_grid(0.5 * (t1 + t2), sigma, cfg.gate.width);
  const double extra = 0.5 * std::abs(t1 - t2) + std::abs(cfg.gate.center);
  if (extra > 0.0) {
    const auto pad = static_cast<std::size_t>(std::ceil(extra / grid.step));
    grid.start -= static_cast<double>(pad) * grid.step;
    grid.count += 2 * pad;
  }
  const double ref = cfg.reference_omega();
  auto gated = [&](const WavePacket& p) {
    const GateConfig g{cfg.gate.width, p.tau_center + cfg.gate.center};
    return spectrum_of(apply_gate(evaluate_temporal(p, grid, ref), g));
  };
  return {gated(cfg.packet1), gated(cfg.packet2)};
}

std::pair<IntensitySpectrum, IntensitySpectrum> gated_spectra(const ExperimentConfig& cfg) {
  auto [x1, x2] = gated_amplitude_spectra(cfg);
  return {intensity_of(x1), intensity_of(x2)};
}

}  // namespace hom
