#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "hom/interference.hpp"
#include "oracles.hpp"

using namespace hom;

namespace {

constexpr double ns = 1e-9;

ExperimentConfig identical(double gate_width, double sigma) {
  ExperimentConfig cfg;
  const double w0 = oracle::kTwoPi * 193.25e12;
  cfg.packet1 = WavePacket{0, sigma, w0, 0};
  cfg.packet2 = WavePacket{0, sigma, w0, 0};
  cfg.gate = GateConfig{gate_width, 0};
  cfg.delays = symmetric_delays(50 * ns, 0.1 * ns);
  return cfg;
}

std::vector<double> interior_minima(const ExperimentConfig& cfg, double lo, double hi, double step) {
  std::vector<double> tau, r;
  for (double t = lo; t <= hi; t += step) {
    tau.push_back(t);
    r.push_back(coincidence_rate(cfg, t));
  }
  std::vector<double> minima;
  for (std::size_t i = 1; i + 1 < r.size(); ++i)
    if (r[i] < r[i - 1] && r[i] <= r[i + 1]) minima.push_back(tau[i]);
  return minima;
}

}  // namespace

TEST_SUITE("interference") {

TEST_CASE("identical packets reach the 50 percent floor at zero delay") {
  CHECK(coincidence_rate(identical(4 * ns, 1e-3), 0.0) == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(coincidence_rate(identical(1 * ns, 26.5 * ns), 0.0) == doctest::Approx(0.5).epsilon(5e-4));
}

TEST_CASE("far delays are fully distinguishable") {
  const auto cfg = oracle::two_lasers(4 * ns, 100e6, 10e6);
  CHECK(coincidence_rate(cfg, 200 * ns) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(coincidence_rate(identical(4 * ns, 1 * ns), -30 * ns) == 1.0);
}

TEST_CASE("rate agrees with an independent quadrature of the same kernel") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 40; ++trial) {
    const double p = (1 + 30 * u(rng)) * ns;
    const double df = (u(rng) - 0.5) * 400e6;
    const double lw = (1 + 40 * u(rng)) * 1e6;
    auto cfg = oracle::two_lasers(p, df, lw);
    cfg.packet2.sigma *= 0.5 + u(rng);
    const double tau = (u(rng) - 0.5) * 60 * ns;
    CHECK(coincidence_rate(cfg, tau) ==
          doctest::Approx(oracle::coincidence_rate(p, cfg.detuning(), cfg.packet1.sigma, cfg.packet2.sigma, tau))
              .epsilon(2e-6));
  }
}

TEST_CASE("100 MHz beat gives minima 10 ns apart") {
  for (double p : {2 * ns, 4 * ns, 6 * ns}) {
    const auto cfg = oracle::two_lasers(p, 100e6, 10e6);
    const auto minima = interior_minima(cfg, -40 * ns, 40 * ns, 0.01 * ns);
    REQUIRE(minima.size() >= 4);
    for (std::size_t i = 1; i < minima.size(); ++i)
      CHECK(std::abs(minima[i] - minima[i - 1] - 10 * ns) <= cfg.delays.step);
  }
}

TEST_CASE("rate stays within [0.5, 1.5] and is symmetric under swapping the arms") {
  std::mt19937_64 rng(4242);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    auto cfg = oracle::two_lasers((0.5 + 50 * u(rng)) * ns, (u(rng) - 0.5) * 1e9, (0.1 + 50 * u(rng)) * 1e6);
    cfg.packet1.sigma *= 0.2 + 2 * u(rng);
    const double tau = (u(rng) - 0.5) * 200 * ns;
    const double r = coincidence_rate(cfg, tau);
    CHECK(r >= 0.5 - 1e-12);
    CHECK(r <= 1.5 + 1e-12);
    auto swapped = cfg;
    std::swap(swapped.packet1, swapped.packet2);
    CHECK(coincidence_rate(swapped, tau) == doctest::Approx(r).epsilon(1e-14));
  }
}

TEST_CASE("Monte Carlo oracle reproduces the floor and the distinguishable limit") {
  auto cfg = identical(2 * ns, 1e-3);
  cfg.rng_seed = 11;
  const auto floor = mc_coincidence_oracle(cfg, 0.0, 100000);
  CHECK(std::abs(floor.rate - 0.5) < 0.005);
  CHECK(floor.standard_error > 0.0);
  auto separated = oracle::two_lasers(4 * ns, 100e6, 10e6);
  separated.rng_seed = 12;
  const auto far = mc_coincidence_oracle(separated, 300 * ns, 100000);
  CHECK(std::abs(far.rate - 1.0) < 0.005);
}

TEST_CASE("Monte Carlo oracle agrees with the analytic rate at sampled delays") {
  auto cfg = oracle::two_lasers(4 * ns, 100e6, 10e6);
  cfg.rng_seed = 2024;
  for (double tau : {-12 * ns, -5 * ns, 0.0, 2.5 * ns, 5 * ns, 9 * ns}) {
    const auto mc = mc_coincidence_oracle(cfg, tau, 40000);
    const double exact = coincidence_rate(cfg, tau);
    CHECK(std::abs(mc.rate - exact) <= std::max(1e-3, 4 * mc.standard_error));
  }
}

TEST_CASE("Monte Carlo oracle is independent of the thread count") {
  auto cfg = oracle::two_lasers(6 * ns, 100e6, 10e6);
  cfg.rng_seed = 5;
  const auto a = mc_coincidence_oracle(cfg, 3 * ns, 20000, 1);
  const auto b = mc_coincidence_oracle(cfg, 3 * ns, 20000, 3);
  CHECK(a.rate == b.rate);
  CHECK(a.standard_error == b.standard_error);
  CHECK_THROWS(mc_coincidence_oracle(cfg, 0.0, 9999));
}

TEST_CASE("noiseless synthesis equals the model curve") {
  auto cfg = oracle::two_lasers(5 * ns, 100e6, 10e6);
  cfg.mean_counts_per_bin = 1000;
  const auto data = synthesize_interferogram(cfg);
  REQUIRE(data.delays.size() == cfg.delays.count);
  REQUIRE(data.counts.size() == cfg.delays.count);
  REQUIRE(data.model_truth.has_value());
  for (std::size_t i = 0; i < data.delays.size(); ++i) {
    CHECK(data.delays[i] == cfg.delays.at(i));
    CHECK(data.counts[i] == 1000 * coincidence_rate(cfg, data.delays[i]));
  }
}

TEST_CASE("noisy synthesis is reproducible, thread independent and Poisson distributed") {
  auto cfg = oracle::two_lasers(20 * ns, 100e6, 10e6);
  cfg.delays = symmetric_delays(3000 * ns, 0.5 * ns);
  cfg.noise_enabled = true;
  cfg.rng_seed = 77;
  const auto a = synthesize_interferogram(cfg, 1);
  const auto b = synthesize_interferogram(cfg, 4);
  CHECK(a.counts == b.counts);
  cfg.rng_seed = 78;
  CHECK(synthesize_interferogram(cfg).counts != a.counts);

  std::vector<double> far;
  for (std::size_t i = 0; i < a.counts.size(); ++i) {
    CHECK(a.counts[i] == std::floor(a.counts[i]));
    CHECK(a.counts[i] >= 0);
    if (std::abs(a.delays[i]) > 300 * ns) far.push_back(a.counts[i]);
  }
  REQUIRE(far.size() > 5000);
  const double n = static_cast<double>(far.size());
  const double mean = std::accumulate(far.begin(), far.end(), 0.0) / n;
  double var = 0;
  for (double c : far) var += (c - mean) * (c - mean);
  var /= n - 1;
  CHECK(std::abs(mean - 1000) < 3 * std::sqrt(1000 / n));
  CHECK(var == doctest::Approx(1000).epsilon(0.1));
}

TEST_CASE("configuration validation") {
  auto cfg = oracle::two_lasers(4 * ns, 100e6, 10e6);
  cfg.delays = symmetric_delays(10 * ns, 0.1 * ns);
  CHECK_THROWS_WITH(cfg.validate(), "delay grid must span at least 3 beat periods");
  cfg = oracle::two_lasers(4 * ns, 100e6, 10e6);
  cfg.mean_counts_per_bin = 0;
  CHECK_THROWS(cfg.validate());
  cfg = oracle::two_lasers(4 * ns, 100e6, 10e6);
  cfg.gate.width = -1;
  CHECK_THROWS(synthesize_interferogram(cfg));
  CHECK_THROWS(symmetric_delays(0.0, 0.1));
  CHECK(oracle::two_lasers(4 * ns, 0.0, 10e6).detuning() == 0.0);
}

TEST_CASE("long gates leave no spectral overlap, short gates broaden the lines") {
  auto spectra_k = [](double p) {
    const auto [i1, i2] = gated_spectra(oracle::two_lasers(p, 100e6, 10e6));
    return distinguishability_k_intensity(i1, i2);
  };
  CHECK(spectra_k(100 * ns) > 0.99);
  CHECK(spectra_k(4 * ns) < 0.5);

  const auto [i1, i2] = gated_spectra(oracle::two_lasers(100 * ns, 100e6, 10e6));
  const auto& a = i1.samples();
  const auto [b1, b2] = align(i1.samples(), i2.samples());
  const double peak = *std::max_element(a.values().begin(), a.values().end());
  double overlap = 0.0;
  for (std::size_t i = 0; i < b1.size(); ++i) overlap = std::max(overlap, std::sqrt(b1[i] * b2[i]));
  CHECK(overlap < 0.02 * peak);
}

TEST_CASE("halving a gate-limited pulse doubles its spectral width") {
  auto fwhm = [](double p) {
    const auto [i1, i2] = gated_spectra(oracle::two_lasers(p, 100e6, 0.1e6));
    const auto& s = i1.samples();
    const double peak = *std::max_element(s.values().begin(), s.values().end());
    double lo = INFINITY, hi = -INFINITY;
    for (std::size_t i = 1; i < s.size(); ++i) {
      const double a = s[i - 1] - peak / 2, b = s[i] - peak / 2;
      if (a * b < 0) {
        const double w = s.abscissa(i - 1) + s.step() * a / (a - b);
        if (std::abs(w - oracle::kTwoPi * 50e6) < oracle::kTwoPi * 2e9 / (p / ns)) {
          lo = std::min(lo, w);
          hi = std::max(hi, w);
        }
      }
    }
    return hi - lo;
  };
  for (double p : {8 * ns, 4 * ns, 2 * ns})
    CHECK(fwhm(p / 2) / fwhm(p) == doctest::Approx(2.0).epsilon(0.05));
}

}  // TEST_SUITE
