#include <doctest.h>

#include <cmath>
#include <random>

#include "hom/wavepacket.hpp"
#include "oracles.hpp"

using namespace hom;

namespace {

constexpr double kRef = oracle::kTwoPi * 193e12;
constexpr double ns = 1e-9;

GridSpec grid_over(double lo, double hi, double step = 0.05 * ns) {
  const auto n = static_cast<std::size_t>(std::llround((hi - lo) / step)) + 1;
  return GridSpec{lo, step, n, AxisKind::time};
}

WavePacket packet(double tau, double sigma, double detuning = 0.0, double phase = 0.0) {
  return WavePacket{tau, sigma, kRef + detuning, phase};
}

}  // namespace

TEST_SUITE("wavepacket") {

TEST_CASE("peak equals the Gaussian prefactor and the envelope is symmetric") {
  const auto f = evaluate_temporal(packet(0, 1 * ns), grid_over(-6 * ns, 6 * ns), kRef);
  REQUIRE(f.size() == 241);
  const double prefactor = 1.0 / (1 * ns * std::sqrt(2 * oracle::kPi));
  CHECK(std::abs(f[120]) == doctest::Approx(prefactor).epsilon(1e-12));
  CHECK(std::abs(f[120].imag()) < 1e-12 * prefactor);
  for (std::size_t i = 0; i < 120; ++i)
    CHECK(std::abs(f[i] - f[240 - i]) <= 1e-12 * prefactor);
}

TEST_CASE("shifting tau translates the samples") {
  const auto base = evaluate_temporal(packet(0, 1 * ns), grid_over(-8 * ns, 8 * ns), kRef);
  const auto shifted = evaluate_temporal(packet(2 * ns, 1 * ns), grid_over(-6 * ns, 10 * ns), kRef);
  REQUIRE(base.size() == shifted.size());
  for (std::size_t i = 0; i < base.size(); ++i)
    CHECK(std::abs(std::abs(base[i]) - std::abs(shifted[i])) <= 1e-12 * std::abs(base[120]) + 1e-300);
}

TEST_CASE("detuned packet matches the pointwise formula and beats with a 10 ns period") {
  const double sigma = 5 * ns;
  // The detuning as represented after subtracting the optical reference.
  const double dw = (kRef + oracle::kTwoPi * 100e6) - kRef;
  const auto f = evaluate_temporal(packet(0, sigma, oracle::kTwoPi * 100e6), grid_over(-40 * ns, 40 * ns), kRef);
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double t = f.abscissa(i);
    const double env = std::exp(-t * t / (2 * sigma * sigma)) / (sigma * std::sqrt(2 * oracle::kPi));
    CHECK(std::abs(f[i].real() - env * std::cos(dw * t)) <= 1e-12 * env);
    CHECK(std::abs(f[i].imag() + env * std::sin(dw * t)) <= 1e-12 * env);
  }
  // Real part zero crossings (on the sampled grid) are spaced by half the period.
  std::vector<double> crossings;
  for (std::size_t i = 1; i < f.size(); ++i) {
    const double a = f[i - 1].real(), b = f[i].real();
    if (a * b < 0) crossings.push_back(f.abscissa(i - 1) + (f.abscissa(i) - f.abscissa(i - 1)) * a / (a - b));
  }
  REQUIRE(crossings.size() > 4);
  for (std::size_t i = 1; i < crossings.size(); ++i)
    CHECK(crossings[i] - crossings[i - 1] == doctest::Approx(5 * ns).epsilon(1e-3));
}

TEST_CASE("sampled energy equals the analytic Gaussian norm") {
  for (double sigma : {0.5 * ns, 1 * ns, 26.5 * ns}) {
    const auto p = packet(1.5 * ns, sigma, 2e8, 0.3);
    const auto f = evaluate_temporal(p, default_time_grid(1.5 * ns, sigma, 1 * ns), kRef);
    CHECK(energy(f) == doctest::Approx(p.analytic_energy()).epsilon(1e-9));
  }
}

TEST_CASE("evaluate_temporal rejects bad grids and short support") {
  const auto p = packet(0, 1 * ns);
  CHECK_THROWS_WITH(evaluate_temporal(p, GridSpec{-10 * ns, 0.0, 100, AxisKind::time}, kRef), "bad grid");
  CHECK_THROWS_WITH(evaluate_temporal(p, GridSpec{-10 * ns, -1e-10, 100, AxisKind::time}, kRef), "bad grid");
  CHECK_THROWS_WITH(evaluate_temporal(p, grid_over(-5 * ns, 6 * ns), kRef), "insufficient support");
  CHECK_THROWS_WITH(evaluate_temporal(p, grid_over(-6 * ns, 5.9 * ns), kRef), "insufficient support");
  CHECK_THROWS(evaluate_temporal(packet(0, 0.0), grid_over(-6 * ns, 6 * ns), kRef));
  CHECK_THROWS(evaluate_temporal(WavePacket{0, 1 * ns, -1.0, 0}, grid_over(-6 * ns, 6 * ns), kRef));
}

TEST_CASE("a gate wider than the grid is the identity") {
  const auto f = evaluate_temporal(packet(0, 1 * ns, 3e8), grid_over(-8 * ns, 8 * ns), kRef);
  const auto g = apply_gate(f, GateConfig{100 * ns, 0.0});
  for (std::size_t i = 0; i < f.size(); ++i) CHECK(g[i] == f[i]);
}

TEST_CASE("4 ns gate on a 50 ns packet keeps the truncated-Gaussian energy") {
  const double sigma = 50 * ns;
  const auto f = evaluate_temporal(packet(0, sigma), default_time_grid(0, sigma, 4 * ns), kRef);
  const auto g = apply_gate(f, GateConfig{4 * ns, 0.0});
  // Independent direct sum over the window [-2, 2) ns.
  double direct = 0.0;
  std::size_t inside = 0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double t = f.abscissa(i);
    if (t >= -2 * ns - 1e-21 && t < 2 * ns - 1e-21) {
      direct += std::norm(f[i]) * f.step();
      ++inside;
    }
  }
  CHECK(inside == 80);
  CHECK(energy(g) == doctest::Approx(direct).epsilon(1e-12));
  // Continuum limit: fraction erf(w / (2 sigma)) of the full energy.
  CHECK(energy(g) / energy(f) == doctest::Approx(std::erf(2 * ns / sigma)).epsilon(2e-3));
  for (std::size_t i = 0; i < f.size(); ++i) {
    const bool in = f.abscissa(i) >= -2 * ns - 1e-21 && f.abscissa(i) < 2 * ns - 1e-21;
    CHECK(g[i] == (in ? f[i] : std::complex<double>(0.0)));
  }
}

TEST_CASE("gate far from the support is rejected") {
  const auto f = evaluate_temporal(packet(0, 1 * ns), grid_over(-8 * ns, 8 * ns), kRef);
  CHECK_THROWS_WITH(apply_gate(f, GateConfig{10 * ns, 100 * ns}), "gate misses support");
  CHECK_THROWS_WITH(apply_gate(f, GateConfig{10 * ns, -100 * ns}), "gate misses support");
  CHECK_THROWS(apply_gate(f, GateConfig{0.0, 0.0}));
}

TEST_CASE("gating never adds energy, keeps it only when covering, and is idempotent") {
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const double sigma = (0.2 + 5 * u(rng)) * ns;
    const double tau = (u(rng) - 0.5) * 4 * ns;
    const auto f = evaluate_temporal(packet(tau, sigma, 1e9 * u(rng), 6 * u(rng)),
                                     default_time_grid(tau, sigma, 1 * ns), kRef);
    const GateConfig gate{(0.1 + 20 * u(rng)) * ns, tau + (u(rng) - 0.5) * 10 * ns};
    const auto g = apply_gate(f, gate);
    const double e_in = energy(f), e_out = energy(g);
    CHECK(e_out <= e_in * (1 + 1e-15));
    const bool covers = gate.center - gate.width / 2 <= f.start() && gate.center + gate.width / 2 > f.grid().last();
    double removed = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) removed += std::norm(f[i] - g[i]);
    if (covers) CHECK(e_out == e_in);
    else if (removed * f.step() > 1e-12 * e_in) CHECK(e_out < e_in);
    const auto gg = apply_gate(g, gate);
    for (std::size_t i = 0; i < g.size(); ++i) REQUIRE(gg[i] == g[i]);
  }
}

TEST_CASE("translation covariance on randomized packets") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const double sigma = (0.3 + 3 * u(rng)) * ns;
    const int shift_steps = static_cast<int>(u(rng) * 200) - 100;
    const double step = 0.05 * ns;
    const double shift = shift_steps * step;
    const auto g0 = default_time_grid(0, sigma, 1 * ns);
    GridSpec g1 = g0;
    g1.start += shift;
    const auto a = evaluate_temporal(packet(0, sigma), g0, kRef);
    const auto b = evaluate_temporal(packet(shift, sigma), g1, kRef);
    for (std::size_t i = 0; i < a.size(); ++i)
      REQUIRE(std::abs(std::abs(a[i]) - std::abs(b[i])) <= 1e-9 * std::abs(a[a.size() / 2]));
  }
}

}  // TEST_SUITE
