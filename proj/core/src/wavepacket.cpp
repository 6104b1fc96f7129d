#include "hom/wavepacket.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace hom {

void WavePacket::validate() const {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw Error("wave packet sigma must be > 0");
  if (!(omega_center > 0.0) || !std::isfinite(omega_center))
    throw Error("wave packet omega_center must be > 0");
  if (!std::isfinite(tau_center) || !std::isfinite(phase)) throw Error("wave packet not finite");
}

double WavePacket::analytic_energy() const {
  // |f|^2 = exp(-(t-tau)^2/sigma^2) / (2 pi sigma^2)
  return 1.0 / (2.0 * sigma * std::sqrt(std::numbers::pi));
}

void GateConfig::validate() const {
  if (!(width > 0.0) || !std::isfinite(width)) throw Error("gate width must be > 0");
  if (!std::isfinite(center)) throw Error("gate center not finite");
}

GridSpec default_time_grid(double center, double sigma, double gate_width) {
  const double half = 8.0 * std::max(sigma, gate_width);
  const auto n = static_cast<std::size_t>(std::ceil(2.0 * half / kDefaultTimeStep)) + 1;
  return GridSpec{center - half, kDefaultTimeStep, n, AxisKind::time};
}

ComplexSignal evaluate_temporal(const WavePacket& packet, const GridSpec& grid,
                                double reference_omega) {
  packet.validate();
  if (!(grid.step > 0.0) || grid.count < 2 || grid.axis != AxisKind::time) throw Error("bad grid");
  const double lo = packet.tau_center - 6.0 * packet.sigma;
  const double hi = packet.tau_center + 6.0 * packet.sigma;
  const double slack = 1e-9 * grid.step;
  if (grid.start > lo + slack || grid.last() < hi - slack) throw Error("insufficient support");

  const double prefactor = 1.0 / (packet.sigma * std::sqrt(2.0 * std::numbers::pi));
  const double detuning = packet.omega_center - reference_omega;
  std::vector<std::complex<double>> values(grid.count);
  for (std::size_t i = 0; i < grid.count; ++i) {
    const double t = grid.at(i);
    const double dt = t - packet.tau_center;
    const double env = prefactor * std::exp(-dt * dt / (2.0 * packet.sigma * packet.sigma));
    values[i] = std::polar(env, -(detuning * t + packet.phase));
  }
  return ComplexSignal(grid, std::move(values));
}

ComplexSignal apply_gate(const ComplexSignal& mode, const GateConfig& gate) {
  gate.validate();
  if (mode.axis() != AxisKind::time) throw Error("apply_gate needs a time-axis function");
  const double lo = gate.center - 0.5 * gate.width;
  const double hi = gate.center + 0.5 * gate.width;
  const double eps = 1e-9 * mode.step();
  const GridSpec& g = mode.grid();
  if (hi <= g.start || lo > g.last()) throw Error("gate misses support");

  std::vector<std::complex<double>> out(mode.values().begin(), mode.values().end());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double t = g.at(i);
    if (t < lo - eps || t >= hi - eps) out[i] = 0.0;
  }
  return ComplexSignal(g, std::move(out));
}

}  // namespace hom
