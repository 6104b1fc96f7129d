#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "hom/error.hpp"

namespace hom {

enum class AxisKind { time, angular_frequency };

/// Uniform abscissa: x_i = start + i * step, i in [0, count).
struct GridSpec {
  double start = 0.0;
  double step = 0.0;
  std::size_t count = 0;
  AxisKind axis = AxisKind::time;

  double at(std::size_t i) const { return start + static_cast<double>(i) * step; }
  double last() const { return at(count == 0 ? 0 : count - 1); }
};

/// Samples of a real or complex function on a uniform grid.
template <typename T>
class SampledFunction {
 public:
  using value_type = T;

  SampledFunction() = default;
  SampledFunction(GridSpec grid, std::vector<T> values) : grid_(grid), values_(std::move(values)) {
    if (!(grid_.step > 0.0) || !std::isfinite(grid_.step)) throw Error("bad grid");
    if (values_.empty()) throw Error("empty sampled function");
    grid_.count = values_.size();
  }

  const GridSpec& grid() const noexcept { return grid_; }
  AxisKind axis() const noexcept { return grid_.axis; }
  double start() const noexcept { return grid_.start; }
  double step() const noexcept { return grid_.step; }
  std::size_t size() const noexcept { return values_.size(); }
  double abscissa(std::size_t i) const { return grid_.at(i); }

  std::span<const T> values() const noexcept { return values_; }
  std::vector<T>& mutable_values() noexcept { return values_; }
  const T& operator[](std::size_t i) const { return values_[i]; }

 private:
  GridSpec grid_{};
  std::vector<T> values_;
};

using ComplexSignal = SampledFunction<std::complex<double>>;
using RealSignal = SampledFunction<double>;

/// Trapezoidal integral of samples spaced by `step`.
template <typename T>
T trapezoid(std::span<const T> v, double step) {
  if (v.empty()) return T{};
  T acc{};
  for (const auto& x : v) acc += x;
  acc -= (v.front() + v.back()) * 0.5;
  return acc * step;
}

/// Trapezoidal integral of |v|^2.
template <typename T>
double energy(const SampledFunction<T>& f) {
  std::vector<double> sq(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) sq[i] = std::norm(f[i]);
  return trapezoid<double>(sq, f.step());
}

/// Linear interpolation of `f` onto `grid`; zero outside the sampled range.
template <typename T>
SampledFunction<T> resample(const SampledFunction<T>& f, const GridSpec& grid) {
  std::vector<T> out(grid.count, T{});
  const double x0 = f.start();
  const double h = f.step();
  const std::size_t n = f.size();
  for (std::size_t i = 0; i < grid.count; ++i) {
    const double pos = (grid.at(i) - x0) / h;
    if (pos < 0.0 || pos > static_cast<double>(n - 1)) continue;
    const auto k = static_cast<std::size_t>(pos);
    if (k + 1 >= n) {
      out[i] = f[n - 1];
      continue;
    }
    const double frac = pos - static_cast<double>(k);
    out[i] = f[k] * (1.0 - frac) + f[k + 1] * frac;
  }
  return SampledFunction<T>(grid, std::move(out));
}

}  // namespace hom
