#include "fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <memory>
#include <mutex>

#include "hom/error.hpp"

namespace hom::detail {

namespace {
// FFTW planning is not thread-safe; execution on a private plan is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwFree {
  void operator()(fftw_complex* p) const { fftw_free(p); }
};
}  // namespace

void dft_backward(std::vector<std::complex<double>>& data) {
  static_assert(sizeof(fftw_complex) == sizeof(std::complex<double>));
  const auto n = data.size();
  // fftw_malloc keeps alignment (and hence the chosen codelets) identical run to run.
  std::unique_ptr<fftw_complex, FftwFree> buf(
      static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n)));
  if (!buf) throw Error("fftw allocation failed");
  auto* view = reinterpret_cast<std::complex<double>*>(buf.get());
  std::copy(data.begin(), data.end(), view);

  fftw_plan plan = nullptr;
  {
    std::lock_guard lock(planner_mutex());
    plan = fftw_plan_dft_1d(static_cast<int>(n), buf.get(), buf.get(), FFTW_BACKWARD,
                            FFTW_ESTIMATE);
  }
  if (plan == nullptr) throw Error("fftw planning failed");
  fftw_execute(plan);
  {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan);
  }
  std::copy(view, view + n, data.begin());
}

}  // namespace hom::detail
