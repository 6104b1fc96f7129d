#pragma once

#include <complex>
#include <vector>

namespace hom::detail {

/// In-place backward (exp(+i...)) unnormalized DFT of `data`.
void dft_backward(std::vector<std::complex<double>>& data);

}  // namespace hom::detail
