#pragma once

#include "twistfix/phase.hpp"

#include <vector>

namespace twistfix::detail {

/// In-place unnormalized multidimensional DFT (row-major); sign -1 forward, +1 backward.
void fft_inplace(std::vector<Complex>& data, const std::vector<int>& dims, int sign);

}  // namespace twistfix::detail
