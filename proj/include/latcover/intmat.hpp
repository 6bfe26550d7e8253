#pragma once

#include <cstdint>
#include <vector>

namespace latcover {

/// Row-major square integer matrix.
using IntMatrix = std::vector<std::vector<std::int64_t>>;

/// Exact determinant (fraction-free elimination in arbitrary precision).
/// Throws InvalidArgument if the result does not fit in 64 bits.
std::int64_t integer_determinant(const IntMatrix& m);

bool is_unimodular(const IntMatrix& m);

}  // namespace latcover
