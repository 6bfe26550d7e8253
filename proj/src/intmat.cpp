#include "latcover/intmat.hpp"

#include <limits>

#include <boost/multiprecision/cpp_int.hpp>

#include "latcover/error.hpp"

namespace latcover {

std::int64_t integer_determinant(const IntMatrix& m) {
  using boost::multiprecision::cpp_int;
  const std::size_t n = m.size();
  for (const auto& row : m) {
    require(row.size() == n, ErrorCode::DimensionMismatch, "integer matrix must be square");
  }
  if (n == 0) return 1;
  std::vector<std::vector<cpp_int>> a(n, std::vector<cpp_int>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) a[i][j] = m[i][j];
  }
  // Bareiss elimination: every division is exact.
  int sign = 1;
  cpp_int prev = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (a[k][k] == 0) {
      std::size_t p = k + 1;
      while (p < n && a[p][k] == 0) ++p;
      if (p == n) return 0;
      std::swap(a[k], a[p]);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j) {
        a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
      }
    }
    prev = a[k][k];
  }
  const cpp_int det = sign * a[n - 1][n - 1];
  require(det >= std::numeric_limits<std::int64_t>::min() &&
              det <= std::numeric_limits<std::int64_t>::max(),
          ErrorCode::InvalidArgument, "determinant overflows 64 bits");
  return static_cast<std::int64_t>(det);
}

bool is_unimodular(const IntMatrix& m) {
  const std::int64_t d = integer_determinant(m);
  return d == 1 || d == -1;
}

}  // namespace latcover
