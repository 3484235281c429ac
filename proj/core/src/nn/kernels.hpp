#pragma once

// Inner loops shared by the layer implementations.

#include <bit>
#include <cstddef>
#include <cstdint>

namespace gridcast::nn::detail {

/// Four independent partial sums; the summation order is fixed, so results
/// are reproducible run to run.
inline double dot(const double* a, const double* b, std::size_t n) {
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    s0 += a[k] * b[k];
    s1 += a[k + 1] * b[k + 1];
    s2 += a[k + 2] * b[k + 2];
    s3 += a[k + 3] * b[k + 3];
  }
  for (; k < n; ++k) s0 += a[k] * b[k];
  return (s0 + s1) + (s2 + s3);
}

/// y += alpha * x
inline void axpy(double alpha, const double* __restrict x, double* __restrict y, std::size_t n) {
  for (std::size_t k = 0; k < n; ++k) y[k] += alpha * x[k];
}

}  // namespace gridcast::nn::detail

namespace gridcast::nn::detail {

template <std::size_t Block>
inline std::size_t accumulate_rows_block(const double* __restrict alpha, std::size_t m, const double* __restrict x,
                                         std::size_t ldx, double* __restrict y, std::size_t j, std::size_t n) {
  for (; j + Block <= n; j += Block) {
    double acc[Block];
    for (std::size_t q = 0; q < Block; ++q) acc[q] = y[j + q];
    for (std::size_t k = 0; k < m; ++k) {
      const double a = alpha[k];
      const double* row = x + k * ldx + j;
      for (std::size_t q = 0; q < Block; ++q) acc[q] += a * row[q];
    }
    for (std::size_t q = 0; q < Block; ++q) y[j + q] = acc[q];
  }
  return j;
}

/// y[j] += sum_k alpha[k] * x[k * ldx + j] for j < n, k ascending. Each y[j]
/// sees the same operation order whatever the blocking.
inline void accumulate_rows(const double* __restrict alpha, std::size_t m, const double* __restrict x,
                            std::size_t ldx, double* __restrict y, std::size_t n) {
  std::size_t j = accumulate_rows_block<16>(alpha, m, x, ldx, y, 0, n);
  j = accumulate_rows_block<4>(alpha, m, x, ldx, y, j, n);
  accumulate_rows_block<1>(alpha, m, x, ldx, y, j, n);
}

}  // namespace gridcast::nn::detail

namespace gridcast::nn::detail {

/// exp with the argument clamped to [-708, 709], so the result is always a
/// normal number. Straight-line arithmetic, so loops over it vectorize and
/// give the same bits at any vector width. NaN propagates.
inline double exp_kernel(double x) {
  constexpr double kShift = 0x1.8p52;
  constexpr double kLn2Hi = 6.93147180369123816490e-01;
  constexpr double kLn2Lo = 1.90821492927058770002e-10;
  x = x < -708.0 ? -708.0 : x;
  x = x > 709.0 ? 709.0 : x;
  const double t = x * 1.4426950408889634074 + kShift;
  const double n = t - kShift;
  const double r = (x - n * kLn2Hi) - n * kLn2Lo;
  // Taylor series to degree 13; |r| <= ln2 / 2 keeps the tail below 1e-17.
  double p = 1.0 / 6227020800.0;
  p = p * r + 1.0 / 479001600.0;
  p = p * r + 1.0 / 39916800.0;
  p = p * r + 1.0 / 3628800.0;
  p = p * r + 1.0 / 362880.0;
  p = p * r + 1.0 / 40320.0;
  p = p * r + 1.0 / 5040.0;
  p = p * r + 1.0 / 720.0;
  p = p * r + 1.0 / 120.0;
  p = p * r + 1.0 / 24.0;
  p = p * r + 1.0 / 6.0;
  p = p * r + 0.5;
  p = p * r + 1.0;
  p = p * r + 1.0;
  const std::int64_t k = std::bit_cast<std::int64_t>(t) - std::bit_cast<std::int64_t>(kShift);
  const double scale = std::bit_cast<double>(static_cast<std::uint64_t>(k + 1023) << 52);
  return p * scale;
}

inline double sigmoid_kernel(double x) { return 1.0 / (1.0 + exp_kernel(-x)); }

inline double tanh_kernel(double x) {
  const double e = exp_kernel(2.0 * x);
  return (e - 1.0) / (e + 1.0);
}

}  // namespace gridcast::nn::detail
