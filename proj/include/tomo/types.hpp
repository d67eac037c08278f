#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

namespace tomo {

using cdouble = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;
using RMatrix = Eigen::MatrixXd;

/// Random stream used by every stochastic operation. Callers own it, so
/// each worker can hold its own independent stream.
using Rng = std::mt19937_64;

inline constexpr double kPi = std::numbers::pi;

/// Thrown for malformed inputs and violated preconditions.
class TomoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The virtual lag grid cannot represent the baseline span of a geometry.
class CoverageError : public TomoError {
 public:
  using TomoError::TomoError;
};

/// Closed interval [lo, hi] in meters.
struct Interval {
  double lo = -100.0;
  double hi = 100.0;

  [[nodiscard]] bool contains(double x) const noexcept { return x >= lo && x <= hi; }
  [[nodiscard]] double width() const noexcept { return hi - lo; }
};

/// Deterministic 64-bit mixer (splitmix64 finalizer). Used to derive
/// per-trial RNG substreams from (seed, index) pairs.
[[nodiscard]] constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

[[nodiscard]] constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a,
                                                  std::uint64_t b = 0) noexcept {
  return mix64(mix64(mix64(seed) ^ a) ^ (b * 0x632be59bd9b4e019ULL));
}

/// Numerically stable log(1 + exp(x)).
[[nodiscard]] inline double softplus(double x) noexcept {
  return x > 30.0 ? x : std::log1p(std::exp(x));
}

}  // namespace tomo
