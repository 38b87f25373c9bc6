#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace afp {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Malformed input file (message carries line or byte offset).
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Violated precondition or inconsistent input data.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Linear solve rejected because of a degenerate configuration.
class IllConditionedError : public Error {
 public:
  using Error::Error;
};

/// Optimizer left the plausible search region.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

void log_warn(const std::string& msg);

// ---------------------------------------------------------------------------
// Deterministic random numbers.
//
// All randomness in the library flows through Rng so that a fixed seed gives
// bitwise-identical results across runs and thread counts. Distribution
// helpers are implemented by hand; standard-library distributions are
// implementation-defined and would break cross-run reproducibility.
// ---------------------------------------------------------------------------

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {
    // Warm up so that nearby seeds decorrelate.
    next_u64();
    next_u64();
  }

  std::uint64_t next_u64() {
    // splitmix64
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1).
  double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform double in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n).
  std::uint64_t uniform_index(std::uint64_t n) {
    // Modulo bias is negligible for n << 2^64 and keeps the stream simple.
    return n == 0 ? 0 : next_u64() % n;
  }

  /// Standard normal via Box-Muller (one value per call, cached pair).
  double gaussian();

  Vec3 gaussian_vec3() { return Vec3(gaussian(), gaussian(), gaussian()); }

 private:
  std::uint64_t state_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

/// Derives an independent child seed from a base seed and a label, so one
/// config seed fans out to every randomized stage. Documented derivation:
/// FNV-1a(label) mixed into the base via splitmix64.
std::uint64_t derive_seed(std::uint64_t base, const std::string& label,
                          std::uint64_t index = 0);

// ---------------------------------------------------------------------------
// Execution policy for the parallel kernels. threads == 1 forces the serial
// reference path; 0 means "use all available". Every parallel kernel is
// written so that its result is bitwise identical to the serial path.
// ---------------------------------------------------------------------------

struct Exec {
  int threads = 0;

  static Exec serial() { return Exec{1}; }
  static Exec parallel(int n = 0) { return Exec{n}; }

  int resolve() const;
};

}  // namespace afp
