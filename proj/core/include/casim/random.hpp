#pragma once

#include <cstdint>
#include <random>

namespace casim {

/// Mixes a base seed with a stream index into an independent 64-bit seed.
/// Used for per-run and per-trial streams so Monte Carlo results do not depend
/// on the order in which trials are executed.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

/// Uniform [0, 1) reals from a 64-bit Mersenne twister. The conversion uses
/// the top 53 bits directly so the sequence is identical across standard
/// library implementations.
class UniformStream {
 public:
  explicit UniformStream(std::uint64_t seed) : engine_(seed) {}

  double next() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  void discard(unsigned long long n) { engine_.discard(n); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace casim
