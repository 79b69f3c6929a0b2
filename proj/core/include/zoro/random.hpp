#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

namespace zoro {

using Seed = std::uint64_t;

/// Derives an independent stream seed from a master seed with SplitMix64.
/// Used everywhere a component needs its own generator, so runs never share
/// hidden RNG state.
Seed derive_seed(Seed master, std::uint64_t stream);

/// Repository-wide generator.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the C++
/// standard. The standard *distributions* are implementation-defined, so all
/// conversions (uniform doubles, signs, normals, bounded integers) are done
/// here by hand. Same seed, same bits, on every platform.
class Rng {
 public:
  explicit Rng(Seed seed);

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53 random mantissa bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// +1 or -1 with equal probability (top bit of one draw).
  int sign();

  /// Standard normal via Box-Muller; the second variate is cached.
  double normal();

  /// Uniform integer in [0, n) by rejection; n > 0.
  std::uint64_t below(std::uint64_t n);

  /// k distinct indices from [0, n), in draw order (partial Fisher-Yates).
  std::vector<std::size_t> choose(std::size_t n, std::size_t k);

 private:
  std::mt19937_64 engine_;
  std::optional<double> spare_normal_;
};

}  // namespace zoro
