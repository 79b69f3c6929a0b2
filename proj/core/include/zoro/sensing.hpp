#pragma once

#include "zoro/problems.hpp"
#include "zoro/random.hpp"
#include "zoro/types.hpp"

namespace zoro {

/// Rademacher sensing directions, one per row, entries exactly +1 or -1.
///
/// Rows are generated in blocks; block b is drawn from derive_seed(seed, b),
/// so a set regenerated from the same seed and the same sequence of
/// `extend` calls is bit-identical.
class DirectionSet {
 public:
  DirectionSet() = default;
  DirectionSet(Index rows, Index dimension, Seed seed);

  Index rows() const noexcept { return directions_.rows(); }
  Index dimension() const noexcept { return directions_.cols(); }
  Seed seed() const noexcept { return seed_; }
  const Matrix& matrix() const noexcept { return directions_; }
  auto row(Index i) const { return directions_.row(i); }

  /// Appends `count` fresh rows from the next block stream.
  void extend(Index count);

 private:
  void fill(Index first_row, Index count);

  Matrix directions_;
  Seed seed_ = 0;
  std::uint64_t blocks_ = 0;
};

DirectionSet rademacher_directions(Index rows, Index dimension, Seed seed);

/// Normalized measurement system y ~ Z g.
struct MeasurementSet {
  Vector y;  // raw differences / sqrt(m)
  Matrix Z;  // directions / sqrt(m); each row has norm sqrt(d/m)
  double delta = 0.0;
  std::uint64_t queries_used = 0;
};

/// Forward differences (E(x + delta z_i) - base) / delta for rows
/// [first, first + count). Makes exactly `count` oracle calls. Every
/// difference shares the caller's base evaluation.
Vector sample_differences(Oracle& oracle, const Vector& x, double base, double delta,
                          const DirectionSet& dirs, Index first, Index count);

/// One base evaluation plus one query per direction: m + 1 oracle calls.
Vector sample_raw(Oracle& oracle, const Vector& x, double delta, const DirectionSet& dirs);

MeasurementSet assemble(const Vector& y_raw, const DirectionSet& dirs, double delta);

}  // namespace zoro
