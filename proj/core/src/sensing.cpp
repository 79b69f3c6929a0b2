#include "zoro/sensing.hpp"

#include <cmath>
#include <string>

namespace zoro {

DirectionSet::DirectionSet(Index rows, Index dimension, Seed seed) : seed_(seed) {
  if (rows < 1 || dimension < 1) {
    throw ContractViolation("direction set needs m >= 1 and d >= 1");
  }
  directions_.resize(rows, dimension);
  fill(0, rows);
}

void DirectionSet::fill(Index first_row, Index count) {
  Rng rng(derive_seed(seed_, blocks_++));
  for (Index i = first_row; i < first_row + count; ++i) {
    for (Index j = 0; j < directions_.cols(); ++j) {
      directions_(i, j) = static_cast<double>(rng.sign());
    }
  }
}

void DirectionSet::extend(Index count) {
  if (count < 0) throw ContractViolation("cannot extend a direction set by a negative count");
  if (count == 0) return;
  const Index old_rows = directions_.rows();
  directions_.conservativeResize(old_rows + count, Eigen::NoChange);
  fill(old_rows, count);
}

DirectionSet rademacher_directions(Index rows, Index dimension, Seed seed) {
  return DirectionSet(rows, dimension, seed);
}

Vector sample_differences(Oracle& oracle, const Vector& x, double base, double delta,
                          const DirectionSet& dirs, Index first, Index count) {
  if (!(delta > 0.0)) throw ContractViolation("sampling radius must be positive");
  if (x.size() != dirs.dimension()) {
    throw ContractViolation("direction dimension " + std::to_string(dirs.dimension()) +
                            " does not match point dimension " + std::to_string(x.size()));
  }
  if (first < 0 || count < 0 || first + count > dirs.rows()) {
    throw ContractViolation("direction rows out of range");
  }
  Vector y(count);
  Vector probe(x.size());
  for (Index i = 0; i < count; ++i) {
    probe = x + delta * dirs.row(first + i).transpose();
    y[i] = (oracle(probe) - base) / delta;
  }
  return y;
}

Vector sample_raw(Oracle& oracle, const Vector& x, double delta, const DirectionSet& dirs) {
  if (!(delta > 0.0)) throw ContractViolation("sampling radius must be positive");
  if (x.size() != dirs.dimension()) {
    throw ContractViolation("direction dimension does not match point dimension");
  }
  oracle.anchor(x);
  const double base = oracle(x);
  return sample_differences(oracle, x, base, delta, dirs, 0, dirs.rows());
}

MeasurementSet assemble(const Vector& y_raw, const DirectionSet& dirs, double delta) {
  if (y_raw.size() != dirs.rows()) {
    throw ContractViolation("measurement count does not match direction count");
  }
  const double scale = 1.0 / std::sqrt(static_cast<double>(dirs.rows()));
  MeasurementSet out;
  out.y = scale * y_raw;
  out.Z = scale * dirs.matrix();
  out.delta = delta;
  return out;
}

}  // namespace zoro
