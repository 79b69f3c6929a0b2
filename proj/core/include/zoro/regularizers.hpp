#pragma once

#include <functional>
#include <string>
#include <variant>

#include "zoro/types.hpp"

namespace zoro {

/// Separable convex regularizers with closed-form proximal maps, plus an
/// escape hatch for user-supplied ones.
class Regularizer {
 public:
  struct Zero {};
  struct NonNegative {};
  struct Box {
    Vector lower;
    Vector upper;
  };
  struct L1 {
    double lambda = 0.0;
  };
  struct Custom {
    std::function<Vector(const Vector&, double)> prox;
    std::function<double(const Vector&)> value;
    std::string name = "custom";
  };

  Regularizer() = default;

  static Regularizer zero() { return Regularizer(Zero{}); }
  static Regularizer nonneg() { return Regularizer(NonNegative{}); }
  /// Throws InvalidSpec if lower > upper anywhere or sizes differ.
  static Regularizer box(Vector lower, Vector upper);
  /// Throws InvalidSpec if lambda < 0.
  static Regularizer l1(double lambda);
  static Regularizer custom(std::function<Vector(const Vector&, double)> prox,
                            std::function<double(const Vector&)> value, std::string name = "custom");

  /// prox_{alpha r}(v) = argmin_w 0.5 ||w - v||^2 + alpha r(w).
  Vector prox(const Vector& v, double alpha) const;

  /// r(x); +inf outside the feasible set of indicator regularizers.
  double value(const Vector& x) const;

  std::string name() const;

 private:
  using Kind = std::variant<Zero, NonNegative, Box, L1, Custom>;
  explicit Regularizer(Kind kind) : kind_(std::move(kind)) {}

  Kind kind_ = Zero{};
};

inline Vector prox(const Regularizer& reg, const Vector& v, double alpha) {
  return reg.prox(v, alpha);
}

}  // namespace zoro
