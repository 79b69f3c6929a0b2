#include "zoro/regularizers.hpp"

#include <cmath>
#include <limits>

namespace zoro {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

Regularizer Regularizer::box(Vector lower, Vector upper) {
  if (lower.size() != upper.size()) throw InvalidSpec("box bounds differ in length");
  for (Index i = 0; i < lower.size(); ++i) {
    if (lower[i] > upper[i]) {
      throw InvalidSpec("box lower bound exceeds upper bound at index " + std::to_string(i));
    }
  }
  return Regularizer(Box{std::move(lower), std::move(upper)});
}

Regularizer Regularizer::l1(double lambda) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw InvalidSpec("l1 weight must be >= 0");
  return Regularizer(L1{lambda});
}

Regularizer Regularizer::custom(std::function<Vector(const Vector&, double)> prox,
                                std::function<double(const Vector&)> value, std::string name) {
  if (!prox) throw InvalidSpec("custom regularizer needs a proximal map");
  return Regularizer(Custom{std::move(prox), std::move(value), std::move(name)});
}

Vector Regularizer::prox(const Vector& v, double alpha) const {
  if (!(alpha > 0.0)) throw ContractViolation("prox step alpha must be positive");
  return std::visit(
      overloaded{
          [&](const Zero&) -> Vector { return v; },
          [&](const NonNegative&) -> Vector { return v.cwiseMax(0.0); },
          [&](const Box& b) -> Vector {
            if (b.lower.size() != v.size()) throw ContractViolation("box prox dimension mismatch");
            return v.cwiseMax(b.lower).cwiseMin(b.upper);
          },
          [&](const L1& l) -> Vector {
            const double t = alpha * l.lambda;
            return v.unaryExpr([t](double a) {
              const double shrunk = std::abs(a) - t;
              return shrunk > 0.0 ? std::copysign(shrunk, a) : 0.0;
            });
          },
          [&](const Custom& c) -> Vector { return c.prox(v, alpha); },
      },
      kind_);
}

double Regularizer::value(const Vector& x) const {
  constexpr double inf = std::numeric_limits<double>::infinity();
  return std::visit(
      overloaded{
          [](const Zero&) { return 0.0; },
          [&](const NonNegative&) { return (x.array() >= 0.0).all() ? 0.0 : inf; },
          [&](const Box& b) {
            return (x.array() >= b.lower.array()).all() && (x.array() <= b.upper.array()).all()
                       ? 0.0
                       : inf;
          },
          [&](const L1& l) { return l.lambda * x.lpNorm<1>(); },
          [&](const Custom& c) { return c.value ? c.value(x) : 0.0; },
      },
      kind_);
}

std::string Regularizer::name() const {
  return std::visit(overloaded{
                        [](const Zero&) { return std::string("zero"); },
                        [](const NonNegative&) { return std::string("nonneg"); },
                        [](const Box&) { return std::string("box"); },
                        [](const L1&) { return std::string("l1"); },
                        [](const Custom& c) { return c.name; },
                    },
                    kind_);
}

}  // namespace zoro
