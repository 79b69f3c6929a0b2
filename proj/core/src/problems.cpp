#include "zoro/problems.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>

namespace zoro {

namespace {

thread_local int estimator_scope_depth = 0;

void require(bool condition, const std::string& message) {
  if (!condition) throw InvalidSpec(message);
}

}  // namespace

// --- NoiseModel ------------------------------------------------------------

NoiseModel::NoiseModel(NoiseKind kind, double bound, Seed seed)
    : kind_(kind), bound_(bound), seed_(seed), rng_(seed) {
  if (!(bound >= 0.0) || !std::isfinite(bound)) {
    throw InvalidSpec("noise bound must be finite and nonnegative");
  }
}

NoiseModel NoiseModel::uniform(double bound, Seed seed) {
  return NoiseModel(NoiseKind::uniform_bounded, bound, seed);
}

NoiseModel NoiseModel::adversarial(double bound, std::optional<Vector> reference) {
  NoiseModel model(NoiseKind::adversarial_sign, bound, 0);
  model.reference_ = std::move(reference);
  return model;
}

double NoiseModel::draw(const Vector& query) {
  switch (kind_) {
    case NoiseKind::none:
      return 0.0;
    case NoiseKind::uniform_bounded:
      return rng_.uniform(-bound_, bound_);
    case NoiseKind::adversarial_sign: {
      const Vector anchor = anchor_ ? *anchor_ : Vector::Zero(query.size());
      if (anchor.size() != query.size()) {
        throw ContractViolation("adversarial noise: anchor dimension does not match query");
      }
      Vector direction;
      if (reference_) {
        direction = *reference_;
      } else if (anchor.lpNorm<Eigen::Infinity>() > 0.0) {
        direction = anchor;
      } else {
        direction = Vector::Ones(query.size());
      }
      auto sign_of = [](double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); };
      const Vector offset = query - anchor;
      if (offset.lpNorm<Eigen::Infinity>() == 0.0) {
        // Base point: bias against the probe direction seen last round.
        return last_offset_ && last_offset_->size() == direction.size()
                   ? bound_ * sign_of(last_offset_->dot(direction))
                   : 0.0;
      }
      last_offset_ = offset;
      return -bound_ * sign_of(offset.dot(direction));
    }
  }
  return 0.0;
}

std::string to_string(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::none:
      return "none";
    case NoiseKind::uniform_bounded:
      return "uniform_bounded";
    case NoiseKind::adversarial_sign:
      return "adversarial_sign";
  }
  return "unknown";
}

NoiseKind parse_noise_kind(const std::string& text) {
  if (text == "none") return NoiseKind::none;
  if (text == "uniform_bounded" || text == "uniform") return NoiseKind::uniform_bounded;
  if (text == "adversarial_sign" || text == "adversarial") return NoiseKind::adversarial_sign;
  throw InvalidSpec("unknown noise kind '" + text + "'");
}

// --- EstimatorScope --------------------------------------------------------

EstimatorScope::EstimatorScope() noexcept { ++estimator_scope_depth; }
EstimatorScope::~EstimatorScope() { --estimator_scope_depth; }
bool EstimatorScope::active() noexcept { return estimator_scope_depth > 0; }

// --- ProblemSpec -----------------------------------------------------------

ProblemSpec::ProblemSpec(ProblemMetadata meta, ObjectiveFn objective, GradientFn true_gradient)
    : meta_(std::move(meta)),
      objective_(std::move(objective)),
      true_gradient_(std::move(true_gradient)) {
  require(meta_.dimension >= 1, "problem dimension must be >= 1");
  require(meta_.noise_bound >= 0.0, "noise bound must be >= 0");
  require(meta_.hessian_l1_bound >= 0.0, "Hessian l1 bound must be >= 0");
  require(meta_.lipschitz > 0.0, "Lipschitz constant must be > 0");
  require(static_cast<bool>(objective_), "problem needs an objective");
}

ProblemSpec& ProblemSpec::set_noise_bound(double sigma) {
  require(sigma >= 0.0 && std::isfinite(sigma), "noise bound must be >= 0");
  meta_.noise_bound = sigma;
  return *this;
}

ProblemSpec& ProblemSpec::set_optimum_value(std::optional<double> f_star) {
  meta_.optimum_value = f_star;
  return *this;
}

void ProblemSpec::check_dimension(const Vector& x) const {
  if (x.size() != meta_.dimension) {
    throw ContractViolation(meta_.name + ": point has dimension " + std::to_string(x.size()) +
                            ", expected " + std::to_string(meta_.dimension));
  }
}

double ProblemSpec::value(const Vector& x) const {
  check_dimension(x);
  return objective_(x);
}

Vector ProblemSpec::true_gradient(const Vector& x) const {
  if (!true_gradient_) throw ContractViolation(meta_.name + " has no exact gradient");
  if (EstimatorScope::active()) {
    throw ContractViolation("exact gradient requested inside an estimator or solver step");
  }
  check_dimension(x);
  return true_gradient_(x);
}

double evaluate(const ProblemSpec& problem, QueryLedger& ledger, NoiseModel& noise,
                const Vector& x) {
  if (x.size() != problem.dimension()) {
    throw ContractViolation(problem.name() + ": query has dimension " + std::to_string(x.size()) +
                            ", expected " + std::to_string(problem.dimension()));
  }
  if (noise.bound() > problem.noise_bound()) {
    throw ContractViolation(problem.name() + ": noise model bound exceeds the problem's sigma");
  }
  const std::uint64_t index = ledger.record();
  const double fx = problem.value(x);
  if (!std::isfinite(fx)) {
    throw EvaluationFailure(problem.name() + ": non-finite objective at query " +
                                std::to_string(index),
                            index);
  }
  return fx + noise.draw(x);
}

// --- factories -------------------------------------------------------------

IndexSet top_k_by_magnitude(const Vector& x, Index k) {
  IndexSet order(static_cast<std::size_t>(x.size()));
  std::iota(order.begin(), order.end(), Index{0});
  const auto count = static_cast<std::size_t>(std::clamp<Index>(k, 0, x.size()));
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(count), order.end(),
                    [&x](Index a, Index b) {
                      const double ma = std::abs(x[a]);
                      const double mb = std::abs(x[b]);
                      return ma > mb || (ma == mb && a < b);
                    });
  order.resize(count);
  return order;
}

ProblemSpec make_diagonal_quadratic(const Vector& diagonal, std::string name) {
  require(diagonal.size() >= 1, "diagonal quadratic needs dimension >= 1");
  require((diagonal.array() >= 0.0).all(), "diagonal quadratic needs a nonnegative diagonal");
  ProblemMetadata meta;
  meta.name = std::move(name);
  meta.dimension = diagonal.size();
  meta.lipschitz = std::max(diagonal.maxCoeff(), std::numeric_limits<double>::min());
  meta.hessian_l1_bound = diagonal.sum();
  meta.optimum_value = 0.0;
  auto a = std::make_shared<const Vector>(diagonal);
  return ProblemSpec(
      std::move(meta),
      [a](const Vector& x) { return 0.5 * x.dot(a->cwiseProduct(x)); },
      [a](const Vector& x) -> Vector { return a->cwiseProduct(x); });
}

ProblemSpec make_sparse_quadratic(Index dimension, Index sparsity, Seed seed) {
  require(dimension >= 1, "sparse quadratic needs d >= 1");
  require(sparsity >= 1 && sparsity <= dimension, "sparse quadratic needs 1 <= s <= d");
  Rng rng(seed);
  Vector diagonal = Vector::Zero(dimension);
  for (std::size_t position : rng.choose(static_cast<std::size_t>(dimension),
                                         static_cast<std::size_t>(sparsity))) {
    diagonal[static_cast<Index>(position)] = rng.uniform(0.1, 1.0);
  }
  return make_diagonal_quadratic(diagonal, "sparse_quadratic");
}

ProblemSpec make_compressible_quadratic(Index dimension, double omega) {
  require(dimension >= 1, "compressible quadratic needs d >= 1");
  require(omega > 0.0 && std::isfinite(omega), "compressible quadratic needs omega > 0");
  Vector diagonal(dimension);
  for (Index i = 0; i < dimension; ++i) {
    diagonal[i] = std::exp(-omega * static_cast<double>(i + 1));
  }
  return make_diagonal_quadratic(diagonal, "compressible_quadratic");
}

ProblemSpec make_linear(const Vector& c) {
  require(c.size() >= 1, "linear objective needs dimension >= 1");
  ProblemMetadata meta;
  meta.name = "linear";
  meta.dimension = c.size();
  meta.lipschitz = 1.0;
  meta.hessian_l1_bound = 0.0;
  auto coeffs = std::make_shared<const Vector>(c);
  return ProblemSpec(
      std::move(meta), [coeffs](const Vector& x) { return coeffs->dot(x); },
      [coeffs](const Vector&) -> Vector { return *coeffs; });
}

ProblemSpec make_max_k_squared_sum(Index dimension, Index k) {
  require(dimension >= 1, "max-k-squared-sum needs d >= 1");
  require(k >= 1 && k <= dimension, "max-k-squared-sum needs 1 <= k <= d");
  ProblemMetadata meta;
  meta.name = "max_k_squared_sum";
  meta.dimension = dimension;
  meta.lipschitz = 2.0;
  meta.hessian_l1_bound = 2.0 * static_cast<double>(k);
  meta.optimum_value = 0.0;
  return ProblemSpec(
      std::move(meta),
      [k](const Vector& x) {
        double total = 0.0;
        for (Index i : top_k_by_magnitude(x, k)) total += x[i] * x[i];
        return total;
      },
      [k](const Vector& x) -> Vector {
        Vector g = Vector::Zero(x.size());
        for (Index i : top_k_by_magnitude(x, k)) g[i] = 2.0 * x[i];
        return g;
      });
}

ProblemSpec make_rotated_sparse_quadratic(Index dimension, double density, Seed seed) {
  require(dimension >= 1, "rotated quadratic needs d >= 1");
  require(density > 0.0 && density <= 1.0, "rotated quadratic needs density in (0, 1]");
  Rng rng(seed);

  const auto ones = static_cast<Index>(std::ceil(density * static_cast<double>(dimension)));
  auto minimizer = std::make_shared<Vector>(Vector::Zero(dimension));
  for (std::size_t position : rng.choose(static_cast<std::size_t>(dimension),
                                         static_cast<std::size_t>(ones))) {
    (*minimizer)[static_cast<Index>(position)] = 1.0;
  }

  Vector spectrum(dimension);
  for (Index i = 0; i < dimension; ++i) spectrum[i] = rng.uniform();

  Matrix gaussian(dimension, dimension);
  for (Index j = 0; j < dimension; ++j) {
    for (Index i = 0; i < dimension; ++i) gaussian(i, j) = rng.normal();
  }
  const Matrix q = Eigen::HouseholderQR<Matrix>(gaussian).householderQ();
  auto hessian_half = std::make_shared<Matrix>(q * spectrum.asDiagonal() * q.transpose());
  // Symmetrize away rounding so x'Mx is exactly a quadratic form of a symmetric M.
  *hessian_half = 0.5 * (*hessian_half + hessian_half->transpose()).eval();

  ProblemMetadata meta;
  meta.name = "rotated_sparse_quadratic";
  meta.dimension = dimension;
  meta.lipschitz = std::max(2.0 * spectrum.maxCoeff(), std::numeric_limits<double>::min());
  meta.hessian_l1_bound = 2.0 * hessian_half->cwiseAbs().sum();
  meta.optimum_value = 0.0;
  std::shared_ptr<const Vector> xs = minimizer;
  std::shared_ptr<const Matrix> m = hessian_half;
  return ProblemSpec(
      std::move(meta),
      [xs, m](const Vector& x) {
        const Vector e = x - *xs;
        return e.dot(*m * e);
      },
      [xs, m](const Vector& x) -> Vector { return 2.0 * (*m * (x - *xs)); });
}

ProblemSpec make_huber_demo(double m, double sigma) {
  require(m > 0.0 && std::isfinite(m), "Huber demo needs m > 0");
  require(sigma >= 0.0 && std::isfinite(sigma), "Huber demo needs sigma >= 0");
  ProblemMetadata meta;
  meta.name = "huber";
  meta.dimension = 1;
  meta.noise_bound = sigma;
  meta.lipschitz = 1.0;
  meta.hessian_l1_bound = 1.0;
  meta.optimum_value = 0.0;
  return ProblemSpec(
      std::move(meta),
      [m](const Vector& x) {
        const double a = std::abs(x[0]);
        return a <= m ? 0.5 * a * a : m * (a - 0.5 * m);
      },
      [m](const Vector& x) -> Vector { return Vector::Constant(1, std::clamp(x[0], -m, m)); });
}

}  // namespace zoro
