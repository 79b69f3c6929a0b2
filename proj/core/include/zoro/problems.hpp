#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>

#include "zoro/random.hpp"
#include "zoro/types.hpp"

namespace zoro {

/// Monotone count of oracle evaluations; the cost metric for everything here.
class QueryLedger {
 public:
  QueryLedger() = default;
  QueryLedger(const QueryLedger&) = delete;
  QueryLedger& operator=(const QueryLedger&) = delete;

  std::uint64_t count() const noexcept { return count_.load(std::memory_order_relaxed); }

  /// Records one evaluation and returns its zero-based index.
  std::uint64_t record() noexcept { return count_.fetch_add(1, std::memory_order_relaxed); }

 private:
  std::atomic<std::uint64_t> count_{0};
};

enum class NoiseKind { none, uniform_bounded, adversarial_sign };

/// Bounded additive oracle noise. Every draw satisfies |xi| <= bound().
///
/// `uniform_bounded` draws i.i.d. from [-bound, bound].
///
/// `adversarial_sign` is deterministic and tilts finite differences away from
/// descent. A probe q != a gets xi = -bound * sign(<q - a, r>), where a is the
/// current anchor (the base point announced via set_anchor, origin by
/// default) and r is the reference direction (explicit if given, otherwise
/// the anchor itself, otherwise all ones). The anchor itself gets
/// xi = +bound * sign(<u, r>) with u the most recent probe offset, so an
/// estimator that reuses its directions sees differences shifted by 2 bound
/// against r.
class NoiseModel {
 public:
  NoiseModel() = default;

  static NoiseModel none() { return {}; }
  static NoiseModel uniform(double bound, Seed seed);
  static NoiseModel adversarial(double bound, std::optional<Vector> reference = std::nullopt);

  NoiseKind kind() const noexcept { return kind_; }
  double bound() const noexcept { return bound_; }
  Seed seed() const noexcept { return seed_; }

  /// Lets the adversary observe where a sampling round is centred.
  void set_anchor(const Vector& x) { anchor_ = x; }
  void clear_anchor() { anchor_.reset(); }

  double draw(const Vector& query);

 private:
  NoiseModel(NoiseKind kind, double bound, Seed seed);

  NoiseKind kind_ = NoiseKind::none;
  double bound_ = 0.0;
  Seed seed_ = 0;
  Rng rng_{0};
  std::optional<Vector> reference_;
  std::optional<Vector> anchor_;
  std::optional<Vector> last_offset_;
};

std::string to_string(NoiseKind kind);
NoiseKind parse_noise_kind(const std::string& text);

using ObjectiveFn = std::function<double(const Vector&)>;
using GradientFn = std::function<Vector(const Vector&)>;

/// Marks a region of code where exact gradients must not be consulted.
/// Estimators and solver steps open one; ProblemSpec::true_gradient throws
/// inside it. Nesting is allowed; the flag is per thread.
class EstimatorScope {
 public:
  EstimatorScope() noexcept;
  ~EstimatorScope();
  EstimatorScope(const EstimatorScope&) = delete;
  EstimatorScope& operator=(const EstimatorScope&) = delete;

  static bool active() noexcept;
};

struct ProblemMetadata {
  std::string name;
  Index dimension = 0;
  double noise_bound = 0.0;       // sigma
  double hessian_l1_bound = 0.0;  // H: sup_x sum_{j,k} |d^2 f / dx_j dx_k|
  double lipschitz = 1.0;         // L
  std::optional<double> optimum_value;
};

/// Objective plus the smooth-part constants the algorithms need.
///
/// `value` is the noise-free objective and is meant for diagnostics (trace
/// columns, test oracles). Optimizers only see f through `evaluate`.
class ProblemSpec {
 public:
  ProblemSpec(ProblemMetadata meta, ObjectiveFn objective, GradientFn true_gradient = {});

  const std::string& name() const noexcept { return meta_.name; }
  Index dimension() const noexcept { return meta_.dimension; }
  double noise_bound() const noexcept { return meta_.noise_bound; }
  double hessian_l1_bound() const noexcept { return meta_.hessian_l1_bound; }
  double lipschitz() const noexcept { return meta_.lipschitz; }
  const std::optional<double>& optimum_value() const noexcept { return meta_.optimum_value; }
  const ProblemMetadata& metadata() const noexcept { return meta_; }

  ProblemSpec& set_noise_bound(double sigma);
  ProblemSpec& set_optimum_value(std::optional<double> f_star);

  double value(const Vector& x) const;

  bool has_true_gradient() const noexcept { return static_cast<bool>(true_gradient_); }
  Vector true_gradient(const Vector& x) const;

 private:
  void check_dimension(const Vector& x) const;

  ProblemMetadata meta_;
  ObjectiveFn objective_;
  GradientFn true_gradient_;
};

/// E_f(x) = f(x) + xi. Records exactly one ledger entry per call, including
/// calls that end in EvaluationFailure.
double evaluate(const ProblemSpec& problem, QueryLedger& ledger, NoiseModel& noise,
                const Vector& x);

/// Bundles the three pieces of oracle state so estimators take one argument.
class Oracle {
 public:
  Oracle(const ProblemSpec& problem, QueryLedger& ledger, NoiseModel& noise)
      : problem_(problem), ledger_(ledger), noise_(noise) {}

  double operator()(const Vector& x) { return evaluate(problem_, ledger_, noise_, x); }
  void anchor(const Vector& x) { noise_.set_anchor(x); }

  const ProblemSpec& problem() const noexcept { return problem_; }
  Index dimension() const noexcept { return problem_.dimension(); }
  std::uint64_t queries() const noexcept { return ledger_.count(); }
  QueryLedger& ledger() noexcept { return ledger_; }

 private:
  const ProblemSpec& problem_;
  QueryLedger& ledger_;
  NoiseModel& noise_;
};

// Benchmark objectives. All take explicit seeds; none touch global state.

/// f(x) = x'Ax/2 with A diagonal: `sparsity` entries drawn from U[0.1, 1) at
/// seeded positions, the rest zero. f* = 0.
ProblemSpec make_sparse_quadratic(Index dimension, Index sparsity, Seed seed);

/// f(x) = x'Ax/2 with A_ii = exp(-omega * i), i = 1..d.
ProblemSpec make_compressible_quadratic(Index dimension, double omega);

/// f(x) = x'Ax/2 for an arbitrary nonnegative diagonal.
ProblemSpec make_diagonal_quadratic(const Vector& diagonal, std::string name = "diagonal_quadratic");

/// f(x) = c'x. Unbounded below; used for exact-measurement checks.
ProblemSpec make_linear(const Vector& c);

/// Sum of squares of the k largest-magnitude entries (ties: lowest index).
ProblemSpec make_max_k_squared_sum(Index dimension, Index k);

/// f(x) = (x - x*)' Q D Q' (x - x*): x* binary with ceil(density * d) ones,
/// D ~ U[0,1), Q from Householder QR of a Gaussian matrix.
ProblemSpec make_rotated_sparse_quadratic(Index dimension, double density, Seed seed);

/// One-dimensional Huber loss with quadratic core |x| <= m.
ProblemSpec make_huber_demo(double m, double sigma);

/// Top-k magnitude indices of x, ordered by decreasing magnitude then index.
IndexSet top_k_by_magnitude(const Vector& x, Index k);

}  // namespace zoro
