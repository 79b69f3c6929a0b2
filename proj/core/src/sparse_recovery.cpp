#include "zoro/sparse_recovery.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "zoro/log.hpp"

namespace zoro {

namespace {

/// The `count` largest |values[i]| for i in `candidates`; ties to the lower index.
IndexSet largest_on(const Vector& values, IndexSet candidates, Index count) {
  const auto keep = static_cast<std::size_t>(std::min<Index>(count, static_cast<Index>(candidates.size())));
  std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(keep),
                    candidates.end(), [&values](Index a, Index b) {
                      const double ma = std::abs(values[a]);
                      const double mb = std::abs(values[b]);
                      return ma > mb || (ma == mb && a < b);
                    });
  candidates.resize(keep);
  std::sort(candidates.begin(), candidates.end());
  return candidates;
}

IndexSet all_indices(Index n) {
  IndexSet out(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = i;
  return out;
}

IndexSet merge_sorted(const IndexSet& a, const IndexSet& b) {
  IndexSet out;
  out.reserve(a.size() + b.size());
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

}  // namespace

Vector restricted_least_squares(const Matrix& Z, const Vector& y, std::span<const Index> support) {
  if (support.empty()) throw ContractViolation("restricted least squares needs a nonempty support");
  if (Z.rows() != y.size()) throw ContractViolation("Z and y disagree on the number of rows");
  Matrix columns(Z.rows(), static_cast<Index>(support.size()));
  for (std::size_t k = 0; k < support.size(); ++k) {
    const Index j = support[k];
    if (j < 0 || j >= Z.cols()) {
      throw ContractViolation("support index " + std::to_string(j) + " out of range");
    }
    columns.col(static_cast<Index>(k)) = Z.col(j);
  }
  const Eigen::CompleteOrthogonalDecomposition<Matrix> cod(columns);
  const Vector coeffs = cod.solve(y);
  Vector out = Vector::Zero(Z.cols());
  for (std::size_t k = 0; k < support.size(); ++k) out[support[k]] = coeffs[static_cast<Index>(k)];
  return out;
}

SparseSolution cosamp(const Matrix& Z, const Vector& y, const CosampConfig& cfg) {
  const Index d = Z.cols();
  const Index s = cfg.sparsity;
  if (Z.rows() < 1) throw ContractViolation("CoSaMP needs at least one measurement");
  if (Z.rows() != y.size()) throw ContractViolation("Z and y disagree on the number of rows");
  if (s < 1 || s > d) {
    throw ContractViolation("CoSaMP sparsity must lie in [1, d], got " + std::to_string(s));
  }
  if (cfg.max_iterations < 1) throw ContractViolation("CoSaMP needs max_iterations >= 1");
  if (!Z.allFinite() || !y.allFinite()) throw ContractViolation("CoSaMP input is not finite");
  if (s > Z.rows()) {
    warn("CoSaMP sparsity " + std::to_string(s) + " exceeds measurement count " +
         std::to_string(Z.rows()) + "; recovery is not guaranteed");
  }

  SparseSolution sol;
  sol.values = Vector::Zero(d);
  if (cfg.init) {
    if (cfg.init->size() != d) throw ContractViolation("CoSaMP warm start has wrong dimension");
    IndexSet nonzero;
    for (Index i = 0; i < d; ++i) {
      if ((*cfg.init)[i] != 0.0) nonzero.push_back(i);
    }
    sol.support = largest_on(*cfg.init, nonzero, s);
    for (Index i : sol.support) sol.values[i] = (*cfg.init)[i];
  }

  Vector residual = y - Z * sol.values;
  double residual_norm = residual.norm();
  const double floor = 1e-14 * std::max(y.norm(), std::numeric_limits<double>::min());
  const Index proxy_count = std::min<Index>(2 * s, d);

  for (int it = 0; it < cfg.max_iterations && residual_norm > floor; ++it) {
    const Vector proxy = Z.transpose() * residual;
    if (proxy.lpNorm<Eigen::Infinity>() == 0.0) break;

    const IndexSet omega = largest_on(proxy, all_indices(d), proxy_count);
    const IndexSet merged = merge_sorted(omega, sol.support);
    const Vector b = restricted_least_squares(Z, y, merged);
    const IndexSet pruned = largest_on(b, merged, s);

    Vector candidate = Vector::Zero(d);
    for (Index i : pruned) candidate[i] = b[i];
    Vector candidate_residual = y - Z * candidate;
    const double candidate_norm = candidate_residual.norm();
    if (candidate_norm > residual_norm) break;

    const double improvement = (residual_norm - candidate_norm) / residual_norm;
    sol.values = std::move(candidate);
    sol.support = pruned;
    residual = std::move(candidate_residual);
    residual_norm = candidate_norm;
    ++sol.iterations_used;
    if (improvement < cfg.halting_tol) break;
  }

  sol.residual_norm = (Z * sol.values - y).norm();
  return sol;
}

}  // namespace zoro
