#include "twc/approx_eig.hpp"

#include "twc/error.hpp"

#include <algorithm>
#include <cmath>

namespace twc {

ClusterResult cluster(const std::vector<Complex>& eigs, Complex seed, double r, double seed_tol) {
  if (!(r > 0.0)) throw PreconditionError("cluster: radius must be positive");
  const std::size_t n = eigs.size();
  std::vector<char> in(n, 0);
  std::vector<Index> frontier;
  std::size_t best = n;
  double best_dist = kInf;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = std::abs(eigs[i] - seed);
    if (d < best_dist) {
      best_dist = d;
      best = i;
    }
    if (d <= seed_tol) {
      in[i] = 1;
      frontier.push_back(static_cast<Index>(i));
    }
  }
  if (frontier.empty()) {
    throw PreconditionError("cluster: seed is not an eigenvalue (nearest at distance " +
                            std::to_string(best_dist) + ")");
  }
  while (!frontier.empty()) {
    std::vector<Index> next;
    for (Index j : frontier) {
      for (std::size_t i = 0; i < n; ++i) {
        if (!in[i] && std::abs(eigs[i] - eigs[static_cast<std::size_t>(j)]) <= r) {
          in[i] = 1;
          next.push_back(static_cast<Index>(i));
        }
      }
    }
    frontier = std::move(next);
  }

  ClusterResult out;
  out.radius = r;
  out.seed_index = static_cast<Index>(best);
  out.spread_bound = static_cast<double>(n) * r;
  const Complex anchor = eigs[best];
  for (std::size_t i = 0; i < n; ++i) {
    if (!in[i]) continue;
    out.indices.push_back(static_cast<Index>(i));
    out.spread = std::max(out.spread, std::abs(eigs[i] - anchor));
    for (std::size_t j = 0; j < n; ++j) {
      if (!in[j]) out.separation = std::min(out.separation, std::abs(eigs[i] - eigs[j]));
    }
  }
  return out;
}

namespace {

SharedEigenResult shared_eigenvector(const DenseMatrix& a, const DenseMatrix& b, Complex seed,
                                     bool b_normal, const Tolerances& tol) {
  require_square(a, "shared_approx_eigenvector");
  require_same_shape(a, b, "shared_approx_eigenvector");
  require_finite(b, "shared_approx_eigenvector");
  const auto eig_a = eig_normal(a, tol);
  const Index n = a.rows();
  const auto nd = static_cast<double>(n);

  double scale = 1.0;
  for (const auto& l : eig_a.eigenvalues) scale = std::max(scale, std::abs(l));
  const double match_tol = 1e-12 * scale;

  SharedEigenResult out;
  out.epsilon = operator_norm(commutator(a, b));
  const double r_nominal = b_normal ? std::sqrt(out.epsilon) : std::sqrt(out.epsilon / 2.0);
  // For eps = 0 only exactly degenerate eigenvalues are merged.
  out.radius = std::max(r_nominal, match_tol);
  out.cluster = cluster(eig_a.eigenvalues, seed, out.radius, match_tol);
  out.lambda = eig_a.eigenvalues[static_cast<std::size_t>(out.cluster.seed_index)];

  const auto& idx = out.cluster.indices;
  const auto m = static_cast<Index>(idx.size());
  DenseMatrix v_basis(n, m);
  DenseMatrix v_rest(n, n - m);
  for (Index c = 0, in_pos = 0, out_pos = 0; c < n; ++c) {
    if (in_pos < m && idx[static_cast<std::size_t>(in_pos)] == c) {
      v_basis.col(in_pos++) = eig_a.eigenvectors.col(c);
    } else {
      v_rest.col(out_pos++) = eig_a.eigenvectors.col(c);
    }
  }

  const DenseMatrix a_v = v_basis.adjoint() * a * v_basis;
  out.a_block_deviation = operator_norm(a_v - out.lambda * identity(m));
  out.a_block_bound = nd * out.radius;
  const DenseMatrix b_vv = v_basis.adjoint() * b * v_basis;
  if (n > m) {
    out.b_offdiag = operator_norm(v_rest.adjoint() * b * v_basis);
    out.b_offdiag_instance_bound = out.epsilon *
                                   std::sqrt(static_cast<double>(m) * static_cast<double>(n - m)) /
                                   out.cluster.separation;
  }
  out.b_offdiag_bound = nd * out.epsilon / (2.0 * out.radius);

  // Eigenvector of B_VV whose eigenvalue is farthest from the rest of spec(B_VV).
  const auto block = eig_general(b_vv, true);
  std::size_t pick = 0;
  double pick_gap = -1.0;
  for (std::size_t i = 0; i < block.eigenvalues.size(); ++i) {
    double gap = kInf;
    for (std::size_t j = 0; j < block.eigenvalues.size(); ++j) {
      if (j != i) gap = std::min(gap, std::abs(block.eigenvalues[i] - block.eigenvalues[j]));
    }
    if (gap > pick_gap) {
      pick_gap = gap;
      pick = i;
    }
  }
  out.mu_block = block.eigenvalues[pick];
  out.block_eig_residual = block.residuals[pick];
  out.vector = v_basis * block.eigenvectors.col(static_cast<Index>(pick));
  out.vector.normalize();

  out.mu = out.mu_block;
  if (b_normal) {
    const auto eig_b = eig_normal(b, tol);
    double nearest = kInf;
    for (const auto& nu : eig_b.eigenvalues) {
      if (std::abs(nu - out.mu_block) < nearest) {
        nearest = std::abs(nu - out.mu_block);
        out.mu = nu;
      }
    }
    out.bound = std::max(nd * out.radius, nd * out.epsilon / out.radius);
  } else {
    out.bound = std::max(nd * out.radius, nd * out.epsilon / (2.0 * out.radius));
  }
  out.residual_a = (a * out.vector - out.lambda * out.vector).norm();
  out.residual_b = (b * out.vector - out.mu * out.vector).norm();

  const double slack = 1e-9 * std::max(1.0, operator_norm(b)) + out.block_eig_residual;
  if (out.residual_a > out.bound + slack || out.residual_b > out.bound + slack) {
    throw NumericalError("shared_approx_eigenvector: residuals (" +
                         std::to_string(out.residual_a) + ", " + std::to_string(out.residual_b) +
                         ") exceed the bound " + std::to_string(out.bound));
  }
  return out;
}

}  // namespace

SharedEigenResult shared_approx_eigenvector(const DenseMatrix& a, const DenseMatrix& b,
                                            Complex seed, const Tolerances& tol) {
  return shared_eigenvector(a, b, seed, false, tol);
}

SharedEigenResult shared_approx_eigenvector_normal(const DenseMatrix& a, const DenseMatrix& b,
                                                   Complex seed, const Tolerances& tol) {
  return shared_eigenvector(a, b, seed, true, tol);
}

}  // namespace twc
