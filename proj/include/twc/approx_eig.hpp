#ifndef TWC_APPROX_EIG_HPP
#define TWC_APPROX_EIG_HPP

#include "twc/linalg.hpp"

#include <vector>

namespace twc {

/// Eigenvalues linked to a seed eigenvalue by chains of steps of length <= r.
struct ClusterResult {
  std::vector<Index> indices;   ///< ascending
  Index seed_index = 0;         ///< the matched element of the spectrum
  double radius = 0.0;
  double spread = 0.0;          ///< max_{i in I} |l_i - l_seed|
  double spread_bound = 0.0;    ///< n r
  double separation = kInf;     ///< min_{i in I, j not in I} |l_i - l_j|
};

/// Fixed point of I_k = {i : exists j in I_{k-1}, |l_i - l_j| <= r}, starting
/// from every index whose eigenvalue matches `seed` within `seed_tol`.
ClusterResult cluster(const std::vector<Complex>& eigs, Complex seed, double r,
                      double seed_tol = 1e-12);

struct SharedEigenResult {
  DenseVector vector;
  Complex lambda;            ///< eigenvalue of A
  Complex mu;                ///< approximate eigenvalue of B (an exact one in the normal variant)
  Complex mu_block;          ///< eigenvalue of B_VV before any snapping
  double residual_a = 0.0;   ///< ||A x - lambda x||
  double residual_b = 0.0;   ///< ||B x - mu x||
  double bound = 0.0;        ///< n sqrt(eps/2), or n sqrt(eps) for the normal variant
  double epsilon = 0.0;      ///< ||[A, B]|| in the operator norm
  double radius = 0.0;
  ClusterResult cluster;
  double a_block_deviation = 0.0;        ///< ||A_V - lambda I||
  double a_block_bound = 0.0;            ///< n r
  double b_offdiag = 0.0;                ///< ||B_{V'V}||, V' the complement of V
  double b_offdiag_bound = 0.0;          ///< n eps / (2 r)
  double b_offdiag_instance_bound = 0.0; ///< eps sqrt(dim V dim V') / separation
  double block_eig_residual = 0.0;       ///< residual of the chosen eigenpair of B_VV
};

/// A normal; returns x, mu with both residuals <= n sqrt(eps/2).
SharedEigenResult shared_approx_eigenvector(const DenseMatrix& a, const DenseMatrix& b,
                                            Complex seed,
                                            const Tolerances& tol = default_tolerances());

/// A and B normal; mu is an exact eigenvalue of B and both residuals are
/// <= n sqrt(eps).
SharedEigenResult shared_approx_eigenvector_normal(const DenseMatrix& a, const DenseMatrix& b,
                                                   Complex seed,
                                                   const Tolerances& tol = default_tolerances());

}  // namespace twc

#endif
