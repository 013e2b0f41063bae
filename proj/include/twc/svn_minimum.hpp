#ifndef TWC_SVN_MINIMUM_HPP
#define TWC_SVN_MINIMUM_HPP

#include "twc/linalg.hpp"
#include "twc/twisted_pair.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace twc {

/// Nearest integer, halves rounded away from zero.
long nearest_integer(double x);

/// Minimum of ||[[u, v]]_alpha||_(p,k) over g-dimensional unitary pairs:
/// 2 k^{1/p} sin(pi |round(g alpha) - g alpha| / g). Requires p >= 2.
/// An empty k in the spec means k = g.
double lambda_min(Index g, double alpha, const NormSpec& spec);

/// sum_j w^{j} |j><j| with w = e^{2 pi i / g}, j = 0..g-1.
DenseMatrix clock_matrix(Index g);
/// |j+1 mod g><j|.
DenseMatrix shift_matrix(Index g);

/// (C, S^m) with m = round(g alpha); its twisted commutator has flat
/// singular values and attains lambda_min in every (p, k) norm with p >= 2.
TwistedPair optimal_pair(Index g, double alpha);

/// theta_j = 2 pi m j / g mod 2 pi for j = 0..g-1, m = round(g alpha).
std::vector<double> optimal_angles(Index g, double alpha);

/// sum_j 4 sin^2((theta_{j+1} - theta_j - 2 pi alpha) / 2) for the cyclic
/// successor j -> j+1 mod g.
double cyclic_objective(const std::vector<double>& angles, double alpha);

struct BruteMinOptions {
  int restarts = 20;
  std::uint64_t seed = 1;
  int max_iterations = 400;
  double initial_step = 0.25;
  double min_step = 1e-12;
  double stall_tolerance = 1e-13;  ///< stop a restart once the relative gain per step is below this
};

struct BruteMinResult {
  double value = 0.0;
  DenseMatrix u;
  DenseMatrix v;
  int best_restart = 0;
  int total_iterations = 0;
  int stalled_restarts = 0;  ///< restarts that hit max_iterations without meeting the stall test
};

/// Called with every accepted iterate (u, v) of every restart.
using PairObserver = std::function<void(const DenseMatrix&, const DenseMatrix&)>;

/// Local minimization of ||[[u, v]]_alpha||_(p,k) over unitary pairs by seeded
/// restarts and descent retracted through the polar decomposition. A
/// one-sided check on lambda_min: the result never lies below it.
BruteMinResult brute_min(Index g, double alpha, const NormSpec& spec,
                         const BruteMinOptions& options = {},
                         const PairObserver& observer = {});

}  // namespace twc

#endif
