#ifndef TWC_TWISTED_PAIR_HPP
#define TWC_TWISTED_PAIR_HPP

#include "twc/linalg.hpp"

namespace twc {

/// Two unitaries with twisting parameter alpha and the measured operator-norm
/// value delta = ||u v - eta v u||, eta = e^{2 pi i alpha}.
struct TwistedPair {
  DenseMatrix u;
  DenseMatrix v;
  double alpha = 0.0;
  Complex eta{1.0, 0.0};
  double delta = 0.0;

  [[nodiscard]] Index dim() const { return u.rows(); }
};

/// Validates unitarity and measures delta. alpha must lie in [0, 1).
TwistedPair make_twisted_pair(const DenseMatrix& u, const DenseMatrix& v, double alpha,
                              const Tolerances& tol = default_tolerances());

/// Recomputes delta and compares it with the stored value.
bool pair_consistent(const TwistedPair& pair, double tol = 1e-10);

}  // namespace twc

#endif
