#include "twc/twisted_pair.hpp"

#include "twc/error.hpp"

#include <cmath>

namespace twc {

TwistedPair make_twisted_pair(const DenseMatrix& u, const DenseMatrix& v, double alpha,
                              const Tolerances& tol) {
  require_square(u, "twisted pair");
  require_same_shape(u, v, "twisted pair");
  if (!(alpha >= 0.0 && alpha < 1.0)) {
    throw PreconditionError("twisted pair: alpha must lie in [0, 1), got " + std::to_string(alpha));
  }
  if (!is_unitary(u, tol.unitarity) || !is_unitary(v, tol.unitarity)) {
    throw PreconditionError("twisted pair: operators must be unitary");
  }
  TwistedPair pair;
  pair.u = u;
  pair.v = v;
  pair.alpha = alpha;
  pair.eta = twist_phase(alpha);
  pair.delta = operator_norm(twisted_commutator(u, v, alpha));
  return pair;
}

bool pair_consistent(const TwistedPair& pair, double tol) {
  const double delta = operator_norm(twisted_commutator(pair.u, pair.v, pair.alpha));
  return std::abs(delta - pair.delta) <= tol &&
         std::abs(pair.eta - twist_phase(pair.alpha)) <= tol;
}

}  // namespace twc
