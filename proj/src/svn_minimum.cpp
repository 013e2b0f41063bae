#include "twc/svn_minimum.hpp"

#include "twc/error.hpp"

#include <cmath>

namespace twc {

long nearest_integer(double x) { return std::lround(x); }

double lambda_min(Index g, double alpha, const NormSpec& spec) {
  if (g < 1) throw DimensionError("lambda_min: g must be positive");
  if (!(spec.p >= 2.0)) {
    throw PreconditionError("lambda_min: the closed form needs p >= 2, got p = " +
                            std::to_string(spec.p));
  }
  spec.validate(g, g);
  const auto k = static_cast<double>(spec.effective_k(g));
  const double gd = static_cast<double>(g);
  const double x = gd * alpha;
  const double frac = std::abs(static_cast<double>(nearest_integer(x)) - x);
  const double kp = std::isinf(spec.p) ? 1.0 : std::pow(k, 1.0 / spec.p);
  return 2.0 * kp * std::sin(kPi * frac / gd);
}

DenseMatrix clock_matrix(Index g) {
  if (g < 1) throw DimensionError("clock_matrix: g must be positive");
  DenseMatrix c = DenseMatrix::Zero(g, g);
  for (Index j = 0; j < g; ++j) {
    c(j, j) = std::polar(1.0, 2.0 * kPi * static_cast<double>(j) / static_cast<double>(g));
  }
  return c;
}

DenseMatrix shift_matrix(Index g) {
  if (g < 1) throw DimensionError("shift_matrix: g must be positive");
  DenseMatrix s = DenseMatrix::Zero(g, g);
  for (Index j = 0; j < g; ++j) s((j + 1) % g, j) = 1.0;
  return s;
}

TwistedPair optimal_pair(Index g, double alpha) {
  const long m = nearest_integer(static_cast<double>(g) * alpha);
  return make_twisted_pair(clock_matrix(g), unitary_power(shift_matrix(g), m), alpha);
}

std::vector<double> optimal_angles(Index g, double alpha) {
  if (g < 1) throw DimensionError("optimal_angles: g must be positive");
  const long m = nearest_integer(static_cast<double>(g) * alpha);
  std::vector<double> angles(static_cast<std::size_t>(g));
  for (Index j = 0; j < g; ++j) {
    // Reduce the integer part first so the angle is exact for small m.
    const long step = (m * j) % static_cast<long>(g);
    const long wrapped = step < 0 ? step + static_cast<long>(g) : step;
    angles[static_cast<std::size_t>(j)] =
        2.0 * kPi * static_cast<double>(wrapped) / static_cast<double>(g);
  }
  return angles;
}

double cyclic_objective(const std::vector<double>& angles, double alpha) {
  const std::size_t g = angles.size();
  double total = 0.0;
  for (std::size_t j = 0; j < g; ++j) {
    const double s = std::sin((angles[(j + 1) % g] - angles[j] - 2.0 * kPi * alpha) / 2.0);
    total += 4.0 * s * s;
  }
  return total;
}

namespace {

struct Objective {
  Complex eta;
  NormSpec spec;

  double value(const DenseMatrix& u, const DenseMatrix& v) const {
    return embedded_norm(u * v - eta * (v * u), spec);
  }

  // Euclidean gradient of the (p,k) norm at M = uv - eta vu, pulled back to u and v.
  double value_and_gradient(const DenseMatrix& u, const DenseMatrix& v, DenseMatrix& gu,
                            DenseMatrix& gv) const {
    const DenseMatrix m = u * v - eta * (v * u);
    Eigen::JacobiSVD<DenseMatrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sigma = svd.singularValues();
    const Index k = spec.effective_k(sigma.size());
    double norm = 0.0;
    if (std::isinf(spec.p)) {
      norm = sigma(0);
    } else {
      for (Index i = 0; i < k; ++i) norm += std::pow(sigma(i), spec.p);
      norm = std::pow(norm, 1.0 / spec.p);
    }
    DenseMatrix grad = DenseMatrix::Zero(m.rows(), m.cols());
    if (norm > 0.0) {
      const Index terms = std::isinf(spec.p) ? 1 : k;
      for (Index i = 0; i < terms; ++i) {
        const double w = std::isinf(spec.p) ? 1.0 : std::pow(sigma(i) / norm, spec.p - 1.0);
        grad += w * svd.matrixU().col(i) * svd.matrixV().col(i).adjoint();
      }
    }
    const Complex eta_bar = std::conj(eta);
    gu = grad * v.adjoint() - eta_bar * (v.adjoint() * grad);
    gv = u.adjoint() * grad - eta_bar * (grad * u.adjoint());
    return norm;
  }
};

}  // namespace

BruteMinResult brute_min(Index g, double alpha, const NormSpec& spec,
                         const BruteMinOptions& options, const PairObserver& observer) {
  if (g < 1 || g > 4) throw PreconditionError("brute_min: g must lie in [1, 4]");
  if (options.restarts < 1) throw PreconditionError("brute_min: restarts must be >= 1");
  spec.validate(g, g);
  const Objective objective{twist_phase(alpha), spec};

  BruteMinResult best;
  best.value = kInf;
  for (int r = 0; r < options.restarts; ++r) {
    const auto stream = static_cast<std::uint64_t>(r);
    DenseMatrix u = haar_unitary(g, derive_seed(options.seed, 2 * stream));
    DenseMatrix v = haar_unitary(g, derive_seed(options.seed, 2 * stream + 1));
    if (observer) observer(u, v);
    DenseMatrix gu;
    DenseMatrix gv;
    double value = objective.value_and_gradient(u, v, gu, gv);
    double step = options.initial_step;
    bool settled = false;
    int it = 0;
    for (; it < options.max_iterations && !settled; ++it) {
      if (value == 0.0 || std::sqrt(gu.squaredNorm() + gv.squaredNorm()) < 1e-14) {
        settled = true;
        break;
      }
      bool accepted = false;
      while (step >= options.min_step) {
        DenseMatrix u_next = polar_unitary(u - step * gu);
        DenseMatrix v_next = polar_unitary(v - step * gv);
        const double next = objective.value(u_next, v_next);
        if (next < value) {
          const double gain = value - next;
          u = std::move(u_next);
          v = std::move(v_next);
          if (observer) observer(u, v);
          settled = gain <= options.stall_tolerance * value;
          value = objective.value_and_gradient(u, v, gu, gv);
          step = std::min(1.0, step * 1.5);
          accepted = true;
          break;
        }
        step *= 0.5;
      }
      if (!accepted) settled = true;
    }
    best.total_iterations += it;
    if (!settled) ++best.stalled_restarts;
    if (value < best.value) {
      best.value = value;
      best.u = u;
      best.v = v;
      best.best_restart = r;
    }
  }
  return best;
}

}  // namespace twc
