#include "twc/restriction.hpp"

#include "twc/error.hpp"

#include <algorithm>
#include <cmath>

namespace twc {

double root_deficit(double x) {
  if (!(x >= 0.0 && x <= 1.0)) {
    throw PreconditionError("root_deficit: argument " + std::to_string(x) + " outside [0, 1]");
  }
  // 1 - sqrt(1 - x) without the cancellation for small x.
  return x / (1.0 + std::sqrt(1.0 - x));
}

namespace {

// Orthonormal basis of range(p) by pivoted Gram-Schmidt on the columns of p.
// A diagonal projector yields standard basis vectors in index order.
DenseMatrix range_basis(const DenseMatrix& p, Index rank) {
  const Index n = p.rows();
  DenseMatrix residual = p;
  DenseMatrix basis(n, rank);
  for (Index c = 0; c < rank; ++c) {
    Index pivot = 0;
    double best = -1.0;
    for (Index j = 0; j < n; ++j) {
      const double norm = residual.col(j).norm();
      if (norm > best + 1e-12) {
        best = norm;
        pivot = j;
      }
    }
    if (best <= 1e-8) throw NumericalError("band basis: projector rank deficient");
    DenseVector q = residual.col(pivot) / best;
    // Second pass against earlier vectors keeps the basis orthonormal to rounding.
    for (Index k = 0; k < c; ++k) q -= basis.col(k) * basis.col(k).dot(q);
    q.normalize();
    basis.col(c) = q;
    residual -= q * (q.adjoint() * residual);
  }
  return basis;
}

void require_band_operator(const DenseMatrix& u, const BandSpec& band, const char* what,
                           const Tolerances& tol) {
  require_square(u, what);
  require_same_shape(u, band.hamiltonian, what);
  require_finite(u, what);
  if (!is_unitary(u, tol.unitarity)) {
    throw PreconditionError(std::string(what) + ": operator is not unitary (defect " +
                            std::to_string(unitarity_defect(u)) + ")");
  }
}

// Ground symmetry for a given xi; the bounds are only meaningful for xi < 1.
GroundSymmetry pinch_and_polar(const DenseMatrix& u, const BandSpec& band, const NormSpec& spec,
                               double xi) {
  const DenseMatrix& q = band.basis;
  const DenseMatrix block = q.adjoint() * u * q;
  const auto sv = singular_values(block);
  if (sv.back() <= 1e-12) throw NumericalError("ground_symmetry: band block is singular");
  const DenseMatrix w = polar_unitary(block);
  const DenseMatrix pbar = band.complement();

  GroundSymmetry out;
  out.restricted = w;
  out.full = q * w * q.adjoint() + pbar * u * pbar;
  out.xi = xi;
  out.distance = embedded_norm(u - out.full, spec);
  out.band_distance = embedded_norm(block - w, spec);
  const double fx = root_deficit(std::min(1.0, xi * xi));
  out.distance_bound = xi + fx;
  out.band_distance_bound = fx;
  return out;
}

double active_width(const BandSpec& band, const NormSpec& spec) {
  if (band.width == 0.0) return 0.0;
  return embedded_norm(band.hamiltonian * band.basis, spec);
}

}  // namespace

BandSpec make_band(const DenseMatrix& hamiltonian, const DenseMatrix& projector,
                   std::optional<double> gap, std::optional<double> width,
                   const Tolerances& tol) {
  require_square(hamiltonian, "band");
  require_same_shape(hamiltonian, projector, "band");
  require_finite(hamiltonian, "band hamiltonian");
  require_finite(projector, "band projector");
  if (hermiticity_defect(hamiltonian) > tol.hermiticity) {
    throw PreconditionError("band: Hamiltonian is not Hermitian");
  }
  if ((projector * projector - projector).norm() > tol.projector ||
      (projector - projector.adjoint()).norm() > tol.projector) {
    throw PreconditionError("band: P is not an orthogonal projector");
  }
  const double scale = std::max(1.0, hamiltonian.norm());
  if (commutator(hamiltonian, projector).norm() > tol.band_relative * scale) {
    throw PreconditionError("band: P does not commute with H");
  }
  const Index n = hamiltonian.rows();
  const auto rank = static_cast<Index>(std::llround(projector.trace().real()));
  if (rank < 1 || rank >= n) {
    throw PreconditionError("band: projector rank must lie in [1, dim - 1], got " +
                            std::to_string(rank));
  }

  BandSpec band;
  band.hamiltonian = 0.5 * (hamiltonian + hamiltonian.adjoint());
  band.projector = 0.5 * (projector + projector.adjoint());
  band.basis = range_basis(band.projector, rank);
  band.complement_basis = range_basis(band.complement(), n - rank);

  const double width_measured = operator_norm(band.hamiltonian * band.basis);
  const auto off = singular_values(band.hamiltonian * band.complement_basis);
  const double gap_measured = off.back();
  if (!(gap_measured > 0.0)) throw PreconditionError("band: no spectral gap");

  if (gap) {
    if (!(*gap > 0.0)) throw PreconditionError("band: gap must be positive");
    if (*gap > gap_measured * (1.0 + tol.band_relative)) {
      throw PreconditionError("band: supplied gap " + std::to_string(*gap) +
                              " exceeds the spectral gap " + std::to_string(gap_measured));
    }
    band.gap = *gap;
  } else {
    band.gap = gap_measured;
  }
  if (width) {
    if (*width < width_measured - tol.band_relative * std::max(width_measured, gap_measured)) {
      throw PreconditionError("band: supplied width " + std::to_string(*width) +
                              " is below ||HP|| = " + std::to_string(width_measured));
    }
    band.width = *width;
  } else {
    band.width = width_measured;
  }
  return band;
}

BandSpec lowest_band(const DenseMatrix& hamiltonian, Index band_size, const Tolerances& tol) {
  require_square(hamiltonian, "lowest_band");
  const Index n = hamiltonian.rows();
  if (band_size < 1 || band_size >= n) {
    throw PreconditionError("lowest_band: band size must lie in [1, dim - 1]");
  }
  const auto eig = eig_hermitian(hamiltonian, tol);
  const double e0 = eig.eigenvalues(0);
  if (eig.eigenvalues(band_size) - eig.eigenvalues(band_size - 1) <= 0.0) {
    throw PreconditionError("lowest_band: band is not separated from the rest of the spectrum");
  }
  const DenseMatrix vb = eig.eigenvectors.leftCols(band_size);
  DenseMatrix p = vb * vb.adjoint();
  DenseMatrix shifted = hamiltonian - e0 * identity(n);
  BandSpec band = make_band(shifted, p, std::nullopt, std::nullopt, tol);
  band.energy_reference = e0;
  return band;
}

BandSpec flattened_band(const BandSpec& band) {
  BandSpec out = band;
  const DenseMatrix pbar = band.complement();
  out.hamiltonian = pbar * band.hamiltonian * pbar;
  out.hamiltonian = 0.5 * (out.hamiltonian + out.hamiltonian.adjoint());
  out.width = 0.0;
  return out;
}

double commutator_epsilon(const DenseMatrix& u, const BandSpec& band, const NormSpec& spec,
                          const Tolerances& tol) {
  require_band_operator(u, band, "commutator_epsilon", tol);
  spec.validate(u.rows(), u.cols());
  return schatten_kyfan_norm(commutator(u, band.hamiltonian), spec);
}

double offdiag_norm(const DenseMatrix& u, const BandSpec& band, const NormSpec& spec,
                    const Tolerances& tol) {
  require_band_operator(u, band, "offdiag_norm", tol);
  spec.validate(u.rows(), u.cols());
  const DenseMatrix pbar = band.complement();
  const DenseMatrix& p = band.projector;
  return schatten_kyfan_norm(pbar * u * p + p * u * pbar, spec);
}

GroundSymmetry ground_symmetry(const DenseMatrix& u, const BandSpec& band, const NormSpec& spec,
                               const Tolerances& tol) {
  const double eps = commutator_epsilon(u, band, spec, tol);
  const double xi = (eps + active_width(band, spec)) / band.gap;
  if (!(xi < 1.0)) {
    throw PreconditionError("ground_symmetry: xi = " + std::to_string(xi) + " >= 1");
  }
  GroundSymmetry out = pinch_and_polar(u, band, spec, xi);
  out.epsilon = eps;
  return out;
}

RestrictionResult restrict_pair(const DenseMatrix& u, const DenseMatrix& v, const BandSpec& band,
                                double alpha, const NormSpec& spec, const Tolerances& tol) {
  require_band_operator(u, band, "restrict_pair", tol);
  require_band_operator(v, band, "restrict_pair", tol);
  spec.validate(u.rows(), u.cols());

  RestrictionResult out;
  out.alpha = alpha;
  out.epsilon_u = schatten_kyfan_norm(commutator(u, band.hamiltonian), spec);
  out.epsilon_v = schatten_kyfan_norm(commutator(v, band.hamiltonian), spec);
  out.width = active_width(band, spec);
  out.width_corrected = out.width > 0.0;
  out.xi = (std::max(out.epsilon_u, out.epsilon_v) + out.width) / band.gap;
  if (!(out.xi < 1.0)) {
    throw PreconditionError("restrict_pair: xi = " + std::to_string(out.xi) +
                            " >= 1, the restriction bound does not apply");
  }

  out.ground_u = pinch_and_polar(u, band, spec, out.xi);
  out.ground_u.epsilon = out.epsilon_u;
  out.ground_v = pinch_and_polar(v, band, spec, out.xi);
  out.ground_v.epsilon = out.epsilon_v;
  out.u = out.ground_u.restricted;
  out.v = out.ground_v.restricted;
  if (!is_unitary(out.u, tol.unitarity) || !is_unitary(out.v, tol.unitarity)) {
    throw NumericalError("restrict_pair: restricted operators lost unitarity");
  }

  const double xi2 = out.xi * out.xi;
  out.delta_in = schatten_kyfan_norm(twisted_commutator(u, v, alpha), spec);
  out.delta_out_bound = out.delta_in + 2.0 * xi2 + 4.0 * root_deficit(xi2);
  out.delta_out_measured = embedded_norm(twisted_commutator(out.u, out.v, alpha), spec);
  if (out.delta_out_measured > out.delta_out_bound + 1e-9) {
    throw NumericalError("restrict_pair: measured " + std::to_string(out.delta_out_measured) +
                         " exceeds bound " + std::to_string(out.delta_out_bound));
  }
  return out;
}

BandSpec gibbs_transform(const BandSpec& band, double beta, const Tolerances& tol) {
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    throw PreconditionError("gibbs_transform: beta must be positive and finite");
  }
  const auto eig = eig_hermitian(band.hamiltonian, tol);
  Eigen::VectorXd mapped(eig.eigenvalues.size());
  for (Index i = 0; i < mapped.size(); ++i) mapped(i) = -std::expm1(-beta * eig.eigenvalues(i));
  const DenseMatrix h = eig.eigenvectors * mapped.cast<Complex>().asDiagonal() *
                        eig.eigenvectors.adjoint();
  const double gap = -std::expm1(-beta * band.gap);
  return make_band(h, band.projector, gap, std::nullopt, tol);
}

}  // namespace twc
