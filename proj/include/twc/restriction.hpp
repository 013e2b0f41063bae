#ifndef TWC_RESTRICTION_HPP
#define TWC_RESTRICTION_HPP

#include "twc/linalg.hpp"

#include <optional>

namespace twc {

/// f(x) = 1 - sqrt(1 - x) on [0, 1]; satisfies x/2 <= f(x) <= x.
double root_deficit(double x);

/// A Hermitian Hamiltonian together with the orthogonal projector onto a
/// gapped band. The Hamiltonian is stored relative to the band's energy
/// reference, so the band sits in [-width, width] and every other eigenvalue
/// has modulus at least `gap`.
struct BandSpec {
  DenseMatrix hamiltonian;
  DenseMatrix projector;
  double gap = 0.0;
  double width = 0.0;              ///< ||H P|| in the operator norm
  double energy_reference = 0.0;   ///< constant removed from the input Hamiltonian
  DenseMatrix basis;               ///< orthonormal basis of range(P), one column per state
  DenseMatrix complement_basis;    ///< orthonormal basis of range(I - P)

  [[nodiscard]] Index dim() const { return hamiltonian.rows(); }
  [[nodiscard]] Index rank() const { return basis.cols(); }
  [[nodiscard]] DenseMatrix complement() const { return identity(dim()) - projector; }
};

/// Validates (H, P) and fills in gap and width. Supplied values are checked
/// against the spectrum: an overstated gap or understated width is an error.
BandSpec make_band(const DenseMatrix& hamiltonian, const DenseMatrix& projector,
                   std::optional<double> gap = std::nullopt,
                   std::optional<double> width = std::nullopt,
                   const Tolerances& tol = default_tolerances());

/// Band of the `band_size` lowest eigenstates of H, obtained by exact
/// diagonalization; the lowest eigenvalue becomes the energy reference.
BandSpec lowest_band(const DenseMatrix& hamiltonian, Index band_size,
                     const Tolerances& tol = default_tolerances());

/// The same band for H' = (I - P) H (I - P), which annihilates the band.
BandSpec flattened_band(const BandSpec& band);

/// ||[U, H]||: the epsilon for which U is an epsilon-approximate symmetry.
double commutator_epsilon(const DenseMatrix& u, const BandSpec& band,
                          const NormSpec& spec = NormSpec::op(),
                          const Tolerances& tol = default_tolerances());

/// ||(I-P) U P + P U (I-P)||.
double offdiag_norm(const DenseMatrix& u, const BandSpec& band,
                    const NormSpec& spec = NormSpec::op(),
                    const Tolerances& tol = default_tolerances());

struct GroundSymmetry {
  DenseMatrix full;          ///< P W P + (I-P) U (I-P)
  DenseMatrix restricted;    ///< W expressed in the band basis
  double epsilon = 0.0;      ///< ||[U, H]||
  double xi = 0.0;           ///< (epsilon + width) / gap, the ratio used for the bounds
  double distance = 0.0;     ///< ||U - full||
  double distance_bound = 0.0;       ///< xi + f(xi^2)
  double band_distance = 0.0;        ///< ||P (U - full) P||
  double band_distance_bound = 0.0;  ///< f(xi^2)
};

/// Pinches U to the band and restores unitarity there through the polar
/// decomposition. Requires xi = (epsilon + width) / gap < 1, with the width
/// measured in the same norm as epsilon.
GroundSymmetry ground_symmetry(const DenseMatrix& u, const BandSpec& band,
                               const NormSpec& spec = NormSpec::op(),
                               const Tolerances& tol = default_tolerances());

struct RestrictionResult {
  DenseMatrix u;
  DenseMatrix v;
  double alpha = 0.0;
  double epsilon_u = 0.0;
  double epsilon_v = 0.0;
  double width = 0.0;        ///< ||H P|| in the active norm (0 for a flat band)
  double xi = 0.0;           ///< epsilon/gap, or (epsilon + width)/gap for a band of nonzero width
  bool width_corrected = false;
  double delta_in = 0.0;             ///< ||[[U, V]]_alpha||
  double delta_out_bound = 0.0;      ///< delta + 2 xi^2 + 4 f(xi^2)
  double delta_out_measured = 0.0;   ///< ||[[u, v]]_alpha||
  GroundSymmetry ground_u;
  GroundSymmetry ground_v;
};

/// Restricts two approximate symmetries to the band and bounds the twisted
/// commutator of the restrictions. Throws PreconditionError when xi >= 1 and
/// NumericalError if the measured value exceeds its bound.
RestrictionResult restrict_pair(const DenseMatrix& u, const DenseMatrix& v, const BandSpec& band,
                                double alpha, const NormSpec& spec = NormSpec::op(),
                                const Tolerances& tol = default_tolerances());

/// H' = I - exp(-beta H): same band projector, gap 1 - exp(-beta gap).
BandSpec gibbs_transform(const BandSpec& band, double beta,
                         const Tolerances& tol = default_tolerances());

}  // namespace twc

#endif
