#ifndef TWC_MODELS_HPP
#define TWC_MODELS_HPP

#include "twc/certify.hpp"
#include "twc/linalg.hpp"
#include "twc/restriction.hpp"

#include <cstdint>
#include <string>

namespace twc {

enum class ModelKind { clock_block, tensor_double, flat_band };

std::string to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string& name);

/// Parameters of a seeded test Hamiltonian with exact twisted symmetries on
/// the code space and excited levels that are copies of the code space.
struct ModelSpec {
  ModelKind kind = ModelKind::clock_block;
  Index g = 3;
  Index g2 = 2;                   ///< second code dimension (tensor-double only)
  Index n_excited = 6;            ///< must be a positive multiple of the code dimension
  double gap = 1.0;               ///< excited levels drawn from [gap, 2 gap] (flat band: all at gap)
  double width = 0.0;             ///< code levels spread linearly over [0, width]
  double perturbation = 0.0;      ///< s in H + s K, ||K|| = 1
  double unitary_perturbation = 0.0;  ///< t in U -> exp(i t K') U for each symmetry
  bool rotate_basis = false;      ///< conjugate everything by a seeded Haar unitary
  std::uint64_t seed = 1;

  [[nodiscard]] Index code_dim() const { return kind == ModelKind::tensor_double ? g * g2 : g; }
  [[nodiscard]] Index dim() const { return code_dim() + n_excited; }
};

/// (G + G^dag)/2 for a seeded complex Gaussian G, scaled to unit operator norm.
DenseMatrix hermitian_perturbation(Index n, std::uint64_t seed);

struct ClockModel {
  ModelSpec spec;
  BandSpec band;      ///< band of the code_dim lowest levels of the perturbed H
  DenseMatrix u;
  DenseMatrix v;
  double alpha = 0.0;     ///< 1/g
  double epsilon_u = 0.0;
  double epsilon_v = 0.0;
  double delta = 0.0;     ///< ||[[U, V]]_alpha||
  double xi = 0.0;        ///< (max eps + width) / gap, operator norm
  bool xi_ok = false;
};

/// H = 0_g (+) D with U = C (+) R1 and V = S (+) R2, then perturbed.
ClockModel clock_model(const ModelSpec& spec);

struct TensorModel {
  ModelSpec spec;
  BandSpec band;
  DenseMatrix u1;
  DenseMatrix u2;
  DenseMatrix v1;
  DenseMatrix v2;
  double gamma = 0.0;        ///< ||[U1, U2]||
  double delta_u1v1 = 0.0;   ///< ||[[U1, V1]]_{1/g}||
  double delta_u2v2 = 0.0;   ///< ||[[U2, V2]]_{1/g2}||
  double delta_u1v2 = 0.0;   ///< ||[U1, V2]||
  double delta_u2v1 = 0.0;   ///< ||[U2, V1]||
  double epsilon = 0.0;      ///< largest ||[X, H]|| over the four symmetries
  double xi = 0.0;
  bool xi_ok = false;
};

/// Code space C^g (x) C^g2 with (C (x) I, S (x) I) and (I (x) C, I (x) S).
TensorModel tensor_double_model(const ModelSpec& spec);

struct ModelCertification {
  RestrictionResult restriction;
  Certificate certificate;
};

/// Restrict the model's symmetries to its band (operator norm) and certify
/// the restricted pair.
ModelCertification certify_clock_model(const ClockModel& model,
                                       const CertifyOptions& options = {});

struct TensorCertification {
  DenseMatrix u1, u2, v1, v2;  ///< restrictions to the band
  double xi = 0.0;
  double gamma = 0.0;
  double delta = 0.0;
  DoubleWitnessReport witness;
  Certificate certificate;
};

/// Restricts all four symmetries and runs the two-pair witness and certificate.
TensorCertification certify_tensor_model(const TensorModel& model);

}  // namespace twc

#endif
