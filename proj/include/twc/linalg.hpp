#ifndef TWC_LINALG_HPP
#define TWC_LINALG_HPP

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace twc {

using Complex = std::complex<double>;
using DenseMatrix = Eigen::MatrixXcd;
using DenseVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using Index = Eigen::Index;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Every numerical tolerance used by the library, in one place.
struct Tolerances {
  double unitarity = 1e-10;     ///< ||M^dag M - I||_F
  double normality = 1e-8;      ///< ||A^dag A - A A^dag||_F <= tol * ||A||_F^2
  double eig_residual = 1e-9;   ///< max_j ||A x_j - l_j x_j|| relative to max(1, ||A||_F)
  double hermiticity = 1e-10;   ///< ||H - H^dag||_F relative to max(1, ||H||_F)
  double projector = 1e-10;     ///< ||P^2 - P||_F and ||P - P^dag||_F
  double band_relative = 1e-8;  ///< relative slack when checking supplied gap/width
  double arc_merge = 1e-12;     ///< radians; arc endpoints closer than this coincide
};

const Tolerances& default_tolerances();

/// Selects a Schatten-Ky Fan norm: the p-norm of the k largest singular
/// values. An empty k means "all singular values" (plain Schatten p-norm).
struct NormSpec {
  double p = kInf;
  std::optional<Index> k = 1;

  static NormSpec op() { return {kInf, 1}; }
  static NormSpec frobenius() { return {2.0, std::nullopt}; }
  static NormSpec schatten(double p) { return {p, std::nullopt}; }
  static NormSpec pk(double p, Index k) { return {p, k}; }

  /// Throws PreconditionError unless p >= 1 and 1 <= k <= min(rows, cols).
  void validate(Index rows, Index cols) const;
  /// Number of singular values that enter for a matrix with `min_dim`
  /// singular values; an explicit k larger than `min_dim` is clamped.
  [[nodiscard]] Index effective_k(Index min_dim) const;
  [[nodiscard]] bool is_operator_norm() const;
  [[nodiscard]] std::string label() const;
};

struct EigDecomp {
  std::vector<Complex> eigenvalues;
  DenseMatrix eigenvectors;  ///< orthonormal columns, same order as eigenvalues
  double residual = 0.0;     ///< max_j ||A x_j - l_j x_j||_2
};

struct GeneralEig {
  std::vector<Complex> eigenvalues;
  DenseMatrix eigenvectors;        ///< unit columns; empty unless requested
  std::vector<double> residuals;   ///< per-column ||A x - l x||; empty unless requested
};

// ---------------------------------------------------------------------------
// Elementary constructions and predicates

DenseMatrix identity(Index n);
DenseMatrix adjoint(const DenseMatrix& m);
/// XY - e^{2 pi i alpha} YX.
DenseMatrix twisted_commutator(const DenseMatrix& x, const DenseMatrix& y, double alpha);
DenseMatrix commutator(const DenseMatrix& x, const DenseMatrix& y);
Complex twist_phase(double alpha);

void require_square(const DenseMatrix& m, const char* what);
void require_same_shape(const DenseMatrix& a, const DenseMatrix& b, const char* what);
void require_finite(const DenseMatrix& m, const char* what);

bool is_unitary(const DenseMatrix& m, double tol = default_tolerances().unitarity);
double unitarity_defect(const DenseMatrix& m);
double hermiticity_defect(const DenseMatrix& m);
/// ||A^dag A - A A^dag||_F / ||A||_F^2 (0 for the zero matrix).
double normality_defect(const DenseMatrix& a);

/// Integer matrix power, negative exponents through the adjoint (unitary input).
DenseMatrix unitary_power(const DenseMatrix& u, long exponent);

// ---------------------------------------------------------------------------
// Norms

/// Singular values in descending order.
std::vector<double> singular_values(const DenseMatrix& m);
double schatten_kyfan_norm(const DenseMatrix& m, const NormSpec& spec);
/// Same as schatten_kyfan_norm, but an explicit k beyond the matrix size is
/// clamped: the value equals the norm of the matrix embedded in a larger space.
double embedded_norm(const DenseMatrix& m, const NormSpec& spec);
double operator_norm(const DenseMatrix& m);
double frobenius_norm(const DenseMatrix& m);

// ---------------------------------------------------------------------------
// Spectral routines

/// Deterministic spectral ordering: descending modulus, then descending real
/// part, then ascending imaginary part.
bool spectral_order(const Complex& a, const Complex& b);

EigDecomp eig_normal(const DenseMatrix& a, const Tolerances& tol = default_tolerances());
GeneralEig eig_general(const DenseMatrix& a, bool with_vectors = false);

struct HermitianEig {
  Eigen::VectorXd eigenvalues;  ///< ascending
  DenseMatrix eigenvectors;
};
HermitianEig eig_hermitian(const DenseMatrix& h, const Tolerances& tol = default_tolerances());

/// exp(i t K) for Hermitian K, through its eigendecomposition.
DenseMatrix unitary_exp(const DenseMatrix& k, double t,
                        const Tolerances& tol = default_tolerances());

/// W from M = W |M|, with W = L R^dag for the SVD M = L S R^dag.
DenseMatrix polar_unitary(const DenseMatrix& m);

/// Haar-distributed unitary: QR of a seeded complex Gaussian matrix with the
/// phases fixed so that R has a positive diagonal.
DenseMatrix haar_unitary(Index n, std::uint64_t seed);

/// Independent child seed for stream `stream` of a master seed (splitmix64).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

/// Minimal over pairings sigma of (sum_j |l_sigma(j)(A) - l_j(B)|^p)^(1/p)
/// for normal A, B (all g eigenvalues, i.e. k = g); p = inf gives the
/// bottleneck value.
double spectral_distance(const DenseMatrix& a, const DenseMatrix& b, double p,
                         const Tolerances& tol = default_tolerances());
/// Same quantity directly from two eigenvalue lists.
double spectral_distance(const std::vector<Complex>& a, const std::vector<Complex>& b, double p);

// ---------------------------------------------------------------------------
// Assignment problems (square cost matrices)

/// Minimum-cost perfect assignment by the Hungarian method; returns
/// assignment[row] = column.
std::vector<Index> hungarian_assignment(const RealMatrix& cost);
/// Perfect assignment minimizing the largest cost used.
std::vector<Index> bottleneck_assignment(const RealMatrix& cost);

}  // namespace twc

#endif
