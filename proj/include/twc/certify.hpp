#ifndef TWC_CERTIFY_HPP
#define TWC_CERTIFY_HPP

#include "twc/linalg.hpp"
#include "twc/twisted_pair.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace twc {

enum class CertMethod {
  single_closed_form,
  greedy_transversal,
  double_pair,
  lambda_exclusion,
  exact_stone_von_neumann,
};

std::string to_string(CertMethod method);
CertMethod cert_method_from_string(const std::string& name);

/// Angular window in which u must have an eigenvalue: |phi - center| <= half_width.
struct Arc {
  double center = 0.0;      ///< radians in [0, 2 pi)
  double half_width = 0.0;  ///< radians in [0, pi]
  long index = 0;           ///< orbit index j (0 for arcs not tied to an orbit)

  [[nodiscard]] double left() const { return center - half_width; }
  [[nodiscard]] double right() const { return center + half_width; }
};

/// Closed interval of angles in (0, 2 pi), the circle cut open at +1.
struct Interval {
  double left = 0.0;
  double right = 0.0;
  long index = 0;
};

struct Certificate {
  int d_min = 1;
  CertMethod method = CertMethod::greedy_transversal;
  std::vector<std::pair<std::string, double>> inputs;
  double slack = 0.0;
  std::vector<Interval> minimal_arcs;  ///< greedy witness: inclusion-minimal intervals
  std::vector<double> stabs;           ///< greedy witness: stab angles (besides +1)
  std::string note;

  [[nodiscard]] std::optional<double> input(const std::string& name) const;
};

/// 2 (1 - cos(pi/d)) / (d - 1).
double single_pair_threshold(int d);

/// Arc of half-width arccos(1 - zeta) around theta; a full circle for zeta >= 2.
Arc eigenvalue_arc(double zeta, double theta);

struct ArcSystem {
  std::vector<Arc> arcs;              ///< nontrivial arcs, j != 0
  std::vector<Interval> intervals;    ///< arcs avoiding +1, cut open at 0
  std::vector<Interval> minimal;      ///< inclusion-minimal, deduplicated, sorted by right end
};

/// Arcs |phi_j - 2 pi alpha j| <= arccos(1 - |j| delta) for 0 < |j| <= floor(2/delta).
ArcSystem arc_system(double alpha, double delta, double merge_tol = 1e-12);

/// Keeps intervals that contain no other interval; duplicates collapse to one.
std::vector<Interval> minimal_intervals(std::vector<Interval> intervals, double merge_tol = 1e-12);

/// Greedy stabbing by right end points; returns the stab positions.
std::vector<double> greedy_stabs(std::vector<Interval> intervals, double merge_tol = 1e-12);

/// p/q with q <= max_denominator and |alpha - p/q| <= tol, by continued fractions.
std::optional<std::pair<long, long>> rational_approximation(double alpha,
                                                            long max_denominator = 1000000,
                                                            double tol = 1e-14);

struct CertifyOptions {
  bool with_slack = true;
  double merge_tol = 1e-12;
};

/// Certified minimum dimension of a twisted pair with ||[[u, v]]_alpha|| <= delta,
/// as 1 + the transversal number of the arc system. delta = 0 falls back to the
/// exact divisibility statement for rational alpha.
Certificate certify_single(double alpha, double delta, const CertifyOptions& options = {});

/// Certificate d for alpha = 1/d when delta is below single_pair_threshold(d).
Certificate certify_single_closed_form(int d, double delta);

/// Smallest g with lambda_min(g, alpha, op) <= delta: every smaller dimension
/// is excluded by the minimum twisted-commutator value.
Certificate certify_lambda(double alpha, double delta, long max_dim = 1000000);

/// Two twisted pairs (d1 <= d2) with commutator data gamma and delta.
Certificate certify_double(int d1, int d2, double gamma, double delta);

/// Re-evaluates the inequality behind a certificate from its echoed inputs.
bool recheck(const Certificate& cert);

// ---------------------------------------------------------------------------
// Orbit witnesses

struct OrbitPoint {
  long j = 0;
  Complex expectation;   ///< <j|u|j> for |j> = v^j |psi>
  Complex target;        ///< eta^j
  double deviation = 0.0;
  double bound = 0.0;    ///< |j| delta
};

struct OrbitReport {
  Complex phase;                 ///< eigenvalue of u rotated to +1
  DenseVector psi;
  std::vector<OrbitPoint> points;
  DenseMatrix states;            ///< columns v^j |psi>, same order as points
};

/// States v^j |psi> for j in [j_min, j_max] (default: the symmetric window
/// around 0 of size round(1/alpha)), with the expectation checks for u.
OrbitReport orbit_expectations(const TwistedPair& pair,
                               std::optional<std::pair<long, long>> range = std::nullopt,
                               double tol = 1e-10);

/// sqrt(2 zeta) |csc(theta / 4)| with theta the circular distance between the
/// angles; +inf when they coincide.
double overlap_bound(double zeta, double theta_x, double theta_y);

struct GramReport {
  DenseMatrix gram;
  double max_overlap = 0.0;
  double threshold = 0.0;        ///< 1/(n-1)
  bool diagonally_dominant = false;
  double min_eigenvalue = 0.0;
  Index rank = 0;
};

/// Gram matrix diagnostics for unit column vectors.
GramReport gram_independent(const DenseMatrix& vectors, double rank_tol = 1e-8);

struct DoubleOrbitPoint {
  long i = 0;
  long j = 0;
  double deviation_u1 = 0.0;
  double deviation_u2 = 0.0;
  double bound_instance = 0.0;  ///< start error + (|i| + |j|) delta
  double bound_nominal = 0.0;     ///< sqrt(gamma) d1 d2 / 2 + (|i| + |j|) delta
};

struct DoubleWitnessReport {
  int d1 = 0;
  int d2 = 0;
  double gamma = 0.0;
  double delta_u1v1 = 0.0;
  double delta_u2v2 = 0.0;
  double delta_u1v2 = 0.0;
  double delta_u2v1 = 0.0;
  double delta = 0.0;  ///< max of the four
  double start_error_u1 = 0.0;
  double start_error_u2 = 0.0;
  double start_bound_nominal = 0.0;     ///< sqrt(gamma) d1 d2 / 2
  double start_bound_rigorous = 0.0;  ///< n sqrt(gamma), shared-eigenvector guarantee
  std::vector<DoubleOrbitPoint> points;
  bool expectations_within_instance = true;
  bool expectations_within_nominal = true;
  GramReport gram;
  double threshold_lhs = 0.0;
  double threshold_rhs = 0.0;
  bool threshold_holds = false;
  bool independent = false;           ///< Gram rank = d1 d2
  std::vector<std::string> failures;
};

DoubleWitnessReport verify_double_witness(const DenseMatrix& u1, const DenseMatrix& u2,
                                          const DenseMatrix& v1, const DenseMatrix& v2, int d1,
                                          int d2, const Tolerances& tol = default_tolerances());

}  // namespace twc

#endif
