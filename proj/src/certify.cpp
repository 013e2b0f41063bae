#include "twc/certify.hpp"

#include "twc/approx_eig.hpp"
#include "twc/error.hpp"
#include "twc/svn_minimum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace twc {

namespace {

constexpr double kTwoPi = 2.0 * kPi;
// Below this the arc enumeration (4/delta arcs) is no longer a desk-scale job.
constexpr double kMinDelta = 4e-7;
// certify_single evaluates smaller positive deltas here; the count is
// nonincreasing in delta, so the result is still a valid bound.
constexpr double kDeltaFloor = 1e-5;

void require_alpha(double alpha, const char* what) {
  if (!(alpha >= 0.0 && alpha < 1.0)) {
    throw PreconditionError(std::string(what) + ": alpha must lie in [0, 1), got " +
                            std::to_string(alpha));
  }
}

double frac(double x) { return x - std::floor(x); }

// Orbit window j = -floor((d-1)/2) .. ceil((d-1)/2).
std::pair<long, long> orbit_window(long d) {
  return {-((d - 1) / 2), d / 2};
}

long window_for_alpha(double alpha) {
  if (!(alpha > 0.0)) throw PreconditionError("orbit: alpha = 0 needs an explicit range");
  return std::max(1L, std::lround(1.0 / alpha));
}

Index pick_phase_eigenvalue(const std::vector<Complex>& eigs) {
  Index best = 0;
  for (Index i = 1; i < static_cast<Index>(eigs.size()); ++i) {
    const Complex& c = eigs[static_cast<std::size_t>(i)];
    const Complex& b = eigs[static_cast<std::size_t>(best)];
    if (c.real() > b.real() + 1e-12 ||
        (std::abs(c.real() - b.real()) <= 1e-12 && std::abs(c.imag()) < std::abs(b.imag()))) {
      best = i;
    }
  }
  return best;
}

Certificate exact_certificate(double alpha) {
  const auto rational = rational_approximation(alpha);
  if (!rational) {
    throw PreconditionError("certify: delta = 0 needs a rational alpha (denominator <= 1e6)");
  }
  Certificate cert;
  cert.method = CertMethod::exact_stone_von_neumann;
  cert.d_min = static_cast<int>(rational->second);
  cert.inputs = {{"alpha", alpha}, {"delta", 0.0}};
  cert.slack = 0.0;
  cert.note = "exact twisted commutation: dimension is a multiple of " +
              std::to_string(rational->second);
  return cert;
}

int greedy_count(double alpha, double delta, double merge_tol) {
  const auto sys = arc_system(alpha, delta, merge_tol);
  return 1 + static_cast<int>(greedy_stabs(sys.minimal, merge_tol).size());
}

}  // namespace

std::string to_string(CertMethod method) {
  switch (method) {
    case CertMethod::single_closed_form: return "single-closed-form";
    case CertMethod::greedy_transversal: return "greedy-transversal";
    case CertMethod::double_pair: return "double-pair";
    case CertMethod::lambda_exclusion: return "lambda-exclusion";
    case CertMethod::exact_stone_von_neumann: return "exact-stone-von-neumann";
  }
  return "unknown";
}

CertMethod cert_method_from_string(const std::string& name) {
  for (auto m : {CertMethod::single_closed_form, CertMethod::greedy_transversal,
                 CertMethod::double_pair, CertMethod::lambda_exclusion,
                 CertMethod::exact_stone_von_neumann}) {
    if (to_string(m) == name) return m;
  }
  throw PreconditionError("unknown certificate method '" + name + "'");
}

std::optional<double> Certificate::input(const std::string& name) const {
  for (const auto& [key, value] : inputs) {
    if (key == name) return value;
  }
  return std::nullopt;
}

double single_pair_threshold(int d) {
  if (d < 2) throw PreconditionError("single_pair_threshold: d must be >= 2");
  const double dd = static_cast<double>(d);
  return 2.0 * (1.0 - std::cos(kPi / dd)) / (dd - 1.0);
}

Arc eigenvalue_arc(double zeta, double theta) {
  if (!(zeta >= 0.0 && zeta <= 2.0)) {
    throw PreconditionError("eigenvalue_arc: zeta must lie in [0, 2], got " + std::to_string(zeta));
  }
  Arc arc;
  arc.center = frac(theta / kTwoPi) * kTwoPi;
  arc.half_width = zeta >= 2.0 ? kPi : std::acos(1.0 - zeta);
  return arc;
}

ArcSystem arc_system(double alpha, double delta, double merge_tol) {
  require_alpha(alpha, "arc_system");
  if (!(delta > 0.0)) throw PreconditionError("arc_system: delta must be positive");
  if (delta < kMinDelta) {
    throw PreconditionError("arc_system: delta below " + std::to_string(kMinDelta) +
                            " gives too many arcs");
  }
  ArcSystem sys;
  const auto jmax = static_cast<long>(std::floor(2.0 / delta));
  for (long j = -jmax; j <= jmax; ++j) {
    if (j == 0) continue;
    const double zeta = static_cast<double>(std::labs(j)) * delta;
    if (zeta >= 2.0) continue;
    Arc arc;
    arc.center = frac(alpha * static_cast<double>(j)) * kTwoPi;
    arc.half_width = std::acos(1.0 - zeta);
    arc.index = j;
    sys.arcs.push_back(arc);
    // The j = 0 window pins an eigenvalue at +1, so arcs through angle 0 are already met.
    if (arc.left() <= merge_tol || arc.right() >= kTwoPi - merge_tol) continue;
    sys.intervals.push_back({arc.left(), arc.right(), j});
  }
  sys.minimal = minimal_intervals(sys.intervals, merge_tol);
  return sys;
}

std::vector<Interval> minimal_intervals(std::vector<Interval> intervals, double merge_tol) {
  std::sort(intervals.begin(), intervals.end(), [](const Interval& a, const Interval& b) {
    if (a.right != b.right) return a.right < b.right;
    if (a.left != b.left) return a.left > b.left;
    return a.index < b.index;
  });
  std::vector<Interval> kept;
  double max_left = -kInf;
  for (const auto& iv : intervals) {
    // An earlier interval ends no later; if it also starts no earlier it sits inside iv.
    if (max_left >= iv.left - merge_tol) continue;
    kept.push_back(iv);
    max_left = std::max(max_left, iv.left);
  }
  return kept;
}

std::vector<double> greedy_stabs(std::vector<Interval> intervals, double merge_tol) {
  std::sort(intervals.begin(), intervals.end(), [](const Interval& a, const Interval& b) {
    if (a.right != b.right) return a.right < b.right;
    return a.left > b.left;
  });
  std::vector<double> stabs;
  double last = -kInf;
  for (const auto& iv : intervals) {
    if (iv.left <= last + merge_tol) continue;
    last = iv.right;
    stabs.push_back(last);
  }
  return stabs;
}

std::optional<std::pair<long, long>> rational_approximation(double alpha, long max_denominator,
                                                            double tol) {
  if (!std::isfinite(alpha)) return std::nullopt;
  // Convergents h/k of the continued fraction of alpha.
  long h_prev = 1, h = static_cast<long>(std::floor(alpha));
  long k_prev = 0, k = 1;
  double x = alpha - std::floor(alpha);
  for (int iter = 0; iter < 64; ++iter) {
    if (std::abs(alpha - static_cast<double>(h) / static_cast<double>(k)) <= tol) {
      return std::make_pair(h, k);
    }
    if (x <= 0.0) break;
    const double inv = 1.0 / x;
    const auto a = static_cast<long>(std::floor(inv));
    x = inv - static_cast<double>(a);
    const long h_next = a * h + h_prev;
    const long k_next = a * k + k_prev;
    if (k_next > max_denominator || k_next <= 0) break;
    h_prev = h;
    h = h_next;
    k_prev = k;
    k = k_next;
  }
  return std::nullopt;
}

Certificate certify_single(double alpha, double delta, const CertifyOptions& options) {
  require_alpha(alpha, "certify_single");
  if (!(delta >= 0.0) || !std::isfinite(delta)) {
    throw PreconditionError("certify_single: delta must be finite and >= 0");
  }
  if (delta == 0.0) return exact_certificate(alpha);

  Certificate cert;
  cert.method = CertMethod::greedy_transversal;
  cert.inputs = {{"alpha", alpha}, {"delta", delta}};
  const double evaluated = std::max(delta, kDeltaFloor);
  if (evaluated > delta) {
    cert.note = "evaluated at delta = " + std::to_string(kDeltaFloor) + " (count is monotone in delta)";
  }
  const auto sys = arc_system(alpha, evaluated, options.merge_tol);
  cert.minimal_arcs = sys.minimal;
  cert.stabs = greedy_stabs(sys.minimal, options.merge_tol);
  cert.d_min = 1 + static_cast<int>(cert.stabs.size());

  if (!options.with_slack) {
    cert.slack = std::numeric_limits<double>::quiet_NaN();
  } else if (cert.d_min == 1) {
    cert.slack = kInf;
  } else {
    // The count is nonincreasing in delta; bisect for the point where it drops.
    double lo = evaluated;
    double hi = 2.0;
    for (int it = 0; it < 60 && hi - lo > 1e-14 * hi; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (greedy_count(alpha, mid, options.merge_tol) >= cert.d_min) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    cert.slack = hi - delta;
  }
  return cert;
}

Certificate certify_single_closed_form(int d, double delta) {
  const double threshold = single_pair_threshold(d);
  if (!(delta >= 0.0)) throw PreconditionError("certify_single_closed_form: delta must be >= 0");
  Certificate cert;
  cert.method = CertMethod::single_closed_form;
  cert.inputs = {{"d", static_cast<double>(d)}, {"alpha", 1.0 / d}, {"delta", delta}};
  cert.d_min = delta < threshold ? d : 1;
  cert.slack = threshold - delta;
  return cert;
}

Certificate certify_lambda(double alpha, double delta, long max_dim) {
  require_alpha(alpha, "certify_lambda");
  if (!(delta >= 0.0) || !std::isfinite(delta)) {
    throw PreconditionError("certify_lambda: delta must be finite and >= 0");
  }
  if (delta == 0.0) return exact_certificate(alpha);
  const NormSpec op = NormSpec::op();
  Certificate cert;
  cert.method = CertMethod::lambda_exclusion;
  cert.inputs = {{"alpha", alpha}, {"delta", delta}};
  double smallest_excluded = kInf;
  for (long g = 1; g <= max_dim; ++g) {
    const double lam = lambda_min(g, alpha, op);
    if (lam <= delta) {
      cert.d_min = static_cast<int>(g);
      cert.slack = smallest_excluded - delta;
      return cert;
    }
    smallest_excluded = std::min(smallest_excluded, lam);
  }
  throw PreconditionError("certify_lambda: no admissible dimension up to " +
                          std::to_string(max_dim));
}

Certificate certify_double(int d1, int d2, double gamma, double delta) {
  if (d1 < 2 || d2 < 2) throw PreconditionError("certify_double: d1, d2 must be >= 2");
  if (d1 > d2) throw PreconditionError("certify_double: requires d1 <= d2");
  if (!(gamma >= 0.0) || !(delta >= 0.0)) {
    throw PreconditionError("certify_double: gamma and delta must be >= 0");
  }
  const double n = static_cast<double>(d1) * static_cast<double>(d2);
  const double lhs = std::sqrt(gamma) * n + static_cast<double>(d1 + d2) * delta;
  const double s = std::sin(kPi / (2.0 * d1));
  const double rhs = s * s / ((n - 1.0) * (n - 1.0));

  Certificate cert;
  cert.inputs = {{"d1", static_cast<double>(d1)},
                 {"d2", static_cast<double>(d2)},
                 {"gamma", gamma},
                 {"delta", delta}};
  cert.slack = rhs - lhs;
  if (lhs < rhs) {
    cert.method = CertMethod::double_pair;
    cert.d_min = d1 * d2;
    return cert;
  }
  const CertifyOptions no_slack{false, 1e-12};
  const Certificate first = certify_single(1.0 / d1, delta, no_slack);
  const Certificate second = certify_single(1.0 / d2, delta, no_slack);
  const Certificate& best = second.d_min > first.d_min ? second : first;
  cert.method = best.method;
  cert.d_min = best.d_min;
  cert.inputs.emplace_back("alpha", *best.input("alpha"));
  cert.minimal_arcs = best.minimal_arcs;
  cert.stabs = best.stabs;
  cert.note = "two-pair condition fails; best single-pair certificate";
  return cert;
}

bool recheck(const Certificate& cert) {
  const auto need = [&](const char* name) {
    const auto v = cert.input(name);
    if (!v) throw PreconditionError(std::string("recheck: certificate lacks input '") + name + "'");
    return *v;
  };
  switch (cert.method) {
    case CertMethod::single_closed_form: {
      const auto d = static_cast<int>(std::lround(need("d")));
      const double delta = need("delta");
      return cert.d_min == (delta < single_pair_threshold(d) ? d : 1);
    }
    case CertMethod::greedy_transversal:
      return certify_single(need("alpha"), need("delta"), {false, 1e-12}).d_min == cert.d_min;
    case CertMethod::exact_stone_von_neumann: {
      const auto q = rational_approximation(need("alpha"));
      return q && q->second == cert.d_min && need("delta") == 0.0;
    }
    case CertMethod::lambda_exclusion: {
      const double alpha = need("alpha");
      const double delta = need("delta");
      for (int g = 1; g < cert.d_min; ++g) {
        if (!(delta < lambda_min(g, alpha, NormSpec::op()))) return false;
      }
      return lambda_min(cert.d_min, alpha, NormSpec::op()) <= delta;
    }
    case CertMethod::double_pair: {
      const auto d1 = static_cast<int>(std::lround(need("d1")));
      const auto d2 = static_cast<int>(std::lround(need("d2")));
      const auto again = certify_double(d1, d2, need("gamma"), need("delta"));
      return again.method == CertMethod::double_pair && again.d_min == cert.d_min;
    }
  }
  return false;
}

// ---------------------------------------------------------------------------

OrbitReport orbit_expectations(const TwistedPair& pair, std::optional<std::pair<long, long>> range,
                               double tol) {
  const auto [j_min, j_max] = range ? *range : orbit_window(window_for_alpha(pair.alpha));
  if (j_min > j_max) throw PreconditionError("orbit_expectations: empty range");
  const auto eig = eig_normal(pair.u);
  const Index pick = pick_phase_eigenvalue(eig.eigenvalues);

  OrbitReport report;
  report.phase = eig.eigenvalues[static_cast<std::size_t>(pick)];
  report.psi = eig.eigenvectors.col(pick);
  const DenseMatrix u = (std::conj(report.phase) / std::abs(report.phase)) * pair.u;
  report.states.resize(pair.dim(), j_max - j_min + 1);
  for (long j = j_min; j <= j_max; ++j) {
    const DenseVector state = unitary_power(pair.v, j) * report.psi;
    report.states.col(j - j_min) = state;
    OrbitPoint pt;
    pt.j = j;
    pt.expectation = state.dot(u * state);
    pt.target = std::polar(1.0, kTwoPi * pair.alpha * static_cast<double>(j));
    pt.deviation = std::abs(pt.expectation - pt.target);
    pt.bound = static_cast<double>(std::labs(j)) * pair.delta;
    if (pt.deviation > pt.bound + tol) {
      throw NumericalError("orbit_expectations: deviation " + std::to_string(pt.deviation) +
                           " exceeds |j| delta = " + std::to_string(pt.bound) +
                           " at j = " + std::to_string(j));
    }
    report.points.push_back(pt);
  }
  return report;
}

double overlap_bound(double zeta, double theta_x, double theta_y) {
  if (!(zeta >= 0.0)) throw PreconditionError("overlap_bound: zeta must be >= 0");
  double theta = std::fmod(std::abs(theta_y - theta_x), kTwoPi);
  if (theta > kPi) theta = kTwoPi - theta;
  const double s = std::sin(theta / 4.0);
  if (s <= 1e-15) return kInf;
  return std::sqrt(2.0 * zeta) / s;
}

GramReport gram_independent(const DenseMatrix& vectors, double rank_tol) {
  const Index n = vectors.cols();
  if (n == 0) throw DimensionError("gram_independent: no vectors");
  for (Index c = 0; c < n; ++c) {
    if (std::abs(vectors.col(c).norm() - 1.0) > 1e-10) {
      throw PreconditionError("gram_independent: vector " + std::to_string(c) +
                              " is not normalized");
    }
  }
  GramReport report;
  report.gram = vectors.adjoint() * vectors;
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      if (i != j) report.max_overlap = std::max(report.max_overlap, std::abs(report.gram(i, j)));
    }
  }
  report.threshold = n > 1 ? 1.0 / static_cast<double>(n - 1) : kInf;
  report.diagonally_dominant = report.max_overlap < report.threshold;
  Tolerances loose;
  loose.hermiticity = 1e-8;
  const auto eig = eig_hermitian(report.gram, loose);
  report.min_eigenvalue = eig.eigenvalues.minCoeff();
  report.rank = (eig.eigenvalues.array() > rank_tol).count();
  return report;
}

DoubleWitnessReport verify_double_witness(const DenseMatrix& u1, const DenseMatrix& u2,
                                          const DenseMatrix& v1, const DenseMatrix& v2, int d1,
                                          int d2, const Tolerances& tol) {
  if (d1 < 2 || d2 < 2 || d1 > d2) {
    throw PreconditionError("verify_double_witness: requires 2 <= d1 <= d2");
  }
  for (const DenseMatrix* m : {&u1, &u2, &v1, &v2}) {
    require_square(*m, "verify_double_witness");
    require_same_shape(*m, u1, "verify_double_witness");
    if (!is_unitary(*m, tol.unitarity)) {
      throw PreconditionError("verify_double_witness: operators must be unitary");
    }
  }
  DoubleWitnessReport rep;
  rep.d1 = d1;
  rep.d2 = d2;
  rep.gamma = operator_norm(commutator(u1, u2));
  rep.delta_u1v1 = operator_norm(twisted_commutator(u1, v1, 1.0 / d1));
  rep.delta_u2v2 = operator_norm(twisted_commutator(u2, v2, 1.0 / d2));
  rep.delta_u1v2 = operator_norm(commutator(u1, v2));
  rep.delta_u2v1 = operator_norm(commutator(u2, v1));
  rep.delta = std::max({rep.delta_u1v1, rep.delta_u2v2, rep.delta_u1v2, rep.delta_u2v1});

  const auto n = static_cast<double>(u1.rows());
  const double prod = static_cast<double>(d1) * static_cast<double>(d2);
  rep.start_bound_nominal = std::sqrt(rep.gamma) * prod / 2.0;
  rep.start_bound_rigorous = n * std::sqrt(rep.gamma);

  const auto eig1 = eig_normal(u1, tol);
  const Complex seed = eig1.eigenvalues[static_cast<std::size_t>(pick_phase_eigenvalue(eig1.eigenvalues))];
  const auto shared = shared_approx_eigenvector_normal(u1, u2, seed, tol);
  const DenseMatrix w1 = (std::conj(shared.lambda) / std::abs(shared.lambda)) * u1;
  const DenseMatrix w2 = (std::conj(shared.mu) / std::abs(shared.mu)) * u2;
  const DenseVector& psi = shared.vector;
  rep.start_error_u1 = (w1 * psi - psi).norm();
  rep.start_error_u2 = (w2 * psi - psi).norm();
  const double offset1 = std::abs(psi.dot(w1 * psi) - 1.0);
  const double offset2 = std::abs(psi.dot(w2 * psi) - 1.0);
  if (rep.start_error_u1 > rep.start_bound_nominal + 1e-12 ||
      rep.start_error_u2 > rep.start_bound_nominal + 1e-12) {
    rep.failures.emplace_back("start vector error above sqrt(gamma) d1 d2 / 2");
  }

  const auto [i_min, i_max] = orbit_window(d1);
  const auto [j_min, j_max] = orbit_window(d2);
  DenseMatrix states(u1.rows(), static_cast<Index>(d1) * d2);
  Index col = 0;
  for (long i = i_min; i <= i_max; ++i) {
    const DenseMatrix v1i = unitary_power(v1, i);
    for (long j = j_min; j <= j_max; ++j) {
      const DenseVector state = v1i * (unitary_power(v2, j) * psi);
      states.col(col++) = state;
      DoubleOrbitPoint pt;
      pt.i = i;
      pt.j = j;
      pt.deviation_u1 = std::abs(state.dot(w1 * state) -
                                 std::polar(1.0, kTwoPi * static_cast<double>(i) / d1));
      pt.deviation_u2 = std::abs(state.dot(w2 * state) -
                                 std::polar(1.0, kTwoPi * static_cast<double>(j) / d2));
      const double steps = static_cast<double>(std::labs(i) + std::labs(j)) * rep.delta;
      pt.bound_instance = std::max(offset1, offset2) + steps;
      pt.bound_nominal = rep.start_bound_nominal + steps;
      if (pt.deviation_u1 > offset1 + steps + 1e-10 || pt.deviation_u2 > offset2 + steps + 1e-10) {
        rep.expectations_within_instance = false;
      }
      if (std::max(pt.deviation_u1, pt.deviation_u2) > pt.bound_nominal + 1e-10) {
        rep.expectations_within_nominal = false;
      }
      rep.points.push_back(pt);
    }
  }
  if (!rep.expectations_within_instance) rep.failures.emplace_back("expectation bound (instance)");
  if (!rep.expectations_within_nominal) rep.failures.emplace_back("expectation bound (nominal form)");

  rep.gram = gram_independent(states);
  rep.independent = rep.gram.rank == static_cast<Index>(d1) * d2;
  if (!rep.gram.diagonally_dominant) rep.failures.emplace_back("pairwise overlap >= 1/(n-1)");
  if (!rep.independent) rep.failures.emplace_back("Gram matrix rank below d1 d2");

  const auto cert = certify_double(d1, d2, rep.gamma, rep.delta);
  rep.threshold_rhs = cert.slack + (std::sqrt(rep.gamma) * prod + (d1 + d2) * rep.delta);
  rep.threshold_lhs = std::sqrt(rep.gamma) * prod + (d1 + d2) * rep.delta;
  rep.threshold_holds = cert.method == CertMethod::double_pair;
  if (!rep.threshold_holds) rep.failures.emplace_back("two-pair threshold inequality");
  return rep;
}

}  // namespace twc
