#include "twc/linalg.hpp"

#include "twc/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

namespace twc {

const Tolerances& default_tolerances() {
  static const Tolerances tol{};
  return tol;
}

void NormSpec::validate(Index rows, Index cols) const {
  if (!(p >= 1.0)) {
    throw PreconditionError("norm spec: p must be >= 1, got " + std::to_string(p));
  }
  if (k) {
    const Index min_dim = std::min(rows, cols);
    if (*k < 1 || *k > min_dim) {
      throw PreconditionError("norm spec: k = " + std::to_string(*k) + " outside [1, " +
                              std::to_string(min_dim) + "]");
    }
  }
}

Index NormSpec::effective_k(Index min_dim) const {
  return k ? std::min(*k, min_dim) : min_dim;
}

bool NormSpec::is_operator_norm() const {
  return std::isinf(p) || (k && *k == 1);
}

std::string NormSpec::label() const {
  if (std::isinf(p)) return "op";
  if (p == 2.0 && !k) return "fro";
  std::ostringstream os;
  os << "(" << p << "," << (k ? std::to_string(*k) : std::string("all")) << ")";
  return os.str();
}

// ---------------------------------------------------------------------------

DenseMatrix identity(Index n) { return DenseMatrix::Identity(n, n); }

DenseMatrix adjoint(const DenseMatrix& m) { return m.adjoint(); }

Complex twist_phase(double alpha) { return std::polar(1.0, 2.0 * kPi * alpha); }

void require_square(const DenseMatrix& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw DimensionError(std::string(what) + ": expected a non-empty square matrix, got " +
                         std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
}

void require_same_shape(const DenseMatrix& a, const DenseMatrix& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError(std::string(what) + ": shape mismatch " + std::to_string(a.rows()) +
                         "x" + std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) +
                         "x" + std::to_string(b.cols()));
  }
}

void require_finite(const DenseMatrix& m, const char* what) {
  if (!m.allFinite()) {
    throw PreconditionError(std::string(what) + ": matrix has non-finite entries");
  }
}

DenseMatrix twisted_commutator(const DenseMatrix& x, const DenseMatrix& y, double alpha) {
  require_square(x, "twisted_commutator");
  require_same_shape(x, y, "twisted_commutator");
  return x * y - twist_phase(alpha) * (y * x);
}

DenseMatrix commutator(const DenseMatrix& x, const DenseMatrix& y) {
  require_square(x, "commutator");
  require_same_shape(x, y, "commutator");
  return x * y - y * x;
}

double unitarity_defect(const DenseMatrix& m) {
  require_square(m, "unitarity_defect");
  return (m.adjoint() * m - identity(m.rows())).norm();
}

bool is_unitary(const DenseMatrix& m, double tol) {
  if (m.rows() != m.cols() || m.rows() == 0 || !m.allFinite()) return false;
  return unitarity_defect(m) <= tol;
}

double hermiticity_defect(const DenseMatrix& m) {
  require_square(m, "hermiticity_defect");
  return (m - m.adjoint()).norm() / std::max(1.0, m.norm());
}

double normality_defect(const DenseMatrix& a) {
  require_square(a, "normality_defect");
  const double scale = a.squaredNorm();
  if (scale == 0.0) return 0.0;
  return (a.adjoint() * a - a * a.adjoint()).norm() / scale;
}

DenseMatrix unitary_power(const DenseMatrix& u, long exponent) {
  require_square(u, "unitary_power");
  DenseMatrix base = exponent < 0 ? DenseMatrix(u.adjoint()) : u;
  unsigned long e = exponent < 0 ? static_cast<unsigned long>(-exponent)
                                 : static_cast<unsigned long>(exponent);
  DenseMatrix result = identity(u.rows());
  while (e > 0) {
    if (e & 1UL) result = result * base;
    e >>= 1UL;
    if (e > 0) base = base * base;
  }
  return result;
}

// ---------------------------------------------------------------------------

std::vector<double> singular_values(const DenseMatrix& m) {
  if (m.size() == 0) return {};
  Eigen::JacobiSVD<DenseMatrix> svd(m);
  const auto& s = svd.singularValues();
  return {s.data(), s.data() + s.size()};
}

namespace {

double pk_from_singular_values(const std::vector<double>& sv, double p, Index k) {
  if (sv.empty() || k == 0) return 0.0;
  const double top = sv.front();
  if (top == 0.0) return 0.0;
  if (std::isinf(p)) return top;
  double acc = 0.0;
  for (Index i = 0; i < k; ++i) acc += std::pow(sv[static_cast<std::size_t>(i)] / top, p);
  return top * std::pow(acc, 1.0 / p);
}

}  // namespace

double schatten_kyfan_norm(const DenseMatrix& m, const NormSpec& spec) {
  spec.validate(m.rows(), m.cols());
  const auto sv = singular_values(m);
  return pk_from_singular_values(sv, spec.p, spec.effective_k(std::min(m.rows(), m.cols())));
}

double embedded_norm(const DenseMatrix& m, const NormSpec& spec) {
  if (!(spec.p >= 1.0)) throw PreconditionError("norm spec: p must be >= 1");
  if (spec.k && *spec.k < 1) throw PreconditionError("norm spec: k must be >= 1");
  const auto sv = singular_values(m);
  return pk_from_singular_values(sv, spec.p, spec.effective_k(std::min(m.rows(), m.cols())));
}

double operator_norm(const DenseMatrix& m) {
  const auto sv = singular_values(m);
  return sv.empty() ? 0.0 : sv.front();
}

double frobenius_norm(const DenseMatrix& m) { return m.norm(); }

// ---------------------------------------------------------------------------

bool spectral_order(const Complex& a, const Complex& b) {
  const double ma = std::abs(a);
  const double mb = std::abs(b);
  if (ma != mb) return ma > mb;
  if (a.real() != b.real()) return a.real() > b.real();
  return a.imag() < b.imag();
}

namespace {

std::vector<Index> sorted_order(const std::vector<Complex>& values) {
  std::vector<Index> order(values.size());
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index i, Index j) {
    return spectral_order(values[static_cast<std::size_t>(i)], values[static_cast<std::size_t>(j)]);
  });
  return order;
}

double column_residual(const DenseMatrix& a, const DenseVector& x, const Complex& lambda) {
  return (a * x - lambda * x).norm();
}

}  // namespace

EigDecomp eig_normal(const DenseMatrix& a, const Tolerances& tol) {
  require_square(a, "eig_normal");
  require_finite(a, "eig_normal");
  const double defect = normality_defect(a);
  if (defect > tol.normality) {
    throw PreconditionError("eig_normal: input is not normal (relative defect " +
                            std::to_string(defect) + ")");
  }
  Eigen::ComplexSchur<DenseMatrix> schur(a);
  if (schur.info() != Eigen::Success) {
    throw NumericalError("eig_normal: Schur reduction did not converge");
  }
  const DenseMatrix& t = schur.matrixT();
  const DenseMatrix& q = schur.matrixU();
  const Index n = a.rows();

  std::vector<Complex> raw(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) raw[static_cast<std::size_t>(i)] = t(i, i);
  const auto order = sorted_order(raw);

  EigDecomp out;
  out.eigenvalues.resize(static_cast<std::size_t>(n));
  out.eigenvectors.resize(n, n);
  for (Index c = 0; c < n; ++c) {
    const Index src = order[static_cast<std::size_t>(c)];
    out.eigenvalues[static_cast<std::size_t>(c)] = raw[static_cast<std::size_t>(src)];
    out.eigenvectors.col(c) = q.col(src);
    out.residual = std::max(out.residual, column_residual(a, out.eigenvectors.col(c),
                                                          out.eigenvalues[static_cast<std::size_t>(c)]));
  }
  if (out.residual > tol.eig_residual * std::max(1.0, a.norm())) {
    throw NumericalError("eig_normal: eigenpair residual " + std::to_string(out.residual) +
                         " above tolerance");
  }
  return out;
}

GeneralEig eig_general(const DenseMatrix& a, bool with_vectors) {
  require_square(a, "eig_general");
  require_finite(a, "eig_general");
  Eigen::ComplexEigenSolver<DenseMatrix> solver(a, with_vectors);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("eig_general: eigenvalue iteration did not converge");
  }
  const auto& vals = solver.eigenvalues();
  std::vector<Complex> raw(vals.data(), vals.data() + vals.size());
  const auto order = sorted_order(raw);

  GeneralEig out;
  out.eigenvalues.reserve(raw.size());
  for (Index src : order) out.eigenvalues.push_back(raw[static_cast<std::size_t>(src)]);
  if (with_vectors) {
    const Index n = a.rows();
    out.eigenvectors.resize(n, n);
    out.residuals.resize(static_cast<std::size_t>(n));
    for (Index c = 0; c < n; ++c) {
      DenseVector x = solver.eigenvectors().col(order[static_cast<std::size_t>(c)]);
      x.normalize();
      out.eigenvectors.col(c) = x;
      out.residuals[static_cast<std::size_t>(c)] =
          column_residual(a, x, out.eigenvalues[static_cast<std::size_t>(c)]);
    }
  }
  return out;
}

HermitianEig eig_hermitian(const DenseMatrix& h, const Tolerances& tol) {
  require_square(h, "eig_hermitian");
  require_finite(h, "eig_hermitian");
  if (hermiticity_defect(h) > tol.hermiticity) {
    throw PreconditionError("eig_hermitian: input is not Hermitian");
  }
  const DenseMatrix sym = 0.5 * (h + h.adjoint());
  Eigen::SelfAdjointEigenSolver<DenseMatrix> solver(sym);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("eig_hermitian: solver did not converge");
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

DenseMatrix unitary_exp(const DenseMatrix& k, double t, const Tolerances& tol) {
  const auto eig = eig_hermitian(k, tol);
  DenseVector phases(eig.eigenvalues.size());
  for (Index i = 0; i < phases.size(); ++i) phases(i) = std::polar(1.0, t * eig.eigenvalues(i));
  return eig.eigenvectors * phases.asDiagonal() * eig.eigenvectors.adjoint();
}

DenseMatrix polar_unitary(const DenseMatrix& m) {
  require_square(m, "polar_unitary");
  require_finite(m, "polar_unitary");
  Eigen::JacobiSVD<DenseMatrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  if (svd.info() != Eigen::Success) {
    throw NumericalError("polar_unitary: SVD failed");
  }
  return svd.matrixU() * svd.matrixV().adjoint();
}

DenseMatrix haar_unitary(Index n, std::uint64_t seed) {
  if (n < 1) throw DimensionError("haar_unitary: dimension must be positive");
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  DenseMatrix g(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      const double re = gauss(gen);
      const double im = gauss(gen);
      g(i, j) = Complex(re, im);
    }
  }
  Eigen::HouseholderQR<DenseMatrix> qr(g);
  DenseMatrix q = qr.householderQ();
  const DenseMatrix& r = qr.matrixQR();
  for (Index j = 0; j < n; ++j) {
    const double mag = std::abs(r(j, j));
    if (mag > 0.0) q.col(j) *= r(j, j) / mag;
  }
  return q;
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30U)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27U)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31U);
}

// ---------------------------------------------------------------------------

double spectral_distance(const std::vector<Complex>& a, const std::vector<Complex>& b, double p) {
  if (a.size() != b.size()) throw DimensionError("spectral_distance: spectra differ in size");
  if (!(p >= 1.0)) throw PreconditionError("spectral_distance: p must be >= 1");
  const auto n = static_cast<Index>(a.size());
  if (n == 0) return 0.0;
  RealMatrix dist(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      dist(i, j) = std::abs(a[static_cast<std::size_t>(i)] - b[static_cast<std::size_t>(j)]);
    }
  }
  if (std::isinf(p)) {
    const auto match = bottleneck_assignment(dist);
    double worst = 0.0;
    for (Index i = 0; i < n; ++i) worst = std::max(worst, dist(i, match[static_cast<std::size_t>(i)]));
    return worst;
  }
  RealMatrix cost = dist.array().pow(p).matrix();
  const auto match = hungarian_assignment(cost);
  double acc = 0.0;
  for (Index i = 0; i < n; ++i) acc += cost(i, match[static_cast<std::size_t>(i)]);
  return std::pow(acc, 1.0 / p);
}

double spectral_distance(const DenseMatrix& a, const DenseMatrix& b, double p,
                         const Tolerances& tol) {
  require_square(a, "spectral_distance");
  require_same_shape(a, b, "spectral_distance");
  const auto ea = eig_normal(a, tol);
  const auto eb = eig_normal(b, tol);
  return spectral_distance(ea.eigenvalues, eb.eigenvalues, p);
}

std::vector<Index> hungarian_assignment(const RealMatrix& cost) {
  const Index n = cost.rows();
  if (cost.cols() != n) throw DimensionError("hungarian_assignment: cost must be square");
  if (n == 0) return {};
  const double inf = std::numeric_limits<double>::infinity();
  const auto sz = static_cast<std::size_t>(n + 1);
  // Potentials u (rows), v (columns); match[col] = row, 1-based with 0 sentinel.
  std::vector<double> u(sz, 0.0), v(sz, 0.0);
  std::vector<Index> match(sz, 0), way(sz, 0);
  for (Index i = 1; i <= n; ++i) {
    match[0] = i;
    Index j0 = 0;
    std::vector<double> minv(sz, inf);
    std::vector<char> used(sz, 0);
    do {
      used[static_cast<std::size_t>(j0)] = 1;
      const Index i0 = match[static_cast<std::size_t>(j0)];
      double delta = inf;
      Index j1 = 0;
      for (Index j = 1; j <= n; ++j) {
        const auto js = static_cast<std::size_t>(j);
        if (used[js]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[static_cast<std::size_t>(i0)] - v[js];
        if (cur < minv[js]) {
          minv[js] = cur;
          way[js] = j0;
        }
        if (minv[js] < delta) {
          delta = minv[js];
          j1 = j;
        }
      }
      for (Index j = 0; j <= n; ++j) {
        const auto js = static_cast<std::size_t>(j);
        if (used[js]) {
          u[static_cast<std::size_t>(match[js])] += delta;
          v[js] -= delta;
        } else {
          minv[js] -= delta;
        }
      }
      j0 = j1;
    } while (match[static_cast<std::size_t>(j0)] != 0);
    do {
      const Index j1 = way[static_cast<std::size_t>(j0)];
      match[static_cast<std::size_t>(j0)] = match[static_cast<std::size_t>(j1)];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<Index> assignment(static_cast<std::size_t>(n), 0);
  for (Index j = 1; j <= n; ++j) {
    assignment[static_cast<std::size_t>(match[static_cast<std::size_t>(j)] - 1)] = j - 1;
  }
  return assignment;
}

namespace {

// Kuhn's augmenting-path matching restricted to edges with cost <= threshold.
bool augment(const RealMatrix& cost, double threshold, Index row, std::vector<char>& seen,
             std::vector<Index>& col_owner) {
  for (Index c = 0; c < cost.cols(); ++c) {
    const auto cs = static_cast<std::size_t>(c);
    if (cost(row, c) > threshold || seen[cs]) continue;
    seen[cs] = 1;
    if (col_owner[cs] < 0 || augment(cost, threshold, col_owner[cs], seen, col_owner)) {
      col_owner[cs] = row;
      return true;
    }
  }
  return false;
}

std::optional<std::vector<Index>> perfect_matching(const RealMatrix& cost, double threshold) {
  const Index n = cost.rows();
  std::vector<Index> col_owner(static_cast<std::size_t>(n), -1);
  for (Index r = 0; r < n; ++r) {
    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    if (!augment(cost, threshold, r, seen, col_owner)) return std::nullopt;
  }
  std::vector<Index> assignment(static_cast<std::size_t>(n), 0);
  for (Index c = 0; c < n; ++c) {
    assignment[static_cast<std::size_t>(col_owner[static_cast<std::size_t>(c)])] = c;
  }
  return assignment;
}

}  // namespace

std::vector<Index> bottleneck_assignment(const RealMatrix& cost) {
  const Index n = cost.rows();
  if (cost.cols() != n) throw DimensionError("bottleneck_assignment: cost must be square");
  if (n == 0) return {};
  std::vector<double> levels(cost.data(), cost.data() + cost.size());
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  std::size_t lo = 0;
  std::size_t hi = levels.size() - 1;
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (perfect_matching(cost, levels[mid])) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  auto result = perfect_matching(cost, levels[lo]);
  if (!result) throw NumericalError("bottleneck_assignment: no perfect matching");
  return *result;
}

}  // namespace twc
