#ifndef TWC_TESTS_SUPPORT_HPP
#define TWC_TESTS_SUPPORT_HPP

// Seeded generators and independent reference computations for the tests.

#include "twc/linalg.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

namespace twc::test {

/// splitmix64 stream; small and fully specified so property tests are
/// reproducible across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform(double a, double b) { return a + (b - a) * uniform(); }
  long integer(long lo, long hi) {
    return lo + static_cast<long>(next() % static_cast<std::uint64_t>(hi - lo + 1));
  }
  /// Box-Muller.
  double gauss() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
  }
  Complex complex_gauss() { return {gauss(), gauss()}; }

 private:
  std::uint64_t state_;
};

inline DenseMatrix random_matrix(Rng& rng, Index rows, Index cols) {
  DenseMatrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) m(i, j) = rng.complex_gauss();
  }
  return m;
}

inline DenseMatrix random_hermitian(Rng& rng, Index n) {
  const DenseMatrix g = random_matrix(rng, n, n);
  return 0.5 * (g + g.adjoint());
}

/// Unitary from the Gram-Schmidt of a Gaussian matrix (not the library's Haar routine).
inline DenseMatrix random_unitary(Rng& rng, Index n) {
  DenseMatrix q = random_matrix(rng, n, n);
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < j; ++i) q.col(j) -= q.col(i).dot(q.col(j)) * q.col(i);
    q.col(j).normalize();
  }
  return q;
}

/// Q diag(lambda) Q^dag with a random unitary Q.
inline DenseMatrix normal_with_spectrum(Rng& rng, const std::vector<Complex>& lambda) {
  const auto n = static_cast<Index>(lambda.size());
  const DenseMatrix q = random_unitary(rng, n);
  DenseVector d(n);
  for (Index i = 0; i < n; ++i) d(i) = lambda[static_cast<std::size_t>(i)];
  return q * d.asDiagonal() * q.adjoint();
}

inline std::vector<Complex> random_spectrum(Rng& rng, Index n) {
  std::vector<Complex> out;
  for (Index i = 0; i < n; ++i) out.push_back(rng.complex_gauss());
  return out;
}

/// Eigenvalues of a real symmetric matrix by cyclic Jacobi rotations, ascending.
inline std::vector<double> jacobi_eigenvalues(RealMatrix a) {
  const Index n = a.rows();
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (Index p = 0; p < n; ++p) {
      for (Index q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    }
    if (off < 1e-30 * std::max(1.0, a.squaredNorm())) break;
    for (Index p = 0; p < n; ++p) {
      for (Index q = p + 1; q < n; ++q) {
        if (a(p, q) == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (Index k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Index k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
      }
    }
  }
  std::vector<double> out;
  for (Index i = 0; i < n; ++i) out.push_back(a(i, i));
  std::sort(out.begin(), out.end());
  return out;
}

/// Singular values, descending, as square roots of the eigenvalues of M^dag M.
/// The Hermitian Gram matrix is handled through its real embedding
/// [[Re, -Im], [Im, Re]], whose spectrum is that of M^dag M twice over.
inline std::vector<double> singular_values_gram(const DenseMatrix& m) {
  const DenseMatrix g = m.adjoint() * m;
  const Index n = g.rows();
  RealMatrix e(2 * n, 2 * n);
  e.topLeftCorner(n, n) = g.real();
  e.bottomRightCorner(n, n) = g.real();
  e.topRightCorner(n, n) = -g.imag();
  e.bottomLeftCorner(n, n) = g.imag();
  const auto doubled = jacobi_eigenvalues(e);
  std::vector<double> s;
  for (std::size_t i = 0; i < doubled.size(); i += 2) {
    s.push_back(std::sqrt(std::max(0.0, 0.5 * (doubled[i] + doubled[i + 1]))));
  }
  std::sort(s.rbegin(), s.rend());
  return s;
}

inline double pk_norm_gram(const DenseMatrix& m, double p, Index k) {
  const auto s = singular_values_gram(m);
  if (std::isinf(p)) return s.front();
  double acc = 0.0;
  for (Index i = 0; i < k && i < static_cast<Index>(s.size()); ++i) {
    acc += std::pow(s[static_cast<std::size_t>(i)], p);
  }
  return std::pow(acc, 1.0 / p);
}

/// min over permutations, by enumeration.
inline double spectral_distance_bruteforce(std::vector<Complex> a, const std::vector<Complex>& b,
                                           double p) {
  std::vector<std::size_t> perm(a.size());
  std::iota(perm.begin(), perm.end(), 0);
  double best = kInf;
  do {
    double acc = 0.0;
    for (std::size_t j = 0; j < perm.size(); ++j) {
      const double d = std::abs(a[perm[j]] - b[j]);
      acc = std::isinf(p) ? std::max(acc, d) : acc + std::pow(d, p);
    }
    best = std::min(best, std::isinf(p) ? acc : std::pow(acc, 1.0 / p));
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

/// Characteristic polynomial coefficients (monic, highest first) by
/// Faddeev-LeVerrier, roots by Durand-Kerner.
inline std::vector<Complex> eigenvalues_by_polynomial(const DenseMatrix& a) {
  const Index n = a.rows();
  std::vector<Complex> c(static_cast<std::size_t>(n) + 1);
  c[0] = 1.0;
  DenseMatrix m = DenseMatrix::Zero(n, n);
  for (Index k = 1; k <= n; ++k) {
    m = a * m + c[static_cast<std::size_t>(k - 1)] * DenseMatrix::Identity(n, n);
    c[static_cast<std::size_t>(k)] = -(a * m).trace() / static_cast<double>(k);
  }
  const auto poly = [&](Complex z) {
    Complex acc = 0.0;
    for (const auto& ci : c) acc = acc * z + ci;
    return acc;
  };
  std::vector<Complex> roots;
  const Complex base(0.4, 0.9);
  for (Index i = 0; i < n; ++i) roots.push_back(std::pow(base, static_cast<double>(i)));
  for (int it = 0; it < 2000; ++it) {
    double change = 0.0;
    for (std::size_t i = 0; i < roots.size(); ++i) {
      Complex denom = 1.0;
      for (std::size_t j = 0; j < roots.size(); ++j) {
        if (j != i) denom *= roots[i] - roots[j];
      }
      const Complex step = poly(roots[i]) / denom;
      roots[i] -= step;
      change = std::max(change, std::abs(step));
    }
    if (change < 1e-15) break;
  }
  return roots;
}

/// Minimum number of points meeting every interval, by trying every subset of
/// the interval end points.
struct SimpleInterval {
  double left;
  double right;
};

inline int exhaustive_transversal(const std::vector<SimpleInterval>& ivs) {
  std::vector<double> candidates;
  for (const auto& iv : ivs) {
    candidates.push_back(iv.left);
    candidates.push_back(iv.right);
  }
  const auto m = candidates.size();
  if (ivs.empty()) return 0;
  int best = static_cast<int>(ivs.size());
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << m); ++mask) {
    const int size = std::popcount(mask);
    if (size >= best) continue;
    bool all = true;
    for (const auto& iv : ivs) {
      bool hit = false;
      for (std::size_t c = 0; c < m && !hit; ++c) {
        if ((mask >> c) & 1U) hit = candidates[c] >= iv.left && candidates[c] <= iv.right;
      }
      if (!hit) {
        all = false;
        break;
      }
    }
    if (all) best = size;
  }
  return best;
}

}  // namespace twc::test

#endif
