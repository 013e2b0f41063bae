#include "support.hpp"
#include "twc/certify.hpp"
#include "twc/error.hpp"
#include "twc/svn_minimum.hpp"

#include <catch_amalgamated.hpp>

using namespace twc;
using test::Rng;
using Catch::Approx;

namespace {

DenseMatrix kron(const DenseMatrix& a, const DenseMatrix& b) {
  DenseMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  }
  return out;
}

struct FourOps {
  DenseMatrix u1, u2, v1, v2;
};

FourOps tensor_pairs(Index d1, Index d2, double t, std::uint64_t seed) {
  FourOps ops{kron(clock_matrix(d1), identity(d2)), kron(identity(d1), clock_matrix(d2)),
              kron(shift_matrix(d1), identity(d2)), kron(identity(d1), shift_matrix(d2))};
  if (t > 0.0) {
    Rng rng(seed);
    const Index n = d1 * d2;
    for (DenseMatrix* m : {&ops.u1, &ops.u2, &ops.v1, &ops.v2}) {
      *m = unitary_exp(test::random_hermitian(rng, n), t) * *m;
    }
  }
  return ops;
}

// Arc system of the greedy certificate, rebuilt from the formula with no
// shared code, then handed to the exhaustive transversal.
int exhaustive_certificate(double alpha, double delta) {
  std::vector<test::SimpleInterval> ivs;
  const long jmax = static_cast<long>(std::floor(2.0 / delta));
  for (long j = -jmax; j <= jmax; ++j) {
    if (j == 0 || std::labs(j) * delta >= 2.0) continue;
    double c = std::fmod(alpha * j, 1.0);
    if (c < 0) c += 1.0;
    c *= 2.0 * kPi;
    const double h = std::acos(1.0 - std::labs(j) * delta);
    if (c - h <= 1e-12 || c + h >= 2.0 * kPi - 1e-12) continue;
    ivs.push_back({c - h, c + h});
  }
  // drop intervals containing another one; the transversal number is unchanged
  std::vector<test::SimpleInterval> minimal;
  for (std::size_t a = 0; a < ivs.size(); ++a) {
    bool contains_other = false;
    for (std::size_t b = 0; b < ivs.size() && !contains_other; ++b) {
      if (a == b) continue;
      const bool inside = ivs[b].left >= ivs[a].left - 1e-12 && ivs[b].right <= ivs[a].right + 1e-12;
      const bool same = std::abs(ivs[b].left - ivs[a].left) <= 1e-12 &&
                        std::abs(ivs[b].right - ivs[a].right) <= 1e-12;
      contains_other = inside && (!same || b < a);
    }
    if (!contains_other) minimal.push_back(ivs[a]);
  }
  if (minimal.size() > 9) return -1;
  return 1 + test::exhaustive_transversal(minimal);
}

DenseMatrix simplex_vectors(Index n) {
  // e_i - (1/n) sum e_j, normalized; mutual overlaps are -1/(n-1).
  DenseMatrix v = identity(n) - DenseMatrix::Constant(n, n, 1.0 / static_cast<double>(n));
  for (Index c = 0; c < n; ++c) v.col(c).normalize();
  return v;
}

}  // namespace

TEST_CASE("single-pair threshold") {
  CHECK(single_pair_threshold(2) == Approx(2.0).epsilon(1e-15));
  CHECK(single_pair_threshold(3) == Approx(0.5).epsilon(1e-15));
  // (2/3)(1 - sqrt(2)/2)
  CHECK(single_pair_threshold(4) == Approx(0.19526214587563503).epsilon(1e-14));
  CHECK_THROWS_AS(single_pair_threshold(1), PreconditionError);
}

TEST_CASE("eigenvalue arcs") {
  CHECK(eigenvalue_arc(0.0, 1.0).half_width == 0.0);
  CHECK(eigenvalue_arc(1.0, 1.0).half_width == Approx(kPi / 2));
  CHECK(eigenvalue_arc(2.0, 1.0).half_width == Approx(kPi));
  CHECK(eigenvalue_arc(0.5, -1.0).center == Approx(2 * kPi - 1.0));
  CHECK_THROWS_AS(eigenvalue_arc(2.5, 0.0), PreconditionError);
  CHECK_THROWS_AS(eigenvalue_arc(-0.1, 0.0), PreconditionError);
}

TEST_CASE("greedy transversal examples") {
  const auto c = certify_single(0.25, 0.5);
  CHECK(c.d_min == 3);
  CHECK(c.stabs.size() == 2);
  CHECK(c.method == CertMethod::greedy_transversal);
  CHECK(c.slack > 0.0);
  CHECK(recheck(c));

  for (double delta : {2.0, 2.5, 10.0}) {
    for (double alpha : {0.0, 0.1, 0.25, 0.77}) CHECK(certify_single(alpha, delta).d_min == 1);
  }
  for (int d = 2; d <= 8; ++d) {
    const auto cd = certify_single(1.0 / d, single_pair_threshold(d) - 1e-9);
    CHECK(cd.d_min >= d);
    CHECK(certify_single_closed_form(d, single_pair_threshold(d) - 1e-9).d_min == d);
    CHECK(certify_single_closed_form(d, single_pair_threshold(d)).d_min == 1);
  }
  CHECK_THROWS_AS(certify_single(1.0, 0.1), PreconditionError);
  CHECK_THROWS_AS(certify_single(0.3, -0.1), PreconditionError);
}

TEST_CASE("exact case through rational detection") {
  CHECK(certify_single(0.25, 0.0).d_min == 4);
  CHECK(certify_single(0.25, 0.0).method == CertMethod::exact_stone_von_neumann);
  CHECK(certify_single(0.4, 0.0).d_min == 5);
  CHECK(certify_single(0.0, 0.0).d_min == 1);
  CHECK(certify_single(3.0 / 7.0, 0.0).d_min == 7);
  CHECK_THROWS_AS(certify_single(1.0 / std::sqrt(2.0) - 0.5 + 1e-7 * kPi, 0.0), PreconditionError);
  const auto r = rational_approximation(0.375);
  REQUIRE(r);
  CHECK(r->first == 3);
  CHECK(r->second == 8);
  // tiny positive delta falls back to a larger evaluated delta
  const auto tiny = certify_single(1.0 / 3.0, 1e-12);
  CHECK(tiny.d_min == 3);
  CHECK_FALSE(tiny.note.empty());
}

TEST_CASE("greedy matches the exhaustive transversal") {
  Rng rng(909);
  int compared = 0;
  for (int trial = 0; trial < 4000 && compared < 400; ++trial) {
    const double alpha = rng.uniform();
    const double delta = rng.uniform(0.15, 2.0);
    const int exhaustive = exhaustive_certificate(alpha, delta);
    if (exhaustive < 0) continue;
    ++compared;
    REQUIRE(certify_single(alpha, delta, {false, 1e-12}).d_min == exhaustive);
  }
  CHECK(compared == 400);
}

TEST_CASE("minimal intervals and stabbing on hand-made inputs") {
  const std::vector<Interval> ivs = {{1.0, 2.0, 1}, {1.2, 1.8, 2}, {1.5, 3.0, 3}, {2.5, 2.7, 4},
                                     {2.5, 2.7, 5}};
  const auto minimal = minimal_intervals(ivs);
  REQUIRE(minimal.size() == 2);
  CHECK(minimal[0].index == 2);
  CHECK(minimal[1].index == 4);
  const auto stabs = greedy_stabs(minimal);
  REQUIRE(stabs.size() == 2);
  CHECK(stabs[0] == 1.8);
  CHECK(stabs[1] == 2.7);
}

TEST_CASE("certificate properties") {
  SECTION("monotone in delta and symmetric under alpha -> 1 - alpha") {
    Rng rng(1);
    for (int col = 0; col < 40; ++col) {
      const double alpha = rng.uniform(0.001, 0.999);
      int prev = 1 << 30;
      for (int i = 1; i <= 60; ++i) {
        const double delta = 2.2 * i / 60.0;
        const int d = certify_single(alpha, delta, {false, 1e-12}).d_min;
        REQUIRE(d <= prev);
        prev = d;
        REQUIRE(certify_single(1.0 - alpha, delta, {false, 1e-12}).d_min == d);
      }
    }
  }
  SECTION("soundness against the minimum twisted commutator") {
    for (int a = 0; a < 40; ++a) {
      const double alpha = (a + 0.5) / 40.0;
      for (int i = 1; i <= 40; ++i) {
        const double delta = 2.0 * i / 41.0;
        const int d = certify_single(alpha, delta, {false, 1e-12}).d_min;
        for (int g = 1; g < d; ++g) REQUIRE(delta < lambda_min(g, alpha, NormSpec::op()));
        REQUIRE(certify_lambda(alpha, delta).d_min >= d);
      }
    }
  }
}

TEST_CASE("lambda exclusion certificate") {
  const auto c = certify_lambda(0.25, 0.5);
  for (int g = 1; g < c.d_min; ++g) CHECK(0.5 < lambda_min(g, 0.25, NormSpec::op()));
  CHECK(lambda_min(c.d_min, 0.25, NormSpec::op()) <= 0.5);
  CHECK(recheck(c));
  CHECK(c.slack > 0.0);
}

TEST_CASE("orbit expectations") {
  SECTION("exact clock and shift") {
    for (Index g = 2; g <= 7; ++g) {
      const auto pair = make_twisted_pair(clock_matrix(g), shift_matrix(g), 1.0 / g);
      const auto rep = orbit_expectations(pair);
      CHECK(rep.points.size() == static_cast<std::size_t>(g));
      for (const auto& pt : rep.points) CHECK(pt.deviation < 1e-12);
    }
  }
  SECTION("perturbed pairs obey |j| delta") {
    Rng rng(3);
    for (int trial = 0; trial < 60; ++trial) {
      const Index g = rng.integer(3, 8);
      const Index n = g + rng.integer(0, 4);
      DenseMatrix c = DenseMatrix::Identity(n, n);
      DenseMatrix s = DenseMatrix::Identity(n, n);
      c.topLeftCorner(g, g) = clock_matrix(g);
      s.topLeftCorner(g, g) = shift_matrix(g);
      const double t = rng.uniform(0.0, 0.02);
      const DenseMatrix u = unitary_exp(test::random_hermitian(rng, n), t) * c;
      const DenseMatrix v = unitary_exp(test::random_hermitian(rng, n), t) * s;
      const auto pair = make_twisted_pair(u, v, 1.0 / g);
      const auto rep = orbit_expectations(pair, std::make_pair(-3L, 3L));
      for (const auto& pt : rep.points) {
        REQUIRE(pt.deviation <= std::labs(pt.j) * pair.delta + 1e-10);
        if (pt.j == 0) REQUIRE(pt.deviation < 1e-12);
      }
    }
  }
  SECTION("zero twist needs a range") {
    const auto pair = make_twisted_pair(identity(2), identity(2), 0.0);
    CHECK_THROWS_AS(orbit_expectations(pair), PreconditionError);
    CHECK_NOTHROW(orbit_expectations(pair, std::make_pair(-1L, 1L)));
  }
}

TEST_CASE("overlap bound") {
  CHECK(overlap_bound(0.0, 0.3, 1.7) == 0.0);
  // sqrt(0.04) csc(pi/4)
  CHECK(overlap_bound(0.02, 0.0, kPi) == Approx(0.28284271247461906).epsilon(1e-14));
  CHECK(overlap_bound(0.02, 0.5, 0.5) == kInf);
  CHECK(overlap_bound(0.02, 0.0, 1e-8) > 1e5);
  // circular distance: 2 pi - 0.1 is as close to 0 as 0.1
  CHECK(overlap_bound(0.02, 0.0, 2 * kPi - 0.1) == Approx(overlap_bound(0.02, 0.0, 0.1)));
  CHECK_THROWS_AS(overlap_bound(-1.0, 0.0, 1.0), PreconditionError);
}

TEST_CASE("Gram independence") {
  const auto ortho = gram_independent(identity(5));
  CHECK(ortho.diagonally_dominant);
  CHECK(ortho.rank == 5);
  CHECK(ortho.min_eigenvalue == Approx(1.0));

  for (Index n = 3; n <= 7; ++n) {
    const auto tight = gram_independent(simplex_vectors(n));
    CHECK(tight.max_overlap == Approx(1.0 / (n - 1)).epsilon(1e-12));
    CHECK_FALSE(tight.diagonally_dominant);
    CHECK(tight.rank == n - 1);
    CHECK(std::abs(tight.min_eigenvalue) < 1e-12);
  }

  Rng rng(6);
  for (int trial = 0; trial < 50; ++trial) {
    const Index n = rng.integer(2, 8);
    DenseMatrix v = identity(n) + 0.02 / n * test::random_matrix(rng, n, n);
    for (Index c = 0; c < n; ++c) v.col(c).normalize();
    const auto rep = gram_independent(v);
    REQUIRE(rep.diagonally_dominant);
    REQUIRE(rep.min_eigenvalue > 0.0);
    REQUIRE(rep.rank == n);
  }
  CHECK_THROWS_AS(gram_independent(2.0 * identity(2)), PreconditionError);
}

TEST_CASE("two-pair certificate") {
  for (int d1 = 2; d1 <= 5; ++d1) {
    for (int d2 = d1; d2 <= 5; ++d2) {
      const auto c = certify_double(d1, d2, 0.0, 0.0);
      CHECK(c.d_min == d1 * d2);
      CHECK(c.method == CertMethod::double_pair);
      CHECK(recheck(c));
    }
  }
  // sin^2(pi/4) / 9 / 4
  const double edge = 0.5 / 36.0;
  CHECK(certify_double(2, 2, 0.0, edge * (1 - 1e-12)).d_min == 4);
  CHECK(certify_double(2, 2, 0.0, edge * (1 + 1e-12)).method != CertMethod::double_pair);
  CHECK(certify_double(2, 2, 0.0, edge).slack == Approx(0.0).margin(1e-17));

  const auto c23 = certify_double(2, 3, 1e-6, 1e-4);
  CHECK(c23.d_min == 6);
  // rhs 0.5/25, lhs 6e-3 + 5e-4
  CHECK(c23.slack == Approx(0.02 - 0.0065).epsilon(1e-12));

  const auto fallback = certify_double(2, 3, 0.01, 0.3);
  CHECK(fallback.method == CertMethod::greedy_transversal);
  CHECK(fallback.d_min >= 2);
  CHECK(fallback.slack < 0.0);
  CHECK_THROWS_AS(certify_double(3, 2, 0.0, 0.0), PreconditionError);
}

TEST_CASE("two-pair witness") {
  SECTION("exact tensor products") {
    for (Index d1 = 2; d1 <= 3; ++d1) {
      for (Index d2 = d1; d2 <= 4; ++d2) {
        const auto ops = tensor_pairs(d1, d2, 0.0, 0);
        const auto rep = verify_double_witness(ops.u1, ops.u2, ops.v1, ops.v2, static_cast<int>(d1),
                                               static_cast<int>(d2));
        CHECK(rep.failures.empty());
        CHECK((rep.gram.gram - identity(d1 * d2)).norm() < 1e-12);
        CHECK(rep.independent);
        CHECK(rep.threshold_holds);
      }
    }
  }
  SECTION("perturbed inside the threshold") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      const auto ops = tensor_pairs(2, 3, 1e-7, seed);
      const auto rep = verify_double_witness(ops.u1, ops.u2, ops.v1, ops.v2, 2, 3);
      CHECK(rep.threshold_holds);
      CHECK(rep.gram.rank == 6);
      CHECK(rep.expectations_within_instance);
    }
  }
  SECTION("violating the threshold is flagged") {
    const auto ops = tensor_pairs(2, 2, 0.2, 4);
    const auto rep = verify_double_witness(ops.u1, ops.u2, ops.v1, ops.v2, 2, 2);
    CHECK_FALSE(rep.threshold_holds);
    CHECK_FALSE(rep.failures.empty());
    const bool names_threshold =
        std::find(rep.failures.begin(), rep.failures.end(), "two-pair threshold inequality") !=
        rep.failures.end();
    CHECK(names_threshold);
  }
}
