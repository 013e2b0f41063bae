#include "twc/models.hpp"

#include "twc/error.hpp"
#include "twc/svn_minimum.hpp"

#include <algorithm>
#include <random>

namespace twc {

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::clock_block: return "clock-block";
    case ModelKind::tensor_double: return "tensor-double";
    case ModelKind::flat_band: return "flat-band";
  }
  return "unknown";
}

ModelKind model_kind_from_string(const std::string& name) {
  for (auto k : {ModelKind::clock_block, ModelKind::tensor_double, ModelKind::flat_band}) {
    if (to_string(k) == name) return k;
  }
  throw PreconditionError("unknown model kind '" + name + "'");
}

DenseMatrix hermitian_perturbation(Index n, std::uint64_t seed) {
  if (n < 1) throw DimensionError("hermitian_perturbation: dimension must be positive");
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
  DenseMatrix k = 0.5 * (g + g.adjoint());
  k /= operator_norm(k);
  return 0.5 * (k + k.adjoint());
}

namespace {

// Seed streams; fixed so that a spec reproduces the same instance.
enum Stream : std::uint64_t {
  kLevels = 10,
  kExcitedBasis = 11,
  kRotation = 12,
  kHamiltonianNoise = 13,
  kSymmetryNoise = 20,
};

DenseMatrix kron(const DenseMatrix& a, const DenseMatrix& b) {
  DenseMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

DenseMatrix direct_sum(const DenseMatrix& a, const DenseMatrix& b) {
  DenseMatrix out = DenseMatrix::Zero(a.rows() + b.rows(), a.cols() + b.cols());
  out.topLeftCorner(a.rows(), a.cols()) = a;
  out.bottomRightCorner(b.rows(), b.cols()) = b;
  return out;
}

struct Assembled {
  DenseMatrix hamiltonian;
  std::vector<DenseMatrix> symmetries;
  BandSpec band;
};

// Code operators act on the code space and on every excited copy of it.
Assembled assemble(const ModelSpec& spec, const std::vector<DenseMatrix>& code_ops) {
  const Index nc = spec.code_dim();
  if (spec.n_excited < nc || spec.n_excited % nc != 0) {
    throw PreconditionError("model: n_excited must be a positive multiple of the code dimension " +
                            std::to_string(nc));
  }
  if (!(spec.gap > 0.0)) throw PreconditionError("model: gap must be positive");
  if (!(spec.width >= 0.0) || !(spec.perturbation >= 0.0) || !(spec.unitary_perturbation >= 0.0)) {
    throw PreconditionError("model: width and perturbation strengths must be >= 0");
  }
  const Index copies = spec.n_excited / nc;

  Eigen::VectorXd levels(copies);
  std::mt19937_64 gen(derive_seed(spec.seed, kLevels));
  std::uniform_real_distribution<double> uniform(spec.gap, 2.0 * spec.gap);
  for (Index l = 0; l < copies; ++l) {
    levels(l) = spec.kind == ModelKind::flat_band ? spec.gap : uniform(gen);
  }
  const DenseMatrix q = haar_unitary(spec.n_excited, derive_seed(spec.seed, kExcitedBasis));
  const DenseMatrix excited_levels =
      kron(levels.cast<Complex>().asDiagonal().toDenseMatrix(), identity(nc));

  DenseMatrix code_h = DenseMatrix::Zero(nc, nc);
  if (nc > 1) {
    for (Index j = 0; j < nc; ++j) {
      code_h(j, j) = spec.width * static_cast<double>(j) / static_cast<double>(nc - 1);
    }
  }

  Assembled out;
  out.hamiltonian = direct_sum(code_h, q * excited_levels * q.adjoint());
  for (const auto& op : code_ops) {
    out.symmetries.push_back(direct_sum(op, q * kron(identity(copies), op) * q.adjoint()));
  }

  if (spec.rotate_basis) {
    const DenseMatrix w = haar_unitary(spec.dim(), derive_seed(spec.seed, kRotation));
    out.hamiltonian = w * out.hamiltonian * w.adjoint();
    for (auto& s : out.symmetries) s = w * s * w.adjoint();
  }
  out.hamiltonian = 0.5 * (out.hamiltonian + out.hamiltonian.adjoint());
  if (spec.perturbation > 0.0) {
    out.hamiltonian +=
        spec.perturbation * hermitian_perturbation(spec.dim(), derive_seed(spec.seed, kHamiltonianNoise));
  }
  if (spec.unitary_perturbation > 0.0) {
    for (std::size_t i = 0; i < out.symmetries.size(); ++i) {
      const DenseMatrix k =
          hermitian_perturbation(spec.dim(), derive_seed(spec.seed, kSymmetryNoise + i));
      out.symmetries[i] = unitary_exp(k, spec.unitary_perturbation) * out.symmetries[i];
    }
  }
  out.band = lowest_band(out.hamiltonian, nc);
  return out;
}

double epsilon_of(const DenseMatrix& u, const BandSpec& band) {
  return operator_norm(commutator(u, band.hamiltonian));
}

}  // namespace

ClockModel clock_model(const ModelSpec& spec) {
  if (spec.kind == ModelKind::tensor_double) {
    throw PreconditionError("clock_model: use tensor_double_model for the tensor-double kind");
  }
  if (spec.g < 2) throw PreconditionError("clock_model: g must be >= 2");
  auto parts = assemble(spec, {clock_matrix(spec.g), shift_matrix(spec.g)});

  ClockModel m;
  m.spec = spec;
  m.band = std::move(parts.band);
  m.u = std::move(parts.symmetries[0]);
  m.v = std::move(parts.symmetries[1]);
  m.alpha = 1.0 / static_cast<double>(spec.g);
  m.epsilon_u = epsilon_of(m.u, m.band);
  m.epsilon_v = epsilon_of(m.v, m.band);
  m.delta = operator_norm(twisted_commutator(m.u, m.v, m.alpha));
  m.xi = (std::max(m.epsilon_u, m.epsilon_v) + m.band.width) / m.band.gap;
  m.xi_ok = m.xi < 1.0;
  return m;
}

TensorModel tensor_double_model(const ModelSpec& spec) {
  if (spec.kind != ModelKind::tensor_double) {
    throw PreconditionError("tensor_double_model: spec kind must be tensor-double");
  }
  if (spec.g < 2 || spec.g2 < 2) throw PreconditionError("tensor_double_model: g, g2 must be >= 2");
  const DenseMatrix i1 = identity(spec.g);
  const DenseMatrix i2 = identity(spec.g2);
  auto parts = assemble(spec, {kron(clock_matrix(spec.g), i2), kron(i1, clock_matrix(spec.g2)),
                               kron(shift_matrix(spec.g), i2), kron(i1, shift_matrix(spec.g2))});

  TensorModel m;
  m.spec = spec;
  m.band = std::move(parts.band);
  m.u1 = std::move(parts.symmetries[0]);
  m.u2 = std::move(parts.symmetries[1]);
  m.v1 = std::move(parts.symmetries[2]);
  m.v2 = std::move(parts.symmetries[3]);
  m.gamma = operator_norm(commutator(m.u1, m.u2));
  m.delta_u1v1 = operator_norm(twisted_commutator(m.u1, m.v1, 1.0 / static_cast<double>(spec.g)));
  m.delta_u2v2 = operator_norm(twisted_commutator(m.u2, m.v2, 1.0 / static_cast<double>(spec.g2)));
  m.delta_u1v2 = operator_norm(commutator(m.u1, m.v2));
  m.delta_u2v1 = operator_norm(commutator(m.u2, m.v1));
  for (const DenseMatrix* x : {&m.u1, &m.u2, &m.v1, &m.v2}) {
    m.epsilon = std::max(m.epsilon, epsilon_of(*x, m.band));
  }
  m.xi = (m.epsilon + m.band.width) / m.band.gap;
  m.xi_ok = m.xi < 1.0;
  return m;
}

ModelCertification certify_clock_model(const ClockModel& model, const CertifyOptions& options) {
  ModelCertification out;
  out.restriction = restrict_pair(model.u, model.v, model.band, model.alpha, NormSpec::op());
  out.certificate = certify_single(model.alpha, out.restriction.delta_out_bound, options);
  return out;
}

TensorCertification certify_tensor_model(const TensorModel& model) {
  TensorCertification out;
  const auto restrict_one = [&](const DenseMatrix& x) {
    const auto gs = ground_symmetry(x, model.band);
    out.xi = std::max(out.xi, gs.xi);
    return gs.restricted;
  };
  out.u1 = restrict_one(model.u1);
  out.u2 = restrict_one(model.u2);
  out.v1 = restrict_one(model.v1);
  out.v2 = restrict_one(model.v2);

  auto d1 = static_cast<int>(model.spec.g);
  auto d2 = static_cast<int>(model.spec.g2);
  const DenseMatrix* a1 = &out.u1;
  const DenseMatrix* b1 = &out.v1;
  const DenseMatrix* a2 = &out.u2;
  const DenseMatrix* b2 = &out.v2;
  if (d1 > d2) {
    std::swap(d1, d2);
    std::swap(a1, a2);
    std::swap(b1, b2);
  }
  out.witness = verify_double_witness(*a1, *a2, *b1, *b2, d1, d2);
  out.gamma = out.witness.gamma;
  out.delta = out.witness.delta;
  out.certificate = certify_double(d1, d2, out.gamma, out.delta);
  return out;
}

}  // namespace twc
