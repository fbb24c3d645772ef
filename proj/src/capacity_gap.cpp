#include <cmath>
#include <limits>

#include "qcap/capacity.hpp"
#include "qcap/random.hpp"

namespace qcap {

namespace {

double coherence(const KrausChannel& phi, const Vector& a, const Vector& b) {
  return phi.apply(a * b.adjoint()).norm();
}

/// Sampled minimum of ‖Φ(|φ⟩⟨ψ|)‖ over orthonormal pairs, refined locally
/// around the best sample.
double transitive_minimum(const KrausChannel& phi, const Hamiltonian& h, std::uint64_t seed) {
  const int d = phi.dim_in();
  double best = std::numeric_limits<double>::infinity();
  Vector best_a;
  Vector best_b;
  auto consider = [&](const Vector& a, const Vector& b) {
    const double v = coherence(phi, a, b);
    if (v < best) {
      best = v;
      best_a = a;
      best_b = b;
    }
  };
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      if (i == j) continue;
      consider(Vector::Unit(d, i), Vector::Unit(d, j));
      consider(h.spectrum().vectors.col(i), h.spectrum().vectors.col(j));
    }
  std::seed_seq seq{static_cast<std::uint32_t>(seed), 0x7a5e1u};
  random::Rng rng(seq);
  for (int k = 0; k < 256; ++k) {
    const Matrix u = random::haar_unitary(d, rng);
    consider(u.col(0), u.col(1));
  }
  std::normal_distribution<double> n(0.0, 1.0);
  double scale = 0.1;
  for (int k = 0; k < 600 && best > 0.0; ++k) {
    Vector a = best_a;
    Vector b = best_b;
    for (int i = 0; i < d; ++i) {
      a[i] += scale * Complex(n(rng), n(rng));
      b[i] += scale * Complex(n(rng), n(rng));
    }
    a.normalize();
    b -= (a.adjoint() * b).value() * a;
    b.normalize();
    const double before = best;
    consider(a, b);
    if (best >= before) scale = std::max(scale * 0.97, 1e-6);
  }
  return best;
}

std::optional<bool> certify_cq_degradable(const KrausChannel& phi, const Matrix& basis,
                                          const Tolerances& tol) {
  std::vector<Matrix> ops;
  for (const Matrix& k : phi.kraus()) ops.push_back(k * basis);
  const KrausChannel rotated(std::move(ops), tol);
  std::vector<DensityMatrix> sigmas;
  for (int k = 0; k < phi.dim_in(); ++k)
    sigmas.push_back(DensityMatrix(rotated.apply(matrix_unit(phi.dim_in(), k, k)), tol));
  try {
    const KrausChannel theta = degrading_for_orthogonal_cq(sigmas, tol);
    const KrausChannel cq = cq_channel(sigmas, tol);
    if (!channels_equal(cq, rotated, 1e-8)) return std::nullopt;
    if (verify_degrading(cq, theta, 1e-8, tol).passed) return true;
  } catch (const NotApplicable&) {
  }
  return std::nullopt;
}

}  // namespace

GapReport capacity_gap(const KrausChannel& phi, const ConstraintSpec& c,
                       const OptimizerOptions& opts, const std::optional<KrausChannel>& degrading) {
  const Tolerances& tol = opts.tol;
  const Hamiltonian& h = c.hamiltonian();
  if (degrading) {
    const DegradingCheck check = verify_degrading(phi, *degrading, 1e-8, tol);
    if (!check.passed)
      throw ValidationError("degrading map fails verification, residual " + std::to_string(check.residual));
  }
  GapReport out;
  out.chi = chi_capacity(phi, c, opts);
  out.ea = ea_capacity(phi, c, opts);
  out.gap = out.ea.value - out.chi.value;

  GapConditions& k = out.conditions;
  k.transitive_min = transitive_minimum(phi, h, opts.seed);
  k.transitive = k.transitive_min > 1e-6;
  k.cq_hamiltonian_basis = is_discrete_cq(phi, h);
  k.cq_canonical_basis = is_discrete_cq(phi, std::nullopt);
  k.discrete_cq = k.cq_hamiltonian_basis.is_cq || k.cq_canonical_basis.is_cq;

  if (degrading) {
    k.degradable = true;
    k.degradable_source = "certificate";
  } else {
    const int d = phi.dim_in();
    std::optional<bool> auto_cert;
    if (k.cq_canonical_basis.is_cq) auto_cert = certify_cq_degradable(phi, Matrix::Identity(d, d), tol);
    if (!auto_cert && k.cq_hamiltonian_basis.is_cq)
      auto_cert = certify_cq_degradable(phi, h.spectrum().vectors, tol);
    if (auto_cert) {
      k.degradable = *auto_cert;
      k.degradable_source = "cq-orthogonal-supports";
    }
  }

  const HermitianEigen& spec = h.spectrum();
  for (Eigen::Index i = 0; i < spec.values.size(); ++i)
    for (Eigen::Index j = 0; j < spec.values.size(); ++j)
      if (i != j && std::abs(spec.values[i] - spec.values[j]) > tol.energy)
        k.eigenpair_coherence = std::max(
            k.eigenpair_coherence, coherence(phi, spec.vectors.col(i), spec.vectors.col(j)));

  k.optimizer_min_eigenvalue = eigh(out.chi.state->matrix()).values[0];
  k.full_rank_optimizer = k.optimizer_min_eigenvalue > 1e-6;

  const bool degradable = k.degradable.value_or(false);
  if (k.transitive) out.triggered.push_back("transitive");
  if (degradable && !k.discrete_cq) out.triggered.push_back("degradable-not-cq");
  if (degradable && k.eigenpair_coherence > 1e-6)
    out.triggered.push_back("degradable-eigenpair-coherence");
  if (!k.discrete_cq && k.full_rank_optimizer) out.triggered.push_back("full-rank-optimizer");
  return out;
}

double coherent_information(const KrausChannel& phi, const DensityMatrix& rho,
                            const Tolerances& tol) {
  if (rho.dim() != phi.dim_in()) throw ValidationError("state dimension does not match channel input");
  const KrausChannel comp = complementary(phi, tol);
  return spectral_entropy(phi.apply(rho.matrix()), tol.eig) -
         spectral_entropy(comp.apply(rho.matrix()), tol.eig);
}

CoherentInfoRoutes ci_via_chi(const KrausChannel& phi, const DensityMatrix& rho,
                              const std::optional<KrausChannel>& degrading,
                              const Tolerances& tol) {
  if (rho.dim() != phi.dim_in()) throw ValidationError("state dimension does not match channel input");
  const Ensemble mu = Ensemble::eigen_ensemble(rho, tol);
  CoherentInfoRoutes out;
  out.chi_output = chi_quantity(image(phi, mu, tol), tol);
  out.chi_environment = chi_quantity(image(complementary(phi, tol), mu, tol), tol);
  out.value = out.chi_output - out.chi_environment;
  if (degrading) {
    const DegradingCheck check = verify_degrading(phi, *degrading, 1e-8, tol);
    if (!check.passed)
      throw ValidationError("degrading map fails verification, residual " +
                            std::to_string(check.residual));
    out.degrading_disturbance = entropic_disturbance(*degrading, image(phi, mu, tol), tol);
  }
  return out;
}

}  // namespace qcap
