#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qcap/ensembles.hpp"

namespace qcap {

/// Energy constraint Tr Hρ ≤ bound. Requires bound > minimal energy level.
class ConstraintSpec {
 public:
  ConstraintSpec(Hamiltonian h, double bound);

  const Hamiltonian& hamiltonian() const { return h_; }
  double bound() const { return bound_; }
  double min_energy() const { return h_.min_energy(); }

 private:
  Hamiltonian h_;
  double bound_;
};

struct OptimizerOptions {
  int restarts = 16;
  std::uint64_t seed = 0;
  int max_iterations = 3000;
  /// Stop once the objective gains less than this over `patience` iterations.
  double stall = 1e-13;
  int patience = 20;
  int probe_restarts = 16;
  /// Run restarts on worker threads; the reduction is the same either way.
  bool parallel = false;
  Tolerances tol{};
};

struct OptimalityCertificate {
  double lagrangian_gap = 0.0;      // probe maximum − optimum (≤ 0 is best)
  double slackness_residual = 0.0;  // |λ (Tr Hρ̄ − bound)|
  double member_residual = 0.0;     // max |value at member − optimum| over heavy members
  int n_probe_restarts = 0;
  bool passed = false;
  std::optional<Vector> violating_state;
};

struct CapacityResult {
  double value = 0.0;  // nats
  std::optional<Ensemble> ensemble;
  std::optional<DensityMatrix> state;  // barycenter of `ensemble`, or the C_ea optimizer
  double multiplier = 0.0;             // λ
  int iterations = 0;
  int best_restart = 0;
  OptimalityCertificate certificate;
  bool converged = false;
  std::vector<double> trace;  // objective after each accepted iteration
};

/// χ-function: maximum of χ(Φ(μ)) over pure-state ensembles with barycenter ρ
/// (at most d_A² members). The certificate holds the final Riemannian
/// gradient norm in `lagrangian_gap`.
CapacityResult chi_function(const KrausChannel& phi, const DensityMatrix& rho,
                            const OptimizerOptions& opts = {});

/// Energy-constrained χ-capacity by alternating weight / state ascent with the
/// multiplier re-bisected at every weight update.
CapacityResult chi_capacity(const KrausChannel& phi, const ConstraintSpec& c,
                            const OptimizerOptions& opts = {});

/// Maximal-distance certificate in Lagrangian form: the maximum over pure φ of
///   H(Φ(φ)‖Φ(ρ̄)) − λ(⟨φ|H|φ⟩ − bound)
/// must not exceed χ(Φ(μ)), and heavy members of μ must attain it.
OptimalityCertificate certify_optimality(const KrausChannel& phi, const Ensemble& mu,
                                         const ConstraintSpec& c, double multiplier,
                                         const OptimizerOptions& opts = {});

/// I(Φ,ρ) = H(ρ) + H(Φ(ρ)) − H(Φ̂(ρ)), cross-checked against the
/// relative-entropy form on the purification.
double channel_mutual_information(const KrausChannel& phi, const DensityMatrix& rho,
                                  const Tolerances& tol = {});
/// H(Φ⊗Id(|φ_ρ⟩⟨φ_ρ|) ‖ Φ(ρ)⊗ϱ) alone.
double channel_mutual_information_relative(const KrausChannel& phi, const DensityMatrix& rho,
                                           const Tolerances& tol = {});
/// Hermitian gradient −ln ρ − Φ*(ln Φ(ρ)) + Φ̂*(ln Φ̂(ρ)); exact directional
/// derivative along traceless Hermitian directions.
Matrix mutual_information_gradient(const KrausChannel& phi, const Matrix& rho,
                                   const Tolerances& tol = {});

/// Energy-constrained entanglement-assisted capacity by conditional gradient
/// from the Gibbs state. The certificate holds the final duality gap.
CapacityResult ea_capacity(const KrausChannel& phi, const ConstraintSpec& c,
                           const OptimizerOptions& opts = {});

struct GapConditions {
  double transitive_min = 0.0;  // sampled min of ‖Φ(|φ⟩⟨ψ|)‖_F over orthonormal pairs
  bool transitive = false;
  CqCheck cq_hamiltonian_basis;
  CqCheck cq_canonical_basis;
  bool discrete_cq = false;  // in either tested basis
  std::optional<bool> degradable;
  std::string degradable_source;  // "certificate", "cq-orthogonal-supports" or empty
  double eigenpair_coherence = 0.0;  // max ‖Φ(|φ⟩⟨ψ|)‖_F over H eigenvectors, distinct levels
  double optimizer_min_eigenvalue = 0.0;
  bool full_rank_optimizer = false;
};

struct GapReport {
  CapacityResult chi;
  CapacityResult ea;
  double gap = 0.0;
  GapConditions conditions;
  std::vector<std::string> triggered;
};

/// Runs both optimizers and evaluates the sufficient conditions for a strict gap.
/// Throws ValidationError when a supplied Θ fails verify_degrading.
GapReport capacity_gap(const KrausChannel& phi, const ConstraintSpec& c,
                       const OptimizerOptions& opts = {},
                       const std::optional<KrausChannel>& degrading = std::nullopt);

double coherent_information(const KrausChannel& phi, const DensityMatrix& rho,
                            const Tolerances& tol = {});

struct CoherentInfoRoutes {
  double value = 0.0;  // χ(Φ(μ)) − χ(Φ̂(μ)) on the eigen-ensemble of ρ
  double chi_output = 0.0;
  double chi_environment = 0.0;
  std::optional<double> degrading_disturbance;  // Δ^Θχ(Φ(μ)) when Θ is supplied
};

/// Coherent information through the χ-quantities of the eigen-ensemble.
/// Throws ValidationError when a supplied Θ fails verify_degrading.
CoherentInfoRoutes ci_via_chi(const KrausChannel& phi, const DensityMatrix& rho,
                              const std::optional<KrausChannel>& degrading = std::nullopt,
                              const Tolerances& tol = {});

}  // namespace qcap
