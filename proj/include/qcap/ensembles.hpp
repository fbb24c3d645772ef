#pragma once

#include <vector>

#include "qcap/channels.hpp"

namespace qcap {

struct Member {
  double weight;
  DensityMatrix state;
};

/// Finite ensemble {π_i, ρ_i}. Weights must be nonnegative and sum to one
/// within tol.prob; members lighter than tol.weight are dropped and the rest
/// renormalized. Member order is insertion order.
class Ensemble {
 public:
  explicit Ensemble(std::vector<Member> members, const Tolerances& tol = {});

  /// Ensemble of pure states |ψ_i⟩ (normalized here) with the given weights.
  static Ensemble of_pure(const std::vector<double>& weights, const std::vector<Vector>& states,
                          const Tolerances& tol = {});
  /// Spectral decomposition of ρ as a pure-state ensemble, largest eigenvalue first.
  static Ensemble eigen_ensemble(const DensityMatrix& rho, const Tolerances& tol = {});

  const std::vector<Member>& members() const { return members_; }
  std::size_t size() const { return members_.size(); }
  int dim() const { return members_.front().state.dim(); }

 private:
  std::vector<Member> members_;
};

DensityMatrix average_state(const Ensemble& mu, const Tolerances& tol = {});

/// χ(μ) = Σ π_i H(ρ_i‖ρ̄), cross-checked against H(ρ̄) − Σ π_i H(ρ_i).
double chi_quantity(const Ensemble& mu, const Tolerances& tol = {});
/// H(ρ̄) − Σ π_i H(ρ_i) alone.
double chi_quantity_entropy_form(const Ensemble& mu, const Tolerances& tol = {});

Ensemble image(const KrausChannel& phi, const Ensemble& mu, const Tolerances& tol = {});

/// Δ^Φχ(μ) = χ(μ) − χ(Φ(μ)).
double entropic_disturbance(const KrausChannel& phi, const Ensemble& mu,
                            const Tolerances& tol = {});

/// Both sides of
///   χ(μ) + I(B:E)_{Vρ̄V*} = χ(Φ(μ)) + χ(Φ̂(μ)) + Σ π_i I(B:E)_{Vρ_iV*}
/// evaluated term by term.
struct DisturbanceIdentity {
  double chi_input = 0.0;
  double mi_average = 0.0;
  double chi_output = 0.0;
  double chi_environment = 0.0;
  double mi_members = 0.0;  // Σ π_i I(B:E)_{Vρ_iV*}
  double lhs = 0.0;
  double rhs = 0.0;
  double residual = 0.0;
};

DisturbanceIdentity verify_disturbance_identity(const KrausChannel& phi, const Ensemble& mu,
                                                const Tolerances& tol = {});

struct PrivateInformation {
  double value = 0.0;
  double chi_output = 0.0;
  double chi_environment = 0.0;
};

/// χ(Φ(μ)) − χ(Φ̂(μ)).
PrivateInformation private_information(const KrausChannel& phi, const Ensemble& mu,
                                       const Tolerances& tol = {});

}  // namespace qcap
