#pragma once

#include <optional>
#include <vector>

#include "qcap/numerics.hpp"

namespace qcap {

/// Completely positive trace-preserving map A → B given by Kraus operators
/// (each dim_out × dim_in). Immutable after construction.
class KrausChannel {
 public:
  explicit KrausChannel(std::vector<Matrix> kraus, const Tolerances& tol = {});

  static KrausChannel identity(int dim);
  /// Completely dephasing channel Π in the computational basis.
  static KrausChannel dephasing(int dim);
  /// Completely depolarizing channel ρ ↦ Tr(ρ) I/d.
  static KrausChannel depolarizing(int dim);
  static KrausChannel unitary(const Matrix& u);

  int dim_in() const { return d_in_; }
  int dim_out() const { return d_out_; }
  const std::vector<Matrix>& kraus() const { return kraus_; }

  /// Σ K X K† for an arbitrary operator X.
  Matrix apply(const Matrix& x) const;
  /// Σ K† Y K (Heisenberg picture).
  Matrix apply_adjoint(const Matrix& y) const;

  /// Choi matrix Σ_ij |i⟩⟨j| ⊗ Φ(|i⟩⟨j|), input factor first.
  Matrix choi() const;
  /// Equivalent Kraus family with linearly independent operators; returns the
  /// operators unchanged when they already are.
  KrausChannel reduced(const Tolerances& tol = {}) const;
  int choi_rank(const Tolerances& tol = {}) const;

 private:
  struct Unchecked {};
  KrausChannel(Unchecked, std::vector<Matrix> kraus);
  std::vector<Matrix> kraus_;
  int d_in_ = 0;
  int d_out_ = 0;
};

/// Isometry V : A → B ⊗ E with Φ(ρ) = Tr_E VρV†.
struct StinespringIsometry {
  int dim_a = 0;
  int dim_b = 0;
  int dim_e = 0;
  Matrix v;  // (dim_b·dim_e) × dim_a

  Matrix dilate(const Matrix& rho) const { return v * rho * v.adjoint(); }
  /// VρV† as a labeled state on B ⊗ E.
  BipartiteState joint_output(const DensityMatrix& rho, const Tolerances& tol = {}) const;
};

DensityMatrix apply(const KrausChannel& phi, const DensityMatrix& rho, const Tolerances& tol = {});

/// Minimal dilation: dim_e equals the Choi rank.
StinespringIsometry stinespring(const KrausChannel& phi, const Tolerances& tol = {});

/// Complementary channel A → E of the minimal dilation.
KrausChannel complementary(const KrausChannel& phi, const Tolerances& tol = {});

/// Frobenius distance between Choi matrices.
double channel_distance(const KrausChannel& a, const KrausChannel& b);
bool channels_equal(const KrausChannel& a, const KrausChannel& b, double tol);

/// Orthogonal projector onto the span of the given orthonormal columns.
Matrix projector_onto(const Matrix& columns);

/// Λ(ρ) = PρP + σ Tr((I−P)ρ). Throws ValidationError when P is not an
/// orthogonal projector or σ is not supported inside range(P).
KrausChannel truncation_channel(const Matrix& projector, const DensityMatrix& anchor,
                                const Tolerances& tol = {});

struct CqCheck {
  bool is_cq = false;
  double residual = 0.0;  // max_{k≠k'} ‖Φ(|k⟩⟨k'|)‖_F
};

/// Tests Φ(|k⟩⟨k'|) = 0 for k ≠ k' in the given orthonormal basis (columns),
/// or in the canonical basis when none is given. No basis search is done.
CqCheck is_discrete_cq(const KrausChannel& phi, const std::optional<Matrix>& basis,
                       double tol = 1e-9);
/// Same test in the eigenbasis of a Hamiltonian.
CqCheck is_discrete_cq(const KrausChannel& phi, const Hamiltonian& h, double tol = 1e-9);

/// ρ ↦ Σ_k ⟨k|ρ|k⟩ σ_k in the canonical input basis.
KrausChannel cq_channel(const std::vector<DensityMatrix>& sigmas, const Tolerances& tol = {});

struct DegradingCheck {
  bool passed = false;
  double residual = 0.0;     // sup_X ‖Θ(Φ(X)) − Φ̂(X)‖_F over matrix units X
  double tp_residual = 0.0;  // ‖Σ K†K − I‖_F of Θ
};

/// Certificate check for Φ̂ = Θ∘Φ. Θ must map B → E' with dim E' ≥ Choi rank
/// of Φ; the canonical environment is embedded in the leading block of E'.
DegradingCheck verify_degrading(const KrausChannel& phi, const KrausChannel& theta,
                                double tol = 1e-9, const Tolerances& tols = {});

/// Degrading map of a c-q channel whose output states have mutually orthogonal
/// supports: measure the support projectors and re-prepare the matching
/// environment state. Throws NotApplicable when supports overlap.
KrausChannel degrading_for_orthogonal_cq(const std::vector<DensityMatrix>& sigmas,
                                         const Tolerances& tol = {});

}  // namespace qcap
