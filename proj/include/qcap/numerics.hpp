#pragma once

#include <string>
#include <utility>

#include "qcap/core.hpp"

namespace qcap {

/// A density operator: Hermitian, positive semidefinite, unit trace.
/// Construction validates against the supplied tolerances and stores the
/// Hermitian part of the input.
class DensityMatrix {
 public:
  explicit DensityMatrix(const Matrix& m, const Tolerances& tol = {});

  static DensityMatrix from_pure(const Vector& psi);
  static DensityMatrix maximally_mixed(int dim);
  static DensityMatrix diagonal(const std::vector<double>& probs);

  int dim() const { return static_cast<int>(m_.rows()); }
  const Matrix& matrix() const { return m_; }

 private:
  struct Unchecked {};
  DensityMatrix(Unchecked, Matrix m) : m_(std::move(m)) {}
  Matrix m_;
};

/// Unit vector; the purification of a mixed state lives here.
class PureState {
 public:
  explicit PureState(Vector amplitudes, const Tolerances& tol = {});

  int dim() const { return static_cast<int>(amps_.size()); }
  const Vector& amplitudes() const { return amps_; }
  DensityMatrix projector() const { return DensityMatrix::from_pure(amps_); }

 private:
  Vector amps_;
};

/// A state on a two-factor tensor product. Basis ordering is first ⊗ second,
/// index = i_first * dim_second + i_second.
class BipartiteState {
 public:
  BipartiteState(DensityMatrix state, int dim_first, int dim_second,
                 std::string label_first = "B", std::string label_second = "E");

  const DensityMatrix& state() const { return state_; }
  int dim_first() const { return d1_; }
  int dim_second() const { return d2_; }
  const std::string& label_first() const { return l1_; }
  const std::string& label_second() const { return l2_; }

 private:
  DensityMatrix state_;
  int d1_;
  int d2_;
  std::string l1_;
  std::string l2_;
};

/// Positive semidefinite Hermitian operator carrying its spectrum.
class Hamiltonian {
 public:
  explicit Hamiltonian(const Matrix& m, const Tolerances& tol = {});

  int dim() const { return static_cast<int>(m_.rows()); }
  const Matrix& matrix() const { return m_; }
  const HermitianEigen& spectrum() const { return eig_; }
  double min_energy() const { return eig_.values[0]; }
  /// Tr H / d, the energy of the maximally mixed state.
  double mean_energy() const;
  double energy(const Matrix& rho) const;

 private:
  Matrix m_;
  HermitianEigen eig_;
};

/// −Σ λ ln λ of a Hermitian operator's spectrum after clipping eigenvalues
/// below `floor` to zero and renormalizing. No validation; library internals
/// use this on operators already known to be states.
double spectral_entropy(const Matrix& a, double floor);
double spectral_entropy(const RealVector& eigenvalues, double floor);

double von_neumann_entropy(const DensityMatrix& rho, const Tolerances& tol = {});

/// H(ρ‖σ) in nats; +∞ when the support of ρ leaks out of the support of σ.
double relative_entropy(const DensityMatrix& rho, const DensityMatrix& sigma,
                        const Tolerances& tol = {});

/// Raw operator partial traces on d1 ⊗ d2.
Matrix trace_out_second(const Matrix& a, int d1, int d2);
Matrix trace_out_first(const Matrix& a, int d1, int d2);

/// Reduced state of the factor named `keep`; throws ValidationError for an unknown label.
DensityMatrix partial_trace(const BipartiteState& omega, const std::string& keep,
                            const Tolerances& tol = {});

double mutual_information(const BipartiteState& omega, const Tolerances& tol = {});

/// Canonical purification Σ √λ_i |e_i⟩|i⟩ on dim ⊗ dim, eigenvalues descending.
PureState purify(const DensityMatrix& rho, const Tolerances& tol = {});

struct GibbsResult {
  DensityMatrix state;
  double multiplier;  // λ*
  double energy;      // Tr H ρ
};

/// Maximum-entropy state with Tr Hρ ≤ energy. Throws InfeasibleConstraint when
/// energy ≤ min eigenvalue of H.
GibbsResult gibbs_state(const Hamiltonian& h, double energy, const Tolerances& tol = {});

}  // namespace qcap
