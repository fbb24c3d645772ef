#pragma once

#include <complex>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace qcap {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

/// Input failed a structural check (dimensions, hermiticity, positivity, normalization).
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Energy bound at or below the minimal energy level of the Hamiltonian.
class InfeasibleConstraint : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// A constructor's structural precondition does not hold (e.g. overlapping supports).
class NotApplicable : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// An internal cross-check between two independent evaluation routes disagreed.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Numerical tolerances used across the library. Every operation takes one of
/// these by const reference; the defaults are the documented library defaults.
struct Tolerances {
  double herm = 1e-9;         // ‖A − A†‖_max for Hermitian inputs
  double psd = 1e-9;          // most negative eigenvalue accepted
  double trace = 1e-9;        // |Tr ρ − 1|
  double eig = 1e-12;         // spectral floor for entropies and logarithms
  double supp = 1e-9;         // leaked mass for support inclusion
  double energy = 1e-10;      // energy residual of constrained optimizers
  double prob = 1e-9;         // |Σ weights − 1|
  double weight = 1e-12;      // ensemble members below this weight are pruned
  double tp = 1e-10;          // ‖Σ K†K − I‖_F
  double kraus_rank = 1e-10;  // Gram / Choi eigenvalue threshold
  double rank = 1e-10;        // singular value threshold (Gaussian K)
  double gaussian_psd = 1e-10;
  double cert = 1e-6;         // optimality certificate tolerance

  /// Overwrites one tolerance by name; throws ValidationError on an unknown key.
  void set(const std::string& key, double value);
  std::map<std::string, double> as_map() const;
};

/// Eigendecomposition of a Hermitian matrix. Eigenvalues ascending; columns of
/// `vectors` follow the deterministic phase convention (first component with
/// modulus above 1e-12 made real positive).
struct HermitianEigen {
  RealVector values;
  Matrix vectors;
};

HermitianEigen eigh(const Matrix& a);

/// Returns 0.5 (A + A†).
Matrix hermitian_part(const Matrix& a);

/// Applies f to the spectrum of a Hermitian matrix.
template <typename F>
Matrix spectral_apply(const Matrix& a, F&& f) {
  const HermitianEigen e = eigh(a);
  RealVector fv(e.values.size());
  for (Eigen::Index i = 0; i < e.values.size(); ++i) fv[i] = f(e.values[i]);
  return e.vectors * fv.asDiagonal() * e.vectors.adjoint();
}

/// Matrix logarithm restricted to the support: eigenvalues ≤ floor map to ln(floor).
Matrix log_floor(const Matrix& a, double floor);

/// Fixes the global phase of a vector so its first non-negligible component is real positive.
void fix_phase(Eigen::Ref<Vector> v);

double max_abs(const Matrix& a);

/// |i⟩⟨j| in dimension d.
Matrix matrix_unit(int d, int i, int j);

Matrix kron(const Matrix& a, const Matrix& b);

}  // namespace qcap
