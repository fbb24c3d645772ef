#include "qcap/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace qcap {

namespace {

void require_square(const Matrix& m, const char* what) {
  if (m.rows() == 0 || m.rows() != m.cols())
    throw ValidationError(std::string(what) + " must be a nonempty square matrix");
  if (!m.allFinite()) throw ValidationError(std::string(what) + " has non-finite entries");
}

}  // namespace

DensityMatrix::DensityMatrix(const Matrix& m, const Tolerances& tol) {
  require_square(m, "density matrix");
  if (max_abs(m - m.adjoint()) > tol.herm)
    throw ValidationError("density matrix is not Hermitian");
  const Complex tr = m.trace();
  if (std::abs(tr - Complex(1.0, 0.0)) > tol.trace)
    throw ValidationError("density matrix trace " + std::to_string(tr.real()) + " differs from 1");
  m_ = hermitian_part(m);
  const HermitianEigen e = eigh(m_);
  if (e.values[0] < -tol.psd)
    throw ValidationError("density matrix has negative eigenvalue " + std::to_string(e.values[0]));
}

DensityMatrix DensityMatrix::from_pure(const Vector& psi) {
  const double n = psi.norm();
  if (!(n > 0.0)) throw ValidationError("zero vector cannot define a pure state");
  const Vector u = psi / n;
  return DensityMatrix(Unchecked{}, u * u.adjoint());
}

DensityMatrix DensityMatrix::maximally_mixed(int dim) {
  if (dim <= 0) throw ValidationError("dimension must be positive");
  return DensityMatrix(Unchecked{}, Matrix::Identity(dim, dim) / static_cast<double>(dim));
}

DensityMatrix DensityMatrix::diagonal(const std::vector<double>& probs) {
  Matrix m = Matrix::Zero(static_cast<Eigen::Index>(probs.size()),
                          static_cast<Eigen::Index>(probs.size()));
  for (std::size_t i = 0; i < probs.size(); ++i) m(i, i) = probs[i];
  return DensityMatrix(m);
}

PureState::PureState(Vector amplitudes, const Tolerances& tol) : amps_(std::move(amplitudes)) {
  if (amps_.size() == 0) throw ValidationError("pure state must be nonempty");
  if (!amps_.allFinite()) throw ValidationError("pure state has non-finite amplitudes");
  if (std::abs(amps_.norm() - 1.0) > tol.trace)
    throw ValidationError("pure state amplitudes are not unit norm");
}

BipartiteState::BipartiteState(DensityMatrix state, int dim_first, int dim_second,
                               std::string label_first, std::string label_second)
    : state_(std::move(state)),
      d1_(dim_first),
      d2_(dim_second),
      l1_(std::move(label_first)),
      l2_(std::move(label_second)) {
  if (d1_ <= 0 || d2_ <= 0 || d1_ * d2_ != state_.dim())
    throw ValidationError("bipartite dimensions do not factor the state dimension");
  if (l1_ == l2_) throw ValidationError("bipartite subsystem labels must differ");
}

Hamiltonian::Hamiltonian(const Matrix& m, const Tolerances& tol) {
  require_square(m, "Hamiltonian");
  if (max_abs(m - m.adjoint()) > tol.herm) throw ValidationError("Hamiltonian is not Hermitian");
  m_ = hermitian_part(m);
  eig_ = eigh(m_);
  if (eig_.values[0] < -tol.psd)
    throw ValidationError("Hamiltonian must be positive semidefinite");
}

double Hamiltonian::mean_energy() const { return m_.trace().real() / dim(); }

double Hamiltonian::energy(const Matrix& rho) const { return (m_ * rho).trace().real(); }

double spectral_entropy(const RealVector& eigenvalues, double floor) {
  double total = 0.0;
  for (double x : eigenvalues)
    if (x > floor) total += x;
  if (total <= 0.0) return 0.0;
  double h = 0.0;
  for (double x : eigenvalues) {
    if (x <= floor) continue;
    const double p = x / total;
    h -= p * std::log(p);
  }
  return std::max(h, 0.0);
}

double spectral_entropy(const Matrix& a, double floor) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(hermitian_part(a), Eigen::EigenvaluesOnly);
  return spectral_entropy(RealVector(solver.eigenvalues()), floor);
}

double von_neumann_entropy(const DensityMatrix& rho, const Tolerances& tol) {
  return spectral_entropy(rho.matrix(), tol.eig);
}

double relative_entropy(const DensityMatrix& rho, const DensityMatrix& sigma,
                        const Tolerances& tol) {
  if (rho.dim() != sigma.dim()) throw ValidationError("relative entropy: dimension mismatch");
  const HermitianEigen es = eigh(sigma.matrix());
  double leaked = 0.0;
  double cross = 0.0;
  for (Eigen::Index j = 0; j < es.values.size(); ++j) {
    const auto f = es.vectors.col(j);
    const double mass = (f.adjoint() * rho.matrix() * f).value().real();
    if (es.values[j] <= tol.eig)
      leaked += mass;
    else
      cross -= mass * std::log(es.values[j]);
  }
  if (leaked > tol.supp) return std::numeric_limits<double>::infinity();
  const double value = -von_neumann_entropy(rho, tol) + cross;
  return std::max(value, 0.0);
}

Matrix trace_out_second(const Matrix& a, int d1, int d2) {
  Matrix out = Matrix::Zero(d1, d1);
  for (int i = 0; i < d1; ++i)
    for (int j = 0; j < d1; ++j)
      for (int k = 0; k < d2; ++k) out(i, j) += a(i * d2 + k, j * d2 + k);
  return out;
}

Matrix trace_out_first(const Matrix& a, int d1, int d2) {
  Matrix out = Matrix::Zero(d2, d2);
  for (int k = 0; k < d1; ++k) out += a.block(k * d2, k * d2, d2, d2);
  return out;
}

DensityMatrix partial_trace(const BipartiteState& omega, const std::string& keep,
                            const Tolerances& tol) {
  const Matrix& a = omega.state().matrix();
  if (keep == omega.label_first())
    return DensityMatrix(trace_out_second(a, omega.dim_first(), omega.dim_second()), tol);
  if (keep == omega.label_second())
    return DensityMatrix(trace_out_first(a, omega.dim_first(), omega.dim_second()), tol);
  throw ValidationError("unknown subsystem label '" + keep + "'");
}

double mutual_information(const BipartiteState& omega, const Tolerances& tol) {
  const Matrix& a = omega.state().matrix();
  const int d1 = omega.dim_first();
  const int d2 = omega.dim_second();
  const double h1 = spectral_entropy(trace_out_second(a, d1, d2), tol.eig);
  const double h2 = spectral_entropy(trace_out_first(a, d1, d2), tol.eig);
  const double h12 = spectral_entropy(a, tol.eig);
  return std::max(h1 + h2 - h12, 0.0);
}

PureState purify(const DensityMatrix& rho, const Tolerances& tol) {
  const int d = rho.dim();
  const HermitianEigen e = eigh(rho.matrix());
  double total = 0.0;
  for (double x : e.values) total += std::max(x, 0.0);
  Vector amps = Vector::Zero(d * d);
  // Reference index i carries the i-th largest eigenvalue.
  for (int i = 0; i < d; ++i) {
    const int col = d - 1 - i;
    const double lambda = std::max(e.values[col], 0.0) / total;
    if (lambda <= 0.0) continue;
    const double amp = std::sqrt(lambda);
    for (int a = 0; a < d; ++a) amps[a * d + i] = amp * e.vectors(a, col);
  }
  return PureState(amps, tol);
}

GibbsResult gibbs_state(const Hamiltonian& h, double energy, const Tolerances& tol) {
  const double e_min = h.min_energy();
  if (!(energy > e_min))
    throw InfeasibleConstraint("energy bound " + std::to_string(energy) +
                               " does not exceed the minimal energy " + std::to_string(e_min));
  const int d = h.dim();
  if (energy >= h.mean_energy())
    return {DensityMatrix::maximally_mixed(d), 0.0, h.mean_energy()};

  const RealVector& levels = h.spectrum().values;
  auto weights = [&](double lambda) {
    RealVector w(d);
    for (int k = 0; k < d; ++k) w[k] = std::exp(-lambda * (levels[k] - e_min));
    return RealVector(w / w.sum());
  };
  auto mean = [&](double lambda) { return weights(lambda).dot(levels); };

  double lo = 0.0;
  double hi = 1.0;
  for (int i = 0; i < 2000 && mean(hi) > energy; ++i) {
    lo = hi;
    hi *= 2.0;
  }
  for (int i = 0; i < 300; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (mean(mid) > energy)
      lo = mid;
    else
      hi = mid;
  }
  // Prefer the feasible side when the bracket collapses.
  const double lambda =
      std::abs(mean(lo) - energy) < std::abs(mean(hi) - energy) ? lo : hi;
  const RealVector p = weights(lambda);
  const Matrix& v = h.spectrum().vectors;
  Matrix rho = v * p.cast<Complex>().asDiagonal() * v.adjoint();
  const double achieved = p.dot(levels);
  if (std::abs(achieved - energy) > std::max(tol.energy, 1e-12 * std::abs(energy)))
    throw NumericalError("Gibbs bisection did not meet the energy tolerance");
  return {DensityMatrix(rho, tol), lambda, achieved};
}

}  // namespace qcap
