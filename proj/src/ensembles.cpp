#include "qcap/ensembles.hpp"

#include <algorithm>
#include <cmath>

namespace qcap {

Ensemble::Ensemble(std::vector<Member> members, const Tolerances& tol) {
  if (members.empty()) throw ValidationError("ensemble must have at least one member");
  const int d = members.front().state.dim();
  double total = 0.0;
  for (const Member& m : members) {
    if (m.state.dim() != d) throw ValidationError("ensemble members differ in dimension");
    if (!std::isfinite(m.weight) || m.weight < -tol.prob)
      throw ValidationError("ensemble weights must be nonnegative");
    total += m.weight;
  }
  if (std::abs(total - 1.0) > tol.prob)
    throw ValidationError("ensemble weights sum to " + std::to_string(total) + ", not 1");
  double kept = 0.0;
  for (Member& m : members)
    if (m.weight >= tol.weight) {
      kept += m.weight;
      members_.push_back(std::move(m));
    }
  if (members_.empty()) throw ValidationError("all ensemble weights are negligible");
  for (Member& m : members_) m.weight /= kept;
}

Ensemble Ensemble::of_pure(const std::vector<double>& weights, const std::vector<Vector>& states,
                           const Tolerances& tol) {
  if (weights.size() != states.size())
    throw ValidationError("ensemble weights and states differ in count");
  std::vector<Member> members;
  for (std::size_t i = 0; i < states.size(); ++i)
    members.push_back({weights[i], DensityMatrix::from_pure(states[i])});
  return Ensemble(std::move(members), tol);
}

Ensemble Ensemble::eigen_ensemble(const DensityMatrix& rho, const Tolerances& tol) {
  const HermitianEigen e = eigh(rho.matrix());
  std::vector<Member> members;
  double total = 0.0;
  for (Eigen::Index j = e.values.size() - 1; j >= 0; --j) {
    if (e.values[j] <= tol.eig) continue;
    total += e.values[j];
    members.push_back({e.values[j], DensityMatrix::from_pure(e.vectors.col(j))});
  }
  for (Member& m : members) m.weight /= total;
  return Ensemble(std::move(members), tol);
}

namespace {

Matrix average_matrix(const Ensemble& mu) {
  Matrix avg = Matrix::Zero(mu.dim(), mu.dim());
  for (const Member& m : mu.members()) avg += m.weight * m.state.matrix();
  return avg;
}

}  // namespace

DensityMatrix average_state(const Ensemble& mu, const Tolerances& tol) {
  return DensityMatrix(average_matrix(mu), tol);
}

double chi_quantity_entropy_form(const Ensemble& mu, const Tolerances& tol) {
  double avg_entropy = 0.0;
  for (const Member& m : mu.members()) avg_entropy += m.weight * von_neumann_entropy(m.state, tol);
  return std::max(spectral_entropy(average_matrix(mu), tol.eig) - avg_entropy, 0.0);
}

double chi_quantity(const Ensemble& mu, const Tolerances& tol) {
  const DensityMatrix avg = average_state(mu, tol);
  double chi = 0.0;
  for (const Member& m : mu.members()) chi += m.weight * relative_entropy(m.state, avg, tol);
  const double other = chi_quantity_entropy_form(mu, tol);
  if (!(std::abs(chi - other) <= 1e-7))
    throw NumericalError("χ-quantity formulas disagree: " + std::to_string(chi) + " vs " +
                         std::to_string(other));
  return chi;
}

Ensemble image(const KrausChannel& phi, const Ensemble& mu, const Tolerances& tol) {
  if (mu.dim() != phi.dim_in()) throw ValidationError("ensemble dimension does not match channel input");
  std::vector<Member> out;
  out.reserve(mu.size());
  for (const Member& m : mu.members()) out.push_back({m.weight, apply(phi, m.state, tol)});
  return Ensemble(std::move(out), tol);
}

double entropic_disturbance(const KrausChannel& phi, const Ensemble& mu, const Tolerances& tol) {
  const double delta = chi_quantity(mu, tol) - chi_quantity(image(phi, mu, tol), tol);
  const double bound = std::min(std::log(static_cast<double>(phi.dim_in())),
                                2.0 * std::log(static_cast<double>(phi.choi_rank(tol))));
  if (delta < -1e-8 || delta > bound + 1e-8)
    throw NumericalError("entropic disturbance " + std::to_string(delta) +
                         " violates 0 ≤ Δ ≤ min{ln d_A, 2 ln d_E}");
  return delta;
}

DisturbanceIdentity verify_disturbance_identity(const KrausChannel& phi, const Ensemble& mu,
                                                const Tolerances& tol) {
  if (mu.dim() != phi.dim_in()) throw ValidationError("ensemble dimension does not match channel input");
  const StinespringIsometry iso = stinespring(phi, tol);
  const KrausChannel comp = complementary(phi, tol);
  DisturbanceIdentity out;
  out.chi_input = chi_quantity(mu, tol);
  out.mi_average = mutual_information(iso.joint_output(average_state(mu, tol), tol), tol);
  out.chi_output = chi_quantity(image(phi, mu, tol), tol);
  out.chi_environment = chi_quantity(image(comp, mu, tol), tol);
  for (const Member& m : mu.members())
    out.mi_members += m.weight * mutual_information(iso.joint_output(m.state, tol), tol);
  out.lhs = out.chi_input + out.mi_average;
  out.rhs = out.chi_output + out.chi_environment + out.mi_members;
  out.residual = std::abs(out.lhs - out.rhs);
  return out;
}

PrivateInformation private_information(const KrausChannel& phi, const Ensemble& mu,
                                       const Tolerances& tol) {
  PrivateInformation out;
  out.chi_output = chi_quantity(image(phi, mu, tol), tol);
  out.chi_environment = chi_quantity(image(complementary(phi, tol), mu, tol), tol);
  out.value = out.chi_output - out.chi_environment;
  return out;
}

}  // namespace qcap
