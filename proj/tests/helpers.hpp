#pragma once

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "qcap/capacity.hpp"
#include "qcap/random.hpp"

namespace th {

using qcap::Matrix;
using qcap::Vector;

inline Vector ket(int dim, int k) { return Vector::Unit(dim, k); }

inline Vector plus() { return Vector::Ones(2) / std::sqrt(2.0); }

inline Matrix diag(const std::vector<double>& d) {
  Matrix m = Matrix::Zero(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return m;
}

inline Matrix hadamard() {
  Matrix h(2, 2);
  h << 1, 1, 1, -1;
  return h / std::sqrt(2.0);
}

inline qcap::Hamiltonian h01() { return qcap::Hamiltonian(diag({0.0, 1.0})); }

inline qcap::Hamiltonian h01_rotated() {
  const Matrix u = hadamard();
  return qcap::Hamiltonian(u * diag({0.0, 1.0}) * u.adjoint());
}

/// {½|0⟩, ½|+⟩}
inline qcap::Ensemble plus_zero() { return qcap::Ensemble::of_pure({0.5, 0.5}, {ket(2, 0), plus()}); }


inline std::vector<oracle::CMat> states(const qcap::Ensemble& mu) {
  std::vector<oracle::CMat> out;
  for (const auto& m : mu.members()) out.push_back(m.state.matrix());
  return out;
}

inline std::vector<double> probs(const qcap::Ensemble& mu) {
  std::vector<double> out;
  for (const auto& m : mu.members()) out.push_back(m.weight);
  return out;
}

inline double oracle_chi(const qcap::Ensemble& mu) { return oracle::chi(probs(mu), states(mu)); }

inline double oracle_chi_image(const qcap::KrausChannel& phi, const qcap::Ensemble& mu) {
  std::vector<oracle::CMat> out;
  for (const auto& m : mu.members()) out.push_back(oracle::apply(phi.kraus(), m.state.matrix()));
  return oracle::chi(probs(mu), out);
}

inline double oracle_chi_environment(const qcap::KrausChannel& phi, const qcap::Ensemble& mu) {
  std::vector<oracle::CMat> out;
  for (const auto& m : mu.members()) out.push_back(oracle::apply_complementary(phi.kraus(), m.state.matrix()));
  return oracle::chi(probs(mu), out);
}

}  // namespace th
