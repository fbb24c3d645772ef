#include "qcap/random.hpp"

namespace qcap::random {

namespace {

Matrix ginibre(int rows, int cols, Rng& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Matrix g(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) g(i, j) = Complex(n(rng), n(rng));
  return g;
}

/// Orthonormal columns from a Gaussian matrix, with the R-diagonal phases
/// absorbed so the result is Haar distributed.
Matrix haar_isometry(int rows, int cols, Rng& rng) {
  const Matrix g = ginibre(rows, cols, rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(rows, cols);
  const Matrix r = qr.matrixQR();
  for (int j = 0; j < cols; ++j) {
    const Complex d = r(j, j);
    if (std::abs(d) > 0.0) q.col(j) *= d / std::abs(d);
  }
  return q;
}

}  // namespace

Vector haar_vector(int dim, Rng& rng) {
  Vector v = ginibre(dim, 1, rng).col(0);
  return v / v.norm();
}

Matrix haar_unitary(int dim, Rng& rng) { return haar_isometry(dim, dim, rng); }

DensityMatrix random_state(int dim, Rng& rng, int rank) {
  const Matrix g = ginibre(dim, rank > 0 ? rank : dim, rng);
  Matrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  return DensityMatrix(rho);
}

KrausChannel random_channel(int dim_in, int dim_out, int n_kraus, Rng& rng) {
  if (dim_in < 1 || dim_out < 1 || n_kraus < 1)
    throw ValidationError("random channel dimensions must be positive");
  if (dim_out * n_kraus < dim_in)
    throw ValidationError("random channel needs dim_out * n_kraus >= dim_in");
  const Matrix v = haar_isometry(dim_out * n_kraus, dim_in, rng);
  std::vector<Matrix> ops(n_kraus, Matrix(dim_out, dim_in));
  for (int b = 0; b < dim_out; ++b)
    for (int k = 0; k < n_kraus; ++k) ops[k].row(b) = v.row(b * n_kraus + k);
  return KrausChannel(std::move(ops));
}

Ensemble random_ensemble(int dim, int members, Rng& rng, bool pure) {
  std::uniform_real_distribution<double> u(0.05, 1.0);
  std::vector<double> w(members);
  double total = 0.0;
  for (double& x : w) total += (x = u(rng));
  std::vector<Member> out;
  for (int i = 0; i < members; ++i) {
    DensityMatrix s = pure ? DensityMatrix::from_pure(haar_vector(dim, rng))
                           : random_state(dim, rng, 1 + static_cast<int>(rng() % dim));
    out.push_back({w[i] / total, std::move(s)});
  }
  return Ensemble(std::move(out));
}

Hamiltonian random_hamiltonian(int dim, Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  RealVector levels(dim);
  for (int i = 0; i < dim; ++i) levels[i] = u(rng);
  levels[0] = 0.0;
  const Matrix v = haar_unitary(dim, rng);
  return Hamiltonian(v * levels.cast<Complex>().asDiagonal() * v.adjoint());
}

}  // namespace qcap::random
