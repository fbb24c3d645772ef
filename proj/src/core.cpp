#include "qcap/core.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

namespace qcap {

namespace {

double* tolerance_slot(Tolerances& t, const std::string& key) {
  if (key == "herm") return &t.herm;
  if (key == "psd") return &t.psd;
  if (key == "trace") return &t.trace;
  if (key == "eig") return &t.eig;
  if (key == "supp") return &t.supp;
  if (key == "energy") return &t.energy;
  if (key == "prob") return &t.prob;
  if (key == "weight") return &t.weight;
  if (key == "tp") return &t.tp;
  if (key == "kraus_rank") return &t.kraus_rank;
  if (key == "rank") return &t.rank;
  if (key == "gaussian_psd") return &t.gaussian_psd;
  if (key == "cert") return &t.cert;
  return nullptr;
}

}  // namespace

void Tolerances::set(const std::string& key, double value) {
  double* slot = tolerance_slot(*this, key);
  if (slot == nullptr) throw ValidationError("unknown tolerance key '" + key + "'");
  if (!(value >= 0.0) || !std::isfinite(value))
    throw ValidationError("tolerance '" + key + "' must be a finite nonnegative number");
  *slot = value;
}

std::map<std::string, double> Tolerances::as_map() const {
  return {{"herm", herm},       {"psd", psd},           {"trace", trace},
          {"eig", eig},         {"supp", supp},         {"energy", energy},
          {"prob", prob},       {"weight", weight},     {"tp", tp},
          {"kraus_rank", kraus_rank}, {"rank", rank},   {"gaussian_psd", gaussian_psd},
          {"cert", cert}};
}

void fix_phase(Eigen::Ref<Vector> v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double mod = std::abs(v[i]);
    if (mod > 1e-12) {
      v *= std::conj(v[i]) / mod;
      v[i] = Complex(std::abs(v[i]), 0.0);
      return;
    }
  }
}

Matrix hermitian_part(const Matrix& a) { return 0.5 * (a + a.adjoint()); }

HermitianEigen eigh(const Matrix& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(hermitian_part(a));
  if (solver.info() != Eigen::Success) throw NumericalError("Hermitian eigensolver failed");
  HermitianEigen out{solver.eigenvalues(), solver.eigenvectors()};
  for (Eigen::Index j = 0; j < out.vectors.cols(); ++j) fix_phase(out.vectors.col(j));
  return out;
}

Matrix log_floor(const Matrix& a, double floor) {
  return spectral_apply(a, [floor](double x) { return std::log(std::max(x, floor)); });
}

double max_abs(const Matrix& a) { return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff(); }

Matrix matrix_unit(int d, int i, int j) {
  Matrix m = Matrix::Zero(d, d);
  m(i, j) = 1.0;
  return m;
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

}  // namespace qcap
