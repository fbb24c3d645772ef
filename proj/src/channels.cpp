#include "qcap/channels.hpp"

#include <algorithm>
#include <cmath>

namespace qcap {

KrausChannel::KrausChannel(Unchecked, std::vector<Matrix> kraus) : kraus_(std::move(kraus)) {
  d_out_ = static_cast<int>(kraus_.front().rows());
  d_in_ = static_cast<int>(kraus_.front().cols());
}

KrausChannel::KrausChannel(std::vector<Matrix> kraus, const Tolerances& tol)
    : kraus_(std::move(kraus)) {
  if (kraus_.empty()) throw ValidationError("channel needs at least one Kraus operator");
  d_out_ = static_cast<int>(kraus_.front().rows());
  d_in_ = static_cast<int>(kraus_.front().cols());
  if (d_in_ <= 0 || d_out_ <= 0) throw ValidationError("Kraus operators must be nonempty");
  Matrix sum = Matrix::Zero(d_in_, d_in_);
  for (const Matrix& k : kraus_) {
    if (k.rows() != d_out_ || k.cols() != d_in_)
      throw ValidationError("Kraus operators have inconsistent shapes");
    if (!k.allFinite()) throw ValidationError("Kraus operator has non-finite entries");
    sum += k.adjoint() * k;
  }
  const double defect = (sum - Matrix::Identity(d_in_, d_in_)).norm();
  if (defect > tol.tp)
    throw ValidationError("channel is not trace preserving: ‖ΣK†K − I‖ = " +
                          std::to_string(defect));
}

KrausChannel KrausChannel::identity(int dim) {
  return KrausChannel(Unchecked{}, {Matrix::Identity(dim, dim)});
}

KrausChannel KrausChannel::dephasing(int dim) {
  std::vector<Matrix> ops;
  for (int k = 0; k < dim; ++k) ops.push_back(matrix_unit(dim, k, k));
  return KrausChannel(Unchecked{}, std::move(ops));
}

KrausChannel KrausChannel::depolarizing(int dim) {
  std::vector<Matrix> ops;
  const double s = 1.0 / std::sqrt(static_cast<double>(dim));
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) ops.push_back(s * matrix_unit(dim, i, j));
  return KrausChannel(Unchecked{}, std::move(ops));
}

KrausChannel KrausChannel::unitary(const Matrix& u) { return KrausChannel({u}); }

Matrix KrausChannel::apply(const Matrix& x) const {
  Matrix out = Matrix::Zero(d_out_, d_out_);
  for (const Matrix& k : kraus_) out.noalias() += k * x * k.adjoint();
  return out;
}

Matrix KrausChannel::apply_adjoint(const Matrix& y) const {
  Matrix out = Matrix::Zero(d_in_, d_in_);
  for (const Matrix& k : kraus_) out.noalias() += k.adjoint() * y * k;
  return out;
}

Matrix KrausChannel::choi() const {
  Matrix j = Matrix::Zero(d_in_ * d_out_, d_in_ * d_out_);
  for (int a = 0; a < d_in_; ++a)
    for (int b = 0; b < d_in_; ++b)
      j.block(a * d_out_, b * d_out_, d_out_, d_out_) = apply(matrix_unit(d_in_, a, b));
  return j;
}

KrausChannel KrausChannel::reduced(const Tolerances& tol) const {
  const int n = static_cast<int>(kraus_.size());
  Matrix gram(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) gram(i, j) = (kraus_[i].adjoint() * kraus_[j]).trace();
  const HermitianEigen e = eigh(gram);
  if (e.values[0] > tol.kraus_rank) return *this;
  // K'_j = Σ_i W_ij K_i for each Gram eigenvector with nonzero eigenvalue,
  // largest first.
  std::vector<Matrix> ops;
  for (int j = n - 1; j >= 0; --j) {
    if (e.values[j] <= tol.kraus_rank) break;
    Matrix k = Matrix::Zero(d_out_, d_in_);
    for (int i = 0; i < n; ++i) k += e.vectors(i, j) * kraus_[i];
    ops.push_back(std::move(k));
  }
  return KrausChannel(Unchecked{}, std::move(ops));
}

int KrausChannel::choi_rank(const Tolerances& tol) const {
  return static_cast<int>(reduced(tol).kraus().size());
}

BipartiteState StinespringIsometry::joint_output(const DensityMatrix& rho,
                                                 const Tolerances& tol) const {
  return BipartiteState(DensityMatrix(dilate(rho.matrix()), tol), dim_b, dim_e, "B", "E");
}

DensityMatrix apply(const KrausChannel& phi, const DensityMatrix& rho, const Tolerances& tol) {
  if (rho.dim() != phi.dim_in())
    throw ValidationError("channel input dimension " + std::to_string(phi.dim_in()) +
                          " does not match state dimension " + std::to_string(rho.dim()));
  return DensityMatrix(phi.apply(rho.matrix()), tol);
}

StinespringIsometry stinespring(const KrausChannel& phi, const Tolerances& tol) {
  const KrausChannel r = phi.reduced(tol);
  StinespringIsometry iso;
  iso.dim_a = r.dim_in();
  iso.dim_b = r.dim_out();
  iso.dim_e = static_cast<int>(r.kraus().size());
  iso.v = Matrix::Zero(iso.dim_b * iso.dim_e, iso.dim_a);
  for (int e = 0; e < iso.dim_e; ++e)
    for (int b = 0; b < iso.dim_b; ++b) iso.v.row(b * iso.dim_e + e) = r.kraus()[e].row(b);
  return iso;
}

KrausChannel complementary(const KrausChannel& phi, const Tolerances& tol) {
  const KrausChannel r = phi.reduced(tol);
  const int d_e = static_cast<int>(r.kraus().size());
  std::vector<Matrix> ops;
  for (int j = 0; j < r.dim_out(); ++j) {
    Matrix e(d_e, r.dim_in());
    for (int i = 0; i < d_e; ++i) e.row(i) = r.kraus()[i].row(j);
    ops.push_back(std::move(e));
  }
  return KrausChannel(std::move(ops), tol);
}

double channel_distance(const KrausChannel& a, const KrausChannel& b) {
  if (a.dim_in() != b.dim_in() || a.dim_out() != b.dim_out())
    throw ValidationError("channel distance: dimension mismatch");
  return (a.choi() - b.choi()).norm();
}

bool channels_equal(const KrausChannel& a, const KrausChannel& b, double tol) {
  return channel_distance(a, b) <= tol;
}

Matrix projector_onto(const Matrix& columns) { return columns * columns.adjoint(); }

namespace {

/// Orthonormal basis (columns) of the range of a PSD operator.
Matrix range_basis(const Matrix& a, double threshold) {
  const HermitianEigen e = eigh(a);
  std::vector<Eigen::Index> keep;
  for (Eigen::Index j = e.values.size() - 1; j >= 0; --j)
    if (e.values[j] > threshold) keep.push_back(j);
  Matrix out(a.rows(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t c = 0; c < keep.size(); ++c) out.col(c) = e.vectors.col(keep[c]);
  return out;
}

/// Kraus family {√t |h⟩⟨g|} preparing `state` after detecting any vector of `detect`.
void append_prepare(std::vector<Matrix>& ops, const Matrix& detect, const Matrix& state,
                    double floor) {
  const HermitianEigen e = eigh(state);
  double total = 0.0;
  for (double t : e.values)
    if (t > floor) total += t;
  for (Eigen::Index m = e.values.size() - 1; m >= 0; --m) {
    if (e.values[m] <= floor) continue;
    const double amp = std::sqrt(e.values[m] / total);
    for (Eigen::Index g = 0; g < detect.cols(); ++g)
      ops.push_back(amp * e.vectors.col(m) * detect.col(g).adjoint());
  }
}

}  // namespace

KrausChannel truncation_channel(const Matrix& projector, const DensityMatrix& anchor,
                                const Tolerances& tol) {
  const int d = anchor.dim();
  if (projector.rows() != d || projector.cols() != d)
    throw ValidationError("truncation projector and anchor state dimensions differ");
  if (max_abs(projector - projector.adjoint()) > tol.herm ||
      max_abs(projector * projector - projector) > 1e-9)
    throw ValidationError("truncation operator is not an orthogonal projector");
  const Matrix p = hermitian_part(projector);
  const Matrix complement = Matrix::Identity(d, d) - p;
  const double leak = (complement * anchor.matrix()).trace().real();
  if (leak > tol.supp)
    throw ValidationError("anchor state leaks outside the truncation subspace");
  std::vector<Matrix> ops{p};
  append_prepare(ops, range_basis(complement, 0.5), anchor.matrix(), tol.eig);
  return KrausChannel(std::move(ops), tol);
}

namespace {

CqCheck cq_residual(const KrausChannel& phi, const Matrix& basis, double tol) {
  const int d = phi.dim_in();
  if (basis.rows() != d || basis.cols() != d)
    throw ValidationError("c-q test basis must be a square matrix of input dimension");
  if ((basis.adjoint() * basis - Matrix::Identity(d, d)).norm() > 1e-9)
    throw ValidationError("c-q test basis is not orthonormal");
  CqCheck out;
  for (int k = 0; k < d; ++k)
    for (int l = 0; l < d; ++l) {
      if (k == l) continue;
      const Matrix x = basis.col(k) * basis.col(l).adjoint();
      out.residual = std::max(out.residual, phi.apply(x).norm());
    }
  out.is_cq = out.residual <= tol;
  return out;
}

}  // namespace

CqCheck is_discrete_cq(const KrausChannel& phi, const std::optional<Matrix>& basis, double tol) {
  return cq_residual(phi, basis.value_or(Matrix::Identity(phi.dim_in(), phi.dim_in())), tol);
}

CqCheck is_discrete_cq(const KrausChannel& phi, const Hamiltonian& h, double tol) {
  if (h.dim() != phi.dim_in()) throw ValidationError("Hamiltonian dimension mismatch");
  return cq_residual(phi, h.spectrum().vectors, tol);
}

KrausChannel cq_channel(const std::vector<DensityMatrix>& sigmas, const Tolerances& tol) {
  if (sigmas.empty()) throw ValidationError("c-q channel needs at least one output state");
  const int d_a = static_cast<int>(sigmas.size());
  const int d_b = sigmas.front().dim();
  std::vector<Matrix> ops;
  for (int k = 0; k < d_a; ++k) {
    if (sigmas[k].dim() != d_b) throw ValidationError("c-q output states differ in dimension");
    Matrix detect = Matrix::Zero(d_a, 1);
    detect(k, 0) = 1.0;
    append_prepare(ops, detect, sigmas[k].matrix(), tol.eig);
  }
  return KrausChannel(std::move(ops), tol);
}

DegradingCheck verify_degrading(const KrausChannel& phi, const KrausChannel& theta, double tol,
                                const Tolerances& tols) {
  const KrausChannel comp = complementary(phi, tols);
  const int d_e = comp.dim_out();
  if (theta.dim_in() != phi.dim_out())
    throw ValidationError("degrading map input dimension must equal the channel output dimension");
  if (theta.dim_out() < d_e)
    throw ValidationError("degrading map output dimension is below the channel's Choi rank");
  DegradingCheck out;
  Matrix tp = Matrix::Zero(theta.dim_in(), theta.dim_in());
  for (const Matrix& k : theta.kraus()) tp += k.adjoint() * k;
  out.tp_residual = (tp - Matrix::Identity(theta.dim_in(), theta.dim_in())).norm();
  const int d_a = phi.dim_in();
  for (int i = 0; i < d_a; ++i)
    for (int j = 0; j < d_a; ++j) {
      const Matrix x = matrix_unit(d_a, i, j);
      Matrix target = Matrix::Zero(theta.dim_out(), theta.dim_out());
      target.topLeftCorner(d_e, d_e) = comp.apply(x);
      out.residual = std::max(out.residual, (theta.apply(phi.apply(x)) - target).norm());
    }
  out.passed = out.residual <= tol && out.tp_residual <= tol;
  return out;
}

KrausChannel degrading_for_orthogonal_cq(const std::vector<DensityMatrix>& sigmas,
                                         const Tolerances& tol) {
  const KrausChannel phi = cq_channel(sigmas, tol);
  const int d_b = phi.dim_out();
  std::vector<Matrix> supports;
  for (const DensityMatrix& s : sigmas) supports.push_back(range_basis(s.matrix(), tol.eig));
  for (std::size_t j = 0; j < sigmas.size(); ++j)
    for (std::size_t k = j + 1; k < sigmas.size(); ++k) {
      const double overlap = (sigmas[j].matrix() * sigmas[k].matrix()).trace().real();
      const double cross = (supports[j].adjoint() * supports[k]).norm();
      if (overlap > tol.supp || cross > 1e-6)
        throw NotApplicable("c-q output states " + std::to_string(j) + " and " +
                            std::to_string(k) + " have overlapping supports");
    }
  const KrausChannel comp = complementary(phi, tol);
  Matrix covered = Matrix::Zero(d_b, d_b);
  std::vector<Matrix> ops;
  for (std::size_t k = 0; k < sigmas.size(); ++k) {
    const Matrix env = comp.apply(matrix_unit(static_cast<int>(sigmas.size()), k, k));
    append_prepare(ops, supports[k], env, tol.eig);
    covered += projector_onto(supports[k]);
  }
  const Matrix rest = range_basis(Matrix::Identity(d_b, d_b) - covered, 0.5);
  if (rest.cols() > 0) append_prepare(ops, rest, comp.apply(matrix_unit(phi.dim_in(), 0, 0)), tol.eig);
  return KrausChannel(std::move(ops), tol);
}

}  // namespace qcap
