#include "qcap/gaussian.hpp"

#include <Eigen/SVD>

namespace qcap {

RealMatrix symplectic_form(int modes) {
  RealMatrix d = RealMatrix::Zero(2 * modes, 2 * modes);
  for (int j = 0; j < modes; ++j) {
    d(2 * j, 2 * j + 1) = 1.0;
    d(2 * j + 1, 2 * j) = -1.0;
  }
  return d;
}

GaussianChannelSpec::GaussianChannelSpec(int s_a, int s_b, RealMatrix k, RealMatrix alpha,
                                         RealVector l, const Tolerances& tol)
    : s_a_(s_a), s_b_(s_b), k_(std::move(k)), alpha_(std::move(alpha)), l_(std::move(l)) {
  if (s_a_ < 1 || s_b_ < 1) throw ValidationError("mode counts must be positive");
  if (k_.rows() != 2 * s_a_ || k_.cols() != 2 * s_b_)
    throw ValidationError("K must be 2s_A × 2s_B");
  if (alpha_.rows() != 2 * s_b_ || alpha_.cols() != 2 * s_b_)
    throw ValidationError("alpha must be 2s_B × 2s_B");
  if (l_.size() == 0) l_ = RealVector::Zero(2 * s_b_);
  if (l_.size() != 2 * s_b_) throw ValidationError("l must have length 2s_B");
  if (!k_.allFinite() || !alpha_.allFinite() || !l_.allFinite())
    throw ValidationError("Gaussian spec entries must be finite");
  if ((alpha_ - alpha_.transpose()).cwiseAbs().maxCoeff() > tol.herm)
    throw ValidationError("alpha must be symmetric");
}

RealMatrix GaussianChannelSpec::delta_a() const { return symplectic_form(s_a_); }
RealMatrix GaussianChannelSpec::delta_b() const { return symplectic_form(s_b_); }

GaussianValidity validate(const GaussianChannelSpec& spec, const Tolerances& tol) {
  const RealMatrix form = spec.delta_b() - spec.k().transpose() * spec.delta_a() * spec.k();
  const Matrix a = spec.alpha().cast<Complex>();
  const Matrix shift = Complex(0.0, 0.5) * form.cast<Complex>();
  GaussianValidity out;
  out.min_eig_minus = eigh(a - shift).values[0];
  out.min_eig_plus = eigh(a + shift).values[0];
  out.valid = out.min_eig_minus >= -tol.gaussian_psd && out.min_eig_plus >= -tol.gaussian_psd;
  return out;
}

int numerical_rank(const RealMatrix& m, const Tolerances& tol) {
  if (m.size() == 0) return 0;
  const Eigen::JacobiSVD<RealMatrix> svd(m);
  return static_cast<int>((svd.singularValues().array() > tol.rank).count());
}

GapClassification classify_gap(const GaussianChannelSpec& spec, bool degradable,
                               const Tolerances& tol) {
  const GaussianValidity v = validate(spec, tol);
  if (!v.valid)
    throw ValidationError("Gaussian spec violates the complete positivity inequality (min eigenvalue " +
                          std::to_string(std::min(v.min_eig_minus, v.min_eig_plus)) + ")");
  GapClassification out;
  out.rank_k = numerical_rank(spec.k(), tol);
  bool guaranteed = false;
  if (out.rank_k == 2 * spec.s_a()) {
    out.triggers.push_back("full-range-K");
    guaranteed = true;
  }
  if (spec.k().norm() <= tol.rank) out.triggers.push_back("zero-K/discrete-c-q");
  if (degradable) {
    out.triggers.push_back("degradable");
    guaranteed = true;
  }
  out.verdict = guaranteed ? "gap>0 guaranteed" : "no conclusion";
  return out;
}

}  // namespace qcap
