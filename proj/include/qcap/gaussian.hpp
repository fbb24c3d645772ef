#pragma once

#include <string>
#include <vector>

#include "qcap/core.hpp"

namespace qcap {

/// Bosonic Gaussian channel Z_B → Z_A data (K, α, l). The symplectic forms are
/// generated canonically from the mode counts.
class GaussianChannelSpec {
 public:
  GaussianChannelSpec(int s_a, int s_b, RealMatrix k, RealMatrix alpha, RealVector l = {},
                      const Tolerances& tol = {});

  int s_a() const { return s_a_; }
  int s_b() const { return s_b_; }
  const RealMatrix& k() const { return k_; }
  const RealMatrix& alpha() const { return alpha_; }
  /// Displacement; stored only, never used by the classifiers.
  const RealVector& l() const { return l_; }
  RealMatrix delta_a() const;
  RealMatrix delta_b() const;

 private:
  int s_a_;
  int s_b_;
  RealMatrix k_;
  RealMatrix alpha_;
  RealVector l_;
};

/// Block diagonal of [[0, 1], [−1, 0]] over `modes` modes.
RealMatrix symplectic_form(int modes);

struct GaussianValidity {
  bool valid = false;
  double min_eig_minus = 0.0;  // of α − (i/2)(Δ_B − KᵀΔ_A K)
  double min_eig_plus = 0.0;   // of α + (i/2)(Δ_B − KᵀΔ_A K)
};

GaussianValidity validate(const GaussianChannelSpec& spec, const Tolerances& tol = {});

/// Numerical rank by singular values above tol.rank.
int numerical_rank(const RealMatrix& m, const Tolerances& tol = {});

struct GapClassification {
  std::vector<std::string> triggers;
  std::string verdict;  // "gap>0 guaranteed" or "no conclusion"
  int rank_k = 0;
  std::string full_rank_optimizer = "not-evaluated";
};

/// Throws ValidationError on an invalid spec. `degradable` is the user's assertion.
GapClassification classify_gap(const GaussianChannelSpec& spec, bool degradable = false,
                               const Tolerances& tol = {});

}  // namespace qcap
