#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qcap/capacity.hpp"

namespace qcap {

/// Finite witnesses corroborate semicontinuity; they can never refute it.
inline constexpr const char* kWitnessNote =
    "finite witness: corroborates lower semicontinuity, cannot refute it";

struct SweepRow {
  int n = 0;
  int dim = 0;  // dimension of the truncated subspace
  double chi_n = 0.0;
  double chi_limit = 0.0;
  double delta = 0.0;  // chi_limit − chi_n
  double residual = 0.0;
};

struct SweepReport {
  std::vector<SweepRow> rows;
  bool monotone = false;   // chi_n non-decreasing in n within tol
  bool dominated = false;  // chi_n ≤ chi_limit + tol everywhere
  bool converged = false;  // full rank reproduces chi_limit within tol
};

/// Truncates the E factor of an ensemble on B ⊗ E by Id_B ⊗ Λ_n, where Λ_n
/// projects onto the n dominant eigenvectors of the E-marginal of the average
/// state and re-prepares `anchor` (default: the top eigenvector). Ranks must
/// be strictly increasing and within [1, d_E].
SweepReport truncation_sweep(const Ensemble& mu, int dim_b, int dim_e, const std::vector<int>& ranks,
                             const std::optional<DensityMatrix>& anchor = std::nullopt,
                             const Tolerances& tol = {});

/// Projector onto the `rank` dominant eigenvectors of ρ, ties broken by index.
Matrix dominant_projector(const Matrix& rho, int rank);

/// Weight-matched distance between ensembles: optimal assignment of members
/// with cost min(w, w')·‖ρ − ρ'‖₁/2 + |w − w'|; unmatched members cost their weight.
double ensemble_distance(const Ensemble& a, const Ensemble& b);

struct LscWitness {
  std::vector<double> distances;
  std::vector<double> differences;  // Δ^Φχ(μ_k) − Δ^Φχ(μ₀)
  int tail_start = -1;  // first index after which every distance is ≤ δ; −1 if none
  double tail_min = 0.0;
  bool violation = false;
  std::string note = kWitnessNote;
};

LscWitness lsc_witness(const KrausChannel& phi, const std::vector<Ensemble>& sequence,
                       const Ensemble& limit, double delta, double tol = 1e-9,
                       const Tolerances& tols = {});

struct AppendixRow {
  int n_b = 0;
  int n_e = 0;
  double chi_joint = 0.0;    // χ(Π_n(VμV*))
  double mi_average = 0.0;   // I(B:E) of Π_n(Vρ̄V*)
  double chi_output = 0.0;   // χ(Λ^B_n∘Φ(μ))
  double chi_environment = 0.0;  // χ(Λ^E_n∘Φ̂(μ))
  double mi_members = 0.0;   // Σ π_i I(B:E) of Π_n(Vρ_iV*)
  double lhs = 0.0;
  double rhs = 0.0;
  double residual = 0.0;
  bool mi_monotone = false;  // truncated MI ≤ untruncated + tol, average and members
};

struct AppendixReport {
  std::vector<AppendixRow> rows;
  double max_residual = 0.0;
  bool mi_monotone = false;
  /// Full-rank row reproduces every term of the disturbance identity.
  std::optional<bool> limit_matches;
};

AppendixReport appendix_identity_sweep(const KrausChannel& phi, const Ensemble& mu,
                                       const std::vector<int>& ranks_b,
                                       const std::vector<int>& ranks_e,
                                       const Tolerances& tol = {});

struct CiLscReport {
  std::vector<double> values;  // I_c(Φ, ρ_k)
  double limit_value = 0.0;
  double min_value = 0.0;
  bool nonnegative = false;
  double liminf_margin = 0.0;  // min over the second half of I_c(ρ_k) − I_c(ρ₀)
  bool liminf_holds = false;
  double input_entropy_gap = 0.0;     // |H(ρ_last) − H(ρ₀)|
  double exchange_entropy_gap = 0.0;  // |H(Φ̂(ρ_last)) − H(Φ̂(ρ₀))|
  bool entropies_converge = false;
  std::string note = kWitnessNote;
};

/// Throws ValidationError when Θ fails verify_degrading.
CiLscReport ci_lsc_experiment(const KrausChannel& phi, const KrausChannel& theta,
                              const std::vector<DensityMatrix>& sequence,
                              const DensityMatrix& limit, double tol = 1e-9,
                              double converge_tol = 1e-6, const Tolerances& tols = {});

}  // namespace qcap
