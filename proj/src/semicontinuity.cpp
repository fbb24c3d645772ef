#include "qcap/semicontinuity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace qcap {

namespace {

KrausChannel local_on_second(int dim_b, const KrausChannel& lambda) {
  std::vector<Matrix> ops;
  const Matrix id = Matrix::Identity(dim_b, dim_b);
  for (const Matrix& k : lambda.kraus()) ops.push_back(kron(id, k));
  return KrausChannel(std::move(ops));
}

KrausChannel local_product(const KrausChannel& a, const KrausChannel& b) {
  std::vector<Matrix> ops;
  for (const Matrix& ka : a.kraus())
    for (const Matrix& kb : b.kraus()) ops.push_back(kron(ka, kb));
  return KrausChannel(std::move(ops));
}

/// Truncation onto the dominant eigenvectors of `marginal`, re-preparing the
/// top eigenvector.
KrausChannel dominant_truncation(const Matrix& marginal, int rank, const Tolerances& tol) {
  const HermitianEigen e = eigh(marginal);
  const Vector top = e.vectors.col(e.vectors.cols() - 1);
  return truncation_channel(dominant_projector(marginal, rank), DensityMatrix::from_pure(top), tol);
}

void check_ranks(const std::vector<int>& ranks, int dim, const char* what) {
  if (ranks.empty()) throw ValidationError(std::string(what) + " must not be empty");
  for (std::size_t i = 0; i < ranks.size(); ++i) {
    if (ranks[i] < 1 || ranks[i] > dim)
      throw ValidationError(std::string(what) + " must lie in [1, " + std::to_string(dim) + "]");
    if (i > 0 && ranks[i] <= ranks[i - 1])
      throw ValidationError(std::string(what) + " must be strictly increasing");
  }
}

double trace_distance(const Matrix& a, const Matrix& b) {
  return 0.5 * eigh(a - b).values.cwiseAbs().sum();
}

/// Minimum-cost perfect matching on a square cost matrix (Hungarian method).
double assignment_cost(const RealMatrix& cost) {
  const int n = static_cast<int>(cost.rows());
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  std::vector<char> used(n + 1);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }
  double total = 0.0;
  for (int j = 1; j <= n; ++j) total += cost(p[j] - 1, j - 1);
  return total;
}

}  // namespace

Matrix dominant_projector(const Matrix& rho, int rank) {
  const HermitianEigen e = eigh(rho);
  const int d = static_cast<int>(rho.rows());
  if (rank < 1 || rank > d) throw ValidationError("projector rank out of range");
  // Ascending eigenvalues; a stable sort on descending value keeps index order on ties.
  std::vector<int> order(d);
  for (int i = 0; i < d; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return e.values[a] > e.values[b] + 1e-12; });
  Matrix cols(d, rank);
  for (int k = 0; k < rank; ++k) cols.col(k) = e.vectors.col(order[k]);
  return projector_onto(cols);
}

SweepReport truncation_sweep(const Ensemble& mu, int dim_b, int dim_e, const std::vector<int>& ranks,
                             const std::optional<DensityMatrix>& anchor, const Tolerances& tol) {
  if (dim_b < 1 || dim_e < 1 || mu.dim() != dim_b * dim_e)
    throw ValidationError("ensemble dimension does not equal d_B·d_E");
  check_ranks(ranks, dim_e, "ranks");
  const Matrix marginal = trace_out_first(average_state(mu, tol).matrix(), dim_b, dim_e);
  const HermitianEigen e = eigh(marginal);
  const DensityMatrix sigma =
      anchor ? *anchor : DensityMatrix::from_pure(e.vectors.col(e.vectors.cols() - 1));
  if (sigma.dim() != dim_e) throw ValidationError("anchor dimension does not equal d_E");

  SweepReport out;
  const double chi = chi_quantity(mu, tol);
  for (int n : ranks) {
    const KrausChannel lambda = truncation_channel(dominant_projector(marginal, n), sigma, tol);
    SweepRow row;
    row.n = n;
    row.dim = dim_b * n;
    row.chi_n = chi_quantity(image(local_on_second(dim_b, lambda), mu, tol), tol);
    row.chi_limit = chi;
    row.delta = chi - row.chi_n;
    out.rows.push_back(row);
  }
  const double slack = 1e-9;
  out.dominated = std::all_of(out.rows.begin(), out.rows.end(),
                              [&](const SweepRow& r) { return r.chi_n <= r.chi_limit + slack; });
  out.monotone = true;
  for (std::size_t i = 1; i < out.rows.size(); ++i)
    if (out.rows[i].chi_n < out.rows[i - 1].chi_n - slack) out.monotone = false;
  out.converged = out.rows.back().n == dim_e && std::abs(out.rows.back().delta) <= slack;
  return out;
}

double ensemble_distance(const Ensemble& a, const Ensemble& b) {
  if (a.dim() != b.dim()) throw ValidationError("ensembles differ in dimension");
  const int na = static_cast<int>(a.size());
  const int nb = static_cast<int>(b.size());
  const int n = na + nb;
  RealMatrix cost = RealMatrix::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i < na && j < nb) {
        const Member& x = a.members()[i];
        const Member& y = b.members()[j];
        cost(i, j) = std::min(x.weight, y.weight) * trace_distance(x.state.matrix(), y.state.matrix()) +
                     std::abs(x.weight - y.weight);
      } else if (i < na) {
        cost(i, j) = a.members()[i].weight;
      } else if (j < nb) {
        cost(i, j) = b.members()[j].weight;
      }
    }
  return assignment_cost(cost);
}

LscWitness lsc_witness(const KrausChannel& phi, const std::vector<Ensemble>& sequence,
                       const Ensemble& limit, double delta, double tol, const Tolerances& tols) {
  LscWitness out;
  const double base = entropic_disturbance(phi, limit, tols);
  for (const Ensemble& mu : sequence) {
    if (mu.dim() != limit.dim()) throw ValidationError("ensembles differ in dimension");
    out.distances.push_back(ensemble_distance(mu, limit));
    out.differences.push_back(entropic_disturbance(phi, mu, tols) - base);
  }
  const int k = static_cast<int>(sequence.size());
  int start = k;
  while (start > 0 && out.distances[start - 1] <= delta) --start;
  if (start < k) {
    out.tail_start = start;
    out.tail_min = *std::min_element(out.differences.begin() + start, out.differences.end());
    out.violation = out.tail_min < -tol;
  }
  return out;
}

AppendixReport appendix_identity_sweep(const KrausChannel& phi, const Ensemble& mu,
                                       const std::vector<int>& ranks_b,
                                       const std::vector<int>& ranks_e, const Tolerances& tol) {
  if (mu.dim() != phi.dim_in()) throw ValidationError("ensemble dimension does not match channel input");
  const StinespringIsometry iso = stinespring(phi, tol);
  const KrausChannel comp = complementary(phi, tol);
  const int db = iso.dim_b;
  const int de = iso.dim_e;
  check_ranks(ranks_b, db, "B ranks");
  check_ranks(ranks_e, de, "E ranks");

  const DensityMatrix avg = average_state(mu, tol);
  const Matrix out_b = phi.apply(avg.matrix());
  const Matrix out_e = comp.apply(avg.matrix());
  std::vector<Matrix> dilated;
  for (const Member& m : mu.members()) dilated.push_back(iso.dilate(m.state.matrix()));
  const Matrix dilated_avg = iso.dilate(avg.matrix());
  auto mi = [&](const Matrix& w) {
    return mutual_information(BipartiteState(DensityMatrix(w, tol), db, de), tol);
  };
  const double mi_avg_full = mi(dilated_avg);
  std::vector<double> mi_member_full;
  for (const Matrix& w : dilated) mi_member_full.push_back(mi(w));

  AppendixReport report;
  report.mi_monotone = true;
  for (int nb : ranks_b)
    for (int ne : ranks_e) {
      const KrausChannel lb = dominant_truncation(out_b, nb, tol);
      const KrausChannel le = dominant_truncation(out_e, ne, tol);
      const KrausChannel pi = local_product(lb, le);
      AppendixRow row;
      row.n_b = nb;
      row.n_e = ne;
      std::vector<Member> joint;
      double mi_members = 0.0;
      row.mi_monotone = true;
      for (std::size_t i = 0; i < dilated.size(); ++i) {
        const Matrix w = pi.apply(dilated[i]);
        const double v = mi(w);
        mi_members += mu.members()[i].weight * v;
        if (v > mi_member_full[i] + 1e-9) row.mi_monotone = false;
        joint.push_back({mu.members()[i].weight, DensityMatrix(w, tol)});
      }
      row.chi_joint = chi_quantity(Ensemble(std::move(joint), tol), tol);
      row.mi_average = mi(pi.apply(dilated_avg));
      if (row.mi_average > mi_avg_full + 1e-9) row.mi_monotone = false;
      row.chi_output = chi_quantity(image(lb, image(phi, mu, tol), tol), tol);
      row.chi_environment = chi_quantity(image(le, image(comp, mu, tol), tol), tol);
      row.mi_members = mi_members;
      row.lhs = row.chi_joint + row.mi_average;
      row.rhs = row.chi_output + row.chi_environment + row.mi_members;
      row.residual = std::abs(row.lhs - row.rhs);
      report.max_residual = std::max(report.max_residual, row.residual);
      report.mi_monotone = report.mi_monotone && row.mi_monotone;
      report.rows.push_back(row);
    }

  if (ranks_b.back() == db && ranks_e.back() == de) {
    const AppendixRow& full = report.rows.back();
    const DisturbanceIdentity ref = verify_disturbance_identity(phi, mu, tol);
    const double slack = 1e-8;
    report.limit_matches = std::abs(full.chi_joint - ref.chi_input) <= slack &&
                           std::abs(full.mi_average - ref.mi_average) <= slack &&
                           std::abs(full.chi_output - ref.chi_output) <= slack &&
                           std::abs(full.chi_environment - ref.chi_environment) <= slack &&
                           std::abs(full.mi_members - ref.mi_members) <= slack;
  }
  return report;
}

CiLscReport ci_lsc_experiment(const KrausChannel& phi, const KrausChannel& theta,
                              const std::vector<DensityMatrix>& sequence, const DensityMatrix& limit,
                              double tol, double converge_tol, const Tolerances& tols) {
  const DegradingCheck check = verify_degrading(phi, theta, 1e-8, tols);
  if (!check.passed)
    throw ValidationError("degrading map fails verification, residual " +
                          std::to_string(check.residual));
  if (sequence.empty()) throw ValidationError("state sequence must not be empty");
  const KrausChannel comp = complementary(phi, tols);
  CiLscReport out;
  out.limit_value = coherent_information(phi, limit, tols);
  out.min_value = out.limit_value;
  for (const DensityMatrix& rho : sequence) {
    const double v = coherent_information(phi, rho, tols);
    out.values.push_back(v);
    out.min_value = std::min(out.min_value, v);
  }
  out.nonnegative = out.min_value >= -tol;
  const std::size_t half = sequence.size() / 2;
  out.liminf_margin = *std::min_element(out.values.begin() + half, out.values.end()) - out.limit_value;
  out.liminf_holds = out.liminf_margin >= -tol;
  const DensityMatrix& last = sequence.back();
  out.input_entropy_gap = std::abs(von_neumann_entropy(last, tols) - von_neumann_entropy(limit, tols));
  out.exchange_entropy_gap = std::abs(spectral_entropy(comp.apply(last.matrix()), tols.eig) -
                                      spectral_entropy(comp.apply(limit.matrix()), tols.eig));
  out.entropies_converge =
      out.input_entropy_gap <= converge_tol && out.exchange_entropy_gap <= converge_tol;
  return out;
}

}  // namespace qcap
