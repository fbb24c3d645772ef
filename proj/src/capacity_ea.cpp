#include <cmath>
#include <limits>

#include "qcap/capacity.hpp"

namespace qcap {

namespace {

double mi_entropy_form(const KrausChannel& phi, const KrausChannel& comp, const Matrix& rho,
                       double floor) {
  return spectral_entropy(rho, floor) + spectral_entropy(phi.apply(rho), floor) -
         spectral_entropy(comp.apply(rho), floor);
}

struct OracleVertex {
  Vector v;
  double energy = 0.0;
};

OracleVertex top_vertex(const Matrix& g, const Hamiltonian& h, double lambda) {
  const HermitianEigen e = eigh(g - lambda * h.matrix());
  OracleVertex out;
  out.v = e.vectors.col(e.vectors.cols() - 1);
  out.energy = (out.v.adjoint() * h.matrix() * out.v).value().real();
  return out;
}

/// argmax Tr(G S) over states with Tr HS ≤ bound.
Matrix linear_oracle(const Matrix& g, const Hamiltonian& h, double bound) {
  OracleVertex lo = top_vertex(g, h, 0.0);
  if (lo.energy <= bound) return lo.v * lo.v.adjoint();
  double lam_lo = 0.0;
  double lam_hi = 1.0;
  OracleVertex hi = top_vertex(g, h, lam_hi);
  while (hi.energy > bound && lam_hi < 1e12) {
    lam_lo = lam_hi;
    lo = hi;
    lam_hi *= 2.0;
    hi = top_vertex(g, h, lam_hi);
  }
  for (int k = 0; k < 100; ++k) {
    const double mid = 0.5 * (lam_lo + lam_hi);
    if (mid <= lam_lo || mid >= lam_hi) break;
    OracleVertex m = top_vertex(g, h, mid);
    if (m.energy > bound) {
      lam_lo = mid;
      lo = std::move(m);
    } else {
      lam_hi = mid;
      hi = std::move(m);
    }
  }
  if (lo.energy - hi.energy < 1e-15) return hi.v * hi.v.adjoint();
  const double t = (bound - hi.energy) / (lo.energy - hi.energy);
  return t * lo.v * lo.v.adjoint() + (1.0 - t) * hi.v * hi.v.adjoint();
}

/// Entropic mirror step ρ ∝ exp(ln ρ + η(G − λH)) with λ ≥ 0 bisected so the
/// result meets the energy bound.
Matrix mirror_step(const Matrix& log_rho, const Matrix& g, const Hamiltonian& h, double bound,
                   double eta) {
  auto state_at = [&](double lambda) {
    const HermitianEigen eig = eigh(log_rho + eta * (g - lambda * h.matrix()));
    const double top = eig.values.maxCoeff();
    RealVector w = (eig.values.array() - top).exp();
    w /= w.sum();
    return Matrix(eig.vectors * w.cast<Complex>().asDiagonal() * eig.vectors.adjoint());
  };
  Matrix rho = state_at(0.0);
  if (h.energy(rho) <= bound) return rho;
  double lo = 0.0;
  double hi = 1.0;
  while (h.energy(state_at(hi)) > bound && hi < 1e12) {
    lo = hi;
    hi *= 2.0;
  }
  for (int k = 0; k < 100; ++k) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (h.energy(state_at(mid)) > bound)
      lo = mid;
    else
      hi = mid;
  }
  return state_at(hi);
}

}  // namespace

double channel_mutual_information_relative(const KrausChannel& phi, const DensityMatrix& rho,
                                           const Tolerances& tol) {
  if (rho.dim() != phi.dim_in()) throw ValidationError("state dimension does not match channel input");
  const int d = rho.dim();
  const int db = phi.dim_out();
  const Vector amp = purify(rho, tol).amplitudes();
  const Matrix pure = amp * amp.adjoint();
  Matrix joint = Matrix::Zero(db * d, db * d);
  const Matrix id = Matrix::Identity(d, d);
  for (const Matrix& k : phi.kraus()) {
    const Matrix kk = kron(k, id);
    joint += kk * pure * kk.adjoint();
  }
  const Matrix reference = trace_out_first(pure, d, d);
  const DensityMatrix product(kron(phi.apply(rho.matrix()), reference), tol);
  return relative_entropy(DensityMatrix(joint, tol), product, tol);
}

double channel_mutual_information(const KrausChannel& phi, const DensityMatrix& rho,
                                  const Tolerances& tol) {
  if (rho.dim() != phi.dim_in()) throw ValidationError("state dimension does not match channel input");
  const double value = mi_entropy_form(phi, complementary(phi, tol), rho.matrix(), tol.eig);
  const double other = channel_mutual_information_relative(phi, rho, tol);
  if (!(std::abs(value - other) <= 1e-8))
    throw NumericalError("mutual information formulas disagree: " + std::to_string(value) +
                         " vs " + std::to_string(other));
  return value;
}

Matrix mutual_information_gradient(const KrausChannel& phi, const Matrix& rho,
                                   const Tolerances& tol) {
  if (rho.rows() != phi.dim_in() || rho.cols() != phi.dim_in())
    throw ValidationError("state dimension does not match channel input");
  const KrausChannel comp = complementary(phi, tol);
  return -log_floor(rho, tol.eig) - phi.apply_adjoint(log_floor(phi.apply(rho), tol.eig)) +
         comp.apply_adjoint(log_floor(comp.apply(rho), tol.eig));
}

CapacityResult ea_capacity(const KrausChannel& phi, const ConstraintSpec& c,
                           const OptimizerOptions& opts) {
  const Hamiltonian& h = c.hamiltonian();
  if (h.dim() != phi.dim_in()) throw ValidationError("Hamiltonian dimension does not match channel input");
  const Tolerances& tol = opts.tol;
  const KrausChannel comp = complementary(phi, tol);
  const GibbsResult start = gibbs_state(h, c.bound(), tol);
  auto objective = [&](const Matrix& r) { return mi_entropy_form(phi, comp, r, tol.eig); };

  Matrix rho = start.state.matrix();
  double value = objective(rho);
  CapacityResult out;
  out.trace.push_back(value);
  double gap = std::numeric_limits<double>::infinity();
  constexpr double golden = 0.6180339887498949;
  for (int it = 1; it <= opts.max_iterations; ++it) {
    out.iterations = it;
    const Matrix g = mutual_information_gradient(phi, rho, tol);
    const Matrix s = linear_oracle(g, h, c.bound());
    const Matrix dir = s - rho;
    gap = (g * dir).trace().real();
    if (gap <= tol.cert) break;

    double a = 0.0;
    double b = 1.0 - 1e-9;
    double x1 = b - golden * (b - a);
    double x2 = a + golden * (b - a);
    double f1 = objective(rho + x1 * dir);
    double f2 = objective(rho + x2 * dir);
    for (int k = 0; k < 80 && b - a > 1e-12; ++k) {
      if (f1 < f2) {
        a = x1;
        x1 = x2;
        f1 = f2;
        x2 = a + golden * (b - a);
        f2 = objective(rho + x2 * dir);
      } else {
        b = x2;
        x2 = x1;
        f2 = f1;
        x1 = b - golden * (b - a);
        f1 = objective(rho + x1 * dir);
      }
    }
    const double gamma = f1 > f2 ? x1 : x2;
    Matrix cand = hermitian_part(rho + gamma * dir);
    double v = objective(cand);
    // A mirror step after the conditional-gradient step; it converges quickly
    // where the latter zigzags near the boundary of the feasible set.
    const Matrix log_c = log_floor(cand, tol.eig);
    const Matrix gc = mutual_information_gradient(phi, cand, tol);
    for (double eta = 1.0; eta >= 1.0 / 64; eta *= 0.5) {
      const Matrix m = mirror_step(log_c, gc, h, c.bound(), eta);
      const double vm = objective(m);
      if (vm > v) {
        cand = m;
        v = vm;
        break;
      }
    }
    if (!(v > value)) break;
    rho = cand;
    value = v;
    out.trace.push_back(value);
  }

  const DensityMatrix state(rho, tol);
  out.value = channel_mutual_information(phi, state, tol);
  out.state = state;
  const double energy = h.energy(rho);
  const Matrix g = mutual_information_gradient(phi, rho, tol);
  // Multiplier from the final linear subproblem: the λ for which the energy
  // of the top eigenvector of G − λH crosses the bound, zero when slack.
  double lambda = 0.0;
  if (top_vertex(g, h, 0.0).energy > c.bound()) {
    double lo = 0.0;
    double hi = 1.0;
    while (top_vertex(g, h, hi).energy > c.bound() && hi < 1e12) {
      lo = hi;
      hi *= 2.0;
    }
    for (int k = 0; k < 100; ++k) {
      const double mid = 0.5 * (lo + hi);
      if (top_vertex(g, h, mid).energy > c.bound())
        lo = mid;
      else
        hi = mid;
    }
    lambda = hi;
  }
  out.multiplier = lambda;
  out.certificate.lagrangian_gap = std::max(gap, 0.0);
  out.certificate.slackness_residual = std::abs(lambda * (energy - c.bound()));
  out.certificate.passed = gap <= tol.cert && energy <= c.bound() + tol.energy;
  out.converged = out.certificate.passed;
  return out;
}

}  // namespace qcap
