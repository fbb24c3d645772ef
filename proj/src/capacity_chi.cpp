#include <algorithm>
#include <cmath>
#include <future>
#include <limits>

#include "qcap/capacity.hpp"
#include "qcap/random.hpp"

namespace qcap {

ConstraintSpec::ConstraintSpec(Hamiltonian h, double bound) : h_(std::move(h)), bound_(bound) {
  if (!(bound_ > h_.min_energy()))
    throw InfeasibleConstraint("energy bound " + std::to_string(bound_) +
                               " does not exceed the minimal energy " +
                               std::to_string(h_.min_energy()));
}

namespace {

random::Rng restart_rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), 0x9e3779b9u};
  return random::Rng(seq);
}

struct PureMember {
  Vector psi;
  Matrix out;  // Φ(|ψ⟩⟨ψ|)
  double entropy = 0.0;
  double energy = 0.0;
};

/// Ensemble of pure input states with their channel outputs cached.
class PureModel {
 public:
  PureModel(const KrausChannel& phi, const Hamiltonian& h, double floor)
      : phi_(phi), h_(h), floor_(floor) {}

  double floor() const { return floor_; }

  PureMember member(const Vector& v) const {
    PureMember m;
    m.psi = v / v.norm();
    m.out = phi_.apply(m.psi * m.psi.adjoint());
    m.entropy = spectral_entropy(m.out, floor_);
    m.energy = (m.psi.adjoint() * h_.matrix() * m.psi).value().real();
    return m;
  }

  Matrix average(const std::vector<PureMember>& ms, const RealVector& p) const {
    Matrix s = Matrix::Zero(phi_.dim_out(), phi_.dim_out());
    for (std::size_t i = 0; i < ms.size(); ++i)
      if (p[i] > 0.0) s += p[i] * ms[i].out;
    return s;
  }

  double chi(const std::vector<PureMember>& ms, const RealVector& p) const {
    double mean = 0.0;
    for (std::size_t i = 0; i < ms.size(); ++i) mean += p[i] * ms[i].entropy;
    return spectral_entropy(average(ms, p), floor_) - mean;
  }

  double energy_of(const std::vector<PureMember>& ms, const RealVector& p) const {
    return energy(ms, p);
  }

  double energy(const std::vector<PureMember>& ms, const RealVector& p) const {
    double e = 0.0;
    for (std::size_t i = 0; i < ms.size(); ++i) e += p[i] * ms[i].energy;
    return e;
  }

  /// Weight update p_i ∝ p_i exp(η(D(Φ(ψ_i)‖σ) − λ e_i)) with λ ≥ 0 bisected
  /// so the new weights meet the energy bound. Returns λ.
  double reweight(const std::vector<PureMember>& ms, RealVector& p, double bound,
                  double eta = 1.0) const {
    const Matrix log_sigma = log_floor(average(ms, p), floor_);
    const Eigen::Index n = p.size();
    RealVector base(n);
    RealVector e(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      e[i] = ms[i].energy;
      if (p[i] <= 0.0) {
        base[i] = -std::numeric_limits<double>::infinity();
        continue;
      }
      const double d = -ms[i].entropy - (ms[i].out * log_sigma).trace().real();
      base[i] = std::log(p[i]) + eta * d;
    }
    auto weights_at = [&](double lambda) {
      RealVector z = base - eta * lambda * e;
      const double top = z.maxCoeff();
      RealVector w(n);
      for (Eigen::Index i = 0; i < n; ++i) w[i] = std::isfinite(z[i]) ? std::exp(z[i] - top) : 0.0;
      return RealVector(w / w.sum());
    };
    auto energy_at = [&](double lambda) { return weights_at(lambda).dot(e); };

    double lambda = 0.0;
    if (energy_at(0.0) > bound) {
      double lo = 0.0;
      double hi = 1.0;
      while (energy_at(hi) > bound && hi < 1e12) {
        lo = hi;
        hi *= 2.0;
      }
      for (int k = 0; k < 200; ++k) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (energy_at(mid) > bound)
          lo = mid;
        else
          hi = mid;
      }
      lambda = hi;
    }
    p = weights_at(lambda);
    return lambda;
  }

  /// Joint Riemannian ascent of χ over the member states with weights fixed.
  /// When the energy bound is active the direction is projected onto the
  /// tangent of the constraint (in the weight-scaled metric) and the energy is
  /// pulled back onto the bound after the step. Returns false when no step of
  /// length ≥ 1e-14 improves χ.
  bool ascend_states(std::vector<PureMember>& ms, const RealVector& p, double bound,
                     double& step, double& multiplier) const {
    const std::size_t n = ms.size();
    const Matrix log_sigma = log_floor(average(ms, p), floor_);
    std::vector<Vector> gc(n);
    std::vector<Vector> ge(n);
    double cc = 0.0;
    double ce = 0.0;
    double ee = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const Vector& psi = ms[i].psi;
      if (p[i] < 1e-12) {
        gc[i] = ge[i] = Vector::Zero(psi.size());
        continue;
      }
      const Vector mpsi = phi_.apply_adjoint(log_floor(ms[i].out, floor_) - log_sigma) * psi;
      gc[i] = mpsi - (psi.adjoint() * mpsi).value() * psi;
      const Vector hpsi = h_.matrix() * psi;
      ge[i] = hpsi - ms[i].energy * psi;
      cc += p[i] * gc[i].squaredNorm();
      ce += p[i] * gc[i].dot(ge[i]).real();
      ee += p[i] * ge[i].squaredNorm();
    }
    const double energy = this->energy(ms, p);
    const bool active = energy > bound - 1e-9 && ee > 1e-30 && ce > 0.0;
    const double alpha = active ? ce / ee : 0.0;
    multiplier = ee > 1e-14 ? alpha : std::numeric_limits<double>::quiet_NaN();
    std::vector<Vector> dir(n);
    double slope = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      dir[i] = gc[i] - alpha * ge[i];
      slope += p[i] * dir[i].squaredNorm();
    }
    if (slope < 1e-26) return false;
    const double value = chi(ms, p);
    for (double t = step; t >= 1e-14; t *= 0.5) {
      std::vector<PureMember> cand(n);
      for (std::size_t i = 0; i < n; ++i)
        cand[i] = p[i] < 1e-12 ? ms[i] : member(ms[i].psi + t * dir[i]);
      if (!restore_energy(cand, p, bound)) continue;
      if (chi(cand, p) >= value + 1e-4 * t * 2.0 * slope) {
        ms = std::move(cand);
        step = std::min(2.0 * t, 1e3);
        return true;
      }
    }
    step = 1e-3;
    return false;
  }

  /// Joint ascent in V = [√p_i ψ_i] on the unit sphere, projected onto the
  /// energy level set when the bound is active. Moves states and weights
  /// together so the energy coupling between them cannot stall the ascent.
  bool ascend_joint(std::vector<PureMember>& ms, RealVector& p, double bound,
                    double& step) const {
    const std::size_t n = ms.size();
    const int d = static_cast<int>(ms.front().psi.size());
    const Matrix log_sigma = log_floor(average(ms, p), floor_);
    Matrix v(d, n);
    Matrix g(d, n);
    for (std::size_t i = 0; i < n; ++i) {
      v.col(i) = std::sqrt(std::max(p[i], 0.0)) * ms[i].psi;
      g.col(i) = 2.0 * (phi_.apply_adjoint(log_floor(ms[i].out, floor_) - log_sigma) * v.col(i));
    }
    auto inner = [](const Matrix& a, const Matrix& b) { return (a.adjoint() * b).trace().real(); };
    Matrix dir = g - inner(v, g) * v;
    const double energy = this->energy(ms, p);
    if (energy > bound - 1e-9) {
      Matrix hv = h_.matrix() * v;
      hv -= inner(v, hv) * v;
      const double hh = inner(hv, hv);
      const double gh = inner(dir, hv);
      if (hh > 1e-24 && gh > 0.0) dir -= (gh / hh) * hv;
    }
    const double slope = inner(dir, dir);
    if (slope < 1e-26) return false;
    const double value = chi(ms, p);
    for (double t = step; t >= 1e-14; t *= 0.5) {
      Matrix w = v + t * dir;
      w /= w.norm();
      for (int k = 0; k < 12; ++k) {
        const double excess = inner(w, h_.matrix() * w) - bound;
        if (excess <= 1e-13) break;
        Matrix gw = h_.matrix() * w;
        gw -= inner(w, gw) * w;
        const double gg = inner(gw, gw);
        if (gg < 1e-30) break;
        w -= (1.5 * excess / (2.0 * gg)) * gw;
        w /= w.norm();
      }
      if (inner(w, h_.matrix() * w) - bound > 1e-13) continue;
      std::vector<PureMember> cand(n);
      RealVector q(n);
      for (std::size_t i = 0; i < n; ++i) {
        q[i] = w.col(i).squaredNorm();
        cand[i] = q[i] > 1e-300 ? member(w.col(i)) : ms[i];
      }
      q /= q.sum();
      if (energy_of(cand, q) > bound + 1e-12) continue;
      if (chi(cand, q) >= value + 1e-4 * t * slope) {
        ms = std::move(cand);
        p = q;
        step = std::min(2.0 * t, 1e3);
        return true;
      }
    }
    step = 1e-3;
    return false;
  }

 private:
  /// Moves states down the energy gradient until Σ p e ≤ bound.
  bool restore_energy(std::vector<PureMember>& ms, const RealVector& p, double bound) const {
    for (int k = 0; k < 12; ++k) {
      const double excess = energy(ms, p) - bound;
      if (excess <= 1e-13) return true;
      std::vector<Vector> ge(ms.size());
      double ee = 0.0;
      for (std::size_t i = 0; i < ms.size(); ++i) {
        ge[i] = h_.matrix() * ms[i].psi - ms[i].energy * ms[i].psi;
        ee += p[i] * ge[i].squaredNorm();
      }
      if (ee < 1e-30) return false;
      const double beta = 1.5 * excess / (2.0 * ee);
      for (std::size_t i = 0; i < ms.size(); ++i)
        if (p[i] >= 1e-12) ms[i] = member(ms[i].psi - beta * ge[i]);
    }
    return energy(ms, p) - bound <= 1e-13;
  }
  const KrausChannel& phi_;
  const Hamiltonian& h_;
  double floor_;
};

struct RestartOutcome {
  std::vector<PureMember> members;
  RealVector weights;
  double lambda = 0.0;
  double value = -std::numeric_limits<double>::infinity();
  int iterations = 0;
  std::vector<double> trace;
};

/// Alternates state and weight steps until the gain stalls or the iteration
/// budget runs out. Every accepted step keeps χ non-decreasing and feasible.
void polish(const PureModel& model, RestartOutcome& r, double bound, const OptimizerOptions& opts) {
  const double feasible_to = bound + opts.tol.energy;
  double step = 0.05;
  double joint_step = 0.05;
  double multiplier = r.lambda;
  int stalled = 0;
  for (int it = 1; it <= opts.max_iterations; ++it) {
    ++r.iterations;
    const double before = r.value;
    std::vector<PureMember> cand = r.members;
    if (model.ascend_states(cand, r.weights, bound, step, multiplier) &&
        model.chi(cand, r.weights) >= r.value) {
      r.members = std::move(cand);
      r.value = model.chi(r.members, r.weights);
    }
    {
      std::vector<PureMember> members = r.members;
      RealVector q = r.weights;
      if (model.ascend_joint(members, q, bound, joint_step) && model.chi(members, q) >= r.value) {
        r.members = std::move(members);
        r.weights = q;
        r.value = model.chi(r.members, r.weights);
      }
    }
    double lambda = r.lambda;
    for (double eta = 1.0; eta >= 1.0 / 1024; eta *= 0.5) {
      RealVector p = r.weights;
      const double lam = model.reweight(r.members, p, bound, eta);
      const double value = model.chi(r.members, p);
      if (value >= r.value && model.energy(r.members, p) <= feasible_to) {
        r.weights = p;
        r.value = value;
        lambda = lam;
        break;
      }
    }
    // The projection coefficient is the KKT multiplier once states settle;
    // the weight-step λ is only a fallback while the bound is slack.
    r.lambda = model.energy(r.members, r.weights) > bound - 1e-9 && std::isfinite(multiplier)
                   ? multiplier
                   : lambda;
    if (r.value > before) r.trace.push_back(r.value);
    stalled = r.value - before < opts.stall ? stalled + 1 : 0;
    if (stalled >= opts.patience) break;
  }
}

/// Adds `v` with a small weight, evicting a duplicate member when there is one
/// (its weight merges into its twin) and the lightest member otherwise.
bool inject(const PureModel& model, RestartOutcome& r, const Vector& v, double bound,
            const OptimizerOptions& opts) {
  const std::size_t n = r.members.size();
  RealVector base = r.weights;
  Eigen::Index slot = 0;
  base.minCoeff(&slot);
  double overlap = 0.0;
  std::size_t twin = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double f = std::norm(r.members[i].psi.dot(r.members[j].psi));
      if (f > overlap) {
        overlap = f;
        twin = i;
        slot = static_cast<Eigen::Index>(j);
      }
    }
  if (overlap > 1.0 - 1e-8) {
    base[twin] += base[slot];
  } else {
    base.minCoeff(&slot);
  }
  base[slot] = 0.0;
  base /= base.sum();
  for (double eps = 1e-1; eps >= 1e-7; eps *= 0.1) {
    std::vector<PureMember> members = r.members;
    members[slot] = model.member(v);
    RealVector p = (1.0 - eps) * base;
    p[slot] = eps;
    model.reweight(members, p, bound);
    const double value = model.chi(members, p);
    if (value >= r.value && model.energy(members, p) <= bound + opts.tol.energy) {
      r.members = std::move(members);
      r.weights = p;
      r.value = value;
      r.trace.push_back(value);
      return true;
    }
  }
  return false;
}

RestartOutcome run_chi_restart(const PureModel& model, const ConstraintSpec& c,
                               const OptimizerOptions& opts, int index) {
  const Hamiltonian& h = c.hamiltonian();
  const int d = h.dim();
  const int n = d * d;
  random::Rng rng = restart_rng(opts.seed, static_cast<std::uint64_t>(index));

  RestartOutcome r;
  // Member 0 is always the ground state so the weight bisection is feasible.
  r.members.push_back(model.member(h.spectrum().vectors.col(0)));
  for (int i = 1; i < n; ++i) {
    if (index == 0 && i < d)
      r.members.push_back(model.member(h.spectrum().vectors.col(i)));
    else
      r.members.push_back(model.member(random::haar_vector(d, rng)));
  }
  r.weights = RealVector::Constant(n, 1.0 / n);
  r.lambda = model.reweight(r.members, r.weights, c.bound());
  r.value = model.chi(r.members, r.weights);
  r.trace.push_back(r.value);
  polish(model, r, c.bound(), opts);
  return r;
}

/// Weighted least-squares λ in D(Φ(ψ_i)‖σ) − χ = λ(e_i − bound) over the
/// members; falls back to the running estimate when the energies coincide.
double member_multiplier(const PureModel& model, const RestartOutcome& r, double bound) {
  if (model.energy(r.members, r.weights) < bound - 1e-9) return 0.0;
  const Matrix log_sigma = log_floor(model.average(r.members, r.weights), model.floor());
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < r.members.size(); ++i) {
    const PureMember& m = r.members[i];
    const double d = -m.entropy - (m.out * log_sigma).trace().real();
    const double de = m.energy - bound;
    num += r.weights[i] * (d - r.value) * de;
    den += r.weights[i] * de * de;
  }
  if (den < 1e-14) return r.lambda;
  return std::max(num / den, 0.0);
}

Ensemble to_ensemble(const RestartOutcome& r, const Tolerances& tol) {
  std::vector<Member> members;
  for (std::size_t i = 0; i < r.members.size(); ++i)
    if (r.weights[i] >= tol.weight)
      members.push_back({r.weights[i], DensityMatrix::from_pure(r.members[i].psi)});
  double total = 0.0;
  for (const Member& m : members) total += m.weight;
  for (Member& m : members) m.weight /= total;
  return Ensemble(std::move(members), tol);
}

template <typename Outcome, typename Run>
std::vector<Outcome> run_restarts(const OptimizerOptions& opts, Run run) {
  const int count = std::max(opts.restarts, 1);
  std::vector<Outcome> out;
  out.reserve(count);
  if (opts.parallel) {
    std::vector<std::future<Outcome>> jobs;
    for (int k = 0; k < count; ++k) jobs.push_back(std::async(std::launch::async, run, k));
    for (auto& j : jobs) out.push_back(j.get());
  } else {
    for (int k = 0; k < count; ++k) out.push_back(run(k));
  }
  return out;
}

/// Highest value wins; ties within 1e-12 go to the lowest restart index.
template <typename Outcome>
int best_index(const std::vector<Outcome>& outcomes) {
  int best = 0;
  for (int k = 1; k < static_cast<int>(outcomes.size()); ++k)
    if (outcomes[k].value > outcomes[best].value + 1e-12) best = k;
  return best;
}

double state_value(const KrausChannel& phi, const Matrix& rho, const Matrix& log_sigma,
                   const Hamiltonian& h, double bound, double lambda, double floor) {
  const Matrix out = phi.apply(rho);
  const double d = -spectral_entropy(out, floor) - (out * log_sigma).trace().real();
  return d - lambda * (h.energy(rho) - bound);
}

}  // namespace

OptimalityCertificate certify_optimality(const KrausChannel& phi, const Ensemble& mu,
                                         const ConstraintSpec& c, double multiplier,
                                         const OptimizerOptions& opts) {
  if (mu.dim() != phi.dim_in()) throw ValidationError("ensemble dimension does not match channel input");
  const Tolerances& tol = opts.tol;
  const Hamiltonian& h = c.hamiltonian();
  const double floor = tol.eig;
  const DensityMatrix avg = average_state(mu, tol);
  const Matrix log_sigma = log_floor(phi.apply(avg.matrix()), floor);
  const double chi = chi_quantity(image(phi, mu, tol), tol);
  const int d = phi.dim_in();

  auto value_of = [&](const Vector& v) {
    return state_value(phi, v * v.adjoint(), log_sigma, h, c.bound(), multiplier, floor);
  };

  std::vector<Vector> starts;
  for (const Member& m : mu.members()) {
    const HermitianEigen e = eigh(m.state.matrix());
    starts.push_back(e.vectors.col(d - 1));
  }
  for (int k = 0; k < d; ++k) {
    starts.push_back(h.spectrum().vectors.col(k));
    starts.push_back(Vector::Unit(d, k));
  }
  random::Rng rng = restart_rng(opts.seed, 0x5eed5eedULL);
  for (int k = 0; k < opts.probe_restarts; ++k) starts.push_back(random::haar_vector(d, rng));

  OptimalityCertificate cert;
  cert.n_probe_restarts = static_cast<int>(starts.size());
  double best = -std::numeric_limits<double>::infinity();
  Vector best_state;
  for (Vector psi : starts) {
    psi.normalize();
    double f = value_of(psi);
    double t = 0.05;
    int quiet = 0;
    for (int it = 0; it < 400 && quiet < 3; ++it) {
      const Matrix out = phi.apply(psi * psi.adjoint());
      const Matrix m = phi.apply_adjoint(log_floor(out, floor) - log_sigma) - multiplier * h.matrix();
      const Vector mpsi = m * psi;
      const Vector g = mpsi - (psi.adjoint() * mpsi).value() * psi;
      const double g2 = g.squaredNorm();
      if (g2 < 1e-24) break;
      bool moved = false;
      for (int tries = 0; tries < 40; ++tries, t *= 0.5) {
        const Vector cand = (psi + t * g).normalized();
        const double fc = value_of(cand);
        if (fc >= f + 1e-4 * t * 2.0 * g2) {
          quiet = fc - f < 1e-15 ? quiet + 1 : 0;
          psi = cand;
          f = fc;
          moved = true;
          break;
        }
      }
      if (!moved) break;
      t = std::min(2.0 * t, 1e3);
    }
    if (f > best) {
      best = f;
      best_state = psi;
    }
  }
  cert.lagrangian_gap = best - chi;

  for (const Member& m : mu.members()) {
    if (m.weight < 1e-3) continue;
    const double v =
        state_value(phi, m.state.matrix(), log_sigma, h, c.bound(), multiplier, floor);
    cert.member_residual = std::max(cert.member_residual, std::abs(v - chi));
  }
  const double energy = h.energy(avg.matrix());
  cert.slackness_residual = std::abs(multiplier * (energy - c.bound()));
  const bool feasible = energy <= c.bound() + tol.energy;
  cert.passed = feasible && cert.lagrangian_gap <= tol.cert && cert.member_residual <= tol.cert &&
                cert.slackness_residual <= 1e-6;
  if (!cert.passed && cert.lagrangian_gap > tol.cert) cert.violating_state = best_state;
  return cert;
}

CapacityResult chi_capacity(const KrausChannel& phi, const ConstraintSpec& c,
                            const OptimizerOptions& opts) {
  if (c.hamiltonian().dim() != phi.dim_in())
    throw ValidationError("Hamiltonian dimension does not match channel input");
  const PureModel model(phi, c.hamiltonian(), opts.tol.eig);
  const auto outcomes = run_restarts<RestartOutcome>(
      opts, [&](int k) { return run_chi_restart(model, c, opts, k); });
  const int best = best_index(outcomes);
  RestartOutcome r = outcomes[best];
  r.lambda = member_multiplier(model, r, c.bound());

  OptimalityCertificate cert = certify_optimality(phi, to_ensemble(r, opts.tol), c, r.lambda, opts);
  for (int round = 0; round < 10 && !cert.passed && cert.violating_state; ++round) {
    if (!inject(model, r, *cert.violating_state, c.bound(), opts)) break;
    polish(model, r, c.bound(), opts);
    r.lambda = member_multiplier(model, r, c.bound());
    cert = certify_optimality(phi, to_ensemble(r, opts.tol), c, r.lambda, opts);
  }

  Ensemble mu = to_ensemble(r, opts.tol);
  if (!cert.passed && r.lambda > 0.0) {
    // The bound is an infimum over λ; search near the estimate.
    OptimizerOptions quick = opts;
    quick.probe_restarts = 4;
    auto gap_at = [&](double lam) {
      return certify_optimality(phi, mu, c, lam, quick).lagrangian_gap;
    };
    const double w = 0.05 * (1.0 + r.lambda);
    double a = std::max(0.0, r.lambda - w);
    double b = r.lambda + w;
    constexpr double golden = 0.6180339887498949;
    double x1 = b - golden * (b - a);
    double x2 = a + golden * (b - a);
    double f1 = gap_at(x1);
    double f2 = gap_at(x2);
    for (int k = 0; k < 40 && b - a > 1e-10; ++k) {
      if (f1 > f2) {
        a = x1;
        x1 = x2;
        f1 = f2;
        x2 = a + golden * (b - a);
        f2 = gap_at(x2);
      } else {
        b = x2;
        x2 = x1;
        f2 = f1;
        x1 = b - golden * (b - a);
        f1 = gap_at(x1);
      }
    }
    const double refined = f1 < f2 ? x1 : x2;
    OptimalityCertificate retry = certify_optimality(phi, mu, c, refined, opts);
    if (retry.lagrangian_gap < cert.lagrangian_gap) {
      cert = retry;
      r.lambda = refined;
    }
  }
  CapacityResult out;
  out.value = chi_quantity(image(phi, mu, opts.tol), opts.tol);
  out.state = average_state(mu, opts.tol);
  out.multiplier = r.lambda;
  out.iterations = r.iterations;
  out.best_restart = best;
  out.trace = r.trace;
  out.certificate = cert;
  out.converged = cert.passed;
  out.ensemble = std::move(mu);
  return out;
}

namespace {

struct StiefelOutcome {
  Matrix y;
  double value = -std::numeric_limits<double>::infinity();
  double grad_norm = 0.0;
  int iterations = 0;
  bool stalled = false;
  std::vector<double> trace;
};

/// Rows of Y orthonormal; ψ_i = X y_i decomposes ρ = X X†.
class DecompositionModel {
 public:
  DecompositionModel(const KrausChannel& phi, Matrix x, double floor)
      : phi_(phi), x_(std::move(x)), floor_(floor) {
    out_entropy_ = spectral_entropy(phi_.apply(x_ * x_.adjoint()), floor_);
  }

  double chi(const Matrix& y) const {
    double f = 0.0;
    for (Eigen::Index i = 0; i < y.cols(); ++i) {
      const Vector psi = x_ * y.col(i);
      const double p = psi.squaredNorm();
      if (p < 1e-15) continue;
      f += p * spectral_entropy(phi_.apply(psi * psi.adjoint()), floor_);
    }
    return out_entropy_ - f;
  }

  /// Euclidean ascent direction X† Φ*(ln(A_i/p_i)) X y_i per column.
  Matrix direction(const Matrix& y) const {
    Matrix dir = Matrix::Zero(y.rows(), y.cols());
    for (Eigen::Index i = 0; i < y.cols(); ++i) {
      const Vector psi = x_ * y.col(i);
      const double p = psi.squaredNorm();
      if (p < 1e-15) continue;
      const Matrix a = phi_.apply(psi * psi.adjoint()) / p;
      dir.col(i) = x_.adjoint() * (phi_.apply_adjoint(log_floor(a, floor_)) * psi);
    }
    return dir;
  }

 private:
  const KrausChannel& phi_;
  Matrix x_;
  double floor_;
  double out_entropy_ = 0.0;
};

Matrix orthonormalize_rows(const Matrix& m) {
  const HermitianEigen e = eigh(m * m.adjoint());
  RealVector inv(e.values.size());
  for (Eigen::Index i = 0; i < inv.size(); ++i) inv[i] = 1.0 / std::sqrt(std::max(e.values[i], 1e-300));
  return e.vectors * inv.cast<Complex>().asDiagonal() * e.vectors.adjoint() * m;
}

StiefelOutcome run_decomposition_restart(const DecompositionModel& model, int rank, int n,
                                         const OptimizerOptions& opts, int index) {
  StiefelOutcome r;
  if (index == 0) {
    r.y = Matrix::Identity(rank, n);
  } else {
    random::Rng rng = restart_rng(opts.seed, static_cast<std::uint64_t>(index));
    r.y = random::haar_unitary(n, rng).topRows(rank);
  }
  r.value = model.chi(r.y);
  r.trace.push_back(r.value);
  double t = 0.1;
  int stalled = 0;
  for (int it = 1; it <= opts.max_iterations; ++it) {
    r.iterations = it;
    const Matrix dir = model.direction(r.y);
    const Matrix tangent =
        dir - 0.5 * (dir * r.y.adjoint() + r.y * dir.adjoint()) * r.y;
    const double g2 = tangent.squaredNorm();
    r.grad_norm = std::sqrt(g2);
    if (g2 < 1e-24) {
      r.stalled = true;
      break;
    }
    bool moved = false;
    for (int tries = 0; tries < 40; ++tries, t *= 0.5) {
      const Matrix cand = orthonormalize_rows(r.y + t * tangent);
      const double v = model.chi(cand);
      if (v >= r.value + 1e-4 * t * 2.0 * g2) {
        stalled = v - r.value < opts.stall ? stalled + 1 : 0;
        r.y = cand;
        r.value = v;
        r.trace.push_back(v);
        moved = true;
        break;
      }
    }
    if (!moved || stalled >= opts.patience) {
      r.stalled = true;
      break;
    }
    t = std::min(2.0 * t, 1e3);
  }
  return r;
}

}  // namespace

CapacityResult chi_function(const KrausChannel& phi, const DensityMatrix& rho,
                            const OptimizerOptions& opts) {
  if (rho.dim() != phi.dim_in()) throw ValidationError("state dimension does not match channel input");
  const Tolerances& tol = opts.tol;
  const int d = rho.dim();
  const int n = d * d;
  const HermitianEigen e = eigh(rho.matrix());
  std::vector<Eigen::Index> cols;
  for (Eigen::Index j = d - 1; j >= 0; --j)
    if (e.values[j] > tol.eig) cols.push_back(j);
  const int rank = static_cast<int>(cols.size());
  Matrix x(d, rank);
  for (int c = 0; c < rank; ++c) x.col(c) = std::sqrt(e.values[cols[c]]) * e.vectors.col(cols[c]);
  const DecompositionModel model(phi, x, tol.eig);

  const auto outcomes = run_restarts<StiefelOutcome>(
      opts, [&](int k) { return run_decomposition_restart(model, rank, n, opts, k); });
  const int best = best_index(outcomes);
  const StiefelOutcome& r = outcomes[best];

  std::vector<double> weights;
  std::vector<Vector> states;
  for (Eigen::Index i = 0; i < r.y.cols(); ++i) {
    const Vector psi = x * r.y.col(i);
    const double p = psi.squaredNorm();
    if (p < tol.weight) continue;
    weights.push_back(p);
    states.push_back(psi);
  }
  double total = 0.0;
  for (double w : weights) total += w;
  for (double& w : weights) w /= total;
  Ensemble mu = Ensemble::of_pure(weights, states, tol);

  CapacityResult out;
  out.value = chi_quantity(image(phi, mu, tol), tol);
  const double ceiling = von_neumann_entropy(rho, tol);
  if (out.value > ceiling * (1.0 + 1e-9) + 1e-12)
    throw NumericalError("χ-function exceeds the input entropy");
  out.state = rho;
  out.iterations = r.iterations;
  out.best_restart = best;
  out.trace = r.trace;
  out.certificate.lagrangian_gap = r.grad_norm;
  out.certificate.passed = r.grad_norm <= std::sqrt(tol.cert);
  out.converged = r.stalled;
  out.ensemble = std::move(mu);
  return out;
}

}  // namespace qcap
