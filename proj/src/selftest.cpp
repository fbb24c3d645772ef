#include "qcap/selftest.hpp"

#include <cmath>
#include <functional>
#include <sstream>

#include "qcap/capacity.hpp"
#include "qcap/gaussian.hpp"
#include "qcap/random.hpp"

namespace qcap {

namespace {

double binary_entropy(double p) { return -p * std::log(p) - (1.0 - p) * std::log(1.0 - p); }

std::string fmt(double x) {
  std::ostringstream s;
  s.precision(10);
  s << x;
  return s.str();
}

void check(std::vector<SelfCheck>& out, std::string name, const std::function<std::string()>& body) {
  SelfCheck c{std::move(name), true, {}};
  try {
    c.detail = body();
    if (c.detail.rfind("FAIL", 0) == 0) c.passed = false;
  } catch (const std::exception& e) {
    c.passed = false;
    c.detail = std::string("FAIL: ") + e.what();
  }
  out.push_back(std::move(c));
}

std::string verdict(bool ok, const std::string& detail) { return (ok ? "" : "FAIL: ") + detail; }

}  // namespace

std::vector<SelfCheck> run_selftest(unsigned seed) {
  std::vector<SelfCheck> out;
  const double h02 = binary_entropy(0.2);
  Matrix hdiag = Matrix::Zero(2, 2);
  hdiag(1, 1) = 1.0;

  check(out, "disturbance identity on random channels", [&] {
    random::Rng rng(seed);
    double worst = 0.0;
    for (int t = 0; t < 20; ++t) {
      const int da = 2 + t % 3;
      const auto phi = random::random_channel(da, 2 + (t / 3) % 3, 1 + t % 4, rng);
      const auto mu = random::random_ensemble(da, 1 + t % 5, rng);
      worst = std::max(worst, verify_disturbance_identity(phi, mu).residual);
    }
    return verdict(worst <= 1e-8, "max residual " + fmt(worst));
  });

  check(out, "disturbance bounds on random channels", [&] {
    random::Rng rng(seed + 1);
    for (int t = 0; t < 20; ++t) {
      const int da = 2 + t % 3;
      const auto phi = random::random_channel(da, 2 + t % 2, 1 + t % 3, rng);
      entropic_disturbance(phi, random::random_ensemble(da, 3, rng));
      const auto u = KrausChannel::unitary(random::haar_unitary(da, rng));
      const double d = entropic_disturbance(u, random::random_ensemble(da, 3, rng));
      if (std::abs(d) > 1e-9) return "FAIL: unitary disturbance " + fmt(d);
    }
    return std::string("20 channels, 20 unitaries");
  });

  check(out, "dephasing disturbance of {1/2|0>, 1/2|+>}", [&] {
    Vector zero = Vector::Unit(2, 0);
    Vector plus = Vector::Ones(2) / std::sqrt(2.0);
    const Ensemble mu = Ensemble::of_pure({0.5, 0.5}, {zero, plus});
    const double lam = 0.5 + 0.5 / std::sqrt(2.0);
    const double chi = binary_entropy(lam);
    const double expected = chi - binary_entropy(0.75) + 0.5 * std::log(2.0);
    const double d = entropic_disturbance(KrausChannel::dephasing(2), mu);
    return verdict(std::abs(d - expected) <= 1e-9, "value " + fmt(d));
  });

  check(out, "Gibbs multiplier", [&] {
    const GibbsResult g = gibbs_state(Hamiltonian(hdiag), 0.2);
    const GibbsResult slack = gibbs_state(Hamiltonian(hdiag), 0.6);
    return verdict(std::abs(g.multiplier - std::log(4.0)) <= 1e-8 && slack.multiplier == 0.0,
                   "lambda " + fmt(g.multiplier));
  });

  check(out, "constrained chi-capacity of dephasing", [&] {
    OptimizerOptions o;
    o.seed = seed;
    o.restarts = 4;
    const auto r = chi_capacity(KrausChannel::dephasing(2), ConstraintSpec(Hamiltonian(hdiag), 0.2), o);
    return verdict(std::abs(r.value - h02) <= 1e-6 && r.certificate.passed, "value " + fmt(r.value));
  });

  check(out, "entanglement-assisted capacity of identity", [&] {
    const auto r = ea_capacity(KrausChannel::identity(2), ConstraintSpec(Hamiltonian(hdiag), 0.2));
    return verdict(std::abs(r.value - 2.0 * h02) <= 1e-6 && r.converged, "value " + fmt(r.value));
  });

  check(out, "coherent information routes", [&] {
    random::Rng rng(seed + 2);
    double worst = 0.0;
    for (int t = 0; t < 10; ++t) {
      const int da = 2 + t % 2;
      const auto phi = random::random_channel(da, 2 + t % 3, 2 + t % 3, rng);
      const auto rho = random::random_state(da, rng);
      worst = std::max(worst, std::abs(coherent_information(phi, rho) - ci_via_chi(phi, rho).value));
    }
    return verdict(worst <= 1e-8, "max difference " + fmt(worst));
  });

  check(out, "Gaussian attenuator classification", [&] {
    const GaussianChannelSpec spec(1, 1, std::sqrt(0.5) * RealMatrix::Identity(2, 2),
                                   0.25 * RealMatrix::Identity(2, 2));
    const auto c = classify_gap(spec);
    return verdict(c.verdict == "gap>0 guaranteed", c.verdict);
  });

  return out;
}

}  // namespace qcap
