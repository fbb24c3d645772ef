#include <doctest.h>

#include "helpers.hpp"

using namespace qcap;
using th::diag;
using th::ket;

TEST_SUITE("ensembles") {
  TEST_CASE("ensemble validation") {
    const DensityMatrix a = DensityMatrix::from_pure(ket(2, 0));
    CHECK_THROWS_AS(Ensemble({{0.5, a}, {0.4, a}}), ValidationError);
    CHECK_THROWS_AS(Ensemble({{1.2, a}, {-0.2, a}}), ValidationError);
    CHECK_THROWS_AS(Ensemble({{0.5, a}, {0.5, DensityMatrix::maximally_mixed(3)}}), ValidationError);
    CHECK_THROWS_AS(Ensemble(std::vector<Member>{}), ValidationError);
    const Ensemble pruned({{1.0, a}, {1e-14, DensityMatrix::maximally_mixed(2)}});
    CHECK(pruned.size() == 1);
  }

  TEST_CASE("average state") {
    random::Rng rng(1);
    const DensityMatrix rho = random::random_state(3, rng);
    CHECK(max_abs(average_state(Ensemble({{1.0, rho}})).matrix() - rho.matrix()) < 1e-14);
    const Ensemble basis = Ensemble::of_pure({0.5, 0.5}, {ket(2, 0), ket(2, 1)});
    CHECK(max_abs(average_state(basis).matrix() - diag({0.5, 0.5})) < 1e-14);
    Matrix expected(2, 2);
    expected << 0.75, 0.25, 0.25, 0.25;
    CHECK(max_abs(average_state(th::plus_zero()).matrix() - expected) < 1e-14);
  }

  TEST_CASE("chi-quantity") {
    random::Rng rng(2);
    CHECK(std::abs(chi_quantity(Ensemble({{1.0, random::random_state(3, rng)}}))) < 1e-12);
    const Ensemble basis = Ensemble::of_pure({0.5, 0.5}, {ket(2, 0), ket(2, 1)});
    CHECK(chi_quantity(basis) == doctest::Approx(std::log(2.0)).epsilon(1e-12));

    const double lam = 0.5 * (1.0 + 1.0 / std::sqrt(2.0));
    const double expected = oracle::entropy_of({lam, 1.0 - lam});
    CHECK(std::abs(chi_quantity(th::plus_zero()) - expected) < 1e-12);
    CHECK(std::abs(expected - 0.4164955) < 1e-7);

    for (int t = 0; t < 30; ++t) {
      const Ensemble mu = random::random_ensemble(2 + t % 3, 1 + t % 5, rng, t % 2 == 0);
      const double v = chi_quantity(mu);
      CHECK(std::abs(v - th::oracle_chi(mu)) < 1e-9);
      CHECK(std::abs(v - chi_quantity_entropy_form(mu)) < 1e-9);
      CHECK(v >= -1e-12);
      CHECK(v <= std::log(double(mu.dim())) + 1e-12);
    }
  }

  TEST_CASE("image") {
    random::Rng rng(3);
    const Ensemble mu = random::random_ensemble(3, 4, rng);
    const Ensemble same = image(KrausChannel::identity(3), mu);
    for (std::size_t i = 0; i < mu.size(); ++i) {
      CHECK(same.members()[i].weight == mu.members()[i].weight);
      CHECK(max_abs(same.members()[i].state.matrix() - mu.members()[i].state.matrix()) < 1e-14);
    }
    const Ensemble out = image(KrausChannel::dephasing(2), th::plus_zero());
    CHECK(max_abs(out.members()[0].state.matrix() - diag({1, 0})) < 1e-14);
    CHECK(max_abs(out.members()[1].state.matrix() - diag({0.5, 0.5})) < 1e-14);
    CHECK_THROWS_AS(image(KrausChannel::identity(2), mu), ValidationError);
  }

  TEST_CASE("entropic disturbance of the worked qubit example") {
    const KrausChannel pi = KrausChannel::dephasing(2);
    const Ensemble mu = th::plus_zero();
    const double chi_out = oracle::entropy_of({0.75, 0.25}) - 0.5 * std::log(2.0);
    CHECK(std::abs(chi_out - 0.215762) < 1e-6);
    const double expected = th::oracle_chi(mu) - chi_out;
    CHECK(std::abs(entropic_disturbance(pi, mu) - expected) < 1e-12);
    CHECK(std::abs(chi_quantity(image(pi, mu)) - chi_out) < 1e-12);

    const DisturbanceIdentity d = verify_disturbance_identity(pi, mu);
    CHECK(std::abs(d.chi_input - d.chi_output - expected) < 1e-12);
    CHECK(d.residual < 1e-12);
    // Π̂ = Π up to relabeling, and V maps |k⟩ to |kk⟩.
    CHECK(std::abs(d.chi_environment - chi_out) < 1e-12);
  }

  TEST_CASE("disturbance vanishes for identity and unitary channels") {
    random::Rng rng(4);
    for (int t = 0; t < 20; ++t) {
      const Ensemble mu = random::random_ensemble(2 + t % 3, 1 + t % 5, rng);
      CHECK(std::abs(entropic_disturbance(KrausChannel::identity(mu.dim()), mu)) < 1e-12);
      const KrausChannel u = KrausChannel::unitary(random::haar_unitary(mu.dim(), rng));
      CHECK(std::abs(entropic_disturbance(u, mu)) < 1e-9);
      const DisturbanceIdentity d = verify_disturbance_identity(u, mu);
      CHECK(d.residual < 1e-9);
      CHECK(std::abs(d.chi_environment) < 1e-12);
      CHECK(std::abs(d.mi_average) < 1e-12);
    }
  }

  TEST_CASE("disturbance identity and bound on random channels") {
    random::Rng rng(5);
    for (int t = 0; t < 60; ++t) {
      const int da = 2 + t % 3;
      const int db = 2 + (t / 3) % 3;
      const int k = std::max(1 + (t / 9) % 4, (da + db - 1) / db);
      const KrausChannel phi = random::random_channel(da, db, k, rng);
      const Ensemble mu = random::random_ensemble(da, 1 + t % 5, rng, t % 2 == 0);
      const DisturbanceIdentity d = verify_disturbance_identity(phi, mu);
      CHECK(d.residual <= 1e-8);
      CHECK(std::abs(d.chi_input - th::oracle_chi(mu)) < 1e-9);
      CHECK(std::abs(d.chi_output - th::oracle_chi_image(phi, mu)) < 1e-9);
      CHECK(std::abs(d.chi_environment - th::oracle_chi_environment(phi, mu)) < 1e-9);
      const double delta = entropic_disturbance(phi, mu);
      const int de = oracle::kraus_span(phi.kraus());
      CHECK(delta >= -1e-12);
      CHECK(delta <= std::min(std::log(double(da)), 2.0 * std::log(double(de))) + 1e-9);
    }
  }

  TEST_CASE("private information") {
    random::Rng rng(6);
    const Ensemble mu = random::random_ensemble(3, 3, rng);
    const KrausChannel u = KrausChannel::unitary(random::haar_unitary(3, rng));
    const PrivateInformation pu = private_information(u, mu);
    CHECK(std::abs(pu.value - chi_quantity(mu)) < 1e-9);
    CHECK(std::abs(pu.chi_environment) < 1e-12);

    const Ensemble pure = Ensemble::of_pure({0.5, 0.5}, {th::plus(), Vector(th::hadamard() * ket(2, 1))});
    CHECK(std::abs(private_information(KrausChannel::dephasing(2), pure).value) < 1e-12);

    for (int t = 0; t < 10; ++t) {
      std::vector<DensityMatrix> sigmas;
      Matrix s0 = Matrix::Zero(4, 4);
      s0.topLeftCorner(2, 2) = random::random_state(2, rng).matrix();
      Matrix s1 = Matrix::Zero(4, 4);
      s1.bottomRightCorner(2, 2) = random::random_state(2, rng).matrix();
      const KrausChannel cq = cq_channel({DensityMatrix(s0), DensityMatrix(s1)});
      const Ensemble nu = random::random_ensemble(2, 3, rng);
      CHECK(private_information(cq, nu).value >= -1e-9);
    }
  }
}
