#include <doctest.h>

#include <limits>

#include "helpers.hpp"

using namespace qcap;
using th::diag;
using th::ket;

TEST_SUITE("numerics") {
  TEST_CASE("entropy of simple spectra") {
    CHECK(von_neumann_entropy(DensityMatrix::maximally_mixed(2)) == doctest::Approx(std::log(2.0)).epsilon(1e-14));
    CHECK(von_neumann_entropy(DensityMatrix::from_pure(th::plus())) == doctest::Approx(0.0));
    const double expected = oracle::entropy_of({0.75, 0.25});
    CHECK(von_neumann_entropy(DensityMatrix::diagonal({0.75, 0.25})) == doctest::Approx(expected).epsilon(1e-14));
    CHECK(expected == doctest::Approx(0.562335).epsilon(1e-6));
  }

  TEST_CASE("entropy matches the Jacobi oracle on random states") {
    random::Rng rng(11);
    for (int t = 0; t < 30; ++t) {
      const DensityMatrix rho = random::random_state(2 + t % 5, rng, t % 3 == 0 ? 1 + t % 2 : 0);
      CHECK(std::abs(von_neumann_entropy(rho) - oracle::entropy(rho.matrix())) < 1e-10);
    }
  }

  TEST_CASE("density matrix validation") {
    Matrix m = diag({0.5, 0.5});
    m(0, 1) = 0.3;
    CHECK_THROWS_AS(DensityMatrix{m}, ValidationError);
    CHECK_THROWS_AS(DensityMatrix(diag({1.2, -0.2})), ValidationError);
    CHECK_THROWS_AS(DensityMatrix(diag({0.6, 0.6})), ValidationError);
    Matrix nan = diag({0.5, 0.5});
    nan(0, 0) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(DensityMatrix{nan}, ValidationError);
    CHECK_NOTHROW(DensityMatrix(diag({1.0 + 1e-11, -1e-11})));
  }

  TEST_CASE("relative entropy") {
    random::Rng rng(3);
    const DensityMatrix rho = random::random_state(3, rng);
    CHECK(std::abs(relative_entropy(rho, rho)) < 1e-12);
    const DensityMatrix zero = DensityMatrix::from_pure(ket(2, 0));
    const DensityMatrix mixed = DensityMatrix::maximally_mixed(2);
    CHECK(relative_entropy(zero, mixed) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    CHECK(relative_entropy(mixed, zero) == std::numeric_limits<double>::infinity());
  }

  TEST_CASE("relative entropy is nonnegative and matches the spectral formula") {
    random::Rng rng(5);
    for (int t = 0; t < 20; ++t) {
      const DensityMatrix a = random::random_state(3, rng);
      const DensityMatrix b = random::random_state(3, rng);
      const double v = relative_entropy(a, b);
      CHECK(v >= 0.0);
      const HermitianEigen eb = eigh(b.matrix());
      const Matrix logb = eb.vectors * eb.values.array().log().matrix().cast<Complex>().asDiagonal() *
                          eb.vectors.adjoint();
      const double direct = -oracle::entropy(a.matrix()) - (a.matrix() * logb).trace().real();
      CHECK(std::abs(v - direct) < 1e-9);
    }
  }

  TEST_CASE("partial traces") {
    random::Rng rng(8);
    const DensityMatrix rho = random::random_state(2, rng);
    const DensityMatrix sigma = random::random_state(3, rng);
    const BipartiteState prod(DensityMatrix(kron(rho.matrix(), sigma.matrix())), 2, 3);
    CHECK(max_abs(partial_trace(prod, "B").matrix() - rho.matrix()) < 1e-12);
    CHECK(max_abs(partial_trace(prod, "E").matrix() - sigma.matrix()) < 1e-12);
    CHECK_THROWS_AS(partial_trace(prod, "Q"), ValidationError);

    Vector bell = (kron(ket(2, 0), ket(2, 0)) + kron(ket(2, 1), ket(2, 1))) / std::sqrt(2.0);
    const BipartiteState b(DensityMatrix::from_pure(bell), 2, 2);
    CHECK(max_abs(partial_trace(b, "B").matrix() - diag({0.5, 0.5})) < 1e-12);
    CHECK(max_abs(partial_trace(b, "E").matrix() - diag({0.5, 0.5})) < 1e-12);

    const BipartiteState cl(DensityMatrix::diagonal({0.5, 0, 0, 0.5}), 2, 2);
    CHECK(max_abs(partial_trace(cl, "E").matrix() - diag({0.5, 0.5})) < 1e-12);

    for (int t = 0; t < 10; ++t) {
      const DensityMatrix w = random::random_state(6, rng);
      CHECK(max_abs(trace_out_second(w.matrix(), 2, 3) - oracle::trace_second(w.matrix(), 2, 3)) < 1e-13);
      CHECK(max_abs(trace_out_first(w.matrix(), 2, 3) - oracle::trace_first(w.matrix(), 2, 3)) < 1e-13);
    }
  }

  TEST_CASE("mutual information") {
    random::Rng rng(9);
    const DensityMatrix prod(kron(random::random_state(2, rng).matrix(), random::random_state(2, rng).matrix()));
    CHECK(std::abs(mutual_information(BipartiteState(prod, 2, 2))) < 1e-10);
    Vector bell = (kron(ket(2, 0), ket(2, 0)) + kron(ket(2, 1), ket(2, 1))) / std::sqrt(2.0);
    CHECK(mutual_information(BipartiteState(DensityMatrix::from_pure(bell), 2, 2)) ==
          doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-12));
    CHECK(mutual_information(BipartiteState(DensityMatrix::diagonal({0.5, 0, 0, 0.5}), 2, 2)) ==
          doctest::Approx(std::log(2.0)).epsilon(1e-12));
    for (int t = 0; t < 10; ++t) {
      const DensityMatrix w = random::random_state(6, rng);
      const double mi = mutual_information(BipartiteState(w, 2, 3));
      const double bound = 2.0 * std::log(2.0);
      CHECK(mi >= -1e-12);
      CHECK(mi <= bound + 1e-12);
      const double direct = oracle::entropy(oracle::trace_second(w.matrix(), 2, 3)) +
                            oracle::entropy(oracle::trace_first(w.matrix(), 2, 3)) - oracle::entropy(w.matrix());
      CHECK(std::abs(mi - direct) < 1e-9);
    }
  }

  TEST_CASE("purification") {
    const PureState p = purify(DensityMatrix::diagonal({0.8, 0.2}));
    Vector expected = Vector::Zero(4);
    expected(0) = std::sqrt(0.8);
    expected(3) = std::sqrt(0.2);
    CHECK((p.amplitudes() - expected).norm() < 1e-12);

    const PureState q = purify(DensityMatrix::from_pure(th::plus()));
    CHECK((q.amplitudes() - kron(th::plus(), ket(2, 0))).norm() < 1e-12);

    random::Rng rng(4);
    const DensityMatrix rho = random::random_state(3, rng);
    const Vector a = purify(rho).amplitudes();
    CHECK(max_abs(trace_out_second(a * a.adjoint(), 3, 3) - rho.matrix()) < 1e-12);
    CHECK((purify(rho).amplitudes() - a).norm() == 0.0);
  }

  TEST_CASE("eigh phase convention is deterministic") {
    random::Rng rng(2);
    const Matrix u = random::haar_unitary(3, rng);
    const Matrix h = u * diag({0.1, 0.5, 2.0}) * u.adjoint();
    const HermitianEigen e = eigh(h);
    for (int j = 0; j < 3; ++j) {
      int k = 0;
      while (std::abs(e.vectors(k, j)) <= 1e-12) ++k;
      CHECK(std::abs(e.vectors(k, j).imag()) < 1e-14);
      CHECK(e.vectors(k, j).real() > 0.0);
    }
    CHECK(e.values(0) <= e.values(1));
    const HermitianEigen f = eigh(Complex(0, 1) * Complex(0, -1) * h);
    CHECK(max_abs(e.vectors - f.vectors) == 0.0);
  }

  TEST_CASE("Gibbs state") {
    const GibbsResult g = gibbs_state(th::h01(), 0.2);
    CHECK(std::abs(g.multiplier - std::log(4.0)) < 1e-8);
    CHECK(max_abs(g.state.matrix() - diag({0.8, 0.2})) < 1e-9);
    CHECK(std::abs(g.energy - 0.2) < 1e-10);

    const GibbsResult slack = gibbs_state(th::h01(), 0.7);
    CHECK(slack.multiplier == 0.0);
    CHECK(max_abs(slack.state.matrix() - diag({0.5, 0.5})) < 1e-14);

    const GibbsResult flat = gibbs_state(Hamiltonian(Matrix::Zero(3, 3)), 0.4);
    CHECK(max_abs(flat.state.matrix() - DensityMatrix::maximally_mixed(3).matrix()) < 1e-14);

    CHECK_THROWS_AS(gibbs_state(th::h01(), 0.0), InfeasibleConstraint);
    CHECK_THROWS_AS(gibbs_state(th::h01(), -1.0), InfeasibleConstraint);
  }

  TEST_CASE("Gibbs state maximizes entropy on the energy shell") {
    random::Rng rng(12);
    for (int t = 0; t < 10; ++t) {
      const Hamiltonian h = random::random_hamiltonian(3, rng);
      const double bound = h.min_energy() + 0.3 * (h.mean_energy() - h.min_energy());
      const GibbsResult g = gibbs_state(h, bound);
      CHECK(std::abs(g.energy - bound) < 1e-9);
      const double s = von_neumann_entropy(g.state);
      for (int k = 0; k < 20; ++k) {
        const DensityMatrix other = random::random_state(3, rng);
        if (h.energy(other.matrix()) <= bound) CHECK(oracle::entropy(other.matrix()) <= s + 1e-10);
      }
    }
  }

  TEST_CASE("tolerance overrides") {
    Tolerances tol;
    tol.set("cert", 1e-8);
    CHECK(tol.cert == 1e-8);
    CHECK(tol.as_map().at("cert") == 1e-8);
    CHECK_THROWS_AS(tol.set("nope", 1.0), ValidationError);
  }
}
