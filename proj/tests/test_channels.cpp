#include <doctest.h>

#include "helpers.hpp"

using namespace qcap;
using th::diag;
using th::ket;

TEST_SUITE("channels") {
  TEST_CASE("apply") {
    random::Rng rng(1);
    const DensityMatrix rho = random::random_state(3, rng);
    CHECK(max_abs(apply(KrausChannel::identity(3), rho).matrix() - rho.matrix()) < 1e-14);
    const DensityMatrix out = apply(KrausChannel::dephasing(2), DensityMatrix::from_pure(th::plus()));
    CHECK(max_abs(out.matrix() - diag({0.5, 0.5})) < 1e-14);
    const KrausChannel u = KrausChannel::unitary(random::haar_unitary(3, rng));
    const DensityMatrix pure = DensityMatrix::from_pure(random::haar_vector(3, rng));
    CHECK(std::abs(von_neumann_entropy(apply(u, pure))) < 1e-10);
    CHECK_THROWS_AS(apply(KrausChannel::identity(2), rho), ValidationError);
  }

  TEST_CASE("Kraus validation") {
    CHECK_THROWS_AS(KrausChannel({diag({1.0, 0.5})}), ValidationError);
    CHECK_THROWS_AS(KrausChannel(std::vector<Matrix>{}), ValidationError);
    CHECK_THROWS_AS(KrausChannel({Matrix::Identity(2, 2), Matrix::Zero(3, 2)}), ValidationError);
  }

  TEST_CASE("random channels are trace preserving and match the oracle action") {
    random::Rng rng(2);
    for (int t = 0; t < 20; ++t) {
      const KrausChannel phi = random::random_channel(2 + t % 3, 2 + t % 2, 2 + t % 3, rng);
      Matrix s = Matrix::Zero(phi.dim_in(), phi.dim_in());
      for (const Matrix& k : phi.kraus()) s += k.adjoint() * k;
      CHECK((s - Matrix::Identity(phi.dim_in(), phi.dim_in())).norm() < 1e-10);
      const DensityMatrix rho = random::random_state(phi.dim_in(), rng);
      CHECK(max_abs(phi.apply(rho.matrix()) - oracle::apply(phi.kraus(), rho.matrix())) < 1e-13);
    }
  }

  TEST_CASE("Stinespring dilation") {
    random::Rng rng(3);
    const Matrix u = random::haar_unitary(2, rng);
    const StinespringIsometry su = stinespring(KrausChannel::unitary(u));
    CHECK(su.dim_e == 1);
    CHECK(max_abs(su.v - u) < 1e-12);

    const StinespringIsometry sp = stinespring(KrausChannel::dephasing(2));
    CHECK(sp.dim_e == 2);
    for (int k = 0; k < 2; ++k) {
      const Vector img = sp.v * ket(2, k);
      CHECK((img - kron(ket(2, k), ket(2, k))).norm() < 1e-12);
    }

    // Three Kraus operators, one a combination of the other two.
    const KrausChannel base = random::random_channel(2, 2, 2, rng);
    const Matrix a = base.kraus()[0];
    const Matrix b = base.kraus()[1];
    const double c = 0.6;
    const double s = 0.8;
    const KrausChannel dep({a, c * b, s * b});
    CHECK(oracle::kraus_span(dep.kraus()) == 2);
    CHECK(stinespring(dep).dim_e == 2);
    CHECK(dep.choi_rank() == 2);

    for (int t = 0; t < 10; ++t) {
      const KrausChannel phi = random::random_channel(3, 2, 2 + t % 3, rng);
      const StinespringIsometry v = stinespring(phi);
      CHECK(v.dim_e == oracle::kraus_span(phi.kraus()));
      CHECK((v.v.adjoint() * v.v - Matrix::Identity(3, 3)).norm() < 1e-10);
      const DensityMatrix rho = random::random_state(3, rng);
      const Matrix joint = v.v * rho.matrix() * v.v.adjoint();
      CHECK(max_abs(trace_out_second(joint, v.dim_b, v.dim_e) - phi.apply(rho.matrix())) < 1e-12);
    }
  }

  TEST_CASE("complementary channel") {
    random::Rng rng(4);
    const KrausChannel cu = complementary(KrausChannel::unitary(random::haar_unitary(2, rng)));
    CHECK(cu.dim_out() == 1);
    const DensityMatrix rho = random::random_state(2, rng);
    CHECK(std::abs(cu.apply(rho.matrix())(0, 0) - 1.0) < 1e-12);

    const Matrix out = complementary(KrausChannel::dephasing(2)).apply(rho.matrix());
    CHECK(max_abs(out - Matrix(rho.matrix().diagonal().asDiagonal())) < 1e-12);

    for (int t = 0; t < 20; ++t) {
      const KrausChannel phi = random::random_channel(2 + t % 2, 2 + t % 3, 2 + t % 3, rng);
      const DensityMatrix r = random::random_state(phi.dim_in(), rng);
      const Matrix env = complementary(phi).apply(r.matrix());
      // Same spectrum as the oracle environment output; the bases may differ.
      const auto a = oracle::eigenvalues(env);
      const auto b = oracle::eigenvalues(oracle::apply_complementary(phi.kraus(), r.matrix()));
      for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(a[a.size() - 1 - i] - b[b.size() - 1 - i]) < 1e-10);
    }
  }

  TEST_CASE("pure inputs give equal output and environment entropies") {
    random::Rng rng(5);
    for (int t = 0; t < 10; ++t) {
      const KrausChannel phi = random::random_channel(3, 3, 2, rng);
      const Matrix psi = DensityMatrix::from_pure(random::haar_vector(3, rng)).matrix();
      CHECK(std::abs(oracle::entropy(phi.apply(psi)) - oracle::entropy(complementary(phi).apply(psi))) < 1e-9);
    }
  }

  TEST_CASE("channel equality is by Choi distance") {
    const KrausChannel a = KrausChannel::dephasing(2);
    const KrausChannel b({-diag({1.0, 0.0}), Complex(0, 1) * diag({0.0, 1.0})});
    CHECK(channels_equal(a, b, 1e-12));
    CHECK(!channels_equal(a, KrausChannel::identity(2), 1e-3));
    CHECK(channel_distance(a, KrausChannel::identity(2)) > 0.5);
  }

  TEST_CASE("truncation channel") {
    const DensityMatrix anchor = DensityMatrix::from_pure(ket(3, 0));
    const KrausChannel full = truncation_channel(Matrix::Identity(3, 3), anchor);
    CHECK(channels_equal(full, KrausChannel::identity(3), 1e-12));

    const Matrix p = diag({1, 1, 0});
    const KrausChannel lam = truncation_channel(p, anchor);
    const Matrix out = lam.apply(DensityMatrix::maximally_mixed(3).matrix());
    CHECK(max_abs(out - diag({2.0 / 3, 1.0 / 3, 0})) < 1e-12);

    CHECK_THROWS_AS(truncation_channel(diag({1, 0.5, 0}), anchor), ValidationError);
    CHECK_THROWS_AS(truncation_channel(diag({0, 1, 0}), anchor), ValidationError);
    CHECK((projector_onto(Matrix::Identity(3, 2)) - p).norm() < 1e-14);
  }

  TEST_CASE("discrete c-q test") {
    const CqCheck pi = is_discrete_cq(KrausChannel::dephasing(2), std::nullopt);
    CHECK(pi.is_cq);
    CHECK(pi.residual < 1e-14);
    const CqCheck id = is_discrete_cq(KrausChannel::identity(2), std::nullopt);
    CHECK(!id.is_cq);
    CHECK(std::abs(id.residual - 1.0) < 1e-12);
    CHECK(!is_discrete_cq(KrausChannel::dephasing(2), th::h01_rotated()).is_cq);
    CHECK(is_discrete_cq(KrausChannel::dephasing(2), th::h01()).is_cq);

    random::Rng rng(6);
    std::vector<DensityMatrix> sigmas;
    for (int k = 0; k < 3; ++k) sigmas.push_back(random::random_state(2, rng));
    const CqCheck c = is_discrete_cq(cq_channel(sigmas), std::nullopt);
    CHECK(c.is_cq);
    CHECK(c.residual <= 1e-12);
  }

  TEST_CASE("c-q channels") {
    std::vector<DensityMatrix> basis = {DensityMatrix::from_pure(ket(2, 0)), DensityMatrix::from_pure(ket(2, 1))};
    CHECK(channels_equal(cq_channel(basis), KrausChannel::dephasing(2), 1e-12));

    random::Rng rng(7);
    const DensityMatrix sigma = random::random_state(3, rng);
    const KrausChannel flat = cq_channel({sigma, sigma});
    for (int t = 0; t < 5; ++t)
      CHECK(max_abs(flat.apply(random::random_state(2, rng).matrix()) - sigma.matrix()) < 1e-12);
    ConstraintSpec c(th::h01(), 0.4);
    OptimizerOptions o;
    o.restarts = 2;
    CHECK(std::abs(chi_capacity(flat, c, o).value) < 1e-9);
  }

  TEST_CASE("degrading maps") {
    const KrausChannel pi = KrausChannel::dephasing(2);
    CHECK(verify_degrading(pi, KrausChannel::identity(2)).passed);

    Matrix t0 = Matrix::Zero(1, 2);
    Matrix t1 = Matrix::Zero(1, 2);
    t0(0, 0) = 1.0;
    t1(0, 1) = 1.0;
    const KrausChannel trace({t0, t1});
    const DegradingCheck id = verify_degrading(KrausChannel::identity(2), trace);
    CHECK(id.passed);

    const DegradingCheck bad = verify_degrading(KrausChannel::identity(2), KrausChannel::dephasing(2));
    CHECK(!bad.passed);
    CHECK(bad.residual > 0.1);

    std::vector<DensityMatrix> basis = {DensityMatrix::from_pure(ket(2, 0)), DensityMatrix::from_pure(ket(2, 1))};
    const KrausChannel theta = degrading_for_orthogonal_cq(basis);
    CHECK(verify_degrading(cq_channel(basis), theta).passed);

    Matrix s0 = Matrix::Zero(3, 3);
    s0.topLeftCorner(2, 2) << 0.7, 0.2, 0.2, 0.3;
    std::vector<DensityMatrix> block = {DensityMatrix(s0), DensityMatrix::from_pure(ket(3, 2))};
    const KrausChannel theta2 = degrading_for_orthogonal_cq(block);
    CHECK(verify_degrading(cq_channel(block), theta2).passed);

    std::vector<DensityMatrix> overlap = {DensityMatrix::from_pure(ket(2, 0)), DensityMatrix::from_pure(th::plus())};
    CHECK_THROWS_AS(degrading_for_orthogonal_cq(overlap), NotApplicable);
  }
}
