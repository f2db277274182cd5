#include "bqca/state.hpp"

#include "oracles.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace bqca;

TEST_CASE("init_basis places a single amplitude at the indexed state") {
  PureState s = init_basis(2, {0, 0});
  REQUIRE(s.amp[0] == cx(1, 0));
  REQUIRE(s.amp.tail(3).norm() == 0.0);

  // site 0 is the most significant bit
  s = init_basis(2, {0, 1});
  REQUIRE(s.amp[1] == cx(1, 0));

  s = init_basis(3, {1, 0, 1});
  REQUIRE(s.amp[5] == cx(1, 0));

  REQUIRE_THROWS_AS(init_basis(3, {0, 1}), std::invalid_argument);
}

TEST_CASE("init_product matches basis construction and rotated references") {
  Eigen::Vector2cd zero{1, 0}, one{0, 1};
  PureState a = init_product(2, {zero, one});
  PureState b = init_basis(2, {0, 1});
  REQUIRE((a.amp - b.amp).norm() < 1e-15);

  // e^{-i pi/4 sigma_y}|0> = (|0>+|1>)/sqrt(2), via the series exponential
  Eigen::Matrix2cd ry = oracle::exp_rotation(-M_PI / 4, {0, 1, 0});
  Eigen::Vector2cd plus = ry * zero;
  int n = 6;
  PureState u = init_product(n, std::vector<Eigen::Vector2cd>(n, plus));
  for (Eigen::Index i = 0; i < u.amp.size(); ++i) {
    REQUIRE(std::abs(u.amp[i] - cx(std::pow(2.0, -n / 2.0), 0)) < 1e-12);
  }

  Eigen::Vector2cd unnormalized{0.5, 0.1};
  REQUIRE_THROWS_AS(init_product(1, {unnormalized}), std::invalid_argument);
}

TEST_CASE("apply_local agrees with dense embedding on random operators") {
  oracle::Rng rng(101);
  int n = 6;
  for (int rep = 0; rep < 20; ++rep) {
    PureState s = rng.state(n);
    // random 2-site and 3-site unitaries on random (possibly unsorted) sites
    std::vector<std::vector<int>> site_sets = {{3}, {5, 1}, {0, 4, 2}, {5, 0, 3}};
    for (const auto& sites : site_sets) {
      Eigen::Index d = Eigen::Index{1} << sites.size();
      Mat op(d, d);
      for (Eigen::Index i = 0; i < d * d; ++i) {
        op(i % d, i / d) = cx(rng.uniform(-1, 1), rng.uniform(-1, 1));
      }
      Eigen::HouseholderQR<Mat> qr(op);
      Mat q = qr.householderQ();
      PureState fast = s;
      apply_local(fast, q, sites);
      Vec slow = oracle::embed(n, q, sites) * s.amp;
      REQUIRE((fast.amp - slow).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
}

TEST_CASE("apply_local basics") {
  PureState s = init_basis(2, {0, 0});
  apply_local(s, pauli_x(), {0});
  REQUIRE((s.amp - init_basis(2, {1, 0}).amp).norm() < 1e-15);

  PureState t = init_basis(2, {0, 0});
  apply_local(t, Mat::Identity(4, 4), {0, 1});
  REQUIRE((t.amp - init_basis(2, {0, 0}).amp).norm() < 1e-15);

  // e^{-i pi/2 sigma_x} = -i sigma_x
  PureState u = init_basis(2, {0, 0});
  apply_local(u, oracle::exp_rotation(-M_PI / 2, {1, 0, 0}), {1});
  REQUIRE(std::abs(u.amp[1] - cx(0, -1)) < 1e-14);

  REQUIRE_THROWS_AS(apply_local(u, Mat::Identity(4, 4), {0}), std::invalid_argument);
  REQUIRE_THROWS_AS(apply_local(u, pauli_x(), {2}), std::out_of_range);
  REQUIRE_THROWS_AS(apply_local(u, Mat::Identity(4, 4), {1, 1}), std::invalid_argument);
}

TEST_CASE("apply_local on density matrices is conjugation") {
  oracle::Rng rng(7);
  int n = 4;
  PureState s = rng.state(n);
  DensityMatrix rho = DensityMatrix::from_pure(s);
  Eigen::Matrix2cd u = rng.su2();
  apply_local(rho, u, {2});
  apply_local(s, u, {2});
  DensityMatrix ref = DensityMatrix::from_pure(s);
  REQUIRE((rho.mat - ref.mat).cwiseAbs().maxCoeff() < 1e-12);
  REQUIRE(std::abs(rho.trace_real() - 1.0) < 1e-12);
}

TEST_CASE("reduced_density basics and brute-force agreement") {
  // product state -> pure reduced state
  oracle::Rng rng(11);
  Eigen::Vector2cd q0 = rng.qubit(), q1 = rng.qubit();
  PureState prod = init_product(2, {q0, q1});
  DensityMatrix r0 = reduced_density(prod, {0});
  REQUIRE(std::abs((r0.mat * r0.mat).trace().real() - 1.0) < 1e-12);

  // Bell state -> maximally mixed single qubit
  Vec bell = Vec::Zero(4);
  bell[0] = bell[3] = 1 / std::sqrt(2.0);
  PureState b(2, bell);
  for (int site : {0, 1}) {
    DensityMatrix r = reduced_density(b, {site});
    REQUIRE(std::abs((r.mat * r.mat).trace().real() - 0.5) < 1e-12);
  }

  // pair (0,1) of 4-qubit GHZ: diag(1/2, 0, 0, 1/2)
  DensityMatrix g = reduced_density(oracle::ghz_state(4), {0, 1});
  Mat expect = Mat::Zero(4, 4);
  expect(0, 0) = expect(3, 3) = 0.5;
  REQUIRE((g.mat - expect).cwiseAbs().maxCoeff() < 1e-14);

  // random states against the brute-force partial trace
  for (int rep = 0; rep < 10; ++rep) {
    PureState s = rng.state(6);
    for (const auto& keep : std::vector<std::vector<int>>{{2}, {0, 5}, {4, 1, 3}}) {
      Mat fast = reduced_density(s, keep).mat;
      Mat slow = oracle::partial_trace(s, keep);
      REQUIRE((fast - slow).cwiseAbs().maxCoeff() < 1e-12);
    }
  }

  REQUIRE_THROWS_AS(reduced_density(b, {}), std::invalid_argument);
}

TEST_CASE("fidelity_up_to_phase") {
  oracle::Rng rng(3);
  PureState s = rng.state(5);
  REQUIRE(std::abs(fidelity_up_to_phase(s, s) - 1.0) < 1e-12);

  PureState t = s;
  t.amp *= std::polar(1.0, 1.234);
  REQUIRE(std::abs(fidelity_up_to_phase(s, t) - 1.0) < 1e-12);

  PureState z = init_basis(1, {0}), o = init_basis(1, {1});
  REQUIRE(fidelity_up_to_phase(z, o) == 0.0);

  PureState w = rng.state(4);
  REQUIRE_THROWS_AS(fidelity_up_to_phase(s, w), std::invalid_argument);
}

TEST_CASE("norm preservation over long unitary sequences") {
  oracle::Rng rng(17);
  PureState s = rng.state(8);
  for (int i = 0; i < 300; ++i) {
    int a = static_cast<int>(rng.uniform(0, 8));
    apply_local(s, rng.su2(), {a % 8});
  }
  REQUIRE(std::abs(s.norm() - 1.0) < 1e-10);
}

TEST_CASE("apply_local on disjoint site sets commutes") {
  oracle::Rng rng(23);
  for (int rep = 0; rep < 10; ++rep) {
    PureState s = rng.state(6);
    Eigen::Matrix2cd u1 = rng.su2(), u2 = rng.su2();
    Mat two = oracle::embed(2, u1, {0}) * oracle::embed(2, u2, {1});
    PureState ab = s, ba = s;
    apply_local(ab, two, {0, 3});
    apply_local(ab, two, {5, 2});
    apply_local(ba, two, {5, 2});
    apply_local(ba, two, {0, 3});
    REQUIRE((ab.amp - ba.amp).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("nested partial trace is consistent") {
  oracle::Rng rng(29);
  PureState s = rng.state(7);
  DensityMatrix big = reduced_density(s, {1, 4, 6});
  DensityMatrix nested = reduced_density(big, {0, 2});  // sites 1 and 6 of the original
  DensityMatrix direct = reduced_density(s, {1, 6});
  REQUIRE((nested.mat - direct.mat).cwiseAbs().maxCoeff() < 1e-10);
  REQUIRE(std::abs(nested.trace_real() - 1.0) < 1e-10);
}
