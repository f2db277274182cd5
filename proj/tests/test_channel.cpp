#include "bqca/channel.hpp"

#include "bqca/metrics.hpp"
#include "oracles.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace bqca;

namespace {

DensityMatrix plus_product_density(int n) {
  Eigen::Vector2cd plus = Eigen::Vector2cd{1, 1} / std::sqrt(2.0);
  return DensityMatrix::from_pure(init_product(n, std::vector<Eigen::Vector2cd>(n, plus)));
}

}  // namespace

TEST_CASE("channel construction validates trace preservation") {
  REQUIRE_NOTHROW(rule110_channel().validate());
  REQUIRE_NOTHROW(mixed_rule(0.3).validate());
  REQUIRE_THROWS_AS(mixed_rule(-0.1), std::invalid_argument);
  REQUIRE_THROWS_AS(mixed_rule(1.5), std::invalid_argument);

  NeighborhoodChannel bad;
  Eigen::Matrix2cd half = 0.5 * Eigen::Matrix2cd::Identity();
  for (int ab = 0; ab < 4; ++ab) bad.effects[ab] = {half};
  REQUIRE_THROWS_AS(bad.validate(), std::invalid_argument);

  // full-channel effects satisfy sum F^dag F = 1
  for (double p : {0.0, 0.4, 1.0}) {
    NeighborhoodChannel ch = mixed_rule(p);
    Mat acc = Mat::Zero(8, 8);
    for (int mu = 0; mu < ch.effect_count(); ++mu) {
      Mat f = ch.full_effect(mu);
      acc += f.adjoint() * f;
    }
    REQUIRE((acc - Mat::Identity(8, 8)).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("rule-110 channel reconstructs the printed full effects") {
  NeighborhoodChannel ch = rule110_channel();
  // F1 = |00><00| x 1 + |10><10| x 1 + |11><11| x sx + |01><01| x |1><1|
  Mat f1 = Mat::Zero(8, 8);
  auto put = [&](int a, int b, const Eigen::Matrix2cd& u) {
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) f1(4 * a + 2 * i + b, 4 * a + 2 * j + b) += u(i, j);
  };
  Eigen::Matrix2cd one_proj = Eigen::Matrix2cd::Zero();
  one_proj(1, 1) = 1;
  put(0, 0, Eigen::Matrix2cd::Identity());
  put(1, 0, Eigen::Matrix2cd::Identity());
  put(1, 1, pauli_x());
  put(0, 1, one_proj);
  REQUIRE((ch.full_effect(0) - f1).cwiseAbs().maxCoeff() < 1e-15);

  Mat f2 = Mat::Zero(8, 8);
  Eigen::Matrix2cd raise = Eigen::Matrix2cd::Zero();
  raise(1, 0) = 1;  // |1><0|
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) f2(2 * i + 1, 2 * j + 1) = raise(i, j);  // |01><01| block
  REQUIRE((ch.full_effect(1) - f2).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("mixed_rule(1) equals rule110_channel, action-based") {
  REQUIRE(channels_equal(mixed_rule(1.0), rule110_channel(), 1e-12));
  REQUIRE(!channels_equal(mixed_rule(0.5), rule110_channel(), 1e-6));

  // and on random n=6 states
  oracle::Rng rng(61);
  auto bc = BoundaryConditions::fixed(0, 0);
  for (int rep = 0; rep < 3; ++rep) {
    DensityMatrix a = DensityMatrix::from_pure(rng.state(6));
    DensityMatrix b = a;
    channel_step(a, mixed_rule(1.0), bc);
    channel_step(b, rule110_channel(), bc);
    REQUIRE((a.mat - b.mat).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("identity channel and trace preservation") {
  NeighborhoodChannel id = unitary_channel(Rule::identity());
  oracle::Rng rng(62);
  DensityMatrix rho = DensityMatrix::from_pure(rng.state(6));
  DensityMatrix before = rho;
  channel_step(rho, id, BoundaryConditions::periodic());
  REQUIRE((rho.mat - before.mat).cwiseAbs().maxCoeff() < 1e-13);

  DensityMatrix r2 = DensityMatrix::from_pure(rng.state(6));
  for (int t = 0; t < 10; ++t) {
    channel_step(r2, mixed_rule(0.7), BoundaryConditions::fixed(0, 1));
    REQUIRE(std::abs(r2.trace_real() - 1.0) < 1e-10);
  }
}

TEST_CASE("rule-110 channel purifies the center when the neighborhood is |01>") {
  // arbitrary mixed center state between |0> and |1> neighbors
  oracle::Rng rng(63);
  DensityMatrix rho(3, Mat::Zero(8, 8));
  Eigen::Matrix2cd center = Eigen::Matrix2cd::Zero();
  center(0, 0) = 0.3;
  center(1, 1) = 0.7;
  center(0, 1) = center(1, 0) = 0.2;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) rho.mat(2 * i + 1, 2 * j + 1) = center(i, j);
  apply_channel_site(rho, rule110_channel(), 1, BoundaryConditions::fixed(0, 0));
  DensityMatrix r_center = reduced_density(rho, {1});
  REQUIRE(std::abs(r_center.mat(1, 1).real() - 1.0) < 1e-12);
  REQUIRE(std::abs(mixedness(r_center)) < 1e-12);
}

TEST_CASE("classical consistency: rule 110 on all 64 basis states") {
  auto bc = BoundaryConditions::fixed(0, 0);
  NeighborhoodChannel ch = rule110_channel();
  for (int idx = 0; idx < 64; ++idx) {
    std::vector<int> bits(6);
    for (int j = 0; j < 6; ++j) bits[j] = (idx >> (5 - j)) & 1;
    DensityMatrix rho = DensityMatrix::from_pure(init_basis(6, bits));
    channel_step(rho, ch, bc);
    std::vector<int> expect = oracle::classical_rule110_step(bits, 0, 0);
    PureState target = init_basis(6, expect);
    double overlap = (target.amp.adjoint() * rho.mat * target.amp)(0).real();
    REQUIRE(std::abs(overlap - 1.0) < 1e-12);
  }
}

TEST_CASE("unitary-lift consistency with the pure-state engine") {
  oracle::Rng rng(64);
  for (int rep = 0; rep < 3; ++rep) {
    Rule rule = rng.general_rule();
    auto bc = (rep == 0) ? BoundaryConditions::periodic() : BoundaryConditions::fixed(rep % 2, 0);
    PureState psi = rng.state(6);
    DensityMatrix rho = DensityMatrix::from_pure(psi);
    NeighborhoodChannel lift = unitary_channel(rule);
    for (int t = 0; t < 20; ++t) {
      step(psi, rule, bc);
      channel_step(rho, lift, bc);
    }
    DensityMatrix ref = DensityMatrix::from_pure(psi);
    REQUIRE((rho.mat - ref.mat).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("hermiticity, trace and purity bounds over 50 steps") {
  DensityMatrix rho = plus_product_density(6);
  auto bc = BoundaryConditions::fixed(0, 0);
  NeighborhoodChannel ch = mixed_rule(0.5);
  for (int t = 0; t < 50; ++t) {
    channel_step(rho, ch, bc);
    REQUIRE(rho.hermiticity_error() < 1e-8);
    REQUIRE(std::abs(rho.trace_real() - 1.0) < 1e-8);
    REQUIRE(purity(rho) <= 1.0 + 1e-10);
  }
  REQUIRE(rho.min_eigenvalue() > -1e-9);
}

TEST_CASE("same-species channel updates commute") {
  oracle::Rng rng(65);
  DensityMatrix rho = DensityMatrix::from_pure(rng.state(6));
  NeighborhoodChannel ch = mixed_rule(0.8);
  auto bc = BoundaryConditions::fixed(0, 0);
  DensityMatrix fwd = rho, rev = rho;
  for (int j : {1, 3, 5}) apply_channel_site(fwd, ch, j, bc);
  for (int j : {5, 3, 1}) apply_channel_site(rev, ch, j, bc);
  REQUIRE((fwd.mat - rev.mat).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("p=0 leaves the uniform superposition stationary with zero tangle") {
  DensityMatrix rho = plus_product_density(6);
  DensityMatrix initial = rho;
  auto bc = BoundaryConditions::fixed(0, 0);
  NeighborhoodChannel ch = mixed_rule(0.0);
  for (int t = 0; t < 12; ++t) {
    channel_step(rho, ch, bc);
    REQUIRE((rho.mat - initial.mat).cwiseAbs().maxCoeff() < 1e-10);
    REQUIRE(average_pair_tangle(rho) < 1e-10);
  }
}

TEST_CASE("p=1 relaxes to constant mixedness; entanglement grows with p") {
  auto bc = BoundaryConditions::fixed(0, 0);

  DensityMatrix r1 = plus_product_density(6);
  std::vector<double> mix;
  std::vector<double> tangle_p1;
  for (int t = 1; t <= 12; ++t) {
    channel_step(r1, rule110_channel(), bc);
    mix.push_back(mixedness(r1));
    tangle_p1.push_back(average_pair_tangle(r1));
  }
  for (size_t t = 3; t + 1 < mix.size(); ++t) {
    REQUIRE(std::abs(mix[t + 1] - mix[t]) < 1e-8);
  }

  DensityMatrix rh = plus_product_density(6);
  std::vector<double> tangle_ph;
  for (int t = 1; t <= 12; ++t) {
    channel_step(rh, mixed_rule(0.5), bc);
    tangle_ph.push_back(average_pair_tangle(rh));
  }
  double avg1 = 0, avgh = 0;
  for (int t = 0; t < 12; ++t) {
    avg1 += tangle_p1[t] / 12;
    avgh += tangle_ph[t] / 12;
  }
  REQUIRE(avg1 > avgh);
  REQUIRE(avgh > 0);
}

TEST_CASE("site arguments are validated") {
  DensityMatrix rho = plus_product_density(4);
  REQUIRE_THROWS_AS(apply_channel_site(rho, rule110_channel(), 7, BoundaryConditions::fixed(0, 0)),
                    std::out_of_range);
}
