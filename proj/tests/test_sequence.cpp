#include "bqca/sequence.hpp"

#include "bqca/metrics.hpp"
#include "oracles.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace bqca;

namespace {

PureState seeded_state(int n, int seed_site, const Eigen::Vector2cd& q) {
  std::vector<Eigen::Vector2cd> sites(n, Eigen::Vector2cd{1, 0});
  sites[seed_site] = q;
  return init_product(n, sites);
}

Eigen::Vector2cd plus_state() { return Eigen::Vector2cd{1, 1} / std::sqrt(2.0); }

PureState run_program(const SequenceProgram& p, PureState s) {
  execute(p, s);
  return s;
}

PureState run_schedule(const SequenceProgram& p, PureState s) {
  simulate_schedule(p.schedule, s, p.bc);
  return s;
}

}  // namespace

TEST_CASE("transport moves an arbitrary qubit to the far end") {
  oracle::Rng rng(31);
  for (int n : {4, 6, 14}) {
    SequenceProgram p = transport(n);
    REQUIRE(std::abs(p.total_time() - n * M_PI / 4) < 1e-12);
    Eigen::Vector2cd q = rng.qubit();
    PureState out = run_program(p, seeded_state(n, 0, q));
    PureState target = seeded_state(n, n - 1, q);
    REQUIRE(fidelity_up_to_phase(out, target) > 1 - 1e-10);
    // reduced end-site state matches the seed exactly
    DensityMatrix r = reduced_density(out, {n - 1});
    Eigen::Vector2cd qc = q;
    REQUIRE(std::abs((qc.adjoint() * r.mat * qc)(0).real() - 1.0) < 1e-10);
  }

  // vacuum invariance
  SequenceProgram p = transport(6);
  PureState vac = init_basis(6, std::vector<int>(6, 0));
  REQUIRE(fidelity_up_to_phase(run_program(p, vac), vac) > 1 - 1e-12);

  // transport acts linearly on the seed qubit
  for (int rep = 0; rep < 20; ++rep) {
    Eigen::Vector2cd q = rng.qubit();
    PureState out = run_program(transport(6), seeded_state(6, 0, q));
    REQUIRE(fidelity_up_to_phase(out, seeded_state(6, 5, q)) > 1 - 1e-10);
  }

  REQUIRE_THROWS_AS(transport(5), std::invalid_argument);
}

TEST_CASE("swap exchanges the end states through a |0> bus") {
  oracle::Rng rng(32);
  for (int n : {4, 6, 14}) {
    Eigen::Vector2cd qa = rng.qubit(), qb = rng.qubit();
    std::vector<Eigen::Vector2cd> sites(n, Eigen::Vector2cd{1, 0});
    sites[0] = qa;
    sites[n - 1] = qb;
    PureState in = init_product(n, sites);
    std::swap(sites[0], sites[n - 1]);
    PureState target = init_product(n, sites);
    PureState out = run_program(swap_ends(n), in);
    REQUIRE(fidelity_up_to_phase(out, target) > 1 - 1e-9);
  }
  // |0>,|0> is invariant
  PureState vac = init_basis(4, {0, 0, 0, 0});
  REQUIRE(fidelity_up_to_phase(run_program(swap_ends(4), vac), vac) > 1 - 1e-12);
}

TEST_CASE("bell_pair distributes a maximal pair to the boundary") {
  for (int n : {4, 6, 8, 14}) {
    SequenceProgram p = bell_pair(n);
    REQUIRE(p.seed_site.has_value());
    REQUIRE(*p.seed_site == (n % 4 == 0 ? n / 2 : n / 2 - 1));
    REQUIRE(std::abs(p.total_time() - (4 + n / 2.0) * M_PI / 4) < 1e-12);

    PureState out = run_program(p, seeded_state(n, *p.seed_site, plus_state()));
    Vec target = Vec::Zero(Eigen::Index{1} << n);
    target[0] = 1 / std::sqrt(2.0);
    target[(Eigen::Index{1} << (n - 1)) | 1] = 1 / std::sqrt(2.0);
    REQUIRE(fidelity_up_to_phase(out, PureState(n, target)) > 1 - 1e-9);

    // pair tangle 1, all other pairs 0
    REQUIRE(tangle(out, 0, n - 1) > 1 - 1e-9);
    for (int j = 1; j + 1 < n; ++j) {
      REQUIRE(tangle(out, 0, j) < 1e-9);
      REQUIRE(tangle(out, j, n - 1) < 1e-9);
    }
  }
  REQUIRE_THROWS_AS(bell_pair(2), std::invalid_argument);
}

TEST_CASE("ghz prepares the n-spin GHZ state") {
  for (int n : {4, 6, 8, 12, 14}) {
    SequenceProgram p = ghz(n);
    REQUIRE(std::abs(p.total_time() - n * M_PI / 8) < 1e-12);
    PureState out = run_program(p, seeded_state(n, *p.seed_site, plus_state()));
    REQUIRE(fidelity_up_to_phase(out, oracle::ghz_state(n)) > 1 - 1e-9);
    REQUIRE(std::abs(measure_R(out) - 1.0) < 1e-10);
  }
}

TEST_CASE("cluster output is locally equivalent to the chain cluster state") {
  int n = 8;
  SequenceProgram p = cluster(n);
  PureState out = run_program(p, init_basis(n, std::vector<int>(n, 0)));
  PureState ref = oracle::cluster_chain_state(n);

  // Schmidt spectra across all bipartitions are a complete LU-invariant family
  double worst = 0;
  for (int bits = 0; bits + 1 < (1 << (n - 1)); ++bits) {
    std::vector<int> subset{0};
    for (int j = 1; j < n; ++j) {
      if ((bits >> (j - 1)) & 1) subset.push_back(j);
    }
    Eigen::VectorXd a = schmidt_spectrum(out, subset);
    Eigen::VectorXd b = schmidt_spectrum(ref, subset);
    worst = std::max(worst, (a - b).cwiseAbs().maxCoeff());
  }
  REQUIRE(worst < 1e-8);
  REQUIRE(std::abs(measure_R(out) - measure_R(ref)) < 1e-10);

  // n=2: entangled across the single cut
  PureState tiny = run_program(cluster(2), init_basis(2, {0, 0}));
  REQUIRE(schmidt_rank(tiny, {0}) == 2);
}

TEST_CASE("rule-engine execution matches compiled schedules (n <= 8)") {
  oracle::Rng rng(33);
  for (int n : {4, 6, 8}) {
    std::vector<SequenceProgram> progs = {transport(n), swap_ends(n), bell_pair(n), ghz(n),
                                          cluster(n)};
    for (const auto& p : progs) {
      PureState in = rng.state(n);
      PureState a = run_program(p, in);
      PureState b = run_schedule(p, in);
      REQUIRE((a.amp.dot(b.amp)).real() >= 0 - 1.0);  // sanity
      REQUIRE(fidelity_up_to_phase(a, b) > 1 - 1e-9);
    }
  }
}

TEST_CASE("transport approaches the information speed limit from below") {
  for (int n : {6, 10, 14}) {
    SequenceProgram p = transport(n);
    double speed = (n - 1) / p.total_time();
    double cmax = 4 / M_PI;
    REQUIRE(speed < cmax);
    REQUIRE(speed > cmax * (1.0 - 2.0 / n));
  }
}

TEST_CASE("sequence_by_name resolves every preset") {
  for (const char* name : {"transport", "swap", "bell", "ghz", "cluster"}) {
    REQUIRE_NOTHROW(sequence_by_name(name, 8));
  }
  REQUIRE_THROWS_AS(sequence_by_name("nope", 8), std::invalid_argument);
}
