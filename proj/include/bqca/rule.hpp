#ifndef BQCA_RULE_HPP
#define BQCA_RULE_HPP

// Three-cell block-partitioned update rules and their matrix-level
// application. Species A occupies even sites, B odd sites; one full step
// updates B then A.

#include "bqca/state.hpp"

#include <array>
#include <optional>

namespace bqca {

enum class Species { A, B };

inline int species_offset(Species s) { return s == Species::A ? 0 : 1; }
inline Species other_species(Species s) { return s == Species::A ? Species::B : Species::A; }

struct BoundaryConditions {
  enum class Kind { Periodic, Fixed };
  Kind kind = Kind::Periodic;
  int sigma_l = 0;
  int sigma_r = 0;

  static BoundaryConditions periodic() { return {}; }
  static BoundaryConditions fixed(int sl, int sr) {
    if ((sl != 0 && sl != 1) || (sr != 0 && sr != 1)) {
      throw std::invalid_argument("BoundaryConditions: sigma values must be 0 or 1");
    }
    return {Kind::Fixed, sl, sr};
  }
  bool is_periodic() const { return kind == Kind::Periodic; }
};

//! Conditional update: block(a,b) acts on the center qubit when the left
//! neighbor is |a> and the right neighbor is |b>.
struct Rule {
  Eigen::Matrix2cd u00, u01, u10, u11;

  const Eigen::Matrix2cd& block(int a, int b) const {
    switch (2 * a + b) {
      case 0: return u00;
      case 1: return u01;
      case 2: return u10;
      default: return u11;
    }
  }

  static Rule identity() {
    Eigen::Matrix2cd id = Eigen::Matrix2cd::Identity();
    return {id, id, id, id};
  }

  bool is_symmetric(double tol = 1e-12) const {
    return (u01 - u10).cwiseAbs().maxCoeff() < tol;
  }

  void validate(double tol = 1e-12) const {
    for (const auto* u : {&u00, &u01, &u10, &u11}) {
      if (!is_unitary(*u, tol)) throw std::invalid_argument("Rule: non-unitary block");
    }
  }
};

// Named rules used throughout: conditional x-rotations by pi/2 (M1) and
// pi/4 (M2), the cluster-phase rule, and the two-cell-unit shift rule that
// drives the transport/entanglement-distribution sequences.
inline Rule rule_m1() {
  Eigen::Matrix2cd u = rotation(-M_PI / 2, {1, 0, 0});
  return {Eigen::Matrix2cd::Identity(), u, u, u};
}
inline Rule rule_m2() {
  Eigen::Matrix2cd u = rotation(-M_PI / 4, {1, 0, 0});
  return {Eigen::Matrix2cd::Identity(), u, u, u};
}
inline Rule rule_cluster() {
  Eigen::Matrix2cd u = rotation(-M_PI / 4, {0, 0, 1});
  return {Eigen::Matrix2cd::Identity(), u, u, rotation(-M_PI / 2, {0, 0, 1})};
}
inline Rule rule_shift() {
  Eigen::Matrix2cd u = rotation(-M_PI / 2, {1, 0, 0});
  return {Eigen::Matrix2cd::Identity(), u, u, rotation(-M_PI, {1, 0, 0})};
}
//! Quantum analog of classical rule 108: flip the center iff both neighbors are 1.
inline Rule rule_108() {
  Eigen::Matrix2cd id = Eigen::Matrix2cd::Identity();
  return {id, id, id, pauli_x()};
}

//! 8x8 operator on (left, center, right): sum_ab |a><a| (x) u_ab (x) |b><b|.
inline Mat rule_matrix(const Rule& rule) {
  rule.validate();
  Mat m = Mat::Zero(8, 8);
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      const auto& u = rule.block(a, b);
      for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
          m(4 * a + 2 * i + b, 4 * a + 2 * j + b) = u(i, j);
        }
      }
    }
  }
  return m;
}

namespace detail {

inline void check_bqca_size(int n, const BoundaryConditions& bc) {
  if (n < 2 || n % 2 != 0) throw std::invalid_argument("BQCA update requires even n >= 2");
  if (bc.is_periodic() && n < 4) {
    throw std::invalid_argument("periodic BQCA update requires n >= 4");
  }
}

inline Eigen::Matrix2cd projector(int v) {
  Eigen::Matrix2cd p = Eigen::Matrix2cd::Zero();
  p(v, v) = 1.0;
  return p;
}

// 4x4 conditional operator on (center, right) when the left neighbor is a
// frozen classical value.
inline Mat left_virtual_op(const Rule& rule, int sigma_l) {
  Mat m = Mat::Zero(4, 4);
  for (int b = 0; b < 2; ++b) {
    const auto& u = rule.block(sigma_l, b);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) m(2 * i + b, 2 * j + b) = u(i, j);
  }
  return m;
}

// 4x4 conditional operator on (left, center) when the right neighbor is frozen.
inline Mat right_virtual_op(const Rule& rule, int sigma_r) {
  Mat m = Mat::Zero(4, 4);
  for (int a = 0; a < 2; ++a) {
    const auto& u = rule.block(a, sigma_r);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) m(2 * a + i, 2 * a + j) = u(i, j);
  }
  return m;
}

}  // namespace detail

//! Update every site of one species; neighborhood operators of one species
//! commute, so ascending site order is a convention, not a constraint.
inline void apply_species(PureState& s, const Rule& rule, Species species,
                          const BoundaryConditions& bc) {
  detail::check_bqca_size(s.n, bc);
  Mat m = rule_matrix(rule);
  for (int j = species_offset(species); j < s.n; j += 2) {
    if (bc.is_periodic()) {
      apply_local(s, m, {(j - 1 + s.n) % s.n, j, (j + 1) % s.n});
    } else if (j == 0) {
      apply_local(s, detail::left_virtual_op(rule, bc.sigma_l), {0, 1});
    } else if (j == s.n - 1) {
      apply_local(s, detail::right_virtual_op(rule, bc.sigma_r), {s.n - 2, s.n - 1});
    } else {
      apply_local(s, m, {j - 1, j, j + 1});
    }
  }
}

//! One full BQCA step: update species B, then species A.
inline void step(PureState& s, const Rule& rule, const BoundaryConditions& bc) {
  apply_species(s, rule, Species::B, bc);
  apply_species(s, rule, Species::A, bc);
}

}  // namespace bqca

#endif
