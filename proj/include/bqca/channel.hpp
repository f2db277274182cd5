#ifndef BQCA_CHANNEL_HPP
#define BQCA_CHANNEL_HPP

// Non-unitary block-partitioned updates: completely positive
// trace-preserving maps whose Krauss effects are conditioned on the
// neighborhood basis state,
//   F_mu = sum_ab |ab><ab| (x) f_mu^{ab},
// optionally preceded by a unitary rule.  Includes the rule-110 channel
// and the one-parameter unitary/non-unitary mixture.

#include "bqca/rule.hpp"

#include <array>
#include <optional>

namespace bqca {

struct NeighborhoodChannel {
  //! effects[2a+b] holds the aligned effect list for neighborhood |ab>;
  //! lists shorter than the longest are implicitly zero-padded.
  std::array<std::vector<Eigen::Matrix2cd>, 4> effects;
  std::optional<Rule> pre_unitary;

  int effect_count() const {
    size_t k = 0;
    for (const auto& v : effects) k = std::max(k, v.size());
    return static_cast<int>(k);
  }

  Eigen::Matrix2cd effect(int ab, int mu) const {
    if (mu < static_cast<int>(effects[ab].size())) return effects[ab][mu];
    return Eigen::Matrix2cd::Zero();
  }

  //! Per-neighborhood trace preservation (sum f^dag f = 1), hence CPTP of
  //! the aligned full-channel effects.
  void validate(double tol = 1e-10) const {
    if (pre_unitary) pre_unitary->validate(1e-10);
    for (int ab = 0; ab < 4; ++ab) {
      if (effects[ab].empty()) {
        throw std::invalid_argument("NeighborhoodChannel: empty effect list");
      }
      Eigen::Matrix2cd acc = Eigen::Matrix2cd::Zero();
      for (const auto& f : effects[ab]) acc += f.adjoint() * f;
      if ((acc - Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff() > tol) {
        throw std::invalid_argument("NeighborhoodChannel: effects not trace preserving");
      }
    }
  }

  //! 8x8 full effect on (left, center, right) including the pre-unitary.
  Mat full_effect(int mu) const {
    Mat f = Mat::Zero(8, 8);
    for (int a = 0; a < 2; ++a) {
      for (int b = 0; b < 2; ++b) {
        Eigen::Matrix2cd e = effect(2 * a + b, mu);
        for (int i = 0; i < 2; ++i)
          for (int j = 0; j < 2; ++j) f(4 * a + 2 * i + b, 4 * a + 2 * j + b) = e(i, j);
      }
    }
    if (pre_unitary) f = f * rule_matrix(*pre_unitary);
    return f;
  }

  //! Choi matrix of the 3-site map (64x64), the action-based identity of
  //! the channel.
  Mat choi() const {
    Mat c = Mat::Zero(64, 64);
    for (int mu = 0; mu < effect_count(); ++mu) {
      Mat f = full_effect(mu);
      Eigen::Map<const Vec> v(f.data(), 64);
      c.noalias() += v * v.adjoint();
    }
    return c;
  }
};

inline bool channels_equal(const NeighborhoodChannel& a, const NeighborhoodChannel& b,
                           double tol = 1e-12) {
  return (a.choi() - b.choi()).cwiseAbs().maxCoeff() < tol;
}

//! Lift a unitary rule to a single-effect channel.
inline NeighborhoodChannel unitary_channel(const Rule& rule) {
  NeighborhoodChannel ch;
  for (int ab = 0; ab < 4; ++ab) ch.effects[ab] = {rule.block(ab >> 1, ab & 1)};
  ch.validate();
  return ch;
}

//! One-parameter mixture of the rule-108 analog (p=0) and rule 110 (p=1):
//! pre-unitary M(1,1,1,sigma_x); on the |01> neighborhood the effects are
//! |1><1| + sqrt(1-p)|0><0| and sqrt(p)|1><0|.
inline NeighborhoodChannel mixed_rule(double p) {
  if (p < 0 || p > 1) throw std::invalid_argument("mixed_rule: p must lie in [0,1]");
  NeighborhoodChannel ch;
  ch.pre_unitary = rule_108();
  Eigen::Matrix2cd id = Eigen::Matrix2cd::Identity();
  Eigen::Matrix2cd f1 = Eigen::Matrix2cd::Zero();
  f1(1, 1) = 1.0;
  f1(0, 0) = std::sqrt(1.0 - p);
  Eigen::Matrix2cd f2 = Eigen::Matrix2cd::Zero();
  f2(1, 0) = std::sqrt(p);
  ch.effects[0] = {id};
  ch.effects[1] = {f1, f2};
  ch.effects[2] = {id};
  ch.effects[3] = {id};
  ch.validate();
  return ch;
}

//! The block-partitioned quantum rule 110: amplitude damping toward |1>
//! on the |01> neighborhood after the rule-108 pre-unitary.
inline NeighborhoodChannel rule110_channel() { return mixed_rule(1.0); }

//! Purely unitary analog of classical rule 108.
inline NeighborhoodChannel rule108_channel() { return mixed_rule(0.0); }

namespace detail {

// 4x4 effects for end sites under fixed boundaries, pre-unitary folded in.
inline Mat end_effect(const NeighborhoodChannel& ch, int mu, bool left_end, int sigma) {
  Mat f = Mat::Zero(4, 4);
  if (left_end) {
    // (center, right); left neighbor frozen at sigma
    for (int b = 0; b < 2; ++b) {
      Eigen::Matrix2cd e = ch.effect(2 * sigma + b, mu);
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) f(2 * i + b, 2 * j + b) = e(i, j);
    }
    if (ch.pre_unitary) f = f * left_virtual_op(*ch.pre_unitary, sigma);
  } else {
    // (left, center); right neighbor frozen at sigma
    for (int a = 0; a < 2; ++a) {
      Eigen::Matrix2cd e = ch.effect(2 * a + sigma, mu);
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) f(2 * a + i, 2 * a + j) = e(i, j);
    }
    if (ch.pre_unitary) f = f * right_virtual_op(*ch.pre_unitary, sigma);
  }
  return f;
}

}  // namespace detail

//! rho -> sum_mu F_mu(j) rho F_mu(j)^dag with neighborhood-conditioned
//! effects on center j; virtual classical neighbors at fixed ends.
inline void apply_channel_site(DensityMatrix& rho, const NeighborhoodChannel& ch, int j,
                               const BoundaryConditions& bc) {
  if (rho.n < (bc.is_periodic() ? 3 : 2)) {
    throw std::invalid_argument("apply_channel_site: chain too short for a neighborhood");
  }
  if (j < 0 || j >= rho.n) throw std::out_of_range("apply_channel_site: site out of range");
  int k = ch.effect_count();
  std::vector<int> sites;
  std::vector<Mat> fs;
  if (bc.is_periodic()) {
    sites = {(j - 1 + rho.n) % rho.n, j, (j + 1) % rho.n};
    for (int mu = 0; mu < k; ++mu) fs.push_back(ch.full_effect(mu));
  } else if (j == 0) {
    sites = {0, 1};
    for (int mu = 0; mu < k; ++mu) fs.push_back(detail::end_effect(ch, mu, true, bc.sigma_l));
  } else if (j == rho.n - 1) {
    sites = {rho.n - 2, rho.n - 1};
    for (int mu = 0; mu < k; ++mu) fs.push_back(detail::end_effect(ch, mu, false, bc.sigma_r));
  } else {
    sites = {j - 1, j, j + 1};
    for (int mu = 0; mu < k; ++mu) fs.push_back(ch.full_effect(mu));
  }
  Mat acc = Mat::Zero(rho.mat.rows(), rho.mat.cols());
  for (const Mat& f : fs) {
    DensityMatrix tmp = rho;
    apply_local(tmp, f, sites);
    acc += tmp.mat;
  }
  rho.mat.swap(acc);
}

//! One full non-unitary step: update all odd (B) sites, then all even (A).
inline void channel_step(DensityMatrix& rho, const NeighborhoodChannel& ch,
                         const BoundaryConditions& bc) {
  detail::check_bqca_size(rho.n, bc);
  for (int j = 1; j < rho.n; j += 2) apply_channel_site(rho, ch, j, bc);
  for (int j = 0; j < rho.n; j += 2) apply_channel_site(rho, ch, j, bc);
}

}  // namespace bqca

#endif
