#ifndef BQCA_METRICS_HPP
#define BQCA_METRICS_HPP

// Entanglement and mixedness diagnostics: the mean-single-site-purity
// measure R, per-site |1> probability and reduced entropy, bipartite
// Schmidt spectra and ranks, pairwise tangle, and exact-period detection.

#include "bqca/rule.hpp"

#include <array>
#include <cmath>
#include <functional>
#include <optional>

namespace bqca {

//! R = 2 (1 - mean_j Tr[rho_j^2]); 0 iff product state, invariant under
//! local unitaries.
inline double measure_R(const PureState& s) {
  double acc = 0;
  for (int j = 0; j < s.n; ++j) {
    DensityMatrix rj = reduced_density(s, {j});
    acc += (rj.mat * rj.mat).trace().real();
  }
  return 2.0 * (1.0 - acc / s.n);
}

inline double purity(const DensityMatrix& r) { return (r.mat * r.mat).trace().real(); }

//! 1 - Tr[rho^2].
inline double mixedness(const DensityMatrix& r) { return 1.0 - purity(r); }

namespace detail {

inline double entropy_bits(const DensityMatrix& r) {
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (r.mat + r.mat.adjoint()));
  double s = 0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    double lam = es.eigenvalues()[i];
    if (lam > 1e-12) s -= lam * std::log2(lam);
  }
  return s;
}

inline std::pair<double, double> site_profile(const DensityMatrix& rj) {
  return {rj.mat(1, 1).real(), entropy_bits(rj)};
}

}  // namespace detail

struct SiteProfiles {
  Eigen::VectorXd p1;       // P_1(rho_j) = <1|rho_j|1>
  Eigen::VectorXd entropy;  // von Neumann entropy in bits
};

inline SiteProfiles site_profiles(const PureState& s) {
  SiteProfiles out{Eigen::VectorXd(s.n), Eigen::VectorXd(s.n)};
  for (int j = 0; j < s.n; ++j) {
    auto [p, e] = detail::site_profile(reduced_density(s, {j}));
    out.p1[j] = p;
    out.entropy[j] = e;
  }
  return out;
}

inline SiteProfiles site_profiles(const DensityMatrix& r) {
  SiteProfiles out{Eigen::VectorXd(r.n), Eigen::VectorXd(r.n)};
  for (int j = 0; j < r.n; ++j) {
    auto [p, e] = detail::site_profile(reduced_density(r, {j}));
    out.p1[j] = p;
    out.entropy[j] = e;
  }
  return out;
}

namespace detail {

inline Mat bipartition_matrix(const PureState& s, std::vector<int>& subset) {
  std::sort(subset.begin(), subset.end());
  int k = static_cast<int>(subset.size());
  if (k == 0 || k == s.n) throw std::invalid_argument("schmidt_spectrum: trivial bipartition");
  check_sites(s.n, subset, Eigen::Index{1} << k);
  std::vector<int> rest;
  for (int j = 0; j < s.n; ++j) {
    if (!std::binary_search(subset.begin(), subset.end(), j)) rest.push_back(j);
  }
  Eigen::Index rows = Eigen::Index{1} << k;
  Eigen::Index cols = Eigen::Index{1} << (s.n - k);
  Mat a(rows, cols);
  for (Eigen::Index idx = 0; idx < (Eigen::Index{1} << s.n); ++idx) {
    Eigen::Index r = 0, c = 0;
    for (int t = 0; t < k; ++t) {
      r |= ((idx >> (s.n - 1 - subset[t])) & 1) << (k - 1 - t);
    }
    for (size_t t = 0; t < rest.size(); ++t) {
      c |= ((idx >> (s.n - 1 - rest[t])) & 1) << (rest.size() - 1 - t);
    }
    a(r, c) = s.amp[idx];
  }
  return a;
}

}  // namespace detail

//! Singular values of the amplitude matrix reshaped by the bipartition
//! (subset vs complement), descending; their squares sum to 1.
inline Eigen::VectorXd schmidt_spectrum(const PureState& s, std::vector<int> subset) {
  Mat a = detail::bipartition_matrix(s, subset);
  Eigen::JacobiSVD<Mat> svd(a);
  return svd.singularValues();
}

//! Count of squared Schmidt coefficients above the threshold.  Works from
//! the smaller-side Gram matrix, whose eigenvalues are the squares directly.
inline int schmidt_rank(const PureState& s, std::vector<int> subset,
                        double zero_threshold = 1e-10) {
  Mat a = detail::bipartition_matrix(s, subset);
  Mat gram = (a.rows() <= a.cols()) ? Mat(a * a.adjoint()) : Mat(a.adjoint() * a);
  Eigen::SelfAdjointEigenSolver<Mat> es(gram);
  int rank = 0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    if (es.eigenvalues()[i] > zero_threshold) ++rank;
  }
  return rank;
}

namespace detail {

inline Mat sigma_y_pair() {
  Mat yy = Eigen::Matrix4cd::Zero();
  Eigen::Matrix2cd y = pauli_y();
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) yy(2 * i + k, 2 * j + l) = y(i, j) * y(k, l);
  return yy;
}

// The lambda_k (square roots of the eigenvalues of rho rho~, descending)
// equal the singular values of K = sqrt(rho) (sy x sy) conj(sqrt(rho)):
// K K^dag = sqrt(rho) (sy x sy) rho* (sy x sy) sqrt(rho), which is similar
// to rho rho~.  The SVD route avoids taking square roots of eigenvalues
// that are zero up to roundoff.
inline double tangle_of_pair_state(const Mat& rho2) {
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (rho2 + rho2.adjoint()));
  Mat sqrt_rho = Mat::Zero(4, 4);
  for (int i = 0; i < 4; ++i) {
    double lam = std::max(0.0, es.eigenvalues()[i]);
    sqrt_rho += std::sqrt(lam) * es.eigenvectors().col(i) * es.eigenvectors().col(i).adjoint();
  }
  Mat k = sqrt_rho * sigma_y_pair() * sqrt_rho.conjugate();
  Eigen::JacobiSVD<Mat> svd(k);
  const auto& lam = svd.singularValues();
  double d = lam[0] - lam[1] - lam[2] - lam[3];
  d = std::max(d, 0.0);  // clamp before squaring
  return d * d;
}

}  // namespace detail

//! Squared concurrence of the reduced pair (i, j) via the spin-flipped
//! rho rho~ spectrum.
inline double tangle(const PureState& s, int i, int j) {
  if (i == j) throw std::invalid_argument("tangle: sites must differ");
  return detail::tangle_of_pair_state(reduced_density(s, {i, j}).mat);
}

inline double tangle(const DensityMatrix& r, int i, int j) {
  if (i == j) throw std::invalid_argument("tangle: sites must differ");
  return detail::tangle_of_pair_state(reduced_density(r, {i, j}).mat);
}

inline double average_pair_tangle(const PureState& s) {
  double acc = 0;
  int cnt = 0;
  for (int i = 0; i < s.n; ++i) {
    for (int j = i + 1; j < s.n; ++j, ++cnt) acc += tangle(s, i, j);
  }
  return acc / cnt;
}

inline double average_pair_tangle(const DensityMatrix& r) {
  double acc = 0;
  int cnt = 0;
  for (int i = 0; i < r.n; ++i) {
    for (int j = i + 1; j < r.n; ++j, ++cnt) acc += tangle(r, i, j);
  }
  return acc / cnt;
}

//! Smallest t >= 1 with fidelity_up_to_phase(psi(0), psi(t)) > 1 - tol,
//! or nullopt if none is found within max_steps.
inline std::optional<int> detect_period(const Rule& rule, const PureState& initial,
                                        const BoundaryConditions& bc, int max_steps = 200,
                                        double tol = 1e-8) {
  PureState s = initial;
  for (int t = 1; t <= max_steps; ++t) {
    step(s, rule, bc);
    if (fidelity_up_to_phase(initial, s) > 1.0 - tol) return t;
  }
  return std::nullopt;
}

//! Per-step history of site profiles; row 0 is the initial state.
struct SpaceTimeDiagram {
  int n = 0;
  Eigen::MatrixXd p1;       // (steps+1) x n
  Eigen::MatrixXd entropy;  // (steps+1) x n
};

}  // namespace bqca

#endif
