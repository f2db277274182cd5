#ifndef BQCA_STATE_HPP
#define BQCA_STATE_HPP

// Dense n-qubit pure states and density matrices on a 1D chain.
// Site 0 is the leftmost qubit and the most significant bit of the basis
// index: b = sum_j s_j * 2^(n-1-j).

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace bqca {

using cx = std::complex<double>;
using Vec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXcd;

inline const Eigen::Matrix2cd& pauli_x() {
  static const Eigen::Matrix2cd m = (Eigen::Matrix2cd() << 0, 1, 1, 0).finished();
  return m;
}
inline const Eigen::Matrix2cd& pauli_y() {
  static const Eigen::Matrix2cd m =
      (Eigen::Matrix2cd() << 0, cx(0, -1), cx(0, 1), 0).finished();
  return m;
}
inline const Eigen::Matrix2cd& pauli_z() {
  static const Eigen::Matrix2cd m = (Eigen::Matrix2cd() << 1, 0, 0, -1).finished();
  return m;
}

//! e^{i angle sigma.axis} (axis need not be normalized).
inline Eigen::Matrix2cd rotation(double angle, Eigen::Vector3d axis) {
  double nrm = axis.norm();
  if (nrm < 1e-14) throw std::invalid_argument("rotation: zero axis");
  axis /= nrm;
  Eigen::Matrix2cd sn = axis.x() * pauli_x() + axis.y() * pauli_y() + axis.z() * pauli_z();
  return std::cos(angle) * Eigen::Matrix2cd::Identity() + cx(0, 1) * std::sin(angle) * sn;
}

struct PureState {
  int n = 0;
  Vec amp;

  PureState() = default;
  PureState(int n_, Vec amp_) : n(n_), amp(std::move(amp_)) {
    if (amp.size() != (Eigen::Index{1} << n)) {
      throw std::invalid_argument("PureState: amplitude vector has wrong length");
    }
  }

  double norm() const { return amp.norm(); }
};

struct DensityMatrix {
  int n = 0;
  Mat mat;

  DensityMatrix() = default;
  DensityMatrix(int n_, Mat mat_) : n(n_), mat(std::move(mat_)) {
    Eigen::Index d = Eigen::Index{1} << n;
    if (mat.rows() != d || mat.cols() != d) {
      throw std::invalid_argument("DensityMatrix: matrix has wrong dimension");
    }
  }

  static DensityMatrix from_pure(const PureState& s) {
    return DensityMatrix(s.n, s.amp * s.amp.adjoint());
  }

  double trace_real() const { return mat.trace().real(); }
  double hermiticity_error() const { return (mat - mat.adjoint()).cwiseAbs().maxCoeff(); }
  //! Smallest eigenvalue; O(8^n), intended for tests.
  double min_eigenvalue() const {
    Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (mat + mat.adjoint()));
    return es.eigenvalues().minCoeff();
  }
};

inline bool is_unitary(const Mat& u, double tol = 1e-12) {
  return (u.adjoint() * u - Mat::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff() < tol;
}

//! Basis state |bits>, bits[0] = site 0.
inline PureState init_basis(int n, const std::vector<int>& bits) {
  if (static_cast<int>(bits.size()) != n) {
    throw std::invalid_argument("init_basis: expected " + std::to_string(n) + " bits");
  }
  Eigen::Index idx = 0;
  for (int b : bits) {
    if (b != 0 && b != 1) throw std::invalid_argument("init_basis: bits must be 0 or 1");
    idx = (idx << 1) | b;
  }
  Vec amp = Vec::Zero(Eigen::Index{1} << n);
  amp[idx] = 1.0;
  return PureState(n, std::move(amp));
}

//! Tensor product of per-site qubit states, site order.
inline PureState init_product(int n, const std::vector<Eigen::Vector2cd>& site_states) {
  if (static_cast<int>(site_states.size()) != n) {
    throw std::invalid_argument("init_product: expected one state per site");
  }
  for (const auto& v : site_states) {
    if (std::abs(v.norm() - 1.0) > 1e-10) {
      throw std::invalid_argument("init_product: site state not normalized");
    }
  }
  Vec amp = Vec::Ones(1);
  for (const auto& v : site_states) {
    Vec next(amp.size() * 2);
    for (Eigen::Index i = 0; i < amp.size(); ++i) {
      next[2 * i] = amp[i] * v[0];
      next[2 * i + 1] = amp[i] * v[1];
    }
    amp.swap(next);
  }
  return PureState(n, std::move(amp));
}

namespace detail {

inline void check_sites(int n, const std::vector<int>& sites, Eigen::Index op_dim) {
  if (op_dim != (Eigen::Index{1} << sites.size())) {
    throw std::invalid_argument("apply_local: operator dimension does not match site count");
  }
  for (size_t i = 0; i < sites.size(); ++i) {
    if (sites[i] < 0 || sites[i] >= n) throw std::out_of_range("apply_local: site out of range");
    for (size_t j = i + 1; j < sites.size(); ++j) {
      if (sites[i] == sites[j]) throw std::invalid_argument("apply_local: duplicate site");
    }
  }
}

// Offsets of the 2^k sub-block patterns: pattern bit (k-1-t) is the value of
// sites[t], so sites[0] is the most significant operator index bit.
inline void pattern_offsets(int n, const std::vector<int>& sites, std::vector<Eigen::Index>& off) {
  int k = static_cast<int>(sites.size());
  off.assign(size_t{1} << k, 0);
  for (Eigen::Index p = 0; p < (Eigen::Index{1} << k); ++p) {
    Eigen::Index full = 0;
    for (int t = 0; t < k; ++t) {
      if ((p >> (k - 1 - t)) & 1) full |= Eigen::Index{1} << (n - 1 - sites[t]);
    }
    off[p] = full;
  }
}

// Enumerate base indices with all site bits clear: expand r in [0, 2^(n-k))
// by inserting zero bits at the site positions (ascending).
struct BaseIndexer {
  std::vector<int> positions;  // bit positions, ascending
  explicit BaseIndexer(int n, const std::vector<int>& sites) {
    positions.reserve(sites.size());
    for (int s : sites) positions.push_back(n - 1 - s);
    std::sort(positions.begin(), positions.end());
  }
  Eigen::Index operator()(Eigen::Index r) const {
    Eigen::Index x = r;
    for (int p : positions) {
      x = ((x >> p) << (p + 1)) | (x & ((Eigen::Index{1} << p) - 1));
    }
    return x;
  }
};

// In-place kernel: apply op to a strided vector view (stride 1 over the raw buffer
// of a state vector, or a matrix column).
template <typename Getter, typename Setter>
void apply_gate_kernel(int n, const Mat& op, const std::vector<int>& sites, Getter get,
                       Setter set) {
  int k = static_cast<int>(sites.size());
  Eigen::Index dim = Eigen::Index{1} << k;
  std::vector<Eigen::Index> off;
  pattern_offsets(n, sites, off);
  BaseIndexer base(n, sites);
  Eigen::Index nrest = Eigen::Index{1} << (n - k);
  Vec in(dim), out(dim);
  for (Eigen::Index r = 0; r < nrest; ++r) {
    Eigen::Index b = base(r);
    for (Eigen::Index p = 0; p < dim; ++p) in[p] = get(b + off[p]);
    out.noalias() = op * in;
    for (Eigen::Index p = 0; p < dim; ++p) set(b + off[p], out[p]);
  }
}

}  // namespace detail

//! Apply a 2^k x 2^k operator to the given (ordered, distinct) sites.
inline void apply_local(PureState& s, const Mat& op, const std::vector<int>& sites) {
  detail::check_sites(s.n, sites, op.rows());
  auto* a = s.amp.data();
  detail::apply_gate_kernel(
      s.n, op, sites, [a](Eigen::Index i) { return a[i]; },
      [a](Eigen::Index i, cx v) { a[i] = v; });
}

//! rho -> op rho op^dagger on the given sites.
inline void apply_local(DensityMatrix& r, const Mat& op, const std::vector<int>& sites) {
  detail::check_sites(r.n, sites, op.rows());
  Eigen::Index d = Eigen::Index{1} << r.n;
  for (Eigen::Index c = 0; c < d; ++c) {
    auto col = r.mat.col(c);
    detail::apply_gate_kernel(
        r.n, op, sites, [&col](Eigen::Index i) { return col[i]; },
        [&col](Eigen::Index i, cx v) { col[i] = v; });
  }
  Mat opc = op.conjugate();
  for (Eigen::Index row = 0; row < d; ++row) {
    auto rw = r.mat.row(row);
    detail::apply_gate_kernel(
        r.n, opc, sites, [&rw](Eigen::Index i) { return rw[i]; },
        [&rw](Eigen::Index i, cx v) { rw[i] = v; });
  }
}

//! Partial trace keeping `keep` (ordered: keep[0] is the most significant
//! bit of the reduced basis index).
inline DensityMatrix reduced_density(const PureState& s, const std::vector<int>& keep) {
  if (keep.empty()) throw std::invalid_argument("reduced_density: empty keep set");
  detail::check_sites(s.n, keep, Eigen::Index{1} << keep.size());
  int k = static_cast<int>(keep.size());
  Eigen::Index dim = Eigen::Index{1} << k;
  std::vector<Eigen::Index> off;
  detail::pattern_offsets(s.n, keep, off);
  detail::BaseIndexer base(s.n, keep);
  Mat rho = Mat::Zero(dim, dim);
  Vec v(dim);
  Eigen::Index nrest = Eigen::Index{1} << (s.n - k);
  for (Eigen::Index r = 0; r < nrest; ++r) {
    Eigen::Index b = base(r);
    for (Eigen::Index p = 0; p < dim; ++p) v[p] = s.amp[b + off[p]];
    rho.noalias() += v * v.adjoint();
  }
  return DensityMatrix(k, std::move(rho));
}

inline DensityMatrix reduced_density(const DensityMatrix& rho, const std::vector<int>& keep) {
  if (keep.empty()) throw std::invalid_argument("reduced_density: empty keep set");
  detail::check_sites(rho.n, keep, Eigen::Index{1} << keep.size());
  int k = static_cast<int>(keep.size());
  Eigen::Index dim = Eigen::Index{1} << k;
  std::vector<Eigen::Index> off;
  detail::pattern_offsets(rho.n, keep, off);
  detail::BaseIndexer base(rho.n, keep);
  Mat out = Mat::Zero(dim, dim);
  Eigen::Index nrest = Eigen::Index{1} << (rho.n - k);
  for (Eigen::Index r = 0; r < nrest; ++r) {
    Eigen::Index b = base(r);
    for (Eigen::Index p = 0; p < dim; ++p) {
      for (Eigen::Index q = 0; q < dim; ++q) {
        out(p, q) += rho.mat(b + off[p], b + off[q]);
      }
    }
  }
  return DensityMatrix(k, std::move(out));
}

//! |<a|b>|, insensitive to global phase.
inline double fidelity_up_to_phase(const PureState& a, const PureState& b) {
  if (a.n != b.n) throw std::invalid_argument("fidelity_up_to_phase: dimension mismatch");
  return std::abs(a.amp.dot(b.amp));
}

}  // namespace bqca

#endif
