#ifndef BQCA_PULSE_HPP
#define BQCA_PULSE_HPP

// Lowers rules to physical pulse schedules: global Ising dwells
// U(t) = e^{-i t sum_j g_j sigma_z^j sigma_z^{j+1}} punctuated by
// species-parallel rotations, plus explicit end rotations. Under fixed
// boundaries an Ising dwell is followed by the end correction
// e^{-i (-1)^Sigma g t sigma_z} on the end site of the species being
// updated; the simulator derives it from the element's species tag.

#include "bqca/rule.hpp"

#include <cmath>
#include <optional>
#include <variant>
#include <vector>

namespace bqca {

//! Smallest x + k*pi/g >= 0 with integer k >= 0.
inline double bracket_time(double x, double g) {
  if (g <= 0) throw std::invalid_argument("bracket_time: coupling must be positive");
  while (x < 0) x += M_PI / g;
  return x;
}

//! u = e^{i gamma sigma.n}, n = (sin t cos p, sin t sin p, cos t).
struct RotationSpec {
  double gamma = 0;
  double theta = 0;
  double phi = 0;

  Eigen::Vector3d axis() const {
    return {std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta)};
  }
  //! Half-polar Bloch vector; conjugating sigma_z by e^{-i pi/2 sigma.m} yields sigma.n.
  Eigen::Vector3d half_axis() const {
    return {std::sin(theta / 2) * std::cos(phi), std::sin(theta / 2) * std::sin(phi),
            std::cos(theta / 2)};
  }
  Eigen::Matrix2cd unitary() const { return rotation(gamma, axis()); }

  static RotationSpec from_unitary(const Eigen::Matrix2cd& u);
};

//! Angle-axis form of an SU(2) element, u = e^{i gamma sigma.n} with
//! gamma in [0, pi].  atan2-based so it stays accurate near gamma = 0, pi.
inline std::pair<double, Eigen::Vector3d> su2_angle_axis(const Eigen::Matrix2cd& u) {
  double c = 0.5 * u.trace().real();
  Eigen::Vector3d v{0.5 * (pauli_x() * u).trace().imag(), 0.5 * (pauli_y() * u).trace().imag(),
                    0.5 * (pauli_z() * u).trace().imag()};
  double s = v.norm();
  double gamma = std::atan2(s, c);
  if (s < 1e-14) return {gamma, Eigen::Vector3d{0, 0, 1}};
  return {gamma, v / s};
}

inline RotationSpec RotationSpec::from_unitary(const Eigen::Matrix2cd& u) {
  if (!is_unitary(u)) throw std::invalid_argument("RotationSpec: input not unitary");
  if (std::abs(u.determinant() - cx(1, 0)) > 1e-9) {
    throw std::invalid_argument("RotationSpec: input not in SU(2)");
  }
  auto [gamma, ax] = su2_angle_axis(u);
  double theta = std::atan2(std::hypot(ax.x(), ax.y()), ax.z());
  double phi = std::atan2(ax.y(), ax.x());
  return {gamma, theta, phi};
}

//! Principal square root; rotation angle of the result lies in (-pi/2, pi/2].
inline Eigen::Matrix2cd su2_sqrt(const Eigen::Matrix2cd& u) {
  auto [gamma, ax] = su2_angle_axis(u);
  return rotation(gamma / 2, ax);
}

// ---------------------------------------------------------------------------
// Schedule elements
// ---------------------------------------------------------------------------

struct IsingPulse {
  double dwell = 0;     // units 1/g
  Species updates = Species::A;
};

//! Ising dwell with distinct couplings on even-start bonds (2j, 2j+1) and
//! odd-start bonds (2j+1, 2j+2).
struct AsymIsingPulse {
  double dwell = 0;
  double g_even = 0;
  double g_odd = 0;
  Species updates = Species::A;
};

//! e^{i angle sigma.axis} on every site of one species.
struct SpeciesRotation {
  Species species = Species::A;
  Eigen::Vector3d axis{0, 0, 1};
  double angle = 0;
};

enum class ChainEnd { Left, Right };

//! e^{i angle sigma_z} on site 0 (Left) or n-1 (Right).
struct EndRotation {
  ChainEnd end = ChainEnd::Left;
  double angle = 0;
};

using PulseElement = std::variant<IsingPulse, AsymIsingPulse, SpeciesRotation, EndRotation>;

struct PulseSchedule {
  std::vector<PulseElement> elements;
  double g = 1.0;

  //! Accumulated Ising dwell time; single-qubit rotations count as t_s = 0.
  double total_time() const {
    double t = 0;
    for (const auto& el : elements) {
      if (const auto* p = std::get_if<IsingPulse>(&el)) t += p->dwell;
      if (const auto* p = std::get_if<AsymIsingPulse>(&el)) t += p->dwell;
    }
    return t;
  }

  void append(const PulseSchedule& other) {
    if (std::abs(g - other.g) > 1e-15) {
      throw std::invalid_argument("PulseSchedule::append: coupling mismatch");
    }
    elements.insert(elements.end(), other.elements.begin(), other.elements.end());
  }
};

namespace detail {

inline void emit_rotation(PulseSchedule& sch, Species species, const Eigen::Matrix2cd& u) {
  auto [gamma, ax] = su2_angle_axis(u);
  if (gamma < 1e-14) return;
  sch.elements.push_back(SpeciesRotation{species, ax, gamma});
}

//! Frame unitary V with V sigma_z V^dag = sigma.w.
inline Eigen::Matrix2cd zframe(const Eigen::Vector3d& w) {
  Eigen::Vector3d z{0, 0, 1};
  Eigen::Vector3d v = z.cross(w);
  double s = v.norm();
  double c = z.dot(w);
  if (s < 1e-14) {
    if (c > 0) return Eigen::Matrix2cd::Identity();
    return rotation(-M_PI / 2, {1, 0, 0});  // maps z to -z
  }
  return rotation(-std::atan2(s, c) / 2, v / s);
}

inline Eigen::Vector3d rodrigues(const Eigen::Vector3d& v, const Eigen::Vector3d& axis,
                                 double ang) {
  return v * std::cos(ang) + axis.cross(v) * std::sin(ang) +
         axis * axis.dot(v) * (1 - std::cos(ang));
}

inline Eigen::Vector3d unit_orthogonal_to(const Eigen::Vector3d& n) {
  Eigen::Vector3d w = Eigen::Vector3d{0, 0, 1}.cross(n);
  if (w.norm() < 1e-6) return {1, 0, 0};
  return w.normalized();
}

constexpr double kIdentityTol = 1e-12;

inline bool is_identity(const Eigen::Matrix2cd& u, double tol = kIdentityTol) {
  return (u - Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff() < tol;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Compilers.  Each returns a schedule whose net chain unitary equals the
// corresponding apply_species update, up to one global phase, under both
// periodic and fixed boundary conditions.
// ---------------------------------------------------------------------------

//! M(1, u, u, u^2): one Ising dwell [gamma/2g] inside the half-axis sandwich.
inline PulseSchedule compile_sum_rule(const RotationSpec& u, Species species, double g = 1.0) {
  PulseSchedule sch{{}, g};
  Eigen::Vector3d m = u.half_axis();
  sch.elements.push_back(SpeciesRotation{species, m, M_PI / 2});
  if (std::abs(u.gamma) > 1e-15) {
    sch.elements.push_back(SpeciesRotation{species, {0, 0, 1}, u.gamma});
  }
  sch.elements.push_back(IsingPulse{bracket_time(u.gamma / (2 * g), g), species});
  sch.elements.push_back(SpeciesRotation{species, m, -M_PI / 2});
  return sch;
}

//! M(u^2, u, u, 1): the sum rule with the dwell argument negated.  The
//! zero-conditioned variant; equivalent to conjugating the sum rule by
//! sigma_x on the neighbor species, but exact under fixed boundaries too.
inline PulseSchedule compile_sum_rule_flipped(const RotationSpec& u, Species species,
                                              double g = 1.0) {
  PulseSchedule sch{{}, g};
  Eigen::Vector3d m = u.half_axis();
  sch.elements.push_back(SpeciesRotation{species, m, M_PI / 2});
  if (std::abs(u.gamma) > 1e-15) {
    sch.elements.push_back(SpeciesRotation{species, {0, 0, 1}, u.gamma});
  }
  sch.elements.push_back(IsingPulse{bracket_time(-u.gamma / (2 * g), g), species});
  sch.elements.push_back(SpeciesRotation{species, m, -M_PI / 2});
  return sch;
}

//! M(1, u, u, 1): four Ising dwells [gamma/4g], [-3pi/4g], [-pi/4g],
//! [gamma/4g].  The interleaved rotations realize conjugation frames
//! w1 = w2 = w (unit, orthogonal to n), w3 = R_n(gamma) w, w4 = -R_n(2 gamma) w,
//! which solve the neighborhood block conditions exactly.
inline PulseSchedule compile_pair_rule(const RotationSpec& u, Species species, double g = 1.0) {
  using detail::zframe;
  Eigen::Vector3d n = u.axis();
  Eigen::Vector3d w = detail::unit_orthogonal_to(n);
  Eigen::Vector3d w1 = w, w2 = w;
  Eigen::Vector3d w3 = detail::rodrigues(w, n, u.gamma);
  Eigen::Vector3d w4 = -detail::rodrigues(w1, n, 2 * u.gamma);
  Eigen::Matrix2cd b1 = zframe(w1), b2 = zframe(w2), b3 = zframe(w3), b4 = zframe(w4);
  Eigen::Matrix2cd p = u.unitary();

  PulseSchedule sch{{}, g};
  detail::emit_rotation(sch, species, b1.adjoint() * p);
  sch.elements.push_back(IsingPulse{bracket_time(u.gamma / (4 * g), g), species});
  detail::emit_rotation(sch, species, b2.adjoint() * b1);
  sch.elements.push_back(IsingPulse{bracket_time(-3 * M_PI / (4 * g), g), species});
  detail::emit_rotation(sch, species, b3.adjoint() * b2);
  sch.elements.push_back(IsingPulse{bracket_time(-M_PI / (4 * g), g), species});
  detail::emit_rotation(sch, species, b4.adjoint() * b3);
  sch.elements.push_back(IsingPulse{bracket_time(u.gamma / (4 * g), g), species});
  detail::emit_rotation(sch, species, b4);
  return sch;
}

//! M(1, u, u, u): three Ising dwells totalling (pi + gamma/2)/(2g).
//! Commutator construction: with X = e^{i pi/2 sigma.m} (m orthogonal to n)
//! and Z = e^{i gamma/2 sigma.n}, the words ZYX = 1 and XYZ = u hold for
//! Y = Z^-1 X^-1, which is exactly the block condition for this rule.
inline PulseSchedule compile_uniform_rule(const RotationSpec& u, Species species, double g = 1.0) {
  using detail::zframe;
  Eigen::Vector3d n = u.axis();
  Eigen::Vector3d m = detail::unit_orthogonal_to(n);
  Eigen::Matrix2cd X = rotation(M_PI / 2, m);
  Eigen::Matrix2cd Z = rotation(u.gamma / 2, n);
  Eigen::Matrix2cd Y = Z.adjoint() * X.adjoint();
  auto [a2, w2] = su2_angle_axis(Y);

  Eigen::Vector3d w1 = m;
  double a1 = M_PI / 2;
  Eigen::Vector3d w3 = n;
  double a3 = u.gamma / 2;
  if (a3 < 0) {
    a3 = -a3;
    w3 = -w3;
  }
  Eigen::Matrix2cd b1 = zframe(w1), b2 = zframe(w2), b3 = zframe(w3);
  Eigen::Matrix2cd p = u.unitary();

  PulseSchedule sch{{}, g};
  detail::emit_rotation(sch, species, b1.adjoint() * p);
  sch.elements.push_back(IsingPulse{bracket_time(a1 / (2 * g), g), species});
  detail::emit_rotation(sch, species, b2.adjoint() * b1);
  sch.elements.push_back(IsingPulse{bracket_time(a2 / (2 * g), g), species});
  detail::emit_rotation(sch, species, b3.adjoint() * b2);
  sch.elements.push_back(IsingPulse{bracket_time(a3 / (2 * g), g), species});
  detail::emit_rotation(sch, species, b3);
  return sch;
}

namespace detail {

inline void require_su2_blocks(const Rule& rule) {
  rule.validate();
  for (const auto* u : {&rule.u00, &rule.u01, &rule.u10, &rule.u11}) {
    if (std::abs(u->determinant() - cx(1, 0)) > 1e-9) {
      throw std::invalid_argument("compiler: rule block not in SU(2)");
    }
  }
}

//! M(1, u^-1, u, 1) via one two-coupling dwell.  The coupling integrals
//! satisfy (left bond) - (right bond) = gamma and sum to 2 pi, relative to
//! the updated species: B sees even-start bonds on its left, A odd-start.
inline void emit_asym_element(PulseSchedule& sch, const RotationSpec& x, Species species,
                              double g) {
  Eigen::Vector3d m = x.half_axis();
  double angle_left = M_PI + x.gamma / 2;
  double angle_right = M_PI - x.gamma / 2;
  double dwell = M_PI / g;
  double ge = (species == Species::B) ? angle_left / dwell : angle_right / dwell;
  double go = (species == Species::B) ? angle_right / dwell : angle_left / dwell;
  sch.elements.push_back(SpeciesRotation{species, m, M_PI / 2});
  sch.elements.push_back(AsymIsingPulse{dwell, ge, go, species});
  sch.elements.push_back(SpeciesRotation{species, m, -M_PI / 2});
}

}  // namespace detail

//! Symmetric rules, u01 = u10: M = M(v^2,v,v,1) M(1,w,w,1) M(1,u,u,u^2)
//! with v = u00^(1/2), u = u11^(1/2), w = u00^(-1/2) u01 u11^(-1/2).
//! Identity factors emit nothing; at most 6 Ising dwells.
inline PulseSchedule compile_symmetric(const Rule& rule, Species species, double g = 1.0) {
  detail::require_su2_blocks(rule);
  if (!rule.is_symmetric(1e-10)) {
    throw std::invalid_argument("compile_symmetric: rule is not left/right symmetric");
  }
  Eigen::Matrix2cd v = su2_sqrt(rule.u00);
  Eigen::Matrix2cd u = su2_sqrt(rule.u11);
  Eigen::Matrix2cd w = v.adjoint() * rule.u01 * u.adjoint();

  PulseSchedule sch{{}, g};
  if (!detail::is_identity(u)) {
    sch.append(compile_sum_rule(RotationSpec::from_unitary(u), species, g));
  }
  if (!detail::is_identity(w)) {
    sch.append(compile_pair_rule(RotationSpec::from_unitary(w), species, g));
  }
  if (!detail::is_identity(v)) {
    sch.append(compile_sum_rule_flipped(RotationSpec::from_unitary(v), species, g));
  }
  return sch;
}

//! General rules: the symmetric decomposition of (u00, u01, u01, u11)
//! followed by M(1,x,x,1) M(1,x^-1,x,1) with x = (u10 u01^-1)^(1/2).
//! At most 11 Ising dwells.
inline PulseSchedule compile_asymmetric(const Rule& rule, Species species, double g = 1.0) {
  detail::require_su2_blocks(rule);
  Eigen::Matrix2cd v = su2_sqrt(rule.u00);
  Eigen::Matrix2cd u = su2_sqrt(rule.u11);
  Eigen::Matrix2cd w = v.adjoint() * rule.u01 * u.adjoint();
  Eigen::Matrix2cd x = su2_sqrt(rule.u10 * rule.u01.adjoint());

  PulseSchedule sch{{}, g};
  if (!detail::is_identity(u)) {
    sch.append(compile_sum_rule(RotationSpec::from_unitary(u), species, g));
  }
  if (!detail::is_identity(w)) {
    sch.append(compile_pair_rule(RotationSpec::from_unitary(w), species, g));
  }
  if (!detail::is_identity(v)) {
    sch.append(compile_sum_rule_flipped(RotationSpec::from_unitary(v), species, g));
  }
  if (!detail::is_identity(x)) {
    RotationSpec xs = RotationSpec::from_unitary(x);
    sch.append(compile_pair_rule(xs, species, g));
    detail::emit_asym_element(sch, xs, species, g);
  }
  return sch;
}

//! Best-known compilation of one species update.
inline PulseSchedule compile_species_update(const Rule& rule, Species species, double g = 1.0) {
  if (detail::is_identity(rule.u00, 1e-10) &&
      (rule.u01 - rule.u10).cwiseAbs().maxCoeff() < 1e-10 &&
      (rule.u01 - rule.u11).cwiseAbs().maxCoeff() < 1e-10) {
    detail::require_su2_blocks(rule);
    return compile_uniform_rule(RotationSpec::from_unitary(rule.u01), species, g);
  }
  if (rule.is_symmetric(1e-10)) return compile_symmetric(rule, species, g);
  return compile_asymmetric(rule, species, g);
}

//! Full step: species B update followed by species A update.
inline PulseSchedule compile_step(const Rule& rule, double g = 1.0) {
  PulseSchedule sch = compile_species_update(rule, Species::B, g);
  sch.append(compile_species_update(rule, Species::A, g));
  return sch;
}

// ---------------------------------------------------------------------------
// Simulation
// ---------------------------------------------------------------------------

namespace detail {

inline void apply_ising_phases(PureState& s, double dwell, double g_even, double g_odd,
                               Species updates, const BoundaryConditions& bc) {
  int n = s.n;
  int nbonds = bc.is_periodic() ? n : n - 1;
  Eigen::Index dim = Eigen::Index{1} << n;
  for (Eigen::Index idx = 0; idx < dim; ++idx) {
    double tot = 0;
    for (int j = 0; j < nbonds; ++j) {
      int jp = (j + 1) % n;
      double zj = ((idx >> (n - 1 - j)) & 1) ? -1.0 : 1.0;
      double zp = ((idx >> (n - 1 - jp)) & 1) ? -1.0 : 1.0;
      tot += (j % 2 == 0 ? g_even : g_odd) * zj * zp;
    }
    s.amp[idx] *= std::polar(1.0, -dwell * tot);
  }
  if (!bc.is_periodic()) {
    // End correction for the updating species; the missing bond at either
    // end is odd-start, so it carries the odd coupling.
    if (updates == Species::A) {
      double ang = -(bc.sigma_l == 0 ? 1.0 : -1.0) * g_odd * dwell;
      apply_local(s, rotation(ang, {0, 0, 1}), {0});
    } else {
      double ang = -(bc.sigma_r == 0 ? 1.0 : -1.0) * g_odd * dwell;
      apply_local(s, rotation(ang, {0, 0, 1}), {s.n - 1});
    }
  }
}

}  // namespace detail

//! Apply the schedule in element order.
inline void simulate_schedule(const PulseSchedule& sch, PureState& s,
                              const BoundaryConditions& bc) {
  detail::check_bqca_size(s.n, bc);
  for (const auto& el : sch.elements) {
    if (const auto* p = std::get_if<IsingPulse>(&el)) {
      detail::apply_ising_phases(s, p->dwell, sch.g, sch.g, p->updates, bc);
    } else if (const auto* a = std::get_if<AsymIsingPulse>(&el)) {
      detail::apply_ising_phases(s, a->dwell, a->g_even, a->g_odd, a->updates, bc);
    } else if (const auto* r = std::get_if<SpeciesRotation>(&el)) {
      Eigen::Matrix2cd u = rotation(r->angle, r->axis);
      for (int j = species_offset(r->species); j < s.n; j += 2) apply_local(s, u, {j});
    } else if (const auto* e = std::get_if<EndRotation>(&el)) {
      int site = (e->end == ChainEnd::Left) ? 0 : s.n - 1;
      apply_local(s, rotation(e->angle, {0, 0, 1}), {site});
    }
  }
}

//! Max entrywise deviation between the schedule's net unitary and the
//! rule-engine ground truth (one species update, or a full step when
//! species is empty), after fitting a single global phase on the first
//! nonzero entry of the ground truth.
inline double verify_schedule(const PulseSchedule& sch, const Rule& rule,
                              std::optional<Species> species, int n,
                              const BoundaryConditions& bc) {
  if (n > 10) throw std::invalid_argument("verify_schedule: n must be <= 10");
  Eigen::Index dim = Eigen::Index{1} << n;
  Mat us(dim, dim), ut(dim, dim);
  for (Eigen::Index k = 0; k < dim; ++k) {
    std::vector<int> bits(n);
    for (int j = 0; j < n; ++j) bits[j] = static_cast<int>((k >> (n - 1 - j)) & 1);
    PureState col = init_basis(n, bits);
    simulate_schedule(sch, col, bc);
    us.col(k) = col.amp;
    PureState ref = init_basis(n, bits);
    if (species) {
      apply_species(ref, rule, *species, bc);
    } else {
      step(ref, rule, bc);
    }
    ut.col(k) = ref.amp;
  }
  cx phase(1, 0);
  for (Eigen::Index k = 0; k < dim * dim; ++k) {
    if (std::abs(ut(k % dim, k / dim)) > 1e-9) {
      cx p = us(k % dim, k / dim) / ut(k % dim, k / dim);
      if (std::abs(p) > 1e-12) phase = p / std::abs(p);
      break;
    }
  }
  return (us - phase * ut).cwiseAbs().maxCoeff();
}

}  // namespace bqca

#endif
