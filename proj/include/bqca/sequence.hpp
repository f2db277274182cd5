#ifndef BQCA_SEQUENCE_HPP
#define BQCA_SEQUENCE_HPP

// Named multi-step recipes on open chains with (0,0) boundaries: state
// transport, end-to-end swap, boundary Bell pair, n-spin GHZ, cluster-state
// preparation.  Each program carries both a rule-engine step list and a
// compiled pulse schedule with physical timing.

#include "bqca/pulse.hpp"

#include <string>
#include <variant>

namespace bqca {

struct FullStep {
  Rule rule;
};
struct SpeciesUpdate {
  Rule rule;
  Species species;
};
struct LocalRotation {
  int site;
  Eigen::Vector3d axis;
  double angle;  // e^{i angle sigma.axis}
};

using SequenceStep = std::variant<FullStep, SpeciesUpdate, LocalRotation>;

enum class NForm { Mod4_0, Mod4_2, AnyEven };

struct SequenceProgram {
  std::string name;
  int n = 0;
  NForm n_form = NForm::AnyEven;
  std::optional<int> seed_site;
  BoundaryConditions bc = BoundaryConditions::fixed(0, 0);
  std::vector<SequenceStep> steps;
  PulseSchedule schedule;

  double total_time() const { return schedule.total_time(); }
};

inline void apply_step(PureState& s, const SequenceStep& st, const BoundaryConditions& bc) {
  if (const auto* f = std::get_if<FullStep>(&st)) {
    step(s, f->rule, bc);
  } else if (const auto* u = std::get_if<SpeciesUpdate>(&st)) {
    apply_species(s, u->rule, u->species, bc);
  } else if (const auto* r = std::get_if<LocalRotation>(&st)) {
    apply_local(s, rotation(r->angle, r->axis), {r->site});
  }
}

//! Run the program through the rule engine, calling after_step(index, state)
//! after every step.
template <typename Callback>
void execute(const SequenceProgram& prog, PureState& s, Callback after_step) {
  if (s.n != prog.n) throw std::invalid_argument("execute: state size does not match program");
  int i = 0;
  for (const auto& st : prog.steps) {
    apply_step(s, st, prog.bc);
    after_step(i++, s);
  }
}

inline void execute(const SequenceProgram& prog, PureState& s) {
  execute(prog, s, [](int, const PureState&) {});
}

namespace detail {

inline void require_even(int n, int minimum = 2) {
  if (n < minimum || n % 2 != 0) {
    throw std::invalid_argument("sequence requires even n >= " + std::to_string(minimum));
  }
}

inline RotationSpec shift_spec() { return RotationSpec::from_unitary(rotation(-M_PI / 2, {1, 0, 0})); }

inline void push_shift_step(SequenceProgram& p, double g) {
  p.steps.push_back(FullStep{rule_shift()});
  RotationSpec s = shift_spec();
  p.schedule.append(compile_sum_rule(s, Species::B, g));
  p.schedule.append(compile_sum_rule(s, Species::A, g));
}

inline void push_shift_b_update(SequenceProgram& p, double g) {
  p.steps.push_back(SpeciesUpdate{rule_shift(), Species::B});
  p.schedule.append(compile_sum_rule(shift_spec(), Species::B, g));
}

inline void push_end_z(SequenceProgram& p, int site, double angle) {
  p.steps.push_back(LocalRotation{site, {0, 0, 1}, angle});
  p.schedule.elements.push_back(
      EndRotation{site == 0 ? ChainEnd::Left : ChainEnd::Right, angle});
}

}  // namespace detail

//! Move the qubit state at site 0 to site n-1 (interior prepared in |0>).
//! n/2 shift-rule steps followed by sigma_z on the last site; total Ising
//! time n pi/(4g).
inline SequenceProgram transport(int n, double g = 1.0) {
  detail::require_even(n);
  SequenceProgram p{"transport", n, NForm::AnyEven, 0, BoundaryConditions::fixed(0, 0), {}, {{}, g}};
  for (int i = 0; i < n / 2; ++i) detail::push_shift_step(p, g);
  detail::push_end_z(p, n - 1, -M_PI / 2);  // sigma_z up to a global phase
  return p;
}

//! Exchange the states of sites 0 and n-1 (interior prepared in |0>).
inline SequenceProgram swap_ends(int n, double g = 1.0) {
  detail::require_even(n);
  SequenceProgram p{"swap", n, NForm::AnyEven, {}, BoundaryConditions::fixed(0, 0), {}, {{}, g}};
  for (int i = 0; i < n / 2; ++i) detail::push_shift_step(p, g);
  detail::push_shift_b_update(p, g);
  detail::push_end_z(p, 0, -M_PI / 2);
  detail::push_end_z(p, n - 1, -M_PI / 2);
  return p;
}

inline int entanglement_seed_site(int n) { return n % 4 == 0 ? n / 2 : n / 2 - 1; }

//! Distribute a Bell pair to sites (0, n-1) from a (|0>+|1>)/sqrt(2) seed
//! near the middle.  One seed step by the uniform pi/2 rule, shift steps
//! outward, and a z correction; total Ising time (4+n/2) pi/(4g).
inline SequenceProgram bell_pair(int n, double g = 1.0) {
  detail::require_even(n, 4);
  int k = n / 4;
  SequenceProgram p{"bell",
                    n,
                    n % 4 == 0 ? NForm::Mod4_0 : NForm::Mod4_2,
                    entanglement_seed_site(n),
                    BoundaryConditions::fixed(0, 0),
                    {},
                    {{}, g}};
  RotationSpec m1 = detail::shift_spec();
  p.steps.push_back(FullStep{rule_m1()});
  p.schedule.append(compile_uniform_rule(m1, Species::B, g));
  p.schedule.append(compile_uniform_rule(m1, Species::A, g));
  if (n % 4 == 0) {
    for (int i = 0; i < k - 1; ++i) detail::push_shift_step(p, g);
    detail::push_shift_b_update(p, g);
  } else {
    for (int i = 0; i < k; ++i) detail::push_shift_step(p, g);
  }
  detail::push_end_z(p, 0, -M_PI / 4);
  return p;
}

//! n-spin GHZ state from the same seed; total Ising time n pi/(8g).
inline SequenceProgram ghz(int n, double g = 1.0) {
  detail::require_even(n, 4);
  int k = n / 4;
  SequenceProgram p{"ghz",
                    n,
                    n % 4 == 0 ? NForm::Mod4_0 : NForm::Mod4_2,
                    entanglement_seed_site(n),
                    BoundaryConditions::fixed(0, 0),
                    {},
                    {{}, g}};
  for (int i = 0; i < k; ++i) detail::push_shift_step(p, g);
  if (n % 4 == 0) {
    double sign = (k % 2 == 0) ? 1.0 : -1.0;
    detail::push_end_z(p, 0, sign * M_PI / 4);
  } else {
    detail::push_shift_b_update(p, g);
    double sign = (k % 2 == 0) ? -1.0 : 1.0;
    detail::push_end_z(p, 0, sign * M_PI / 4);
  }
  return p;
}

//! Cluster-state preparation: rotate every site by e^{-i pi/4 sigma_y},
//! then one step of the conditional-phase rule.
inline SequenceProgram cluster(int n, double g = 1.0) {
  detail::require_even(n);
  SequenceProgram p{"cluster", n, NForm::AnyEven, {}, BoundaryConditions::fixed(0, 0), {}, {{}, g}};
  for (int j = 0; j < n; ++j) {
    p.steps.push_back(LocalRotation{j, {0, 1, 0}, -M_PI / 4});
  }
  p.schedule.elements.push_back(SpeciesRotation{Species::A, {0, 1, 0}, -M_PI / 4});
  p.schedule.elements.push_back(SpeciesRotation{Species::B, {0, 1, 0}, -M_PI / 4});
  Rule rc = rule_cluster();
  p.steps.push_back(FullStep{rc});
  RotationSpec u = RotationSpec::from_unitary(rc.u01);
  p.schedule.append(compile_sum_rule(u, Species::B, g));
  p.schedule.append(compile_sum_rule(u, Species::A, g));
  return p;
}

inline SequenceProgram sequence_by_name(const std::string& name, int n, double g = 1.0) {
  if (name == "transport") return transport(n, g);
  if (name == "swap") return swap_ends(n, g);
  if (name == "bell") return bell_pair(n, g);
  if (name == "ghz") return ghz(n, g);
  if (name == "cluster") return cluster(n, g);
  throw std::invalid_argument("unknown sequence preset: " + name);
}

}  // namespace bqca

#endif
