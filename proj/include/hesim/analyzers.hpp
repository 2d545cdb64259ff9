#pragma once

// Measurement-side model: analyzer hardware settings (interferometer phases,
// RF phases, filter selections) mapped to projectors with post-selection
// weights, plus the tomography and witness measurement plans.
//
// Conventions fixed here:
//  - every time-bin outcome (computational or middle-bin) carries weight 1/16:
//    each photon passes two ideal 50:50 couplers, so a specific
//    path-and-port assignment has probability 1/4;
//  - frequency-bin computational outcomes have unit filter transmission; the
//    superposition outcomes carry the sideband-mixing efficiency
//    eta = |J0(delta)|^2 at the equalization point J0(delta) = J1(delta)
//    when realistic-efficiency mode is on, else 1;
//  - superposition projectors are (|0> + e^{i phi} |1>)/sqrt(2), with
//    X -> phi in {0, pi} and Y -> phi in {pi/2, 3pi/2}.

#include "hesim/hilbert.hpp"
#include "hesim/state.hpp"

#include <array>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace hesim {

enum class Basis { Z, X, Y };

inline char basis_char(Basis b) { return b == Basis::Z ? 'Z' : (b == Basis::X ? 'X' : 'Y'); }

// Arrival bins of the unbalanced-interferometer analyzer: 0 -> delay 0,
// 1 -> delay tau (interference bin), 2 -> delay 2*tau.
inline constexpr int kBinEarly = 0;
inline constexpr int kBinMiddle = 1;
inline constexpr int kBinLate = 2;

inline constexpr double kTbOutcomeWeight = 1.0 / 16.0;

struct TBSetting {
  Basis basis_s = Basis::Z;
  Basis basis_i = Basis::Z;
  double phase_s = 0.0;  // waveshaper phase on the long arm, [0, 2*pi)
  double phase_i = 0.0;
  std::array<int, 2> post_bins{-1, -1};  // optional arrival-bin filter, -1 = all

  void validate() const {
    auto check = [](Basis b, double phase) {
      if (phase < 0.0 || phase >= 2.0 * M_PI)
        throw std::invalid_argument("TBSetting: phase outside [0, 2*pi)");
      if (b == Basis::Z && phase != 0.0)
        throw std::invalid_argument("TBSetting: Z settings carry no phase");
    };
    check(basis_s, phase_s);
    check(basis_i, phase_i);
  }
};

struct FBSetting {
  Basis basis_s = Basis::Z;
  Basis basis_i = Basis::Z;
  bool rf_on_s = false;
  bool rf_on_i = false;
  double rf_phase_s = 0.0;
  double rf_phase_i = 0.0;
  double modulation_index = 0.0;  // 0 = use the equalization point
  std::array<int, 2> selected_bins{-1, -1};  // Z-basis filter selection, -1 = both
  bool realistic_efficiency = false;

  void validate() const {
    auto check = [](Basis b, bool rf_on) {
      if (b != Basis::Z && !rf_on)
        throw std::invalid_argument(
            "FBSetting: superposition basis requested with RF off");
      if (b == Basis::Z && rf_on)
        throw std::invalid_argument("FBSetting: Z basis measured with RF on");
    };
    check(basis_s, rf_on_s);
    check(basis_i, rf_on_i);
    if (modulation_index < 0)
      throw std::invalid_argument("FBSetting: negative modulation index");
  }
};

// One realized measurement outcome: a rank-1 projector on the 4-dim DoF
// subspace (applied as identity on the other DoF) plus its post-selection
// weight and bookkeeping labels.
struct ProjectorSetting {
  std::string label;    // e.g. "TB:X+X-" or "FB:ZZ:01"
  std::string group;    // hardware-setting group, e.g. "TB:ZZ"
  std::string outcome;  // per-photon outcome tokens, e.g. "01" or "+-"
  Observable projector; // rank-1 on the DoF pair layout
  double weight = 1.0;  // post-selection probability factor in (0, 1]
  std::array<int, 2> arrival_bins{-1, -1};  // TB only
};

//------------------------------------------------------------------------------
// Sideband-mixing efficiency
//------------------------------------------------------------------------------

// Root of J0(delta) = J1(delta); the RF power at which the two sidebands
// mixing the bins have equal intensity.
inline double fb_equalization_delta() {
  static const double root = [] {
    double lo = 1.0, hi = 2.0;
    auto f = [](double x) { return std::cyl_bessel_j(0, x) - std::cyl_bessel_j(1, x); };
    for (int i = 0; i < 200; ++i) {
      const double mid = 0.5 * (lo + hi);
      if (f(lo) * f(mid) <= 0.0)
        hi = mid;
      else
        lo = mid;
    }
    return 0.5 * (lo + hi);
  }();
  return root;
}

inline double fb_mixing_efficiency(double delta) {
  const double j0 = std::cyl_bessel_j(0, delta);
  return j0 * j0;
}

//------------------------------------------------------------------------------
// Single-photon measurement vectors
//------------------------------------------------------------------------------

// (|0> + e^{i phase} |1>)/sqrt(2) on one qubit.
inline Vector superposition_ket(double phase) {
  Vector v(2);
  v(0) = 1.0 / std::sqrt(2.0);
  v(1) = std::polar(1.0 / std::sqrt(2.0), phase);
  return v;
}

inline Vector computational_ket(int bit) {
  Vector v = Vector::Zero(2);
  v(bit) = 1.0;
  return v;
}

inline double eigenstate_phase(Basis b, int sign) {
  if (b == Basis::X) return sign > 0 ? 0.0 : M_PI;
  if (b == Basis::Y) return sign > 0 ? M_PI_2 : 3.0 * M_PI_2;
  throw std::invalid_argument("eigenstate_phase: Z has no analyzer phase");
}

namespace detail {

struct PhotonOutcome {
  Vector ket;       // single-qubit measurement vector
  char token;       // '0','1','+','-'
  int arrival_bin;  // TB bins; -1 for FB
  double weight;    // per-photon post-selection factor
};

inline char phase_token(Basis b, double phase) {
  const double tol = 1e-9;
  auto near = [&](double x) { return std::abs(phase - x) < tol; };
  if (b == Basis::X) {
    if (near(0.0) || near(2.0 * M_PI)) return '+';
    if (near(M_PI)) return '-';
  } else if (b == Basis::Y) {
    if (near(M_PI_2)) return '+';
    if (near(3.0 * M_PI_2)) return '-';
  }
  return '?';  // swept / non-canonical phase
}

inline std::vector<PhotonOutcome> tb_photon_outcomes(Basis b, double phase, int bin_filter) {
  std::vector<PhotonOutcome> out;
  if (b == Basis::Z) {
    out.push_back({computational_ket(0), '0', kBinEarly, 0.25});
    out.push_back({computational_ket(1), '1', kBinLate, 0.25});
  } else {
    out.push_back({superposition_ket(phase), phase_token(b, phase), kBinMiddle, 0.25});
  }
  if (bin_filter >= 0)
    std::erase_if(out, [&](const PhotonOutcome& o) { return o.arrival_bin != bin_filter; });
  return out;
}

inline std::vector<PhotonOutcome> fb_photon_outcomes(Basis b, double phase, int bin_filter,
                                                     double weight_xy) {
  std::vector<PhotonOutcome> out;
  if (b == Basis::Z) {
    out.push_back({computational_ket(0), '0', -1, 1.0});
    out.push_back({computational_ket(1), '1', -1, 1.0});
    if (bin_filter >= 0)
      std::erase_if(out, [&](const PhotonOutcome& o) { return o.token != char('0' + bin_filter); });
  } else {
    out.push_back({superposition_ket(phase), phase_token(b, phase), -1, weight_xy});
  }
  return out;
}

inline std::string pair_label(Dof dof, Basis bs, Basis bi, char ts, char ti) {
  const std::string prefix = dof_name(dof) + ":";
  if (bs != Basis::Z && bi != Basis::Z)
    return prefix + basis_char(bs) + std::string(1, ts) + basis_char(bi) + std::string(1, ti);
  return prefix + basis_char(bs) + std::string(1, basis_char(bi)) + ":" + ts + ti;
}

inline ProjectorSetting make_pair_setting(Dof dof, Basis bs, Basis bi,
                                          const PhotonOutcome& s, const PhotonOutcome& i) {
  const SubsystemLayout layout = dof_layout(dof);
  const Vector joint = kron(Vector(s.ket), Vector(i.ket));
  Observable proj(Matrix(joint * joint.adjoint()), layout);
  ProjectorSetting ps{pair_label(dof, bs, bi, s.token, i.token),
                      dof_name(dof) + ":" + basis_char(bs) + basis_char(bi),
                      std::string(1, s.token) + i.token,
                      std::move(proj),
                      s.weight * i.weight,
                      {s.arrival_bin, i.arrival_bin}};
  return ps;
}

}  // namespace detail

//------------------------------------------------------------------------------
// Setting -> projector lists
//------------------------------------------------------------------------------

// Z bases resolve by arrival time into the computational projectors; X/Y
// bases are realized in the interference (middle) bin with the waveshaper
// phases. All outcomes carry weight 1/16.
inline std::vector<ProjectorSetting> tb_projectors(const TBSetting& setting) {
  setting.validate();
  const auto s_out = detail::tb_photon_outcomes(setting.basis_s, setting.phase_s,
                                                setting.post_bins[0]);
  const auto i_out = detail::tb_photon_outcomes(setting.basis_i, setting.phase_i,
                                                setting.post_bins[1]);
  std::vector<ProjectorSetting> out;
  for (const auto& s : s_out)
    for (const auto& i : i_out)
      out.push_back(detail::make_pair_setting(Dof::TB, setting.basis_s, setting.basis_i, s, i));
  return out;
}

// Z bases via bin-resolved filtering; X/Y via coherent sideband mixing with
// the RF phase defining the projector.
inline std::vector<ProjectorSetting> fb_projectors(const FBSetting& setting) {
  setting.validate();
  const double delta =
      setting.modulation_index > 0 ? setting.modulation_index : fb_equalization_delta();
  const double w_xy = setting.realistic_efficiency ? fb_mixing_efficiency(delta) : 1.0;
  const auto s_out = detail::fb_photon_outcomes(setting.basis_s, setting.rf_phase_s,
                                                setting.selected_bins[0], w_xy);
  const auto i_out = detail::fb_photon_outcomes(setting.basis_i, setting.rf_phase_i,
                                                setting.selected_bins[1], w_xy);
  std::vector<ProjectorSetting> out;
  for (const auto& s : s_out)
    for (const auto& i : i_out)
      out.push_back(detail::make_pair_setting(Dof::FB, setting.basis_s, setting.basis_i, s, i));
  return out;
}

//------------------------------------------------------------------------------
// Measurement plans
//------------------------------------------------------------------------------

struct PlanOptions {
  bool realistic_efficiency = false;
  double modulation_index = 0.0;  // 0 = equalization point
};

namespace detail {

inline PhotonOutcome plan_photon_outcome(Dof dof, Basis b, int sign, const PlanOptions& opts) {
  if (b == Basis::Z) {
    const int bit = sign > 0 ? 0 : 1;
    return {computational_ket(bit), char('0' + bit),
            dof == Dof::TB ? (bit == 0 ? kBinEarly : kBinLate) : -1,
            dof == Dof::TB ? 0.25 : 1.0};
  }
  const double phase = eigenstate_phase(b, sign);
  double w = 0.25;
  if (dof == Dof::FB) {
    const double delta =
        opts.modulation_index > 0 ? opts.modulation_index : fb_equalization_delta();
    w = opts.realistic_efficiency ? fb_mixing_efficiency(delta) : 1.0;
  }
  return {superposition_ket(phase), sign > 0 ? '+' : '-',
          dof == Dof::TB ? kBinMiddle : -1, w};
}

}  // namespace detail

// All 36 products of single-photon Z/X/Y eigenstates, signal index outer.
// Projectors live on the 4-dim DoF subspace and are applied as identity on
// the other DoF.
inline std::vector<ProjectorSetting> tomography_plan(Dof dof, const PlanOptions& opts = {}) {
  static constexpr std::array<Basis, 3> bases{Basis::Z, Basis::X, Basis::Y};
  static constexpr std::array<int, 2> signs{+1, -1};
  std::vector<ProjectorSetting> plan;
  plan.reserve(36);
  for (Basis bs : bases)
    for (int ss : signs)
      for (Basis bi : bases)
        for (int si : signs) {
          const auto s = detail::plan_photon_outcome(dof, bs, ss, opts);
          const auto i = detail::plan_photon_outcome(dof, bi, si, opts);
          plan.push_back(detail::make_pair_setting(dof, bs, bi, s, i));
        }
  return plan;
}

// The four stabilizers of the hyperentangled target, identity-extended to the
// full 16-dim space: XX and ZZ on each DoF.
struct Stabilizer {
  std::string name;
  Dof dof;
  Observable op;  // on the canonical 16-dim layout
};

inline std::vector<Stabilizer> stabilizer_plan() {
  const SubsystemLayout full = canonical_layout();
  auto make = [&](const std::string& name, Dof dof, int pauli_idx) {
    return Stabilizer{name, dof, embed(pauli_pair(pauli_idx, pauli_idx, dof_layout(dof)), full)};
  };
  return {make("XX_TB", Dof::TB, 1), make("ZZ_TB", Dof::TB, 3),
          make("XX_FB", Dof::FB, 1), make("ZZ_FB", Dof::FB, 3)};
}

// Counting realization of one stabilizer: the four eigenbasis outcomes with
// their parity signs.
struct StabilizerMeasurement {
  std::string name;
  Dof dof;
  std::vector<ProjectorSetting> outcomes;
  std::vector<int> signs;  // +1 / -1 per outcome
};

inline std::vector<StabilizerMeasurement> stabilizer_measurements(const PlanOptions& opts = {}) {
  static constexpr std::array<int, 2> sign_list{+1, -1};
  std::vector<StabilizerMeasurement> out;
  for (const auto& [name, dof, basis] :
       std::initializer_list<std::tuple<std::string, Dof, Basis>>{
           {"XX_TB", Dof::TB, Basis::X},
           {"ZZ_TB", Dof::TB, Basis::Z},
           {"XX_FB", Dof::FB, Basis::X},
           {"ZZ_FB", Dof::FB, Basis::Z}}) {
    StabilizerMeasurement m{name, dof, {}, {}};
    for (int ss : sign_list)
      for (int si : sign_list) {
        const auto s = detail::plan_photon_outcome(dof, basis, ss, opts);
        const auto i = detail::plan_photon_outcome(dof, basis, si, opts);
        auto ps = detail::make_pair_setting(dof, basis, basis, s, i);
        ps.label = "STAB:" + name + ":" + ps.outcome;
        ps.group = "STAB:" + name;
        m.outcomes.push_back(std::move(ps));
        m.signs.push_back(ss * si);
      }
    out.push_back(std::move(m));
  }
  return out;
}

}  // namespace hesim
