#pragma once

// Entanglement figures of merit from density matrices or measured values:
// CHSH (closed-form maximum and fixed measurement directions), fringe
// visibility, the hyperentanglement witness, and the assembled MeritReport.

#include "hesim/analyzers.hpp"
#include "hesim/hilbert.hpp"
#include "hesim/state.hpp"
#include "hesim/tomo.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace hesim {

inline constexpr double kTsirelson = 2.0 * M_SQRT2;

// 3x3 matrix T_ij = Tr[rho sigma_i (x) sigma_j], i,j in {X,Y,Z}.
inline Eigen::Matrix3d correlation_matrix(const DensityMatrix& rho) {
  if (rho.dim() != 4)
    throw std::invalid_argument("correlation_matrix: need a two-qubit state");
  Eigen::Matrix3d T;
  for (int i = 1; i <= 3; ++i)
    for (int j = 1; j <= 3; ++j)
      T(i - 1, j - 1) = expectation(rho, pauli_pair(i, j, rho.layout()));
  return T;
}

// Closed-form maximum of the CHSH expression over measurement directions:
// 2*sqrt of the sum of the two largest eigenvalues of T^T T.
inline double chsh_horodecki(const DensityMatrix& rho) {
  const Eigen::Matrix3d T = correlation_matrix(rho);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(T.transpose() * T);
  const auto& ev = es.eigenvalues();  // ascending
  return 2.0 * std::sqrt(std::max(0.0, ev(2) + ev(1)));
}

// S = E(a,b) - E(a,b') + E(a',b) + E(a',b') with E(u,v) = u^T T v.
inline double chsh_fixed_angles(const DensityMatrix& rho, const Eigen::Vector3d& a,
                                const Eigen::Vector3d& a2, const Eigen::Vector3d& b,
                                const Eigen::Vector3d& b2) {
  for (const auto* v : {&a, &a2, &b, &b2})
    if (std::abs(v->norm() - 1.0) > 1e-9)
      throw std::invalid_argument("chsh_fixed_angles: directions must be unit vectors");
  const Eigen::Matrix3d T = correlation_matrix(rho);
  auto E = [&](const Eigen::Vector3d& u, const Eigen::Vector3d& v) { return u.dot(T * v); };
  return E(a, b) - E(a, b2) + E(a2, b) + E(a2, b2);
}

// Directions in the X-Z plane given by the angle from Z: n = (sin t, 0, cos t).
inline Eigen::Vector3d xz_direction(double theta) {
  return {std::sin(theta), 0.0, std::cos(theta)};
}

inline double chsh_fixed_angles(const DensityMatrix& rho, double ta, double ta2, double tb,
                                double tb2) {
  return chsh_fixed_angles(rho, xz_direction(ta), xz_direction(ta2), xz_direction(tb),
                           xz_direction(tb2));
}

//------------------------------------------------------------------------------
// Fringe visibility
//------------------------------------------------------------------------------

// Least-squares fit of rate(phi) = A * (1 + V cos(phi + phi0)).
struct FringeFit {
  double visibility = 0.0;
  double offset = 0.0;  // A
  double phase = 0.0;   // phi0
};

inline FringeFit visibility_from_fringe(const std::vector<std::pair<double, double>>& samples) {
  std::set<double> distinct;
  for (const auto& [phi, rate] : samples) {
    (void)rate;
    distinct.insert(phi);
  }
  if (distinct.size() < 4)
    throw std::invalid_argument("visibility_from_fringe: need at least 4 distinct phases");

  const auto n = Eigen::Index(samples.size());
  Eigen::MatrixXd X(n, 3);
  Eigen::VectorXd y(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    X(k, 0) = 1.0;
    X(k, 1) = std::cos(samples[std::size_t(k)].first);
    X(k, 2) = std::sin(samples[std::size_t(k)].first);
    y(k) = samples[std::size_t(k)].second;
  }
  const Eigen::Vector3d c = X.colPivHouseholderQr().solve(y);
  FringeFit fit;
  fit.offset = c(0);
  if (c(0) <= 0) return fit;  // flat or degenerate fringe
  fit.visibility = std::hypot(c(1), c(2)) / c(0);
  fit.phase = std::atan2(-c(2), c(1));
  return fit;
}

//------------------------------------------------------------------------------
// Witness and violation statistics
//------------------------------------------------------------------------------

// W = (2d - 1) - sum of the 2d stabilizer expectations; W < 0 certifies
// entanglement in all d degrees of freedom simultaneously.
inline double witness(const std::vector<double>& stabilizer_values, int d = 2) {
  if (d < 2) throw std::invalid_argument("witness: d must be at least 2");
  if (stabilizer_values.size() != std::size_t(2 * d))
    throw std::invalid_argument("witness: expected 2d stabilizer values");
  double sum = 0.0;
  for (double s : stabilizer_values) sum += s;
  return (2.0 * d - 1.0) - sum;
}

enum class Side { Above, Below };

// Distance from the classical threshold in units of the standard deviation;
// positive when the value lies on the violating side.
inline double violation_stds(double value, double threshold, double std, Side side) {
  if (std <= 0) throw std::invalid_argument("violation_stds: std must be positive");
  const double excess = side == Side::Above ? value - threshold : threshold - value;
  return excess / std;
}

//------------------------------------------------------------------------------
// Merit report
//------------------------------------------------------------------------------

// Metric set refit under resampling for per-DoF error bars.
inline std::map<std::string, double> standard_merits(const DensityMatrix& rho) {
  return {{"fidelity", fidelity_pure(rho, bell_phi_plus(rho.layout()))},
          {"purity", purity(rho)},
          {"s_parameter", chsh_horodecki(rho)}};
}

struct DofMerit {
  double fidelity = 0.0;
  double purity = 0.0;
  double s_parameter = 0.0;
  double s_std = 0.0;
  double violation_stds_chsh = std::numeric_limits<double>::quiet_NaN();
  std::optional<double> visibility;
  double fidelity_std = 0.0;
  double purity_std = 0.0;
};

// Stabilizer order throughout: XX_TB, ZZ_TB, XX_FB, ZZ_FB.
inline constexpr std::array<const char*, 4> kStabilizerNames{"XX_TB", "ZZ_TB", "XX_FB", "ZZ_FB"};

struct MeritReport {
  DofMerit tb, fb;
  std::array<double, 4> stabilizers{};
  std::array<double, 4> stabilizer_stds{};
  double witness = 0.0;
  double witness_std = 0.0;
  double violation_stds_witness = std::numeric_limits<double>::quiet_NaN();

  void validate() const {
    auto dof_ok = [](const DofMerit& m) {
      return m.fidelity >= -1e-9 && m.fidelity <= 1 + 1e-9 && m.purity >= -1e-9 &&
             m.purity <= 1 + 1e-9 && m.s_parameter >= 0 && m.s_parameter <= kTsirelson + 1e-9;
    };
    if (!dof_ok(tb) || !dof_ok(fb))
      throw std::logic_error("MeritReport: metric out of physical range");
  }
};

namespace detail {

inline double std_of(const ErrorEstimate& e, const std::string& key) {
  const auto it = e.stds.find(key);
  return it == e.stds.end() ? 0.0 : it->second;
}

inline DofMerit dof_merit(const DensityMatrix& rho, const ErrorEstimate& errors,
                          const std::string& prefix) {
  DofMerit m;
  m.fidelity = fidelity_pure(rho, bell_phi_plus(rho.layout()));
  m.purity = purity(rho);
  m.s_parameter = chsh_horodecki(rho);
  m.fidelity_std = std_of(errors, prefix + ".fidelity");
  m.purity_std = std_of(errors, prefix + ".purity");
  m.s_std = std_of(errors, prefix + ".s_parameter");
  if (m.s_std > 0) m.violation_stds_chsh = violation_stds(m.s_parameter, 2.0, m.s_std, Side::Above);
  return m;
}

}  // namespace detail

// Error-estimate keys, when present: "tb.fidelity", "tb.purity",
// "tb.s_parameter" (same for "fb."), "stab.XX_TB" .. "stab.ZZ_FB", "witness".
inline MeritReport merit_report(const DensityMatrix& rho_tb, const DensityMatrix& rho_fb,
                                const std::array<double, 4>& stabilizers,
                                const ErrorEstimate& errors = {}) {
  MeritReport r;
  r.tb = detail::dof_merit(rho_tb, errors, "tb");
  r.fb = detail::dof_merit(rho_fb, errors, "fb");
  r.stabilizers = stabilizers;
  double wvar = 0.0;
  for (std::size_t k = 0; k < 4; ++k) {
    r.stabilizer_stds[k] = detail::std_of(errors, std::string("stab.") + kStabilizerNames[k]);
    wvar += r.stabilizer_stds[k] * r.stabilizer_stds[k];
  }
  r.witness = witness({stabilizers.begin(), stabilizers.end()}, 2);
  const double wstd = detail::std_of(errors, "witness");
  r.witness_std = wstd > 0 ? wstd : std::sqrt(wvar);
  if (r.witness_std > 0)
    r.violation_stds_witness = violation_stds(r.witness, 0.0, r.witness_std, Side::Below);
  r.validate();
  return r;
}

// Stabilizers evaluated on the full 16-dim state.
inline MeritReport merit_report(const DensityMatrix& rho_tb, const DensityMatrix& rho_fb,
                                const DensityMatrix& rho_full, const ErrorEstimate& errors = {}) {
  std::array<double, 4> stabs{};
  const auto plan = stabilizer_plan();
  for (std::size_t k = 0; k < 4; ++k) stabs[k] = expectation(rho_full, plan[k].op);
  return merit_report(rho_tb, rho_fb, stabs, errors);
}

// Model shortcut: both marginals and stabilizers from one full state.
inline MeritReport merit_report(const DensityMatrix& rho_full, const ErrorEstimate& errors = {}) {
  return merit_report(marginal(rho_full, Dof::TB), marginal(rho_full, Dof::FB), rho_full, errors);
}

}  // namespace hesim
