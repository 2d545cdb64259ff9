#pragma once

// Ideal and noisy hyperentangled two-photon states. The full space is the
// 16-dimensional product of four qubits in canonical order
// (TB_signal, TB_idler, FB_signal, FB_idler).

#include "hesim/hilbert.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace hesim {

enum class Dof { TB, FB };

inline std::string dof_name(Dof d) { return d == Dof::TB ? "TB" : "FB"; }

inline SubsystemLayout tb_layout() { return SubsystemLayout{"TB_s", "TB_i"}; }
inline SubsystemLayout fb_layout() { return SubsystemLayout{"FB_s", "FB_i"}; }
inline SubsystemLayout dof_layout(Dof d) { return d == Dof::TB ? tb_layout() : fb_layout(); }
inline SubsystemLayout canonical_layout() {
  return SubsystemLayout{"TB_s", "TB_i", "FB_s", "FB_i"};
}

struct NoiseParams {
  double mu_tb = 1.0;   // TB coherence magnitude
  double mu_fb = 1.0;   // FB coherence magnitude
  double p_white = 0.0; // white-noise fraction

  void validate() const {
    if (mu_tb < 0 || mu_tb > 1 || mu_fb < 0 || mu_fb > 1)
      throw std::invalid_argument("NoiseParams: mu outside [0,1]");
    if (p_white < 0 || p_white >= 1)
      throw std::invalid_argument("NoiseParams: p_white outside [0,1)");
  }
};

// (|00> + |11>)/sqrt(2) on a labeled pair of qubits.
inline Ket bell_phi_plus(const SubsystemLayout& pair_layout) {
  if (pair_layout.size() != 2)
    throw std::invalid_argument("bell_phi_plus: need a 2-label layout");
  Vector amp = Vector::Zero(4);
  amp(0) = amp(3) = 1.0 / std::sqrt(2.0);
  return Ket(std::move(amp), pair_layout);
}

inline Ket bell_phi_plus(Dof d) { return bell_phi_plus(dof_layout(d)); }

// |Phi+_TB> (x) |Phi+_FB> in canonical layout; four amplitudes of 1/2.
inline Ket ideal_he_state() {
  return tensor(bell_phi_plus(Dof::TB), bell_phi_plus(Dof::FB));
}

// Bell state with off-diagonal coherence scaled by mu; PSD for all mu in [0,1].
inline DensityMatrix dephased_bell(double mu, const SubsystemLayout& pair_layout) {
  if (mu < 0 || mu > 1) throw std::invalid_argument("dephased_bell: mu outside [0,1]");
  Matrix m = Matrix::Zero(4, 4);
  m(0, 0) = m(3, 3) = 0.5;
  m(0, 3) = m(3, 0) = 0.5 * mu;
  return DensityMatrix(std::move(m), pair_layout);
}

inline DensityMatrix dephased_bell(double mu, Dof d) { return dephased_bell(mu, dof_layout(d)); }

// (1-p) * [dephased(mu_tb) (x) dephased(mu_fb)] + p * I/16.
inline DensityMatrix noisy_he_state(const NoiseParams& noise) {
  noise.validate();
  const DensityMatrix product =
      tensor(dephased_bell(noise.mu_tb, Dof::TB), dephased_bell(noise.mu_fb, Dof::FB));
  Matrix m = (1.0 - noise.p_white) * product.matrix() +
             noise.p_white / 16.0 * Matrix::Identity(16, 16);
  return DensityMatrix(std::move(m), canonical_layout());
}

// Two-qubit marginal of the full state over one DoF.
inline DensityMatrix marginal(const DensityMatrix& rho, Dof d) {
  return partial_trace(rho, dof_layout(d).labels());
}

}  // namespace hesim
