#pragma once

// Physical-parameter layer: resonator spectra, frequency-bin geometry, source
// indistinguishability and count-rate budgets.

#include <cmath>
#include <stdexcept>
#include <string>

namespace hesim {

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s

struct RingParams {
  double radius_um = 22.0;
  double group_index = 4.14;
  double quality_factor = 1e5;
  double resonance_wavelength_nm = 1543.656;

  void validate() const {
    if (radius_um <= 0 || group_index <= 0 || resonance_wavelength_nm <= 0)
      throw std::invalid_argument("RingParams: all parameters must be positive");
    if (quality_factor < 1e3)
      throw std::invalid_argument("RingParams: quality_factor below 1e3");
  }
};

struct PumpParams {
  double wavelength_nm = 1543.656;
  double pulse_width_ns = 2.0;        // t_w
  double bin_delay_ns = 13.0;         // delay between the two pulses
  double repetition_rate_mhz = 50.0;
  double peak_power_mw = 0.35;
  double rf_frequency_ghz = 18.25;    // frequency-bin spacing
  double free_carrier_lifetime_ns = 10.0;

  void validate() const {
    if (wavelength_nm <= 0 || pulse_width_ns <= 0 || bin_delay_ns <= 0 ||
        repetition_rate_mhz <= 0 || peak_power_mw < 0 || rf_frequency_ghz <= 0 ||
        free_carrier_lifetime_ns <= 0)
      throw std::invalid_argument("PumpParams: invalid parameter");
  }

  // Soft sanity flags, reported rather than enforced.
  struct Flags {
    bool delay_exceeds_fc_lifetime;   // bin delay must outlive free carriers
    bool pulse_within_fc_lifetime;    // pulse much shorter than FC lifetime
    bool dofs_distinct;               // time-bandwidth product > 10
  };
  Flags flags() const {
    return Flags{bin_delay_ns > free_carrier_lifetime_ns,
                 pulse_width_ns <= free_carrier_lifetime_ns / 3.0,
                 rf_frequency_ghz * pulse_width_ns > 10.0};
  }
};

struct Budget {
  double brightness_hz_per_mw2_ghz = 1.5e7;
  double coupling_loss_per_facet_db = 3.5;
  double analyzer_loss_db = 3.0;
  double detector_efficiency = 0.85;
  double coincidence_window_ns = 1.0;
  double car = 30.0;  // coincidence-to-accidental ratio

  void validate() const {
    if (brightness_hz_per_mw2_ghz < 0 || coupling_loss_per_facet_db < 0 ||
        analyzer_loss_db < 0 || coincidence_window_ns <= 0)
      throw std::invalid_argument("Budget: invalid parameter");
    if (detector_efficiency <= 0 || detector_efficiency > 1)
      throw std::invalid_argument("Budget: detector_efficiency outside (0,1]");
    if (car <= 0) throw std::invalid_argument("Budget: car must be positive");
  }
};

//------------------------------------------------------------------------------
// Resonator geometry
//------------------------------------------------------------------------------

// Free spectral range c / (n_g * 2*pi*R), in GHz.
inline double fsr_ghz(const RingParams& ring) {
  ring.validate();
  const double radius_m = ring.radius_um * 1e-6;
  return kSpeedOfLight / (ring.group_index * 2.0 * M_PI * radius_m) / 1e9;
}

// Loaded-Q FWHM linewidth (c/lambda)/Q, in GHz.
inline double linewidth_ghz(const RingParams& ring) {
  ring.validate();
  const double nu_hz = kSpeedOfLight / (ring.resonance_wavelength_nm * 1e-9);
  return nu_hz / ring.quality_factor / 1e9;
}

// Lorentzian intensity at detuning = bin_spacing, relative to the peak.
inline double bin_crosstalk(double linewidth_ghz, double bin_spacing_ghz) {
  if (linewidth_ghz <= 0) throw std::invalid_argument("bin_crosstalk: linewidth must be positive");
  const double x = 2.0 * bin_spacing_ghz / linewidth_ghz;
  return 1.0 / (1.0 + x * x);
}

struct TimeBandwidth {
  double product;
  bool dofs_distinct;  // product > 10
};

inline TimeBandwidth time_bandwidth_product(const PumpParams& pump) {
  pump.validate();
  const double p = pump.rf_frequency_ghz * pump.pulse_width_ns;
  return TimeBandwidth{p, p > 10.0};
}

//------------------------------------------------------------------------------
// Source indistinguishability / noise mapping
//------------------------------------------------------------------------------

// Normalized overlap magnitude of two Lorentzian amplitude line shapes with
// FWHM g1, g2 and center detuning delta: sqrt(g1*g2) / sqrt(((g1+g2)/2)^2 + delta^2).
inline double lorentzian_overlap(double detuning_ghz, double g1_ghz, double g2_ghz) {
  if (g1_ghz <= 0 || g2_ghz <= 0)
    throw std::invalid_argument("lorentzian_overlap: non-positive linewidth");
  const double mean = 0.5 * (g1_ghz + g2_ghz);
  return std::sqrt(g1_ghz * g2_ghz) / std::hypot(mean, detuning_ghz);
}

// mu = |<a1|a2>_s| * |<a1|a2>_i| for the two-ring wavepacket pair.
inline double spectral_indistinguishability(double detuning_s_ghz, double detuning_i_ghz,
                                            double linewidth1_ghz, double linewidth2_ghz) {
  return lorentzian_overlap(detuning_s_ghz, linewidth1_ghz, linewidth2_ghz) *
         lorentzian_overlap(detuning_i_ghz, linewidth1_ghz, linewidth2_ghz);
}

// Accidental fraction modeled as a fully mixed admixture.
inline double car_to_white_noise(double car) {
  if (car <= 0) throw std::invalid_argument("car_to_white_noise: car must be positive");
  return 1.0 / (1.0 + car);
}

//------------------------------------------------------------------------------
// Rate budget
//------------------------------------------------------------------------------

struct PairRateBudget {
  double generated_on_chip_hz;
  double detected_coincidence_hz;
  // Convention: generated = brightness * peak_power^2 * linewidth * duty * n_rings,
  // duty = 2 * t_w * repetition_rate. Detection applies the facet loss once and
  // analyzer loss + detector efficiency per photon.
  static constexpr const char* kConvention =
      "generated = brightness*P^2*linewidth*duty*n_rings (duty = 2*t_w*rep_rate); "
      "detected = generated * 10^(-facet_dB/10) * (10^(-analyzer_dB/10) * det_eff)^2";
};

inline PairRateBudget pair_rate_budget(const PumpParams& pump, const RingParams& ring,
                                       const Budget& budget, int n_rings = 2) {
  pump.validate();
  ring.validate();
  budget.validate();
  const double duty = 2.0 * pump.pulse_width_ns * 1e-9 * pump.repetition_rate_mhz * 1e6;
  const double generated = budget.brightness_hz_per_mw2_ghz * pump.peak_power_mw *
                           pump.peak_power_mw * linewidth_ghz(ring) * duty * n_rings;
  const double facet = std::pow(10.0, -budget.coupling_loss_per_facet_db / 10.0);
  const double per_photon =
      std::pow(10.0, -budget.analyzer_loss_db / 10.0) * budget.detector_efficiency;
  return PairRateBudget{generated, generated * facet * per_photon * per_photon};
}

}  // namespace hesim
