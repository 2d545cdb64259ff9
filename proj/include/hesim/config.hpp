#pragma once

// Declarative experiment configuration: strict-schema JSON in, resolved
// physics parameters out. Unknown keys are errors; "derive" flags pull noise
// and rate values from the device model.

#include "hesim/counts.hpp"
#include "hesim/device.hpp"
#include "hesim/state.hpp"

#include <json.hpp>

#include <cstdint>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>

namespace hesim {

// Exit-code contract of the command-line tool: 2 / 3 / 4.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class DeriveError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class IncompletePlanError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A number that may instead be the literal string "derive".
struct DeriveValue {
  bool derive = false;
  double value = 0.0;
};

struct SweepConfig {
  Dof dof = Dof::TB;
  int n_points = 13;
  double idler_phase = 0.0;
  double integration_s = 0.0;  // 0 = inherit the measurement integration time
};

namespace detail {

using nlohmann::json;

inline const json& section(const json& root, const char* key) {
  if (!root.contains(key))
    throw ConfigError(std::string("config: missing section '") + key + "'");
  const json& s = root.at(key);
  if (!s.is_object())
    throw ConfigError(std::string("config: section '") + key + "' must be an object");
  return s;
}

inline void reject_unknown(const json& obj, const std::string& where,
                           std::initializer_list<const char*> known) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const char* k : known)
      if (it.key() == k) {
        ok = true;
        break;
      }
    if (!ok) throw ConfigError("config: unknown key '" + where + "." + it.key() + "'");
  }
}

inline double get_num(const json& obj, const std::string& where, const char* key,
                      double fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number()) throw ConfigError("config: '" + where + "." + key + "' must be a number");
  return v.get<double>();
}

inline double require_num(const json& obj, const std::string& where, const char* key) {
  if (!obj.contains(key)) throw ConfigError("config: missing '" + where + "." + key + "'");
  return get_num(obj, where, key, 0.0);
}

inline bool get_bool(const json& obj, const std::string& where, const char* key, bool fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_boolean()) throw ConfigError("config: '" + where + "." + key + "' must be a boolean");
  return v.get<bool>();
}

inline std::string get_str(const json& obj, const std::string& where, const char* key,
                           const std::string& fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_string()) throw ConfigError("config: '" + where + "." + key + "' must be a string");
  return v.get<std::string>();
}

inline DeriveValue require_derivable(const json& obj, const std::string& where, const char* key) {
  if (!obj.contains(key)) throw ConfigError("config: missing '" + where + "." + key + "'");
  const json& v = obj.at(key);
  if (v.is_number()) return {false, v.get<double>()};
  if (v.is_string() && v.get<std::string>() == "derive") return {true, 0.0};
  throw ConfigError("config: '" + where + "." + key + "' must be a number or \"derive\"");
}

inline json derivable_json(const DeriveValue& v) {
  if (v.derive) return json("derive");
  return json(v.value);
}

}  // namespace detail

// Resolved physics parameters fed to the sampling pipeline.
struct ResolvedExperiment {
  NoiseParams noise;
  double pair_rate_hz = 0.0;
  double car = 0.0;  // 0 = accidental-free
  PlanOptions plan;
};

struct ExperimentConfig {
  // device
  RingParams ring_signal;
  RingParams ring_idler;
  PumpParams pump;
  Budget budget;
  // noise
  DeriveValue mu_tb{false, 1.0};
  DeriveValue mu_fb{false, 1.0};
  DeriveValue p_white{false, 0.0};
  std::optional<double> detuning_s_ghz;
  std::optional<double> detuning_i_ghz;
  // measurement
  double integration_s = 10.0;
  DeriveValue pair_rate_hz{false, 4700.0};
  DeriveValue car{false, 0.0};
  SamplingMode sampling = SamplingMode::Poisson;
  bool realistic_efficiency = false;
  std::optional<SweepConfig> sweep;
  // run
  std::uint64_t seed = 0;
  int resamples = 100;
  std::string out_dir = "out";

  static ExperimentConfig from_json(const nlohmann::json& root);
  static ExperimentConfig load(const std::string& path);
  nlohmann::json to_json() const;
  ResolvedExperiment resolve() const;
};

inline ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& root) {
  using detail::get_bool;
  using detail::get_num;
  using detail::get_str;
  using detail::reject_unknown;
  using detail::require_derivable;
  using detail::require_num;
  using detail::section;

  if (!root.is_object()) throw ConfigError("config: top level must be an object");
  reject_unknown(root, "$", {"device", "noise", "measurement", "run"});

  ExperimentConfig cfg;

  const auto& dev = section(root, "device");
  reject_unknown(dev, "device", {"ring_signal", "ring_idler", "pump", "budget"});
  auto parse_ring = [&](const char* key) {
    RingParams ring;
    if (!dev.contains(key)) return ring;
    const auto& r = dev.at(key);
    const std::string where = std::string("device.") + key;
    reject_unknown(r, where,
                   {"radius_um", "group_index", "quality_factor", "resonance_wavelength_nm"});
    ring.radius_um = get_num(r, where, "radius_um", ring.radius_um);
    ring.group_index = get_num(r, where, "group_index", ring.group_index);
    ring.quality_factor = get_num(r, where, "quality_factor", ring.quality_factor);
    ring.resonance_wavelength_nm =
        get_num(r, where, "resonance_wavelength_nm", ring.resonance_wavelength_nm);
    return ring;
  };
  cfg.ring_signal = parse_ring("ring_signal");
  cfg.ring_idler = parse_ring("ring_idler");
  if (dev.contains("pump")) {
    const auto& p = dev.at("pump");
    reject_unknown(p, "device.pump",
                   {"wavelength_nm", "pulse_width_ns", "bin_delay_ns", "repetition_rate_mhz",
                    "peak_power_mw", "rf_frequency_ghz", "free_carrier_lifetime_ns"});
    auto& pp = cfg.pump;
    pp.wavelength_nm = get_num(p, "device.pump", "wavelength_nm", pp.wavelength_nm);
    pp.pulse_width_ns = get_num(p, "device.pump", "pulse_width_ns", pp.pulse_width_ns);
    pp.bin_delay_ns = get_num(p, "device.pump", "bin_delay_ns", pp.bin_delay_ns);
    pp.repetition_rate_mhz =
        get_num(p, "device.pump", "repetition_rate_mhz", pp.repetition_rate_mhz);
    pp.peak_power_mw = get_num(p, "device.pump", "peak_power_mw", pp.peak_power_mw);
    pp.rf_frequency_ghz = get_num(p, "device.pump", "rf_frequency_ghz", pp.rf_frequency_ghz);
    pp.free_carrier_lifetime_ns =
        get_num(p, "device.pump", "free_carrier_lifetime_ns", pp.free_carrier_lifetime_ns);
  }
  if (dev.contains("budget")) {
    const auto& b = dev.at("budget");
    reject_unknown(b, "device.budget",
                   {"brightness_hz_per_mw2_ghz", "coupling_loss_per_facet_db", "analyzer_loss_db",
                    "detector_efficiency", "coincidence_window_ns", "car"});
    auto& bb = cfg.budget;
    bb.brightness_hz_per_mw2_ghz =
        get_num(b, "device.budget", "brightness_hz_per_mw2_ghz", bb.brightness_hz_per_mw2_ghz);
    bb.coupling_loss_per_facet_db =
        get_num(b, "device.budget", "coupling_loss_per_facet_db", bb.coupling_loss_per_facet_db);
    bb.analyzer_loss_db = get_num(b, "device.budget", "analyzer_loss_db", bb.analyzer_loss_db);
    bb.detector_efficiency =
        get_num(b, "device.budget", "detector_efficiency", bb.detector_efficiency);
    bb.coincidence_window_ns =
        get_num(b, "device.budget", "coincidence_window_ns", bb.coincidence_window_ns);
    bb.car = get_num(b, "device.budget", "car", bb.car);
  }

  const auto& noise = section(root, "noise");
  reject_unknown(noise, "noise",
                 {"mu_tb", "mu_fb", "p_white", "detuning_s_ghz", "detuning_i_ghz"});
  cfg.mu_tb = require_derivable(noise, "noise", "mu_tb");
  cfg.mu_fb = require_derivable(noise, "noise", "mu_fb");
  cfg.p_white = require_derivable(noise, "noise", "p_white");
  if (noise.contains("detuning_s_ghz"))
    cfg.detuning_s_ghz = require_num(noise, "noise", "detuning_s_ghz");
  if (noise.contains("detuning_i_ghz"))
    cfg.detuning_i_ghz = require_num(noise, "noise", "detuning_i_ghz");

  const auto& meas = section(root, "measurement");
  reject_unknown(meas, "measurement",
                 {"integration_s", "pair_rate_hz", "car", "sampling", "realistic_efficiency",
                  "sweep"});
  cfg.integration_s = require_num(meas, "measurement", "integration_s");
  if (cfg.integration_s <= 0) throw ConfigError("config: measurement.integration_s must be > 0");
  cfg.pair_rate_hz = require_derivable(meas, "measurement", "pair_rate_hz");
  if (!cfg.pair_rate_hz.derive && cfg.pair_rate_hz.value < 0)
    throw ConfigError("config: measurement.pair_rate_hz must be >= 0");
  cfg.car = require_derivable(meas, "measurement", "car");
  if (!cfg.car.derive && cfg.car.value < 0)
    throw ConfigError("config: measurement.car must be >= 0");
  const std::string sampling = get_str(meas, "measurement", "sampling", "");
  if (sampling == "poisson")
    cfg.sampling = SamplingMode::Poisson;
  else if (sampling == "expected")
    cfg.sampling = SamplingMode::Expected;
  else
    throw ConfigError("config: measurement.sampling must be \"poisson\" or \"expected\"");
  cfg.realistic_efficiency = get_bool(meas, "measurement", "realistic_efficiency", false);
  if (meas.contains("sweep")) {
    const auto& sw = meas.at("sweep");
    reject_unknown(sw, "measurement.sweep",
                   {"dof", "n_points", "idler_phase", "integration_s"});
    SweepConfig sweep;
    const std::string dof = get_str(sw, "measurement.sweep", "dof", "TB");
    if (dof == "TB")
      sweep.dof = Dof::TB;
    else if (dof == "FB")
      sweep.dof = Dof::FB;
    else
      throw ConfigError("config: measurement.sweep.dof must be \"TB\" or \"FB\"");
    sweep.n_points = int(get_num(sw, "measurement.sweep", "n_points", 13));
    if (sweep.n_points < 4)
      throw ConfigError("config: measurement.sweep.n_points must be >= 4");
    sweep.idler_phase = get_num(sw, "measurement.sweep", "idler_phase", 0.0);
    sweep.integration_s = get_num(sw, "measurement.sweep", "integration_s", 0.0);
    cfg.sweep = sweep;
  }

  const auto& run = section(root, "run");
  reject_unknown(run, "run", {"seed", "resamples", "out_dir"});
  if (!run.contains("seed")) throw ConfigError("config: missing 'run.seed'");
  if (!run.at("seed").is_number_integer() && !run.at("seed").is_number_unsigned())
    throw ConfigError("config: 'run.seed' must be an integer");
  if (run.at("seed").is_number_integer() && run.at("seed").get<std::int64_t>() < 0)
    throw ConfigError("config: 'run.seed' must be non-negative");
  cfg.seed = run.at("seed").get<std::uint64_t>();
  cfg.resamples = int(get_num(run, "run", "resamples", 100));
  if (cfg.resamples < 100) throw ConfigError("config: run.resamples must be >= 100");
  cfg.out_dir = get_str(run, "run", "out_dir", "out");

  try {
    cfg.ring_signal.validate();
    cfg.ring_idler.validate();
    cfg.pump.validate();
    cfg.budget.validate();
    if (!cfg.mu_tb.derive && (cfg.mu_tb.value < 0 || cfg.mu_tb.value > 1))
      throw std::invalid_argument("noise.mu_tb outside [0,1]");
    if (!cfg.mu_fb.derive && (cfg.mu_fb.value < 0 || cfg.mu_fb.value > 1))
      throw std::invalid_argument("noise.mu_fb outside [0,1]");
    if (!cfg.p_white.derive && (cfg.p_white.value < 0 || cfg.p_white.value >= 1))
      throw std::invalid_argument("noise.p_white outside [0,1)");
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return cfg;
}

inline ExperimentConfig ExperimentConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  nlohmann::json root;
  try {
    in >> root;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: JSON parse error: ") + e.what());
  }
  return from_json(root);
}

inline nlohmann::json ExperimentConfig::to_json() const {
  using detail::derivable_json;
  nlohmann::json root;
  root["device"]["ring_signal"] = {{"radius_um", ring_signal.radius_um},
                                   {"group_index", ring_signal.group_index},
                                   {"quality_factor", ring_signal.quality_factor},
                                   {"resonance_wavelength_nm", ring_signal.resonance_wavelength_nm}};
  root["device"]["ring_idler"] = {{"radius_um", ring_idler.radius_um},
                                  {"group_index", ring_idler.group_index},
                                  {"quality_factor", ring_idler.quality_factor},
                                  {"resonance_wavelength_nm", ring_idler.resonance_wavelength_nm}};
  root["device"]["pump"] = {{"wavelength_nm", pump.wavelength_nm},
                            {"pulse_width_ns", pump.pulse_width_ns},
                            {"bin_delay_ns", pump.bin_delay_ns},
                            {"repetition_rate_mhz", pump.repetition_rate_mhz},
                            {"peak_power_mw", pump.peak_power_mw},
                            {"rf_frequency_ghz", pump.rf_frequency_ghz},
                            {"free_carrier_lifetime_ns", pump.free_carrier_lifetime_ns}};
  root["device"]["budget"] = {{"brightness_hz_per_mw2_ghz", budget.brightness_hz_per_mw2_ghz},
                              {"coupling_loss_per_facet_db", budget.coupling_loss_per_facet_db},
                              {"analyzer_loss_db", budget.analyzer_loss_db},
                              {"detector_efficiency", budget.detector_efficiency},
                              {"coincidence_window_ns", budget.coincidence_window_ns},
                              {"car", budget.car}};
  root["noise"]["mu_tb"] = derivable_json(mu_tb);
  root["noise"]["mu_fb"] = derivable_json(mu_fb);
  root["noise"]["p_white"] = derivable_json(p_white);
  if (detuning_s_ghz) root["noise"]["detuning_s_ghz"] = *detuning_s_ghz;
  if (detuning_i_ghz) root["noise"]["detuning_i_ghz"] = *detuning_i_ghz;
  root["measurement"]["integration_s"] = integration_s;
  root["measurement"]["pair_rate_hz"] = derivable_json(pair_rate_hz);
  root["measurement"]["car"] = derivable_json(car);
  root["measurement"]["sampling"] =
      sampling == SamplingMode::Poisson ? "poisson" : "expected";
  root["measurement"]["realistic_efficiency"] = realistic_efficiency;
  if (sweep) {
    root["measurement"]["sweep"] = {{"dof", dof_name(sweep->dof)},
                                    {"n_points", sweep->n_points},
                                    {"idler_phase", sweep->idler_phase},
                                    {"integration_s", sweep->integration_s}};
  }
  root["run"]["seed"] = seed;
  root["run"]["resamples"] = resamples;
  root["run"]["out_dir"] = out_dir;
  return root;
}

inline ResolvedExperiment ExperimentConfig::resolve() const {
  ResolvedExperiment r;
  if (mu_tb.derive)
    throw DeriveError(
        "noise.mu_tb: no device derivation exists for the time-bin coherence; "
        "set it explicitly (the measured fringe visibility)");
  r.noise.mu_tb = mu_tb.value;
  if (mu_fb.derive) {
    if (!detuning_s_ghz || !detuning_i_ghz)
      throw DeriveError(
          "noise.mu_fb: derive requires noise.detuning_s_ghz and noise.detuning_i_ghz");
    r.noise.mu_fb =
        spectral_indistinguishability(*detuning_s_ghz, *detuning_i_ghz,
                                      linewidth_ghz(ring_signal), linewidth_ghz(ring_idler));
  } else {
    r.noise.mu_fb = mu_fb.value;
  }
  r.noise.p_white = p_white.derive ? car_to_white_noise(budget.car) : p_white.value;
  r.noise.validate();
  r.pair_rate_hz = pair_rate_hz.derive
                       ? pair_rate_budget(pump, ring_signal, budget).detected_coincidence_hz
                       : pair_rate_hz.value;
  r.car = car.derive ? budget.car : car.value;
  r.plan.realistic_efficiency = realistic_efficiency;
  return r;
}

}  // namespace hesim
