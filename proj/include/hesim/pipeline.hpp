#pragma once

// File-level orchestration of the experiment pipeline:
//   simulate -> counts.csv          (tomography + stabilizer counts)
//   sweep    -> sweep.csv           (phase fringe)
//   tomo     -> reconstruction_{tb,fb}.json
//   metrics  -> merit.json
//   report   -> summary.txt, rho CSVs, fringe CSVs, device_report.json
//
// Every output embeds the canonical JSON config echo, so any stage can be
// re-run from its input file alone and any run can be replayed exactly.

#include "hesim/analyzers.hpp"
#include "hesim/config.hpp"
#include "hesim/counts.hpp"
#include "hesim/device.hpp"
#include "hesim/metrics.hpp"
#include "hesim/state.hpp"
#include "hesim/tomo.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace hesim {

// Fixed random-stream allocation; every sampling site in the pipeline owns a
// disjoint stream of the run seed.
inline constexpr std::uint64_t kStreamTbPlan = 1000;
inline constexpr std::uint64_t kStreamFbPlan = 2000;
inline constexpr std::uint64_t kStreamStabilizers = 3000;
inline constexpr std::uint64_t kStreamSweep = 4000;
inline constexpr std::uint64_t kStreamErrorsTb = 5000;
inline constexpr std::uint64_t kStreamErrorsFb = 5001;

inline const char* kCountsCsvHeader =
    "setting_label,outcome_label,t_s,expected_rate_hz,counts,accidentals";

namespace detail {

inline std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline double wrap_phase(double phi) {
  const double twopi = 2.0 * M_PI;
  double w = std::fmod(phi, twopi);
  if (w < 0) w += twopi;
  return w;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  fields.push_back(cur);
  return fields;
}

inline std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  return out;
}

inline nlohmann::json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IncompletePlanError("missing pipeline artifact '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("corrupt JSON in '" + path + "': " + e.what());
  }
  return j;
}

inline nlohmann::json matrix_to_json(const Matrix& m, bool imag) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      row.push_back(imag ? m(i, j).imag() : m(i, j).real());
    rows.push_back(row);
  }
  return rows;
}

inline Matrix matrix_from_json(const nlohmann::json& re, const nlohmann::json& im) {
  const auto n = Eigen::Index(re.size());
  Matrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      m(i, j) = Complex(re.at(std::size_t(i)).at(std::size_t(j)).get<double>(),
                        im.at(std::size_t(i)).at(std::size_t(j)).get<double>());
  return m;
}

}  // namespace detail

//------------------------------------------------------------------------------
// Counts CSV
//------------------------------------------------------------------------------

struct CountsFile {
  std::vector<CountRecord> records;
  nlohmann::json config_echo;
};

inline void write_counts_csv(const std::string& path, const std::vector<CountRecord>& records,
                             const nlohmann::json& config_echo) {
  auto out = detail::open_output(path);
  out << "# config: " << config_echo.dump() << "\n" << kCountsCsvHeader << "\n";
  for (const auto& r : records)
    out << r.setting_label << ',' << r.outcome_label << ',' << detail::fmt_double(r.integration_s)
        << ',' << detail::fmt_double(r.expected_rate_hz) << ','
        << detail::fmt_double(r.coincidences) << ',' << detail::fmt_double(r.accidentals) << "\n";
}

inline CountsFile read_counts_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IncompletePlanError("missing pipeline artifact '" + path + "'");
  CountsFile cf;
  std::string line;
  if (!std::getline(in, line) || line.rfind("# config: ", 0) != 0)
    throw std::runtime_error("'" + path + "': missing config echo line");
  try {
    cf.config_echo = nlohmann::json::parse(line.substr(10));
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("'" + path + "': corrupt config echo: " + e.what());
  }
  if (!std::getline(in, line) || line != kCountsCsvHeader)
    throw std::runtime_error("'" + path + "': unexpected CSV header");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = detail::split_csv_line(line);
    if (f.size() != 6) throw std::runtime_error("'" + path + "': malformed row: " + line);
    CountRecord r;
    r.setting_label = f[0];
    r.outcome_label = f[1];
    r.integration_s = std::stod(f[2]);
    r.expected_rate_hz = std::stod(f[3]);
    r.coincidences = std::stod(f[4]);
    r.accidentals = std::stod(f[5]);
    cf.records.push_back(std::move(r));
  }
  return cf;
}

//------------------------------------------------------------------------------
// simulate / sweep
//------------------------------------------------------------------------------

namespace detail {

inline AcquisitionOptions acquisition_options(const ExperimentConfig& cfg,
                                              const ResolvedExperiment& rx,
                                              std::uint64_t stream) {
  AcquisitionOptions opts;
  opts.pair_rate_hz = rx.pair_rate_hz;
  opts.integration_s = cfg.integration_s;
  opts.car = rx.car;
  opts.mode = cfg.sampling;
  opts.seed = RunSeed{cfg.seed, stream};
  return opts;
}

}  // namespace detail

// Tomography counts for both DoFs plus the four stabilizer settings.
inline std::string run_simulate(const ExperimentConfig& cfg) {
  const ResolvedExperiment rx = cfg.resolve();
  std::filesystem::create_directories(cfg.out_dir);
  const DensityMatrix rho = noisy_he_state(rx.noise);

  std::vector<CountRecord> all;
  {
    auto opts = detail::acquisition_options(cfg, rx, kStreamTbPlan);
    auto recs = acquire_counts(rho, tomography_plan(Dof::TB, rx.plan), opts);
    all.insert(all.end(), recs.begin(), recs.end());
  }
  {
    auto opts = detail::acquisition_options(cfg, rx, kStreamFbPlan);
    auto recs = acquire_counts(rho, tomography_plan(Dof::FB, rx.plan), opts);
    all.insert(all.end(), recs.begin(), recs.end());
  }
  {
    std::vector<ProjectorSetting> stab_settings;
    for (const auto& m : stabilizer_measurements(rx.plan))
      for (const auto& ps : m.outcomes) stab_settings.push_back(ps);
    auto opts = detail::acquisition_options(cfg, rx, kStreamStabilizers);
    auto recs = acquire_counts(rho, stab_settings, opts);
    all.insert(all.end(), recs.begin(), recs.end());
  }

  const std::string path = (std::filesystem::path(cfg.out_dir) / "counts.csv").string();
  write_counts_csv(path, all, cfg.to_json());
  return path;
}

// Interference fringe: the signal analyzer phase is stepped around the
// circle with the idler phase fixed.
inline std::string run_sweep(const ExperimentConfig& cfg) {
  if (!cfg.sweep)
    throw ConfigError("config: sweep requested but measurement.sweep is missing");
  const ResolvedExperiment rx = cfg.resolve();
  const SweepConfig& sw = *cfg.sweep;
  std::filesystem::create_directories(cfg.out_dir);
  const DensityMatrix rho = noisy_he_state(rx.noise);

  std::vector<ProjectorSetting> settings;
  for (int k = 0; k < sw.n_points; ++k) {
    const double phi = detail::wrap_phase(2.0 * M_PI * k / sw.n_points);
    const double phi_i = detail::wrap_phase(sw.idler_phase);
    std::vector<ProjectorSetting> ps;
    if (sw.dof == Dof::TB) {
      TBSetting setting{Basis::X, Basis::X, phi, phi_i, {-1, -1}};
      ps = tb_projectors(setting);
    } else {
      FBSetting setting;
      setting.basis_s = setting.basis_i = Basis::X;
      setting.rf_on_s = setting.rf_on_i = true;
      setting.rf_phase_s = phi;
      setting.rf_phase_i = phi_i;
      setting.realistic_efficiency = rx.plan.realistic_efficiency;
      ps = fb_projectors(setting);
    }
    if (ps.size() != 1) throw std::logic_error("sweep: expected a single projector per phase");
    ps.front().label = "SWEEP:" + dof_name(sw.dof) + ":phi=" + detail::fmt_double(phi);
    settings.push_back(std::move(ps.front()));
  }

  auto opts = detail::acquisition_options(cfg, rx, kStreamSweep);
  if (sw.integration_s > 0) opts.integration_s = sw.integration_s;
  const auto records = acquire_counts(rho, settings, opts);
  const std::string path = (std::filesystem::path(cfg.out_dir) / "sweep.csv").string();
  write_counts_csv(path, records, cfg.to_json());
  return path;
}

//------------------------------------------------------------------------------
// tomo
//------------------------------------------------------------------------------

namespace detail {

// Plan-complete input for one DoF out of a mixed counts file.
inline TomographyInput dof_tomography_input(const std::vector<ProjectorSetting>& plan,
                                            const std::vector<CountRecord>& records, double car) {
  std::vector<CountRecord> matched;
  for (const auto& ps : plan) {
    const CountRecord* found = nullptr;
    for (const auto& r : records) {
      if (r.setting_label == ps.label) {
        if (found)
          throw IncompletePlanError("counts contain duplicate rows for setting " + ps.label);
        found = &r;
      }
    }
    if (!found) throw IncompletePlanError("counts are missing setting " + ps.label);
    matched.push_back(*found);
  }
  return TomographyInput::from_counts(plan, matched, car);
}

}  // namespace detail

// Reconstruct both DoF marginals from a counts file. The embedded config echo
// supplies the plan options and the CAR, so the CSV alone is sufficient.
inline std::vector<std::string> run_tomo(const std::string& counts_csv,
                                         const std::string& out_dir_override = "",
                                         const MleOptions& opts = {}) {
  const CountsFile cf = read_counts_csv(counts_csv);
  const ExperimentConfig cfg = ExperimentConfig::from_json(cf.config_echo);
  const ResolvedExperiment rx = cfg.resolve();
  const std::string out_dir = out_dir_override.empty() ? cfg.out_dir : out_dir_override;
  std::filesystem::create_directories(out_dir);

  std::vector<std::string> written;
  for (Dof dof : {Dof::TB, Dof::FB}) {
    const auto plan = tomography_plan(dof, rx.plan);
    const TomographyInput input = detail::dof_tomography_input(plan, cf.records, rx.car);
    const ReconstructionResult fit = mle_reconstruct(input, opts);

    nlohmann::json j;
    j["config_echo"] = cf.config_echo;
    j["dof"] = dof_name(dof);
    j["rho_real"] = detail::matrix_to_json(fit.rho_hat.matrix(), false);
    j["rho_imag"] = detail::matrix_to_json(fit.rho_hat.matrix(), true);
    j["log_likelihood"] = fit.log_likelihood;
    j["iterations"] = fit.iterations;
    j["converged"] = fit.converged;
    j["normalization_rate_hz"] = fit.normalization_rate_hz;

    std::string name = dof == Dof::TB ? "reconstruction_tb.json" : "reconstruction_fb.json";
    const std::string path = (std::filesystem::path(out_dir) / name).string();
    detail::open_output(path) << j.dump(2) << "\n";
    written.push_back(path);
  }
  return written;
}

//------------------------------------------------------------------------------
// metrics
//------------------------------------------------------------------------------

namespace detail {

inline DensityMatrix reconstruction_from_json(const nlohmann::json& j) {
  const std::string dof = j.at("dof").get<std::string>();
  return DensityMatrix(matrix_from_json(j.at("rho_real"), j.at("rho_imag")),
                       dof_layout(dof == "TB" ? Dof::TB : Dof::FB));
}

inline std::optional<FringeFit> sweep_visibility(const std::string& out_dir, Dof dof) {
  const std::string path = (std::filesystem::path(out_dir) / "sweep.csv").string();
  if (!std::filesystem::exists(path)) return std::nullopt;
  const CountsFile sf = read_counts_csv(path);
  const std::string prefix = "SWEEP:" + dof_name(dof) + ":phi=";
  std::vector<std::pair<double, double>> samples;
  for (const auto& r : sf.records) {
    if (r.setting_label.rfind(prefix, 0) != 0) continue;
    samples.emplace_back(std::stod(r.setting_label.substr(prefix.size())),
                         r.coincidences / r.integration_s);
  }
  if (samples.size() < 4) return std::nullopt;
  return visibility_from_fringe(samples);
}

}  // namespace detail

// Merit report from the two reconstructions, the stabilizer counts, and the
// Monte-Carlo resampled error bars.
inline std::string run_metrics(const std::string& out_dir) {
  const auto dir = std::filesystem::path(out_dir);
  const nlohmann::json jtb = detail::load_json_file((dir / "reconstruction_tb.json").string());
  const nlohmann::json jfb = detail::load_json_file((dir / "reconstruction_fb.json").string());
  const CountsFile cf = read_counts_csv((dir / "counts.csv").string());
  const ExperimentConfig cfg = ExperimentConfig::from_json(cf.config_echo);
  const ResolvedExperiment rx = cfg.resolve();

  const DensityMatrix rho_tb = detail::reconstruction_from_json(jtb);
  const DensityMatrix rho_fb = detail::reconstruction_from_json(jfb);

  // Stabilizer parities with accidental correction and Poisson errors.
  std::array<double, 4> stabs{};
  ErrorEstimate errors;
  errors.resamples = std::size_t(cfg.resamples);
  {
    const auto measurements = stabilizer_measurements(rx.plan);
    for (std::size_t k = 0; k < measurements.size(); ++k) {
      const auto& m = measurements[k];
      std::vector<CountRecord> recs;
      for (const auto& ps : m.outcomes) {
        const CountRecord* found = nullptr;
        for (const auto& r : cf.records)
          if (r.setting_label == ps.label) found = &r;
        if (!found) throw IncompletePlanError("counts are missing setting " + ps.label);
        recs.push_back(*found);
      }
      const ValueWithStd parity = parity_from_counts(recs, m.signs);
      stabs[k] = parity.value;
      errors.stds["stab." + m.name] = parity.std;
    }
  }

  // Per-DoF error bars by Poisson resampling and refitting.
  for (Dof dof : {Dof::TB, Dof::FB}) {
    const auto plan = tomography_plan(dof, rx.plan);
    const TomographyInput input = detail::dof_tomography_input(plan, cf.records, rx.car);
    const RunSeed seed{cfg.seed, dof == Dof::TB ? kStreamErrorsTb : kStreamErrorsFb};
    const ErrorEstimate dof_errors =
        mc_error(input, standard_merits, std::size_t(cfg.resamples), seed);
    const std::string prefix = dof == Dof::TB ? "tb." : "fb.";
    for (const auto& [key, std_value] : dof_errors.stds) errors.stds[prefix + key] = std_value;
  }

  MeritReport report = merit_report(rho_tb, rho_fb, stabs, errors);
  if (const auto fit = detail::sweep_visibility(out_dir, Dof::TB))
    report.tb.visibility = fit->visibility;
  if (const auto fit = detail::sweep_visibility(out_dir, Dof::FB))
    report.fb.visibility = fit->visibility;

  auto dof_json = [](const DofMerit& m) {
    nlohmann::json j{{"fidelity", m.fidelity},
                     {"fidelity_std", m.fidelity_std},
                     {"purity", m.purity},
                     {"purity_std", m.purity_std},
                     {"s_parameter", m.s_parameter},
                     {"s_std", m.s_std},
                     {"violation_stds_chsh", m.violation_stds_chsh}};
    j["visibility"] = m.visibility ? nlohmann::json(*m.visibility) : nlohmann::json(nullptr);
    return j;
  };
  nlohmann::json j;
  j["config_echo"] = cf.config_echo;
  j["tb"] = dof_json(report.tb);
  j["fb"] = dof_json(report.fb);
  j["stabilizers"] = report.stabilizers;
  j["stabilizer_stds"] = report.stabilizer_stds;
  j["witness"] = report.witness;
  j["witness_std"] = report.witness_std;
  j["violation_stds_witness"] = report.violation_stds_witness;

  const std::string path = (dir / "merit.json").string();
  detail::open_output(path) << j.dump(2) << "\n";
  return path;
}

//------------------------------------------------------------------------------
// report
//------------------------------------------------------------------------------

namespace detail {

inline std::string fmt_fixed(double v, int digits) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

inline void write_matrix_csv(const std::string& path, const Matrix& m, bool imag) {
  auto out = open_output(path);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << fmt_double(imag ? m(i, j).imag() : m(i, j).real());
    }
    out << "\n";
  }
}

}  // namespace detail

// Human-readable summary plus plot-ready data files.
inline std::vector<std::string> run_report(const std::string& out_dir) {
  const auto dir = std::filesystem::path(out_dir);
  const nlohmann::json merit = detail::load_json_file((dir / "merit.json").string());
  const nlohmann::json jtb = detail::load_json_file((dir / "reconstruction_tb.json").string());
  const nlohmann::json jfb = detail::load_json_file((dir / "reconstruction_fb.json").string());
  const ExperimentConfig cfg = ExperimentConfig::from_json(merit.at("config_echo"));
  const ResolvedExperiment rx = cfg.resolve();

  std::vector<std::string> written;

  {  // summary table mirroring the per-DoF merit rows
    const std::string path = (dir / "summary.txt").string();
    auto out = detail::open_output(path);
    out << "hyperentanglement run summary (seed " << cfg.seed << ")\n";
    out << "====================================================\n\n";
    out << "            fidelity            purity              S\n";
    auto row = [&](const char* name, const nlohmann::json& d) {
      out << "  " << name << "   " << detail::fmt_fixed(d.at("fidelity").get<double>(), 3)
          << " +/- " << detail::fmt_fixed(d.at("fidelity_std").get<double>(), 3) << "   "
          << detail::fmt_fixed(d.at("purity").get<double>(), 3) << " +/- "
          << detail::fmt_fixed(d.at("purity_std").get<double>(), 3) << "   "
          << detail::fmt_fixed(d.at("s_parameter").get<double>(), 3) << " +/- "
          << detail::fmt_fixed(d.at("s_std").get<double>(), 3) << "\n";
    };
    row("TB", merit.at("tb"));
    row("FB", merit.at("fb"));
    out << "\nstabilizers:\n";
    for (std::size_t k = 0; k < 4; ++k)
      out << "  " << kStabilizerNames[k] << "  "
          << detail::fmt_fixed(merit.at("stabilizers").at(k).get<double>(), 3) << " +/- "
          << detail::fmt_fixed(merit.at("stabilizer_stds").at(k).get<double>(), 3) << "\n";
    out << "\nwitness: " << detail::fmt_fixed(merit.at("witness").get<double>(), 3) << " +/- "
        << detail::fmt_fixed(merit.at("witness_std").get<double>(), 3);
    if (merit.at("violation_stds_witness").is_number())
      out << "  (" << detail::fmt_fixed(merit.at("violation_stds_witness").get<double>(), 1)
          << " STDs below 0)";
    out << "\n";
    auto chsh_line = [&](const char* name, const nlohmann::json& d) {
      if (d.at("violation_stds_chsh").is_number())
        out << "CHSH " << name << ": "
            << detail::fmt_fixed(d.at("violation_stds_chsh").get<double>(), 1)
            << " STDs above 2\n";
    };
    chsh_line("TB", merit.at("tb"));
    chsh_line("FB", merit.at("fb"));
    for (const char* name : {"tb", "fb"})
      if (merit.at(name).at("visibility").is_number())
        out << "visibility " << name << ": "
            << detail::fmt_fixed(merit.at(name).at("visibility").get<double>(), 4) << "\n";
    written.push_back(path);
  }

  // density-matrix bar-chart data
  for (const auto& [tag, j] : {std::pair<const char*, const nlohmann::json*>{"tb", &jtb},
                               {"fb", &jfb}}) {
    const Matrix m = detail::matrix_from_json(j->at("rho_real"), j->at("rho_imag"));
    for (bool imag : {false, true}) {
      const std::string path =
          (dir / ("rho_" + std::string(tag) + (imag ? "_imag.csv" : "_real.csv"))).string();
      detail::write_matrix_csv(path, m, imag);
      written.push_back(path);
    }
  }

  // fringe plot data, one row per swept phase, with the fitted curve
  for (Dof dof : {Dof::TB, Dof::FB}) {
    const std::string sweep_path = (dir / "sweep.csv").string();
    if (!std::filesystem::exists(sweep_path)) break;
    const CountsFile sf = read_counts_csv(sweep_path);
    const std::string prefix = "SWEEP:" + dof_name(dof) + ":phi=";
    std::vector<std::pair<double, double>> samples;
    std::vector<const CountRecord*> rows;
    for (const auto& r : sf.records) {
      if (r.setting_label.rfind(prefix, 0) != 0) continue;
      samples.emplace_back(std::stod(r.setting_label.substr(prefix.size())),
                           r.coincidences / r.integration_s);
      rows.push_back(&r);
    }
    if (samples.size() < 4) continue;
    const FringeFit fit = visibility_from_fringe(samples);
    const std::string path = (dir / ("fringe_" + dof_name(dof) + ".csv")).string();
    auto out = detail::open_output(path);
    out << "phase_rad,rate_hz,fit_rate_hz,counts,accidentals,t_s\n";
    for (std::size_t k = 0; k < samples.size(); ++k) {
      const double fitted =
          fit.offset * (1.0 + fit.visibility * std::cos(samples[k].first + fit.phase));
      out << detail::fmt_double(samples[k].first) << ',' << detail::fmt_double(samples[k].second)
          << ',' << detail::fmt_double(fitted) << ',' << detail::fmt_double(rows[k]->coincidences)
          << ',' << detail::fmt_double(rows[k]->accidentals) << ','
          << detail::fmt_double(rows[k]->integration_s) << "\n";
    }
    written.push_back(path);
  }

  {  // device figures, budget conventions, and the flagged spacing claim
    const double lw_s = linewidth_ghz(cfg.ring_signal);
    const double lw_i = linewidth_ghz(cfg.ring_idler);
    const double spacing = cfg.pump.rf_frequency_ghz;
    const double ratio = spacing / lw_s;
    const TimeBandwidth tbp = time_bandwidth_product(cfg.pump);
    const PairRateBudget budget = pair_rate_budget(cfg.pump, cfg.ring_signal, cfg.budget);
    const auto flags = cfg.pump.flags();

    nlohmann::json j;
    j["config_echo"] = cfg.to_json();
    j["fsr_ghz"] = {{"signal", fsr_ghz(cfg.ring_signal)}, {"idler", fsr_ghz(cfg.ring_idler)}};
    j["linewidth_ghz"] = {{"signal", lw_s}, {"idler", lw_i}};
    j["bin_spacing_ghz"] = spacing;
    j["bin_crosstalk"] = bin_crosstalk(lw_s, spacing);
    j["spacing_to_linewidth_ratio"] = ratio;
    // the quoted "100x larger than the linewidth" separation does not hold at
    // Q = 1e5; report the actual ratio and flag the discrepancy
    j["spacing_claim_100x_consistent"] = ratio >= 50.0;
    j["time_bandwidth_product"] = tbp.product;
    j["dofs_distinct"] = tbp.dofs_distinct;
    j["pump_flags"] = {{"delay_exceeds_fc_lifetime", flags.delay_exceeds_fc_lifetime},
                       {"pulse_within_fc_lifetime", flags.pulse_within_fc_lifetime},
                       {"dofs_distinct", flags.dofs_distinct}};
    j["pair_rate_budget"] = {{"generated_on_chip_hz", budget.generated_on_chip_hz},
                             {"detected_coincidence_hz", budget.detected_coincidence_hz},
                             {"convention", PairRateBudget::kConvention},
                             {"configured_pair_rate_hz", rx.pair_rate_hz}};
    j["noise_resolved"] = {{"mu_tb", rx.noise.mu_tb},
                           {"mu_fb", rx.noise.mu_fb},
                           {"p_white", rx.noise.p_white}};
    j["fb_mixing"] = {{"equalization_delta", fb_equalization_delta()},
                      {"efficiency", fb_mixing_efficiency(fb_equalization_delta())}};
    const std::string path = (dir / "device_report.json").string();
    detail::open_output(path) << j.dump(2) << "\n";
    written.push_back(path);
  }

  return written;
}

}  // namespace hesim
