#pragma once

// Coincidence-count model. Expected rates come from the state and the
// realized projectors; measured counts are Poisson draws around them plus an
// accidental floor set by the coincidence-to-accidental ratio (CAR).
//
// Accidental convention: the CAR is quoted against a Bell-peak coincidence
// rate, i.e. a computational-basis outcome of the ideal state, whose signal
// rate is pair_rate * weight / 2. The floor for an outcome with
// post-selection weight w is therefore
//     a = pair_rate * w / (2 * CAR)
// and is the same for every outcome of a setting group.

#include "hesim/analyzers.hpp"
#include "hesim/hilbert.hpp"
#include "hesim/random.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace hesim {

enum class SamplingMode { Poisson, Expected };

struct AcquisitionOptions {
  double pair_rate_hz = 4700.0;
  double integration_s = 10.0;
  double car = 0.0;  // 0 disables the accidental floor
  SamplingMode mode = SamplingMode::Poisson;
  RunSeed seed{};

  void validate() const {
    if (pair_rate_hz < 0) throw std::invalid_argument("AcquisitionOptions: negative pair rate");
    if (integration_s <= 0) throw std::invalid_argument("AcquisitionOptions: integration <= 0");
    if (car < 0) throw std::invalid_argument("AcquisitionOptions: negative CAR");
  }
};

// One acquired number: counts in a setting/outcome cell over t seconds.
// `coincidences` stays real-valued so that expectation-mode acquisitions
// (no shot noise) round-trip exactly.
struct CountRecord {
  std::string setting_label;
  std::string outcome_label;
  double integration_s = 0.0;
  double expected_rate_hz = 0.0;  // signal plus accidental floor
  double coincidences = 0.0;      // integer-valued when Poisson-sampled
  double accidentals = 0.0;       // independently monitored accidental counts
  std::array<int, 2> arrival_bins{-1, -1};
};

inline double expected_coincidence_rate(const DensityMatrix& rho, const ProjectorSetting& s,
                                        double pair_rate_hz) {
  const double p = std::max(0.0, expectation(rho, s.projector));
  return pair_rate_hz * s.weight * p;
}

inline double accidental_rate(double coincidence_rate_hz, double car) {
  if (car <= 0) throw std::invalid_argument("accidental_rate: CAR must be positive");
  return coincidence_rate_hz / car;
}

inline double accidental_floor_hz(double pair_rate_hz, double weight, double car) {
  if (car <= 0) return 0.0;
  return accidental_rate(pair_rate_hz * weight * 0.5, car);
}

// One Poisson draw with mean expected_rate * t; deterministic per seed.
inline long long sample_counts(double expected_rate_hz, double t_s, const RunSeed& seed) {
  if (expected_rate_hz < 0) throw std::invalid_argument("sample_counts: negative rate");
  if (t_s < 0) throw std::invalid_argument("sample_counts: negative time");
  auto engine = make_engine(seed);
  return poisson_draw(engine, expected_rate_hz * t_s);
}

// Acquire every outcome of a plan; outcome k draws from substream k of the
// run seed, so scheduling order cannot change the data.
inline std::vector<CountRecord> acquire_counts(const DensityMatrix& rho,
                                               const std::vector<ProjectorSetting>& settings,
                                               const AcquisitionOptions& opts) {
  opts.validate();
  std::vector<CountRecord> out;
  out.reserve(settings.size());
  for (std::size_t k = 0; k < settings.size(); ++k) {
    const auto& s = settings[k];
    const double signal = expected_coincidence_rate(rho, s, opts.pair_rate_hz);
    const double acc = accidental_floor_hz(opts.pair_rate_hz, s.weight, opts.car);
    CountRecord rec{s.label,      s.outcome, opts.integration_s, signal + acc, 0.0, 0.0,
                    s.arrival_bins};
    const double mean = (signal + acc) * opts.integration_s;
    const double acc_mean = acc * opts.integration_s;
    if (opts.mode == SamplingMode::Expected) {
      rec.coincidences = mean;
      rec.accidentals = acc_mean;
    } else {
      auto engine = make_engine(opts.seed.substream(k));
      rec.coincidences = double(poisson_draw(engine, mean));
      rec.accidentals = double(poisson_draw(engine, acc_mean));
    }
    out.push_back(std::move(rec));
  }
  return out;
}

//------------------------------------------------------------------------------
// Arrival-time histogram (time-bin analyzer diagnostic)
//------------------------------------------------------------------------------

// 3x3 grid over (signal bin, idler bin). Signal lands only in the cells the
// setting's realized projectors select; the accidental floor covers all nine
// cells with the common outcome weight 1/16.
struct ArrivalHistogram {
  std::array<std::array<double, 3>, 3> expected_hz{};
  std::array<std::array<double, 3>, 3> counts{};
  std::array<std::array<double, 3>, 3> accidentals{};

  double total_counts() const {
    double t = 0.0;
    for (const auto& row : counts)
      for (double c : row) t += c;
    return t;
  }
};

inline ArrivalHistogram arrival_histogram(const DensityMatrix& rho, const TBSetting& setting,
                                          const AcquisitionOptions& opts) {
  opts.validate();
  ArrivalHistogram hist;
  for (const auto& ps : tb_projectors(setting)) {
    const auto [bs, bi] = ps.arrival_bins;
    hist.expected_hz[bs][bi] += expected_coincidence_rate(rho, ps, opts.pair_rate_hz);
  }
  const double acc = accidental_floor_hz(opts.pair_rate_hz, kTbOutcomeWeight, opts.car);
  for (int bs = 0; bs < 3; ++bs) {
    for (int bi = 0; bi < 3; ++bi) {
      hist.expected_hz[bs][bi] += acc;
      const double mean = hist.expected_hz[bs][bi] * opts.integration_s;
      const double acc_mean = acc * opts.integration_s;
      if (opts.mode == SamplingMode::Expected) {
        hist.counts[bs][bi] = mean;
        hist.accidentals[bs][bi] = acc_mean;
      } else {
        auto engine = make_engine(opts.seed.substream(std::uint64_t(3 * bs + bi)));
        hist.counts[bs][bi] = double(poisson_draw(engine, mean));
        hist.accidentals[bs][bi] = double(poisson_draw(engine, acc_mean));
      }
    }
  }
  return hist;
}

//------------------------------------------------------------------------------
// Parity estimates from counts
//------------------------------------------------------------------------------

struct ValueWithStd {
  double value = 0.0;
  double std = 0.0;
};

// Accidental-corrected parity <S> = sum_k s_k (n_k - a_k) / sum_k (n_k - a_k)
// with first-order Poisson error propagation (var n_k ~ n_k, var a_k ~ a_k).
inline ValueWithStd parity_from_counts(const std::vector<CountRecord>& records,
                                       const std::vector<int>& signs) {
  if (records.size() != signs.size() || records.empty())
    throw std::invalid_argument("parity_from_counts: records/signs size mismatch");
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < records.size(); ++k) {
    const double m = records[k].coincidences - records[k].accidentals;
    num += signs[k] * m;
    den += m;
  }
  if (den <= 0) throw std::invalid_argument("parity_from_counts: non-positive total");
  const double v = num / den;
  double var = 0.0;
  for (std::size_t k = 0; k < records.size(); ++k) {
    const double dv = (signs[k] - v) / den;
    var += dv * dv * (records[k].coincidences + records[k].accidentals);
  }
  return {v, std::sqrt(var)};
}

}  // namespace hesim
