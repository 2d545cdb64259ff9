#pragma once

// Two-qubit state reconstruction from coincidence counts.
//
// Count model per record k (projector P_k, weight w_k, integration t_k):
//     m_k = r * t_k * w_k * (Tr[rho P_k] + 1/(2*CAR))
// with a single free rate r and the accidental floor implied by a known CAR
// (the floor term drops out when CAR is 0, i.e. accidental-free data).
//
// Two estimators:
//  - linear_inversion: least squares in the Pauli basis after fixing the rate
//    from complete setting groups; fast, unbiased, not necessarily physical;
//  - mle_reconstruct: Poisson maximum likelihood over rho = T T^dag / tr and
//    ln r, with T lower triangular (real diagonal), optimized by L-BFGS with
//    Armijo backtracking. Physical by construction.

#include "hesim/analyzers.hpp"
#include "hesim/counts.hpp"
#include "hesim/hilbert.hpp"
#include "hesim/random.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <deque>
#include <exception>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

namespace hesim {

struct TomographyRecord {
  ProjectorSetting setting;
  double integration_s = 0.0;
  double counts = 0.0;
};

// Validated, label-sorted measurement set. Sorting makes every downstream
// reconstruction independent of acquisition order.
struct TomographyInput {
  std::vector<TomographyRecord> records;
  double car = 0.0;  // 0 = data carry no accidental floor

  void validate_and_sort() {
    if (records.empty()) throw std::invalid_argument("TomographyInput: no records");
    if (car < 0) throw std::invalid_argument("TomographyInput: negative CAR");
    const SubsystemLayout layout = records.front().setting.projector.layout();
    for (const auto& r : records) {
      if (!(r.setting.projector.layout() == layout))
        throw std::invalid_argument("TomographyInput: mixed projector layouts");
      if (r.integration_s <= 0)
        throw std::invalid_argument("TomographyInput: non-positive integration time");
      if (r.setting.weight <= 0)
        throw std::invalid_argument("TomographyInput: non-positive weight");
      if (r.counts < 0) throw std::invalid_argument("TomographyInput: negative counts");
    }
    std::sort(records.begin(), records.end(), [](const auto& a, const auto& b) {
      return a.setting.label < b.setting.label;
    });
  }

  const SubsystemLayout& layout() const { return records.front().setting.projector.layout(); }

  // Match acquired counts to their plan entries by label.
  static TomographyInput from_counts(const std::vector<ProjectorSetting>& plan,
                                     const std::vector<CountRecord>& counts, double car) {
    TomographyInput input;
    input.car = car;
    for (const auto& ps : plan) {
      const CountRecord* found = nullptr;
      for (const auto& c : counts) {
        if (c.setting_label == ps.label) {
          if (found) throw std::invalid_argument("TomographyInput: duplicate label " + ps.label);
          found = &c;
        }
      }
      if (!found) throw std::invalid_argument("TomographyInput: no counts for " + ps.label);
      input.records.push_back({ps, found->integration_s, found->coincidences});
    }
    input.validate_and_sort();
    return input;
  }
};

//------------------------------------------------------------------------------
// Linear inversion
//------------------------------------------------------------------------------

struct LinearEstimate {
  Matrix rho;         // Hermitian, unit trace; may be indefinite
  double rate_hz = 0.0;
};

namespace detail {

inline Matrix pauli_basis_element(int j) {  // j = 4a + b, normalized to Tr[B_i B_j] = delta
  return 0.5 * kron(pauli(j / 4), pauli(j % 4));
}

}  // namespace detail

// Rate from complete setting groups (the projectors of a group resolve the
// identity, so the group total counts pin r independently of the state), then
// least squares for the 15 free Pauli components.
inline LinearEstimate linear_inversion(const TomographyInput& input) {
  const double floor_term = input.car > 0 ? 1.0 / (2.0 * input.car) : 0.0;

  std::map<std::string, std::vector<const TomographyRecord*>> groups;
  for (const auto& r : input.records) groups[r.setting.group].push_back(&r);

  double rate_sum = 0.0;
  int rate_groups = 0;
  for (const auto& [name, recs] : groups) {
    Matrix psum = Matrix::Zero(4, 4);
    double total = 0.0;
    for (const auto* r : recs) {
      psum += r->setting.projector.matrix();
      total += r->counts;
    }
    if ((psum - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff() > 1e-9) continue;
    const double t = recs.front()->integration_s;
    const double w = recs.front()->setting.weight;
    rate_sum += total / (t * w * (1.0 + double(recs.size()) * floor_term));
    ++rate_groups;
  }
  if (rate_groups == 0)
    throw std::invalid_argument("linear_inversion: no complete setting group to fix the rate");
  const double rate = rate_sum / rate_groups;

  const auto K = Eigen::Index(input.records.size());
  Eigen::MatrixXd A(K, 15);
  Eigen::VectorXd b(K);
  for (Eigen::Index k = 0; k < K; ++k) {
    const auto& rec = input.records[std::size_t(k)];
    const Matrix& P = rec.setting.projector.matrix();
    const double phat =
        rec.counts / (rate * rec.integration_s * rec.setting.weight) - floor_term;
    b(k) = phat - 0.25 * P.trace().real();  // remove the fixed trace component
    for (int j = 1; j < 16; ++j)
      A(k, j - 1) = (detail::pauli_basis_element(j) * P).trace().real();
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
  if (qr.rank() < 15)
    throw std::invalid_argument("linear_inversion: measurement set does not determine the state");
  const Eigen::VectorXd c = qr.solve(b);

  Matrix rho = 0.5 * detail::pauli_basis_element(0);
  for (int j = 1; j < 16; ++j) rho += c(j - 1) * detail::pauli_basis_element(j);
  rho = 0.5 * (rho + rho.adjoint().eval());
  return {std::move(rho), rate};
}

// Nearest physical state in the clip-and-renormalize sense: negative
// eigenvalues to zero, trace back to one.
inline DensityMatrix psd_project(const Matrix& rho, const SubsystemLayout& layout) {
  const EigenSystem es = eig_hermitian(Matrix(0.5 * (rho + rho.adjoint())));
  Eigen::VectorXd vals = es.values.cwiseMax(0.0);
  const double total = vals.sum();
  const Eigen::Index d = rho.rows();
  if (total <= 0) return DensityMatrix(Matrix::Identity(d, d) / double(d), layout);
  vals /= total;
  Matrix out = es.vectors * vals.asDiagonal() * es.vectors.adjoint();
  return DensityMatrix(0.5 * (out + out.adjoint().eval()), layout);
}

//------------------------------------------------------------------------------
// Maximum likelihood
//------------------------------------------------------------------------------

struct MleOptions {
  double tol = 1e-10;              // relative log-likelihood improvement
  std::size_t max_iterations = 100000;
  bool warm_start = true;          // start from PSD-projected linear inversion
  int lbfgs_history = 10;
};

struct ReconstructionResult {
  DensityMatrix rho_hat;
  double normalization_rate_hz = 0.0;
  double log_likelihood = 0.0;     // up to the fixed ln(n!) term
  std::size_t iterations = 0;
  bool converged = false;
  std::vector<double> ll_trace;    // log-likelihood after each accepted step
};

namespace detail {

inline constexpr std::array<std::pair<int, int>, 6> kLowerPairs{
    {{1, 0}, {2, 0}, {2, 1}, {3, 0}, {3, 1}, {3, 2}}};

// x(0..3) diagonal (real), x(4..15) lower off-diagonal re/im pairs.
inline Matrix unpack_tri(const Eigen::VectorXd& x) {
  Matrix T = Matrix::Zero(4, 4);
  for (int i = 0; i < 4; ++i) T(i, i) = x(i);
  for (int p = 0; p < 6; ++p)
    T(kLowerPairs[p].first, kLowerPairs[p].second) = Complex(x(4 + 2 * p), x(5 + 2 * p));
  return T;
}

inline void pack_tri(const Matrix& T, Eigen::VectorXd& x) {
  for (int i = 0; i < 4; ++i) x(i) = T(i, i).real();
  for (int p = 0; p < 6; ++p) {
    const Complex v = T(kLowerPairs[p].first, kLowerPairs[p].second);
    x(4 + 2 * p) = v.real();
    x(5 + 2 * p) = v.imag();
  }
}

// Negative log-likelihood and gradient in the 17 real parameters
// (16 for T, last one ln r).
struct MleProblem {
  std::vector<Matrix> projectors;
  std::vector<double> tw;      // t_k * w_k
  std::vector<double> ncounts;
  double floor_term = 0.0;

  explicit MleProblem(const TomographyInput& input) {
    floor_term = input.car > 0 ? 1.0 / (2.0 * input.car) : 0.0;
    for (const auto& r : input.records) {
      projectors.push_back(r.setting.projector.matrix());
      tw.push_back(r.integration_s * r.setting.weight);
      ncounts.push_back(r.counts);
    }
  }

  double eval(const Eigen::VectorXd& x, Eigen::VectorXd* grad) const {
    const Matrix T = unpack_tri(x);
    const double tau = T.squaredNorm();
    if (!(tau > 0)) return std::numeric_limits<double>::infinity();
    const double r = std::exp(x(16));
    const Matrix rho = (T * T.adjoint()) / tau;

    double ll = 0.0;
    double dlnr = 0.0;
    Matrix G = Matrix::Zero(4, 4);
    for (std::size_t k = 0; k < projectors.size(); ++k) {
      const double q = std::max(0.0, (rho * projectors[k]).trace().real());
      const double m = r * tw[k] * (q + floor_term);
      const double n = ncounts[k];
      if (m <= 0.0) {
        if (n > 0.0) return std::numeric_limits<double>::infinity();
        if (grad) G += (-r * tw[k]) * projectors[k];
        continue;
      }
      ll += n * std::log(m) - m;
      if (grad) {
        G += ((n / m - 1.0) * r * tw[k]) * projectors[k];
        dlnr += n - m;
      }
    }
    if (grad) {
      const double trg = (rho * G).trace().real();
      const Matrix W = ((G - trg * Matrix::Identity(4, 4)) * T) / tau;
      grad->resize(17);
      for (int i = 0; i < 4; ++i) (*grad)(i) = -2.0 * W(i, i).real();
      for (int p = 0; p < 6; ++p) {
        const Complex w = W(kLowerPairs[p].first, kLowerPairs[p].second);
        (*grad)(4 + 2 * p) = -2.0 * w.real();
        (*grad)(5 + 2 * p) = -2.0 * w.imag();
      }
      (*grad)(16) = -dlnr;
    }
    return -ll;
  }

  // Rate matching the total counts at a given state.
  double matched_rate(const Matrix& rho) const {
    double nsum = 0.0, msum = 0.0;
    for (std::size_t k = 0; k < projectors.size(); ++k) {
      nsum += ncounts[k];
      msum += tw[k] * (std::max(0.0, (rho * projectors[k]).trace().real()) + floor_term);
    }
    if (nsum <= 0) throw std::invalid_argument("mle_reconstruct: all counts are zero");
    if (msum <= 0) throw std::invalid_argument("mle_reconstruct: degenerate start");
    return nsum / msum;
  }
};

// Cholesky factor of a blend of the state with the maximally mixed one; the
// blend weight escalates until the factorization is numerically sound.
inline Matrix stabilized_cholesky(const Matrix& rho) {
  for (double eps : {1e-10, 1e-8, 1e-6, 1e-4}) {
    const Matrix blend =
        (1.0 - eps) * rho + (eps / double(rho.rows())) * Matrix::Identity(rho.rows(), rho.cols());
    Eigen::LLT<Matrix> llt(blend);
    if (llt.info() == Eigen::Success) return llt.matrixL();
  }
  throw std::runtime_error("mle_reconstruct: warm-start factorization failed");
}

struct LbfgsHistory {
  std::deque<std::pair<Eigen::VectorXd, Eigen::VectorXd>> pairs;  // (s, y)
  int capacity = 10;

  void push(Eigen::VectorXd s, Eigen::VectorXd y) {
    if (s.dot(y) <= 1e-12 * s.norm() * y.norm()) return;
    pairs.emplace_back(std::move(s), std::move(y));
    if (int(pairs.size()) > capacity) pairs.pop_front();
  }

  Eigen::VectorXd direction(const Eigen::VectorXd& g) const {
    Eigen::VectorXd q = g;
    std::vector<double> alpha(pairs.size());
    for (std::size_t i = pairs.size(); i-- > 0;) {
      const auto& [s, y] = pairs[i];
      alpha[i] = s.dot(q) / y.dot(s);
      q -= alpha[i] * y;
    }
    if (!pairs.empty()) {
      const auto& [s, y] = pairs.back();
      q *= s.dot(y) / y.dot(y);
    }
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      const auto& [s, y] = pairs[i];
      const double beta = y.dot(q) / y.dot(s);
      q += (alpha[i] - beta) * s;
    }
    return -q;
  }
};

}  // namespace detail

inline ReconstructionResult mle_reconstruct(const TomographyInput& input,
                                            const MleOptions& opts = {}) {
  const detail::MleProblem problem(input);
  const SubsystemLayout layout = input.layout();

  Eigen::VectorXd x(17);
  bool warm_ok = false;
  if (opts.warm_start) {
    try {
      const LinearEstimate li = linear_inversion(input);
      const DensityMatrix proj = psd_project(li.rho, layout);
      detail::pack_tri(detail::stabilized_cholesky(proj.matrix()), x);
      x(16) = std::log(li.rate_hz > 0 ? li.rate_hz : problem.matched_rate(proj.matrix()));
      warm_ok = true;
    } catch (const std::exception&) {
      warm_ok = false;
    }
  }
  if (!warm_ok) {
    x.setZero();
    for (int i = 0; i < 4; ++i) x(i) = 0.5;  // T = I/2, i.e. the maximally mixed state
    x(16) = std::log(problem.matched_rate(Matrix::Identity(4, 4) / 4.0));
  }

  Eigen::VectorXd g(17), gn(17);
  double f = problem.eval(x, &g);
  if (!std::isfinite(f)) {  // warm start landed on an impossible state
    x.setZero();
    for (int i = 0; i < 4; ++i) x(i) = 0.5;
    x(16) = std::log(problem.matched_rate(Matrix::Identity(4, 4) / 4.0));
    f = problem.eval(x, &g);
  }

  ReconstructionResult result{DensityMatrix(Matrix::Identity(4, 4) / 4.0, layout),
                              0.0, -f, 0, false, {-f}};

  detail::LbfgsHistory history;
  history.capacity = opts.lbfgs_history;
  int small_streak = 0;

  for (std::size_t iter = 0; iter < opts.max_iterations; ++iter) {
    Eigen::VectorXd d = history.direction(g);
    if (d.dot(g) >= 0) {
      history.pairs.clear();
      d = -g;
    }

    bool accepted = false;
    for (int attempt = 0; attempt < 2 && !accepted; ++attempt) {
      double step = (iter == 0 || attempt == 1) ? 1.0 / (1.0 + g.norm()) : 1.0;
      const double slope = g.dot(d);
      for (int back = 0; back < 64; ++back) {
        const Eigen::VectorXd xn = x + step * d;
        const double fn = problem.eval(xn, nullptr);
        if (std::isfinite(fn) && fn <= f + 1e-4 * step * slope) {
          const double fprev = f;
          f = problem.eval(xn, &gn);
          history.push(xn - x, gn - g);
          x = xn;
          g = gn;
          result.ll_trace.push_back(-f);
          const double rel = (fprev - f) / (std::abs(fprev) + 1.0);
          small_streak = rel <= opts.tol ? small_streak + 1 : 0;
          accepted = true;
          break;
        }
        step *= 0.5;
      }
      if (!accepted) {
        history.pairs.clear();
        d = -g;
      }
    }
    result.iterations = iter + 1;
    if (!accepted) {
      result.converged = g.lpNorm<Eigen::Infinity>() <= 1e-7 * (1.0 + std::abs(f));
      break;
    }
    if (small_streak >= 2) {
      result.converged = true;
      break;
    }
  }

  const Matrix T = detail::unpack_tri(x);
  Matrix rho = (T * T.adjoint()) / T.squaredNorm();
  rho = 0.5 * (rho + rho.adjoint().eval());
  result.rho_hat = DensityMatrix(std::move(rho), layout);
  result.normalization_rate_hz = std::exp(x(16));
  result.log_likelihood = -f;
  return result;
}

//------------------------------------------------------------------------------
// Parametric bootstrap errors
//------------------------------------------------------------------------------

struct ErrorEstimate {
  std::map<std::string, double> stds;
  std::size_t resamples = 0;
};

// Re-draws every record as Poisson around its observed count, refits, and
// reports the standard deviation of each metric over the resamples. Resample
// j always uses substream j of `seed`, so results do not depend on the thread
// count.
template <typename MetricFn>
ErrorEstimate mc_error(const TomographyInput& input, MetricFn&& metric_fn,
                       std::size_t n_resamples, RunSeed seed, const MleOptions& opts = {},
                       unsigned n_threads = 0) {
  if (n_resamples < 2) throw std::invalid_argument("mc_error: need at least 2 resamples");
  if (n_threads == 0) n_threads = std::max(1u, std::thread::hardware_concurrency());
  n_threads = std::min<unsigned>(n_threads, unsigned(n_resamples));

  std::vector<std::map<std::string, double>> results(n_resamples);
  std::vector<std::exception_ptr> errors(n_threads);
  std::vector<std::thread> workers;
  for (unsigned w = 0; w < n_threads; ++w) {
    workers.emplace_back([&, w] {
      try {
        for (std::size_t j = w; j < n_resamples; j += n_threads) {
          auto engine = make_engine(seed.substream(j));
          TomographyInput resampled = input;
          for (auto& rec : resampled.records)
            rec.counts = double(poisson_draw(engine, std::max(0.0, rec.counts)));
          const ReconstructionResult fit = mle_reconstruct(resampled, opts);
          results[j] = metric_fn(fit.rho_hat);
        }
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : workers) t.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  ErrorEstimate est;
  est.resamples = n_resamples;
  for (const auto& [key, first_value] : results.front()) {
    (void)first_value;
    double mean = 0.0;
    for (const auto& r : results) mean += r.at(key);
    mean /= double(n_resamples);
    double var = 0.0;
    for (const auto& r : results) {
      const double d = r.at(key) - mean;
      var += d * d;
    }
    est.stds[key] = std::sqrt(var / double(n_resamples - 1));
  }
  return est;
}

}  // namespace hesim
