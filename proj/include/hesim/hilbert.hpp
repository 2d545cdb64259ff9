#pragma once

// Exact finite-dimensional quantum-state algebra on labeled qubit registers.
// Dimensions in this project are 2, 4 and 16; everything is dense.

#include <Eigen/Dense>

#include <algorithm>
#include <complex>
#include <cstdint>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace hesim {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline constexpr double kHermitianTol = 1e-10;
inline constexpr double kTraceTol = 1e-10;
inline constexpr double kMinEigTol = -1e-9;
inline constexpr double kNormTol = 1e-12;

// Ordered list of qubit subsystems. The first label is the most significant
// bit of the computational-basis index.
class SubsystemLayout {
 public:
  SubsystemLayout() = default;
  SubsystemLayout(std::initializer_list<std::string> labels)
      : SubsystemLayout(std::vector<std::string>(labels)) {}
  explicit SubsystemLayout(std::vector<std::string> labels) : labels_(std::move(labels)) {
    for (std::size_t a = 0; a < labels_.size(); ++a)
      for (std::size_t b = a + 1; b < labels_.size(); ++b)
        if (labels_[a] == labels_[b])
          throw std::invalid_argument("SubsystemLayout: duplicate label '" + labels_[a] + "'");
  }

  std::size_t size() const { return labels_.size(); }
  Eigen::Index dim() const { return Eigen::Index(1) << labels_.size(); }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::string& label(std::size_t i) const { return labels_.at(i); }

  bool contains(const std::string& label) const {
    return std::find(labels_.begin(), labels_.end(), label) != labels_.end();
  }
  std::size_t position(const std::string& label) const {
    auto it = std::find(labels_.begin(), labels_.end(), label);
    if (it == labels_.end())
      throw std::invalid_argument("SubsystemLayout: unknown label '" + label + "'");
    return std::size_t(it - labels_.begin());
  }

  // Concatenation used by tensor products; label collisions are an error.
  SubsystemLayout concat(const SubsystemLayout& other) const {
    std::vector<std::string> merged = labels_;
    for (const auto& l : other.labels_) {
      if (contains(l)) throw std::invalid_argument("tensor: label collision on '" + l + "'");
      merged.push_back(l);
    }
    return SubsystemLayout(std::move(merged));
  }

  friend bool operator==(const SubsystemLayout& a, const SubsystemLayout& b) {
    return a.labels_ == b.labels_;
  }

 private:
  std::vector<std::string> labels_;
};

namespace detail {

inline bool is_hermitian(const Matrix& m, double tol) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

// Bit of `index` belonging to subsystem `pos` (pos 0 = MSB) out of `n` qubits.
inline int bit_at(Eigen::Index index, std::size_t pos, std::size_t n) {
  return int((index >> (n - 1 - pos)) & 1);
}

inline Eigen::Index set_bit(Eigen::Index index, std::size_t pos, std::size_t n, int value) {
  const Eigen::Index mask = Eigen::Index(1) << (n - 1 - pos);
  return value ? (index | mask) : (index & ~mask);
}

}  // namespace detail

// Normalized pure state.
class Ket {
 public:
  Ket(Vector amplitudes, SubsystemLayout layout)
      : amp_(std::move(amplitudes)), layout_(std::move(layout)) {
    if (amp_.size() != layout_.dim())
      throw std::invalid_argument("Ket: amplitude size does not match layout dimension");
    if (std::abs(amp_.squaredNorm() - 1.0) > kNormTol)
      throw std::invalid_argument("Ket: state is not normalized");
  }

  const Vector& amplitudes() const { return amp_; }
  const SubsystemLayout& layout() const { return layout_; }
  Eigen::Index dim() const { return amp_.size(); }

 private:
  Vector amp_;
  SubsystemLayout layout_;
};

// Hermitian, unit-trace, positive-semidefinite operator. Invariants are
// checked on construction; every state produced anywhere in the project goes
// through this gate.
class DensityMatrix {
 public:
  DensityMatrix(Matrix m, SubsystemLayout layout)
      : m_(std::move(m)), layout_(std::move(layout)) {
    if (m_.rows() != m_.cols() || m_.rows() != layout_.dim())
      throw std::invalid_argument("DensityMatrix: shape does not match layout");
    if (!detail::is_hermitian(m_, kHermitianTol))
      throw std::invalid_argument("DensityMatrix: not Hermitian");
    if (std::abs(m_.trace().real() - 1.0) > kTraceTol)
      throw std::invalid_argument("DensityMatrix: trace != 1");
    Eigen::SelfAdjointEigenSolver<Matrix> es(m_, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < kMinEigTol)
      throw std::invalid_argument("DensityMatrix: negative eigenvalue beyond tolerance");
  }

  static DensityMatrix pure(const Ket& psi) {
    return DensityMatrix(psi.amplitudes() * psi.amplitudes().adjoint(), psi.layout());
  }

  const Matrix& matrix() const { return m_; }
  const SubsystemLayout& layout() const { return layout_; }
  Eigen::Index dim() const { return m_.rows(); }

 private:
  Matrix m_;
  SubsystemLayout layout_;
};

// Hermitian operator (not necessarily PSD or normalized).
class Observable {
 public:
  Observable(Matrix m, SubsystemLayout layout)
      : m_(std::move(m)), layout_(std::move(layout)) {
    if (m_.rows() != m_.cols() || m_.rows() != layout_.dim())
      throw std::invalid_argument("Observable: shape does not match layout");
    if (!detail::is_hermitian(m_, kHermitianTol))
      throw std::invalid_argument("Observable: not Hermitian");
  }

  const Matrix& matrix() const { return m_; }
  const SubsystemLayout& layout() const { return layout_; }
  Eigen::Index dim() const { return m_.rows(); }

 private:
  Matrix m_;
  SubsystemLayout layout_;
};

//------------------------------------------------------------------------------
// Tensor products
//------------------------------------------------------------------------------

inline Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

inline Vector kron(const Vector& a, const Vector& b) {
  Vector out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

inline Ket tensor(const Ket& a, const Ket& b) {
  return Ket(kron(a.amplitudes(), b.amplitudes()), a.layout().concat(b.layout()));
}

inline DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b) {
  return DensityMatrix(kron(a.matrix(), b.matrix()), a.layout().concat(b.layout()));
}

inline Observable tensor(const Observable& a, const Observable& b) {
  return Observable(kron(a.matrix(), b.matrix()), a.layout().concat(b.layout()));
}

//------------------------------------------------------------------------------
// Partial trace / embedding
//------------------------------------------------------------------------------

// Reduced state on the subsystems in `keep` (given in the order they should
// appear in the output layout). Trace is preserved.
inline DensityMatrix partial_trace(const DensityMatrix& rho,
                                   const std::vector<std::string>& keep) {
  if (keep.empty()) throw std::invalid_argument("partial_trace: empty keep set");
  const auto& layout = rho.layout();
  const std::size_t n = layout.size();
  std::vector<std::size_t> keep_pos;
  keep_pos.reserve(keep.size());
  for (const auto& l : keep) keep_pos.push_back(layout.position(l));

  std::vector<std::size_t> traced_pos;
  for (std::size_t p = 0; p < n; ++p)
    if (std::find(keep_pos.begin(), keep_pos.end(), p) == keep_pos.end()) traced_pos.push_back(p);

  const std::size_t nk = keep_pos.size();
  const Eigen::Index dk = Eigen::Index(1) << nk;
  const Eigen::Index dt = Eigen::Index(1) << traced_pos.size();
  Matrix out = Matrix::Zero(dk, dk);
  for (Eigen::Index i = 0; i < dk; ++i) {
    for (Eigen::Index j = 0; j < dk; ++j) {
      Complex sum = 0.0;
      for (Eigen::Index t = 0; t < dt; ++t) {
        Eigen::Index fi = 0, fj = 0;
        for (std::size_t q = 0; q < nk; ++q) {
          fi = detail::set_bit(fi, keep_pos[q], n, detail::bit_at(i, q, nk));
          fj = detail::set_bit(fj, keep_pos[q], n, detail::bit_at(j, q, nk));
        }
        for (std::size_t q = 0; q < traced_pos.size(); ++q) {
          const int tv = detail::bit_at(t, q, traced_pos.size());
          fi = detail::set_bit(fi, traced_pos[q], n, tv);
          fj = detail::set_bit(fj, traced_pos[q], n, tv);
        }
        sum += rho.matrix()(fi, fj);
      }
      out(i, j) = sum;
    }
  }
  return DensityMatrix(std::move(out), SubsystemLayout(keep));
}

// Extend an observable acting on a subset of labels by identity on the rest.
inline Observable embed(const Observable& obs, const SubsystemLayout& full) {
  const auto& sub = obs.layout();
  const std::size_t n = full.size();
  const std::size_t ns = sub.size();
  std::vector<std::size_t> pos;
  pos.reserve(ns);
  for (const auto& l : sub.labels()) pos.push_back(full.position(l));

  std::vector<std::size_t> rest;
  for (std::size_t p = 0; p < n; ++p)
    if (std::find(pos.begin(), pos.end(), p) == pos.end()) rest.push_back(p);

  const Eigen::Index ds = sub.dim();
  const Eigen::Index dr = Eigen::Index(1) << rest.size();
  Matrix out = Matrix::Zero(full.dim(), full.dim());
  for (Eigen::Index a = 0; a < ds; ++a) {
    for (Eigen::Index b = 0; b < ds; ++b) {
      const Complex v = obs.matrix()(a, b);
      if (v == Complex(0.0)) continue;
      for (Eigen::Index r = 0; r < dr; ++r) {
        Eigen::Index fi = 0, fj = 0;
        for (std::size_t q = 0; q < ns; ++q) {
          fi = detail::set_bit(fi, pos[q], n, detail::bit_at(a, q, ns));
          fj = detail::set_bit(fj, pos[q], n, detail::bit_at(b, q, ns));
        }
        for (std::size_t q = 0; q < rest.size(); ++q) {
          const int rv = detail::bit_at(r, q, rest.size());
          fi = detail::set_bit(fi, rest[q], n, rv);
          fj = detail::set_bit(fj, rest[q], n, rv);
        }
        out(fi, fj) = v;
      }
    }
  }
  return Observable(std::move(out), full);
}

//------------------------------------------------------------------------------
// Scalar functionals
//------------------------------------------------------------------------------

inline double expectation(const DensityMatrix& rho, const Observable& obs) {
  if (!(rho.layout() == obs.layout())) {
    // Allow observables on a label subset; they act as identity elsewhere.
    if (obs.layout().size() < rho.layout().size())
      return expectation(rho, embed(obs, rho.layout()));
    throw std::invalid_argument("expectation: layout mismatch");
  }
  return (rho.matrix() * obs.matrix()).trace().real();
}

inline double fidelity_pure(const DensityMatrix& rho, const Ket& target) {
  if (rho.dim() != target.dim())
    throw std::invalid_argument("fidelity_pure: dimension mismatch");
  const Complex v =
      (target.amplitudes().adjoint() * rho.matrix() * target.amplitudes())(0, 0);
  return v.real();
}

inline double purity(const DensityMatrix& rho) {
  return (rho.matrix() * rho.matrix()).trace().real();
}

struct EigenSystem {
  Eigen::VectorXd values;  // sorted descending
  Matrix vectors;          // columns matching `values`
};

inline EigenSystem eig_hermitian(const Matrix& m) {
  if (!detail::is_hermitian(m, kHermitianTol))
    throw std::invalid_argument("eig_hermitian: input is not Hermitian");
  Eigen::SelfAdjointEigenSolver<Matrix> es(m);
  const Eigen::Index d = m.rows();
  EigenSystem out;
  out.values.resize(d);
  out.vectors.resize(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {  // Eigen sorts ascending; flip
    out.values(i) = es.eigenvalues()(d - 1 - i);
    out.vectors.col(i) = es.eigenvectors().col(d - 1 - i);
  }
  return out;
}

inline EigenSystem eig_hermitian(const Observable& obs) { return eig_hermitian(obs.matrix()); }

//------------------------------------------------------------------------------
// Pauli operators
//------------------------------------------------------------------------------

inline Matrix pauli_i() { return Matrix::Identity(2, 2); }
inline Matrix pauli_x() {
  Matrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}
inline Matrix pauli_y() {
  Matrix m(2, 2);
  m << Complex(0, 0), Complex(0, -1), Complex(0, 1), Complex(0, 0);
  return m;
}
inline Matrix pauli_z() {
  Matrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

// sigma_a (x) sigma_b on a labeled pair; a,b in {0:I, 1:X, 2:Y, 3:Z}.
inline Matrix pauli(int a) {
  switch (a) {
    case 0: return pauli_i();
    case 1: return pauli_x();
    case 2: return pauli_y();
    case 3: return pauli_z();
    default: throw std::invalid_argument("pauli: index out of range");
  }
}

inline Observable pauli_pair(int a, int b, const SubsystemLayout& pair_layout) {
  if (pair_layout.size() != 2) throw std::invalid_argument("pauli_pair: need a 2-label layout");
  return Observable(kron(pauli(a), pauli(b)), pair_layout);
}

inline double frobenius_norm(const Matrix& m) { return m.norm(); }

// 0.5 * ||a - b||_1 for Hermitian a, b.
inline double trace_distance(const Matrix& a, const Matrix& b) {
  const EigenSystem es = eig_hermitian(Matrix(a - b));
  return 0.5 * es.values.cwiseAbs().sum();
}

}  // namespace hesim
