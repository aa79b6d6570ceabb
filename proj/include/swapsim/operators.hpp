#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "swapsim/common.hpp"
#include "swapsim/state.hpp"

namespace swapsim {

/// Dense square complex matrix acting on register states. Row-major storage;
/// entry(r, c) multiplies amplitude c into amplitude r.
class Operator {
 public:
  Operator(std::uint64_t dim, std::vector<cdouble> entries)
      : dim_(dim), entries_(std::move(entries)) {
    require(dim_ >= 1, "Operator: dimension must be positive");
    require(entries_.size() == dim_ * dim_, "Operator: entry count must be dim*dim");
    for (const cdouble& e : entries_) {
      require(std::isfinite(e.real()) && std::isfinite(e.imag()),
              "Operator: entries must be finite");
    }
  }

  static Operator zero(std::uint64_t dim) {
    return Operator(dim, std::vector<cdouble>(dim * dim, cdouble{0.0, 0.0}));
  }

  static Operator identity(std::uint64_t dim) {
    Operator op = zero(dim);
    for (std::uint64_t i = 0; i < dim; ++i) op.at(i, i) = cdouble{1.0, 0.0};
    return op;
  }

  std::uint64_t dim() const { return dim_; }
  const std::vector<cdouble>& entries() const { return entries_; }

  cdouble entry(std::uint64_t row, std::uint64_t col) const {
    require(row < dim_ && col < dim_, "Operator: index out of range");
    return entries_[row * dim_ + col];
  }

  cdouble& at(std::uint64_t row, std::uint64_t col) {
    require(row < dim_ && col < dim_, "Operator: index out of range");
    return entries_[row * dim_ + col];
  }

  cdouble trace() const {
    cdouble sum{0.0, 0.0};
    for (std::uint64_t i = 0; i < dim_; ++i) sum += entry(i, i);
    return sum;
  }

  Operator adjoint() const {
    Operator out = zero(dim_);
    for (std::uint64_t r = 0; r < dim_; ++r) {
      for (std::uint64_t c = 0; c < dim_; ++c) out.at(c, r) = std::conj(entry(r, c));
    }
    return out;
  }

  bool is_hermitian(double tol = kHermitianTol) const {
    for (std::uint64_t r = 0; r < dim_; ++r) {
      for (std::uint64_t c = r; c < dim_; ++c) {
        if (std::abs(entry(r, c) - std::conj(entry(c, r))) > tol) return false;
      }
    }
    return true;
  }

  double max_abs_difference(const Operator& other) const {
    require(dim_ == other.dim_, "Operator: dimension mismatch");
    double worst = 0.0;
    for (std::uint64_t i = 0; i < entries_.size(); ++i) {
      worst = std::max(worst, std::abs(entries_[i] - other.entries_[i]));
    }
    return worst;
  }

  bool operator==(const Operator& other) const = default;

 private:
  std::uint64_t dim_;
  std::vector<cdouble> entries_;
};

inline Operator operator+(const Operator& a, const Operator& b) {
  require(a.dim() == b.dim(), "Operator+: dimension mismatch");
  Operator out = a;
  for (std::uint64_t r = 0; r < a.dim(); ++r) {
    for (std::uint64_t c = 0; c < a.dim(); ++c) out.at(r, c) += b.entry(r, c);
  }
  return out;
}

inline Operator operator-(const Operator& a, const Operator& b) {
  require(a.dim() == b.dim(), "Operator-: dimension mismatch");
  Operator out = a;
  for (std::uint64_t r = 0; r < a.dim(); ++r) {
    for (std::uint64_t c = 0; c < a.dim(); ++c) out.at(r, c) -= b.entry(r, c);
  }
  return out;
}

inline Operator operator*(cdouble scalar, const Operator& a) {
  Operator out = a;
  for (std::uint64_t r = 0; r < a.dim(); ++r) {
    for (std::uint64_t c = 0; c < a.dim(); ++c) out.at(r, c) *= scalar;
  }
  return out;
}

inline Operator operator*(double scalar, const Operator& a) {
  return cdouble{scalar, 0.0} * a;
}

/// Matrix product A·B.
inline Operator operator*(const Operator& a, const Operator& b) {
  require(a.dim() == b.dim(), "Operator*: dimension mismatch");
  Operator out = Operator::zero(a.dim());
  for (std::uint64_t r = 0; r < a.dim(); ++r) {
    for (std::uint64_t k = 0; k < a.dim(); ++k) {
      const cdouble ark = a.entry(r, k);
      if (ark == cdouble{0.0, 0.0}) continue;
      for (std::uint64_t c = 0; c < a.dim(); ++c) out.at(r, c) += ark * b.entry(k, c);
    }
  }
  return out;
}

/// Kronecker product; block (r_a, c_a) of the result is A[r_a,c_a]·B, so
/// kron(A, B) acting on tensor(u, v) equals tensor(A·u, B·v).
inline Operator kron(const Operator& a, const Operator& b) {
  const std::uint64_t db = b.dim();
  Operator out = Operator::zero(a.dim() * db);
  for (std::uint64_t ra = 0; ra < a.dim(); ++ra) {
    for (std::uint64_t ca = 0; ca < a.dim(); ++ca) {
      const cdouble f = a.entry(ra, ca);
      if (f == cdouble{0.0, 0.0}) continue;
      for (std::uint64_t rb = 0; rb < db; ++rb) {
        for (std::uint64_t cb = 0; cb < db; ++cb) {
          out.at(ra * db + rb, ca * db + cb) = f * b.entry(rb, cb);
        }
      }
    }
  }
  return out;
}

enum class PauliAxis { X, Y, Z };

/// The 2x2 Pauli matrix for an axis: Hermitian, unitary, traceless.
inline Operator pauli(PauliAxis axis) {
  const cdouble zero{0.0, 0.0};
  const cdouble one{1.0, 0.0};
  switch (axis) {
    case PauliAxis::X:
      return Operator(2, {zero, one, one, zero});
    case PauliAxis::Y:
      return Operator(2, {zero, cdouble{0.0, -1.0}, cdouble{0.0, 1.0}, zero});
    case PauliAxis::Z:
      return Operator(2, {one, zero, zero, -one});
  }
  throw std::logic_error("pauli: invalid axis");
}

/// Spin observable n.sigma along a unit direction; eigenvalues are +1 and -1.
inline Operator spin_operator(const Vec3& direction) {
  require(direction.is_unit(), "spin_operator: direction must be a unit vector");
  const cdouble nz{direction.z, 0.0};
  const cdouble off{direction.x, -direction.y};
  return Operator(2, {nz, off, std::conj(off), -nz});
}

/// A|s> as a raw amplitude vector. Not normalized in general (projections
/// shrink the norm), so the result is not a StateVector.
inline std::vector<cdouble> apply(const Operator& op, const StateVector& s) {
  require(op.dim() == s.dim(), "apply: operator/state dimension mismatch");
  std::vector<cdouble> out(op.dim(), cdouble{0.0, 0.0});
  for (std::uint64_t r = 0; r < op.dim(); ++r) {
    cdouble sum{0.0, 0.0};
    for (std::uint64_t c = 0; c < op.dim(); ++c) sum += op.entry(r, c) * s.amplitude(c);
    out[r] = sum;
  }
  return out;
}

/// <s|A|s>. Real for Hermitian A up to roundoff; callers that know A is an
/// observable typically take the real part.
inline cdouble expectation(const Operator& op, const StateVector& s) {
  const std::vector<cdouble> applied = apply(op, s);
  cdouble sum{0.0, 0.0};
  for (std::uint64_t i = 0; i < s.dim(); ++i) sum += std::conj(s.amplitude(i)) * applied[i];
  return sum;
}

}  // namespace swapsim
