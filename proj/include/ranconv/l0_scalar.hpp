// Atom-indexed scalars: the finite model of L0(F) and of the extended
// lattice, with events, supports, gluing and convergence in probability.
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "ranconv/atom_space.hpp"
#include "ranconv/errors.hpp"

namespace ranconv {

template <typename Scalar>
class ExtL0ScalarT;

/// A random variable with one finite real value per atom.
template <typename Scalar>
class L0ScalarT {
 public:
  L0ScalarT(AtomSpacePtrT<Scalar> space, ArrayX<Scalar> values)
      : space_(std::move(space)), values_(std::move(values)) {
    if (!space_) throw StructuralError("L0 scalar needs an atom space");
    if (values_.size() != space_->atomCount())
      throw StructuralError("L0 scalar value count must equal the atom count");
    for (Index i = 0; i < values_.size(); ++i) {
      if (!std::isfinite(static_cast<double>(values_[i]))) {
        std::ostringstream os;
        os << "L0 scalar entries must be finite, got " << values_[i] << " at atom " << i;
        throw StructuralError(os.str());
      }
    }
  }

  static L0ScalarT constant(AtomSpacePtrT<Scalar> space, Scalar v) {
    const Index n = space->atomCount();
    return L0ScalarT(std::move(space), ArrayX<Scalar>::Constant(n, v));
  }
  static L0ScalarT zero(AtomSpacePtrT<Scalar> space) { return constant(std::move(space), Scalar(0)); }
  static L0ScalarT one(AtomSpacePtrT<Scalar> space) { return constant(std::move(space), Scalar(1)); }

  const AtomSpacePtrT<Scalar>& space() const { return space_; }
  const ArrayX<Scalar>& values() const { return values_; }
  Scalar operator[](Index atom) const { return values_[atom]; }
  Index atomCount() const { return values_.size(); }

  L0ScalarT operator-() const { return L0ScalarT(space_, ArrayX<Scalar>(-values_)); }

  friend L0ScalarT operator+(const L0ScalarT& a, const L0ScalarT& b) {
    requireSameSpace(a.space_, b.space_);
    return L0ScalarT(a.space_, ArrayX<Scalar>(a.values_ + b.values_));
  }
  friend L0ScalarT operator-(const L0ScalarT& a, const L0ScalarT& b) {
    requireSameSpace(a.space_, b.space_);
    return L0ScalarT(a.space_, ArrayX<Scalar>(a.values_ - b.values_));
  }
  friend L0ScalarT operator*(const L0ScalarT& a, const L0ScalarT& b) {
    requireSameSpace(a.space_, b.space_);
    return L0ScalarT(a.space_, ArrayX<Scalar>(a.values_ * b.values_));
  }
  friend L0ScalarT operator*(Scalar s, const L0ScalarT& a) {
    return L0ScalarT(a.space_, ArrayX<Scalar>(s * a.values_));
  }
  friend L0ScalarT operator*(const L0ScalarT& a, Scalar s) { return s * a; }
  friend L0ScalarT operator+(const L0ScalarT& a, Scalar s) {
    return L0ScalarT(a.space_, ArrayX<Scalar>(a.values_ + s));
  }
  friend L0ScalarT operator-(const L0ScalarT& a, Scalar s) { return a + (-s); }

  friend bool operator==(const L0ScalarT& a, const L0ScalarT& b) {
    return sameSpace(a.space_, b.space_) && (a.values_ == b.values_).all();
  }

  L0ScalarT abs() const { return L0ScalarT(space_, ArrayX<Scalar>(values_.abs())); }

 private:
  AtomSpacePtrT<Scalar> space_;
  ArrayX<Scalar> values_;
};

/// A random variable with one value per atom in [-inf, +inf]. Entries may be
/// IEEE infinities but never NaN; the arithmetic below refuses the
/// indeterminate form (+inf)+(-inf) and uses the convention 0*(+inf)=0.
template <typename Scalar>
class ExtL0ScalarT {
 public:
  ExtL0ScalarT(AtomSpacePtrT<Scalar> space, ArrayX<Scalar> values)
      : space_(std::move(space)), values_(std::move(values)) {
    if (!space_) throw StructuralError("extended L0 scalar needs an atom space");
    if (values_.size() != space_->atomCount())
      throw StructuralError("extended L0 scalar value count must equal the atom count");
    for (Index i = 0; i < values_.size(); ++i) {
      if (std::isnan(static_cast<double>(values_[i]))) {
        std::ostringstream os;
        os << "extended L0 scalar entries must not be NaN (atom " << i << ")";
        throw StructuralError(os.str());
      }
    }
  }

  // An L0 scalar embeds into the extended lattice.
  ExtL0ScalarT(const L0ScalarT<Scalar>& finite)  // NOLINT: implicit by design
      : space_(finite.space()), values_(finite.values()) {}

  static ExtL0ScalarT constant(AtomSpacePtrT<Scalar> space, Scalar v) {
    const Index n = space->atomCount();
    return ExtL0ScalarT(std::move(space), ArrayX<Scalar>::Constant(n, v));
  }
  static ExtL0ScalarT plusInf(AtomSpacePtrT<Scalar> space) {
    return constant(std::move(space), std::numeric_limits<Scalar>::infinity());
  }
  static ExtL0ScalarT minusInf(AtomSpacePtrT<Scalar> space) {
    return constant(std::move(space), -std::numeric_limits<Scalar>::infinity());
  }

  const AtomSpacePtrT<Scalar>& space() const { return space_; }
  const ArrayX<Scalar>& values() const { return values_; }
  Scalar operator[](Index atom) const { return values_[atom]; }
  Index atomCount() const { return values_.size(); }

  bool isFinite() const { return values_.isFinite().all(); }

  /// Downcast into L0(F); throws if any entry is infinite.
  L0ScalarT<Scalar> toFinite() const {
    if (!isFinite()) throw StructuralError("extended L0 scalar has infinite entries");
    return L0ScalarT<Scalar>(space_, values_);
  }

  ExtL0ScalarT operator-() const { return ExtL0ScalarT(space_, ArrayX<Scalar>(-values_)); }

  friend ExtL0ScalarT operator+(const ExtL0ScalarT& a, const ExtL0ScalarT& b) {
    requireSameSpace(a.space_, b.space_);
    ArrayX<Scalar> out(a.values_.size());
    for (Index i = 0; i < out.size(); ++i) out[i] = extAdd(a.values_[i], b.values_[i], i);
    return ExtL0ScalarT(a.space_, std::move(out));
  }
  friend ExtL0ScalarT operator-(const ExtL0ScalarT& a, const ExtL0ScalarT& b) { return a + (-b); }
  friend ExtL0ScalarT operator*(const ExtL0ScalarT& a, const ExtL0ScalarT& b) {
    requireSameSpace(a.space_, b.space_);
    ArrayX<Scalar> out(a.values_.size());
    for (Index i = 0; i < out.size(); ++i) out[i] = extMul(a.values_[i], b.values_[i]);
    return ExtL0ScalarT(a.space_, std::move(out));
  }
  friend ExtL0ScalarT operator*(Scalar s, const ExtL0ScalarT& a) {
    ArrayX<Scalar> out(a.values_.size());
    for (Index i = 0; i < out.size(); ++i) out[i] = extMul(s, a.values_[i]);
    return ExtL0ScalarT(a.space_, std::move(out));
  }
  friend ExtL0ScalarT operator*(const ExtL0ScalarT& a, Scalar s) { return s * a; }

  friend bool operator==(const ExtL0ScalarT& a, const ExtL0ScalarT& b) {
    return sameSpace(a.space_, b.space_) && (a.values_ == b.values_).all();
  }

 private:
  static Scalar extAdd(Scalar x, Scalar y, Index atom) {
    if (std::isinf(static_cast<double>(x)) && std::isinf(static_cast<double>(y)) &&
        (x > Scalar(0)) != (y > Scalar(0))) {
      std::ostringstream os;
      os << "indeterminate sum (+inf)+(-inf) at atom " << atom;
      throw StructuralError(os.str());
    }
    return x + y;
  }
  // Convention 0*(+inf) = 0, so multiplication never produces NaN.
  static Scalar extMul(Scalar x, Scalar y) {
    if (x == Scalar(0) || y == Scalar(0)) return Scalar(0);
    return x * y;
  }

  AtomSpacePtrT<Scalar> space_;
  ArrayX<Scalar> values_;
};

// ---------------------------------------------------------------------------
// Lattice operations
// ---------------------------------------------------------------------------

/// Per-atom supremum of a nonempty family (the finite-space essential sup).
template <typename Scalar>
ExtL0ScalarT<Scalar> supFamily(const std::vector<ExtL0ScalarT<Scalar>>& fs) {
  if (fs.empty()) throw StructuralError("supremum of an empty family");
  ArrayX<Scalar> out = fs.front().values();
  for (std::size_t k = 1; k < fs.size(); ++k) {
    requireSameSpace(fs.front().space(), fs[k].space());
    out = out.max(fs[k].values());
  }
  return ExtL0ScalarT<Scalar>(fs.front().space(), std::move(out));
}

/// Per-atom infimum of a nonempty family.
template <typename Scalar>
ExtL0ScalarT<Scalar> infFamily(const std::vector<ExtL0ScalarT<Scalar>>& fs) {
  if (fs.empty()) throw StructuralError("infimum of an empty family");
  ArrayX<Scalar> out = fs.front().values();
  for (std::size_t k = 1; k < fs.size(); ++k) {
    requireSameSpace(fs.front().space(), fs[k].space());
    out = out.min(fs[k].values());
  }
  return ExtL0ScalarT<Scalar>(fs.front().space(), std::move(out));
}

/// Atoms where xi <= eta. Comparisons are exact; no epsilon.
template <typename Scalar>
EventT<Scalar> leqEvent(const ExtL0ScalarT<Scalar>& xi, const ExtL0ScalarT<Scalar>& eta) {
  requireSameSpace(xi.space(), eta.space());
  return EventT<Scalar>(xi.space(), MaskArray(xi.values() <= eta.values()));
}

/// xi <= eta on every atom.
template <typename Scalar>
bool leq(const ExtL0ScalarT<Scalar>& xi, const ExtL0ScalarT<Scalar>& eta) {
  return leqEvent(xi, eta).all();
}

/// The support [xi > 0], by exact strict comparison.
template <typename Scalar>
EventT<Scalar> supportEvent(const L0ScalarT<Scalar>& xi) {
  return EventT<Scalar>(xi.space(), MaskArray(xi.values() > Scalar(0)));
}

/// The zero set [xi = 0].
template <typename Scalar>
EventT<Scalar> eqZeroEvent(const L0ScalarT<Scalar>& xi) {
  return EventT<Scalar>(xi.space(), MaskArray(xi.values() == Scalar(0)));
}

/// The event [xi >= eta].
template <typename Scalar>
EventT<Scalar> geqEvent(const ExtL0ScalarT<Scalar>& xi, const ExtL0ScalarT<Scalar>& eta) {
  requireSameSpace(xi.space(), eta.space());
  return EventT<Scalar>(xi.space(), MaskArray(xi.values() >= eta.values()));
}

/// Gluing I_A*xi + I_{A^c}*eta: take xi on A and eta elsewhere.
template <typename Scalar>
ExtL0ScalarT<Scalar> glue(const EventT<Scalar>& A, const ExtL0ScalarT<Scalar>& xi,
                          const ExtL0ScalarT<Scalar>& eta) {
  requireSameSpace(A.space(), xi.space());
  requireSameSpace(xi.space(), eta.space());
  return ExtL0ScalarT<Scalar>(xi.space(),
                              ArrayX<Scalar>(A.mask().select(xi.values(), eta.values())));
}

template <typename Scalar>
L0ScalarT<Scalar> glue(const EventT<Scalar>& A, const L0ScalarT<Scalar>& xi,
                       const L0ScalarT<Scalar>& eta) {
  requireSameSpace(A.space(), xi.space());
  requireSameSpace(xi.space(), eta.space());
  return L0ScalarT<Scalar>(xi.space(),
                           ArrayX<Scalar>(A.mask().select(xi.values(), eta.values())));
}

// ---------------------------------------------------------------------------
// Convergence in probability
// ---------------------------------------------------------------------------

/// Verdict for a finite prefix: whether P{|x_n - x| < eps} > 1 - lambda holds
/// from some index onward, and the first such index (1-based; 0 when the
/// prefix never settles).
struct ConvergenceVerdict {
  bool converged = false;
  Index decidedAt = 0;
};

template <typename Scalar>
ConvergenceVerdict convergesInProb(const std::vector<L0ScalarT<Scalar>>& seq,
                                   const L0ScalarT<Scalar>& limit, Scalar eps, Scalar lambda) {
  if (seq.empty()) throw StructuralError("convergence check needs a nonempty sequence");
  if (!(eps > Scalar(0))) throw ParameterError("convergence check needs eps > 0");
  if (!(lambda > Scalar(0) && lambda < Scalar(1)))
    throw ParameterError("convergence check needs 0 < lambda < 1");

  const auto& space = limit.space();
  // good[k] <=> P{ |x_k - x| < eps } > 1 - lambda.
  std::vector<bool> good(seq.size());
  for (std::size_t k = 0; k < seq.size(); ++k) {
    requireSameSpace(space, seq[k].space());
    Scalar p(0);
    for (Index i = 0; i < limit.atomCount(); ++i)
      if (std::abs(static_cast<double>(seq[k][i] - limit[i])) < static_cast<double>(eps))
        p += space->prob(i);
    good[k] = p > Scalar(1) - lambda;
  }

  // First index from which every later prefix element is good.
  Index decided = 0;
  for (std::size_t k = seq.size(); k-- > 0;) {
    if (!good[k]) break;
    decided = static_cast<Index>(k) + 1;
  }
  if (decided == 0) return {false, 0};
  return {true, decided};
}

/// Largest per-atom deviation between two extended scalars: matching
/// infinities count as zero deviation, mismatched ones as +inf.
template <typename Scalar>
Scalar extDeviation(const ExtL0ScalarT<Scalar>& a, const ExtL0ScalarT<Scalar>& b) {
  requireSameSpace(a.space(), b.space());
  Scalar worst(0);
  for (Index i = 0; i < a.atomCount(); ++i) {
    const bool ia = std::isinf(static_cast<double>(a[i]));
    const bool ib = std::isinf(static_cast<double>(b[i]));
    if (ia || ib) {
      if (a[i] != b[i]) return std::numeric_limits<Scalar>::infinity();
      continue;
    }
    worst = std::max(worst, std::abs(static_cast<double>(a[i] - b[i])));
  }
  return worst;
}

using L0Scalar = L0ScalarT<double>;
using ExtL0Scalar = ExtL0ScalarT<double>;

}  // namespace ranconv
