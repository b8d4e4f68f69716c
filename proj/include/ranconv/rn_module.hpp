// The random normed module E = L0(F, R^d), its dual, and a.s.-bounded module
// homomorphisms modeled as per-atom matrices.
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "ranconv/atom_space.hpp"
#include "ranconv/errors.hpp"
#include "ranconv/l0_scalar.hpp"

namespace ranconv {

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Which copy of the pairing an element belongs to. Elements of E are primal;
/// elements of the random conjugate space E* are dual. E** is identified with
/// E, so no third tag exists.
enum class Side { Primal, Dual };

inline Side opposite(Side s) { return s == Side::Primal ? Side::Dual : Side::Primal; }
inline const char* sideName(Side s) { return s == Side::Primal ? "primal" : "dual"; }

/// An element of L0(F, R^d): one vector in R^d per atom, stored as the
/// columns of a d x n matrix. The side tag distinguishes E from E*.
template <typename Scalar>
class ModuleElemT {
 public:
  ModuleElemT(AtomSpacePtrT<Scalar> space, MatrixX<Scalar> coords, Side side = Side::Primal)
      : space_(std::move(space)), coords_(std::move(coords)), side_(side) {
    if (!space_) throw StructuralError("module element needs an atom space");
    if (coords_.cols() != space_->atomCount())
      throw StructuralError("module element must have one column per atom");
    if (coords_.rows() < 1) throw StructuralError("module element needs dimension >= 1");
    if (!coords_.allFinite()) throw StructuralError("module element entries must be finite");
  }

  static ModuleElemT zero(AtomSpacePtrT<Scalar> space, Index dim, Side side = Side::Primal) {
    const Index n = space->atomCount();
    return ModuleElemT(std::move(space), MatrixX<Scalar>::Zero(dim, n), side);
  }

  /// The same vector v on every atom.
  static ModuleElemT constant(AtomSpacePtrT<Scalar> space, const VectorX<Scalar>& v,
                              Side side = Side::Primal) {
    const Index n = space->atomCount();
    MatrixX<Scalar> coords(v.size(), n);
    coords.colwise() = v;
    return ModuleElemT(std::move(space), std::move(coords), side);
  }

  const AtomSpacePtrT<Scalar>& space() const { return space_; }
  const MatrixX<Scalar>& coords() const { return coords_; }
  Index dim() const { return coords_.rows(); }
  Index atomCount() const { return coords_.cols(); }
  Side side() const { return side_; }
  auto atom(Index i) const { return coords_.col(i); }

  ModuleElemT asSide(Side s) const { return ModuleElemT(space_, coords_, s); }
  ModuleElemT asDual() const { return asSide(Side::Dual); }
  ModuleElemT asPrimal() const { return asSide(Side::Primal); }

  ModuleElemT operator-() const { return ModuleElemT(space_, MatrixX<Scalar>(-coords_), side_); }

  friend ModuleElemT operator+(const ModuleElemT& a, const ModuleElemT& b) {
    requireSameShape(a, b);
    return ModuleElemT(a.space_, MatrixX<Scalar>(a.coords_ + b.coords_), a.side_);
  }
  friend ModuleElemT operator-(const ModuleElemT& a, const ModuleElemT& b) {
    requireSameShape(a, b);
    return ModuleElemT(a.space_, MatrixX<Scalar>(a.coords_ - b.coords_), a.side_);
  }
  friend ModuleElemT operator*(Scalar s, const ModuleElemT& a) {
    return ModuleElemT(a.space_, MatrixX<Scalar>(s * a.coords_), a.side_);
  }
  friend ModuleElemT operator*(const ModuleElemT& a, Scalar s) { return s * a; }

  /// L0-module scaling: the atom's coordinate vector is scaled by the atom's
  /// value of xi.
  friend ModuleElemT operator*(const L0ScalarT<Scalar>& xi, const ModuleElemT& a) {
    requireSameSpace(xi.space(), a.space_);
    MatrixX<Scalar> out = a.coords_;
    for (Index i = 0; i < out.cols(); ++i) out.col(i) *= xi[i];
    return ModuleElemT(a.space_, std::move(out), a.side_);
  }
  friend ModuleElemT operator*(const ModuleElemT& a, const L0ScalarT<Scalar>& xi) {
    return xi * a;
  }

  friend bool operator==(const ModuleElemT& a, const ModuleElemT& b) {
    return sameSpace(a.space_, b.space_) && a.side_ == b.side_ && a.dim() == b.dim() &&
           (a.coords_.array() == b.coords_.array()).all();
  }

  friend void requireSameShape(const ModuleElemT& a, const ModuleElemT& b) {
    requireSameSpace(a.space_, b.space_);
    if (a.dim() != b.dim()) throw StructuralError("module elements have different dimensions");
    if (a.side_ != b.side_) {
      std::ostringstream os;
      os << "module elements live on different sides (" << sideName(a.side_) << " vs "
         << sideName(b.side_) << ")";
      throw StructuralError(os.str());
    }
  }

 private:
  AtomSpacePtrT<Scalar> space_;
  MatrixX<Scalar> coords_;
  Side side_;
};

/// Elements of the random conjugate space E* share the representation of E.
template <typename Scalar>
using DualElemT = ModuleElemT<Scalar>;

/// The L0-norm ||x||: per-atom Euclidean norm.
template <typename Scalar>
L0ScalarT<Scalar> l0Norm(const ModuleElemT<Scalar>& x) {
  ArrayX<Scalar> out(x.atomCount());
  for (Index i = 0; i < x.atomCount(); ++i) out[i] = x.atom(i).norm();
  return L0ScalarT<Scalar>(x.space(), std::move(out));
}

/// Per-atom dot product without side semantics; geometry helper.
template <typename Scalar>
L0ScalarT<Scalar> dot(const ModuleElemT<Scalar>& a, const ModuleElemT<Scalar>& b) {
  requireSameSpace(a.space(), b.space());
  if (a.dim() != b.dim()) throw StructuralError("dot product needs equal dimensions");
  ArrayX<Scalar> out(a.atomCount());
  for (Index i = 0; i < a.atomCount(); ++i) out[i] = a.atom(i).dot(b.atom(i));
  return L0ScalarT<Scalar>(a.space(), std::move(out));
}

/// The random pairing <u, x> = u(x): per-atom dot product between one dual
/// and one primal element (either argument order).
template <typename Scalar>
L0ScalarT<Scalar> pairing(const ModuleElemT<Scalar>& u, const ModuleElemT<Scalar>& x) {
  if (u.side() == x.side()) {
    std::ostringstream os;
    os << "pairing needs one primal and one dual element, got two " << sideName(u.side());
    throw StructuralError(os.str());
  }
  return dot(u, x);
}

/// Solve <u, x0> = xi for x0 given u of full support: x0 = xi * u / ||u||^2.
template <typename Scalar>
ModuleElemT<Scalar> solvePairing(const ModuleElemT<Scalar>& u, const L0ScalarT<Scalar>& xi) {
  requireSameSpace(u.space(), xi.space());
  std::vector<Index> bad;
  for (Index i = 0; i < u.atomCount(); ++i)
    if (u.atom(i).norm() == Scalar(0)) bad.push_back(i);
  if (!bad.empty()) {
    std::ostringstream os;
    os << "solvePairing needs full support; ||u|| = 0 on atom(s)";
    for (Index i : bad) os << ' ' << i;
    throw PreconditionError(os.str());
  }
  MatrixX<Scalar> out(u.dim(), u.atomCount());
  for (Index i = 0; i < u.atomCount(); ++i)
    out.col(i) = (xi[i] / u.atom(i).squaredNorm()) * u.atom(i);
  return ModuleElemT<Scalar>(u.space(), std::move(out), opposite(u.side()));
}

/// The canonical norm-one element: first coordinate 1 on every atom.
template <typename Scalar>
ModuleElemT<Scalar> unitElement(AtomSpacePtrT<Scalar> space, Index dim,
                                Side side = Side::Primal) {
  MatrixX<Scalar> coords = MatrixX<Scalar>::Zero(dim, space->atomCount());
  coords.row(0).setOnes();
  return ModuleElemT<Scalar>(std::move(space), std::move(coords), side);
}

/// Gluing I_A*x + I_{A^c}*y for module elements.
template <typename Scalar>
ModuleElemT<Scalar> glue(const EventT<Scalar>& A, const ModuleElemT<Scalar>& x,
                         const ModuleElemT<Scalar>& y) {
  requireSameSpace(A.space(), x.space());
  requireSameShape(x, y);
  MatrixX<Scalar> out(x.dim(), x.atomCount());
  for (Index i = 0; i < x.atomCount(); ++i) out.col(i) = A.contains(i) ? x.atom(i) : y.atom(i);
  return ModuleElemT<Scalar>(x.space(), std::move(out), x.side());
}

/// An a.s. bounded module homomorphism L0(F,R^{dIn}) -> L0(F,R^{dOut}):
/// one dOut x dIn matrix per atom.
template <typename Scalar>
class ModuleMapT {
 public:
  ModuleMapT(AtomSpacePtrT<Scalar> space, std::vector<MatrixX<Scalar>> mats)
      : space_(std::move(space)), mats_(std::move(mats)) {
    if (!space_) throw StructuralError("module map needs an atom space");
    if (static_cast<Index>(mats_.size()) != space_->atomCount())
      throw StructuralError("module map must have one matrix per atom");
    for (std::size_t i = 0; i < mats_.size(); ++i) {
      if (mats_[i].rows() != mats_[0].rows() || mats_[i].cols() != mats_[0].cols())
        throw StructuralError("module map matrices must all share one shape");
      if (!mats_[i].allFinite())
        throw StructuralError("module map entries must be finite (atom " + std::to_string(i) + ")");
    }
    if (mats_[0].rows() < 1 || mats_[0].cols() < 1)
      throw StructuralError("module map needs positive dimensions");
  }

  static ModuleMapT identity(AtomSpacePtrT<Scalar> space, Index dim) {
    std::vector<MatrixX<Scalar>> mats(static_cast<std::size_t>(space->atomCount()),
                                      MatrixX<Scalar>::Identity(dim, dim));
    return ModuleMapT(std::move(space), std::move(mats));
  }

  const AtomSpacePtrT<Scalar>& space() const { return space_; }
  const std::vector<MatrixX<Scalar>>& matrices() const { return mats_; }
  const MatrixX<Scalar>& atom(Index i) const { return mats_[static_cast<std::size_t>(i)]; }
  Index dimOut() const { return mats_[0].rows(); }
  Index dimIn() const { return mats_[0].cols(); }
  Index atomCount() const { return space_->atomCount(); }

  friend ModuleMapT operator+(const ModuleMapT& a, const ModuleMapT& b) {
    requireSameSpace(a.space_, b.space_);
    if (a.dimOut() != b.dimOut() || a.dimIn() != b.dimIn())
      throw StructuralError("module map sum needs equal shapes");
    std::vector<MatrixX<Scalar>> mats(a.mats_.size());
    for (std::size_t i = 0; i < mats.size(); ++i) mats[i] = a.mats_[i] + b.mats_[i];
    return ModuleMapT(a.space_, std::move(mats));
  }
  friend ModuleMapT operator*(Scalar s, const ModuleMapT& a) {
    std::vector<MatrixX<Scalar>> mats(a.mats_.size());
    for (std::size_t i = 0; i < mats.size(); ++i) mats[i] = s * a.mats_[i];
    return ModuleMapT(a.space_, std::move(mats));
  }
  /// L0-scaling: the atom's matrix is scaled by the atom's value of xi.
  friend ModuleMapT operator*(const L0ScalarT<Scalar>& xi, const ModuleMapT& a) {
    requireSameSpace(xi.space(), a.space_);
    std::vector<MatrixX<Scalar>> mats(a.mats_.size());
    for (std::size_t i = 0; i < mats.size(); ++i) mats[i] = xi[static_cast<Index>(i)] * a.mats_[i];
    return ModuleMapT(a.space_, std::move(mats));
  }

 private:
  AtomSpacePtrT<Scalar> space_;
  std::vector<MatrixX<Scalar>> mats_;
};

/// Per-atom matrix-vector product. The side of x is kept: maps send E to E
/// and (as adjoints) E* to E*.
template <typename Scalar>
ModuleElemT<Scalar> apply(const ModuleMapT<Scalar>& T, const ModuleElemT<Scalar>& x) {
  requireSameSpace(T.space(), x.space());
  if (T.dimIn() != x.dim()) throw StructuralError("module map/input dimension mismatch");
  MatrixX<Scalar> out(T.dimOut(), x.atomCount());
  for (Index i = 0; i < x.atomCount(); ++i) out.col(i) = T.atom(i) * x.atom(i);
  return ModuleElemT<Scalar>(x.space(), std::move(out), x.side());
}

/// Per-atom matrix product: (compose(T, U))(x) = T(U(x)).
template <typename Scalar>
ModuleMapT<Scalar> compose(const ModuleMapT<Scalar>& T, const ModuleMapT<Scalar>& U) {
  requireSameSpace(T.space(), U.space());
  if (T.dimIn() != U.dimOut()) throw StructuralError("module map composition dimension mismatch");
  std::vector<MatrixX<Scalar>> mats(static_cast<std::size_t>(T.atomCount()));
  for (Index i = 0; i < T.atomCount(); ++i)
    mats[static_cast<std::size_t>(i)] = T.atom(i) * U.atom(i);
  return ModuleMapT<Scalar>(T.space(), std::move(mats));
}

/// Per-atom inverse; this finite model's criterion for a continuous module
/// automorphism is that every atom matrix is nonsingular. Singularity is
/// decided by |det| < 1e-10 relative to the matrix scale.
template <typename Scalar>
ModuleMapT<Scalar> invert(const ModuleMapT<Scalar>& T) {
  if (T.dimOut() != T.dimIn()) throw StructuralError("only square module maps can be inverted");
  const Index d = T.dimOut();
  std::vector<Index> bad;
  std::vector<MatrixX<Scalar>> mats(static_cast<std::size_t>(T.atomCount()));
  for (Index i = 0; i < T.atomCount(); ++i) {
    const MatrixX<Scalar>& M = T.atom(i);
    const Scalar scale = std::max(Scalar(1), M.cwiseAbs().maxCoeff());
    const Scalar det = M.determinant();
    if (std::abs(static_cast<double>(det)) <
        1e-10 * std::pow(static_cast<double>(scale), static_cast<double>(d))) {
      bad.push_back(i);
      continue;
    }
    mats[static_cast<std::size_t>(i)] = M.inverse();
  }
  if (!bad.empty()) {
    std::ostringstream os;
    os << "module map is singular on atom(s)";
    for (Index i : bad) os << ' ' << i;
    throw PreconditionError(os.str());
  }
  return ModuleMapT<Scalar>(T.space(), std::move(mats));
}

/// The adjoint T*: per-atom transpose; pairing(adjoint(T)u, x) = pairing(u, Tx).
template <typename Scalar>
ModuleMapT<Scalar> adjoint(const ModuleMapT<Scalar>& T) {
  std::vector<MatrixX<Scalar>> mats(static_cast<std::size_t>(T.atomCount()));
  for (Index i = 0; i < T.atomCount(); ++i)
    mats[static_cast<std::size_t>(i)] = T.atom(i).transpose();
  return ModuleMapT<Scalar>(T.space(), std::move(mats));
}

namespace detail {

/// Largest singular value of one matrix by power iteration on M^T M with the
/// fixed start vector (1,...,1)/sqrt(d), to relative tolerance 1e-10. If an
/// iterate collapses to zero (start orthogonal to the range) the iteration
/// deterministically restarts from coordinate basis vectors.
template <typename Scalar>
Scalar spectralNorm(const MatrixX<Scalar>& M) {
  const Index d = M.cols();
  const MatrixX<Scalar> G = M.transpose() * M;
  if (G.cwiseAbs().maxCoeff() == Scalar(0)) return Scalar(0);

  const double relTol = 1e-10;
  const int maxIter = 200000;
  VectorX<Scalar> v = VectorX<Scalar>::Ones(d) / std::sqrt(static_cast<double>(d));
  Index nextRestart = 0;
  Scalar lambda(0);
  for (int it = 0; it < maxIter; ++it) {
    VectorX<Scalar> y = G * v;
    const Scalar ny = y.norm();
    if (!(ny > Scalar(0))) {
      if (nextRestart >= d) break;  // G annihilates everything we tried
      v = VectorX<Scalar>::Zero(d);
      v[nextRestart++] = Scalar(1);
      lambda = Scalar(0);
      continue;
    }
    const Scalar newLambda = v.dot(y);
    v = y / ny;
    if (it > 0 && std::abs(static_cast<double>(newLambda - lambda)) <=
                      relTol * std::max(1.0, std::abs(static_cast<double>(newLambda)))) {
      lambda = newLambda;
      break;
    }
    lambda = newLambda;
  }
  return std::sqrt(std::max(Scalar(0), lambda));
}

}  // namespace detail

/// The L0 operator norm: per-atom largest singular value.
template <typename Scalar>
L0ScalarT<Scalar> opNorm(const ModuleMapT<Scalar>& T) {
  ArrayX<Scalar> out(T.atomCount());
  for (Index i = 0; i < T.atomCount(); ++i) out[i] = detail::spectralNorm<Scalar>(T.atom(i));
  return L0ScalarT<Scalar>(T.space(), std::move(out));
}

/// Gluing for module maps: the atom's matrix comes from T on A, from U elsewhere.
template <typename Scalar>
ModuleMapT<Scalar> glue(const EventT<Scalar>& A, const ModuleMapT<Scalar>& T,
                        const ModuleMapT<Scalar>& U) {
  requireSameSpace(A.space(), T.space());
  requireSameSpace(T.space(), U.space());
  if (T.dimOut() != U.dimOut() || T.dimIn() != U.dimIn())
    throw StructuralError("glued module maps need equal shapes");
  std::vector<MatrixX<Scalar>> mats(static_cast<std::size_t>(T.atomCount()));
  for (Index i = 0; i < T.atomCount(); ++i)
    mats[static_cast<std::size_t>(i)] = A.contains(i) ? T.atom(i) : U.atom(i);
  return ModuleMapT<Scalar>(T.space(), std::move(mats));
}

/// Largest absolute coordinate difference; testing helper.
template <typename Scalar>
Scalar maxAbsDiff(const ModuleElemT<Scalar>& a, const ModuleElemT<Scalar>& b) {
  requireSameSpace(a.space(), b.space());
  if (a.dim() != b.dim()) throw StructuralError("maxAbsDiff needs equal dimensions");
  return (a.coords() - b.coords()).cwiseAbs().maxCoeff();
}

template <typename Scalar>
Scalar maxAbsDiff(const L0ScalarT<Scalar>& a, const L0ScalarT<Scalar>& b) {
  requireSameSpace(a.space(), b.space());
  return (a.values() - b.values()).abs().maxCoeff();
}

template <typename Scalar>
Scalar maxAbsDiff(const ModuleMapT<Scalar>& a, const ModuleMapT<Scalar>& b) {
  requireSameSpace(a.space(), b.space());
  if (a.dimOut() != b.dimOut() || a.dimIn() != b.dimIn())
    throw StructuralError("maxAbsDiff needs equal shapes");
  Scalar m(0);
  for (Index i = 0; i < a.atomCount(); ++i)
    m = std::max(m, (a.atom(i) - b.atom(i)).cwiseAbs().maxCoeff());
  return m;
}

using ModuleElem = ModuleElemT<double>;
using DualElem = DualElemT<double>;
using ModuleMap = ModuleMapT<double>;

}  // namespace ranconv
