// Finite probability spaces made of atoms, and events as atom masks.
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <initializer_list>
#include <memory>
#include <sstream>
#include <vector>

#include "ranconv/errors.hpp"

namespace ranconv {

using Index = Eigen::Index;

template <typename Scalar>
using ArrayX = Eigen::Array<Scalar, Eigen::Dynamic, 1>;

using MaskArray = Eigen::Array<bool, Eigen::Dynamic, 1>;

/// A finite probability space: n >= 1 atoms with strictly positive
/// probabilities summing to one (absolute tolerance 1e-12). All random
/// objects in the library are indexed by the atoms of one such space.
template <typename Scalar>
class AtomSpaceT {
 public:
  explicit AtomSpaceT(ArrayX<Scalar> probs) : probs_(std::move(probs)) {
    if (probs_.size() < 1) throw StructuralError("atom space needs at least one atom");
    for (Index i = 0; i < probs_.size(); ++i) {
      if (!(probs_[i] > Scalar(0)) || !std::isfinite(static_cast<double>(probs_[i]))) {
        std::ostringstream os;
        os << "atom probability must be strictly positive and finite, got " << probs_[i]
           << " at atom " << i;
        throw StructuralError(os.str());
      }
    }
    const Scalar total = probs_.sum();
    if (std::abs(static_cast<double>(total - Scalar(1))) > 1e-12) {
      std::ostringstream os;
      os << "atom probabilities must sum to 1 within 1e-12, got " << total;
      throw StructuralError(os.str());
    }
  }

  Index atomCount() const { return probs_.size(); }
  Scalar prob(Index atom) const { return probs_[atom]; }
  const ArrayX<Scalar>& probs() const { return probs_; }

 private:
  ArrayX<Scalar> probs_;
};

template <typename Scalar>
using AtomSpacePtrT = std::shared_ptr<const AtomSpaceT<Scalar>>;

template <typename Scalar>
AtomSpacePtrT<Scalar> makeAtomSpace(ArrayX<Scalar> probs) {
  return std::make_shared<const AtomSpaceT<Scalar>>(std::move(probs));
}

template <typename Scalar>
AtomSpacePtrT<Scalar> makeAtomSpace(const std::vector<Scalar>& probs) {
  ArrayX<Scalar> a(static_cast<Index>(probs.size()));
  for (Index i = 0; i < a.size(); ++i) a[i] = probs[static_cast<std::size_t>(i)];
  return makeAtomSpace<Scalar>(std::move(a));
}

template <typename Scalar>
AtomSpacePtrT<Scalar> uniformAtomSpace(Index n) {
  if (n < 1) throw StructuralError("atom space needs at least one atom");
  return makeAtomSpace<Scalar>(ArrayX<Scalar>::Constant(n, Scalar(1) / static_cast<Scalar>(n)));
}

/// Two values live on the same space when they share the object or when the
/// probability vectors agree exactly.
template <typename Scalar>
bool sameSpace(const AtomSpacePtrT<Scalar>& a, const AtomSpacePtrT<Scalar>& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  return a->atomCount() == b->atomCount() && (a->probs() == b->probs()).all();
}

template <typename Scalar>
void requireSameSpace(const AtomSpacePtrT<Scalar>& a, const AtomSpacePtrT<Scalar>& b) {
  if (!sameSpace(a, b)) throw StructuralError("operands live on different atom spaces");
}

/// An event: a set of atoms, stored as a per-atom boolean mask.
template <typename Scalar>
class EventT {
 public:
  EventT(AtomSpacePtrT<Scalar> space, MaskArray mask)
      : space_(std::move(space)), mask_(std::move(mask)) {
    if (!space_) throw StructuralError("event needs an atom space");
    if (mask_.size() != space_->atomCount())
      throw StructuralError("event mask length must equal the atom count");
  }

  static EventT full(AtomSpacePtrT<Scalar> space) {
    const Index n = space->atomCount();
    return EventT(std::move(space), MaskArray::Constant(n, true));
  }
  static EventT none(AtomSpacePtrT<Scalar> space) {
    const Index n = space->atomCount();
    return EventT(std::move(space), MaskArray::Constant(n, false));
  }

  const AtomSpacePtrT<Scalar>& space() const { return space_; }
  const MaskArray& mask() const { return mask_; }
  bool contains(Index atom) const { return mask_[atom]; }
  Index atomCount() const { return mask_.size(); }

  bool all() const { return mask_.all(); }
  bool any() const { return mask_.any(); }

  Scalar prob() const {
    Scalar p(0);
    for (Index i = 0; i < mask_.size(); ++i)
      if (mask_[i]) p += space_->prob(i);
    return p;
  }

  EventT complement() const { return EventT(space_, MaskArray(!mask_)); }

  friend EventT operator&(const EventT& a, const EventT& b) {
    requireSameSpace(a.space_, b.space_);
    return EventT(a.space_, MaskArray(a.mask_ && b.mask_));
  }
  friend EventT operator|(const EventT& a, const EventT& b) {
    requireSameSpace(a.space_, b.space_);
    return EventT(a.space_, MaskArray(a.mask_ || b.mask_));
  }
  friend bool operator==(const EventT& a, const EventT& b) {
    return sameSpace(a.space_, b.space_) && (a.mask_ == b.mask_).all();
  }

 private:
  AtomSpacePtrT<Scalar> space_;
  MaskArray mask_;
};

using AtomSpace = AtomSpaceT<double>;
using AtomSpacePtr = AtomSpacePtrT<double>;
using Event = EventT<double>;

}  // namespace ranconv
