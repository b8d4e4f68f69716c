#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <utility>
#include <vector>

#include <ranconv/convex_fn.hpp>
#include <ranconv/order_ops.hpp>
#include <ranconv/rn_module.hpp>
#include <ranconv/rng.hpp>

namespace ranconv::verify {

/// Scalar field with iid N(0, scale^2) atom values.
inline L0Scalar genL0(Rng& rng, const AtomSpacePtr& space, double scale = 1.0) {
  ArrayX<double> v(space->atomCount());
  for (Index i = 0; i < v.size(); ++i) v[i] = scale * rng.gaussian();
  return L0Scalar(space, v);
}

/// Strictly positive scalar field: exp of a Gaussian, so values straddle 1.
inline L0Scalar genPositiveL0(Rng& rng, const AtomSpacePtr& space) {
  ArrayX<double> v(space->atomCount());
  for (Index i = 0; i < v.size(); ++i) v[i] = std::exp(rng.gaussian());
  return L0Scalar(space, v);
}

/// Per-atom uniform draw from [0, 1].
inline L0Scalar genUnitL0(Rng& rng, const AtomSpacePtr& space) {
  ArrayX<double> v(space->atomCount());
  for (Index i = 0; i < v.size(); ++i) v[i] = rng.uniform();
  return L0Scalar(space, v);
}

/// Extended scalar field: Gaussian atoms, each replaced by +/-inf with the
/// given probability (split evenly between the signs).
inline ExtL0Scalar genExtL0(Rng& rng, const AtomSpacePtr& space, double scale = 1.0,
                            double infProb = 0.15) {
  ArrayX<double> v(space->atomCount());
  for (Index i = 0; i < v.size(); ++i) {
    const double roll = rng.uniform();
    if (roll < infProb / 2)
      v[i] = std::numeric_limits<double>::infinity();
    else if (roll < infProb)
      v[i] = -std::numeric_limits<double>::infinity();
    else
      v[i] = scale * rng.gaussian();
  }
  return ExtL0Scalar(space, v);
}

/// Module element with iid Gaussian coordinates.
inline ModuleElem genElem(Rng& rng, const AtomSpacePtr& space, Index dim, Side side,
                          double scale = 1.0) {
  MatrixX<double> coords(dim, space->atomCount());
  for (Index j = 0; j < coords.cols(); ++j)
    for (Index i = 0; i < coords.rows(); ++i) coords(i, j) = scale * rng.gaussian();
  return ModuleElem(space, coords, side);
}

/// Gaussian element regenerated until every atom has norm >= 0.1, so it can
/// serve as the known vector in pairing-equation solves.
inline ModuleElem genFullSupportElem(Rng& rng, const AtomSpacePtr& space, Index dim, Side side,
                                     double scale = 1.0) {
  for (;;) {
    ModuleElem x = genElem(rng, space, dim, side, scale);
    if ((l0Norm(x).values() >= 0.1 * scale).all()) return x;
  }
}

/// Random event: independent fair coin per atom (may be empty or full).
inline Event genEvent(Rng& rng, const AtomSpacePtr& space) {
  MaskArray mask(space->atomCount());
  for (Index i = 0; i < mask.size(); ++i) mask[i] = rng.coin();
  return Event(space, mask);
}

/// Per-atom Gaussian square matrices nudged along the diagonal until the
/// determinant clears 0.3, keeping inverses and adjoint-inverses well away
/// from the blow-up regime the suites' tolerances assume.
inline ModuleMap genNonsingularMap(Rng& rng, const AtomSpacePtr& space, Index dim) {
  std::vector<MatrixX<double>> mats;
  mats.reserve(static_cast<std::size_t>(space->atomCount()));
  for (Index a = 0; a < space->atomCount(); ++a) {
    MatrixX<double> m(dim, dim);
    for (Index j = 0; j < dim; ++j)
      for (Index i = 0; i < dim; ++i) m(i, j) = rng.gaussian();
    for (int shift = 0; std::abs(m.determinant()) < 0.3; ++shift) {
      if (shift > 64) throw Error("diagonal-shift search failed to reach a usable determinant");
      m += 0.75 * MatrixX<double>::Identity(dim, dim);
    }
    mats.push_back(m);
  }
  return ModuleMap(space, mats);
}

/// Weights of a random convex combination: per-atom exponential draws
/// normalised to sum to one across the k slots.
inline std::vector<L0Scalar> genSimplexWeights(Rng& rng, const AtomSpacePtr& space, Index k) {
  const Index n = space->atomCount();
  MatrixX<double> raw(k, n);
  for (Index a = 0; a < n; ++a) {
    for (Index i = 0; i < k; ++i) raw(i, a) = -std::log1p(-rng.uniform());
    const double total = raw.col(a).sum();
    if (total < 1e-12)
      raw.col(a).setConstant(1.0 / static_cast<double>(k));
    else
      raw.col(a) /= total;
  }
  std::vector<L0Scalar> out;
  out.reserve(static_cast<std::size_t>(k));
  for (Index i = 0; i < k; ++i) out.emplace_back(space, ArrayX<double>(raw.row(i).transpose()));
  return out;
}

/// Full fully-order-preserving parameter set: unit-scale nonsingular H, and
/// translations/affine parts at the requested scale.
inline OpParamsT genTParams(Rng& rng, const AtomSpacePtr& space, Index dim, double scale = 1.0) {
  return OpParamsT(genNonsingularMap(rng, space, dim), genElem(rng, space, dim, Side::Primal, scale),
                   genElem(rng, space, dim, Side::Dual, scale), genPositiveL0(rng, space),
                   genL0(rng, space, scale));
}

/// Fully-order-reversing parameter set (acts through the conjugate side).
inline OpParamsS genSParams(Rng& rng, const AtomSpacePtr& space, Index dim, double scale = 1.0) {
  return OpParamsS{genNonsingularMap(rng, space, dim), genElem(rng, space, dim, Side::Dual, scale),
                   genElem(rng, space, dim, Side::Primal, scale), genPositiveL0(rng, space),
                   genL0(rng, space, scale)};
}

/// Ingredients for an involutive T: a per-atom Householder reflection H
/// together with c and w drawn from the reflection axis, which satisfies
/// H^2 = I, Hc = -c, and H*w = -w by construction.
struct InvolutionSeed {
  ModuleMap H;
  ModuleElem c;
  ModuleElem w;
};

inline InvolutionSeed genInvolutionSeed(Rng& rng, const AtomSpacePtr& space, Index dim,
                                        double scale = 1.0) {
  const Index n = space->atomCount();
  std::vector<MatrixX<double>> mats;
  mats.reserve(static_cast<std::size_t>(n));
  MatrixX<double> cCoords(dim, n);
  MatrixX<double> wCoords(dim, n);
  for (Index a = 0; a < n; ++a) {
    VectorX<double> v(dim);
    do {
      for (Index i = 0; i < dim; ++i) v[i] = rng.gaussian();
    } while (v.norm() < 0.5);
    mats.push_back(MatrixX<double>::Identity(dim, dim) - 2.0 / v.squaredNorm() * (v * v.transpose()));
    cCoords.col(a) = scale * rng.gaussian() * v;
    wCoords.col(a) = scale * rng.gaussian() * v;
  }
  return InvolutionSeed{ModuleMap(space, mats), ModuleElem(space, cCoords, Side::Primal),
                        ModuleElem(space, wCoords, Side::Dual)};
}

/// Random max-affine function: k in [kMin, kMax] Gaussian pieces, optionally
/// restricted to a random per-atom box around the origin (always proper).
inline ConvexFn genHRep(Rng& rng, const AtomSpacePtr& space, Index dim, int kMin, int kMax,
                        Side side, bool withDomain, double scale = 1.0) {
  const Index k = static_cast<Index>(kMin) + static_cast<Index>(rng.below(static_cast<std::uint64_t>(kMax - kMin + 1)));
  const Side slopeSide = opposite(side);
  std::vector<AffineFn> pieces;
  pieces.reserve(static_cast<std::size_t>(k));
  for (Index i = 0; i < k; ++i)
    pieces.emplace_back(genElem(rng, space, dim, slopeSide, scale), genL0(rng, space, scale));
  std::vector<HalfSpace> domain;
  if (withDomain) {
    for (Index i = 0; i < dim; ++i) {
      ArrayX<double> bound(space->atomCount());
      for (Index a = 0; a < bound.size(); ++a) bound[a] = 1.0 + 2.0 * rng.uniform();
      MatrixX<double> axis = MatrixX<double>::Zero(dim, space->atomCount());
      axis.row(i).setOnes();
      const L0Scalar b(space, bound);
      domain.emplace_back(ModuleElem(space, axis, slopeSide), b);
      domain.emplace_back(ModuleElem(space, MatrixX<double>(-axis), slopeSide), b);
    }
  }
  return ConvexFn::hrep(std::move(pieces), std::move(domain));
}

/// Random lower envelope of k Gaussian points with Gaussian weights.
inline ConvexFn genVRep(Rng& rng, const AtomSpacePtr& space, Index dim, int kMin, int kMax,
                        Side side, double scale = 1.0) {
  const Index k = static_cast<Index>(kMin) + static_cast<Index>(rng.below(static_cast<std::uint64_t>(kMax - kMin + 1)));
  std::vector<VPoint> points;
  points.reserve(static_cast<std::size_t>(k));
  for (Index i = 0; i < k; ++i)
    points.emplace_back(genElem(rng, space, dim, side, scale), genL0(rng, space, scale));
  return ConvexFn::vrep(std::move(points));
}

/// Append a piece that is a convex combination of the existing ones minus a
/// nonnegative slack: the envelope is unchanged but the representation is
/// redundant, which is exactly what round-trip tests should chew on.
inline ConvexFn withDominatedPiece(Rng& rng, const ConvexFn& f) {
  const auto& pieces = f.pieces();
  const auto lambda = genSimplexWeights(rng, f.space(), static_cast<Index>(pieces.size()));
  ModuleElem u = ModuleElem::zero(f.space(), f.dim(), pieces.front().u.side());
  L0Scalar alpha = L0Scalar::zero(f.space());
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    u = u + lambda[i] * pieces[i].u;
    alpha = alpha + lambda[i] * pieces[i].alpha;
  }
  alpha = alpha - genL0(rng, f.space(), 0.5).abs();
  auto extended = pieces;
  extended.emplace_back(std::move(u), std::move(alpha));
  return ConvexFn::hrep(std::move(extended), f.domain());
}

struct FnPair {
  ConvexFn f;
  ConvexFn g;
};

/// Build f <= g by construction: f's pieces are a nonempty subset of g's with
/// per-atom intercept reductions, and f's domain constraints are a subset of
/// g's (so dom g is contained in dom f).
inline FnPair genOrderedPair(Rng& rng, const ConvexFn& g) {
  const auto& pieces = g.pieces();
  std::vector<AffineFn> sub;
  for (const auto& h : pieces)
    if (rng.coin()) sub.emplace_back(h.u, h.alpha - genL0(rng, g.space(), 0.5).abs());
  if (sub.empty())
    sub.emplace_back(pieces.front().u, pieces.front().alpha - genL0(rng, g.space(), 0.5).abs());
  std::vector<HalfSpace> subDomain;
  for (const auto& hs : g.domain())
    if (rng.coin()) subDomain.push_back(hs);
  return FnPair{ConvexFn::hrep(std::move(sub), std::move(subDomain)), g};
}

}  // namespace ranconv::verify
