#include <doctest.h>

#include <limits>
#include <vector>

#include <ranconv/ranconv.hpp>

#include "test_util.hpp"

using namespace ranconv;
using rctest::elem;
using rctest::extScalar;
using rctest::scalar;

namespace {

const double kInf = std::numeric_limits<double>::infinity();

ModuleElem dualConst(const AtomSpacePtr& space, double v) {
  return ModuleElem::constant(space, Eigen::VectorXd::Constant(1, v), Side::Dual);
}

ModuleElem primalConst(const AtomSpacePtr& space, double v) {
  return ModuleElem::constant(space, Eigen::VectorXd::Constant(1, v), Side::Primal);
}

/// f(x) = |x| as a two-piece H-rep on d = 1.
ConvexFn absFn(const AtomSpacePtr& space) {
  const L0Scalar zero = L0Scalar::zero(space);
  return ConvexFn::hrep({AffineFn(dualConst(space, 1), zero),
                         AffineFn(dualConst(space, -1), zero)});
}

}  // namespace

TEST_CASE("the conjugate of |x| is the indicator of [-1, 1]") {
  const auto space = uniformAtomSpace<double>(2);
  const ConvexFn f = absFn(space);
  const ConvexFn fStar = conjugateRep(f);

  CHECK(fStar.variant() == FnVariant::VRep);
  CHECK(fStar.side() == Side::Dual);  // conjugation flips the side
  REQUIRE(fStar.points().size() == 2);
  CHECK(fStar.points()[0].p.atom(0)(0) == 1.0);
  CHECK(fStar.points()[1].p.atom(0)(0) == -1.0);

  const auto at = [&](double v) { return eval(fStar, dualConst(space, v)); };
  CHECK(at(0.0) == extScalar(space, {0, 0}));
  CHECK(extDeviation(at(0.75), extScalar(space, {0, 0})) < 1e-9);
  CHECK(extDeviation(at(-1.0), extScalar(space, {0, 0})) < 1e-9);
  CHECK(at(2.0) == ExtL0Scalar::plusInf(space));
}

TEST_CASE("the indicator's conjugate is the linear pairing with its point") {
  const auto space = uniformAtomSpace<double>(2);
  const ModuleElem x0 = elem(space, Side::Primal, {{2}, {-3}});
  const ConvexFn deltaStar = conjugateRep(ConvexFn::indicator(x0));

  CHECK(deltaStar.variant() == FnVariant::HRep);
  CHECK(deltaStar.side() == Side::Dual);
  REQUIRE(deltaStar.pieces().size() == 1);

  // delta*_{x0}(v) = <v, x0> at a few pinned duals, and via the LP oracle.
  const ModuleElem v = elem(space, Side::Dual, {{5}, {1}});
  CHECK(eval(deltaStar, v) == ExtL0Scalar(pairing(v, x0)));
  CHECK(extDeviation(conjugateEval(ConvexFn::indicator(x0), v),
                     ExtL0Scalar(pairing(v, x0))) < 1e-9);
}

TEST_CASE("conjugation is an exact representation swap with an involution") {
  const auto space = uniformAtomSpace<double>(2);

  // H-rep -> V-rep -> H-rep reproduces the pieces bitwise.
  const ConvexFn f = absFn(space);
  const ConvexFn back = conjugateRep(conjugateRep(f));
  CHECK(back.variant() == FnVariant::HRep);
  CHECK(back.side() == Side::Primal);
  REQUIRE(back.pieces().size() == f.pieces().size());
  for (std::size_t k = 0; k < f.pieces().size(); ++k) {
    CHECK(maxAbsDiff(back.pieces()[k].u, f.pieces()[k].u) == 0.0);
    CHECK(maxAbsDiff(back.pieces()[k].alpha, f.pieces()[k].alpha) == 0.0);
  }

  // A domain-constrained H-rep has no exact swap; the LP path still works.
  const ConvexFn boxed = ConvexFn::hrep(
      {AffineFn(dualConst(space, 1), L0Scalar::zero(space))},
      {HalfSpace(dualConst(space, 1), L0Scalar::one(space))});
  CHECK_THROWS_AS(conjugateRep(boxed), UnsupportedRepresentationError);
  // sup_{x <= 1} (v - 1) x: +inf for v < 1 (x -> -inf), (v - 1) at x = 1 else.
  CHECK(conjugateEval(boxed, dualConst(space, 0.5)) == ExtL0Scalar::plusInf(space));
  CHECK(extDeviation(conjugateEval(boxed, dualConst(space, 1.0)),
                     ExtL0Scalar::constant(space, 0)) < 1e-9);
  CHECK(extDeviation(conjugateEval(boxed, dualConst(space, 2.0)),
                     ExtL0Scalar::constant(space, 1)) < 1e-9);
}

TEST_CASE("the definitional LP conjugate matches the representation swap") {
  const auto space = uniformAtomSpace<double>(2);
  const ConvexFn f = absFn(space);
  const ConvexFn fStar = conjugateRep(f);

  // Single-piece function: f(x) = x, so f*(v) is 0 at v = 1 and +inf elsewhere.
  const ConvexFn id = ConvexFn::hrep({AffineFn(dualConst(space, 1), L0Scalar::zero(space))});
  CHECK(extDeviation(conjugateEval(id, dualConst(space, 1)),
                     ExtL0Scalar::constant(space, 0)) < 1e-9);
  CHECK(conjugateEval(id, dualConst(space, 0)) == ExtL0Scalar::plusInf(space));

  // Sweep dual points: swap evaluation and definitional LP agree, including
  // the per-atom +inf pattern.
  Rng rng(31);
  for (int k = 0; k < 40; ++k) {
    const ModuleElem v = elem(space, Side::Dual, {{rng.uniform(-2, 2)}, {rng.uniform(-2, 2)}});
    CHECK(extDeviation(eval(fStar, v), conjugateEval(f, v)) < 1e-9);
  }

  // Side discipline: the conjugate takes arguments from the opposite side.
  CHECK_THROWS_AS(conjugateEval(f, primalConst(space, 0)), StructuralError);
  CHECK_THROWS_AS(eval(fStar, primalConst(space, 0)), StructuralError);
}

TEST_CASE("Fenchel-Moreau: the double conjugate restores the function") {
  const auto space = uniformAtomSpace<double>(2);

  // Max-affine instance with distinct slopes per atom.
  const ConvexFn f = ConvexFn::hrep(
      {AffineFn(elem(space, Side::Dual, {{1}, {-1}}), scalar(space, {0, 0.5})),
       AffineFn(elem(space, Side::Dual, {{-2}, {0.5}}), scalar(space, {1, -1})),
       AffineFn(elem(space, Side::Dual, {{0.5}, {2}}), scalar(space, {-1, 0}))});
  const ConvexFn fStar = conjugateRep(f);

  Rng rng(17);
  for (int k = 0; k < 60; ++k) {
    const ModuleElem x = elem(space, Side::Primal, {{rng.gaussian() * 2}, {rng.gaussian() * 2}});
    const ExtL0Scalar direct = eval(f, x);
    const ExtL0Scalar doubled = conjugateEval(fStar, x);  // f** evaluated from f*
    CHECK(extDeviation(direct, doubled) < 1e-8);
  }

  // V-rep instance: double conjugate via two swaps is bitwise identical.
  const ConvexFn g = ConvexFn::vrep(
      {VPoint(elem(space, Side::Primal, {{0}, {0}}), scalar(space, {1, 2})),
       VPoint(elem(space, Side::Primal, {{1}, {-1}}), scalar(space, {3, 0}))});
  const ConvexFn gBack = conjugateRep(conjugateRep(g));
  REQUIRE(gBack.variant() == FnVariant::VRep);
  for (std::size_t k = 0; k < g.points().size(); ++k) {
    CHECK(maxAbsDiff(gBack.points()[k].p, g.points()[k].p) == 0.0);
    CHECK(maxAbsDiff(gBack.points()[k].beta, g.points()[k].beta) == 0.0);
  }

  // Indicator: f** evaluated through the conjugate pairing matches delta.
  const ModuleElem x0 = elem(space, Side::Primal, {{1}, {2}});
  const ConvexFn delta = ConvexFn::indicator(x0);
  const ConvexFn deltaStar = conjugateRep(delta);
  CHECK(extDeviation(conjugateEval(deltaStar, x0), ExtL0Scalar::constant(space, 0)) < 1e-9);
  CHECK(conjugateEval(deltaStar, elem(space, Side::Primal, {{1}, {2.5}}))[1] == kInf);
}

TEST_CASE("conjugate order reversal powers the V-rep order decision") {
  const auto space = uniformAtomSpace<double>(2);
  const ConvexFn f = absFn(space);
  const ConvexFn g = ConvexFn::hrep(
      {AffineFn(dualConst(space, 1), L0Scalar::one(space)),
       AffineFn(dualConst(space, -1), L0Scalar::one(space))});  // |x| + 1

  CHECK(orderLeq(f, g).holds);
  // Conjugation reverses: g* <= f*.
  CHECK(orderLeqVRep(conjugateRep(g), conjugateRep(f)).holds);
  CHECK_FALSE(orderLeqVRep(conjugateRep(f), conjugateRep(g)).holds);

  CHECK_THROWS_AS(orderLeqVRep(f, conjugateRep(g)), StructuralError);
}
