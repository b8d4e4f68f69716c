#include <doctest.h>

#include <limits>
#include <vector>

#include <ranconv/ranconv.hpp>

#include "test_util.hpp"

using namespace ranconv;
using rctest::elem;
using rctest::event;
using rctest::extScalar;
using rctest::scalar;
using rctest::throwsWith;

namespace {

const double kInf = std::numeric_limits<double>::infinity();

/// f(x) = max{x, -x} = |x| on E = L0(F), d = 1.
ConvexFn absFn(const AtomSpacePtr& space) {
  const L0Scalar zero = L0Scalar::zero(space);
  return ConvexFn::hrep({AffineFn(ModuleElem::constant(space, Eigen::VectorXd::Ones(1), Side::Dual), zero),
                         AffineFn(ModuleElem::constant(space, -Eigen::VectorXd::Ones(1), Side::Dual), zero)});
}

ConvexFn shifted(const ConvexFn& f, double c) {
  std::vector<AffineFn> pieces;
  for (const auto& h : f.pieces()) pieces.emplace_back(h.u, h.alpha + c);
  std::vector<HalfSpace> dom = f.domain();
  return ConvexFn::hrep(std::move(pieces), std::move(dom));
}

}  // namespace

TEST_CASE("H-rep evaluation is the per-atom max of the pieces") {
  const auto space = uniformAtomSpace<double>(2);
  const ConvexFn f = absFn(space);
  CHECK(f.side() == Side::Primal);  // derived from the stored slope tags

  const ModuleElem x = elem(space, Side::Primal, {{2}, {-3}});
  CHECK(eval(f, x) == extScalar(space, {2, 3}));
  CHECK(eval(f, ModuleElem::zero(space, 1, Side::Primal)) == extScalar(space, {0, 0}));
}

TEST_CASE("H-rep domains contribute +inf off-domain, per atom") {
  const auto space = uniformAtomSpace<double>(2);
  const ConvexFn f = ConvexFn::hrep(
      {AffineFn(ModuleElem::constant(space, Eigen::VectorXd::Ones(1), Side::Dual),
                L0Scalar::zero(space))},
      {HalfSpace(ModuleElem::constant(space, Eigen::VectorXd::Ones(1), Side::Dual),
                 L0Scalar::one(space))});  // domain x <= 1

  CHECK(eval(f, elem(space, Side::Primal, {{2}, {-3}})) == extScalar(space, {kInf, -3}));
  CHECK(eval(f, elem(space, Side::Primal, {{1}, {0}})) == extScalar(space, {1, 0}));
}

TEST_CASE("improper domains are rejected at construction") {
  const auto space = uniformAtomSpace<double>(2);
  const ModuleElem one = ModuleElem::constant(space, Eigen::VectorXd::Ones(1), Side::Dual);
  const L0Scalar minusOne = L0Scalar::constant(space, -1);
  // x <= -1 and -x <= -1 cannot both hold.
  CHECK_THROWS_AS(ConvexFn::hrep({AffineFn(one, L0Scalar::zero(space))},
                                 {HalfSpace(one, minusOne),
                                  HalfSpace(ModuleElem::constant(space, -Eigen::VectorXd::Ones(1),
                                                                 Side::Dual),
                                            minusOne)}),
                  PreconditionError);
}

TEST_CASE("V-rep evaluation is the lower convex envelope (LP per atom)") {
  const auto space = uniformAtomSpace<double>(2);

  // Points (1, 0) and (-1, 0): the indicator of [-1, 1].
  const ConvexFn g = ConvexFn::vrep(
      {VPoint(elem(space, Side::Primal, {{1}, {1}}), L0Scalar::zero(space)),
       VPoint(elem(space, Side::Primal, {{-1}, {-1}}), L0Scalar::zero(space))});
  CHECK(eval(g, ModuleElem::zero(space, 1, Side::Primal)) == extScalar(space, {0, 0}));
  CHECK(eval(g, elem(space, Side::Primal, {{2}, {0.5}})) == extScalar(space, {kInf, 0}));

  // Weighted points (0, 1) and (1, 3): interpolation at 0.5 gives 2.
  const ConvexFn h = ConvexFn::vrep(
      {VPoint(ModuleElem::zero(space, 1, Side::Primal), L0Scalar::one(space)),
       VPoint(elem(space, Side::Primal, {{1}, {1}}), L0Scalar::constant(space, 3))});
  const auto at = [&](double z) {
    return eval(h, ModuleElem::constant(space, Eigen::VectorXd::Constant(1, z), Side::Primal));
  };
  CHECK(extDeviation(at(0.5), extScalar(space, {2, 2})) < 1e-9);
  CHECK(extDeviation(at(0.0), extScalar(space, {1, 1})) < 1e-9);
  CHECK(extDeviation(at(1.0), extScalar(space, {3, 3})) < 1e-9);
  CHECK(at(-0.5) == ExtL0Scalar::plusInf(space));
}

TEST_CASE("indicator functions evaluate to the delta pattern per atom") {
  const auto space = uniformAtomSpace<double>(3);
  const ModuleElem x0 = elem(space, Side::Primal, {{1, 2}, {0, 0}, {-1, 3}});
  const ConvexFn delta = ConvexFn::indicator(x0);
  CHECK(delta.variant() == FnVariant::Indicator);

  CHECK(eval(delta, x0) == extScalar(space, {0, 0, 0}));

  const ModuleElem other = elem(space, Side::Primal, {{0, 0}, {5, 5}, {0, 0}});
  const Event A = event(space, {true, false, true});
  CHECK(eval(delta, glue(A, x0, other)) == extScalar(space, {0, kInf, 0}));
}

TEST_CASE("evaluation enforces the side and shape discipline") {
  const auto space = uniformAtomSpace<double>(2);
  const ConvexFn f = absFn(space);
  CHECK_THROWS_AS(eval(f, elem(space, Side::Dual, {{1}, {1}})), StructuralError);
  CHECK_THROWS_AS(eval(f, elem(space, Side::Primal, {{1, 0}, {1, 0}})), StructuralError);
  // Atom spaces compare structurally, so the mismatch needs different weights.
  const auto other = makeAtomSpace(std::vector<double>{0.3, 0.7});
  CHECK_THROWS_AS(eval(f, ModuleElem::zero(other, 1, Side::Primal)), StructuralError);
}

TEST_CASE("gluing convex functions matches gluing their values exactly") {
  const auto space = uniformAtomSpace<double>(2);
  const Event A = event(space, {true, false});
  const ConvexFn f = absFn(space);
  const ConvexFn g = shifted(absFn(space), 2.5);

  const ConvexFn fg = glue(A, f, g);
  Rng rng(7);
  for (int k = 0; k < 25; ++k) {
    const ModuleElem x = elem(space, Side::Primal, {{rng.gaussian()}, {rng.gaussian()}});
    CHECK(extDeviation(eval(fg, x), glue(A, eval(f, x), eval(g, x))) == 0.0);
  }

  // Indicators glue through their points.
  const ModuleElem p = elem(space, Side::Primal, {{1}, {2}});
  const ModuleElem q = elem(space, Side::Primal, {{-1}, {-2}});
  const ConvexFn di = glue(A, ConvexFn::indicator(p), ConvexFn::indicator(q));
  CHECK(eval(di, glue(A, p, q)) == extScalar(space, {0, 0}));

  // V-reps refuse to glue; mixed variants refuse too.
  const ConvexFn v = ConvexFn::vrep({VPoint(p, L0Scalar::zero(space))});
  CHECK_THROWS_AS(glue(A, v, v), StructuralError);
  CHECK_THROWS_AS(glue(A, f, ConvexFn::indicator(p)), StructuralError);
}

TEST_CASE("order decisions return events and replayable witnesses") {
  const auto space = uniformAtomSpace<double>(2);
  const ConvexFn f = absFn(space);
  const ConvexFn g = shifted(f, 1.0);

  const auto ok = orderLeq(f, g);
  CHECK(ok.holds);
  CHECK(ok.holdsEvent.all());
  CHECK_FALSE(ok.witness.has_value());

  const auto bad = orderLeq(g, f);
  CHECK_FALSE(bad.holds);
  CHECK_FALSE(bad.holdsEvent.any());
  REQUIRE(bad.witness.has_value());
  const auto& w = *bad.witness;
  const double lhs = eval(g, w.point)[w.atom];
  const double rhs = eval(f, w.point)[w.atom];
  CHECK(lhs > rhs + 1e-9);  // the witness replays the violation

  // Event-level verdict: g' sits above f only on A.
  const Event A = event(space, {true, false});
  const ConvexFn gp = glue(A, shifted(f, 1.0), shifted(f, -1.0));
  const auto mixed = orderLeq(f, gp);
  CHECK_FALSE(mixed.holds);
  CHECK(mixed.holdsEvent == A);
}

TEST_CASE("order decisions account for domains as +inf regions") {
  const auto space = uniformAtomSpace<double>(2);
  const ModuleElem one = ModuleElem::constant(space, Eigen::VectorXd::Ones(1), Side::Dual);
  const ModuleElem minusOne = ModuleElem::constant(space, -Eigen::VectorXd::Ones(1), Side::Dual);
  const auto box = [&](double r) {
    return std::vector<HalfSpace>{HalfSpace(one, L0Scalar::constant(space, r)),
                                  HalfSpace(minusOne, L0Scalar::constant(space, r))};
  };
  const std::vector<AffineFn> id = {AffineFn(one, L0Scalar::zero(space))};

  const ConvexFn wide = ConvexFn::hrep(id, box(2.0));
  const ConvexFn narrowAbove = ConvexFn::hrep({AffineFn(one, L0Scalar::one(space))}, box(1.0));

  // f <= g needs dom(g) inside dom(f): values +inf off dom(f) break it.
  CHECK(orderLeq(wide, narrowAbove).holds);
  CHECK_FALSE(orderLeq(narrowAbove, wide).holds);
  const ConvexFn narrowBelow = ConvexFn::hrep(id, box(1.0));
  CHECK_FALSE(orderLeq(narrowBelow, wide).holds);  // wide is finite where narrow is not
}

TEST_CASE("affine order decomposition recovers slope equality and intercept order") {
  const auto space = uniformAtomSpace<double>(2);
  const ModuleElem u = elem(space, Side::Dual, {{2, -1}, {0, 3}});
  const AffineFn h1(u, scalar(space, {-1, 0}));
  const AffineFn h2(u, scalar(space, {0, 0}));

  const auto facts = decomposeAffineOrder(h1, h2);
  CHECK(facts.equalSlopes);
  CHECK(facts.interceptLeq);

  CHECK_THROWS_AS(decomposeAffineOrder(h2, h1), PreconditionError);
}

TEST_CASE("subdifferential coefficients are recovered per atom") {
  const auto space = uniformAtomSpace<double>(2);
  const auto dual = [&](double v) {
    return ModuleElem::constant(space, Eigen::VectorXd::Constant(1, v), Side::Dual);
  };
  const L0Scalar zero = L0Scalar::zero(space);

  // u1 = 2, u2 = 0, u = 1 -> mu = 1/2 on every atom.
  const AffineFn h1(dual(2), zero);
  const AffineFn h2(dual(0), zero);
  const AffineFn h(dual(1), L0Scalar::constant(space, -0.25));
  const L0Scalar mu = subdiffMu(h, h1, h2);
  CHECK(maxAbsDiff(mu, L0Scalar::constant(space, 0.5)) < 1e-9);

  // Endpoints and the per-atom mixed case.
  const AffineFn hEnd(dual(2), L0Scalar::constant(space, -0.5));
  CHECK(maxAbsDiff(subdiffMu(hEnd, h1, h2), L0Scalar::one(space)) < 1e-9);

  const Event A = event(space, {true, false});
  const AffineFn hMix(glue(A, dual(2), dual(0)), L0Scalar::constant(space, -0.5));
  CHECK(maxAbsDiff(subdiffMu(hMix, h1, h2), glue(A, L0Scalar::one(space), zero)) < 1e-9);

  // Equal slopes pick mu = 1 by convention.
  const AffineFn g1(dual(3), zero);
  const AffineFn g2(dual(3), zero);
  const AffineFn gh(dual(3), L0Scalar::constant(space, -1));
  CHECK(maxAbsDiff(subdiffMu(gh, g1, g2), L0Scalar::one(space)) < 1e-12);

  // h must actually sit below sup{h1, h2}.
  CHECK_THROWS_AS(subdiffMu(AffineFn(dual(1), L0Scalar::constant(space, 10)), h1, h2),
                  PreconditionError);
}

TEST_CASE("hull membership decides per atom with witnesses") {
  const auto space = uniformAtomSpace<double>(2);
  const std::vector<ModuleElem> xs = {elem(space, Side::Primal, {{0}, {0}}),
                                      elem(space, Side::Primal, {{2}, {2}})};

  const auto inside = hullMembership(elem(space, Side::Primal, {{1}, {0.5}}), xs);
  CHECK(inside.holds);
  CHECK(inside.holdsEvent.all());

  const auto outside = hullMembership(elem(space, Side::Primal, {{3}, {1}}), xs);
  CHECK_FALSE(outside.holds);
  CHECK(outside.holdsEvent == event(space, {false, true}));
  REQUIRE(outside.witness.has_value());
  CHECK(outside.witness->atom == 0);

  // Single-point family: membership means equality.
  const std::vector<ModuleElem> one = {xs[1]};
  CHECK(hullMembership(xs[1], one).holds);
  CHECK_FALSE(hullMembership(xs[0], one).holds);

  CHECK_THROWS_AS(hullMembership(xs[0], std::vector<ModuleElem>{}), StructuralError);
}
