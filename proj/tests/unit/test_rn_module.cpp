#include <doctest.h>

#include <Eigen/SVD>
#include <vector>

#include <ranconv/ranconv.hpp>

#include "test_util.hpp"

using namespace ranconv;
using rctest::elem;
using rctest::scalar;
using rctest::throwsWith;

namespace {

ModuleMap mapOf(const AtomSpacePtr& space, std::vector<MatrixX<double>> mats) {
  return ModuleMap(space, std::move(mats));
}

}  // namespace

TEST_CASE("the L0 norm is the per-atom Euclidean norm") {
  const auto space = uniformAtomSpace<double>(2);
  const ModuleElem x = elem(space, Side::Primal, {{3, 4}, {0, 0}});
  CHECK(l0Norm(x) == scalar(space, {5, 0}));

  // Both RN-module norm axioms, on pinned values.
  const L0Scalar xi = scalar(space, {2, -3});
  CHECK(l0Norm(xi * x) == scalar(space, {10, 0}));          // |xi| ||x||
  const ModuleElem y = elem(space, Side::Primal, {{0, 1}, {1, 0}});
  const auto lhs = l0Norm(x + y).values();
  const auto rhs = (l0Norm(x) + l0Norm(y)).values();
  CHECK((lhs <= rhs + 1e-12).all());                        // triangle inequality
}

TEST_CASE("module element invariants and views") {
  const auto space = uniformAtomSpace<double>(2);
  MatrixX<double> bad(2, 2);
  bad << 1, 2, std::numeric_limits<double>::infinity(), 3;
  CHECK_THROWS_AS(ModuleElem(space, std::move(bad), Side::Primal), StructuralError);

  const ModuleElem x = elem(space, Side::Primal, {{1, 2}, {3, 4}});
  CHECK(x.dim() == 2);
  CHECK(x.atom(1)(0) == 3);
  CHECK(x.side() == Side::Primal);
  CHECK(x.asDual().side() == Side::Dual);
  CHECK(x.asSide(Side::Primal).side() == Side::Primal);
  CHECK(maxAbsDiff(x.asDual().asPrimal(), x) == 0.0);
}

TEST_CASE("the pairing is the per-atom dot product across sides") {
  const auto space = uniformAtomSpace<double>(2);
  const ModuleElem u = elem(space, Side::Dual, {{1, 0}, {0, 1}});
  const ModuleElem x = elem(space, Side::Primal, {{2, 3}, {4, 5}});
  CHECK(pairing(u, x) == scalar(space, {2, 5}));
  CHECK(pairing(x, u) == scalar(space, {2, 5}));  // either argument order

  CHECK_THROWS_AS(pairing(u, u), StructuralError);  // two dual elements
  CHECK_THROWS_AS(pairing(x.asDual(), u), StructuralError);
  CHECK(dot(u, x.asDual()) == scalar(space, {2, 5}));  // dot ignores sides

  // Bilinearity and stability over a seeded sweep.
  Rng rng(55);
  for (int k = 0; k < 50; ++k) {
    MatrixX<double> cu = MatrixX<double>::NullaryExpr(3, 2, [&] { return rng.gaussian(); });
    MatrixX<double> cv = MatrixX<double>::NullaryExpr(3, 2, [&] { return rng.gaussian(); });
    MatrixX<double> cx = MatrixX<double>::NullaryExpr(3, 2, [&] { return rng.gaussian(); });
    const ModuleElem uu(space, std::move(cu), Side::Dual);
    const ModuleElem vv(space, std::move(cv), Side::Dual);
    const ModuleElem xx(space, std::move(cx), Side::Primal);
    Eigen::ArrayXd xiv(2);
    xiv << rng.gaussian(), rng.gaussian();
    const L0Scalar xi(space, std::move(xiv));

    CHECK(maxAbsDiff(pairing(xi * uu + vv, xx), xi * pairing(uu, xx) + pairing(vv, xx)) <
          1e-12);

    // Cauchy-Schwarz per atom.
    CHECK((pairing(uu, xx).abs().values() <=
           (l0Norm(uu) * l0Norm(xx)).values() + 1e-12)
              .all());

    // Stability: pairing(glue(A,u,v), x) = glue(A, <u,x>, <v,x>) exactly.
    MaskArray m(2);
    m << true, false;
    const Event A(space, std::move(m));
    CHECK(pairing(glue(A, uu, vv), xx) == glue(A, pairing(uu, xx), pairing(vv, xx)));
  }
}

TEST_CASE("solvePairing inverts the pairing equation on full-support duals") {
  // d = 1, two atoms: u = (2,4), xi = 1 -> x0 = (1/2, 1/4).
  const auto space = uniformAtomSpace<double>(2);
  const ModuleElem u1 = elem(space, Side::Dual, {{2}, {4}});
  const ModuleElem x1 = solvePairing(u1, L0Scalar::one(space));
  CHECK(x1.side() == Side::Primal);
  CHECK(maxAbsDiff(x1, elem(space, Side::Primal, {{0.5}, {0.25}})) < 1e-15);

  // d = 2: x0 = xi * u / ||u||^2.
  const ModuleElem u2 = elem(space, Side::Dual, {{2, 4}, {1, 0}});
  const L0Scalar xi = scalar(space, {1, 3});
  const ModuleElem x2 = solvePairing(u2, xi);
  CHECK(maxAbsDiff(pairing(u2, x2), xi) < 1e-12);
  CHECK(maxAbsDiff(x2, elem(space, Side::Primal, {{0.1, 0.2}, {3, 0}})) < 1e-15);

  // Zero on one atom: precondition error naming the atom.
  const ModuleElem uz = elem(space, Side::Dual, {{1, 1}, {0, 0}});
  CHECK(throwsWith<PreconditionError>([&] { solvePairing(uz, xi); }, "atom(s) 1"));
}

TEST_CASE("unitElement is the canonical norm-one element") {
  const auto space = uniformAtomSpace<double>(3);
  const ModuleElem e = unitElement(space, 2);
  CHECK(e.atom(0)(0) == 1.0);
  CHECK(e.atom(2)(1) == 0.0);
  CHECK(l0Norm(e) == L0Scalar::one(space));
}

TEST_CASE("module maps apply, compose, invert and glue per atom") {
  const auto space = uniformAtomSpace<double>(2);
  const ModuleMap T = mapOf(space, {2 * MatrixX<double>::Identity(1, 1),
                                    3 * MatrixX<double>::Identity(1, 1)});
  const ModuleElem x = elem(space, Side::Primal, {{5}, {7}});

  CHECK(maxAbsDiff(apply(T, x), elem(space, Side::Primal, {{10}, {21}})) == 0.0);
  CHECK(maxAbsDiff(apply(invert(T), apply(T, x)), x) < 1e-15);
  CHECK(maxAbsDiff(apply(compose(T, invert(T)), x), x) < 1e-15);

  // L0-linearity and stability of apply.
  const L0Scalar xi = scalar(space, {2, -1});
  CHECK(maxAbsDiff(apply(T, xi * x), xi * apply(T, x)) == 0.0);
  MaskArray m(2);
  m << false, true;
  const Event A(space, std::move(m));
  const ModuleElem y = elem(space, Side::Primal, {{-1}, {4}});
  CHECK(maxAbsDiff(apply(T, glue(A, x, y)), glue(A, apply(T, x), apply(T, y))) == 0.0);

  // Singular atom: error naming the atom.
  const ModuleMap S = mapOf(space, {MatrixX<double>::Zero(1, 1),
                                    MatrixX<double>::Identity(1, 1)});
  CHECK(throwsWith<PreconditionError>([&] { invert(S); }, "atom(s) 0"));
  CHECK_THROWS_AS(invert(mapOf(space, {MatrixX<double>::Zero(1, 2),
                                       MatrixX<double>::Zero(1, 2)})),
                  StructuralError);
}

TEST_CASE("adjoint transposes per atom and respects the pairing") {
  const auto space = uniformAtomSpace<double>(2);
  MatrixX<double> m0(2, 2), m1(2, 2);
  m0 << 1, 2, 3, 4;
  m1 << 0, -1, 5, 2;
  const ModuleMap T = mapOf(space, {m0, m1});

  CHECK(adjoint(T).atom(0)(0, 1) == 3.0);

  Rng rng(99);
  for (int k = 0; k < 50; ++k) {
    MatrixX<double> cu = MatrixX<double>::NullaryExpr(2, 2, [&] { return rng.gaussian(); });
    MatrixX<double> cx = MatrixX<double>::NullaryExpr(2, 2, [&] { return rng.gaussian(); });
    const ModuleElem u(space, std::move(cu), Side::Dual);
    const ModuleElem x(space, std::move(cx), Side::Primal);
    CHECK(maxAbsDiff(pairing(apply(adjoint(T), u), x), pairing(u, apply(T, x))) < 1e-12);
  }
}

TEST_CASE("opNorm matches an SVD oracle and is exact on diagonal maps") {
  const auto space = uniformAtomSpace<double>(2);
  MatrixX<double> d0 = MatrixX<double>::Zero(2, 2);
  d0(0, 0) = 3;
  d0(1, 1) = 1;
  const ModuleMap D = mapOf(space, {d0, 0.5 * MatrixX<double>::Identity(2, 2)});
  const L0Scalar n = opNorm(D);
  CHECK(n[0] == doctest::Approx(3.0).epsilon(1e-9));
  CHECK(n[1] == doctest::Approx(0.5).epsilon(1e-9));

  // Independent oracle: largest singular value via Eigen's JacobiSVD.
  Rng rng(123);
  for (int k = 0; k < 100; ++k) {
    std::vector<MatrixX<double>> mats;
    for (Index i = 0; i < 2; ++i)
      mats.push_back(MatrixX<double>::NullaryExpr(3, 3, [&] { return rng.gaussian(); }));
    const ModuleMap T = mapOf(space, mats);
    const L0Scalar got = opNorm(T);
    for (Index i = 0; i < 2; ++i) {
      Eigen::JacobiSVD<MatrixX<double>> svd(mats[static_cast<std::size_t>(i)]);
      CHECK(got[i] == doctest::Approx(svd.singularValues()(0)).epsilon(1e-8));
    }
  }

  // ||T*|| = ||T|| and the defining bound ||Tx|| <= ||T|| ||x||.
  Rng rng2(321);
  for (int k = 0; k < 30; ++k) {
    std::vector<MatrixX<double>> mats;
    for (Index i = 0; i < 2; ++i)
      mats.push_back(MatrixX<double>::NullaryExpr(2, 2, [&] { return rng2.gaussian(); }));
    const ModuleMap T = mapOf(space, mats);
    CHECK(maxAbsDiff(opNorm(T), opNorm(adjoint(T))) < 1e-8);
    MatrixX<double> cx = MatrixX<double>::NullaryExpr(2, 2, [&] { return rng2.gaussian(); });
    const ModuleElem x(space, std::move(cx), Side::Primal);
    CHECK((l0Norm(apply(T, x)).values() <= (opNorm(T) * l0Norm(x)).values() + 1e-8).all());
  }
}

TEST_CASE("maxAbsDiff rejects shape mismatches") {
  const auto space = uniformAtomSpace<double>(2);
  const ModuleElem a = elem(space, Side::Primal, {{1}, {2}});
  const ModuleElem b = elem(space, Side::Primal, {{1, 0}, {2, 0}});
  CHECK_THROWS_AS(maxAbsDiff(a, b), StructuralError);
}
