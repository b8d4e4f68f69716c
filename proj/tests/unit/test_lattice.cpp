#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include <ranconv/ranconv.hpp>

#include "test_util.hpp"

using namespace ranconv;
using rctest::event;
using rctest::extScalar;
using rctest::scalar;

namespace {
const double kInf = std::numeric_limits<double>::infinity();
}  // namespace

TEST_CASE("atom spaces validate their probabilities") {
  const auto space = makeAtomSpace(std::vector<double>{0.2, 0.3, 0.5});
  CHECK(space->atomCount() == 3);
  CHECK(space->prob(0) == doctest::Approx(0.2));
  CHECK(space->prob(2) == doctest::Approx(0.5));

  CHECK_THROWS_AS(makeAtomSpace(std::vector<double>{0.5, 0.6}), StructuralError);   // sums past one
  CHECK_THROWS_AS(makeAtomSpace(std::vector<double>{1.5, -0.5}), StructuralError);  // nonpositive atom
  CHECK_THROWS_AS(makeAtomSpace<double>(std::vector<double>{}), StructuralError);
  CHECK_THROWS_AS(uniformAtomSpace<double>(0), StructuralError);
}

TEST_CASE("events support boolean algebra and probability") {
  const auto space = makeAtomSpace(std::vector<double>{0.2, 0.3, 0.5});
  const Event A = event(space, {true, false, true});
  const Event B = event(space, {true, true, false});

  CHECK(A.prob() == doctest::Approx(0.7));
  CHECK((A & B) == event(space, {true, false, false}));
  CHECK((A | B) == event(space, {true, true, true}));
  CHECK(A.complement() == event(space, {false, true, false}));
  CHECK(A.contains(0));
  CHECK_FALSE(A.contains(1));
  CHECK(Event::full(space).all());
  CHECK_FALSE(Event::none(space).any());
}

TEST_CASE("sup and inf are per-atom and satisfy the lattice laws exactly") {
  const auto space = uniformAtomSpace<double>(3);
  const ExtL0Scalar xi = extScalar(space, {1, 5, 2});
  const ExtL0Scalar eta = extScalar(space, {3, 4, 2});
  const ExtL0Scalar zeta = extScalar(space, {-1, 9, 0});

  const auto sup = [](const ExtL0Scalar& a, const ExtL0Scalar& b) {
    return supFamily<double>({a, b});
  };
  const auto inf = [](const ExtL0Scalar& a, const ExtL0Scalar& b) {
    return infFamily<double>({a, b});
  };

  CHECK(sup(xi, eta) == extScalar(space, {3, 5, 2}));
  CHECK(inf(xi, eta) == extScalar(space, {1, 4, 2}));

  // Commutativity, associativity, absorption, idempotence: exact equality.
  CHECK(sup(xi, eta) == sup(eta, xi));
  CHECK(sup(sup(xi, eta), zeta) == sup(xi, sup(eta, zeta)));
  CHECK(sup(xi, inf(xi, eta)) == xi);
  CHECK(inf(xi, sup(xi, eta)) == xi);
  CHECK(sup(xi, xi) == xi);

  // Distributivity holds in this (totally ordered per atom) lattice.
  CHECK(sup(xi, inf(eta, zeta)) == inf(sup(xi, eta), sup(xi, zeta)));

  // Larger families reduce per atom.
  const ExtL0Scalar top = supFamily<double>({xi, eta, zeta, extScalar(space, {0, 0, 7})});
  CHECK(top == extScalar(space, {3, 9, 7}));

  CHECK_THROWS_AS(supFamily<double>({}), StructuralError);
  CHECK_THROWS_AS(infFamily<double>({}), StructuralError);

  // Atom spaces compare structurally, so a genuinely different measure is needed.
  const auto other = makeAtomSpace(std::vector<double>{0.2, 0.3, 0.5});
  CHECK_THROWS_AS(supFamily<double>({xi, ExtL0Scalar::plusInf(other)}), StructuralError);
}

TEST_CASE("order comparisons are exact, with per-atom events") {
  const auto space = uniformAtomSpace<double>(3);
  const ExtL0Scalar xi = extScalar(space, {1, 5, 2});
  const ExtL0Scalar eta = extScalar(space, {3, 4, 2});

  CHECK(leqEvent(xi, eta) == event(space, {true, false, true}));
  CHECK_FALSE(leq(xi, eta));
  CHECK(leq(infFamily<double>({xi, eta}), xi));
  CHECK(geqEvent(xi, eta) == event(space, {false, true, true}));

  const L0Scalar s = scalar(space, {0, -1, 2});
  CHECK(supportEvent(s) == event(space, {false, false, true}));
  CHECK(eqZeroEvent(s) == event(space, {true, false, false}));

  // No epsilon: a one-ulp-scale perturbation flips the verdict.
  const ExtL0Scalar nudged = extScalar(space, {1 + 1e-15, 5, 2});
  CHECK_FALSE(leq(nudged, extScalar(space, {1, 5, 2})));
}

TEST_CASE("gluing takes xi on A and eta elsewhere, exactly") {
  const auto space = uniformAtomSpace<double>(3);
  const Event A = event(space, {true, false, true});
  const L0Scalar xi = scalar(space, {10, 20, 30});
  const L0Scalar eta = scalar(space, {-1, -2, -3});

  CHECK(glue(A, xi, eta) == scalar(space, {10, -2, 30}));
  CHECK(glue(Event::full(space), xi, eta) == xi);
  CHECK(glue(Event::none(space), xi, eta) == eta);

  const ExtL0Scalar pinf = ExtL0Scalar::plusInf(space);
  CHECK(glue(A, pinf, ExtL0Scalar(eta)) == extScalar(space, {kInf, -2, kInf}));
}

TEST_CASE("extended arithmetic refuses the indeterminate form and uses 0*inf=0") {
  const auto space = uniformAtomSpace<double>(2);
  const ExtL0Scalar pinf = ExtL0Scalar::plusInf(space);
  const ExtL0Scalar minf = ExtL0Scalar::minusInf(space);
  const ExtL0Scalar five = ExtL0Scalar::constant(space, 5);

  CHECK_THROWS_AS(pinf + minf, StructuralError);
  CHECK_THROWS_AS(pinf - pinf, StructuralError);
  CHECK(pinf + five == pinf);
  CHECK(minf + five == minf);

  CHECK(0.0 * pinf == ExtL0Scalar::constant(space, 0));
  CHECK(0.0 * minf == ExtL0Scalar::constant(space, 0));
  CHECK(pinf * ExtL0Scalar::constant(space, 0) == ExtL0Scalar::constant(space, 0));
  CHECK(2.0 * pinf == pinf);
  CHECK(-1.0 * pinf == minf);

  // Mixed per-atom case: the error names the offending atom only when hit.
  const ExtL0Scalar mixed = extScalar(space, {kInf, 1});
  const ExtL0Scalar mixedNeg = extScalar(space, {-kInf, 2});
  CHECK_THROWS_AS(mixed + mixedNeg, StructuralError);
  CHECK(mixed + five == extScalar(space, {kInf, 6}));

  CHECK_THROWS_AS(ExtL0Scalar(space, Eigen::ArrayXd::Constant(2, std::nan(""))),
                  StructuralError);
  CHECK_THROWS_AS(L0Scalar(space, Eigen::ArrayXd::Constant(2, kInf)), StructuralError);

  CHECK_THROWS_AS(mixed.toFinite(), StructuralError);
  CHECK_THROWS_AS(pinf.toFinite(), StructuralError);
  CHECK(five.toFinite() == L0Scalar::constant(space, 5));
  CHECK(five.isFinite());
  CHECK_FALSE(mixed.isFinite());
}

TEST_CASE("sup is translation invariant in exact floating point") {
  const auto space = uniformAtomSpace<double>(2);
  Rng rng(101);
  for (int k = 0; k < 200; ++k) {
    Eigen::ArrayXd a(2), b(2);
    a << rng.gaussian(), rng.gaussian();
    b << rng.gaussian(), rng.gaussian();
    const double c = rng.gaussian();
    const ExtL0Scalar xi(space, std::move(a));
    const ExtL0Scalar eta(space, std::move(b));
    const ExtL0Scalar shift = ExtL0Scalar::constant(space, c);
    CHECK(supFamily<double>({xi + shift, eta + shift}) ==
          supFamily<double>({xi, eta}) + shift);
  }
}

TEST_CASE("convergence in probability is decided on the prefix with a 1-based index") {
  const auto space = uniformAtomSpace<double>(2);
  const L0Scalar zero = L0Scalar::zero(space);

  // x_k = 1/k: |x_k| < 0.1 from k = 11 onward.
  std::vector<L0Scalar> seq;
  for (int k = 1; k <= 20; ++k) seq.push_back(L0Scalar::constant(space, 1.0 / k));
  const auto v = convergesInProb(seq, zero, 0.1, 0.5);
  CHECK(v.converged);
  CHECK(v.decidedAt == 11);

  // The alternating sequence never settles (its last element is still far).
  std::vector<L0Scalar> alt;
  for (int k = 1; k <= 20; ++k) alt.push_back(L0Scalar::constant(space, k % 2 ? 0.0 : 1.0));
  const auto w = convergesInProb(alt, zero, 0.5, 0.25);
  CHECK_FALSE(w.converged);
  CHECK(w.decidedAt == 0);

  CHECK_THROWS_AS(convergesInProb(std::vector<L0Scalar>{}, zero, 0.1, 0.5), StructuralError);
  CHECK_THROWS_AS(convergesInProb(seq, zero, 0.0, 0.5), ParameterError);
  CHECK_THROWS_AS(convergesInProb(seq, zero, 0.1, 1.0), ParameterError);
}

TEST_CASE("convergence in probability is weaker than every-atom convergence") {
  // Atom 1 stays at 1 forever, but it only carries probability 0.4 < lambda.
  const auto space = makeAtomSpace(std::vector<double>{0.6, 0.4});
  std::vector<L0Scalar> seq;
  for (int k = 1; k <= 20; ++k) {
    Eigen::ArrayXd a(2);
    a << 1.0 / k, 1.0;
    seq.emplace_back(space, std::move(a));
  }
  const auto v = convergesInProb(seq, L0Scalar::zero(space), 0.1, 0.5);
  CHECK(v.converged);  // P{|x_k| < 0.1} = 0.6 > 1 - 0.5 once 1/k < 0.1
  CHECK(v.decidedAt == 11);

  // With a stricter lambda the stuck atom blocks the verdict.
  const auto strict = convergesInProb(seq, L0Scalar::zero(space), 0.1, 0.3);
  CHECK_FALSE(strict.converged);
}

TEST_CASE("extDeviation treats matching infinities as agreement") {
  const auto space = uniformAtomSpace<double>(2);
  const ExtL0Scalar a = extScalar(space, {kInf, 1});
  const ExtL0Scalar b = extScalar(space, {kInf, 1.25});
  CHECK(extDeviation(a, b) == doctest::Approx(0.25));
  CHECK(extDeviation(a, extScalar(space, {2, 1})) == kInf);
  CHECK(extDeviation(a, extScalar(space, {-kInf, 1})) == kInf);
  CHECK(extDeviation(a, a) == 0.0);
}
