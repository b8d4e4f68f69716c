#include <doctest.h>

#include <limits>

#include <ranconv/lp.hpp>

using namespace ranconv;

namespace {

using Vec = Eigen::VectorXd;

Vec vec(std::initializer_list<double> vs) {
  Vec v(static_cast<Index>(vs.size()));
  Index i = 0;
  for (double x : vs) v[i++] = x;
  return v;
}

}  // namespace

TEST_CASE("a one-constraint maximization lands on the boundary") {
  auto p = LPProblem::withFreeVars(1);
  p.c << 1;
  p.addLeq(vec({1}), 3.0);
  const auto r = solve(p);
  REQUIRE(r.status == LPStatus::Optimal);
  CHECK(r.value == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(r.x[0] == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(r.iterations > 0);
}

TEST_CASE("equality rows combine with free variables") {
  // x + y = 1, x - y = 0 -> x = y = 1/2; maximize x.
  auto p = LPProblem::withFreeVars(2);
  p.c << 1, 0;
  p.addEq(vec({1, 1}), 1.0);
  p.addEq(vec({1, -1}), 0.0);
  const auto r = solve(p);
  REQUIRE(r.status == LPStatus::Optimal);
  CHECK(r.x[0] == doctest::Approx(0.5));
  CHECK(r.x[1] == doctest::Approx(0.5));
}

TEST_CASE("variable bounds are honored in both directions") {
  const double inf = std::numeric_limits<double>::infinity();

  // Doubly bounded: -2 <= x <= 5.
  auto p = LPProblem::withFreeVars(1);
  p.c << 1;
  p.lower << -2;
  p.upper << 5;
  auto r = solve(p);
  REQUIRE(r.status == LPStatus::Optimal);
  CHECK(r.value == doctest::Approx(5.0));

  p.c << -1;  // now push down to the lower bound
  r = solve(p);
  REQUIRE(r.status == LPStatus::Optimal);
  CHECK(r.x[0] == doctest::Approx(-2.0));

  // Upper bound only (mirrored variable).
  auto q = LPProblem::withFreeVars(1);
  q.c << 1;
  q.lower << -inf;
  q.upper << 4;
  r = solve(q);
  REQUIRE(r.status == LPStatus::Optimal);
  CHECK(r.value == doctest::Approx(4.0));

  // Lower bound only (shifted variable): minimize x subject to x >= 1.
  auto s = LPProblem::withFreeVars(1);
  s.c << -1;
  s.lower << 1;
  r = solve(s);
  REQUIRE(r.status == LPStatus::Optimal);
  CHECK(r.x[0] == doctest::Approx(1.0));
}

TEST_CASE("phase one detects infeasibility") {
  auto p = LPProblem::withFreeVars(1);
  p.lower << 0;
  p.addLeq(vec({1}), -1.0);
  CHECK(solve(p).status == LPStatus::Infeasible);

  // Contradictory equalities over free variables.
  auto q = LPProblem::withFreeVars(2);
  q.addEq(vec({1, 1}), 1.0);
  q.addEq(vec({1, 1}), 2.0);
  CHECK(solve(q).status == LPStatus::Infeasible);
}

TEST_CASE("unbounded problems come with a validated certificate ray") {
  auto p = LPProblem::withFreeVars(2);
  p.c << 1, 0;
  p.addLeq(vec({0, 1}), 1.0);
  const auto r = solve(p);
  REQUIRE(r.status == LPStatus::Unbounded);
  REQUIRE(r.ray.size() == 2);
  CHECK(p.c.dot(r.ray) > 0);        // objective improves along the ray
  CHECK(r.ray[1] <= 1e-9);          // the constraint row stays satisfied

  // Feasible and unbounded with a binding row on the way.
  auto q = LPProblem::withFreeVars(1);
  q.c << 1;
  q.lower << 0;
  CHECK(solve(q).status == LPStatus::Unbounded);
}

TEST_CASE("degenerate ties terminate under Bland's rule (Beale's example)") {
  auto p = LPProblem::withFreeVars(4);
  p.c << 0.75, -150, 0.02, -6;
  p.lower.setZero();
  p.addLeq(vec({0.25, -60, -0.04, 9}), 0.0);
  p.addLeq(vec({0.5, -90, -0.02, 3}), 0.0);
  p.addLeq(vec({0, 0, 1, 0}), 1.0);
  const auto r = solve(p);
  REQUIRE(r.status == LPStatus::Optimal);
  CHECK(r.value == doctest::Approx(0.05).epsilon(1e-9));
  CHECK(r.x[0] == doctest::Approx(1.0 / 25).epsilon(1e-9));
  CHECK(r.x[2] == doctest::Approx(1.0));
}

TEST_CASE("the iteration cap turns runaway solves into numerical failures") {
  auto p = LPProblem::withFreeVars(4);
  p.c << 0.75, -150, 0.02, -6;
  p.lower.setZero();
  p.addLeq(vec({0.25, -60, -0.04, 9}), 0.0);
  p.addLeq(vec({0.5, -90, -0.02, 3}), 0.0);
  p.addLeq(vec({0, 0, 1, 0}), 1.0);
  LPOptions opts;
  opts.iterCapFactor = 0;
  const auto r = solve(p, opts);
  CHECK(r.status == LPStatus::NumericalFailure);
  CHECK_FALSE(r.note.empty());
}

TEST_CASE("returned optimizers satisfy every row and bound") {
  // A slightly larger instance exercising mixed rows and bounds together.
  auto p = LPProblem::withFreeVars(3);
  p.c << 2, 1, -1;
  p.lower << 0, -1, -std::numeric_limits<double>::infinity();
  p.upper << 4, 1, std::numeric_limits<double>::infinity();
  p.addLeq(vec({1, 1, 1}), 6.0);
  p.addLeq(vec({1, -1, 0}), 2.0);
  p.addEq(vec({0, 1, 2}), 0.5);
  const auto r = solve(p);
  REQUIRE(r.status == LPStatus::Optimal);
  for (const auto& row : p.rows) {
    const double ax = row.a.dot(r.x);
    if (row.rel == Rel::Leq) CHECK(ax <= row.b + 1e-9);
    else CHECK(ax == doctest::Approx(row.b).epsilon(1e-9));
  }
  for (Index j = 0; j < 3; ++j) {
    CHECK(r.x[j] >= p.lower[j] - 1e-9);
    CHECK(r.x[j] <= p.upper[j] + 1e-9);
  }
  // Optimum: x1 = 1, x2 = -0.25 from the equality, x0 = 3 from x0 - x1 <= 2.
  CHECK(r.x[0] == doctest::Approx(3.0));
  CHECK(r.value == doctest::Approx(7.25));
}

TEST_CASE("problem construction rejects empty variable sets") {
  CHECK_THROWS_AS(LPProblem::withFreeVars(0), StructuralError);
}
