#include "verify/suites.hpp"

#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <utility>

#include <ranconv/ranconv.hpp>

#include "verify/generators.hpp"

namespace ranconv::verify {
namespace {

/// Accumulates per-trial checks: the worst deviation seen, plus the first
/// failing property with its witness.
class Checker {
 public:
  void bump(double d) { dev_ = std::max(dev_, d); }

  template <typename WitnessFn>
  void within(double d, double tol, const std::string& what, WitnessFn&& witness) {
    bump(d);
    if (d <= tol || failed_) return;
    failed_ = true;
    what_ = what;
    witness_ = witness();
  }

  template <typename WitnessFn>
  void exact(double d, const std::string& what, WitnessFn&& witness) {
    within(d, 0.0, what, std::forward<WitnessFn>(witness));
  }

  template <typename WitnessFn>
  void isTrue(bool ok, const std::string& what, WitnessFn&& witness) {
    if (ok) return;
    bump(1.0);
    if (failed_) return;
    failed_ = true;
    what_ = what;
    witness_ = witness();
  }

  bool failed() const { return failed_; }

  TrialRecord record(int trial) const {
    return failed_ ? TrialRecord::fail(trial, dev_, what_, witness_)
                   : TrialRecord::pass(trial, dev_);
  }

 private:
  double dev_ = 0.0;
  bool failed_ = false;
  std::string what_;
  Json witness_;
};

Json verdictJson(const OrderVerdict& v) {
  Json j{{"holds", v.holds}, {"event", toJson(v.holdsEvent)}};
  if (v.witness) {
    j["witness_point"] = toJson(v.witness->point);
    j["witness_atom"] = v.witness->atom;
    j["witness_note"] = v.witness->note;
  }
  return j;
}

ExtL0Scalar sup2(const ExtL0Scalar& a, const ExtL0Scalar& b) { return supFamily<double>({a, b}); }
ExtL0Scalar inf2(const ExtL0Scalar& a, const ExtL0Scalar& b) { return infFamily<double>({a, b}); }

// ---------------------------------------------------------------------------
// lattice-laws
// ---------------------------------------------------------------------------

TrialRecord latticeTrial(const Scenario& sc, const AtomSpacePtr& space, Rng& rng, int t) {
  Checker c;
  const ExtL0Scalar xi = genExtL0(rng, space, sc.paramScale);
  const ExtL0Scalar eta = genExtL0(rng, space, sc.paramScale);
  const ExtL0Scalar zeta = genExtL0(rng, space, sc.paramScale);
  const auto baseWitness = [&] {
    return Json{{"xi", toJson(xi)}, {"eta", toJson(eta)}, {"zeta", toJson(zeta)}};
  };

  c.exact(extDeviation(sup2(xi, eta), sup2(eta, xi)), "sup commutativity", baseWitness);
  c.exact(extDeviation(inf2(xi, eta), inf2(eta, xi)), "inf commutativity", baseWitness);
  c.exact(extDeviation(sup2(sup2(xi, eta), zeta), sup2(xi, sup2(eta, zeta))),
          "sup associativity", baseWitness);
  c.exact(extDeviation(inf2(inf2(xi, eta), zeta), inf2(xi, inf2(eta, zeta))),
          "inf associativity", baseWitness);
  c.exact(extDeviation(sup2(xi, xi), xi), "sup idempotence", baseWitness);
  c.exact(extDeviation(sup2(xi, inf2(xi, eta)), xi), "sup-inf absorption", baseWitness);
  c.exact(extDeviation(inf2(xi, sup2(xi, eta)), xi), "inf-sup absorption", baseWitness);

  c.isTrue(leq(inf2(xi, eta), xi) && leq(xi, sup2(xi, eta)), "inf <= xi <= sup", baseWitness);
  c.isTrue((leqEvent(xi, eta) | leqEvent(eta, xi)).all(), "per-atom order totality", baseWitness);

  // Translation by a finite field commutes with sup (per-atom monotone
  // rounding makes this exact even in floating point).
  const L0Scalar shift = genL0(rng, space, sc.paramScale);
  c.exact(extDeviation(sup2(xi + shift, eta + shift), sup2(xi, eta) + shift),
          "sup translation invariance",
          [&] { Json j = baseWitness(); j["shift"] = toJson(shift); return j; });

  // A <= chain decided by leq: xi <= xi + |a| <= xi + |a| + |b|.
  const L0Scalar stepA = genL0(rng, space, sc.paramScale).abs();
  const L0Scalar stepB = genL0(rng, space, sc.paramScale).abs();
  const ExtL0Scalar mid = xi + stepA;
  const ExtL0Scalar top = mid + stepB;
  c.isTrue(leq(xi, mid) && leq(mid, top) && leq(xi, top), "transitive chain", baseWitness);

  // Gluing: glue(A, xi, xi) = xi, and glue takes xi on A and eta elsewhere.
  const Event A = genEvent(rng, space);
  c.exact(extDeviation(glue(A, xi, xi), xi), "glue idempotence",
          [&] { Json j = baseWitness(); j["A"] = toJson(A); return j; });
  const ExtL0Scalar mixed = glue(A, xi, eta);
  bool glueOk = true;
  for (Index i = 0; i < space->atomCount(); ++i)
    glueOk = glueOk && (mixed[i] == (A.contains(i) ? xi[i] : eta[i]));
  c.isTrue(glueOk, "glue selects by the event",
           [&] { Json j = baseWitness(); j["A"] = toJson(A); j["glued"] = toJson(mixed); return j; });

  // Support trichotomy of a finite scalar.
  const L0Scalar x = genL0(rng, space, sc.paramScale);
  const Event pos = supportEvent(x);
  const Event neg = supportEvent(-x);
  const Event zero = eqZeroEvent(x);
  c.isTrue((pos | neg | zero).all() && !(pos & neg).any() && !(pos & zero).any() &&
               !(neg & zero).any(),
           "support trichotomy", [&] { return Json{{"x", toJson(x)}}; });

  // The family supremum dominates every member.
  std::vector<ExtL0Scalar> family;
  const int k = 3 + static_cast<int>(rng.below(3));
  for (int i = 0; i < k; ++i) family.push_back(genExtL0(rng, space, sc.paramScale));
  const ExtL0Scalar top2 = supFamily(family);
  bool famOk = true;
  for (const auto& m : family) famOk = famOk && leq(m, top2);
  c.isTrue(famOk, "family supremum dominates members",
           [&] { return Json{{"sup", toJson(top2)}}; });

  return c.record(t);
}

// ---------------------------------------------------------------------------
// rn-axioms
// ---------------------------------------------------------------------------

TrialRecord rnAxiomsTrial(const Scenario& sc, const AtomSpacePtr& space, Rng& rng, int t) {
  Checker c;
  const Index d = sc.dim;
  const ModuleElem x = genElem(rng, space, d, Side::Primal, sc.paramScale);
  const ModuleElem y = genElem(rng, space, d, Side::Primal, sc.paramScale);
  const ModuleElem u = genElem(rng, space, d, Side::Dual, sc.paramScale);
  const L0Scalar xi = genL0(rng, space, sc.paramScale);
  const auto baseWitness = [&] {
    return Json{{"x", toJson(x)}, {"y", toJson(y)}, {"u", toJson(u)}, {"xi", toJson(xi)}};
  };

  c.within(maxAbsDiff(l0Norm(xi * x), xi.abs() * l0Norm(x)), 1e-12, "norm homogeneity",
           baseWitness);
  c.isTrue((l0Norm(x + y).values() <= (l0Norm(x) + l0Norm(y)).values() + 1e-12).all(),
           "triangle inequality", baseWitness);
  c.isTrue(
      (pairing(u, x).abs().values() <= (l0Norm(u) * l0Norm(x)).values() + 1e-12).all(),
      "Cauchy-Schwarz for the pairing", baseWitness);

  // ||z|| = 0 exactly on the atoms where z vanishes.
  const Event A = genEvent(rng, space);
  const ModuleElem z = glue(A, ModuleElem::zero(space, d, Side::Primal), x);
  bool defOk = true;
  for (Index i = 0; i < space->atomCount(); ++i) {
    const bool zeroAtom = (z.atom(i).array() == 0.0).all();
    defOk = defOk && (eqZeroEvent(l0Norm(z)).contains(i) == zeroAtom);
  }
  c.isTrue(defOk, "norm definiteness per atom",
           [&] { Json j = baseWitness(); j["A"] = toJson(A); return j; });

  // Solving <u0, x0> = xi against a full-support u0.
  const ModuleElem u0 = genFullSupportElem(rng, space, d, Side::Dual, sc.paramScale);
  const ModuleElem x0 = solvePairing(u0, xi);
  c.within(maxAbsDiff(pairing(u0, x0), xi), 1e-12, "pairing equation solve",
           [&] { Json j = baseWitness(); j["u0"] = toJson(u0); j["x0"] = toJson(x0); return j; });

  const ModuleMap M = genNonsingularMap(rng, space, d);
  const ModuleMap N = genNonsingularMap(rng, space, d);
  const auto mapWitness = [&] {
    Json j = baseWitness();
    j["M"] = toJson(M);
    j["N"] = toJson(N);
    return j;
  };

  c.within(maxAbsDiff(pairing(u, apply(M, x)), pairing(apply(adjoint(M), u), x)), 1e-10,
           "adjoint pairing identity", mapWitness);
  c.exact(maxAbsDiff(adjoint(adjoint(M)), M), "adjoint involution", mapWitness);
  c.within(maxAbsDiff(apply(invert(M), apply(M, x)), x), 1e-9, "inverse round trip", mapWitness);
  c.within(maxAbsDiff(apply(compose(M, N), x), apply(M, apply(N, x))), 1e-10,
           "composition acts by chaining", mapWitness);
  c.within(maxAbsDiff(invert(adjoint(M)), adjoint(invert(M))), 1e-9,
           "inverse of adjoint is adjoint of inverse", mapWitness);

  const L0Scalar nM = opNorm(M);
  c.within(maxAbsDiff(nM, opNorm(adjoint(M))), sc.tolerance, "adjoint preserves operator norm",
           mapWitness);
  c.isTrue((l0Norm(apply(M, x)).values() <= (nM * l0Norm(x)).values() + sc.tolerance).all(),
           "operator norm bounds the action", mapWitness);

  return c.record(t);
}

// ---------------------------------------------------------------------------
// fenchel-moreau and conjugate-oracle
// ---------------------------------------------------------------------------

ConvexFn genConjInstance(const Scenario& sc, const AtomSpacePtr& space, Rng& rng, int t) {
  switch (t % 3) {
    case 0: {
      ConvexFn f = genHRep(rng, space, sc.dim, sc.piecesMin, sc.piecesMax, Side::Primal,
                           /*withDomain=*/false, sc.paramScale);
      return (t % 2 == 0) ? withDominatedPiece(rng, f) : f;
    }
    case 1:
      return genVRep(rng, space, sc.dim, sc.piecesMin, sc.piecesMax, Side::Primal, sc.paramScale);
    default:
      return ConvexFn::indicator(genElem(rng, space, sc.dim, Side::Primal, sc.paramScale));
  }
}

/// Probe points for a primal-side instance: random Gaussians, plus the points
/// where the interesting branch lives (the indicator's point, a hull member).
std::vector<ModuleElem> conjProbePoints(const Scenario& sc, const AtomSpacePtr& space, Rng& rng,
                                        const ConvexFn& f, Side side) {
  std::vector<ModuleElem> pts;
  if (f.variant() == FnVariant::Indicator && side == f.side()) pts.push_back(f.point());
  if (f.variant() == FnVariant::VRep && side == f.side()) {
    const auto lambda = genSimplexWeights(rng, space, static_cast<Index>(f.points().size()));
    ModuleElem mix = ModuleElem::zero(space, f.dim(), side);
    for (std::size_t k = 0; k < f.points().size(); ++k) mix = mix + lambda[k] * f.points()[k].p;
    pts.push_back(mix);
  }
  while (static_cast<int>(pts.size()) < sc.innerPoints)
    pts.push_back(genElem(rng, space, sc.dim, side, 2.0 * sc.paramScale));
  return pts;
}

TrialRecord fenchelMoreauTrial(const Scenario& sc, const AtomSpacePtr& space, Rng& rng, int t) {
  Checker c;
  const ConvexFn f = genConjInstance(sc, space, rng, t);
  const ConvexFn fStar = conjugateRep(f);
  for (const ModuleElem& x : conjProbePoints(sc, space, rng, f, f.side())) {
    const ExtL0Scalar direct = eval(f, x);
    const ExtL0Scalar doubled = conjugateEval(fStar, x);
    c.within(extDeviation(direct, doubled), sc.tolerance, "double conjugate differs", [&] {
      return Json{{"f", toJson(f)},
                  {"x", toJson(x)},
                  {"f_of_x", toJson(direct)},
                  {"double_conjugate", toJson(doubled)}};
    });
    if (c.failed()) break;
  }
  return c.record(t);
}

TrialRecord conjugateOracleTrial(const Scenario& sc, const AtomSpacePtr& space, Rng& rng, int t) {
  Checker c;
  const ConvexFn f = genConjInstance(sc, space, rng, t);
  const ConvexFn fStar = conjugateRep(f);
  for (const ModuleElem& v : conjProbePoints(sc, space, rng, fStar, fStar.side())) {
    const ExtL0Scalar swapped = eval(fStar, v);
    const ExtL0Scalar definitional = conjugateEval(f, v);
    c.within(extDeviation(swapped, definitional), sc.tolerance,
             "representation swap disagrees with the definitional LP", [&] {
               return Json{{"f", toJson(f)},
                           {"v", toJson(v)},
                           {"swap_value", toJson(swapped)},
                           {"lp_value", toJson(definitional)}};
             });
    if (c.failed()) break;
  }
  return c.record(t);
}

// ---------------------------------------------------------------------------
// comparison
// ---------------------------------------------------------------------------

TrialRecord comparisonTrial(const Scenario& sc, const AtomSpacePtr& space, Rng& rng, int t) {
  Checker c;
  const Index d = sc.dim;

  // Accepted pair: equal slopes, intercept reduced by |gamma| per atom.
  const ModuleElem u = genElem(rng, space, d, Side::Dual, sc.paramScale);
  const L0Scalar alpha = genL0(rng, space, sc.paramScale);
  const L0Scalar gap = genL0(rng, space, sc.paramScale).abs();
  const AffineFn h1(u, alpha - gap);
  const AffineFn h2(u, alpha);
  const auto pairWitness = [&] {
    return Json{{"u", toJson(u)}, {"alpha", toJson(alpha)}, {"gap", toJson(gap)}};
  };

  const auto v1 = orderLeq(ConvexFn::hrep({h1}), ConvexFn::hrep({h2}));
  c.isTrue(v1.holds && v1.holdsEvent.all(), "equal-slope reduction not accepted", [&] {
    Json j = pairWitness();
    j["verdict"] = verdictJson(v1);
    return j;
  });
  const auto facts = decomposeAffineOrder(h1, h2);
  c.isTrue(facts.equalSlopes && facts.interceptLeq, "order decomposition facts", pairWitness);

  // Perturbed slope: guaranteed nonzero perturbation must be rejected, with a
  // replayable witness point.
  ModuleElem delta = genElem(rng, space, d, Side::Dual, sc.paramScale);
  if (maxAbsDiff(delta, ModuleElem::zero(space, d, Side::Dual)) < 1e-3)
    delta = unitElement(space, d, Side::Dual);
  const AffineFn h1p(u + delta, alpha + genL0(rng, space, sc.paramScale));
  const auto v2 = orderLeq(ConvexFn::hrep({h1p}), ConvexFn::hrep({h2}));
  c.isTrue(!v2.holds, "perturbed slope was accepted", [&] {
    Json j = pairWitness();
    j["delta"] = toJson(delta);
    j["verdict"] = verdictJson(v2);
    return j;
  });
  c.isTrue(v2.witness.has_value(), "rejection without witness", [&] { return verdictJson(v2); });
  if (v2.witness) {
    const auto& w = *v2.witness;
    const double lhs = evalAffine(h1p, w.point).values()[w.atom];
    const double rhs = evalAffine(h2, w.point).values()[w.atom];
    c.isTrue(lhs > rhs + 1e-9, "witness does not replay the violation", [&] {
      return Json{{"point", toJson(w.point)}, {"atom", w.atom},
                  {"lhs", jsonNumber(lhs)},   {"rhs", jsonNumber(rhs)},
                  {"note", w.note}};
    });
  }

  // A multi-piece ordered pair, sometimes with domains, must be accepted.
  const ConvexFn g = genHRep(rng, space, d, std::max(2, sc.piecesMin), sc.piecesMax, Side::Primal,
                             /*withDomain=*/t % 3 == 0, sc.paramScale);
  const auto pair = genOrderedPair(rng, g);
  const auto v3 = orderLeq(pair.f, pair.g);
  c.isTrue(v3.holds, "constructed minorant not accepted", [&] {
    return Json{{"f", toJson(pair.f)}, {"g", toJson(pair.g)}, {"verdict", verdictJson(v3)}};
  });

  return c.record(t);
}

// ---------------------------------------------------------------------------
// subdiff-mu
// ---------------------------------------------------------------------------

TrialRecord subdiffMuTrial(const Scenario& sc, const AtomSpacePtr& space, Rng& rng, int t) {
  Checker c;
  const Index d = sc.dim;
  const ModuleElem u1 = genElem(rng, space, d, Side::Dual, sc.paramScale);
  const ModuleElem u2 =
      (t % 5 == 4) ? u1 : genElem(rng, space, d, Side::Dual, sc.paramScale);
  const L0Scalar a1 = genL0(rng, space, sc.paramScale);
  const L0Scalar a2 = genL0(rng, space, sc.paramScale);

  // Target coefficient, with the exact endpoints exercised periodically.
  L0Scalar muStar = genUnitL0(rng, space);
  if (t % 7 == 5) muStar = L0Scalar::zero(space);
  if (t % 7 == 6) muStar = L0Scalar::one(space);

  const L0Scalar one = L0Scalar::one(space);
  const ModuleElem u = muStar * u1 + (one - muStar) * u2;
  const L0Scalar slack = genL0(rng, space, 0.3).abs();
  const L0Scalar alpha = muStar * a1 + (one - muStar) * a2 - slack;
  const AffineFn h(u, alpha);
  const AffineFn h1(u1, a1);
  const AffineFn h2(u2, a2);

  const L0Scalar mu = subdiffMu(h, h1, h2);

  double residual = 0.0;
  for (Index i = 0; i < space->atomCount(); ++i) {
    const Eigen::VectorXd combo = mu[i] * u1.atom(i) + (1.0 - mu[i]) * u2.atom(i);
    residual = std::max(residual, (u.atom(i) - combo).norm());
  }
  const auto witness = [&] {
    return Json{{"u1", toJson(u1)},          {"u2", toJson(u2)}, {"u", toJson(u)},
                {"mu_target", toJson(muStar)}, {"mu", toJson(mu)}};
  };
  c.within(residual, sc.tolerance, "recovered coefficient misses the slope", witness);
  c.isTrue((mu.values() >= 0.0).all() && (mu.values() <= 1.0).all(),
           "coefficient escapes [0,1]", witness);
  return c.record(t);
}

// ---------------------------------------------------------------------------
// hull-membership
// ---------------------------------------------------------------------------

TrialRecord hullTrial(const Scenario& sc, const AtomSpacePtr& space, Rng& rng, int t) {
  Checker c;
  const Index d = sc.dim;
  const Index k = (t % 6 == 5) ? 1 : static_cast<Index>(std::max(2, sc.piecesMin)) +
                                         static_cast<Index>(rng.below(3));
  std::vector<ModuleElem> xs;
  for (Index i = 0; i < k; ++i) xs.push_back(genElem(rng, space, d, Side::Primal, sc.paramScale));

  // A member: random per-atom convex combination of the family.
  const auto lambda = genSimplexWeights(rng, space, k);
  ModuleElem member = ModuleElem::zero(space, d, Side::Primal);
  for (Index i = 0; i < k; ++i) member = member + lambda[static_cast<std::size_t>(i)] * xs[static_cast<std::size_t>(i)];

  // An outsider: push far beyond the family's largest norm on every atom.
  double reach = 0.0;
  for (const auto& p : xs) reach = std::max(reach, l0Norm(p).values().maxCoeff());
  ModuleElem dir = genFullSupportElem(rng, space, d, Side::Primal);
  ArrayX<double> inv = l0Norm(dir).values().inverse() * (2.0 * reach + 5.0);
  const ModuleElem outside = member + L0Scalar(space, std::move(inv)) * dir;

  const auto inVerdict = hullMembership(member, xs);
  const auto outVerdict = hullMembership(outside, xs);
  const auto witness = [&] {
    Json fam = Json::array();
    for (const auto& p : xs) fam.push_back(toJson(p));
    return Json{{"family", fam},
                {"member", toJson(member)},
                {"outside", toJson(outside)},
                {"member_verdict", verdictJson(inVerdict)},
                {"outside_verdict", verdictJson(outVerdict)}};
  };
  c.isTrue(inVerdict.holds && inVerdict.holdsEvent.all(), "member rejected", witness);
  c.isTrue(!outVerdict.holds && !outVerdict.holdsEvent.any(), "outsider accepted", witness);
  c.isTrue(outVerdict.witness.has_value(), "rejection without witness", witness);

  // Mixed per-atom case: member on A, outsider elsewhere.
  const Event A = genEvent(rng, space);
  const auto mixVerdict = hullMembership(glue(A, member, outside), xs);
  c.isTrue(mixVerdict.holdsEvent == A, "mixed case event mismatch", [&] {
    Json j = witness();
    j["A"] = toJson(A);
    j["mixed_verdict"] = verdictJson(mixVerdict);
    return j;
  });
  return c.record(t);
}

// ---------------------------------------------------------------------------
// op-order
// ---------------------------------------------------------------------------

TrialRecord opOrderTrial(const Scenario& sc, const AtomSpacePtr& space, Rng& rng, int t) {
  Checker c;
  const Index d = sc.dim;
  const OpParamsT p = genTParams(rng, space, d, sc.paramScale);
  const ConvexFn g = genHRep(rng, space, d, sc.piecesMin, sc.piecesMax, Side::Primal,
                             /*withDomain=*/t % 3 == 0, sc.paramScale);
  const ConvexFn f = (t % 2 == 0)
                         ? genOrderedPair(rng, g).f
                         : genHRep(rng, space, d, sc.piecesMin, sc.piecesMax, Side::Primal,
                                   /*withDomain=*/t % 3 == 0, sc.paramScale);

  const auto before = orderLeq(f, g);
  const ConvexFn Tf = applyT(p, f);
  const ConvexFn Tg = applyT(p, g);
  const auto after = orderLeq(Tf, Tg);

  const auto witness = [&] {
    return Json{{"params", toJson(p)},
                {"f", toJson(f)},
                {"g", toJson(g)},
                {"before", verdictJson(before)},
                {"after", verdictJson(after)}};
  };
  c.isTrue(before.holds == after.holds, "order verdict changed under T", witness);
  c.isTrue(before.holdsEvent == after.holdsEvent, "per-atom order event changed under T",
           witness);
  if (t % 2 == 0)
    c.isTrue(before.holds, "constructed minorant not accepted", witness);

  // The defining formula: T(f)(x) = tau f(Hx + c) + <w, x> + beta.
  for (int i = 0; i < 5; ++i) {
    const ModuleElem x = genElem(rng, space, d, Side::Primal, sc.paramScale);
    const ExtL0Scalar lhs = eval(Tf, x);
    const ExtL0Scalar rhs =
        ExtL0Scalar(p.tau) * eval(f, apply(p.H, x) + p.c) + ExtL0Scalar(pairing(p.w, x) + p.beta);
    c.within(extDeviation(lhs, rhs), sc.tolerance, "transform disagrees with its formula", [&] {
      Json j = witness();
      j["x"] = toJson(x);
      j["lhs"] = toJson(lhs);
      j["rhs"] = toJson(rhs);
      return j;
    });
  }
  return c.record(t);
}

// ---------------------------------------------------------------------------
// op-stability
// ---------------------------------------------------------------------------

TrialRecord opStabilityTrial(const Scenario& sc, const AtomSpacePtr& space, Rng& rng, int t) {
  Checker c;
  const Index d = sc.dim;
  const OpParamsT p = genTParams(rng, space, d, sc.paramScale);
  const bool withDomain = t % 3 == 0;
  const ConvexFn f = genHRep(rng, space, d, sc.piecesMin, sc.piecesMax, Side::Primal, withDomain,
                             sc.paramScale);
  const ConvexFn g = genHRep(rng, space, d, sc.piecesMin, sc.piecesMax, Side::Primal, withDomain,
                             sc.paramScale);
  const Event A = genEvent(rng, space);

  const ConvexFn glued = applyT(p, glue(A, f, g));
  const ConvexFn Tf = applyT(p, f);
  const ConvexFn Tg = applyT(p, g);

  for (int i = 0; i < sc.innerPoints; ++i) {
    const ModuleElem x = genElem(rng, space, d, Side::Primal, sc.paramScale);
    const ExtL0Scalar lhs = eval(glued, x);
    const ExtL0Scalar rhs = glue(A, eval(Tf, x), eval(Tg, x));
    c.exact(extDeviation(lhs, rhs), "stability identity broke", [&] {
      return Json{{"params", toJson(p)}, {"A", toJson(A)},   {"f", toJson(f)},
                  {"g", toJson(g)},      {"x", toJson(x)},   {"lhs", toJson(lhs)},
                  {"rhs", toJson(rhs)}};
    });
    if (c.failed()) break;
  }
  return c.record(t);
}

// ---------------------------------------------------------------------------
// op-recovery
// ---------------------------------------------------------------------------

TrialRecord opRecoveryTrial(const Scenario& sc, const AtomSpacePtr& space, Rng& rng, int t) {
  Checker c;
  const Index d = sc.dim;
  const OpParamsT truth = genTParams(rng, space, d, sc.paramScale);
  const HatTParams hat = toHatT(truth);
  const PairOracle oracle = [&hat](const ModuleElem& u, const L0Scalar& alpha) {
    return applyHatT(hat, u, alpha);
  };

  const HatTParams rec = recoverHatT(oracle, space, d);
  const double dev = std::max({maxAbsDiff(rec.D, hat.D), maxAbsDiff(rec.w, hat.w),
                               maxAbsDiff(rec.d, hat.d), maxAbsDiff(rec.tau, hat.tau),
                               maxAbsDiff(rec.beta, hat.beta)});
  c.within(dev, 1e-9, "recovered parameters drift", [&] {
    return Json{{"truth", toJson(hat)}, {"recovered", toJson(rec)}};
  });

  // Round trip through the underlying operator parameters.
  const OpParamsT back = fromHatT(rec);
  const double devBack =
      std::max({maxAbsDiff(back.H, truth.H), maxAbsDiff(back.c, truth.c),
                maxAbsDiff(back.w, truth.w), maxAbsDiff(back.tau, truth.tau),
                maxAbsDiff(back.beta, truth.beta)});
  c.within(devBack, 1e-8, "hat-parameter round trip drifts", [&] {
    return Json{{"truth", toJson(truth)}, {"round_trip", toJson(back)}};
  });

  // A non-stable oracle must be rejected, with a stability witness.
  if (t == 0) {
    const AtomSpacePtr sigmaSpace =
        (space->atomCount() % 2 == 0) ? space : uniformAtomSpace<double>(2);
    const SwapInvolution sw = SwapInvolution::pairedHalves(sigmaSpace);
    const PairOracle sigmaOracle = [&sw](const ModuleElem& u, const L0Scalar& alpha) {
      return AffineFn(sw.sigma(u), sw.sigma(alpha));
    };
    bool rejected = false;
    std::string note;
    try {
      recoverHatT(sigmaOracle, sigmaSpace, 1);
    } catch (const CharacterizationViolationError& e) {
      rejected = true;
      note = e.witness();
    }
    c.isTrue(rejected && !note.empty(), "swap-conjugation oracle was not rejected",
             [&] { return Json{{"witness", note}}; });
  }
  return c.record(t);
}

// ---------------------------------------------------------------------------
// involution
// ---------------------------------------------------------------------------

TrialRecord involutionTrial(const Scenario& sc, const AtomSpacePtr& space, Rng& rng, int t) {
  Checker c;
  const Index d = sc.dim;
  const InvolutionSeed seed = genInvolutionSeed(rng, space, d, sc.paramScale);
  const OpParamsT p = makeInvolution(seed.H, seed.c, seed.w);

  const ConvexFn f = genHRep(rng, space, d, sc.piecesMin, sc.piecesMax, Side::Primal,
                             /*withDomain=*/t % 3 == 0, sc.paramScale);
  const ConvexFn twice = applyT(p, applyT(p, f));
  for (int i = 0; i < sc.innerPoints; ++i) {
    const ModuleElem x = genElem(rng, space, d, Side::Primal, sc.paramScale);
    const ExtL0Scalar lhs = eval(twice, x);
    const ExtL0Scalar rhs = eval(f, x);
    c.within(extDeviation(lhs, rhs), sc.tolerance, "T(T(f)) differs from f", [&] {
      return Json{{"params", toJson(p)}, {"f", toJson(f)}, {"x", toJson(x)},
                  {"twice", toJson(lhs)}, {"once", toJson(rhs)}};
    });
    if (c.failed()) break;
  }

  // Ingredients violating the kernel conditions must be rejected.
  if (t == 0) {
    const ModuleMap H = genNonsingularMap(rng, space, d);
    if (maxAbsDiff(compose(H, H), ModuleMap::identity(space, d)) > 1e-6) {
      bool rejected = false;
      try {
        makeInvolution(H, genElem(rng, space, d, Side::Primal),
                       genElem(rng, space, d, Side::Dual));
      } catch (const ParameterError&) {
        rejected = true;
      }
      c.isTrue(rejected, "non-involutive ingredients were accepted",
               [&] { return Json{{"H", toJson(H)}}; });
    }
  }
  return c.record(t);
}

// ---------------------------------------------------------------------------
// order-reversing
// ---------------------------------------------------------------------------

TrialRecord orderReversingTrial(const Scenario& sc, const AtomSpacePtr& space, Rng& rng, int t) {
  Checker c;
  const Index d = sc.dim;
  const OpParamsS p = genSParams(rng, space, d, sc.paramScale);
  const ConvexFn g = genHRep(rng, space, d, sc.piecesMin, sc.piecesMax, Side::Primal,
                             /*withDomain=*/false, sc.paramScale);
  const ConvexFn f = (t % 2 == 0)
                         ? genOrderedPair(rng, g).f
                         : genHRep(rng, space, d, sc.piecesMin, sc.piecesMax, Side::Primal,
                                   /*withDomain=*/false, sc.paramScale);

  const auto before = orderLeq(f, g);
  const ConvexFn Sf = applyS(p, f);
  const ConvexFn Sg = applyS(p, g);
  const auto after = orderLeqVRep(Sg, Sf);

  const auto witness = [&] {
    return Json{{"params", toJson(p)},
                {"f", toJson(f)},
                {"g", toJson(g)},
                {"before", verdictJson(before)},
                {"reversed", verdictJson(after)}};
  };
  c.isTrue(before.holds == after.holds, "reversal verdict mismatch", witness);
  c.isTrue(before.holdsEvent == after.holdsEvent, "per-atom reversal event mismatch", witness);
  if (t % 2 == 0) c.isTrue(before.holds && after.holds, "constructed minorant not reversed", witness);
  return c.record(t);
}

// ---------------------------------------------------------------------------
// t-to-s
// ---------------------------------------------------------------------------

TrialRecord tToSTrial(const Scenario& sc, const AtomSpacePtr& space, Rng& rng, int t) {
  Checker c;
  const Index d = sc.dim;
  const OpParamsT p = genTParams(rng, space, d, sc.paramScale);
  const OpParamsS s = tToS(p);

  for (int iF = 0; iF < sc.innerFns; ++iF) {
    const ConvexFn f = genHRep(rng, space, d, sc.piecesMin, sc.piecesMax, Side::Primal,
                               /*withDomain=*/false, sc.paramScale);
    const ConvexFn Sf = applyS(s, f);
    const ConvexFn Tf = applyT(p, f);
    for (int iU = 0; iU < sc.innerPoints; ++iU) {
      const ModuleElem u = genElem(rng, space, d, Side::Dual, sc.paramScale);
      const ExtL0Scalar viaS = eval(Sf, u);
      const ExtL0Scalar viaConj = conjugateEval(Tf, u);
      c.within(extDeviation(viaS, viaConj), sc.tolerance,
               "S from T disagrees with the conjugate of T", [&] {
                 return Json{{"t_params", toJson(p)}, {"s_params", toJson(s)},
                             {"f", toJson(f)},        {"u", toJson(u)},
                             {"via_s", toJson(viaS)}, {"via_conjugate", toJson(viaConj)}};
               });
      if (c.failed()) return c.record(t);
    }
  }
  return c.record(t);
}

// ---------------------------------------------------------------------------
// counterexample
// ---------------------------------------------------------------------------

TrialRecord counterexampleTrial(const Scenario& sc, const AtomSpacePtr& space, Rng& rng, int t) {
  Checker c;
  const SwapInvolution sw = SwapInvolution::pairedHalves(space);
  const auto sigma = [&sw](const ConvexFn& f) { return sigmaOperator(sw, f); };

  // sigma is an involution, exactly, representation-wise.
  const ConvexFn f = genHRep(rng, space, 1, sc.piecesMin, sc.piecesMax, Side::Primal,
                             /*withDomain=*/t % 3 == 0, sc.paramScale);
  const ConvexFn ff = sigma(sigma(f));
  double repDev = 0.0;
  for (std::size_t k = 0; k < f.pieces().size(); ++k)
    repDev = std::max({repDev, maxAbsDiff(ff.pieces()[k].u, f.pieces()[k].u),
                       maxAbsDiff(ff.pieces()[k].alpha, f.pieces()[k].alpha)});
  c.exact(repDev, "sigma twice is not the identity", [&] { return Json{{"f", toJson(f)}}; });

  // sigma preserves order; the per-atom event gets permuted by the swap.
  const ConvexFn g2 = genHRep(rng, space, 1, sc.piecesMin, sc.piecesMax, Side::Primal,
                              /*withDomain=*/false, sc.paramScale);
  const ConvexFn f2 = (t % 2 == 0)
                          ? genOrderedPair(rng, g2).f
                          : genHRep(rng, space, 1, sc.piecesMin, sc.piecesMax, Side::Primal,
                                    /*withDomain=*/false, sc.paramScale);
  const auto before = orderLeq(f2, g2);
  const auto after = orderLeq(sigma(f2), sigma(g2));
  MaskArray permuted(space->atomCount());
  for (Index i = 0; i < permuted.size(); ++i)
    permuted[i] = before.holdsEvent.contains(sw.partner(i));
  const auto orderWitness = [&] {
    return Json{{"f", toJson(f2)},
                {"g", toJson(g2)},
                {"before", verdictJson(before)},
                {"after", verdictJson(after)}};
  };
  c.isTrue(before.holds == after.holds, "sigma changed the order verdict", orderWitness);
  c.isTrue(after.holdsEvent == Event(space, permuted), "sigma event is not the swapped one",
           orderWitness);

  // The pinned stability failure: on f0(x) = x glued against 0 by the event
  // A = {first atom}, conjugating by the swap and gluing do not commute.
  const ModuleElem one = ModuleElem::constant(space, Eigen::VectorXd::Ones(1), Side::Dual);
  const ConvexFn f0 = ConvexFn::hrep({AffineFn(one, L0Scalar::zero(space))});
  const ConvexFn zeroFn =
      ConvexFn::hrep({AffineFn(ModuleElem::zero(space, 1, Side::Dual), L0Scalar::zero(space))});
  MaskArray firstAtom = MaskArray::Constant(space->atomCount(), false);
  firstAtom[0] = true;
  const Event A(space, firstAtom);

  const ConvexFn sf0 = sigma(f0);
  c.exact(std::max(maxAbsDiff(sf0.pieces().front().u, f0.pieces().front().u),
                   maxAbsDiff(sf0.pieces().front().alpha, f0.pieces().front().alpha)),
          "sigma moved the identity function", [&] { return Json{{"f0", toJson(f0)}}; });

  const ModuleElem ones = ModuleElem::constant(space, Eigen::VectorXd::Ones(1), Side::Primal);
  const ExtL0Scalar lhs = eval(sigma(glue(A, f0, zeroFn)), ones);
  const ExtL0Scalar rhs = eval(glue(A, sf0, zeroFn), ones);
  c.isTrue(extDeviation(lhs, rhs) > 0.5, "stability unexpectedly held for the swap operator",
           [&] {
             return Json{{"A", toJson(A)},
                         {"sigma_of_glued", toJson(lhs)},
                         {"glued_of_sigma", toJson(rhs)}};
           });

  // Passing reports still carry the non-stability witness: the two evaluations
  // at x = (1,...,1) that show gluing and the swap operator do not commute.
  TrialRecord rec = c.record(t);
  if (rec.status == TrialStatus::Pass) {
    rec.witness = Json{{"A", toJson(A)},
                       {"at", toJson(ones)},
                       {"sigma_of_glued", toJson(lhs)},
                       {"glued_of_sigma", toJson(rhs)}};
  }
  return rec;
}

// ---------------------------------------------------------------------------
// dispatch
// ---------------------------------------------------------------------------

using TrialFn = TrialRecord (*)(const Scenario&, const AtomSpacePtr&, Rng&, int);

const std::map<std::string, TrialFn>& suiteTable() {
  static const std::map<std::string, TrialFn> table = {
      {"lattice-laws", &latticeTrial},
      {"rn-axioms", &rnAxiomsTrial},
      {"fenchel-moreau", &fenchelMoreauTrial},
      {"conjugate-oracle", &conjugateOracleTrial},
      {"comparison", &comparisonTrial},
      {"subdiff-mu", &subdiffMuTrial},
      {"hull-membership", &hullTrial},
      {"op-order", &opOrderTrial},
      {"op-stability", &opStabilityTrial},
      {"op-recovery", &opRecoveryTrial},
      {"involution", &involutionTrial},
      {"order-reversing", &orderReversingTrial},
      {"t-to-s", &tToSTrial},
      {"counterexample", &counterexampleTrial},
  };
  return table;
}

}  // namespace

const std::vector<std::string>& suiteNames() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& [name, fn] : suiteTable()) out.push_back(name);
    return out;
  }();
  return names;
}

Report runSuite(const Scenario& sc) {
  sc.validate();
  const auto it = suiteTable().find(sc.suite);
  if (it == suiteTable().end()) {
    std::ostringstream os;
    os << "unknown suite '" << sc.suite << "'; available:";
    for (const auto& name : suiteNames()) os << ' ' << name;
    throw ConfigError(os.str());
  }

  AtomSpacePtr space;
  try {
    space = sc.space();
  } catch (const Error& e) {
    throw ConfigError(std::string("invalid atom probabilities: ") + e.what());
  }
  if (sc.suite == "counterexample" && space->atomCount() % 2 != 0)
    throw ConfigError("counterexample suite needs an even atom count");

  Report rep;
  rep.suite = sc.suite;
  rep.records.reserve(static_cast<std::size_t>(sc.trials));
  for (int t = 0; t < sc.trials; ++t) {
    Rng rng(subSeed(sc.seed, static_cast<std::uint64_t>(t)));
    try {
      rep.records.push_back(it->second(sc, space, rng, t));
    } catch (const Error& e) {
      rep.records.push_back(TrialRecord::error(t, e.what()));
    }
  }
  return rep;
}

}  // namespace ranconv::verify
