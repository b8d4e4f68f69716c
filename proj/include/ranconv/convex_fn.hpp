// Proper lower semicontinuous L0-convex functions in three exact polyhedral
// representations, with evaluation, order decision, affine calculus, hull
// membership and random Fenchel conjugation.
#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "ranconv/atom_space.hpp"
#include "ranconv/errors.hpp"
#include "ranconv/l0_scalar.hpp"
#include "ranconv/lp.hpp"
#include "ranconv/rn_module.hpp"

namespace ranconv {

/// The L0-affine function h_{u,alpha}(x) = <u,x> + alpha. The slope u lives
/// on the opposite side of the function's argument.
template <typename Scalar>
struct AffineFnT {
  DualElemT<Scalar> u;
  L0ScalarT<Scalar> alpha;

  AffineFnT(DualElemT<Scalar> slope, L0ScalarT<Scalar> intercept)
      : u(std::move(slope)), alpha(std::move(intercept)) {
    requireSameSpace(u.space(), alpha.space());
  }
};

/// One random half-space constraint <a, x> <= b (per atom).
template <typename Scalar>
struct HalfSpaceT {
  DualElemT<Scalar> a;
  L0ScalarT<Scalar> b;

  HalfSpaceT(DualElemT<Scalar> normal, L0ScalarT<Scalar> bound)
      : a(std::move(normal)), b(std::move(bound)) {
    requireSameSpace(a.space(), b.space());
  }
};

/// One weighted point of a V-representation; p lives on the same side as the
/// function's argument.
template <typename Scalar>
struct VPointT {
  ModuleElemT<Scalar> p;
  L0ScalarT<Scalar> beta;

  VPointT(ModuleElemT<Scalar> point, L0ScalarT<Scalar> weight)
      : p(std::move(point)), beta(std::move(weight)) {
    requireSameSpace(p.space(), beta.space());
  }
};

template <typename Scalar>
L0ScalarT<Scalar> evalAffine(const AffineFnT<Scalar>& h, const ModuleElemT<Scalar>& x) {
  return pairing(h.u, x) + h.alpha;
}

enum class FnVariant { HRep, VRep, Indicator };

inline const char* variantName(FnVariant v) {
  switch (v) {
    case FnVariant::HRep: return "hrep";
    case FnVariant::VRep: return "vrep";
    default: return "indicator";
  }
}

/// A proper lsc L0-convex function in one of three exact representations:
///  - HRep: max of affine pieces over an optional polyhedral domain,
///  - VRep: lower convex envelope of weighted points,
///  - Indicator: the indicator of a single point.
/// The side tag says which copy of the pairing the argument lives in; stored
/// slopes/normals live on the opposite side, stored points on the same side.
template <typename Scalar>
class ConvexFnT {
 public:
  static ConvexFnT hrep(std::vector<AffineFnT<Scalar>> pieces,
                        std::vector<HalfSpaceT<Scalar>> domain = {},
                        const LPOptionsT<Scalar>& opts = {}) {
    if (pieces.empty()) throw StructuralError("H-rep needs at least one affine piece");
    const auto& first = pieces.front().u;
    for (const auto& h : pieces) {
      requireSameShape(first, h.u);
      requireSameSpace(first.space(), h.alpha.space());
    }
    for (const auto& hs : domain) {
      requireSameShape(first, hs.a);
      requireSameSpace(first.space(), hs.b.space());
    }
    ConvexFnT f;
    f.variant_ = FnVariant::HRep;
    f.side_ = opposite(first.side());
    f.pieces_ = std::move(pieces);
    f.domain_ = std::move(domain);
    f.checkProper(opts);
    return f;
  }

  static ConvexFnT vrep(std::vector<VPointT<Scalar>> points) {
    if (points.empty()) throw StructuralError("V-rep needs at least one point");
    const auto& first = points.front().p;
    for (const auto& vp : points) {
      requireSameShape(first, vp.p);
      requireSameSpace(first.space(), vp.beta.space());
    }
    ConvexFnT f;
    f.variant_ = FnVariant::VRep;
    f.side_ = first.side();
    f.points_ = std::move(points);
    return f;
  }

  static ConvexFnT indicator(ModuleElemT<Scalar> x0) {
    ConvexFnT f;
    f.variant_ = FnVariant::Indicator;
    f.side_ = x0.side();
    f.point_.emplace(std::move(x0));
    return f;
  }

  FnVariant variant() const { return variant_; }
  Side side() const { return side_; }

  const AtomSpacePtrT<Scalar>& space() const {
    switch (variant_) {
      case FnVariant::HRep: return pieces_.front().u.space();
      case FnVariant::VRep: return points_.front().p.space();
      default: return point_->space();
    }
  }
  Index dim() const {
    switch (variant_) {
      case FnVariant::HRep: return pieces_.front().u.dim();
      case FnVariant::VRep: return points_.front().p.dim();
      default: return point_->dim();
    }
  }

  const std::vector<AffineFnT<Scalar>>& pieces() const {
    requireVariant(FnVariant::HRep, "pieces");
    return pieces_;
  }
  const std::vector<HalfSpaceT<Scalar>>& domain() const {
    requireVariant(FnVariant::HRep, "domain");
    return domain_;
  }
  const std::vector<VPointT<Scalar>>& points() const {
    requireVariant(FnVariant::VRep, "points");
    return points_;
  }
  const ModuleElemT<Scalar>& point() const {
    requireVariant(FnVariant::Indicator, "point");
    return *point_;
  }

  bool isDomainFree() const { return variant_ != FnVariant::HRep || domain_.empty(); }

 private:
  ConvexFnT() = default;

  void requireVariant(FnVariant v, const char* what) const {
    if (variant_ != v) {
      std::ostringstream os;
      os << "accessor '" << what << "' needs variant " << variantName(v) << ", function is "
         << variantName(variant_);
      throw StructuralError(os.str());
    }
  }

  /// Properness: the domain must be feasible on every atom.
  void checkProper(const LPOptionsT<Scalar>& opts) const {
    if (domain_.empty()) return;
    const Index d = dim();
    const Index n = space()->atomCount();
    std::vector<Index> bad;
    for (Index i = 0; i < n; ++i) {
      auto p = LPProblemT<Scalar>::withFreeVars(d);
      for (const auto& hs : domain_) p.addLeq(hs.a.atom(i), hs.b[i]);
      const auto res = ranconv::solve(p, opts);
      if (res.status == LPStatus::Infeasible) bad.push_back(i);
      else if (res.status == LPStatus::NumericalFailure)
        throw EvaluationError("properness check failed numerically: " + res.note);
    }
    if (!bad.empty()) {
      std::ostringstream os;
      os << "H-rep domain is infeasible (function improper) on atom(s)";
      for (Index i : bad) os << ' ' << i;
      throw PreconditionError(os.str());
    }
  }

  FnVariant variant_ = FnVariant::HRep;
  Side side_ = Side::Primal;
  std::vector<AffineFnT<Scalar>> pieces_;
  std::vector<HalfSpaceT<Scalar>> domain_;
  std::vector<VPointT<Scalar>> points_;
  std::optional<ModuleElemT<Scalar>> point_;
};

namespace detail {

template <typename Scalar>
void requireArgument(const ConvexFnT<Scalar>& f, const ModuleElemT<Scalar>& x) {
  requireSameSpace(f.space(), x.space());
  if (f.dim() != x.dim()) throw StructuralError("function/argument dimension mismatch");
  if (f.side() != x.side()) {
    std::ostringstream os;
    os << "function takes " << sideName(f.side()) << " arguments, got " << sideName(x.side());
    throw StructuralError(os.str());
  }
}

/// V-rep value at one atom: min sum(lambda*beta) over the simplex with
/// sum(lambda*p_k) = z; +inf when z is outside the hull.
template <typename Scalar>
Scalar vrepValueAtAtom(const std::vector<VPointT<Scalar>>& points, Index atom,
                       const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& z,
                       const LPOptionsT<Scalar>& opts) {
  const Index K = static_cast<Index>(points.size());
  const Index d = z.size();
  auto p = LPProblemT<Scalar>::withFreeVars(K);
  p.lower.setZero();
  for (Index k = 0; k < K; ++k) p.c[k] = -points[static_cast<std::size_t>(k)].beta[atom];
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  for (Index r = 0; r < d; ++r) {
    Vector row(K);
    for (Index k = 0; k < K; ++k) row[k] = points[static_cast<std::size_t>(k)].p.atom(atom)[r];
    p.addEq(std::move(row), z[r]);
  }
  p.addEq(Vector::Ones(K), Scalar(1));
  const auto res = ranconv::solve(p, opts);
  switch (res.status) {
    case LPStatus::Optimal: return -res.value;
    case LPStatus::Infeasible: return std::numeric_limits<Scalar>::infinity();
    default:
      throw EvaluationError(std::string("V-rep evaluation LP failed: ") +
                            lpStatusName(res.status) + (res.note.empty() ? "" : ", " + res.note));
  }
}

}  // namespace detail

/// Evaluate f at x, per atom, with values in (-inf, +inf].
template <typename Scalar>
ExtL0ScalarT<Scalar> eval(const ConvexFnT<Scalar>& f, const ModuleElemT<Scalar>& x,
                          const LPOptionsT<Scalar>& opts = {}) {
  detail::requireArgument(f, x);
  const auto& space = f.space();
  const Index n = space->atomCount();
  switch (f.variant()) {
    case FnVariant::HRep: {
      ArrayX<Scalar> vals = evalAffine(f.pieces().front(), x).values();
      for (std::size_t k = 1; k < f.pieces().size(); ++k)
        vals = vals.max(evalAffine(f.pieces()[k], x).values());
      for (const auto& hs : f.domain()) {
        const ArrayX<Scalar> lhs = pairing(hs.a, x).values();
        for (Index i = 0; i < n; ++i)
          if (lhs[i] > hs.b[i]) vals[i] = std::numeric_limits<Scalar>::infinity();
      }
      return ExtL0ScalarT<Scalar>(space, std::move(vals));
    }
    case FnVariant::VRep: {
      ArrayX<Scalar> vals(n);
      for (Index i = 0; i < n; ++i)
        vals[i] = detail::vrepValueAtAtom<Scalar>(f.points(), i, x.atom(i), opts);
      return ExtL0ScalarT<Scalar>(space, std::move(vals));
    }
    default: {  // Indicator
      ArrayX<Scalar> vals(n);
      for (Index i = 0; i < n; ++i) {
        const bool equal = (x.atom(i).array() == f.point().atom(i).array()).all();
        vals[i] = equal ? Scalar(0) : std::numeric_limits<Scalar>::infinity();
      }
      return ExtL0ScalarT<Scalar>(space, std::move(vals));
    }
  }
}

/// Pointwise supremum of H-rep functions: union of pieces and of domain
/// constraints.
template <typename Scalar>
ConvexFnT<Scalar> supFns(const std::vector<ConvexFnT<Scalar>>& fs) {
  if (fs.empty()) throw StructuralError("supremum of an empty family of functions");
  std::vector<AffineFnT<Scalar>> pieces;
  std::vector<HalfSpaceT<Scalar>> domain;
  for (const auto& f : fs) {
    if (f.variant() != FnVariant::HRep)
      throw StructuralError("supFns needs H-rep operands (conjugate V-reps first)");
    if (f.side() != fs.front().side())
      throw StructuralError("supFns operands live on different sides");
    pieces.insert(pieces.end(), f.pieces().begin(), f.pieces().end());
    domain.insert(domain.end(), f.domain().begin(), f.domain().end());
  }
  return ConvexFnT<Scalar>::hrep(std::move(pieces), std::move(domain));
}

template <typename Scalar>
ConvexFnT<Scalar> supFns(const ConvexFnT<Scalar>& f, const ConvexFnT<Scalar>& g) {
  return supFns(std::vector<ConvexFnT<Scalar>>{f, g});
}

/// Gluing I_A*f + I_{A^c}*g. H-reps glue by the product construction (each
/// piece pair combines atomwise); a domain constraint turns into the vacuous
/// 0.x <= 0 on the atoms where its owner is inactive. Indicators glue points.
template <typename Scalar>
ConvexFnT<Scalar> glue(const EventT<Scalar>& A, const ConvexFnT<Scalar>& f,
                       const ConvexFnT<Scalar>& g) {
  if (f.variant() != g.variant())
    throw StructuralError("glued functions must share one representation variant");
  if (f.side() != g.side()) throw StructuralError("glued functions live on different sides");
  requireSameSpace(A.space(), f.space());
  requireSameSpace(f.space(), g.space());
  if (f.dim() != g.dim()) throw StructuralError("glued functions have different dimensions");

  switch (f.variant()) {
    case FnVariant::HRep: {
      std::vector<AffineFnT<Scalar>> pieces;
      pieces.reserve(f.pieces().size() * g.pieces().size());
      for (const auto& hf : f.pieces())
        for (const auto& hg : g.pieces())
          pieces.emplace_back(glue(A, hf.u, hg.u), glue(A, hf.alpha, hg.alpha));

      std::vector<HalfSpaceT<Scalar>> domain;
      const auto zeroA = ModuleElemT<Scalar>::zero(f.space(), f.dim(), opposite(f.side()));
      const auto zeroB = L0ScalarT<Scalar>::zero(f.space());
      for (const auto& hs : f.domain())
        domain.emplace_back(glue(A, hs.a, zeroA), glue(A, hs.b, zeroB));
      for (const auto& hs : g.domain())
        domain.emplace_back(glue(A, zeroA, hs.a), glue(A, zeroB, hs.b));
      return ConvexFnT<Scalar>::hrep(std::move(pieces), std::move(domain));
    }
    case FnVariant::Indicator:
      return ConvexFnT<Scalar>::indicator(glue(A, f.point(), g.point()));
    default:
      throw StructuralError("gluing V-reps is not supported (conjugate to H-rep first)");
  }
}

// ---------------------------------------------------------------------------
// Order decision
// ---------------------------------------------------------------------------

template <typename Scalar>
struct OrderWitnessT {
  ModuleElemT<Scalar> point;
  Index atom = 0;
  std::string note;
};

/// Verdict of an order query "f <= g": global flag, per-atom event, and a
/// violating (point, atom) when it fails.
template <typename Scalar>
struct OrderVerdictT {
  bool holds = false;
  EventT<Scalar> holdsEvent;
  std::optional<OrderWitnessT<Scalar>> witness;
};

namespace detail {

/// A module element equal to the column v on every atom.
template <typename Scalar>
ModuleElemT<Scalar> constantElem(const AtomSpacePtrT<Scalar>& space,
                                 const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& v, Side side) {
  return ModuleElemT<Scalar>::constant(space, v, side);
}

}  // namespace detail

/// Decide f <= g pointwise (both H-rep, same side). Per atom, the decision
/// runs one LP per f-domain constraint (does dom g respect it?) and one LP
/// per f-piece (is the piece below g on dom g?). Unbounded sub-LPs mean the
/// order fails at infinity; the witness point is pushed along the
/// certificate ray until the violation is concrete.
template <typename Scalar>
OrderVerdictT<Scalar> orderLeq(const ConvexFnT<Scalar>& f, const ConvexFnT<Scalar>& g,
                               Scalar tol = Scalar(1e-9), const LPOptionsT<Scalar>& opts = {}) {
  if (f.variant() != FnVariant::HRep || g.variant() != FnVariant::HRep)
    throw StructuralError("order decision needs H-rep operands");
  if (f.side() != g.side()) throw StructuralError("order operands live on different sides");
  requireSameSpace(f.space(), g.space());
  if (f.dim() != g.dim()) throw StructuralError("order operands have different dimensions");

  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  const auto& space = f.space();
  const Index n = space->atomCount();
  const Index d = f.dim();

  MaskArray mask = MaskArray::Constant(n, true);
  std::optional<OrderWitnessT<Scalar>> witness;

  auto recordViolation = [&](Index atom, const Vector& point, const std::string& note) {
    mask[atom] = false;
    if (!witness)
      witness = OrderWitnessT<Scalar>{detail::constantElem(space, point, f.side()), atom, note};
  };

  auto solveOrFail = [&](const LPProblemT<Scalar>& p) {
    const auto res = ranconv::solve(p, opts);
    if (res.status == LPStatus::NumericalFailure)
      throw EvaluationError("order-decision LP failed: " + res.note);
    if (res.status == LPStatus::Infeasible)
      throw EvaluationError("order-decision LP infeasible though g is proper");
    return res;
  };

  for (Index i = 0; i < n; ++i) {
    bool atomOk = true;

    // (i) every point of dom g must satisfy f's domain constraints.
    for (const auto& hs : f.domain()) {
      auto p = LPProblemT<Scalar>::withFreeVars(d);
      p.c = hs.a.atom(i);
      for (const auto& gd : g.domain()) p.addLeq(gd.a.atom(i), gd.b[i]);
      const auto res = solveOrFail(p);
      if (res.status == LPStatus::Optimal) {
        if (res.value - hs.b[i] > tol) {
          recordViolation(i, res.x, "point of dom g escapes dom f");
          atomOk = false;
        }
      } else {  // Unbounded
        const Scalar base = hs.a.atom(i).dot(res.x);
        const Scalar rate = hs.a.atom(i).dot(res.ray);
        const Scalar s = std::max(Scalar(1), (Scalar(1) + hs.b[i] - base) / rate);
        recordViolation(i, Vector(res.x + s * res.ray), "order fails at infinity (domain)");
        atomOk = false;
      }
      if (!atomOk) break;
    }
    if (!atomOk) continue;

    // (ii) each f-piece must stay below g over dom g.
    for (std::size_t k = 0; k < f.pieces().size(); ++k) {
      const auto& piece = f.pieces()[k];
      // Variables (x, t): maximize u_k.x - t  s.t.  t >= g-pieces, x in dom g.
      auto p = LPProblemT<Scalar>::withFreeVars(d + 1);
      p.c.head(d) = piece.u.atom(i);
      p.c[d] = Scalar(-1);
      for (const auto& hg : g.pieces()) {
        Vector row(d + 1);
        row.head(d) = hg.u.atom(i);
        row[d] = Scalar(-1);
        p.addLeq(std::move(row), -hg.alpha[i]);
      }
      for (const auto& gd : g.domain()) {
        Vector row = Vector::Zero(d + 1);
        row.head(d) = gd.a.atom(i);
        p.addLeq(std::move(row), gd.b[i]);
      }
      const auto res = solveOrFail(p);
      if (res.status == LPStatus::Optimal) {
        if (res.value + piece.alpha[i] > tol) {
          recordViolation(i, Vector(res.x.head(d)), "piece of f exceeds g");
          break;
        }
      } else {  // Unbounded: the gap grows without bound along the ray.
        const Scalar v0 = p.c.dot(res.x) + piece.alpha[i];
        const Scalar rate = p.c.dot(res.ray);
        const Scalar s = std::max(Scalar(1), (Scalar(1) - v0) / rate);
        const Vector far = res.x.head(d) + s * res.ray.head(d);
        recordViolation(i, far, "order fails at infinity (piece)");
        break;
      }
    }
  }

  OrderVerdictT<Scalar> verdict{mask.all(), EventT<Scalar>(space, std::move(mask)),
                                std::move(witness)};
  return verdict;
}

/// Decide p <= q for V-reps. Conjugation is an order-reversing bijection, so
/// the decision runs on the H-rep conjugates with the inequality flipped; the
/// per-atom event transfers unchanged.
template <typename Scalar>
OrderVerdictT<Scalar> orderLeqVRep(const ConvexFnT<Scalar>& p, const ConvexFnT<Scalar>& q,
                                   Scalar tol = Scalar(1e-9),
                                   const LPOptionsT<Scalar>& opts = {}) {
  if (p.variant() != FnVariant::VRep || q.variant() != FnVariant::VRep)
    throw StructuralError("orderLeqVRep needs V-rep operands");
  return orderLeq(conjugateRep(q), conjugateRep(p), tol, opts);
}

/// The two facts behind an affine order h1 <= h2: equal slopes and ordered
/// intercepts. Violations are theorem violations, not plain falsehoods.
struct AffineOrderFacts {
  bool equalSlopes = false;
  bool interceptLeq = false;
};

template <typename Scalar>
AffineOrderFacts decomposeAffineOrder(const AffineFnT<Scalar>& h1, const AffineFnT<Scalar>& h2,
                                      const LPOptionsT<Scalar>& opts = {}) {
  const auto f1 = ConvexFnT<Scalar>::hrep({h1});
  const auto f2 = ConvexFnT<Scalar>::hrep({h2});
  const auto pre = orderLeq(f1, f2, Scalar(1e-9), opts);
  if (!pre.holds)
    throw PreconditionError("affine order decomposition needs h1 <= h2, which fails");

  AffineOrderFacts facts;
  facts.equalSlopes = maxAbsDiff(h1.u, h2.u) <= Scalar(1e-10);
  facts.interceptLeq = (h1.alpha.values() <= h2.alpha.values() + Scalar(1e-10)).all();
  if (!facts.equalSlopes || !facts.interceptLeq) {
    std::ostringstream os;
    os << "affine order h1 <= h2 without the characterized decomposition: slope gap "
       << maxAbsDiff(h1.u, h2.u) << ", intercept order " << (facts.interceptLeq ? "ok" : "broken");
    throw TheoremViolationError(os.str());
  }
  return facts;
}

/// Recover the convex coefficient mu with u = mu*u1 + (1-mu)*u2 per atom,
/// given that h = h_{u,alpha} is below sup{h1, h2}. Where u1 = u2 the
/// coefficient is chosen as 1.
template <typename Scalar>
L0ScalarT<Scalar> subdiffMu(const AffineFnT<Scalar>& h, const AffineFnT<Scalar>& h1,
                            const AffineFnT<Scalar>& h2, const LPOptionsT<Scalar>& opts = {}) {
  const auto fh = ConvexFnT<Scalar>::hrep({h});
  const auto f12 = ConvexFnT<Scalar>::hrep({h1, h2});
  const auto pre = orderLeq(fh, f12, Scalar(1e-9), opts);
  if (!pre.holds) throw PreconditionError("subdifferential recovery needs h <= sup{h1,h2}");

  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  const auto& space = h.u.space();
  const Index n = space->atomCount();
  ArrayX<Scalar> mu(n);
  for (Index i = 0; i < n; ++i) {
    const Vector diff = h1.u.atom(i) - h2.u.atom(i);
    const Scalar nd = diff.norm();
    mu[i] = (nd > Scalar(1e-10)) ? Vector(h.u.atom(i) - h2.u.atom(i)).dot(diff) / (nd * nd)
                                 : Scalar(1);
  }
  Scalar worstResidual(0);
  for (Index i = 0; i < n; ++i) {
    const Vector combo = mu[i] * h1.u.atom(i) + (Scalar(1) - mu[i]) * h2.u.atom(i);
    worstResidual = std::max(worstResidual, Vector(h.u.atom(i) - combo).norm());
  }
  if (worstResidual > Scalar(1e-8)) {
    std::ostringstream os;
    os << "slope is not on the segment [u2, u1]: residual " << worstResidual;
    throw TheoremViolationError(os.str());
  }
  if ((mu < Scalar(-1e-9)).any() || (mu > Scalar(1) + Scalar(1e-9)).any()) {
    std::ostringstream os;
    os << "convex coefficient escapes [0,1]: range [" << mu.minCoeff() << ", " << mu.maxCoeff()
       << "]";
    throw TheoremViolationError(os.str());
  }
  mu = mu.max(Scalar(0)).min(Scalar(1));
  return L0ScalarT<Scalar>(space, std::move(mu));
}

/// Per-atom membership of x in the L0-convex hull of xs.
template <typename Scalar>
OrderVerdictT<Scalar> hullMembership(const ModuleElemT<Scalar>& x,
                                     const std::vector<ModuleElemT<Scalar>>& xs,
                                     const LPOptionsT<Scalar>& opts = {}) {
  if (xs.empty()) throw StructuralError("hull membership needs a nonempty point family");
  for (const auto& xi : xs) requireSameShape(x, xi);

  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  const auto& space = x.space();
  const Index n = space->atomCount();
  const Index d = x.dim();
  const Index K = static_cast<Index>(xs.size());

  MaskArray mask = MaskArray::Constant(n, true);
  std::optional<OrderWitnessT<Scalar>> witness;
  for (Index i = 0; i < n; ++i) {
    auto p = LPProblemT<Scalar>::withFreeVars(K);
    p.lower.setZero();
    for (Index r = 0; r < d; ++r) {
      Vector row(K);
      for (Index k = 0; k < K; ++k) row[k] = xs[static_cast<std::size_t>(k)].atom(i)[r];
      p.addEq(std::move(row), x.atom(i)[r]);
    }
    p.addEq(Vector::Ones(K), Scalar(1));
    const auto res = ranconv::solve(p, opts);
    if (res.status == LPStatus::Optimal) continue;
    if (res.status != LPStatus::Infeasible)
      throw EvaluationError("hull membership LP failed: " + res.note);
    mask[i] = false;
    if (!witness) witness = OrderWitnessT<Scalar>{x, i, "outside the hull on this atom"};
  }
  OrderVerdictT<Scalar> verdict{mask.all(), EventT<Scalar>(space, std::move(mask)),
                                std::move(witness)};
  return verdict;
}

// ---------------------------------------------------------------------------
// Random Fenchel conjugation
// ---------------------------------------------------------------------------

/// The exact representation swap: conjugation exchanges H-rep and V-rep and
/// flips the side. Stored vectors transfer without retagging: H-rep slopes
/// already live on the conjugate's argument side, and vice versa.
template <typename Scalar>
ConvexFnT<Scalar> conjugateRep(const ConvexFnT<Scalar>& f) {
  switch (f.variant()) {
    case FnVariant::HRep: {
      if (!f.isDomainFree())
        throw UnsupportedRepresentationError(
            "conjugateRep needs a domain-free H-rep (use conjugateEval)");
      std::vector<VPointT<Scalar>> points;
      points.reserve(f.pieces().size());
      for (const auto& h : f.pieces()) points.emplace_back(h.u, -h.alpha);
      return ConvexFnT<Scalar>::vrep(std::move(points));
    }
    case FnVariant::VRep: {
      std::vector<AffineFnT<Scalar>> pieces;
      pieces.reserve(f.points().size());
      for (const auto& vp : f.points()) pieces.emplace_back(vp.p, -vp.beta);
      return ConvexFnT<Scalar>::hrep(std::move(pieces));
    }
    default:  // Indicator: delta*_{x0}(u) = <u, x0>.
      return ConvexFnT<Scalar>::hrep(
          {AffineFnT<Scalar>(f.point(), L0ScalarT<Scalar>::zero(f.space()))});
  }
}

/// The definitional conjugate f*(v) = sup_x { <v,x> - f(x) }, evaluated by a
/// per-atom LP; independent of the representation swap and valid for
/// domain-constrained H-reps too.
template <typename Scalar>
ExtL0ScalarT<Scalar> conjugateEval(const ConvexFnT<Scalar>& f, const ModuleElemT<Scalar>& v,
                                   const LPOptionsT<Scalar>& opts = {}) {
  requireSameSpace(f.space(), v.space());
  if (f.dim() != v.dim()) throw StructuralError("conjugate argument dimension mismatch");
  if (v.side() != opposite(f.side())) {
    std::ostringstream os;
    os << "conjugate of a " << sideName(f.side()) << "-side function takes "
       << sideName(opposite(f.side())) << " arguments";
    throw StructuralError(os.str());
  }

  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  const auto& space = f.space();
  const Index n = space->atomCount();
  const Index d = f.dim();
  ArrayX<Scalar> vals(n);

  switch (f.variant()) {
    case FnVariant::HRep: {
      for (Index i = 0; i < n; ++i) {
        // Variables (x, t) on the epigraph: maximize v.x - t.
        auto p = LPProblemT<Scalar>::withFreeVars(d + 1);
        p.c.head(d) = v.atom(i);
        p.c[d] = Scalar(-1);
        for (const auto& h : f.pieces()) {
          Vector row(d + 1);
          row.head(d) = h.u.atom(i);
          row[d] = Scalar(-1);
          p.addLeq(std::move(row), -h.alpha[i]);
        }
        for (const auto& hs : f.domain()) {
          Vector row = Vector::Zero(d + 1);
          row.head(d) = hs.a.atom(i);
          p.addLeq(std::move(row), hs.b[i]);
        }
        const auto res = ranconv::solve(p, opts);
        switch (res.status) {
          case LPStatus::Optimal: vals[i] = res.value; break;
          case LPStatus::Unbounded: vals[i] = std::numeric_limits<Scalar>::infinity(); break;
          default:
            throw EvaluationError(std::string("conjugate LP failed: ") +
                                  lpStatusName(res.status) +
                                  (res.note.empty() ? "" : ", " + res.note));
        }
      }
      break;
    }
    case FnVariant::VRep: {
      // sup over the envelope = max over the simplex of <v,p_k> - beta_k.
      for (Index i = 0; i < n; ++i) {
        const Index K = static_cast<Index>(f.points().size());
        auto p = LPProblemT<Scalar>::withFreeVars(K);
        p.lower.setZero();
        for (Index k = 0; k < K; ++k) {
          const auto& vp = f.points()[static_cast<std::size_t>(k)];
          p.c[k] = v.atom(i).dot(vp.p.atom(i)) - vp.beta[i];
        }
        p.addEq(Vector::Ones(K), Scalar(1));
        const auto res = ranconv::solve(p, opts);
        if (res.status != LPStatus::Optimal)
          throw EvaluationError(std::string("conjugate LP failed: ") + lpStatusName(res.status));
        vals[i] = res.value;
      }
      break;
    }
    default: {  // Indicator: <v, x0>.
      return ExtL0ScalarT<Scalar>(space, ArrayX<Scalar>(dot(v, f.point()).values()));
    }
  }
  return ExtL0ScalarT<Scalar>(space, std::move(vals));
}

using AffineFn = AffineFnT<double>;
using HalfSpace = HalfSpaceT<double>;
using VPoint = VPointT<double>;
using ConvexFn = ConvexFnT<double>;
using OrderWitness = OrderWitnessT<double>;
using OrderVerdict = OrderVerdictT<double>;

}  // namespace ranconv
