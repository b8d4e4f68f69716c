// Dense two-phase primal simplex with Bland's rule: the deterministic
// decision engine behind V-rep evaluation, order comparison, conjugate
// evaluation and hull membership. Instances are tiny; correctness and
// reproducibility take priority over speed.
#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "ranconv/errors.hpp"

namespace ranconv {

using Index = Eigen::Index;

enum class Rel { Leq, Eq };

enum class LPStatus { Optimal, Infeasible, Unbounded, NumericalFailure };

inline const char* lpStatusName(LPStatus s) {
  switch (s) {
    case LPStatus::Optimal: return "optimal";
    case LPStatus::Infeasible: return "infeasible";
    case LPStatus::Unbounded: return "unbounded";
    default: return "numerical-failure";
  }
}

template <typename Scalar>
struct LPConstraintT {
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> a;
  Rel rel = Rel::Leq;
  Scalar b = Scalar(0);
};

/// maximize c.x subject to rows (a.x <= b or a.x = b) and per-variable
/// bounds; +-infinity bounds mean unbounded in that direction.
template <typename Scalar>
struct LPProblemT {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  Vector c;
  std::vector<LPConstraintT<Scalar>> rows;
  Vector lower;
  Vector upper;

  /// A problem with nVars free variables and zero objective.
  static LPProblemT withFreeVars(Index nVars) {
    if (nVars < 1) throw StructuralError("LP needs at least one variable");
    LPProblemT p;
    const Scalar inf = std::numeric_limits<Scalar>::infinity();
    p.c = Vector::Zero(nVars);
    p.lower = Vector::Constant(nVars, -inf);
    p.upper = Vector::Constant(nVars, inf);
    return p;
  }

  Index numVars() const { return c.size(); }

  void addLeq(Vector a, Scalar b) { rows.push_back({std::move(a), Rel::Leq, b}); }
  void addEq(Vector a, Scalar b) { rows.push_back({std::move(a), Rel::Eq, b}); }
};

/// All tolerances of the decision engine live here.
template <typename Scalar>
struct LPOptionsT {
  Scalar feasTol = Scalar(1e-9);
  Scalar optTol = Scalar(1e-9);
  long iterCapFactor = 10000;  // cap = factor * (vars + rows)
};

template <typename Scalar>
struct LPResultT {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  LPStatus status = LPStatus::NumericalFailure;
  Scalar value = Scalar(0);  // optimal value; +inf when unbounded
  Vector x;                  // optimizer (optimal) or ray base point (unbounded)
  Vector ray;                // improving feasible direction (unbounded)
  long iterations = 0;
  std::string note;          // diagnostic detail for numerical failures
};

namespace detail {

template <typename Scalar>
class SimplexT {
 public:
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  SimplexT(const LPProblemT<Scalar>& p, const LPOptionsT<Scalar>& opts) : p_(p), opts_(opts) {
    validate();
    iterCap_ = opts_.iterCapFactor * (p_.numVars() + static_cast<long>(p_.rows.size()));
  }

  LPResultT<Scalar> run() {
    LPResultT<Scalar> res;
    for (Index j = 0; j < p_.numVars(); ++j) {
      if (p_.lower[j] > p_.upper[j]) {
        res.status = LPStatus::Infeasible;
        return res;
      }
    }
    buildStandardForm();
    buildTableau();

    // Phase 1: minimize the artificial total (maximize its negative).
    if (m_ > 0) {
      Vector costs1 = Vector::Zero(totalCols_);
      for (Index i = 0; i < m_; ++i) costs1[artStart_ + i] = Scalar(-1);
      const Step s1 = simplexLoop(costs1, totalCols_);
      if (s1 == Step::IterLimit) return iterFailure(res, "phase 1 iteration cap");
      if (s1 == Step::Unbounded) return iterFailure(res, "phase 1 reported unbounded");
      Scalar artTotal(0);
      for (Index i = 0; i < m_; ++i)
        if (basis_[i] >= artStart_) artTotal += T_(i, rhsCol_);
      const Scalar bScale = std::max(Scalar(1), bMax_);
      if (artTotal > opts_.feasTol * bScale) {
        res.status = LPStatus::Infeasible;
        res.iterations = iterations_;
        return res;
      }
      driveOutArtificials();
    }

    // Phase 2: the user's objective over structural and slack columns only.
    Vector costs2 = Vector::Zero(totalCols_);
    costs2.head(nStd_) = cStd_;
    const Step s2 = simplexLoop(costs2, artStart_);
    res.iterations = iterations_;
    if (s2 == Step::IterLimit) return iterFailure(res, "phase 2 iteration cap");
    if (s2 == Step::Unbounded) return unboundedResult(res);
    return optimalResult(res, costs2);
  }

 private:
  enum class Step { Optimal, Unbounded, IterLimit };
  enum class Kind { Shift, Mirror, FreePair };
  struct VarMap {
    Kind kind;
    Index col;
    Scalar off;  // the finite bound used by the substitution
  };

  void validate() const {
    const Index n = p_.numVars();
    if (n < 1) throw StructuralError("LP needs at least one variable");
    if (!p_.c.allFinite()) throw StructuralError("LP objective entries must be finite");
    if (p_.lower.size() != n || p_.upper.size() != n)
      throw StructuralError("LP bound vectors must match the variable count");
    for (Index j = 0; j < n; ++j) {
      if (std::isnan(static_cast<double>(p_.lower[j])) ||
          std::isnan(static_cast<double>(p_.upper[j])))
        throw StructuralError("LP bounds must not be NaN");
    }
    for (const auto& r : p_.rows) {
      if (r.a.size() != n) throw StructuralError("LP row dimension mismatch");
      if (!r.a.allFinite() || !std::isfinite(static_cast<double>(r.b)))
        throw StructuralError("LP row entries must be finite");
    }
  }

  void buildStandardForm() {
    const Index n = p_.numVars();
    const Scalar inf = std::numeric_limits<Scalar>::infinity();
    vmap_.clear();
    vmap_.reserve(static_cast<std::size_t>(n));
    nStd_ = 0;
    for (Index j = 0; j < n; ++j) {
      if (p_.lower[j] > -inf) {
        vmap_.push_back({Kind::Shift, nStd_, p_.lower[j]});
        nStd_ += 1;
      } else if (p_.upper[j] < inf) {
        vmap_.push_back({Kind::Mirror, nStd_, p_.upper[j]});
        nStd_ += 1;
      } else {
        vmap_.push_back({Kind::FreePair, nStd_, Scalar(0)});
        nStd_ += 2;
      }
    }

    auto toStdRow = [&](const Vector& a, Scalar b, Vector& arow, Scalar& brow) {
      arow = Vector::Zero(nStd_);
      brow = b;
      for (Index j = 0; j < n; ++j) {
        const VarMap& vm = vmap_[static_cast<std::size_t>(j)];
        switch (vm.kind) {
          case Kind::Shift:
            arow[vm.col] += a[j];
            brow -= a[j] * vm.off;
            break;
          case Kind::Mirror:
            arow[vm.col] -= a[j];
            brow -= a[j] * vm.off;
            break;
          case Kind::FreePair:
            arow[vm.col] += a[j];
            arow[vm.col + 1] -= a[j];
            break;
        }
      }
    };

    stdRows_.clear();
    for (const auto& r : p_.rows) {
      Vector arow;
      Scalar brow;
      toStdRow(r.a, r.b, arow, brow);
      stdRows_.push_back({std::move(arow), r.rel, brow});
    }
    // Doubly bounded variables keep their upper bound as an extra row.
    for (Index j = 0; j < n; ++j) {
      const VarMap& vm = vmap_[static_cast<std::size_t>(j)];
      if (vm.kind == Kind::Shift && p_.upper[j] < inf) {
        Vector arow = Vector::Zero(nStd_);
        arow[vm.col] = Scalar(1);
        stdRows_.push_back({std::move(arow), Rel::Leq, p_.upper[j] - p_.lower[j]});
      }
    }

    cStd_ = Vector::Zero(nStd_);
    cShift_ = Scalar(0);
    for (Index j = 0; j < n; ++j) {
      const VarMap& vm = vmap_[static_cast<std::size_t>(j)];
      switch (vm.kind) {
        case Kind::Shift:
          cStd_[vm.col] += p_.c[j];
          cShift_ += p_.c[j] * vm.off;
          break;
        case Kind::Mirror:
          cStd_[vm.col] -= p_.c[j];
          cShift_ += p_.c[j] * vm.off;
          break;
        case Kind::FreePair:
          cStd_[vm.col] += p_.c[j];
          cStd_[vm.col + 1] -= p_.c[j];
          break;
      }
    }
  }

  void buildTableau() {
    m_ = static_cast<Index>(stdRows_.size());
    Index nSlack = 0;
    for (const auto& r : stdRows_)
      if (r.rel == Rel::Leq) ++nSlack;
    artStart_ = nStd_ + nSlack;
    totalCols_ = artStart_ + m_;
    rhsCol_ = totalCols_;

    T_ = Matrix::Zero(m_, totalCols_ + 1);
    basis_.assign(static_cast<std::size_t>(m_), Index(-1));
    bMax_ = Scalar(0);
    Index s = 0;
    for (Index i = 0; i < m_; ++i) {
      const auto& r = stdRows_[static_cast<std::size_t>(i)];
      T_.row(i).head(nStd_) = r.a.transpose();
      if (r.rel == Rel::Leq) {
        T_(i, nStd_ + s) = Scalar(1);
        ++s;
      }
      T_(i, rhsCol_) = r.b;
      if (T_(i, rhsCol_) < Scalar(0)) T_.row(i) *= Scalar(-1);
      T_(i, artStart_ + i) = Scalar(1);
      basis_[static_cast<std::size_t>(i)] = artStart_ + i;
      bMax_ = std::max(bMax_, std::abs(static_cast<double>(T_(i, rhsCol_))));
    }
  }

  bool isBasic(Index col) const {
    for (Index b : basis_)
      if (b == col) return true;
    return false;
  }

  Scalar reducedCost(const Vector& costs, Index j) const {
    Scalar r = costs[j];
    for (Index i = 0; i < m_; ++i) r -= costs[basis_[static_cast<std::size_t>(i)]] * T_(i, j);
    return r;
  }

  void pivot(Index row, Index col) {
    T_.row(row) /= T_(row, col);
    for (Index i = 0; i < m_; ++i) {
      if (i == row) continue;
      const Scalar f = T_(i, col);
      if (f != Scalar(0)) T_.row(i) -= f * T_.row(row);
    }
    basis_[static_cast<std::size_t>(row)] = col;
    ++iterations_;
  }

  /// Bland's rule: entering column is the smallest improving index; the
  /// leaving row minimizes the ratio, ties broken by smallest basic index.
  Step simplexLoop(const Vector& costs, Index allowedCols) {
    unboundedCol_ = -1;
    while (true) {
      if (iterations_ > iterCap_) return Step::IterLimit;
      Index enter = -1;
      for (Index j = 0; j < allowedCols; ++j) {
        if (isBasic(j)) continue;
        if (reducedCost(costs, j) > opts_.optTol) {
          enter = j;
          break;
        }
      }
      if (enter < 0) return Step::Optimal;

      Index leave = -1;
      Scalar best = Scalar(0);
      for (Index i = 0; i < m_; ++i) {
        if (T_(i, enter) > opts_.feasTol) {
          const Scalar ratio = T_(i, rhsCol_) / T_(i, enter);
          if (leave < 0) {
            best = ratio;
            leave = i;
            continue;
          }
          const Scalar tie = Scalar(1e-12) * std::max(Scalar(1), std::abs(best));
          if (ratio < best - tie) {
            best = ratio;
            leave = i;
          } else if (ratio <= best + tie &&
                     basis_[static_cast<std::size_t>(i)] <
                         basis_[static_cast<std::size_t>(leave)]) {
            leave = i;
          }
        }
      }
      if (leave < 0) {
        unboundedCol_ = enter;
        return Step::Unbounded;
      }
      pivot(leave, enter);
    }
  }

  /// Pivot basic artificials out on any nonzero structural/slack entry; a row
  /// with no such entry is redundant and its artificial stays basic at zero.
  void driveOutArtificials() {
    for (Index i = 0; i < m_; ++i) {
      if (basis_[static_cast<std::size_t>(i)] < artStart_) continue;
      for (Index j = 0; j < artStart_; ++j) {
        if (std::abs(static_cast<double>(T_(i, j))) > opts_.feasTol && !isBasic(j)) {
          pivot(i, j);
          break;
        }
      }
    }
  }

  Vector standardPoint() const {
    Vector y = Vector::Zero(totalCols_);
    for (Index i = 0; i < m_; ++i) y[basis_[static_cast<std::size_t>(i)]] = T_(i, rhsCol_);
    return y;
  }

  Vector toOriginal(const Vector& y) const {
    Vector x(p_.numVars());
    for (Index j = 0; j < p_.numVars(); ++j) {
      const VarMap& vm = vmap_[static_cast<std::size_t>(j)];
      switch (vm.kind) {
        case Kind::Shift: x[j] = vm.off + y[vm.col]; break;
        case Kind::Mirror: x[j] = vm.off - y[vm.col]; break;
        case Kind::FreePair: x[j] = y[vm.col] - y[vm.col + 1]; break;
      }
    }
    return x;
  }

  Vector toOriginalDirection(const Vector& dy) const {
    Vector d(p_.numVars());
    for (Index j = 0; j < p_.numVars(); ++j) {
      const VarMap& vm = vmap_[static_cast<std::size_t>(j)];
      switch (vm.kind) {
        case Kind::Shift: d[j] = dy[vm.col]; break;
        case Kind::Mirror: d[j] = -dy[vm.col]; break;
        case Kind::FreePair: d[j] = dy[vm.col] - dy[vm.col + 1]; break;
      }
    }
    return d;
  }

  LPResultT<Scalar> iterFailure(LPResultT<Scalar>& res, const std::string& where) {
    res.status = LPStatus::NumericalFailure;
    res.iterations = iterations_;
    res.note = where;
    return res;
  }

  LPResultT<Scalar> optimalResult(LPResultT<Scalar>& res, const Vector& costs2) {
    const Vector y = standardPoint();
    res.x = toOriginal(y.head(nStd_));
    Scalar value = cShift_;
    for (Index j = 0; j < nStd_; ++j) value += costs2[j] * y[j];
    res.value = value;

    // Never report an optimum whose point is infeasible.
    const Scalar inf = std::numeric_limits<Scalar>::infinity();
    Scalar worst(0);
    for (const auto& r : p_.rows) {
      const Scalar lhs = r.a.dot(res.x);
      const Scalar viol = (r.rel == Rel::Leq)
                              ? (lhs - r.b)
                              : std::abs(static_cast<double>(lhs - r.b));
      worst = std::max(worst, viol / std::max(Scalar(1), std::abs(static_cast<double>(r.b))));
    }
    for (Index j = 0; j < p_.numVars(); ++j) {
      if (p_.lower[j] > -inf) worst = std::max(worst, p_.lower[j] - res.x[j]);
      if (p_.upper[j] < inf) worst = std::max(worst, res.x[j] - p_.upper[j]);
    }
    if (worst > opts_.feasTol) {
      res.status = LPStatus::NumericalFailure;
      std::ostringstream os;
      os << "returned point violates constraints by " << worst;
      res.note = os.str();
      return res;
    }
    res.status = LPStatus::Optimal;
    return res;
  }

  LPResultT<Scalar> unboundedResult(LPResultT<Scalar>& res) {
    Vector dy = Vector::Zero(totalCols_);
    dy[unboundedCol_] = Scalar(1);
    for (Index i = 0; i < m_; ++i)
      dy[basis_[static_cast<std::size_t>(i)]] = -T_(i, unboundedCol_);
    res.ray = toOriginalDirection(dy.head(nStd_));
    res.x = toOriginal(standardPoint().head(nStd_));
    res.value = std::numeric_limits<Scalar>::infinity();

    // Certify the ray: feasible direction with strictly improving objective.
    const Scalar inf = std::numeric_limits<Scalar>::infinity();
    const Scalar dScale = std::max(Scalar(1), res.ray.template lpNorm<Eigen::Infinity>());
    const Scalar rayTol = opts_.feasTol * dScale * Scalar(10);
    bool ok = p_.c.dot(res.ray) > opts_.optTol / Scalar(2);
    for (const auto& r : p_.rows) {
      const Scalar drift = r.a.dot(res.ray);
      if (r.rel == Rel::Leq ? (drift > rayTol) : (std::abs(static_cast<double>(drift)) > rayTol))
        ok = false;
    }
    for (Index j = 0; j < p_.numVars(); ++j) {
      if (p_.lower[j] > -inf && res.ray[j] < -rayTol) ok = false;
      if (p_.upper[j] < inf && res.ray[j] > rayTol) ok = false;
    }
    if (!ok) {
      res.status = LPStatus::NumericalFailure;
      res.note = "unbounded certificate failed validation";
      return res;
    }
    res.status = LPStatus::Unbounded;
    return res;
  }

  const LPProblemT<Scalar>& p_;
  LPOptionsT<Scalar> opts_;
  long iterCap_ = 0;
  long iterations_ = 0;

  std::vector<VarMap> vmap_;
  std::vector<LPConstraintT<Scalar>> stdRows_;
  Vector cStd_;
  Scalar cShift_ = Scalar(0);

  Matrix T_;
  std::vector<Index> basis_;
  Index m_ = 0;
  Index nStd_ = 0;
  Index artStart_ = 0;
  Index totalCols_ = 0;
  Index rhsCol_ = 0;
  Scalar bMax_ = Scalar(0);
  Index unboundedCol_ = -1;
};

}  // namespace detail

template <typename Scalar>
LPResultT<Scalar> solve(const LPProblemT<Scalar>& p, const LPOptionsT<Scalar>& opts = {}) {
  detail::SimplexT<Scalar> s(p, opts);
  return s.run();
}

using LPConstraint = LPConstraintT<double>;
using LPProblem = LPProblemT<double>;
using LPOptions = LPOptionsT<double>;
using LPResult = LPResultT<double>;

}  // namespace ranconv
