// JSON (de)serialization of the library's value types. Layout:
//   AtomSpace   -> [p0, p1, ...]
//   L0Scalar    -> [v0, v1, ...]           (one number per atom)
//   Event       -> [b0, b1, ...]           (one boolean per atom)
//   ModuleElem  -> [[x00,...],[x10,...]]   ([atom][coordinate])
//   ModuleMap   -> [[[...]], ...]          ([atom][row][col])
//   ConvexFn    -> {"variant","side","pieces","domain","points","point"}
//   operator parameter records mirror their field lists.
// Infinite scalar entries are encoded as the strings "+inf"/"-inf".
#pragma once

#include <json.hpp>

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "ranconv/atom_space.hpp"
#include "ranconv/convex_fn.hpp"
#include "ranconv/errors.hpp"
#include "ranconv/l0_scalar.hpp"
#include "ranconv/order_ops.hpp"
#include "ranconv/rn_module.hpp"

namespace ranconv {

using Json = nlohmann::json;

inline Json jsonNumber(double v) {
  if (std::isinf(v)) return v > 0 ? Json("+inf") : Json("-inf");
  return Json(v);
}

inline double numberFromJson(const Json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "+inf" || s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    throw ConfigError("unrecognized numeric string '" + s + "'");
  }
  if (!j.is_number()) throw ConfigError("expected a number, got " + j.dump());
  return j.get<double>();
}

// --- atom spaces, scalars, events -----------------------------------------

inline Json toJson(const AtomSpace& space) {
  Json a = Json::array();
  for (Index i = 0; i < space.atomCount(); ++i) a.push_back(space.prob(i));
  return a;
}

inline AtomSpacePtr atomSpaceFromJson(const Json& j) {
  if (!j.is_array() || j.empty()) throw ConfigError("atom space must be a nonempty array");
  ArrayX<double> probs(static_cast<Index>(j.size()));
  for (Index i = 0; i < probs.size(); ++i)
    probs[i] = numberFromJson(j[static_cast<std::size_t>(i)]);
  return makeAtomSpace<double>(std::move(probs));
}

inline Json toJson(const L0Scalar& xi) {
  Json a = Json::array();
  for (Index i = 0; i < xi.atomCount(); ++i) a.push_back(xi[i]);
  return a;
}

inline Json toJson(const ExtL0Scalar& xi) {
  Json a = Json::array();
  for (Index i = 0; i < xi.atomCount(); ++i) a.push_back(jsonNumber(xi[i]));
  return a;
}

inline L0Scalar l0FromJson(const Json& j, const AtomSpacePtr& space) {
  if (!j.is_array() || static_cast<Index>(j.size()) != space->atomCount())
    throw ConfigError("L0 scalar needs one number per atom");
  ArrayX<double> vals(space->atomCount());
  for (Index i = 0; i < vals.size(); ++i)
    vals[i] = numberFromJson(j[static_cast<std::size_t>(i)]);
  return L0Scalar(space, std::move(vals));
}

inline Json toJson(const Event& A) {
  Json a = Json::array();
  for (Index i = 0; i < A.atomCount(); ++i) a.push_back(A.contains(i));
  return a;
}

inline Event eventFromJson(const Json& j, const AtomSpacePtr& space) {
  if (!j.is_array() || static_cast<Index>(j.size()) != space->atomCount())
    throw ConfigError("event needs one boolean per atom");
  MaskArray mask(space->atomCount());
  for (Index i = 0; i < mask.size(); ++i) {
    const auto& cell = j[static_cast<std::size_t>(i)];
    if (!cell.is_boolean()) throw ConfigError("event entries must be booleans");
    mask[i] = cell.get<bool>();
  }
  return Event(space, std::move(mask));
}

// --- module elements and maps ----------------------------------------------

inline Json toJson(const ModuleElem& x) {
  Json a = Json::array();
  for (Index i = 0; i < x.atomCount(); ++i) {
    Json row = Json::array();
    for (Index r = 0; r < x.dim(); ++r) row.push_back(x.atom(i)[r]);
    a.push_back(std::move(row));
  }
  return a;
}

inline ModuleElem elemFromJson(const Json& j, const AtomSpacePtr& space, Side side) {
  if (!j.is_array() || static_cast<Index>(j.size()) != space->atomCount())
    throw ConfigError("module element needs one coordinate array per atom");
  const auto& first = j[0];
  if (!first.is_array() || first.empty())
    throw ConfigError("module element coordinates must be nonempty arrays");
  const Index d = static_cast<Index>(first.size());
  MatrixX<double> coords(d, space->atomCount());
  for (Index i = 0; i < space->atomCount(); ++i) {
    const auto& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Index>(row.size()) != d)
      throw ConfigError("module element coordinate arrays must share one length");
    for (Index r = 0; r < d; ++r)
      coords(r, i) = numberFromJson(row[static_cast<std::size_t>(r)]);
  }
  return ModuleElem(space, std::move(coords), side);
}

inline Json toJson(const ModuleMap& T) {
  Json a = Json::array();
  for (Index i = 0; i < T.atomCount(); ++i) {
    Json mat = Json::array();
    for (Index r = 0; r < T.dimOut(); ++r) {
      Json row = Json::array();
      for (Index c = 0; c < T.dimIn(); ++c) row.push_back(T.atom(i)(r, c));
      mat.push_back(std::move(row));
    }
    a.push_back(std::move(mat));
  }
  return a;
}

inline ModuleMap mapFromJson(const Json& j, const AtomSpacePtr& space) {
  if (!j.is_array() || static_cast<Index>(j.size()) != space->atomCount())
    throw ConfigError("module map needs one matrix per atom");
  std::vector<MatrixX<double>> mats;
  mats.reserve(j.size());
  for (const auto& mat : j) {
    if (!mat.is_array() || mat.empty()) throw ConfigError("module map matrices must be arrays");
    const Index rows = static_cast<Index>(mat.size());
    const Index cols = static_cast<Index>(mat[0].size());
    MatrixX<double> M(rows, cols);
    for (Index r = 0; r < rows; ++r) {
      const auto& row = mat[static_cast<std::size_t>(r)];
      if (!row.is_array() || static_cast<Index>(row.size()) != cols)
        throw ConfigError("module map rows must share one length");
      for (Index c = 0; c < cols; ++c)
        M(r, c) = numberFromJson(row[static_cast<std::size_t>(c)]);
    }
    mats.push_back(std::move(M));
  }
  return ModuleMap(space, std::move(mats));
}

// --- convex functions --------------------------------------------------------

inline Json toJson(const ConvexFn& f) {
  Json j;
  j["variant"] = variantName(f.variant());
  j["side"] = sideName(f.side());
  switch (f.variant()) {
    case FnVariant::HRep: {
      Json pieces = Json::array();
      for (const auto& h : f.pieces())
        pieces.push_back(Json{{"u", toJson(h.u)}, {"alpha", toJson(h.alpha)}});
      j["pieces"] = std::move(pieces);
      Json domain = Json::array();
      for (const auto& hs : f.domain())
        domain.push_back(Json{{"a", toJson(hs.a)}, {"b", toJson(hs.b)}});
      j["domain"] = std::move(domain);
      break;
    }
    case FnVariant::VRep: {
      Json points = Json::array();
      for (const auto& vp : f.points())
        points.push_back(Json{{"p", toJson(vp.p)}, {"beta", toJson(vp.beta)}});
      j["points"] = std::move(points);
      break;
    }
    default: j["point"] = toJson(f.point()); break;
  }
  return j;
}

inline ConvexFn convexFnFromJson(const Json& j, const AtomSpacePtr& space) {
  const std::string variant = j.value("variant", "");
  const std::string sideStr = j.value("side", "primal");
  const Side side = sideStr == "dual" ? Side::Dual : Side::Primal;
  if (variant == "hrep") {
    std::vector<AffineFn> pieces;
    for (const auto& pj : j.at("pieces"))
      pieces.emplace_back(elemFromJson(pj.at("u"), space, opposite(side)),
                          l0FromJson(pj.at("alpha"), space));
    std::vector<HalfSpace> domain;
    if (j.contains("domain"))
      for (const auto& dj : j.at("domain"))
        domain.emplace_back(elemFromJson(dj.at("a"), space, opposite(side)),
                            l0FromJson(dj.at("b"), space));
    return ConvexFn::hrep(std::move(pieces), std::move(domain));
  }
  if (variant == "vrep") {
    std::vector<VPoint> points;
    for (const auto& pj : j.at("points"))
      points.emplace_back(elemFromJson(pj.at("p"), space, side),
                          l0FromJson(pj.at("beta"), space));
    return ConvexFn::vrep(std::move(points));
  }
  if (variant == "indicator")
    return ConvexFn::indicator(elemFromJson(j.at("point"), space, side));
  throw ConfigError("unknown convex function variant '" + variant + "'");
}

// --- operator parameters ------------------------------------------------------

inline Json toJson(const OpParamsT& p) {
  return Json{{"H", toJson(p.H)},
              {"c", toJson(p.c)},
              {"w", toJson(p.w)},
              {"tau", toJson(p.tau)},
              {"beta", toJson(p.beta)}};
}

inline OpParamsT tParamsFromJson(const Json& j, const AtomSpacePtr& space) {
  return OpParamsT(mapFromJson(j.at("H"), space), elemFromJson(j.at("c"), space, Side::Primal),
                   elemFromJson(j.at("w"), space, Side::Dual), l0FromJson(j.at("tau"), space),
                   l0FromJson(j.at("beta"), space));
}

inline Json toJson(const HatTParams& p) {
  return Json{{"D", toJson(p.D)},
              {"w", toJson(p.w)},
              {"d", toJson(p.d)},
              {"tau", toJson(p.tau)},
              {"beta", toJson(p.beta)}};
}

inline HatTParams hatTParamsFromJson(const Json& j, const AtomSpacePtr& space) {
  return HatTParams(mapFromJson(j.at("D"), space), elemFromJson(j.at("w"), space, Side::Dual),
                    elemFromJson(j.at("d"), space, Side::Primal), l0FromJson(j.at("tau"), space),
                    l0FromJson(j.at("beta"), space));
}

inline Json toJson(const OpParamsS& p) {
  return Json{{"H", toJson(p.H)},
              {"v", toJson(p.v)},
              {"y", toJson(p.y)},
              {"tau", toJson(p.tau)},
              {"rho", toJson(p.rho)}};
}

inline OpParamsS sParamsFromJson(const Json& j, const AtomSpacePtr& space) {
  return OpParamsS(mapFromJson(j.at("H"), space), elemFromJson(j.at("v"), space, Side::Dual),
                   elemFromJson(j.at("y"), space, Side::Primal), l0FromJson(j.at("tau"), space),
                   l0FromJson(j.at("rho"), space));
}

}  // namespace ranconv
