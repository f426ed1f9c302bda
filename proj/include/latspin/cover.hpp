#pragma once

// Double covers of a discrete domain.
//
// A cover is determined by one branching bit per hole.  It is realized by
// a system of dual cuts, one per branched hole, running from inside the
// hole to the outer region; traversing a lattice element half that the
// cut crosses toggles the sheet.  Every edge or half-edge consists of one
// or two halves (anchor-side and far-side); flips live on halves so that
// walks ending at edge midpoints transport unambiguously.

#include <cstdint>
#include <vector>

#include "latspin/domain.hpp"

namespace latspin {

// A lift of an edge midpoint / half-edge tip.
struct CoverPoint {
  int elem = -1;
  int sheet = +1;  // +-1
  CoverPoint() = default;
  CoverPoint(int e, int s) : elem(e), sheet(s) {}
  CoverPoint star() const { return CoverPoint(elem, -sheet); }
  friend bool operator==(const CoverPoint& a, const CoverPoint& b) {
    return a.elem == b.elem && a.sheet == b.sheet;
  }
};

enum class CutStyle { West, East };  // direction the dual cuts run

class DoubleCover {
 public:
  const DiscreteDomain* base = nullptr;
  std::vector<bool> branch_flags;                 // one per hole
  std::vector<std::array<int8_t, 2>> half_flip;   // per element: anchor/far half

  bool trivial() const {
    for (bool b : branch_flags)
      if (b) return false;
    return true;
  }

  // Flip of the half of element e incident to vertex v.
  int flip_at(int e, int v) const {
    const Element& el = base->elements[e];
    if (el.vertex == v) return half_flip[e][0];
    return half_flip[e][1];
  }
  int flip_anchor(int e) const { return half_flip[e][0]; }
  // Flip of a full traversal of element e (both halves for edges, the
  // single half for boundary half-edges).
  int flip_through(int e) const {
    return base->elements[e].half ? half_flip[e][0]
                                  : half_flip[e][0] * half_flip[e][1];
  }
};

inline DoubleCover build_cover(const DiscreteDomain& dom,
                               std::vector<bool> branch_flags,
                               CutStyle style = CutStyle::West) {
  if (branch_flags.size() != dom.holes.size())
    throw Error(Err::FlagArityMismatch,
                "branch_flags arity != number of holes");
  DoubleCover cov;
  cov.base = &dom;
  cov.branch_flags = std::move(branch_flags);
  cov.half_flip.assign(dom.elements.size(), {+1, +1});

  long xmin = 0, xmax = 0;
  if (!dom.cells.empty()) {
    xmin = dom.cells.front().x;
    xmax = dom.cells.front().x;
    for (const Cell& c : dom.cells) {
      xmin = std::min(xmin, long(c.x));
      xmax = std::max(xmax, long(c.x));
    }
  }
  for (size_t j = 0; j < dom.holes.size(); ++j) {
    if (!cov.branch_flags[j]) continue;
    Cell h = dom.holes[j][0];
    // Horizontal dual cut at height y*8+2: crosses the lower half of each
    // vertical lattice edge on its way out of the domain.
    int step = style == CutStyle::West ? -1 : +1;
    long stop = style == CutStyle::West ? xmin - 1 : xmax + 1;
    for (long x = h.x; x != stop + step; x += step) {
      long ex = style == CutStyle::West ? x : x + 1;  // crossed edge at x = ex
      IPt anchor{8 * ex, 8L * h.y};
      int vi = dom.vertex_index(anchor);
      if (vi < 0) continue;
      int e = dom.elem_at(vi, DirN);
      if (e < 0) continue;
      const Element& el = dom.elements[e];
      bool anchored_here = el.vertex == vi && el.dir == DirN;
      if (!anchored_here) continue;  // the N element at vi always is
      cov.half_flip[e][0] = -cov.half_flip[e][0];
    }
  }
  return cov;
}

// Transport of a sheet along a lattice walk given as directed element
// traversals.  `through` elements are traversed fully (vertex to vertex);
// callers handle the half-traversals at walk ends via flip_at.
inline int transport_through(const DoubleCover& cov,
                             const std::vector<int>& elems, int start_sheet) {
  int s = start_sheet;
  for (int e : elems) s *= cov.flip_through(e);
  return s;
}

// Walk given as a vertex path; consecutive vertices must be lattice
// neighbors joined by an interior edge of the domain.
inline int transport(const DoubleCover& cov, const std::vector<int>& verts,
                     int start_sheet) {
  const DiscreteDomain& dom = *cov.base;
  int s = start_sheet;
  for (size_t i = 0; i + 1 < verts.size(); ++i) {
    const IPt& a = dom.vertices[verts[i]];
    const IPt& b = dom.vertices[verts[i + 1]];
    long dx = b.x - a.x, dy = b.y - a.y;
    Dir d;
    if (dx == 8 && dy == 0) d = DirE;
    else if (dx == -8 && dy == 0) d = DirW;
    else if (dx == 0 && dy == 8) d = DirN;
    else if (dx == 0 && dy == -8) d = DirS;
    else throw Error(Err::WalkLeavesDomain, "walk step is not a lattice edge");
    int e = dom.elem_at(verts[i], d);
    if (e < 0 || dom.elements[e].half)
      throw Error(Err::WalkLeavesDomain, "walk leaves the domain");
    s *= cov.flip_through(e);
  }
  return s;
}

}  // namespace latspin
