#pragma once

// Discrete square-lattice domains with holes.
//
// A domain is specified by a set of integer grid cells (faces).  From the
// faces we build the minimal vertex / interior-edge / boundary-half-edge
// sets satisfying the four incidence axioms:
//   * all four edges and vertices of every face are present,
//   * every vertex is incident to exactly four edges or half-edges,
//   * every vertex incident to an edge is present,
//   * every interior edge has an incident face.
//
// All positions are integers in units of delta/8: lattice vertices sit at
// multiples of 8, edge midpoints and half-edge tips at multiples of 4,
// face corners (the points v_k = v + e^{i pi (2k+1)/4} * delta/(2 sqrt 2))
// at offsets (+-2, +-2) from a vertex.  This makes every geometric
// predicate exact integer arithmetic.

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "latspin/q8.hpp"

namespace latspin {

enum class Err {
  EmptyFaceSet,
  DisconnectedFaces,
  FlagArityMismatch,
  WalkLeavesDomain,
  InfeasibleSources,
  ComponentNotFound,
  SourcesNotInBoundaryOfS,
  NotAntisymmetric,
  MarkedPointsNotOuterBoundary,
  SingularSystem,
  ZeroSolution,
  ClosureViolation,
  NotInUpperHalfPlane,
  NearDegenerate,
  NonRectilinear,
  DegenerateDenominator,
  PunctureOnBoundary,
  MeshTooCoarse,
  ConventionViolation,
  InvalidInput,
};

struct Error : std::runtime_error {
  Err code;
  Error(Err c, const std::string& msg) : std::runtime_error(msg), code(c) {}
};

// Axis directions; values chosen so that (d+1)%4 is the 90-degree
// counterclockwise rotation.
enum Dir : int { DirE = 0, DirN = 1, DirW = 2, DirS = 3 };

inline constexpr std::array<int, 4> kDx{1, 0, -1, 0};
inline constexpr std::array<int, 4> kDy{0, 1, 0, -1};

inline Dir opposite(Dir d) { return Dir((d + 2) % 4); }
inline Dir ccw_next(Dir d) { return Dir((d + 1) % 4); }
inline Dir cw_next(Dir d) { return Dir((d + 3) % 4); }
// Right-hand normal of a direction of travel.
inline Dir right_of(Dir d) { return cw_next(d); }

// Turn (in quarter turns, +1 = left/ccw) from travel direction a to b.
// U-turns are not representable; callers never produce them.
inline int turn_qt(Dir a, Dir b) {
  int t = ((int(b) - int(a)) % 4 + 4) % 4;
  if (t == 3) return -1;
  if (t == 2) throw Error(Err::InvalidInput, "turn_qt: U-turn");
  return t;
}

struct IPt {
  long x = 0, y = 0;
  friend bool operator==(const IPt& a, const IPt& b) {
    return a.x == b.x && a.y == b.y;
  }
  friend bool operator<(const IPt& a, const IPt& b) {
    return a.x != b.x ? a.x < b.x : a.y < b.y;
  }
  IPt shifted(Dir d, long len) const {
    return {x + kDx[d] * len, y + kDy[d] * len};
  }
};

struct Cell {
  int x = 0, y = 0;
  friend bool operator==(const Cell& a, const Cell& b) {
    return a.x == b.x && a.y == b.y;
  }
  friend bool operator<(const Cell& a, const Cell& b) {
    return a.x != b.x ? a.x < b.x : a.y < b.y;
  }
};

// An interior edge (full lattice edge, dir E or N from its anchor vertex)
// or a boundary half-edge (from its inner vertex toward the midpoint of
// the missing lattice edge, any direction).
struct Element {
  int vertex = -1;   // anchor vertex index
  Dir dir = DirE;    // direction from the anchor
  bool half = false; // boundary half-edge?
  IPt mid;           // midpoint (edges) or tip (half-edges), delta/8 units
};

// eta for an axis direction u: (i u)^{-1/2} with the global sign fixed so
// that south-directed half-edges get eta = +1.
inline Q8 eta_of_dir(Dir d) {
  switch (d) {
    case DirE: return -Q8::zeta_pow(3);  // e^{-i pi/4}
    case DirN: return -Q8::i();          // e^{-i pi/2}
    case DirW: return Q8::zeta();        // e^{+i pi/4}
    case DirS: return Q8(1);
  }
  throw Error(Err::InvalidInput, "bad dir");
}

// Corner k of a vertex points into quadrant e^{i pi (2k+1)/4}; its two
// incident edges are those in directions k and k+1 (mod 4).  The corner
// phase satisfies eta_c^2 = (i * (c-v)/|c-v|)^{-1} = zeta^{-(2k+3)}, which
// is an exact 8th root even though eta_c itself is a 16th root.
inline Q8 eta_corner_sq(int k) {
  return Q8::zeta_pow(-(2 * k + 3));
}

// Float image of eta_c = e^{-i pi (2k+3)/8}, used only by the solver.
inline std::complex<double> eta_corner_cplx(int k) {
  double th = -3.14159265358979323846 * (2 * k + 3) / 8.0;
  return {std::cos(th), std::sin(th)};
}

struct TipEvent {
  int elem = -1;   // boundary half-edge element
  int vertex = -1;
  Dir u = DirE;    // outward direction of the half-edge
  int slot = 0;    // emitted at the vertex from which walk edge `slot` departs
  int ord = 0;     // order among tips emitted at that vertex
};

struct WalkEdge {
  int elem = -1;  // full interior edge
  Dir dir = DirE; // direction of ccw travel
  int from = -1;  // departure vertex index
};

class DiscreteDomain {
 public:
  Rational delta;
  std::vector<Cell> cells;             // sorted
  std::vector<IPt> vertices;           // sorted, coordinates multiples of 8
  std::vector<Element> elements;       // deterministic order
  std::vector<std::array<int, 4>> vertex_elems;  // per vertex, per dir
  std::vector<std::vector<Cell>> holes;          // ordered by smallest cell
  // Outer boundary, counterclockwise.
  std::vector<WalkEdge> walk;
  std::vector<TipEvent> outer_tips;    // cyclic ccw order
  std::vector<int> tip_index_of_elem;  // elem id -> index in outer_tips, or -1

  int vertex_index(const IPt& p) const {
    auto it = std::lower_bound(vertices.begin(), vertices.end(), p);
    if (it == vertices.end() || !(*it == p)) return -1;
    return int(it - vertices.begin());
  }
  bool has_cell(const Cell& c) const {
    return std::binary_search(cells.begin(), cells.end(), c);
  }
  int elem_at(int v, Dir d) const { return vertex_elems[v][d]; }
  bool is_interior_edge(int e) const { return !elements[e].half; }
  int n_interior_edges() const {
    int n = 0;
    for (const auto& e : elements) n += e.half ? 0 : 1;
    return n;
  }
  int n_boundary_half_edges() const {
    return int(elements.size()) - n_interior_edges();
  }

  // The two endpoint vertex indices of a full edge (anchor first).
  std::pair<int, int> edge_vertices(int e) const {
    const Element& el = elements[e];
    IPt other = vertices[el.vertex].shifted(el.dir, 8);
    return {el.vertex, vertex_index(other)};
  }

  // Outward unit direction of a boundary half-edge.
  Dir half_dir(int e) const { return elements[e].dir; }

  bool on_outer_boundary(int e) const {
    return e >= 0 && e < int(tip_index_of_elem.size()) &&
           tip_index_of_elem[e] >= 0;
  }

  // Number of cyclic steps from tip i to tip j going ccw.
  int tips_between(int i, int j) const {
    int n = int(outer_tips.size());
    return ((j - i) % n + n) % n;
  }

  // ---- geometry of the counterclockwise boundary arc from tip i to j ----
  //
  // The arc is the lattice path z_i -> v_i -> (boundary full edges) ->
  // v_j -> z_j entering along -u_i and leaving along +u_j; this is the
  // path a configuration interface takes when it hugs the boundary.

  struct BoundaryArc {
    std::vector<std::pair<int, Dir>> steps;  // traversed elements + travel dir
    int wind_qt = 0;                         // winding in quarter turns
  };

  BoundaryArc boundary_arc(int tip_i, int tip_j) const {
    if (tip_i == tip_j)
      throw Error(Err::InvalidInput, "boundary_arc: identical tips");
    const TipEvent& ti = outer_tips[tip_i];
    const TipEvent& tj = outer_tips[tip_j];
    BoundaryArc arc;
    arc.steps.push_back({ti.elem, opposite(ti.u)});
    int M = int(walk.size());
    if (ti.slot == tj.slot && ti.ord < tj.ord) {
      arc.wind_qt = turn_qt(opposite(ti.u), tj.u);
      arc.steps.push_back({tj.elem, tj.u});
      return arc;
    }
    int w = turn_qt(opposite(ti.u), walk[ti.slot].dir);
    int t = ti.slot;
    // Walk full edges up to (but not including) slot of tip j; if tips sit
    // in the same slot with ord_i > ord_j we go all the way around.
    int steps_total = ((tj.slot - ti.slot) % M + M) % M;
    if (steps_total == 0) steps_total = M;
    for (int s = 0; s < steps_total; ++s) {
      int cur = (ti.slot + s) % M;
      arc.steps.push_back({walk[cur].elem, walk[cur].dir});
      if (s + 1 < steps_total) {
        int nxt = (cur + 1) % M;
        w += turn_qt(walk[cur].dir, walk[nxt].dir);
      }
      t = cur;
    }
    w += turn_qt(walk[t].dir, tj.u);
    arc.wind_qt = w;
    arc.steps.push_back({tj.elem, tj.u});
    return arc;
  }

  // ---- offset polyline hugging the boundary outside, from tip i to j ----
  //
  // Runs at distance delta/8 outside the boundary arc, pinned to the two
  // tips; used both as the interface-closing curve of Dobrushin-type
  // boundary conditions and as a concrete realization of the artificial
  // arcs of multi-source observables.  All points are integers.

  struct OffsetArc {
    std::vector<IPt> pts;
    int wind_qt = 0;  // total turning, initial tangent +u_i, final -u_j
  };

  OffsetArc offset_arc(int tip_i, int tip_j) const {
    const TipEvent& ti = outer_tips[tip_i];
    const TipEvent& tj = outer_tips[tip_j];
    IPt zi = elements[ti.elem].mid, zj = elements[tj.elem].mid;
    if (zi == zj)
      throw Error(Err::InvalidInput,
                  "offset_arc: coincident tips are unsupported");
    OffsetArc res;
    auto& P = res.pts;
    auto push = [&P](IPt p) {
      if (P.empty() || !(P.back() == p)) P.push_back(p);
    };
    auto r1 = [](IPt p, Dir d) { return p.shifted(right_of(d), 1); };
    auto joint = [&push, &r1](IPt w, Dir a, Dir b) {
      if (a == b) {
        push(r1(w, a));
      } else if (b == cw_next(a)) {
        push(r1(r1(w, a), b));
      } else {
        push(r1(w, a));
        push(r1(r1(w, a), b));
        push(r1(w, b));
      }
    };
    push(zi);
    IPt A = zi.shifted(ti.u, 1);
    push(A);
    push(r1(A, opposite(ti.u)));
    int M = int(walk.size());
    if (ti.slot == tj.slot && ti.ord < tj.ord) {
      joint(vertices[ti.vertex], opposite(ti.u), tj.u);
    } else {
      joint(vertices[ti.vertex], opposite(ti.u), walk[ti.slot].dir);
      int steps_total = ((tj.slot - ti.slot) % M + M) % M;
      if (steps_total == 0) steps_total = M;
      for (int s = 0; s + 1 < steps_total; ++s) {
        int cur = (ti.slot + s) % M;
        int nxt = (cur + 1) % M;
        joint(vertices[walk[nxt].from], walk[cur].dir, walk[nxt].dir);
      }
      int last = (ti.slot + steps_total - 1) % M;
      joint(vertices[tj.vertex], walk[last].dir, tj.u);
    }
    IPt Ap = zj.shifted(tj.u, 1);
    push(r1(Ap, tj.u));
    push(Ap);
    push(zj);
    // Total turning of the polyline.
    int w = 0;
    std::optional<Dir> prev;
    for (size_t s = 0; s + 1 < P.size(); ++s) {
      long dx = P[s + 1].x - P[s].x, dy = P[s + 1].y - P[s].y;
      Dir d = dx > 0 ? DirE : dx < 0 ? DirW : dy > 0 ? DirN : DirS;
      if (prev && *prev != d) w += turn_qt(*prev, d);
      prev = d;
    }
    res.wind_qt = w;
    return res;
  }
};

namespace detail {

inline void trace_outer_boundary(DiscreteDomain& dom) {
  // Seed: the lexicographically smallest vertex is always entered moving
  // south along its N edge on the ccw outer cycle.
  int v0 = 0;
  int seed_arrival = dom.elem_at(v0, DirN);
  if (seed_arrival < 0 || dom.elements[seed_arrival].half)
    throw Error(Err::InvalidInput, "boundary trace: bad seed");
  int v = v0;
  Dir din = DirS;
  dom.tip_index_of_elem.assign(dom.elements.size(), -1);
  do {
    // Scan ccw starting after the arrival direction.
    Dir scan = opposite(din);
    int ord = 0;
    Dir dout = din;  // placeholder
    std::vector<TipEvent> pending;
    for (int s = 1; s <= 3; ++s) {
      Dir d = Dir((scan + s) % 4);
      int e = dom.elem_at(v, d);
      if (dom.elements[e].half) {
        TipEvent te;
        te.elem = e;
        te.vertex = v;
        te.u = d;
        te.slot = int(dom.walk.size());
        te.ord = ord++;
        pending.push_back(te);
      } else {
        dout = d;
        break;
      }
    }
    if (dom.elements[dom.elem_at(v, dout)].half)
      throw Error(Err::InvalidInput, "boundary trace: stuck");
    for (auto& te : pending) {
      dom.tip_index_of_elem[te.elem] = int(dom.outer_tips.size());
      dom.outer_tips.push_back(te);
    }
    WalkEdge we;
    we.dir = dout;
    we.from = v;
    int e = dom.elem_at(v, dout);
    we.elem = e;
    dom.walk.push_back(we);
    v = dom.vertex_index(dom.vertices[v].shifted(dout, 8));
    din = dout;
  } while (!(v == v0 && din == DirS));
}

}  // namespace detail

inline DiscreteDomain build_domain(std::vector<Cell> faces, Rational delta) {
  if (faces.empty()) throw Error(Err::EmptyFaceSet, "no faces");
  std::sort(faces.begin(), faces.end());
  faces.erase(std::unique(faces.begin(), faces.end()), faces.end());

  // Edge-connectivity of the face set.
  {
    std::set<Cell> todo(faces.begin() + 1, faces.end());
    std::vector<Cell> stack{faces[0]};
    while (!stack.empty()) {
      Cell c = stack.back();
      stack.pop_back();
      for (int d = 0; d < 4; ++d) {
        Cell n{c.x + kDx[d], c.y + kDy[d]};
        auto it = todo.find(n);
        if (it != todo.end()) {
          todo.erase(it);
          stack.push_back(n);
        }
      }
    }
    if (!todo.empty())
      throw Error(Err::DisconnectedFaces, "faces not edge-connected");
  }

  DiscreteDomain dom;
  dom.delta = std::move(delta);
  dom.cells = faces;

  // Full interior edges keyed by (anchor lattice point, dir in {E,N}).
  std::set<std::pair<std::pair<int, int>, int>> fulls;
  auto add_edge = [&fulls](int x, int y, Dir d) {
    fulls.insert({{x, y}, int(d)});
  };
  for (const Cell& c : faces) {
    add_edge(c.x, c.y, DirE);          // bottom
    add_edge(c.x, c.y + 1, DirE);      // top
    add_edge(c.x, c.y, DirN);          // left
    add_edge(c.x + 1, c.y, DirN);      // right
  }

  std::set<IPt> vset;
  for (const auto& [pt, d] : fulls) {
    IPt a{8L * pt.first, 8L * pt.second};
    vset.insert(a);
    vset.insert(a.shifted(Dir(d), 8));
  }
  dom.vertices.assign(vset.begin(), vset.end());

  dom.vertex_elems.assign(dom.vertices.size(), {-1, -1, -1, -1});
  auto has_full = [&fulls](const IPt& a, Dir d) {
    return fulls.count({{int(a.x / 8), int(a.y / 8)}, int(d)}) > 0;
  };
  // Deterministic element order: vertices in sorted order; at each vertex
  // first the anchored full edges (E,N), then the boundary half-edges.
  for (size_t vi = 0; vi < dom.vertices.size(); ++vi) {
    const IPt& p = dom.vertices[vi];
    for (Dir d : {DirE, DirN}) {
      if (has_full(p, d)) {
        Element el;
        el.vertex = int(vi);
        el.dir = d;
        el.half = false;
        el.mid = p.shifted(d, 4);
        dom.elements.push_back(el);
      }
    }
  }
  for (size_t vi = 0; vi < dom.vertices.size(); ++vi) {
    const IPt& p = dom.vertices[vi];
    for (int d = 0; d < 4; ++d) {
      bool covered = (d == DirE || d == DirN)
                         ? has_full(p, Dir(d))
                         : has_full(p.shifted(Dir(d), 8), Dir(opposite(Dir(d))));
      if (!covered) {
        Element el;
        el.vertex = int(vi);
        el.dir = Dir(d);
        el.half = true;
        el.mid = p.shifted(Dir(d), 4);
        dom.elements.push_back(el);
      }
    }
  }
  for (size_t e = 0; e < dom.elements.size(); ++e) {
    const Element& el = dom.elements[e];
    dom.vertex_elems[el.vertex][el.dir] = int(e);
    if (!el.half) {
      int w = dom.vertex_index(dom.vertices[el.vertex].shifted(el.dir, 8));
      dom.vertex_elems[w][opposite(el.dir)] = int(e);
    }
  }
  for (size_t vi = 0; vi < dom.vertices.size(); ++vi)
    for (int d = 0; d < 4; ++d)
      if (dom.vertex_elems[vi][d] < 0)
        throw Error(Err::InvalidInput, "vertex missing incident element");

  // Holes: bounded 4-connected components of the cell complement.
  {
    int xmin = faces[0].x, xmax = faces[0].x, ymin = faces[0].y,
        ymax = faces[0].y;
    for (const Cell& c : faces) {
      xmin = std::min(xmin, c.x);
      xmax = std::max(xmax, c.x);
      ymin = std::min(ymin, c.y);
      ymax = std::max(ymax, c.y);
    }
    --xmin; --ymin; ++xmax; ++ymax;
    std::map<Cell, int> comp;
    int next_comp = 0;
    for (int y = ymin; y <= ymax; ++y)
      for (int x = xmin; x <= xmax; ++x) {
        Cell c{x, y};
        if (dom.has_cell(c) || comp.count(c)) continue;
        int id = next_comp++;
        std::vector<Cell> stack{c};
        comp[c] = id;
        while (!stack.empty()) {
          Cell t = stack.back();
          stack.pop_back();
          for (int d = 0; d < 4; ++d) {
            Cell n{t.x + kDx[d], t.y + kDy[d]};
            if (n.x < xmin || n.x > xmax || n.y < ymin || n.y > ymax) continue;
            if (dom.has_cell(n) || comp.count(n)) continue;
            comp[n] = id;
            stack.push_back(n);
          }
        }
      }
    int outer_id = comp.at(Cell{xmin, ymin});
    std::map<int, std::vector<Cell>> by_id;
    for (const auto& [c, id] : comp)
      if (id != outer_id) by_id[id].push_back(c);
    for (auto& [id, cs] : by_id) {
      std::sort(cs.begin(), cs.end());
      dom.holes.push_back(cs);
    }
    std::sort(dom.holes.begin(), dom.holes.end(),
              [](const auto& a, const auto& b) { return a[0] < b[0]; });
  }

  detail::trace_outer_boundary(dom);
  return dom;
}

// Re-checks the incidence axioms on the stored sets; returns human-readable
// violations (empty = valid).  Used by tests that mutate a domain.
inline std::vector<std::string> validate(const DiscreteDomain& dom) {
  std::vector<std::string> bad;
  std::set<std::pair<int, int>> full_keys;  // (vertex, dir E/N)
  for (size_t e = 0; e < dom.elements.size(); ++e)
    if (!dom.elements[e].half)
      full_keys.insert({dom.elements[e].vertex, int(dom.elements[e].dir)});
  for (const Cell& c : dom.cells) {
    IPt bl{8L * c.x, 8L * c.y};
    int vbl = dom.vertex_index(bl);
    int vbr = dom.vertex_index(bl.shifted(DirE, 8));
    int vtl = dom.vertex_index(bl.shifted(DirN, 8));
    int vtr = vtl >= 0 ? dom.vertex_index(dom.vertices[vtl].shifted(DirE, 8))
                       : -1;
    if (vbl < 0 || vbr < 0 || vtl < 0 || vtr < 0) {
      bad.push_back("face missing a vertex");
      continue;
    }
    if (!full_keys.count({vbl, DirE})) bad.push_back("face missing bottom edge");
    if (!full_keys.count({vtl, DirE})) bad.push_back("face missing top edge");
    if (!full_keys.count({vbl, DirN})) bad.push_back("face missing left edge");
    if (!full_keys.count({vbr, DirN})) bad.push_back("face missing right edge");
  }
  for (size_t vi = 0; vi < dom.vertices.size(); ++vi) {
    int n = 0;
    for (int d = 0; d < 4; ++d)
      if (dom.vertex_elems[vi][d] >= 0) ++n;
    if (n != 4) bad.push_back("vertex not incident to four elements");
  }
  for (size_t e = 0; e < dom.elements.size(); ++e) {
    const Element& el = dom.elements[e];
    if (el.half) continue;
    IPt a = dom.vertices[el.vertex];
    Cell c1, c2;  // the two cells flanking the edge
    if (el.dir == DirE) {
      c1 = {int(a.x / 8), int(a.y / 8)};
      c2 = {int(a.x / 8), int(a.y / 8) - 1};
    } else {
      c1 = {int(a.x / 8), int(a.y / 8)};
      c2 = {int(a.x / 8) - 1, int(a.y / 8)};
    }
    if (!dom.has_cell(c1) && !dom.has_cell(c2))
      bad.push_back("interior edge without incident face");
  }
  return bad;
}

}  // namespace latspin
