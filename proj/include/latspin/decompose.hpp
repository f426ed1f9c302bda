#pragma once

// Decomposition of a configuration into non-crossing loops and the path
// gamma joining the sources, with exact winding (quarter turns) and sheet
// transport along every piece.
//
// At degree-4 vertices strands are resolved by a fixed non-crossing
// pairing; the default pairs the {N,E} and {S,W} stubs, the alternative
// legal pairing {N,W},{S,E} is kept as a property-test hook.  Multi-source
// configurations are completed by artificial arcs joining marked points
// pairwise outside the domain; an arc contributes its declared winding and
// sheet transport, and meets its endpoint strands with zero junction turn
// (strands leave tips outward, arcs return inward).

#include <cstdint>
#include <vector>

#include "latspin/cover.hpp"
#include "latspin/enumeration.hpp"

namespace latspin {

enum class Resolution { PairNE_SW, PairNW_SE };

inline Dir strand_partner(Dir arrival_stub, Resolution rule) {
  if (rule == Resolution::PairNE_SW) {
    switch (arrival_stub) {
      case DirN: return DirE;
      case DirE: return DirN;
      case DirS: return DirW;
      case DirW: return DirS;
    }
  } else {
    switch (arrival_stub) {
      case DirN: return DirW;
      case DirW: return DirN;
      case DirS: return DirE;
      case DirE: return DirS;
    }
  }
  throw Error(Err::InvalidInput, "bad dir");
}

// Artificial arc between two marked boundary half-edges (tips), running
// outside the domain.  wind_qt is the winding of the realized curve from
// e1 to e2 (initial tangent outward at e1, final tangent inward at e2),
// already adjusted by full turns so that the eta-compatibility relation
// exp(-i wind/2) = eta_{e2} / (i eta_{e1}) holds exactly.
struct ArcData {
  int e1 = -1, e2 = -1;
  int wind_qt = 0;
  int tau = +1;  // declared sheet transport between the marked lifts
};

struct PhaseDecomposition {
  // Loops as traversed element sequences (arcs appear as negative codes
  // -(1+arc_index)); gamma likewise.
  std::vector<std::vector<int>> loops;
  std::vector<int> loop_wind_qt;
  std::vector<int8_t> loop_nontrivial;  // transport flips sheet
  std::vector<int> gamma;
  int gamma_wind_qt = 0;
  int gamma_transport = +1;
  int l_parity = 0;  // (#nontrivial loops) mod 2
  int i_parity = 0;  // (#loops with winding = 0 mod 4pi) mod 2
};

// Static description of one observable evaluation; configurations from a
// coset are traced against it.
struct TraceSetup {
  const DoubleCover* cov = nullptr;
  int src_elem = -1;
  int src_sheet = +1;
  // target: either a boundary half-edge / marked point, or an inner edge
  int target_elem = -1;
  int target_sheet = +1;
  std::vector<ArcData> arcs;
  Resolution rule = Resolution::PairNE_SW;

  int arc_index_of(int elem, bool* forward) const {
    for (size_t s = 0; s < arcs.size(); ++s) {
      if (arcs[s].e1 == elem) { *forward = true; return int(s); }
      if (arcs[s].e2 == elem) { *forward = false; return int(s); }
    }
    return -1;
  }
};

// Workspace reused across configurations of one coset.
class Tracer {
 public:
  Tracer(const ConfigCoset& coset, const TraceSetup& setup)
      : coset_(coset), setup_(setup), dom_(*coset.dom) {
    stub_.assign(dom_.vertices.size(), 0);
    consumed_ = Bits(int(dom_.elements.size()));
    gamma_degenerate_ = setup.target_elem == setup.src_elem;
  }

  // Trace one configuration; returns the summary needed for the phase.
  // keep_pieces: also record loops/gamma element lists (slower).
  PhaseDecomposition trace(const Bits& cfg, bool keep_pieces = false) {
    PhaseDecomposition out;
    keep_ = keep_pieces;
    touched_.clear();
    present_.assign(dom_.elements.size() ? dom_.elements.size() : 1, 0);
    cfg.for_each([&](int j) { add_stub_elem(coset_.gens[j]); });
    for (int h : coset_.fixed_halves) add_stub_elem(h);
    if (coset_.inner_edge >= 0) add_inner_stub();
    consumed_clear();

    if (!gamma_degenerate_) trace_gamma(out);
    // Loops: repeatedly take the smallest present unconsumed element.
    for (size_t e = 0; e < dom_.elements.size(); ++e) {
      if (!present_[e] || consumed_.get(int(e))) continue;
      trace_loop(int(e), out);
    }
    for (int v : touched_) stub_[v] = 0;
    return out;
  }

 private:
  void add_stub_elem(int e) {
    const Element& el = dom_.elements[e];
    set_stub(el.vertex, el.dir);
    present_[e] = 1;
    if (!el.half) {
      int w = dom_.vertex_index(dom_.vertices[el.vertex].shifted(el.dir, 8));
      set_stub(w, opposite(el.dir));
    }
  }
  void add_inner_stub() {
    const Element& el = dom_.elements[coset_.inner_edge];
    auto [u, w] = dom_.edge_vertices(coset_.inner_edge);
    present_[coset_.inner_edge] = 1;
    if (coset_.inner_end_vertex == u)
      set_stub(u, el.dir);
    else
      set_stub(w, opposite(el.dir));
  }
  void set_stub(int v, Dir d) {
    if (stub_[v] == 0) touched_.push_back(v);
    stub_[v] |= uint8_t(1) << d;
  }
  void consumed_clear() {
    consumed_ = Bits(int(dom_.elements.size()));
  }

  int stub_count(int v) const { return __builtin_popcount(stub_[v]); }

  // Departure stub at v after arriving via arrival_dir (stub direction of
  // the element we came in on).  Returns the rule partner; callers check
  // consumption for loop closure.
  Dir departure(int v, Dir arrival_stub) const {
    if (stub_count(v) == 4) return strand_partner(arrival_stub, setup_.rule);
    for (int d = 0; d < 4; ++d)
      if (d != arrival_stub && (stub_[v] >> d) & 1) return Dir(d);
    throw Error(Err::SourcesNotInBoundaryOfS, "dangling strand");
  }

  struct StrandEnd {
    int wind_qt = 0;
    int transport = +1;
    int end_elem = -1;   // element we exited through, -1 when closed
    bool closed = false; // next departure was the (consumed) stop element
  };

  // Walk the lattice from vertex v with current travel direction, until
  // the strand exits through a half-edge tip / the inner-target midpoint,
  // or until the next departure equals `stop` (loop closure; the closing
  // turn is included).
  StrandEnd walk_lattice(int v, Dir travel, int stop,
                         std::vector<int>* piece) {
    StrandEnd r;
    while (true) {
      Dir dep = departure(v, opposite(travel));
      int e = dom_.elem_at(v, dep);
      if (e == stop) {
        r.wind_qt += turn_qt(travel, dep);
        r.closed = true;
        return r;
      }
      r.wind_qt += turn_qt(travel, dep);
      consumed_.set(e);
      if (piece) piece->push_back(e);
      if (e == coset_.inner_edge || dom_.elements[e].half) {
        r.transport *= cov().flip_at(e, v);
        r.end_elem = e;
        return r;
      }
      r.transport *= cov().flip_through(e);
      v = dom_.vertex_index(dom_.vertices[v].shifted(dep, 8));
      travel = dep;
    }
  }

  // Enter from the tip of half-edge h and walk inward.
  StrandEnd run_from_tip(int h, int stop, std::vector<int>* piece) {
    const Element& eh = dom_.elements[h];
    consumed_.set(h);
    if (piece) piece->push_back(h);
    StrandEnd r = walk_lattice(eh.vertex, opposite(eh.dir), stop, piece);
    r.transport *= cov().flip_at(h, eh.vertex);
    return r;
  }

  void trace_gamma(PhaseDecomposition& out) {
    std::vector<int>* piece = keep_ ? &out.gamma : nullptr;
    int wind = 0, tr = +1;
    int cur = setup_.src_elem;
    while (true) {
      StrandEnd s = run_from_tip(cur, -1, piece);
      wind += s.wind_qt;
      tr *= s.transport;
      if (s.end_elem == setup_.target_elem) break;
      bool fwd = false;
      int ai = setup_.arc_index_of(s.end_elem, &fwd);
      if (ai < 0)
        throw Error(Err::SourcesNotInBoundaryOfS,
                    "strand ended at an unmarked half-edge");
      const ArcData& arc = setup_.arcs[ai];
      wind += fwd ? arc.wind_qt : -arc.wind_qt;
      tr *= arc.tau;
      if (piece) piece->push_back(-(1 + ai));
      int partner = fwd ? arc.e2 : arc.e1;
      if (partner == setup_.target_elem) break;  // gamma ends through the arc
      cur = partner;
    }
    out.gamma_wind_qt = wind;
    out.gamma_transport = tr;
  }

  void trace_loop(int start, PhaseDecomposition& out) {
    std::vector<int> piece_store;
    std::vector<int>* piece = keep_ ? &piece_store : nullptr;
    const Element& el = dom_.elements[start];
    int wind = 0, tr = +1;
    StrandEnd s;
    if (el.half) {
      s = run_from_tip(start, -1, piece);
    } else {
      consumed_.set(start);
      if (piece) piece->push_back(start);
      tr *= cov().flip_through(start);
      int v = dom_.vertex_index(dom_.vertices[el.vertex].shifted(el.dir, 8));
      s = walk_lattice(v, el.dir, start, piece);
    }
    while (true) {
      wind += s.wind_qt;
      tr *= s.transport;
      if (s.closed) break;
      bool fwd = false;
      int ai = setup_.arc_index_of(s.end_elem, &fwd);
      if (ai < 0)
        throw Error(Err::SourcesNotInBoundaryOfS,
                    "loop strand ended at an unmarked half-edge");
      const ArcData& arc = setup_.arcs[ai];
      wind += fwd ? arc.wind_qt : -arc.wind_qt;
      tr *= arc.tau;
      if (piece) piece->push_back(-(1 + ai));
      int partner = fwd ? arc.e2 : arc.e1;
      if (partner == start) break;  // arc loop closes at its starting tip
      s = run_from_tip(partner, start, piece);
    }
    bool nontrivial = tr < 0;
    bool zero_mod_4pi = ((wind % 8) + 8) % 8 == 0;
    out.l_parity ^= nontrivial ? 1 : 0;
    out.i_parity ^= zero_mod_4pi ? 1 : 0;
    out.loop_wind_qt.push_back(wind);
    out.loop_nontrivial.push_back(nontrivial ? 1 : 0);
    if (keep_) out.loops.push_back(std::move(piece_store));
  }

  const DoubleCover& cov() const { return *setup_.cov; }

  const ConfigCoset& coset_;
  const TraceSetup& setup_;
  const DiscreteDomain& dom_;
  std::vector<uint8_t> stub_;
  std::vector<uint8_t> present_;
  std::vector<int> touched_;
  Bits consumed_;
  bool keep_ = false;
  bool gamma_degenerate_ = false;
};

}  // namespace latspin
