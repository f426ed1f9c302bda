#pragma once

// Exact enumeration of generalized Ising configurations.
//
// Configurations with prescribed sources form a coset of the GF(2) cycle
// space of the interior-edge graph (plus free boundary bits for free
// boundary conditions).  We compute a kernel basis and a representative by
// Gaussian elimination over GF(2) and enumerate the coset in Gray-code
// order, so each step flips a single basis cycle.
//
// Spin assignments for expectation values are read off a configuration by
// exact ray-crossing parity: every element is an axis-aligned segment with
// integer coordinates in delta/8 units, and rays through face centers
// (coordinates 4 mod 8) can never meet a segment endpoint degenerately.

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "latspin/cover.hpp"
#include "latspin/domain.hpp"

namespace latspin {

// Dynamic fixed-width bitset, sized once.
class Bits {
 public:
  Bits() = default;
  explicit Bits(int n) : n_(n), w_((n + 63) / 64, 0) {}
  int size() const { return n_; }
  bool get(int i) const { return (w_[i >> 6] >> (i & 63)) & 1u; }
  void set(int i) { w_[i >> 6] |= (uint64_t(1) << (i & 63)); }
  void flip(int i) { w_[i >> 6] ^= (uint64_t(1) << (i & 63)); }
  void operator^=(const Bits& o) {
    for (size_t k = 0; k < w_.size(); ++k) w_[k] ^= o.w_[k];
  }
  bool any() const {
    for (uint64_t w : w_)
      if (w) return true;
    return false;
  }
  int count() const {
    int c = 0;
    for (uint64_t w : w_) c += __builtin_popcountll(w);
    return c;
  }
  int count_and(const Bits& o) const {
    int c = 0;
    for (size_t k = 0; k < w_.size(); ++k)
      c += __builtin_popcountll(w_[k] & o.w_[k]);
    return c;
  }
  int lowest() const {
    for (size_t k = 0; k < w_.size(); ++k)
      if (w_[k]) return int(k) * 64 + __builtin_ctzll(w_[k]);
    return -1;
  }
  template <typename F>
  void for_each(F f) const {
    for (size_t k = 0; k < w_.size(); ++k) {
      uint64_t w = w_[k];
      while (w) {
        int b = __builtin_ctzll(w);
        f(int(k) * 64 + b);
        w &= w - 1;
      }
    }
  }

 private:
  int n_ = 0;
  std::vector<uint64_t> w_;
};

// Kernel basis and particular solution of the vertex-parity map over a
// chosen set of generator elements.
struct ParitySolve {
  std::vector<Bits> kernel;      // masks over generators
  std::optional<Bits> particular;
};

inline ParitySolve solve_parity(const DiscreteDomain& dom,
                                const std::vector<int>& gens,
                                const std::vector<uint8_t>& rhs_parity) {
  int n = int(gens.size());
  int nv = int(dom.vertices.size());
  ParitySolve out;
  std::vector<Bits> piv_col;    // reduced columns with pivots
  std::vector<Bits> piv_combo;  // their expression in generators
  std::vector<int> piv_row;
  for (int j = 0; j < n; ++j) {
    Bits col(nv), combo(n);
    const Element& el = dom.elements[gens[j]];
    col.flip(el.vertex);
    if (!el.half) {
      int w = dom.vertex_index(dom.vertices[el.vertex].shifted(el.dir, 8));
      col.flip(w);
    }
    combo.set(j);
    for (size_t p = 0; p < piv_col.size(); ++p)
      if (col.get(piv_row[p])) {
        col ^= piv_col[p];
        combo ^= piv_combo[p];
      }
    if (col.any()) {
      piv_row.push_back(col.lowest());
      piv_col.push_back(col);
      piv_combo.push_back(combo);
    } else {
      out.kernel.push_back(combo);
    }
  }
  Bits b(nv), sol(n);
  for (int v = 0; v < nv; ++v)
    if (rhs_parity[v] & 1) b.set(v);
  for (size_t p = 0; p < piv_col.size(); ++p)
    if (b.get(piv_row[p])) {
      b ^= piv_col[p];
      sol ^= piv_combo[p];
    }
  if (!b.any()) out.particular = sol;
  return out;
}

// One coset of configurations: fixed half-edges, an optional inner target
// half, and free interior-edge choices forming representative + kernel.
struct ConfigCoset {
  const DiscreteDomain* dom = nullptr;
  std::vector<int> gens;            // generator element ids (mask indexing)
  std::vector<int> fixed_halves;    // boundary half-edges always present
  int inner_edge = -1;              // target edge, exactly one half present
  int inner_end_vertex = -1;        // endpoint of the chosen half
  Bits representative;
  std::vector<Bits> kernel;
  int fixed_size = 0;  // |fixed_halves| + (inner half ? 1 : 0)

  long long config_count() const { return 1LL << kernel.size(); }
};

// Enumerate the coset in Gray-code order.  The callback receives the
// current generator mask and |S| (edges + half-edges in S).
template <typename F>
void enumerate_coset(const ConfigCoset& c, F&& cb) {
  Bits cur = c.representative;
  int sz = cur.count() + c.fixed_size;
  cb(cur, sz);
  int k = int(c.kernel.size());
  if (k >= 63)
    throw Error(Err::InvalidInput, "cycle space too large to enumerate");
  uint64_t total = uint64_t(1) << k;
  for (uint64_t g = 1; g < total; ++g) {
    int b = __builtin_ctzll(g);
    int before = cur.count_and(c.kernel[b]);
    cur ^= c.kernel[b];
    sz += c.kernel[b].count() - 2 * before;
    cb(cur, sz);
  }
}

// Reduce a multiset of boundary half-edge sources mod 2.
inline std::vector<int> reduce_sources_mod2(std::vector<int> srcs) {
  std::sort(srcs.begin(), srcs.end());
  std::vector<int> out;
  for (size_t i = 0; i < srcs.size();) {
    size_t j = i;
    while (j < srcs.size() && srcs[j] == srcs[i]) ++j;
    if ((j - i) % 2) out.push_back(srcs[i]);
    i = j;
  }
  return out;
}

// Build the coset(s) for sources = reduced boundary half-edges plus an
// optional inner target edge.  When the target is an inner edge there are
// two cosets (one per choice of half); infeasible choices are dropped.
inline std::vector<ConfigCoset> make_cosets(const DiscreteDomain& dom,
                                            const std::vector<int>& halves,
                                            int inner_edge = -1) {
  for (int h : halves)
    if (!dom.elements[h].half)
      throw Error(Err::InvalidInput, "source is not a boundary half-edge");
  std::vector<int> gens;
  for (size_t e = 0; e < dom.elements.size(); ++e)
    if (!dom.elements[e].half && int(e) != inner_edge) gens.push_back(int(e));

  std::vector<uint8_t> base_par(dom.vertices.size(), 0);
  for (int h : halves) base_par[dom.elements[h].vertex] ^= 1;

  std::vector<ConfigCoset> result;
  std::vector<int> end_choices;
  if (inner_edge >= 0) {
    auto [u, w] = dom.edge_vertices(inner_edge);
    end_choices = {u, w};
  } else {
    end_choices = {-1};
  }
  for (int end : end_choices) {
    auto par = base_par;
    if (end >= 0) par[end] ^= 1;
    ParitySolve ps = solve_parity(dom, gens, par);
    if (!ps.particular) continue;
    ConfigCoset c;
    c.dom = &dom;
    c.gens = gens;
    c.fixed_halves = halves;
    c.inner_edge = inner_edge;
    c.inner_end_vertex = end;
    c.representative = *ps.particular;
    c.kernel = std::move(ps.kernel);
    c.fixed_size = int(halves.size()) + (inner_edge >= 0 ? 1 : 0);
    result.push_back(std::move(c));
  }
  if (result.empty())
    throw Error(Err::InfeasibleSources, "no configuration has these sources");
  return result;
}

// Coset for free boundary conditions: every boundary half-edge is free.
inline ConfigCoset make_free_coset(const DiscreteDomain& dom) {
  std::vector<int> gens(dom.elements.size());
  for (size_t e = 0; e < dom.elements.size(); ++e) gens[e] = int(e);
  std::vector<uint8_t> par(dom.vertices.size(), 0);
  ParitySolve ps = solve_parity(dom, gens, par);
  ConfigCoset c;
  c.dom = &dom;
  c.gens = gens;
  c.representative = *ps.particular;
  c.kernel = std::move(ps.kernel);
  return c;
}

// ---- exact sums ----

// Assemble sum_{p,s} count[p][s] * zeta^p * x^s.
class PhaseAccumulator {
 public:
  explicit PhaseAccumulator(int max_size)
      : counts_(8, std::vector<long long>(max_size + 1, 0)) {}
  void add(int zeta_pow, int size, long long mult = 1) {
    counts_[((zeta_pow % 8) + 8) % 8][size] += mult;
  }
  Q8 assemble() const {
    Q8 x = Q8::x_crit();
    Q8 total(0);
    Q8 xp(1);
    for (size_t s = 0; s < counts_[0].size(); ++s) {
      for (int p = 0; p < 8; ++p)
        if (counts_[p][s] != 0) {
          Q8 term = Q8::zeta_pow(p);
          total += Rational(long(counts_[p][s])) * term * xp;
        }
      xp *= x;
    }
    return total;
  }

 private:
  std::vector<std::vector<long long>> counts_;
};

// Partition function Z = sum x^{|S|} over a family of cosets.
inline Q8 partition_sum(const std::vector<ConfigCoset>& cosets) {
  int max_sz = 0;
  for (const auto& c : cosets)
    max_sz = std::max(max_sz, int(c.dom->elements.size()) + 2);
  PhaseAccumulator acc(max_sz);
  for (const auto& c : cosets)
    enumerate_coset(c, [&acc](const Bits&, int sz) { acc.add(0, sz); });
  return acc.assemble();
}

struct BoundaryCondition {
  enum Kind { Plus, Dobrushin, Free } kind = Plus;
  int a = -1, b = -1;  // Dobrushin marked boundary half-edges
};

inline Q8 partition_fn(const DiscreteDomain& dom, const BoundaryCondition& bc) {
  switch (bc.kind) {
    case BoundaryCondition::Plus:
      return partition_sum(make_cosets(dom, {}));
    case BoundaryCondition::Dobrushin: {
      if (bc.a == bc.b)
        throw Error(Err::InvalidInput, "dobrushin needs distinct points");
      return partition_sum(make_cosets(dom, {bc.a, bc.b}));
    }
    case BoundaryCondition::Free:
      return partition_sum({make_free_coset(dom)});
  }
  throw Error(Err::InvalidInput, "bad bc");
}

// ---- exact ray-crossing spin oracle ----
//
// sigma at a point is +1 at infinity and flips across every interface
// segment: configuration elements in S plus the closing curves that run
// outside the boundary along the "-" arcs.

struct Seg {
  IPt a, b;  // axis-aligned
};

inline int ray_crosses(const Seg& s, const IPt& p) {
  if (s.a.x == s.b.x) {
    long ylo = std::min(s.a.y, s.b.y), yhi = std::max(s.a.y, s.b.y);
    return (s.a.x > p.x && ylo <= p.y && p.y < yhi) ? 1 : 0;
  }
  return 0;  // horizontal segments never lie on a face-center ray
}

inline std::vector<Seg> element_segments(const DiscreteDomain& dom, int e) {
  const Element& el = dom.elements[e];
  IPt a = dom.vertices[el.vertex];
  IPt b = a.shifted(el.dir, el.half ? 4 : 8);
  return {{a, b}};
}

// Interface description for a spin measurement: which boundary half-edges
// are forced into S and which closing polylines accompany them.
struct InterfaceClosure {
  std::vector<int> forced_halves;
  std::vector<std::vector<IPt>> polylines;
};

// sigma masks for one observation point: parity contributions of each
// interior-edge generator plus the fixed contribution of forced halves
// and closing curves.
struct SigmaMask {
  Bits gen_mask;   // over coset generators
  int fixed = 0;   // parity from forced halves, closures, inner half
};

inline SigmaMask make_sigma_mask(const ConfigCoset& c, const IPt& p,
                                 const InterfaceClosure& closure) {
  const DiscreteDomain& dom = *c.dom;
  SigmaMask m;
  m.gen_mask = Bits(int(c.gens.size()));
  for (size_t j = 0; j < c.gens.size(); ++j)
    for (const Seg& s : element_segments(dom, c.gens[j]))
      if (ray_crosses(s, p)) m.gen_mask.flip(int(j));
  for (int h : c.fixed_halves)
    for (const Seg& s : element_segments(dom, h)) m.fixed ^= ray_crosses(s, p);
  for (const auto& poly : closure.polylines)
    for (size_t i = 0; i + 1 < poly.size(); ++i)
      m.fixed ^= ray_crosses(Seg{poly[i], poly[i + 1]}, p);
  if (c.inner_edge >= 0) {
    const Element& el = dom.elements[c.inner_edge];
    IPt a = dom.vertices[c.inner_end_vertex];
    m.fixed ^= ray_crosses(Seg{a, el.mid}, p);
  }
  return m;
}

inline int sigma_of(const SigmaMask& m, const Bits& config) {
  return ((m.gen_mask.count_and(config) + m.fixed) % 2) ? -1 : +1;
}

// Closing curves for "+/-/.../+/-" boundary conditions with marked points
// a_0,...,a_{2n+1} listed in ccw order: "-" arcs are (a_0 a_1), (a_2 a_3),
// ..., closed by curves hugging the boundary outside.
inline InterfaceClosure alternating_closure(const DiscreteDomain& dom,
                                            const std::vector<int>& marked) {
  if (marked.size() % 2)
    throw Error(Err::InvalidInput, "need evenly many marked points");
  InterfaceClosure cl;
  cl.forced_halves = marked;
  for (size_t s = 0; s + 1 < marked.size(); s += 2) {
    int ti = dom.tip_index_of_elem[marked[s]];
    int tj = dom.tip_index_of_elem[marked[s + 1]];
    if (ti < 0 || tj < 0)
      throw Error(Err::MarkedPointsNotOuterBoundary,
                  "marked point not on the outer boundary");
    cl.polylines.push_back(dom.offset_arc(ti, tj).pts);
  }
  return cl;
}

// Reference interior point of a spin component (a hole or a single face).
inline IPt component_point(const DiscreteDomain& dom, int hole_index) {
  const Cell& c = dom.holes.at(hole_index)[0];
  return {8L * c.x + 4, 8L * c.y + 4};
}
inline IPt face_point(const Cell& c) { return {8L * c.x + 4, 8L * c.y + 4}; }

// Unnormalized correlation sum  sum_S prod_j sigma_j(S) x^{|S|}  over the
// given cosets; divide by the matching partition sum for an expectation.
inline Q8 correlation_sum(const std::vector<ConfigCoset>& cosets,
                          const std::vector<IPt>& points,
                          const InterfaceClosure& closure) {
  int max_sz = 0;
  for (const auto& c : cosets)
    max_sz = std::max(max_sz, int(c.dom->elements.size()) + 2);
  PhaseAccumulator acc(max_sz);
  for (const auto& c : cosets) {
    std::vector<SigmaMask> masks;
    masks.reserve(points.size());
    for (const IPt& p : points) masks.push_back(make_sigma_mask(c, p, closure));
    enumerate_coset(c, [&](const Bits& cfg, int sz) {
      int sg = 1;
      for (const auto& m : masks) sg *= sigma_of(m, cfg);
      acc.add(sg > 0 ? 0 : 4, sz);  // zeta^4 = -1
    });
  }
  return acc.assemble();
}

// A spin component: an inner boundary component (hole) or a single face.
struct SpinComponent {
  int hole = -1;  // hole index, or
  Cell face{};    // a face of the domain when hole < 0
};

// E[prod sigma(component_j)] under plus or Dobrushin-type boundary
// conditions, as an exact real element of Q(sqrt 2).
inline Q8 spin_expectation(const DiscreteDomain& dom,
                           const BoundaryCondition& bc,
                           const std::vector<SpinComponent>& components) {
  std::vector<IPt> pts;
  for (const SpinComponent& sc : components) {
    if (sc.hole >= 0) {
      if (sc.hole >= int(dom.holes.size()))
        throw Error(Err::ComponentNotFound, "no such hole component");
      pts.push_back(component_point(dom, sc.hole));
    } else {
      if (!dom.has_cell(sc.face))
        throw Error(Err::ComponentNotFound, "no such face");
      pts.push_back(face_point(sc.face));
    }
  }
  InterfaceClosure closure;
  std::vector<ConfigCoset> cosets;
  if (bc.kind == BoundaryCondition::Plus) {
    cosets = make_cosets(dom, {});
  } else if (bc.kind == BoundaryCondition::Dobrushin) {
    closure = alternating_closure(dom, {bc.a, bc.b});
    cosets = make_cosets(dom, {bc.a, bc.b});
  } else {
    throw Error(Err::InvalidInput, "spin expectation needs plus or dobrushin");
  }
  Q8 num = correlation_sum(cosets, pts, closure);
  Q8 den = partition_sum(cosets);
  return num / den;
}

}  // namespace latspin
