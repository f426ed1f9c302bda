#pragma once

// The fixed verification catalogue and the mesh-refinement convergence
// experiment comparing discrete correlation ratios to the continuum
// invariants.

#include <chrono>
#include <memory>

#include "latspin/continuum.hpp"
#include "latspin/shol.hpp"

namespace latspin {

struct CatalogueInstance {
  std::string name;
  std::shared_ptr<DiscreteDomain> dom;
  std::vector<bool> flags;
  bool multi = false;  // also run the multi-source suite here
};

inline std::vector<Cell> block_cells(int nx, int ny) {
  std::vector<Cell> c;
  for (int x = 0; x < nx; ++x)
    for (int y = 0; y < ny; ++y) c.push_back({x, y});
  return c;
}

inline std::vector<Cell> cells_without(std::vector<Cell> cells,
                                       const std::vector<Cell>& out) {
  for (const Cell& o : out)
    cells.erase(std::find(cells.begin(), cells.end(), o));
  return cells;
}

// Eight domains; fifteen cover instances in total.
inline std::vector<CatalogueInstance> catalogue() {
  std::vector<CatalogueInstance> out;
  auto add = [&out](const std::string& name, std::vector<Cell> cells,
                    int holes, bool multi_on_all = false) {
    auto dom = std::make_shared<DiscreteDomain>(
        build_domain(std::move(cells), Rational(1)));
    int n_covers = 1 << holes;
    for (int mask = 0; mask < n_covers; ++mask) {
      CatalogueInstance inst;
      inst.dom = dom;
      inst.flags.assign(holes, false);
      for (int j = 0; j < holes; ++j) inst.flags[j] = (mask >> j) & 1;
      inst.name = name;
      for (int j = 0; j < holes; ++j)
        inst.name += inst.flags[j] ? "+" : "-";
      inst.multi = multi_on_all;
      out.push_back(inst);
    }
  };
  add("1x1", block_cells(1, 1), 0);
  add("2x2", block_cells(2, 2), 0);
  add("3x3", block_cells(3, 3), 0);
  add("4x4", block_cells(4, 4), 0);
  add("3x3-hole", cells_without(block_cells(3, 3), {{1, 1}}), 1, true);
  add("4x4-hole", cells_without(block_cells(4, 4), {{1, 1}}), 1);
  add("4x4-2holes", cells_without(block_cells(4, 4), {{1, 1}, {2, 2}}), 2);
  // The dedicated multi-source entry.
  {
    CatalogueInstance inst;
    inst.dom = std::make_shared<DiscreteDomain>(
        build_domain(block_cells(2, 2), Rational(1)));
    inst.name = "2x2-4pt";
    inst.multi = true;
    out.push_back(inst);
  }
  return out;
}

inline CoverPoint default_source(const DiscreteDomain& dom) {
  return CoverPoint(dom.outer_tips[0].elem, +1);
}

// Lifts of boundary elements by ccw boundary transport of the source sheet.
inline std::vector<CoverPoint> boundary_lifts(const DoubleCover& cov,
                                              const CoverPoint& a0,
                                              const std::vector<int>& elems) {
  const DiscreteDomain& dom = *cov.base;
  int ta = dom.tip_index_of_elem.at(a0.elem);
  std::vector<CoverPoint> out;
  for (int e : elems) {
    if (e == a0.elem) {
      out.push_back(a0);
      continue;
    }
    auto arc = dom.boundary_arc(ta, dom.tip_index_of_elem.at(e));
    out.push_back(CoverPoint(e, arc_transport(cov, arc, a0.sheet)));
  }
  return out;
}

inline std::vector<CoverPoint> default_marked(const DoubleCover& cov,
                                              const CoverPoint& a0) {
  const DiscreteDomain& dom = *cov.base;
  int n = int(dom.outer_tips.size());
  int ta = dom.tip_index_of_elem.at(a0.elem);
  std::vector<int> elems{dom.outer_tips[(ta + n / 4) % n].elem,
                         dom.outer_tips[(ta + n / 2) % n].elem};
  return boundary_lifts(cov, a0, elems);
}

// Criterion-style exact identity run over the whole catalogue.
inline CheckReport run_catalogue_identities() {
  CheckReport rep;
  for (const CatalogueInstance& inst : catalogue()) {
    auto cov = build_cover(*inst.dom, inst.flags);
    CoverPoint a = default_source(*inst.dom);
    rep.merge(check_identities(cov, a, inst.name));
    if (inst.multi)
      rep.merge(check_identities_multi(cov, a, default_marked(cov, a),
                                       inst.name));
  }
  return rep;
}

// Exact H-function suite over the catalogue.
inline CheckReport run_catalogue_h() {
  CheckReport rep;
  for (const CatalogueInstance& inst : catalogue()) {
    auto cov = build_cover(*inst.dom, inst.flags);
    CoverPoint a = default_source(*inst.dom);
    SpinorField f = enumerate_field(cov, a);
    HField<Q8> h = build_h(f);
    rep.merge(check_h_properties(h, f, inst.name));
  }
  return rep;
}

struct SolverAgreement {
  std::string name;
  double max_diff = 0.0;
  double residual = 0.0;
};

// Solver/enumeration max-norm disagreement per catalogue instance.
inline std::vector<SolverAgreement> run_catalogue_solver() {
  std::vector<SolverAgreement> rows;
  for (const CatalogueInstance& inst : catalogue()) {
    auto cov = build_cover(*inst.dom, inst.flags);
    CoverPoint a = default_source(*inst.dom);
    SpinorFieldF fs = solve_bvp(cov, a);
    SpinorField fe = enumerate_field(cov, a);
    Q8 ieta = Q8::i() * eta_of_dir(inst.dom->half_dir(a.elem));
    double scale =
        (ieta.conj() * fe.at(CoverPoint(a.elem, a.sheet))).to_complex().real();
    double worst = 0;
    for (size_t e = 0; e < fe.values.size(); ++e)
      worst = std::max(worst, std::abs(fe.values[e].to_complex() / scale -
                                       fs.values[e]));
    rows.push_back({inst.name, worst, fs.residual});
  }
  return rows;
}

// ---- mesh-refinement convergence ----

struct ConvergenceSpec {
  Cplx a{0.0, 0.5};         // marked boundary points of the unit square
  Cplx b{1.0, 0.5};
  Cplx puncture{0.5, 0.5};  // strictly interior
  std::vector<int> sizes{8, 16, 32};
  bool use_enumeration = false;
  int hm_refine = 16;       // base grid for the continuum oracle
};

struct ConvergenceRow {
  int n = 0;
  Rational delta;
  double ratio = 0.0;
  double theta = 0.0;
  double abs_error = 0.0;
  std::string method;
  double seconds = 0.0;
};

// Snap a continuum puncture to the mesh: the containing face in general;
// when the requested point is a lattice point of the mesh (as symmetric
// fixtures are at even n) the unique symmetric choice is the plaquette of
// the four faces around it.  Returns the removed cells and the point at
// which the continuum invariant is evaluated.
struct SnappedPuncture {
  std::vector<Cell> cells;
  Cplx point;
};

inline SnappedPuncture snap_puncture(const ConvergenceSpec& spec, int n) {
  double px = spec.puncture.real() * n, py = spec.puncture.imag() * n;
  auto near_int = [](double t) { return std::abs(t - std::round(t)) < 1e-9; };
  SnappedPuncture snap;
  if (near_int(px) && near_int(py)) {
    int rx = int(std::lround(px)), ry = int(std::lround(py));
    if (rx < 2 || ry < 2 || rx > n - 2 || ry > n - 2)
      throw Error(Err::MeshTooCoarse, "puncture plaquette must be interior");
    snap.cells = {{rx - 1, ry - 1}, {rx - 1, ry}, {rx, ry - 1}, {rx, ry}};
    snap.point = Cplx(double(rx) / n, double(ry) / n);
    return snap;
  }
  int cx = std::clamp(int(std::floor(px)), 0, n - 1);
  int cy = std::clamp(int(std::floor(py)), 0, n - 1);
  if (cx == 0 || cy == 0 || cx == n - 1 || cy == n - 1)
    throw Error(Err::MeshTooCoarse, "puncture face must be interior");
  snap.cells = {{cx, cy}};
  snap.point = Cplx((cx + 0.5) / n, (cy + 0.5) / n);
  return snap;
}

inline std::vector<ConvergenceRow> run_convergence(const ConvergenceSpec& spec) {
  std::vector<ConvergenceRow> rows;
  for (int n : spec.sizes) {
    auto t0 = std::chrono::steady_clock::now();
    SnappedPuncture snap = snap_puncture(spec, n);
    auto cells = cells_without(block_cells(n, n), snap.cells);
    DiscreteDomain dom = build_domain(cells, Rational(1, n));
    if (dom.holes.size() != 1)
      throw Error(Err::MeshTooCoarse, "puncture did not create a hole");
    auto covb = build_cover(dom, {true});
    auto covt = build_cover(dom, {false});
    double scale = 8.0 * n;
    int ta = nearest_outer_tip(dom, spec.a * scale);
    int tb = nearest_outer_tip(dom, spec.b * scale);
    CoverPoint a(dom.outer_tips[ta].elem, +1);
    int b_elem = dom.outer_tips[tb].elem;

    ConvergenceRow row;
    row.n = n;
    row.delta = Rational(1, n);
    if (spec.use_enumeration) {
      row.method = "enumeration";
      row.ratio =
          boundary_ratio_exact(dom, covb, a, b_elem).to_complex().real();
    } else {
      row.method = "solver";
      row.ratio = boundary_ratio_solver(dom, covb, covt, a, b_elem);
    }
    // Continuum invariant at the snapped puncture: cos(pi hm(w, (ab))).
    HmProblem hm;
    hm.cells = {{0, 0}};
    hm.point = snap.point;
    hm.arc_from = spec.a;
    hm.arc_to = spec.b;
    row.theta = std::cos(3.14159265358979324 *
                         hm_numeric(hm, spec.hm_refine).value);
    row.abs_error = std::abs(row.ratio - row.theta);
    row.seconds = std::chrono::duration<double>(
                      std::chrono::steady_clock::now() - t0)
                      .count();
    rows.push_back(row);
  }
  return rows;
}

}  // namespace latspin
