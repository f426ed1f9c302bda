#pragma once

// Polynomial-time computation of spinor observables by solving the
// discrete Riemann boundary value problem, and the discrete primitive
// H = Im int F^2 defined on vertices and faces.
//
// Unknowns are one real value per corner, X(c) = Re(conj(eta_c) F) taken
// on the canonical sheet with cut-sign coupling, which makes
// s-holomorphicity structural and spinor antisymmetry exact.  Each
// interior edge contributes two consistency rows tying its four corner
// projections to a single complex value; each non-source boundary
// half-edge contributes one projection-vanishing row; the source
// contributes the normalization F(a) = i eta_a.  The sparse least-squares
// system is solved via normal equations with iterative refinement.

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <complex>
#include <map>
#include <vector>

#include "latspin/observable.hpp"

namespace latspin {

struct SpinorFieldF {
  const DoubleCover* cover = nullptr;
  CoverPoint source;
  std::vector<std::complex<double>> values;  // per element, sheet +1
  double residual = 0.0;

  std::complex<double> at(const CoverPoint& p) const {
    return p.sheet > 0 ? values[p.elem] : -values[p.elem];
  }
};

// Corners flanking direction d at a vertex: k = d and k = d-1 (mod 4).
inline std::array<int, 2> corners_of_dir(Dir d) {
  return {int(d), (int(d) + 3) % 4};
}

struct CornerSystem {
  Eigen::SparseMatrix<double> A;
  Eigen::VectorXd b;
  int n_corners = 0;
};

inline CornerSystem assemble_corner_system(const DoubleCover& cov,
                                           const CoverPoint& a,
                                           bool bc_at_source_instead) {
  const DiscreteDomain& dom = *cov.base;
  int nc = 4 * int(dom.vertices.size());
  std::vector<Eigen::Triplet<double>> trip;
  std::vector<double> rhs;
  auto theta = [](int k) { return eta_corner_cplx(k); };

  auto corner_id = [](int v, int k) { return 4 * v + k; };

  for (size_t e = 0; e < dom.elements.size(); ++e) {
    const Element& el = dom.elements[e];
    if (!el.half) {
      auto [v, w] = dom.edge_vertices(int(e));
      // Four corner incidences: (vertex, corner k, flip, eta_c).
      struct Inc { int v, k; double f; std::complex<double> eta; };
      std::vector<Inc> inc;
      for (int k : corners_of_dir(el.dir))
        inc.push_back({v, k, double(cov.flip_at(int(e), v)), theta(k)});
      for (int k : corners_of_dir(opposite(el.dir)))
        inc.push_back({w, k, double(cov.flip_at(int(e), w)), theta(k)});
      // Solve the first two incidences for (Re F, Im F), substitute into
      // the remaining two:  f_i (c_i u + s_i w) - X_i = 0.
      double c1 = inc[0].eta.real(), s1 = inc[0].eta.imag();
      double c2 = inc[1].eta.real(), s2 = inc[1].eta.imag();
      double det = c1 * s2 - s1 * c2;
      for (int i = 2; i < 4; ++i) {
        double ci = inc[i].eta.real(), si = inc[i].eta.imag();
        // (u,w) = M^{-1} (f1 X1, f2 X2)
        double q1 = (si * (-c2) + ci * s2) / det;   // coeff of f1 X1
        double q2 = (ci * (-s1) + si * c1) / det;   // coeff of f2 X2
        int row = int(rhs.size());
        trip.emplace_back(row, corner_id(inc[0].v, inc[0].k),
                          inc[i].f * inc[0].f * q1);
        trip.emplace_back(row, corner_id(inc[1].v, inc[1].k),
                          inc[i].f * inc[1].f * q2);
        trip.emplace_back(row, corner_id(inc[i].v, inc[i].k), -1.0);
        rhs.push_back(0.0);
      }
    } else {
      bool is_source = int(e) == a.elem;
      int v = el.vertex;
      auto ks = corners_of_dir(el.dir);
      std::complex<double> eta_b;
      {
        auto q = eta_of_dir(el.dir).to_complex();
        eta_b = {q.real(), q.imag()};
      }
      double f1 = cov.flip_at(int(e), v), f2 = f1;  // same half both corners
      if (is_source && !bc_at_source_instead) {
        // Normalization F(a) = i eta_a on the source lift.  The source
        // side of its two corners carries an extra factor x_crit in the
        // projection relation, because the exchange bijection adds the
        // marked half-edge rather than swapping it.
        const double x_crit = 0.41421356237309504880;
        std::complex<double> fa =
            std::complex<double>(0, 1) * eta_b * double(a.sheet) * x_crit;
        for (int k : ks) {
          int row = int(rhs.size());
          trip.emplace_back(row, corner_id(v, k), 1.0);
          rhs.push_back(f1 * (std::conj(theta(k)) * fa).real());
        }
      } else {
        double r1 = (std::conj(theta(ks[0])) * eta_b).real();
        double r2 = (std::conj(theta(ks[1])) * eta_b).real();
        int row = int(rhs.size());
        trip.emplace_back(row, corner_id(v, ks[0]), f2 * r2);
        trip.emplace_back(row, corner_id(v, ks[1]), -f1 * r1);
        rhs.push_back(0.0);
      }
    }
  }
  CornerSystem sys;
  sys.n_corners = nc;
  sys.A.resize(int(rhs.size()), nc);
  sys.A.setFromTriplets(trip.begin(), trip.end());
  sys.b = Eigen::Map<Eigen::VectorXd>(rhs.data(), long(rhs.size()));
  return sys;
}

// Sparse least squares by normal equations with iterative refinement;
// small systems fall back to a dense column-pivoted QR, which is backward
// stable and comfortably exceeds the oracle-agreement tolerance.
inline Eigen::VectorXd solve_least_squares(const Eigen::SparseMatrix<double>& A,
                                           const Eigen::VectorXd& b) {
  if (A.cols() < 2000) {
    Eigen::MatrixXd dense(A);
    return dense.colPivHouseholderQr().solve(b);
  }
  Eigen::SparseMatrix<double> ata = Eigen::SparseMatrix<double>(A.transpose()) * A;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(ata);
  if (ldlt.info() != Eigen::Success)
    throw Error(Err::SingularSystem, "normal-equation factorization failed");
  Eigen::VectorXd x = ldlt.solve(A.transpose() * b);
  for (int it = 0; it < 8; ++it) {
    Eigen::VectorXd r = b - A * x;
    Eigen::VectorXd dx = ldlt.solve(A.transpose() * r);
    x += dx;
    if (dx.norm() <= 1e-15 * (x.norm() + 1.0)) break;
  }
  return x;
}

inline SpinorFieldF solve_bvp(const DoubleCover& cov, const CoverPoint& a,
                              bool bc_at_source_instead = false,
                              double residual_tol = 1e-10) {
  const DiscreteDomain& dom = *cov.base;
  CornerSystem sys = assemble_corner_system(cov, a, bc_at_source_instead);
  Eigen::VectorXd x = solve_least_squares(sys.A, sys.b);
  double bn = sys.b.norm();
  double res = (sys.A * x - sys.b).norm();
  if (bn > 0 && res > residual_tol * bn)
    throw Error(Err::SingularSystem, "BVP residual above tolerance");

  SpinorFieldF f;
  f.cover = &cov;
  f.source = a;
  f.residual = bn > 0 ? res / bn : res;
  f.values.resize(dom.elements.size());
  auto theta = [](int k) { return eta_corner_cplx(k); };
  for (size_t e = 0; e < dom.elements.size(); ++e) {
    const Element& el = dom.elements[e];
    if (!el.half) {
      auto [v, w] = dom.edge_vertices(int(e));
      // Normal-equation reconstruction from the four corner projections.
      double a11 = 0, a12 = 0, a22 = 0, b1 = 0, b2 = 0;
      auto acc = [&](int vv, int k) {
        double ci = theta(k).real(), si = theta(k).imag();
        double xi = double(cov.flip_at(int(e), vv)) * x[4 * vv + k];
        a11 += ci * ci; a12 += ci * si; a22 += si * si;
        b1 += ci * xi; b2 += si * xi;
      };
      for (int k : corners_of_dir(el.dir)) acc(v, k);
      for (int k : corners_of_dir(opposite(el.dir))) acc(w, k);
      double det = a11 * a22 - a12 * a12;
      f.values[e] = {(b1 * a22 - b2 * a12) / det, (a11 * b2 - a12 * b1) / det};
    } else if (int(e) == a.elem && !bc_at_source_instead) {
      auto q = eta_of_dir(el.dir).to_complex();
      f.values[e] = std::complex<double>(0, 1) *
                    std::complex<double>(q.real(), q.imag()) * double(a.sheet);
    } else {
      int v = el.vertex;
      auto ks = corners_of_dir(el.dir);
      auto qe = eta_of_dir(el.dir).to_complex();
      std::complex<double> eta_b(qe.real(), qe.imag());
      double r1 = (std::conj(theta(ks[0])) * eta_b).real();
      double r2 = (std::conj(theta(ks[1])) * eta_b).real();
      double fl = cov.flip_at(int(e), v);
      double t = (r1 * fl * x[4 * v + ks[0]] + r2 * fl * x[4 * v + ks[1]]) /
                 (r1 * r1 + r2 * r2);
      f.values[e] = eta_b * t;
    }
  }
  if (!bc_at_source_instead) {
    double norm = 0;
    for (const auto& v : f.values) norm += std::norm(v);
    if (std::sqrt(norm) < 1e-12)
      throw Error(Err::ZeroSolution,
                  "solved field vanishes, inconsistent with positivity");
  }
  return f;
}

// Smallest / largest singular value of the assembled system (dense; for
// the over-constrained uniqueness check on small instances).
inline std::pair<double, double> system_singular_values(const DoubleCover& cov,
                                                        const CoverPoint& a,
                                                        bool bc_at_source) {
  CornerSystem sys = assemble_corner_system(cov, a, bc_at_source);
  Eigen::MatrixXd dense(sys.A);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(dense);
  const auto& sv = svd.singularValues();
  return {sv(sv.size() - 1), sv(0)};
}

// ---- the discrete primitive H = Im int F^2 ----

// Node kinds of the integration structure.
//   faces in F;  boundary face pairs (outside cell, interior edge);
//   vertices in V;  boundary vertex pairs (one per half-edge).
struct HNodes {
  int n_faces = 0;
  std::vector<std::pair<Cell, int>> face_pairs;   // (outside cell, edge elem)
  std::map<std::pair<long, long>, int> face_pair_index;  // (cell key, elem)
  int n_vertices = 0;
  std::vector<int> half_of_outer_node;            // per outer node, half elem

  int face_node(int face_idx) const { return face_idx; }
  int face_pair_node(int pair_idx) const { return n_faces + pair_idx; }
  int vertex_node(int v) const { return n_faces + int(face_pairs.size()) + v; }
  int outer_node(int idx) const {
    return n_faces + int(face_pairs.size()) + n_vertices + idx;
  }
  int total() const {
    return n_faces + int(face_pairs.size()) + n_vertices +
           int(half_of_outer_node.size());
  }
};

template <typename Real>
struct HField {
  HNodes nodes;
  std::vector<Real> value;       // indexed by node id
  std::vector<int> component_of_face_pair;  // -1 outer, else hole index
  Real worst_closure;            // max |defect| over non-tree relations
  std::string worst_closure_locus;
};

namespace hdetail {

inline Q8 im_part(const Q8& z) { return z.im(); }
inline double im_part(const std::complex<double>& z) { return z.imag(); }

// sqrt(2) * delta * |Pr_{eta_c}(F)|^2 written with eta_c^2 only.
inline Q8 corner_increment(const Q8& fval, int k, const Rational& delta) {
  Q8 ec2 = eta_corner_sq(k);
  Q8 m = ec2.conj() * fval * fval + 2 * (fval * fval.conj()) +
         ec2 * fval.conj() * fval.conj();
  Q8 quarter(Rational(1, 4));
  return Q8::sqrt2() * Q8(delta) * quarter * m;
}
inline double corner_increment(const std::complex<double>& fval, int k,
                               const Rational& delta) {
  double pr = (std::conj(eta_corner_cplx(k)) * fval).real();
  return 1.4142135623730950488 * delta.get_d() * pr * pr;
}

// Im[F^2 (p2 - p1)] with integer positions in delta/8 units.
inline Q8 segment_increment(const Q8& fval, const IPt& p1, const IPt& p2,
                            const Rational& delta) {
  Q8 disp = Q8(Rational(p2.x - p1.x, 8)) +
            Q8::i() * Q8(Rational(p2.y - p1.y, 8));
  return (fval * fval * disp * Q8(delta)).im();
}
inline double segment_increment(const std::complex<double>& fval,
                                const IPt& p1, const IPt& p2,
                                const Rational& delta) {
  std::complex<double> disp(double(p2.x - p1.x) / 8.0,
                            double(p2.y - p1.y) / 8.0);
  return (fval * fval * disp * delta.get_d()).imag();
}

inline bool is_zero(const Q8& v) { return v.is_zero(); }
inline bool is_zero(double v) { return v == 0.0; }
inline double mag(const Q8& v) { return std::abs(v.to_complex()); }
inline double mag(double v) { return std::abs(v); }

}  // namespace hdetail

// Build H by integrating the corner and half-edge increments over a
// spanning tree of the incidence structure; closure defects on the
// remaining relations are recorded (exactly zero for exact fields).
template <typename FieldT, typename Real>
HField<Real> build_h_impl(const FieldT& f) {
  const DoubleCover& cov = *f.cover;
  const DiscreteDomain& dom = *cov.base;
  HField<Real> h;
  HNodes& nd = h.nodes;
  nd.n_faces = int(dom.cells.size());
  nd.n_vertices = int(dom.vertices.size());

  auto face_index = [&](const Cell& c) {
    auto it = std::lower_bound(dom.cells.begin(), dom.cells.end(), c);
    if (it != dom.cells.end() && *it == c) return int(it - dom.cells.begin());
    return -1;
  };
  // Face pairs: for each interior edge with an outside cell on one side.
  for (size_t e = 0; e < dom.elements.size(); ++e) {
    const Element& el = dom.elements[e];
    if (el.half) continue;
    const IPt& a = dom.vertices[el.vertex];
    int cx = int(a.x / 8), cy = int(a.y / 8);
    Cell c1, c2;
    if (el.dir == DirE) { c1 = {cx, cy}; c2 = {cx, cy - 1}; }
    else { c1 = {cx - 1, cy}; c2 = {cx, cy}; }
    for (const Cell& c : {c1, c2})
      if (!dom.has_cell(c)) {
        nd.face_pair_index[{long(c.x) * 100000 + c.y, long(e)}] =
            int(nd.face_pairs.size());
        nd.face_pairs.push_back({c, int(e)});
      }
  }
  // Outer vertex nodes, one per boundary half-edge.
  std::vector<int> outer_node_of_half(dom.elements.size(), -1);
  for (size_t e = 0; e < dom.elements.size(); ++e)
    if (dom.elements[e].half) {
      outer_node_of_half[e] = int(nd.half_of_outer_node.size());
      nd.half_of_outer_node.push_back(int(e));
    }

  // Hole component of each face pair (-1 = outer region).
  h.component_of_face_pair.assign(nd.face_pairs.size(), -1);
  for (size_t p = 0; p < nd.face_pairs.size(); ++p) {
    const Cell& c = nd.face_pairs[p].first;
    for (size_t j = 0; j < dom.holes.size(); ++j)
      if (std::binary_search(dom.holes[j].begin(), dom.holes[j].end(), c))
        h.component_of_face_pair[p] = int(j);
  }

  struct Rel {
    int n1, n2;     // node ids, increment = H(n1) - H(n2)
    Real inc;
    std::string locus;
  };
  std::vector<Rel> rels;
  auto face_pair_node_of = [&](const Cell& c, int e) {
    auto it = nd.face_pair_index.find({long(c.x) * 100000 + c.y, long(e)});
    return it == nd.face_pair_index.end() ? -1
                                          : nd.face_pair_node(it->second);
  };

  // Corner relations: H_bullet(v) - H_circ(f) = sqrt2 delta |Pr_{eta_c} F|^2.
  for (size_t v = 0; v < dom.vertices.size(); ++v) {
    const IPt& pv = dom.vertices[v];
    for (int k = 0; k < 4; ++k) {
      // Quadrant cell of corner k.
      static constexpr int qdx[4] = {0, -1, -1, 0};
      static constexpr int qdy[4] = {0, 0, -1, -1};
      Cell qc{int(pv.x / 8) + qdx[k], int(pv.y / 8) + qdy[k]};
      int e1 = dom.elem_at(int(v), Dir(k));
      // Prefer the edge that is not the source half-edge; the projection
      // relation across the source carries an extra x factor, so only the
      // plain side defines the corner increment.
      if (e1 == f.source.elem) e1 = dom.elem_at(int(v), ccw_next(Dir(k)));
      Real inc = hdetail::corner_increment(f.values[e1], k, dom.delta);
      std::string locus = "corner k=" + std::to_string(k) + " at (" +
                          std::to_string(pv.x / 8) + "," +
                          std::to_string(pv.y / 8) + ")";
      int fi = face_index(qc);
      if (fi >= 0) {
        rels.push_back({nd.vertex_node(int(v)), nd.face_node(fi), inc, locus});
      } else {
        int e2 = dom.elem_at(int(v), ccw_next(Dir(k)));
        for (int e : {e1, e2}) {
          if (dom.elements[e].half) continue;
          int pn = face_pair_node_of(qc, e);
          if (pn >= 0) rels.push_back({nd.vertex_node(int(v)), pn, inc, locus});
        }
      }
    }
  }
  // Half-edge relations: H_bullet(outer) - H_bullet(v) = Im[F(b)^2 (w - v)].
  for (size_t e = 0; e < dom.elements.size(); ++e) {
    const Element& el = dom.elements[e];
    if (!el.half) continue;
    IPt pv = dom.vertices[el.vertex];
    IPt pw = pv.shifted(el.dir, 8);
    Real inc = hdetail::segment_increment(f.values[e], pv, pw, dom.delta);
    rels.push_back({nd.outer_node(outer_node_of_half[e]),
                    nd.vertex_node(el.vertex), inc,
                    "half-edge " + elem_name(dom, int(e))});
  }

  // Root: the outer-region face pair with the smallest index.
  int root = -1;
  for (size_t p = 0; p < nd.face_pairs.size(); ++p)
    if (h.component_of_face_pair[p] == -1) {
      root = nd.face_pair_node(int(p));
      break;
    }
  if (root < 0) throw Error(Err::InvalidInput, "no outer boundary pair");

  int N = nd.total();
  h.value.assign(N, Real(0));
  std::vector<char> seen(N, 0);
  std::vector<std::vector<int>> adj(N);
  for (size_t r = 0; r < rels.size(); ++r) {
    adj[rels[r].n1].push_back(int(r));
    adj[rels[r].n2].push_back(int(r));
  }
  std::vector<char> tree(rels.size(), 0);
  std::vector<int> stack{root};
  seen[root] = 1;
  while (!stack.empty()) {
    int n = stack.back();
    stack.pop_back();
    for (int ri : adj[n]) {
      const Rel& r = rels[ri];
      int other = r.n1 == n ? r.n2 : r.n1;
      if (seen[other]) continue;
      seen[other] = 1;
      tree[ri] = 1;
      if (r.n1 == other)
        h.value[other] = h.value[r.n2] + r.inc;
      else
        h.value[other] = h.value[r.n1] - r.inc;
      stack.push_back(other);
    }
  }
  for (int n = 0; n < N; ++n)
    if (!seen[n]) throw Error(Err::ClosureViolation, "H graph disconnected");

  h.worst_closure = Real(0);
  for (size_t ri = 0; ri < rels.size(); ++ri) {
    if (tree[ri]) continue;
    const Rel& r = rels[ri];
    Real defect = h.value[r.n1] - h.value[r.n2] - r.inc;
    if (hdetail::mag(defect) > hdetail::mag(h.worst_closure)) {
      h.worst_closure = defect;
      h.worst_closure_locus = r.locus;
    }
  }
  return h;
}

inline HField<Q8> build_h(const SpinorField& f) {
  return build_h_impl<SpinorField, Q8>(f);
}
inline HField<double> build_h(const SpinorFieldF& f) {
  return build_h_impl<SpinorFieldF, double>(f);
}

namespace hdetail {
inline bool nonneg(const Q8& v, double) { return v.sign_real() >= 0; }
inline bool nonneg(double v, double tol) { return v >= -tol; }
inline bool nonpos(const Q8& v, double) { return v.sign_real() <= 0; }
inline bool nonpos(double v, double tol) { return v <= tol; }
inline bool near_zero(const Q8& v, double) { return v.is_zero(); }
inline bool near_zero(double v, double tol) { return std::abs(v) <= tol; }
}  // namespace hdetail

// Properties of H: exact loop closure, super/sub-harmonicity, boundary
// monotonicity away from the source, and constancy along boundary
// components.  `tol` is ignored for exact fields.
template <typename FieldT, typename Real>
CheckReport check_h_properties_impl(const HField<Real>& h, const FieldT& f,
                                    double tol, const std::string& tag) {
  const DoubleCover& cov = *f.cover;
  const DiscreteDomain& dom = *cov.base;
  const HNodes& nd = h.nodes;
  CheckReport rep;

  rep.add(tag + ": H loop closure", hdetail::near_zero(h.worst_closure, tol),
          h.worst_closure_locus);

  auto face_index = [&](const Cell& c) {
    auto it = std::lower_bound(dom.cells.begin(), dom.cells.end(), c);
    if (it != dom.cells.end() && *it == c) return int(it - dom.cells.begin());
    return -1;
  };
  auto face_pair_node_of = [&](const Cell& c, int e) {
    auto it = nd.face_pair_index.find({long(c.x) * 100000 + c.y, long(e)});
    return it == nd.face_pair_index.end() ? -1
                                          : nd.face_pair_node(it->second);
  };
  std::vector<int> outer_node_of_half(dom.elements.size(), -1);
  for (size_t i = 0; i < nd.half_of_outer_node.size(); ++i)
    outer_node_of_half[nd.half_of_outer_node[i]] = int(i);

  // (5) constancy of H_circ along each boundary component, and the values C_j.
  int n_comp = int(dom.holes.size());
  std::vector<Real> comp_value(n_comp + 1, Real(0));  // index 0 = outer
  {
    std::vector<char> comp_seen(n_comp + 1, 0);
    bool ok = true;
    std::string locus;
    for (size_t p = 0; p < nd.face_pairs.size(); ++p) {
      int comp = h.component_of_face_pair[p] + 1;  // 0 = outer
      Real v = h.value[nd.face_pair_node(int(p))];
      if (!comp_seen[comp]) {
        comp_seen[comp] = 1;
        comp_value[comp] = v;
      } else if (!hdetail::near_zero(v - comp_value[comp], tol)) {
        ok = false;
        locus = "boundary component " + std::to_string(comp - 1);
      }
    }
    if (ok && !hdetail::near_zero(comp_value[0], tol)) {
      ok = false;
      locus = "outer component not normalized to 0";
    }
    rep.add(tag + ": H_circ constant on boundary components", ok, locus);
  }

  // (3) Delta H_circ <= 0 on faces, Delta H_bullet >= 0 on vertices.
  {
    bool ok = true;
    std::string locus;
    for (size_t fi = 0; fi < dom.cells.size() && ok; ++fi) {
      const Cell& c = dom.cells[fi];
      Real lap(0);
      for (int d = 0; d < 4 && ok; ++d) {
        Cell n{c.x + kDx[d], c.y + kDy[d]};
        int nf = face_index(n);
        int node;
        if (nf >= 0) {
          node = nd.face_node(nf);
        } else {
          // shared edge between c and n
          IPt anchor{8L * std::max(c.x, n.x), 8L * std::max(c.y, n.y)};
          Dir ed = (d == DirE || d == DirW) ? DirN : DirE;
          int v = dom.vertex_index(anchor);
          int e = v >= 0 ? dom.elem_at(v, ed) : -1;
          node = e >= 0 ? face_pair_node_of(n, e) : -1;
          if (node < 0) {
            ok = false;
            locus = "missing face neighbor";
            break;
          }
        }
        lap = lap + (h.value[node] - h.value[nd.face_node(int(fi))]);
      }
      if (ok && !hdetail::nonpos(lap, tol)) {
        ok = false;
        locus = "face (" + std::to_string(c.x) + "," + std::to_string(c.y) + ")";
      }
    }
    rep.add(tag + ": H_circ superharmonic on faces", ok, locus);
  }
  {
    bool ok = true;
    std::string locus;
    for (size_t v = 0; v < dom.vertices.size() && ok; ++v) {
      Real lap(0);
      for (int d = 0; d < 4; ++d) {
        int e = dom.elem_at(int(v), Dir(d));
        int node;
        if (!dom.elements[e].half) {
          int w = dom.vertex_index(dom.vertices[v].shifted(Dir(d), 8));
          node = nd.vertex_node(w);
        } else {
          node = nd.outer_node(outer_node_of_half[e]);
        }
        lap = lap + (h.value[node] - h.value[nd.vertex_node(int(v))]);
      }
      if (!hdetail::nonneg(lap, tol)) {
        ok = false;
        locus = "vertex (" + std::to_string(dom.vertices[v].x / 8) + "," +
                std::to_string(dom.vertices[v].y / 8) + ")";
      }
    }
    rep.add(tag + ": H_bullet subharmonic on vertices", ok, locus);
  }

  // (4) boundary monotonicity at non-source half-edges.
  {
    bool ok = true;
    std::string locus;
    for (size_t e = 0; e < dom.elements.size() && ok; ++e) {
      if (!dom.elements[e].half || int(e) == f.source.elem) continue;
      Real diff = h.value[nd.vertex_node(dom.elements[e].vertex)] -
                  h.value[nd.outer_node(outer_node_of_half[e])];
      if (!hdetail::nonneg(diff, tol)) {
        ok = false;
        locus = elem_name(dom, int(e));
      }
    }
    rep.add(tag + ": H_bullet boundary monotonicity", ok, locus);
  }
  return rep;
}

inline CheckReport check_h_properties(const HField<Q8>& h, const SpinorField& f,
                                      const std::string& tag) {
  return check_h_properties_impl<SpinorField, Q8>(h, f, 0.0, tag);
}
inline CheckReport check_h_properties(const HField<double>& h,
                                      const SpinorFieldF& f, double tol,
                                      const std::string& tag) {
  return check_h_properties_impl<SpinorFieldF, double>(h, f, tol, tag);
}

// Normalization-free double ratio
//   [F_pi(a,b) / F_pi(a,a)] * [F_0(a,a) / F_0(a,b)]
// equal to E_ab[prod sigma] / E_+[prod sigma]; b is lifted by transporting
// a's sheet along the ccw boundary arc on each cover.
inline double boundary_ratio_solver(const DiscreteDomain& dom,
                                    const DoubleCover& cov,
                                    const DoubleCover& trivial_cov,
                                    const CoverPoint& a, int b_elem) {
  int ta = dom.tip_index_of_elem.at(a.elem);
  int tb = dom.tip_index_of_elem.at(b_elem);
  if (ta < 0 || tb < 0 || a.elem == b_elem)
    throw Error(Err::InvalidInput, "need distinct outer boundary points");
  auto arc = dom.boundary_arc(ta, tb);
  SpinorFieldF fp = solve_bvp(cov, a);
  SpinorFieldF f0 = solve_bvp(trivial_cov, a);
  std::complex<double> vp = fp.at(CoverPoint(b_elem, arc_transport(cov, arc, a.sheet)));
  std::complex<double> v0 =
      f0.at(CoverPoint(b_elem, arc_transport(trivial_cov, arc, a.sheet)));
  std::complex<double> r = vp / v0;
  if (std::abs(r.imag()) > 1e-7 * (std::abs(r) + 1.0))
    throw Error(Err::SingularSystem, "boundary ratio is not real");
  return r.real();
}

// Exact enumeration version of the same ratio.
inline Q8 boundary_ratio_exact(const DiscreteDomain& dom,
                               const DoubleCover& cov, const CoverPoint& a,
                               int b_elem) {
  Q8 num = branched_correlation_sum(cov, {a.elem, b_elem});
  Q8 znum = partition_sum(make_cosets(dom, reduce_sources_mod2({a.elem, b_elem})));
  Q8 den = branched_correlation_sum(cov, {});
  Q8 zden = partition_sum(make_cosets(dom, {}));
  return (num / znum) / (den / zden);
}

}  // namespace latspin
