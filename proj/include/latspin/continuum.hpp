#pragma once

// Closed-form continuum objects in the punctured upper half-plane: the
// holomorphic spinor built from the auxiliary factors
//   B_w(z) = (z - Re w) / sqrt((z - conj w)(z - w)),
// the linear system Im[R_k g(w_k)] = 0 fixing the correction
//   g(z) = 1 + sum_j lambda_j / (t_j - z),   t_j = Re w_j,
// and the resulting invariant
//   theta(w_1..w_m) = [1 + sum_j lambda_j / t_j] * prod_j t_j / |w_j|.
//
// theta is assembled from endpoint values only: B_{w_j}(0) = Re w_j/|w_j|
// after transport along the counterclockwise boundary arc, so no branch
// tracking of the square roots is ever needed; inside R_k the individual
// square-root signs cancel against the real linear system.

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <complex>
#include <random>
#include <vector>

#include "latspin/domain.hpp"
#include "latspin/pfaffian.hpp"

namespace latspin {

using Cplx = std::complex<double>;

// Harmonic measure of the negative real ray seen from w in the upper
// half-plane: arg(w)/pi.
inline double hm_half_plane(Cplx w) {
  if (!(w.imag() > 0))
    throw Error(Err::NotInUpperHalfPlane, "point not in the upper half-plane");
  return std::arg(w) / 3.14159265358979323846;
}

struct ThetaSpec {
  std::vector<Cplx> punctures;
};

struct ThetaResult {
  std::vector<double> lambda;
  double residual = 0.0;
  double theta = 1.0;
};

inline void validate_theta_spec(const ThetaSpec& spec) {
  const double kSep = 1e-9;
  for (const Cplx& w : spec.punctures) {
    if (!(w.imag() > 0))
      throw Error(Err::NotInUpperHalfPlane, "puncture not in upper half-plane");
    if (std::abs(w.real()) < kSep)
      throw Error(Err::NearDegenerate, "puncture too close to the imaginary axis");
  }
  for (size_t j = 0; j < spec.punctures.size(); ++j)
    for (size_t k = j + 1; k < spec.punctures.size(); ++k)
      if (std::abs(spec.punctures[j].real() - spec.punctures[k].real()) < kSep)
        throw Error(Err::NearDegenerate,
                    "coinciding real parts need higher-order poles");
}

inline Cplx aux_factor(Cplx w, Cplx z) {
  return (z - w.real()) / std::sqrt((z - std::conj(w)) * (z - w));
}

inline ThetaResult theta(const ThetaSpec& spec) {
  validate_theta_spec(spec);
  int m = int(spec.punctures.size());
  ThetaResult out;
  out.lambda.assign(m, 0.0);
  if (m == 0) return out;

  std::vector<Cplx> R(m);
  for (int k = 0; k < m; ++k) {
    Cplx r = std::sqrt(Cplx(spec.punctures[k].imag(), 0.0));
    for (int j = 0; j < m; ++j)
      if (j != k) r *= aux_factor(spec.punctures[j], spec.punctures[k]);
    R[k] = r;
  }
  Eigen::MatrixXd M(m, m);
  Eigen::VectorXd rhs(m);
  for (int k = 0; k < m; ++k) {
    rhs(k) = -R[k].imag();
    for (int j = 0; j < m; ++j) {
      double tj = spec.punctures[j].real();
      M(k, j) = (R[k] / (tj - spec.punctures[k])).imag();
    }
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeThinU |
                                               Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  if (sv(sv.size() - 1) <= 0 || sv(0) / sv(sv.size() - 1) > 1e12)
    throw Error(Err::NearDegenerate, "lambda system nearly degenerate");
  Eigen::VectorXd lam = svd.solve(rhs);
  for (int j = 0; j < m; ++j) out.lambda[j] = lam(j);

  auto g = [&](Cplx z) {
    Cplx s(1.0, 0.0);
    for (int j = 0; j < m; ++j)
      s += out.lambda[j] / (spec.punctures[j].real() - z);
    return s;
  };
  out.residual = 0.0;
  for (int k = 0; k < m; ++k)
    out.residual =
        std::max(out.residual, std::abs((R[k] * g(spec.punctures[k])).imag()));

  double g0 = 1.0;
  double prod = 1.0;
  for (int j = 0; j < m; ++j) {
    double t = spec.punctures[j].real();
    g0 += out.lambda[j] / t;
    prod *= t / std::abs(spec.punctures[j]);
  }
  out.theta = g0 * prod;
  return out;
}

// Moebius transformation z -> (az + b)/(cz + d) with real coefficients
// (preserves the upper half-plane when ad - bc > 0).
struct Moebius {
  double a = 1, b = 0, c = 0, d = 1;
  Cplx operator()(Cplx z) const { return (a * z + b) / (c * z + d); }
  static Moebius identity() { return {}; }
  // Maps (C+, p, q) to (C+, infinity, 0) for real p != q.
  static Moebius to_inf_zero(double p, double q) {
    // z -> (z - q)/(z - p) if p < q, else z -> (q - z)/(z - p).
    if (p < q) return {1, -q, 1, -p};
    return {-1, q, 1, -p};
  }
};

// theta after a conformal map of a simply connected domain to C+ sending
// a to infinity and b to 0.
inline ThetaResult theta_mapped(const Moebius& phi,
                                const std::vector<Cplx>& punctures) {
  ThetaSpec spec;
  for (const Cplx& z : punctures) spec.punctures.push_back(phi(z));
  return theta(spec);
}

// ---- numeric harmonic measure on rectilinear domains ----
//
// Five-point Laplace solve on the grid graph of a cell set; boundary
// half-edge tips are absorbing with Dirichlet data 1 on the chosen ccw
// boundary arc and 0 elsewhere.  Used only as an independent oracle.

struct HmProblem {
  std::vector<Cell> cells;  // unit cells of the continuum domain
  Cplx point;               // interior evaluation point
  Cplx arc_from, arc_to;    // boundary points; arc runs ccw from->to
};

inline int nearest_outer_tip(const DiscreteDomain& dom, Cplx p_units) {
  int best = -1;
  double bd = 0;
  for (size_t t = 0; t < dom.outer_tips.size(); ++t) {
    const IPt& m = dom.elements[dom.outer_tips[t].elem].mid;
    double d = std::abs(p_units - Cplx(double(m.x), double(m.y)));
    if (best < 0 || d < bd) {
      bd = d;
      best = int(t);
    }
  }
  return best;
}

inline double hm_on_grid(const HmProblem& prob, int refine) {
  std::vector<Cell> cells;
  for (const Cell& c : prob.cells)
    for (int i = 0; i < refine; ++i)
      for (int j = 0; j < refine; ++j)
        cells.push_back({c.x * refine + i, c.y * refine + j});
  DiscreteDomain dom = build_domain(cells, Rational(1, refine));

  // Dirichlet data lives on the boundary vertices of the ccw walk: 1
  // strictly inside the arc, 1/2 at the snapped endpoints, 0 elsewhere.
  // Absorbing exactly on the domain boundary keeps the scheme second
  // order, so Richardson extrapolation on grids h and h/2 applies.
  double scale = 8.0 * refine;
  int M = int(dom.walk.size());
  auto nearest_walk_vertex = [&](Cplx p) {
    int best = -1;
    double bd = 0;
    for (int t = 0; t < M; ++t) {
      const IPt& q = dom.vertices[dom.walk[t].from];
      double d = std::abs(p * scale - Cplx(double(q.x), double(q.y)));
      if (best < 0 || d < bd) {
        bd = d;
        best = t;
      }
    }
    return best;
  };
  int sa = nearest_walk_vertex(prob.arc_from);
  int sb = nearest_walk_vertex(prob.arc_to);
  int nv = int(dom.vertices.size());
  std::vector<double> bvalue(nv, 0.0);
  std::vector<char> is_boundary(nv, 0);
  for (int t = 0; t < M; ++t) is_boundary[dom.walk[t].from] = 1;
  int steps = ((sb - sa) % M + M) % M;
  for (int s = 1; s < steps; ++s)
    bvalue[dom.walk[(sa + s) % M].from] = 1.0;
  bvalue[dom.walk[sa].from] = 0.5;
  bvalue[dom.walk[sb].from] = 0.5;

  std::vector<int> idx(nv, -1);
  int n_int = 0;
  for (int v = 0; v < nv; ++v)
    if (!is_boundary[v]) idx[v] = n_int++;
  std::vector<Eigen::Triplet<double>> trip;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n_int);
  for (int v = 0; v < nv; ++v) {
    if (is_boundary[v]) continue;
    trip.emplace_back(idx[v], idx[v], 4.0);
    for (int d = 0; d < 4; ++d) {
      int w = dom.vertex_index(dom.vertices[v].shifted(Dir(d), 8));
      if (w < 0)
        throw Error(Err::SingularSystem, "interior vertex missing neighbor");
      if (is_boundary[w])
        rhs(idx[v]) += bvalue[w];
      else
        trip.emplace_back(idx[v], idx[w], -1.0);
    }
  }
  Eigen::SparseMatrix<double> L(n_int, n_int);
  L.setFromTriplets(trip.begin(), trip.end());
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(L);
  if (ldlt.info() != Eigen::Success)
    throw Error(Err::SingularSystem, "harmonic measure solve failed");
  Eigen::VectorXd usol = ldlt.solve(rhs);
  auto u = [&](int v) { return is_boundary[v] ? bvalue[v] : usol(idx[v]); };

  // Bilinear interpolation from the surrounding vertices (exact when the
  // point is a grid vertex; fourth-order at face centers since u is
  // discrete harmonic).
  Cplx pu = prob.point * scale;
  double gx = pu.real() / 8.0, gy = pu.imag() / 8.0;
  long x0 = long(std::floor(gx)), y0 = long(std::floor(gy));
  double tx = gx - x0, ty = gy - y0;
  double acc = 0;
  for (int i = 0; i <= 1; ++i)
    for (int j = 0; j <= 1; ++j) {
      double wgt = (i ? tx : 1 - tx) * (j ? ty : 1 - ty);
      if (wgt == 0) continue;
      int v = dom.vertex_index(IPt{8 * (x0 + i), 8 * (y0 + j)});
      if (v < 0) throw Error(Err::PunctureOnBoundary, "point not interior");
      acc += wgt * u(v);
    }
  return acc;
}

struct HmResult {
  double value = 0.0;
  double error_estimate = 0.0;
};

// Richardson-extrapolated harmonic measure on grids refine and 2*refine.
inline HmResult hm_numeric(const HmProblem& prob, int refine) {
  double h1 = hm_on_grid(prob, refine);
  double h2 = hm_on_grid(prob, 2 * refine);
  HmResult r;
  r.value = (4.0 * h2 - h1) / 3.0;
  r.error_estimate = std::abs(h2 - h1) / 3.0;
  return r;
}

// ---- Pfaffian ratio of boundary-change correlations ----
//
// For boundary points a_0 < ... < a_{2n+1} on R and punctures w, the ratio
//   Pf[ zeta_{a_j a_k}^{-1} theta_{a_j a_k}(w) ] / Pf[ zeta_{a_j a_k}^{-1} ]
// with the half-plane normalization zeta_{ab} = sqrt(pi) |b - a|.

inline double pfaffian_ratio(std::vector<double> boundary_pts,
                             const std::vector<Cplx>& punctures) {
  int n = int(boundary_pts.size());
  if (n < 2 || n % 2)
    throw Error(Err::InvalidInput, "need an even number (>= 2) of points");
  for (int i = 0; i + 1 < n; ++i)
    if (!(boundary_pts[i] < boundary_pts[i + 1]))
      throw Error(Err::InvalidInput, "boundary points must be increasing");
  const double sqrt_pi = 1.7724538509055160273;
  SquareMat<double> num(n), den(n);
  for (int j = 0; j < n; ++j)
    for (int k = j + 1; k < n; ++k) {
      double zeta = sqrt_pi * std::abs(boundary_pts[k] - boundary_pts[j]);
      double th =
          theta_mapped(Moebius::to_inf_zero(boundary_pts[j], boundary_pts[k]),
                       punctures)
              .theta;
      num.at(j, k) = th / zeta;
      num.at(k, j) = -th / zeta;
      den.at(j, k) = 1.0 / zeta;
      den.at(k, j) = -1.0 / zeta;
    }
  double pd = pfaffian(den);
  if (std::abs(pd) < 1e-14)
    throw Error(Err::DegenerateDenominator, "denominator Pfaffian vanishes");
  return pfaffian(num) / pd;
}

}  // namespace latspin
