// Acceptance suite: one line per criterion, all tolerances pinned here.
// Exit code 0 iff every criterion passes.

#include <chrono>
#include <cstdio>
#include <random>

#include "latspin/harness.hpp"

using namespace latspin;

namespace {

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
  }
};

bool g_all_pass = true;

void line(int crit, const std::string& what, bool pass, double secs,
          const std::string& detail = "") {
  g_all_pass &= pass;
  std::printf("criterion %d [%s] %-52s (%.1fs)%s%s\n", crit,
              pass ? "PASS" : "FAIL", what.c_str(), secs,
              detail.empty() ? "" : "  ", detail.c_str());
  std::fflush(stdout);
}

std::string first_failure(const CheckReport& rep) {
  for (const auto& it : rep.items)
    if (!it.pass) return it.name + " @ " + it.locus;
  return "";
}

// 1. Exact identity suite over the whole catalogue (zero tolerance).
void criterion1() {
  Timer t;
  CheckReport rep = run_catalogue_identities();
  bool pass = rep.all_pass() && t.seconds() < 300.0;
  line(1, "exact identity suite on the catalogue", pass, t.seconds(),
       first_failure(rep));
}

// 2. H-function suite: exact for enumeration fields, 1e-9 for solver
// fields up to 64x64.
void criterion2() {
  Timer t;
  CheckReport rep = run_catalogue_h();
  bool pass = rep.all_pass();
  std::string detail = first_failure(rep);
  // Solver fields: a branched 16x16 annulus and a plain 64x64 block.
  {
    auto cells = cells_without(block_cells(16, 16), {{7, 7}});
    DiscreteDomain dom = build_domain(cells, Rational(1, 16));
    auto cov = build_cover(dom, {true});
    SpinorFieldF f = solve_bvp(cov, default_source(dom));
    HField<double> h = build_h(f);
    CheckReport hr = check_h_properties(h, f, 1e-9, "solver-16x16");
    pass &= hr.all_pass();
    if (detail.empty()) detail = first_failure(hr);
  }
  {
    DiscreteDomain dom = build_domain(block_cells(64, 64), Rational(1, 64));
    auto cov = build_cover(dom, {});
    SpinorFieldF f = solve_bvp(cov, default_source(dom));
    HField<double> h = build_h(f);
    CheckReport hr = check_h_properties(h, f, 1e-9, "solver-64x64");
    pass &= hr.all_pass();
    if (detail.empty()) detail = first_failure(hr);
  }
  pass &= t.seconds() < 180.0;
  line(2, "H-function suite (exact + solver at 1e-9)", pass, t.seconds(),
       detail);
}

// 3. Solver/oracle agreement and the over-constrained uniqueness check.
void criterion3() {
  Timer t;
  double worst = 0;
  std::string worst_name;
  for (const SolverAgreement& row : run_catalogue_solver())
    if (row.max_diff > worst) {
      worst = row.max_diff;
      worst_name = row.name;
    }
  bool pass = worst < 1e-8;
  // Remark-style over-constrained system: boundary condition also at the
  // source and no normalization forces the zero field.
  {
    auto cells = cells_without(block_cells(3, 3), {{1, 1}});
    DiscreteDomain dom = build_domain(cells, Rational(1));
    for (bool flag : {false, true}) {
      auto cov = build_cover(dom, {flag});
      CoverPoint a = default_source(dom);
      auto [smin, smax] = system_singular_values(cov, a, true);
      pass &= smin > 1e-8 * smax;
      SpinorFieldF f0 = solve_bvp(cov, a, true);
      double norm = 0;
      for (auto& v : f0.values) norm += std::norm(v);
      pass &= std::sqrt(norm) < 1e-10;
    }
  }
  char buf[96];
  std::snprintf(buf, sizeof(buf), "max|solver-oracle| = %.2e (%s)", worst,
                worst_name.c_str());
  line(3, "solver/oracle agreement < 1e-8; zero solution", pass, t.seconds(),
       buf);
}

// 4. Continuum formulas.
void criterion4() {
  Timer t;
  bool pass = true;
  std::string detail;
  // theta(w) vs Re w/|w| on a 100-point grid, 1e-14.
  for (int i = 0; i < 10 && pass; ++i)
    for (int j = 0; j < 10 && pass; ++j) {
      Cplx w(-2.25 + 0.5 * i, 0.2 + 0.35 * j);
      double got = theta(ThetaSpec{{w}}).theta;
      if (std::abs(got - w.real() / std::abs(w)) > 1e-14) {
        pass = false;
        detail = "single-puncture closed form";
      }
    }
  // Random specs m in {2,3,4}: residual < 1e-12, dilation invariance 1e-10.
  std::mt19937 rng(20260808);
  std::uniform_real_distribution<double> re(-2, 2), im(0.3, 2);
  for (int m : {2, 3, 4}) {
    int done = 0;
    while (done < 25 && pass) {
      ThetaSpec spec;
      bool valid = true;
      for (int k = 0; k < m; ++k) {
        Cplx w(re(rng), im(rng));
        if (std::abs(w.real()) < 1e-2) valid = false;
        for (const Cplx& p : spec.punctures)
          if (std::abs(p.real() - w.real()) < 1e-2) valid = false;
        spec.punctures.push_back(w);
      }
      if (!valid) continue;
      ++done;
      ThetaResult r = theta(spec);
      if (r.residual >= 1e-12) {
        pass = false;
        detail = "lambda residual";
      }
      for (double s : {0.5, 2.0}) {
        ThetaSpec scl;
        for (const Cplx& w : spec.punctures) scl.punctures.push_back(s * w);
        if (std::abs(theta(scl).theta - r.theta) > 1e-10) {
          pass = false;
          detail = "dilation invariance";
        }
      }
    }
  }
  // Pfaffian ratio reductions.
  {
    std::vector<Cplx> none;
    if (std::abs(pfaffian_ratio({-1.5, -0.25, 0.75, 2.0}, none) - 1.0) >
        1e-14) {
      pass = false;
      detail = "pfaffian ratio m=0";
    }
    std::vector<Cplx> w{{0.8, 1.1}};
    double r2 = pfaffian_ratio({-1.0, 1.5}, w);
    double direct = theta_mapped(Moebius::to_inf_zero(-1.0, 1.5), w).theta;
    if (std::abs(r2 - direct) > 1e-14) {
      pass = false;
      detail = "pfaffian ratio n=0";
    }
  }
  pass &= t.seconds() < 10.0;
  line(4, "continuum formulas (theta, residuals, pfratio)", pass, t.seconds(),
       detail);
}

// 5. Convergence at desk scale.
void criterion5() {
  Timer t;
  bool pass = true;
  std::string detail;
  ConvergenceSpec sym;
  sym.a = {0.0, 0.5};
  sym.b = {1.0, 0.5};
  sym.puncture = {0.5, 0.5};
  sym.sizes = {8, 16, 32};
  auto sym_rows = run_convergence(sym);
  if (std::abs(sym_rows.back().ratio) > 0.05) {
    pass = false;
    detail = "symmetric ratio at n=32";
  }
  ConvergenceSpec off = sym;
  off.puncture = {0.5, 0.25};
  auto off_rows = run_convergence(off);
  for (size_t k = 0; k + 1 < off_rows.size(); ++k)
    if (!(off_rows[k + 1].abs_error < off_rows[k].abs_error)) {
      pass = false;
      detail = "off-center error not strictly decreasing";
    }
  if (off_rows.back().abs_error >= 0.1) {
    pass = false;
    detail = "off-center final error";
  }
  pass &= t.seconds() < 600.0;
  char buf[96];
  std::snprintf(buf, sizeof(buf), "sym|ratio|=%.1e off-errors=%.3f>%.3f>%.3f",
                std::abs(sym_rows.back().ratio), off_rows[0].abs_error,
                off_rows[1].abs_error, off_rows[2].abs_error);
  line(5, "mesh-refinement convergence", pass, t.seconds(),
       detail.empty() ? buf : detail);
}

// 6. Discrete Pfaffian ratio with 4 outer marked points on the annulus.
void criterion6() {
  Timer t;
  auto cells = cells_without(block_cells(3, 3), {{1, 1}});
  auto dom = build_domain(cells, Rational(1));
  auto cov = build_cover(dom, {true});
  CoverPoint a0 = default_source(dom);
  int n = int(dom.outer_tips.size());
  int t0 = dom.tip_index_of_elem.at(a0.elem);
  // Unevenly spaced marked points so neither Pfaffian vanishes by symmetry.
  std::vector<int> elems{a0.elem, dom.outer_tips[(t0 + 3) % n].elem,
                         dom.outer_tips[(t0 + 7) % n].elem,
                         dom.outer_tips[(t0 + n - 2) % n].elem};
  auto lifts = boundary_lifts(cov, a0, elems);
  Q8 lhs, rhs;
  bool pass = pfaffian_ratio_identity(cov, lifts, &lhs, &rhs);
  char buf[96];
  std::snprintf(buf, sizeof(buf), "E-ratio = Pf-ratio = %.12g",
                lhs.to_complex().real());
  line(6, "discrete Pfaffian ratio identity (exact)", pass, t.seconds(), buf);
}

// 7. Positivity of (i eta_a)^{-1} F(a,a) on every catalogue instance.
void criterion7() {
  Timer t;
  bool pass = true;
  std::string detail;
  for (const CatalogueInstance& inst : catalogue()) {
    auto cov = build_cover(*inst.dom, inst.flags);
    CoverPoint a = default_source(*inst.dom);
    Q8 ieta = Q8::i() * eta_of_dir(inst.dom->half_dir(a.elem));
    Q8 q = ieta.conj() * observable(cov, a, a);
    if (!q.is_real() || q.sign_real() <= 0) {
      pass = false;
      detail = inst.name;
    }
  }
  line(7, "exact positivity of (i eta_a)^{-1} F(a,a)", pass, t.seconds(),
       detail);
}

}  // namespace

int main() {
  criterion1();
  criterion2();
  criterion3();
  criterion4();
  criterion5();
  criterion6();
  criterion7();
  std::printf("%s\n", g_all_pass ? "ALL CRITERIA PASS" : "CRITERIA FAILED");
  return g_all_pass ? 0 : 1;
}
