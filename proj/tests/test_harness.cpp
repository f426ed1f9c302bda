#include <catch2/catch.hpp>

#include "latspin/harness.hpp"

using namespace latspin;

TEST_CASE("catalogue has eight domains and at least fourteen instances") {
  auto insts = catalogue();
  std::set<const DiscreteDomain*> doms;
  int n_multi = 0;
  for (const auto& i : insts) {
    doms.insert(i.dom.get());
    n_multi += i.multi ? 1 : 0;
  }
  CHECK(doms.size() == 8);
  CHECK(insts.size() + n_multi >= 14);
}

TEST_CASE("convergence rows on a tiny run cross-check solver vs enumeration") {
  ConvergenceSpec spec;
  spec.sizes = {4};
  spec.puncture = {0.4, 0.4};
  spec.hm_refine = 8;
  spec.use_enumeration = true;
  auto enum_rows = run_convergence(spec);
  spec.use_enumeration = false;
  auto solver_rows = run_convergence(spec);
  REQUIRE(enum_rows.size() == 1);
  REQUIRE(solver_rows.size() == 1);
  CHECK(enum_rows[0].ratio == Approx(solver_rows[0].ratio).margin(1e-8));
}

TEST_CASE("puncture snapping rejects boundary cells") {
  ConvergenceSpec spec;
  spec.sizes = {4};
  spec.puncture = {0.01, 0.5};
  CHECK_THROWS_AS(run_convergence(spec), Error);
}

TEST_CASE("n=3 annulus: enumeration and solver ratios agree") {
  ConvergenceSpec spec;
  spec.sizes = {3};
  spec.puncture = {0.5, 0.5};  // snaps to the center face of the 3x3 mesh
  spec.hm_refine = 8;
  spec.use_enumeration = true;
  auto er = run_convergence(spec);
  spec.use_enumeration = false;
  auto sr = run_convergence(spec);
  REQUIRE(er.size() == 1);
  CHECK(er[0].method == "enumeration");
  CHECK(sr[0].method == "solver");
  CHECK(er[0].ratio == Approx(sr[0].ratio).margin(1e-8));
}
