// Command-line surface: exact enumeration, identity checks, the BVP
// solver, the continuum formulas, the convergence harness, and the fixed
// verification catalogue.  JSON in, CSV/JSON out.  Exit codes: 0 success,
// 1 identity/check failure, 2 input or usage error.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "latspin/harness.hpp"
#include "latspin/io.hpp"

using namespace latspin;

namespace {

Json read_json_input(const std::string& path) {
  try {
    if (path.empty() || path == "-") return Json::parse(std::cin);
    std::ifstream in(path);
    if (!in) throw Error(Err::InvalidInput, "cannot open " + path);
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw Error(Err::InvalidInput, std::string("malformed JSON: ") + e.what());
  }
}

std::vector<Cplx> parse_punctures(const std::string& s) {
  // "x+yi" entries separated by commas, e.g. "1+1i,-0.5+2i".
  std::vector<Cplx> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    size_t split = std::string::npos;
    for (size_t i = 1; i < tok.size(); ++i)
      if ((tok[i] == '+' || tok[i] == '-') && tok[i - 1] != 'e' &&
          tok[i - 1] != 'E')
        split = i;
    if (split == std::string::npos || tok.back() != 'i')
      throw Error(Err::InvalidInput, "puncture must look like x+yi: " + tok);
    double re = std::stod(tok.substr(0, split));
    std::string imp = tok.substr(split, tok.size() - split - 1);
    double im = imp == "+" ? 1 : imp == "-" ? -1 : std::stod(imp);
    out.push_back({re, im});
  }
  return out;
}

Json report_json(const CheckReport& rep) {
  Json out = Json::array();
  for (const auto& it : rep.items) {
    Json j;
    j["identity"] = it.name;
    j["status"] = it.pass ? "pass" : "fail";
    if (!it.pass) j["locus"] = it.locus;
    out.push_back(j);
  }
  return out;
}

int cmd_validate(const std::string& input) {
  Json j = read_json_input(input);
  DiscreteDomain dom = parse_domain(j);
  auto bad = validate(dom);
  Json out;
  out["valid"] = bad.empty();
  out["vertices"] = dom.vertices.size();
  out["interior_edges"] = dom.n_interior_edges();
  out["boundary_half_edges"] = dom.n_boundary_half_edges();
  out["holes"] = dom.holes.size();
  if (!bad.empty()) out["violations"] = bad;
  std::cout << out.dump(2) << "\n";
  return bad.empty() ? 0 : 1;
}

int cmd_enumerate(const std::string& input) {
  Json j = read_json_input(input);
  DiscreteDomain dom = parse_domain(j);
  std::vector<int> sources;
  if (j.contains("sources"))
    for (const auto& s : j.at("sources"))
      sources.push_back(parse_half_edge(s, dom));
  auto cosets = make_cosets(dom, reduce_sources_mod2(sources));
  std::map<int, long long> hist;
  long long total = 0;
  for (const auto& c : cosets)
    enumerate_coset(c, [&](const Bits&, int sz) {
      ++hist[sz];
      ++total;
    });
  std::cout << "quantity,value\n";
  std::cout << "config_count," << total << "\n";
  for (auto& [sz, cnt] : hist)
    std::cout << "count_size_" << sz << "," << cnt << "\n";
  return 0;
}

int cmd_partition(const std::string& input, const std::string& bc_name) {
  Json j = read_json_input(input);
  DiscreteDomain dom = parse_domain(j);
  BoundaryCondition bc;
  if (bc_name == "plus") {
    bc.kind = BoundaryCondition::Plus;
  } else if (bc_name == "free") {
    bc.kind = BoundaryCondition::Free;
  } else if (bc_name == "dobrushin") {
    bc.kind = BoundaryCondition::Dobrushin;
    bc.a = parse_half_edge(j.at("a"), dom);
    bc.b = parse_half_edge(j.at("b"), dom);
  } else {
    throw Error(Err::InvalidInput, "bc must be plus, free or dobrushin");
  }
  Q8 z = partition_fn(dom, bc);
  std::cout << "quantity,c0,c1,c2,c3,re,im\n";
  std::cout << "Z_" << bc_name << "," << q8_csv(z) << "\n";
  return 0;
}

int cmd_obs(const std::string& input) {
  Json j = read_json_input(input);
  DiscreteDomain dom = parse_domain(j);
  DoubleCover cov = build_cover(dom, parse_branch_flags(j, dom));
  CoverPoint a = parse_cover_point(j.at("source"), dom);
  std::vector<CoverPoint> marked;
  if (j.contains("marked")) {
    std::vector<int> elems;
    for (const auto& m : j.at("marked"))
      elems.push_back(parse_half_edge(m, dom));
    marked = boundary_lifts(cov, a, elems);
  }
  std::vector<CoverPoint> targets;
  if (j.contains("targets"))
    for (const auto& t : j.at("targets"))
      targets.push_back(parse_cover_point(t, dom));
  else
    for (size_t e = 0; e < dom.elements.size(); ++e)
      targets.push_back(CoverPoint(int(e), +1));
  std::cout << "target,sheet,c0,c1,c2,c3,re,im\n";
  for (const CoverPoint& z : targets) {
    Q8 v = observable(cov, a, marked, z);
    std::cout << element_json_name(dom, z.elem) << "," << z.sheet << ","
              << q8_csv(v) << "\n";
  }
  return 0;
}

int cmd_check(const std::string& input) {
  Json j = read_json_input(input);
  DiscreteDomain dom = parse_domain(j);
  DoubleCover cov = build_cover(dom, parse_branch_flags(j, dom));
  CoverPoint a = j.contains("source") ? parse_cover_point(j.at("source"), dom)
                                      : default_source(dom);
  CheckReport rep = check_identities(cov, a, "check");
  if (j.contains("marked")) {
    std::vector<int> elems;
    for (const auto& m : j.at("marked"))
      elems.push_back(parse_half_edge(m, dom));
    rep.merge(
        check_identities_multi(cov, a, boundary_lifts(cov, a, elems), "check"));
  }
  std::cout << report_json(rep).dump(2) << "\n";
  return rep.all_pass() ? 0 : 1;
}

int cmd_solve(const std::string& input, const std::string& h_report) {
  Json j = read_json_input(input);
  DiscreteDomain dom = parse_domain(j);
  DoubleCover cov = build_cover(dom, parse_branch_flags(j, dom));
  CoverPoint a = j.contains("source") ? parse_cover_point(j.at("source"), dom)
                                      : default_source(dom);
  SpinorFieldF f = solve_bvp(cov, a);
  std::cout << "element,x,y,re,im\n";
  for (size_t e = 0; e < dom.elements.size(); ++e) {
    const IPt& m = dom.elements[e].mid;
    double dx = dom.delta.get_d();
    std::cout << element_json_name(dom, int(e)) << ","
              << fmt17(m.x / 8.0 * dx) << "," << fmt17(m.y / 8.0 * dx) << ","
              << fmt17(f.values[e].real()) << "," << fmt17(f.values[e].imag())
              << "\n";
  }
  if (!h_report.empty()) {
    HField<double> h = build_h(f);
    CheckReport rep = check_h_properties(h, f, 1e-9, "H");
    Json out;
    out["residual"] = f.residual;
    out["worst_closure"] = h.worst_closure;
    out["checks"] = report_json(rep);
    std::ofstream hr(h_report);
    hr << out.dump(2) << "\n";
  }
  return 0;
}

int cmd_theta(const std::string& punctures) {
  ThetaSpec spec;
  spec.punctures = parse_punctures(punctures);
  ThetaResult r = theta(spec);
  Json out;
  out["lambda"] = r.lambda;
  out["residual"] = r.residual;
  out["theta"] = r.theta;
  std::cout << out.dump(2) << "\n";
  return 0;
}

int cmd_pfratio(const std::string& points, const std::string& punctures) {
  std::vector<double> pts;
  std::stringstream ss(points);
  std::string tok;
  while (std::getline(ss, tok, ','))
    if (!tok.empty()) pts.push_back(std::stod(tok));
  double r = pfaffian_ratio(pts, parse_punctures(punctures));
  Json out;
  out["ratio"] = r;
  std::cout << out.dump(2) << "\n";
  return 0;
}

int cmd_converge(const std::string& input) {
  Json j = read_json_input(input);
  ConvergenceSpec spec;
  if (j.contains("a")) spec.a = {j["a"][0].get<double>(), j["a"][1].get<double>()};
  if (j.contains("b")) spec.b = {j["b"][0].get<double>(), j["b"][1].get<double>()};
  if (j.contains("puncture"))
    spec.puncture = {j["puncture"][0].get<double>(),
                     j["puncture"][1].get<double>()};
  if (j.contains("n")) {
    spec.sizes.clear();
    for (const auto& n : j.at("n")) spec.sizes.push_back(n.get<int>());
  }
  if (j.contains("method"))
    spec.use_enumeration = j.at("method").get<std::string>() == "enumeration";
  if (j.contains("hm_refine")) spec.hm_refine = j.at("hm_refine").get<int>();
  std::cout << "n,delta,ratio,theta,abs_error,method,seconds\n";
  for (const ConvergenceRow& r : run_convergence(spec)) {
    std::cout << r.n << "," << r.delta.get_str() << "," << fmt17(r.ratio)
              << "," << fmt17(r.theta) << "," << fmt17(r.abs_error) << ","
              << r.method << "," << fmt17(r.seconds) << "\n";
  }
  return 0;
}

int cmd_catalogue() {
  CheckReport rep = run_catalogue_identities();
  rep.merge(run_catalogue_h());
  std::cout << report_json(rep).dump(2) << "\n";
  return rep.all_pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spinor observables of the critical Ising model on double covers"};
  app.require_subcommand(1);

  std::string input = "-", bc = "plus", h_report, punctures, points;

  auto* v = app.add_subcommand("validate", "build a domain and check axioms");
  v->add_option("-i,--input", input, "domain JSON (default stdin)");

  auto* en = app.add_subcommand("enumerate", "count configurations by size");
  en->add_option("-i,--input", input);

  auto* pa = app.add_subcommand("partition", "exact partition function");
  pa->add_option("-i,--input", input);
  pa->add_option("--bc", bc, "plus | free | dobrushin");

  auto* ob = app.add_subcommand("obs", "exact spinor observable values");
  ob->add_option("-i,--input", input);

  auto* ch = app.add_subcommand("check", "run the exact identity suite");
  ch->add_option("-i,--input", input);

  auto* so = app.add_subcommand("solve", "solve the discrete boundary value problem");
  so->add_option("-i,--input", input);
  so->add_option("--h-report", h_report, "write H-function JSON report here");

  auto* th = app.add_subcommand("theta", "continuum correlation ratio invariant");
  th->add_option("--punctures", punctures, "comma-separated x+yi")->required();

  auto* pf = app.add_subcommand("pfratio", "Pfaffian ratio of boundary correlations");
  pf->add_option("--points", points, "increasing reals a0,a1,...")->required();
  pf->add_option("--punctures", punctures, "comma-separated x+yi");

  auto* cv = app.add_subcommand("converge", "mesh refinement experiment");
  cv->add_option("-i,--input", input);

  app.add_subcommand("catalogue", "run the fixed verification catalogue");

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand("validate")) return cmd_validate(input);
    if (app.got_subcommand("enumerate")) return cmd_enumerate(input);
    if (app.got_subcommand("partition")) return cmd_partition(input, bc);
    if (app.got_subcommand("obs")) return cmd_obs(input);
    if (app.got_subcommand("check")) return cmd_check(input);
    if (app.got_subcommand("solve")) return cmd_solve(input, h_report);
    if (app.got_subcommand("theta")) return cmd_theta(punctures);
    if (app.got_subcommand("pfratio")) return cmd_pfratio(points, punctures);
    if (app.got_subcommand("converge")) return cmd_converge(input);
    if (app.got_subcommand("catalogue")) return cmd_catalogue();
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
