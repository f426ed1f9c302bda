#pragma once

// JSON input and CSV/JSON output for the command-line surface.
//
// Domain:        {"delta": "1/8", "faces": [[x,y], ...],
//                 "branch_flags": [true, ...]}
// Half-edge:     {"vertex": [x,y], "dir": "N|S|E|W", "sheet": 1}
// Floats print with 17 significant digits so identical inputs produce
// byte-identical output.

#include <json.hpp>

#include <cstdio>
#include <sstream>

#include "latspin/cover.hpp"
#include "latspin/enumeration.hpp"

namespace latspin {

using Json = nlohmann::json;

inline std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline Rational parse_rational(const Json& j) {
  if (j.is_number_integer()) return Rational(long(j.get<long long>()));
  if (j.is_string()) {
    Rational r;
    if (r.set_str(j.get<std::string>(), 10) != 0)
      throw Error(Err::InvalidInput, "bad rational: " + j.get<std::string>());
    r.canonicalize();
    return r;
  }
  throw Error(Err::InvalidInput, "rational must be integer or \"p/q\" string");
}

inline DiscreteDomain parse_domain(const Json& j) {
  if (!j.contains("faces"))
    throw Error(Err::InvalidInput, "domain needs \"faces\"");
  std::vector<Cell> cells;
  for (const auto& f : j.at("faces")) {
    if (!f.is_array() || f.size() != 2)
      throw Error(Err::InvalidInput, "face must be [x,y]");
    cells.push_back({f[0].get<int>(), f[1].get<int>()});
  }
  Rational delta =
      j.contains("delta") ? parse_rational(j.at("delta")) : Rational(1);
  return build_domain(std::move(cells), std::move(delta));
}

inline std::vector<bool> parse_branch_flags(const Json& j,
                                            const DiscreteDomain& dom) {
  std::vector<bool> flags(dom.holes.size(), false);
  if (j.contains("branch_flags")) {
    const auto& bf = j.at("branch_flags");
    if (bf.size() != dom.holes.size())
      throw Error(Err::FlagArityMismatch, "branch_flags arity mismatch");
    for (size_t k = 0; k < flags.size(); ++k) flags[k] = bf[k].get<bool>();
  }
  return flags;
}

inline Dir parse_dir(const std::string& s) {
  if (s == "E") return DirE;
  if (s == "N") return DirN;
  if (s == "W") return DirW;
  if (s == "S") return DirS;
  throw Error(Err::InvalidInput, "dir must be one of N,S,E,W");
}

inline int parse_half_edge(const Json& j, const DiscreteDomain& dom) {
  const auto& v = j.at("vertex");
  int vi = dom.vertex_index(IPt{8L * v[0].get<long>(), 8L * v[1].get<long>()});
  if (vi < 0) throw Error(Err::InvalidInput, "no such vertex");
  int e = dom.elem_at(vi, parse_dir(j.at("dir").get<std::string>()));
  if (e < 0 || !dom.elements[e].half)
    throw Error(Err::InvalidInput, "not a boundary half-edge");
  return e;
}

inline CoverPoint parse_cover_point(const Json& j, const DiscreteDomain& dom) {
  int sheet = j.contains("sheet") ? j.at("sheet").get<int>() : +1;
  if (sheet != 1 && sheet != -1)
    throw Error(Err::InvalidInput, "sheet must be 1 or -1");
  if (j.contains("edge")) {
    // {"edge": [[x,y],[x,y]]} an interior edge by its endpoints
    const auto& ends = j.at("edge");
    IPt p1{8L * ends[0][0].get<long>(), 8L * ends[0][1].get<long>()};
    IPt p2{8L * ends[1][0].get<long>(), 8L * ends[1][1].get<long>()};
    int v1 = dom.vertex_index(p1);
    if (v1 < 0) throw Error(Err::InvalidInput, "no such vertex");
    for (int d = 0; d < 4; ++d)
      if (p1.shifted(Dir(d), 8) == p2) {
        int e = dom.elem_at(v1, Dir(d));
        if (e < 0 || dom.elements[e].half)
          throw Error(Err::InvalidInput, "not an interior edge");
        return CoverPoint(e, sheet);
      }
    throw Error(Err::InvalidInput, "edge endpoints are not neighbors");
  }
  return CoverPoint(parse_half_edge(j, dom), sheet);
}

inline std::string element_json_name(const DiscreteDomain& dom, int e) {
  const Element& el = dom.elements[e];
  const IPt& v = dom.vertices[el.vertex];
  static const char* dn[4] = {"E", "N", "W", "S"};
  std::ostringstream os;
  os << (el.half ? "half:" : "edge:") << v.x / 8 << "," << v.y / 8 << ","
     << dn[el.dir];
  return os.str();
}

inline std::string q8_csv(const Q8& v) {
  auto c = v.coeff_strings();
  auto z = v.to_complex();
  return c[0] + "," + c[1] + "," + c[2] + "," + c[3] + "," + fmt17(z.real()) +
         "," + fmt17(z.imag());
}

}  // namespace latspin
