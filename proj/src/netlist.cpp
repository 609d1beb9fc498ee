#include <cstdio>
#include <sstream>

#include <json.hpp>

#include "circsynth/netsynth.hpp"

namespace circsynth {

namespace {

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.5e", v);
  return buf;
}

struct Element {
  std::string name;
  int a, b;
  double value;
};

std::vector<Element> lay_out(const Circuit& c) {
  std::vector<Element> out;
  if (c.topology == Topology::classical || c.topology == Topology::dynamic) {
    // Series chain from node 1 to ground; each RC branch spans one segment.
    struct Seg {
      std::vector<std::pair<std::string, double>> parts;
    };
    std::vector<Seg> segs;
    if (c.R_series > 0.0) segs.push_back({{{"R0", c.R_series}}});
    if (c.C_series > 0.0) segs.push_back({{{"C0", c.C_series}}});
    for (std::size_t k = 0; k < c.branches.size(); ++k) {
      const std::string id = std::to_string(k + 1);
      segs.push_back({{{"R" + id, c.branches[k].first}, {"C" + id, c.branches[k].second}}});
    }
    int node = 1;
    for (std::size_t k = 0; k < segs.size(); ++k) {
      const int next = k + 1 == segs.size() ? 0 : node + 1;
      for (const auto& [name, v] : segs[k].parts) out.push_back({name, node, next, v});
      node = next;
    }
    return out;
  }
  int node = 1, top = 1;
  for (std::size_t k = 0; k < c.ladder.size(); ++k) {
    const auto& e = c.ladder[k];
    const std::string name = (e.kind == ElementKind::resistor ? "R" : "C") + std::to_string(e.index);
    if (e.series) {
      const int next = k + 1 == c.ladder.size() ? 0 : ++top;
      out.push_back({name, node, next, e.value});
      node = next;
    } else {
      out.push_back({name, node, 0, e.value});
    }
  }
  return out;
}

}  // namespace

std::string export_netlist(const Circuit& c, const std::string& label) {
  c.validate();
  std::ostringstream os;
  os << "* circsynth " << topology_name(c.topology) << ' ' << label << '\n';
  for (const auto& e : lay_out(c)) os << e.name << ' ' << e.a << ' ' << e.b << ' ' << sci(e.value) << '\n';
  os << ".end\n";
  return os.str();
}

std::string circuit_to_json(const Circuit& c, const std::string& label) {
  nlohmann::ordered_json j;
  j["label"] = label;
  j["topology"] = topology_name(c.topology);
  j["branch_count"] = c.branch_count();
  auto comps = nlohmann::ordered_json::array();
  for (const auto& [name, v] : c.components()) {
    nlohmann::ordered_json e;
    e["name"] = name;
    e["value"] = v;
    e["unit"] = name[0] == 'R' ? "ohm" : "F";
    comps.push_back(e);
  }
  j["components"] = comps;
  if (!c.branches.empty()) {
    auto tau = nlohmann::ordered_json::array();
    for (const auto& [R, C] : c.branches) tau.push_back(R * C);
    j["time_constants_s"] = tau;
  }
  j["warnings"] = c.warnings;
  return j.dump(2) + "\n";
}

}  // namespace circsynth
