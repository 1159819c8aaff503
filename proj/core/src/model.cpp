#include "pixelarray/model.hpp"

#include <algorithm>
#include <set>

namespace pixelarray {

const char* errc_name(Errc code) {
  switch (code) {
    case Errc::duplicate_port: return "DuplicatePort";
    case Errc::bad_bounds: return "BadBounds";
    case Errc::bad_resolution: return "BadResolution";
    case Errc::unknown_variable: return "UnknownVariable";
    case Errc::exposed_not_used: return "ExposedNotUsed";
    case Errc::index_out_of_range: return "IndexOutOfRange";
    case Errc::pack_mismatch: return "PackMismatch";
    case Errc::semiring_mismatch: return "SemiringMismatch";
    case Errc::syntax_error: return "SyntaxError";
    case Errc::unknown_function: return "UnknownFunction";
    case Errc::missing_variable: return "MissingVariable";
    case Errc::empty_cluster: return "EmptyCluster";
    case Errc::full_cluster: return "FullCluster";
    case Errc::too_many_packs: return "TooManyPacks";
    case Errc::cost_overflow: return "CostOverflow";
    case Errc::not_two_dimensional: return "NotTwoDimensional";
    case Errc::bad_input: return "BadInput";
  }
  return "Error";
}

std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b, const char* what) {
  std::uint64_t out = 0;
  if (__builtin_mul_overflow(a, b, &out)) {
    fail(Errc::cost_overflow, std::string(what) + " exceeds 64-bit range");
  }
  return out;
}

int Pack::find(const std::string& name) const {
  auto it = std::lower_bound(ports_.begin(), ports_.end(), name,
                             [](const Port& p, const std::string& n) { return p.name < n; });
  if (it == ports_.end() || it->name != name) return -1;
  return static_cast<int>(it - ports_.begin());
}

std::uint64_t Pack::entry_count() const {
  std::uint64_t n = 1;
  for (const Port& p : ports_) {
    n = checked_mul(n, static_cast<std::uint64_t>(p.resolution), "entry count");
  }
  return n;
}

std::vector<std::uint64_t> Pack::strides() const {
  std::vector<std::uint64_t> s(ports_.size(), 1);
  for (std::size_t i = ports_.size(); i-- > 1;) {
    s[i - 1] = checked_mul(s[i], static_cast<std::uint64_t>(ports_[i].resolution), "stride");
  }
  return s;
}

Pack make_pack(const std::vector<Port>& specs) {
  Pack pack;
  pack.ports_ = specs;
  std::sort(pack.ports_.begin(), pack.ports_.end(),
            [](const Port& a, const Port& b) { return a.name < b.name; });
  for (std::size_t i = 0; i < pack.ports_.size(); ++i) {
    const Port& p = pack.ports_[i];
    if (i > 0 && p.name == pack.ports_[i - 1].name) {
      fail(Errc::duplicate_port, "port '" + p.name + "' declared twice");
    }
    if (!(p.lower < p.upper)) {
      fail(Errc::bad_bounds, "port '" + p.name + "' needs lower < upper");
    }
    if (p.resolution < 2) {
      fail(Errc::bad_resolution, "port '" + p.name + "' needs resolution >= 2");
    }
  }
  return pack;
}

WiringDiagram WiringDiagram::create(std::vector<Pack> inner, Pack outer,
                                    const std::vector<std::vector<std::string>>& inner_port_links,
                                    const std::vector<std::string>& outer_port_links) {
  if (inner_port_links.size() != inner.size() || outer_port_links.size() != outer.size()) {
    fail(Errc::bad_input, "link assignment shape does not match packs");
  }

  // Collect link names with the bounds/resolution of their ports, checking
  // that linked ports agree.
  std::map<std::string, Link> by_name;
  auto absorb = [&](const Port& port, const std::string& link_name) {
    auto [it, inserted] = by_name.try_emplace(
        link_name, Link{link_name, port.lower, port.upper, port.resolution});
    if (!inserted) {
      const Link& l = it->second;
      if (l.lower != port.lower || l.upper != port.upper || l.resolution != port.resolution) {
        fail(Errc::bad_input, "ports on link '" + link_name +
                                  "' disagree on bounds or resolution");
      }
    }
  };

  std::set<std::string> inner_hit;
  for (std::size_t i = 0; i < inner.size(); ++i) {
    if (inner_port_links[i].size() != inner[i].size()) {
      fail(Errc::bad_input, "link assignment shape does not match pack ports");
    }
    for (std::size_t k = 0; k < inner[i].size(); ++k) {
      absorb(inner[i].port(k), inner_port_links[i][k]);
      inner_hit.insert(inner_port_links[i][k]);
    }
  }
  for (std::size_t k = 0; k < outer.size(); ++k) {
    absorb(outer.port(k), outer_port_links[k]);
    if (!inner_hit.count(outer_port_links[k])) {
      fail(Errc::exposed_not_used,
           "link '" + outer_port_links[k] + "' is not hit by any inner port");
    }
  }

  WiringDiagram wd;
  wd.inner_ = std::move(inner);
  wd.outer_ = std::move(outer);
  wd.links_.reserve(by_name.size());
  for (auto& [name, link] : by_name) wd.links_.push_back(link);  // map order = sorted

  auto index_of = [&](const std::string& name) {
    auto it = by_name.find(name);
    return static_cast<int>(std::distance(by_name.begin(), it));
  };
  wd.inner_map_.resize(wd.inner_.size());
  for (std::size_t i = 0; i < wd.inner_.size(); ++i) {
    wd.inner_map_[i].reserve(wd.inner_[i].size());
    for (const std::string& name : inner_port_links[i]) {
      wd.inner_map_[i].push_back(index_of(name));
    }
  }
  wd.outer_map_.reserve(wd.outer_.size());
  for (const std::string& name : outer_port_links) {
    wd.outer_map_.push_back(index_of(name));
  }
  return wd;
}

int WiringDiagram::find_link(const std::string& name) const {
  auto it = std::lower_bound(links_.begin(), links_.end(), name,
                             [](const Link& l, const std::string& n) { return l.name < n; });
  if (it == links_.end() || it->name != name) return -1;
  return static_cast<int>(it - links_.begin());
}

WiringDiagram build_wiring_diagram(const std::vector<RelationVars>& relvars,
                                   const std::map<std::string, VarSpec>& varspecs,
                                   const std::vector<std::string>& exposed) {
  std::vector<RelationVars> rels = relvars;
  std::sort(rels.begin(), rels.end(),
            [](const RelationVars& a, const RelationVars& b) { return a.id < b.id; });
  for (std::size_t i = 1; i < rels.size(); ++i) {
    if (rels[i].id == rels[i - 1].id) {
      fail(Errc::bad_input, "relation id '" + rels[i].id + "' declared twice");
    }
  }

  auto spec_of = [&](const std::string& name) -> const VarSpec& {
    auto it = varspecs.find(name);
    if (it == varspecs.end()) {
      fail(Errc::unknown_variable, "variable '" + name + "' has no range/resolution");
    }
    return it->second;
  };

  std::set<std::string> used;
  std::vector<Pack> inner;
  std::vector<std::vector<std::string>> inner_links;
  inner.reserve(rels.size());
  for (const RelationVars& rel : rels) {
    std::vector<Port> ports;
    ports.reserve(rel.variables.size());
    for (const std::string& v : rel.variables) {
      const VarSpec& s = spec_of(v);
      ports.push_back(Port{v, s.lower, s.upper, s.resolution});
      used.insert(v);
    }
    Pack pack = make_pack(ports);
    std::vector<std::string> names;
    names.reserve(pack.size());
    for (const Port& p : pack.ports()) names.push_back(p.name);
    inner.push_back(std::move(pack));
    inner_links.push_back(std::move(names));
  }

  std::vector<Port> outer_ports;
  outer_ports.reserve(exposed.size());
  for (const std::string& v : exposed) {
    const VarSpec& s = spec_of(v);
    if (!used.count(v)) {
      fail(Errc::exposed_not_used, "exposed variable '" + v + "' is not used by any relation");
    }
    outer_ports.push_back(Port{v, s.lower, s.upper, s.resolution});
  }
  Pack outer = make_pack(outer_ports);
  std::vector<std::string> outer_links;
  outer_links.reserve(outer.size());
  for (const Port& p : outer.ports()) outer_links.push_back(p.name);

  return WiringDiagram::create(std::move(inner), std::move(outer), inner_links, outer_links);
}

Entry project_entry(const WiringDiagram& wd, const LinkEntry& e, int target) {
  const std::vector<Link>& links = wd.links();
  if (e.coords.size() != links.size()) {
    fail(Errc::index_out_of_range, "link entry has wrong arity");
  }
  for (std::size_t k = 0; k < links.size(); ++k) {
    if (e.coords[k] < 1 || e.coords[k] > links[k].resolution) {
      fail(Errc::index_out_of_range, "coordinate of link '" + links[k].name + "' out of range");
    }
  }

  Entry out;
  if (target == WiringDiagram::kOuter) {
    out.coords.reserve(wd.outer().size());
    for (std::size_t k = 0; k < wd.outer().size(); ++k) {
      out.coords.push_back(e.coords[wd.outer_link_of(k)]);
    }
    return out;
  }
  if (target < 0 || static_cast<std::size_t>(target) >= wd.inner_count()) {
    fail(Errc::index_out_of_range, "no such inner pack");
  }
  const Pack& pack = wd.inner_pack(target);
  out.coords.reserve(pack.size());
  for (std::size_t k = 0; k < pack.size(); ++k) {
    out.coords.push_back(e.coords[wd.link_of(target, k)]);
  }
  return out;
}

std::uint64_t link_entry_count(const WiringDiagram& wd) {
  std::uint64_t n = 1;
  for (const Link& l : wd.links()) {
    n = checked_mul(n, static_cast<std::uint64_t>(l.resolution), "link entry count");
  }
  return n;
}

EntryCursor::EntryCursor(std::vector<int> resolutions)
    : resolutions_(std::move(resolutions)), coords_(resolutions_.size(), 1) {}

int EntryCursor::advance() {
  for (std::size_t i = coords_.size(); i-- > 0;) {
    if (coords_[i] < resolutions_[i]) {
      ++coords_[i];
      return static_cast<int>(i);
    }
    coords_[i] = 1;
  }
  done_ = true;
  return -1;
}

}  // namespace pixelarray
