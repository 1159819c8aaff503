#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "pixelarray/error.hpp"

namespace pixelarray {

// One variable slot on a pack: half-open range [lower, upper) split into
// `resolution` equal cells.
struct Port {
  std::string name;
  double lower = 0.0;
  double upper = 1.0;
  int resolution = 2;

  bool operator==(const Port&) const = default;
};

// A finite set of ports, held sorted ascending by name. The index schema of
// one pixel array.
class Pack {
 public:
  Pack() = default;

  std::size_t size() const { return ports_.size(); }
  bool empty() const { return ports_.empty(); }
  const std::vector<Port>& ports() const { return ports_; }
  const Port& port(std::size_t i) const { return ports_[i]; }

  // Index of the named port, or -1.
  int find(const std::string& name) const;

  // Number of entries, i.e. the product of all resolutions (1 for the empty
  // pack). Throws cost_overflow if it does not fit in 64 bits.
  std::uint64_t entry_count() const;

  // Row-major strides over the sorted ports; last port has stride 1.
  std::vector<std::uint64_t> strides() const;

  bool operator==(const Pack&) const = default;

 private:
  friend Pack make_pack(const std::vector<Port>& specs);
  std::vector<Port> ports_;
};

// Validates port specs (unique names, lower < upper, resolution >= 2) and
// returns the pack with ports sorted by name.
Pack make_pack(const std::vector<Port>& specs);

// 1-based coordinates, one per port of the owning pack.
struct Entry {
  std::vector<int> coords;

  bool operator==(const Entry&) const = default;
};

// 1-based coordinates, one per link of a wiring diagram, ordered by link name.
struct LinkEntry {
  std::vector<int> coords;

  bool operator==(const LinkEntry&) const = default;
};

struct Link {
  std::string name;
  double lower = 0.0;
  double upper = 1.0;
  int resolution = 2;

  bool operator==(const Link&) const = default;
};

// Inner packs wired to an outer pack. Every port carries a link assignment;
// linked ports agree on bounds and resolution, and every link is hit by at
// least one inner port.
class WiringDiagram {
 public:
  static constexpr int kOuter = -1;

  WiringDiagram() = default;

  // Explicit construction: `inner_port_links[i][k]` / `outer_port_links[k]`
  // name the link of port k (in sorted port order) of inner pack i / the
  // outer pack. Link bounds and resolutions are inherited from the ports.
  static WiringDiagram create(std::vector<Pack> inner, Pack outer,
                              const std::vector<std::vector<std::string>>& inner_port_links,
                              const std::vector<std::string>& outer_port_links);

  std::size_t inner_count() const { return inner_.size(); }
  const std::vector<Pack>& inner() const { return inner_; }
  const Pack& inner_pack(std::size_t i) const { return inner_[i]; }
  const Pack& outer() const { return outer_; }
  const std::vector<Link>& links() const { return links_; }

  // Link index assigned to port k of inner pack i / of the outer pack.
  int link_of(std::size_t pack_index, std::size_t port_index) const {
    return inner_map_[pack_index][port_index];
  }
  int outer_link_of(std::size_t port_index) const { return outer_map_[port_index]; }

  int find_link(const std::string& name) const;

  bool operator==(const WiringDiagram&) const = default;

 private:
  std::vector<Pack> inner_;
  Pack outer_;
  std::vector<Link> links_;  // sorted by name
  std::vector<std::vector<int>> inner_map_;
  std::vector<int> outer_map_;
};

struct VarSpec {
  double lower = 0.0;
  double upper = 1.0;
  int resolution = 2;

  bool operator==(const VarSpec&) const = default;
};

// (relation id, variable names used by the relation)
struct RelationVars {
  std::string id;
  std::vector<std::string> variables;
};

// Builds the diagram with one inner pack per relation (ports = its
// variables), one link per distinct variable name, and the exposed variables
// as the outer pack. Inner packs are ordered by relation id, so the result
// does not depend on input order.
WiringDiagram build_wiring_diagram(const std::vector<RelationVars>& relvars,
                                   const std::map<std::string, VarSpec>& varspecs,
                                   const std::vector<std::string>& exposed);

// Reads, for each port of inner pack `target` (or the outer pack when
// `target` is WiringDiagram::kOuter), the coordinate of that port's link.
Entry project_entry(const WiringDiagram& wd, const LinkEntry& e, int target);

// Product of the link resolutions: the iteration count of the naive
// generalized multiplication. Throws cost_overflow if it exceeds 64 bits.
std::uint64_t link_entry_count(const WiringDiagram& wd);

// Mixed-radix counter over 1-based coordinates, row-major (last digit
// fastest). Used to enumerate entry spaces.
class EntryCursor {
 public:
  explicit EntryCursor(std::vector<int> resolutions);

  const std::vector<int>& coords() const { return coords_; }
  bool done() const { return done_; }

  // Advances to the next entry. Returns the index of the digit that was
  // incremented (every digit after it wrapped back to 1), or -1 when the
  // space is exhausted.
  int advance();

 private:
  std::vector<int> resolutions_;
  std::vector<int> coords_;
  bool done_ = false;
};

std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b, const char* what);

}  // namespace pixelarray
