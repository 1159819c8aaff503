#include "pixelarray/render.hpp"

#include <json.hpp>

namespace pixelarray {

namespace {

void require_two_dimensional(const BoolArray& array, const char* what) {
  if (array.pack().size() != 2) {
    fail(Errc::not_two_dimensional, std::string(what) + " requires exactly two ports");
  }
}

}  // namespace

std::string render_pbm(const BoolArray& array) {
  require_two_dimensional(array, "PBM output");
  const int rows = array.pack().port(0).resolution;
  const int cols = array.pack().port(1).resolution;
  std::string out = "P1\n" + std::to_string(cols) + " " + std::to_string(rows) + "\n";
  std::uint64_t flat = 0;
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      if (j) out += ' ';
      out += array.at(flat++) ? '1' : '0';
    }
    out += '\n';
  }
  return out;
}

std::string render_ascii(const BoolArray& array) {
  require_two_dimensional(array, "ASCII output");
  const int rows = array.pack().port(0).resolution;
  const int cols = array.pack().port(1).resolution;
  std::string out;
  out.reserve(static_cast<std::size_t>(rows) * (cols + 1));
  std::uint64_t flat = 0;
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      out += array.at(flat++) ? '#' : '.';
    }
    out += '\n';
  }
  return out;
}

std::string render_json(const BoolArray& array) {
  nlohmann::json pack = nlohmann::json::array();
  for (const Port& p : array.pack().ports()) {
    pack.push_back({{"name", p.name},
                    {"lower", p.lower},
                    {"upper", p.upper},
                    {"resolution", p.resolution}});
  }

  nlohmann::json entries = nlohmann::json::array();
  std::vector<int> res(array.pack().size());
  for (std::size_t k = 0; k < res.size(); ++k) res[k] = array.pack().port(k).resolution;
  EntryCursor cursor(res);
  std::uint64_t flat = 0;
  while (!cursor.done()) {
    if (array.at(flat)) entries.push_back(cursor.coords());  // row-major = lexicographic
    ++flat;
    cursor.advance();
  }

  nlohmann::json j;
  j["pack"] = std::move(pack);
  j["on_entries"] = std::move(entries);
  return j.dump();
}

BoolArray parse_json_array(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object() || !j.contains("pack") || !j.contains("on_entries")) {
    fail(Errc::bad_input, "expected {\"pack\": [...], \"on_entries\": [...]}");
  }
  std::vector<Port> ports;
  for (const auto& p : j.at("pack")) {
    ports.push_back(Port{p.at("name").get<std::string>(), p.at("lower").get<double>(),
                         p.at("upper").get<double>(), p.at("resolution").get<int>()});
    if (ports.size() > 1 && !(ports[ports.size() - 2].name < ports.back().name)) {
      fail(Errc::bad_input, "pack ports must be sorted by name");
    }
  }
  BoolArray array(make_pack(ports));
  for (const auto& coords : j.at("on_entries")) {
    Entry e;
    for (const auto& c : coords) e.coords.push_back(c.get<int>());
    array.set(e, 1);
  }
  return array;
}

}  // namespace pixelarray
