#include "pixelarray/system_file.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

namespace pixelarray {

namespace {

[[noreturn]] void line_error(int line, const std::string& what) {
  fail(Errc::bad_input, "line " + std::to_string(line) + ": " + what);
}

class LineScanner {
 public:
  LineScanner(std::string text, int line) : text_(std::move(text)), line_(line) {}

  void skip_ws() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t')) ++pos_;
  }

  bool at_end() {
    skip_ws();
    return pos_ >= text_.size();
  }

  bool eat(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c, const char* what) {
    if (!eat(c)) line_error(line_, std::string("expected '") + c + "' " + what);
  }

  std::string ident() {
    skip_ws();
    std::size_t start = pos_;
    if (pos_ < text_.size() &&
        (std::isalpha(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
      ++pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
        ++pos_;
      }
    }
    if (pos_ == start) line_error(line_, "expected a name");
    return text_.substr(start, pos_ - start);
  }

  double number() {
    skip_ws();
    std::size_t start = pos_;
    if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
    while (pos_ < text_.size() &&
           (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.')) {
      ++pos_;
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      ++pos_;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }
    double value = 0.0;
    auto res = std::from_chars(text_.data() + start, text_.data() + pos_, value);
    if (res.ec != std::errc() || res.ptr != text_.data() + pos_ || pos_ == start) {
      line_error(line_, "expected a number");
    }
    return value;
  }

  int integer() {
    double v = number();
    int n = static_cast<int>(v);
    if (static_cast<double>(n) != v) line_error(line_, "expected an integer");
    return n;
  }

  std::string rest() {
    skip_ws();
    return text_.substr(pos_);
  }

  int line() const { return line_; }

 private:
  std::string text_;
  std::size_t pos_ = 0;
  int line_;
};

}  // namespace

SystemSpec parse_system_file(const std::string& text) {
  SystemSpec spec;
  std::vector<std::pair<int, Relation>> relations;       // line, relation
  std::vector<std::pair<int, std::string>> tol_ids;      // line, id (or *)
  std::vector<std::pair<int, std::string>> exposed_at;   // line, name
  bool have_star_tol = false;

  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    LineScanner line(raw, line_no);
    if (line.at_end()) continue;

    std::string directive = line.ident();
    if (directive == "relation") {
      std::string id = line.ident();
      line.expect(':', "after the relation id");
      std::string body = line.rest();
      for (const auto& [l, rel] : relations) {
        if (rel.id == id) line_error(line_no, "relation '" + id + "' declared twice");
      }
      try {
        relations.emplace_back(line_no, parse_relation(id, body));
      } catch (const Error& e) {
        line_error(line_no, e.what());
      }
    } else if (directive == "var") {
      std::vector<std::string> names;
      names.push_back(line.ident());
      while (line.eat(',')) names.push_back(line.ident());
      std::string kw = line.ident();
      if (kw != "in") line_error(line_no, "expected 'in' after the variable names");
      if (line.eat(']')) line_error(line_no, "ranges are half-open: use [lo,hi)");
      line.expect('[', "to open the range (ranges are half-open: [lo,hi))");
      double lo = line.number();
      line.expect(',', "between the bounds");
      double hi = line.number();
      if (line.eat(']')) line_error(line_no, "ranges are half-open: use [lo,hi)");
      line.expect(')', "to close the half-open range");
      std::string res_kw = line.ident();
      if (res_kw != "res") line_error(line_no, "expected 'res' after the range");
      int res = line.integer();
      if (!line.at_end()) line_error(line_no, "unexpected trailing text");
      if (!(lo < hi)) line_error(line_no, "range needs lo < hi");
      if (res < 2) line_error(line_no, "resolution must be at least 2");
      for (const std::string& name : names) {
        if (spec.varspecs.count(name)) {
          line_error(line_no, "variable '" + name + "' declared twice");
        }
        spec.varspecs[name] = VarSpec{lo, hi, res};
      }
    } else if (directive == "expose") {
      exposed_at.emplace_back(line_no, line.ident());
      while (line.eat(',')) exposed_at.emplace_back(line_no, line.ident());
      if (!line.at_end()) line_error(line_no, "unexpected trailing text");
    } else if (directive == "tol") {
      std::string id = line.eat('*') ? "*" : line.ident();
      double eps = line.number();
      if (!line.at_end()) line_error(line_no, "unexpected trailing text");
      if (!(eps > 0.0)) line_error(line_no, "tolerance must be positive");
      if (id == "*") {
        if (have_star_tol) line_error(line_no, "default tolerance set twice");
        have_star_tol = true;
        spec.default_tolerance = eps;
      } else {
        if (spec.tolerances.count(id)) {
          line_error(line_no, "tolerance for '" + id + "' set twice");
        }
        spec.tolerances[id] = eps;
        tol_ids.emplace_back(line_no, id);
      }
    } else {
      line_error(line_no, "unknown directive '" + directive + "'");
    }
  }

  for (const auto& [line, rel] : relations) {
    for (const std::string& v : rel.variables) {
      if (!spec.varspecs.count(v)) {
        line_error(line, "variable '" + v + "' has no range/resolution");
      }
    }
    spec.relations.push_back(rel);
  }
  for (const auto& [line, name] : exposed_at) {
    if (!spec.varspecs.count(name)) {
      line_error(line, "exposed variable '" + name + "' has no range/resolution");
    }
    bool used = false;
    for (const auto& [l, rel] : relations) {
      used = used || std::find(rel.variables.begin(), rel.variables.end(), name) !=
                         rel.variables.end();
    }
    if (!used) {
      line_error(line, "exposed variable '" + name + "' is not used by any relation");
    }
    if (std::find(spec.exposed.begin(), spec.exposed.end(), name) != spec.exposed.end()) {
      line_error(line, "variable '" + name + "' exposed twice");
    }
    spec.exposed.push_back(name);
  }
  for (const auto& [line, id] : tol_ids) {
    bool known = std::any_of(relations.begin(), relations.end(),
                             [&](const auto& r) { return r.second.id == id; });
    if (!known) line_error(line, "tolerance for unknown relation '" + id + "'");
  }
  return spec;
}

SystemSpec load_system_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::bad_input, "cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_system_file(buffer.str());
}

}  // namespace pixelarray
