#include "pedsched/lp_format.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "pedsched/common.hpp"

namespace pedsched {

namespace {

constexpr int kTermsPerLine = 8;

std::string bound_text(double v) {
  if (std::isinf(v)) return v > 0 ? "+inf" : "-inf";
  return format_number(v);
}

void write_terms(std::ostream& out, const std::vector<Term>& terms, const MilpModel& model) {
  int on_line = 0;
  for (const Term& t : terms) {
    if (on_line == kTermsPerLine) {
      out << "\n   ";
      on_line = 0;
    }
    out << (t.coef < 0 ? " - " : " + ") << format_number(std::abs(t.coef)) << ' '
        << model.variables()[static_cast<std::size_t>(t.var)].name;
    ++on_line;
  }
}

const char* sense_text(RowSense s) {
  switch (s) {
    case RowSense::LessEqual: return "<=";
    case RowSense::GreaterEqual: return ">=";
    case RowSense::Equal: return "=";
  }
  return "=";
}

}  // namespace

void write_lp(std::ostream& out, const MilpModel& model) {
  const MilpMetadata& md = model.metadata();
  out << "\\ big_m " << format_number(md.big_m) << '\n'
      << "\\ big_m1 " << format_number(md.big_m1) << '\n'
      << "\\ epsilon " << format_number(md.epsilon) << '\n';

  const Objective& obj = model.objective();
  out << (obj.minimize ? "Minimize" : "Maximize") << "\n obj:";
  write_terms(out, obj.terms, model);
  if (obj.constant != 0.0) {
    out << (obj.constant < 0 ? " - " : " + ") << format_number(std::abs(obj.constant));
  }
  out << "\nSubject To\n";
  for (const Constraint& c : model.constraints()) {
    out << ' ' << c.name << ':';
    write_terms(out, c.terms, model);
    out << ' ' << sense_text(c.sense) << ' ' << format_number(c.rhs) << '\n';
  }
  out << "Bounds\n";
  for (const Variable& v : model.variables()) {
    if (std::isinf(v.lower) && v.lower < 0 && std::isinf(v.upper) && v.upper > 0) {
      out << ' ' << v.name << " free\n";
    } else {
      out << ' ' << bound_text(v.lower) << " <= " << v.name << " <= " << bound_text(v.upper) << '\n';
    }
  }
  out << "Binary\n";
  for (const Variable& v : model.variables()) {
    if (v.kind == VarKind::Binary) out << ' ' << v.name << '\n';
  }
  out << "General\n";
  for (const Variable& v : model.variables()) {
    if (v.kind == VarKind::Integer) out << ' ' << v.name << '\n';
  }
  out << "End\n";
}

void export_lp(const MilpModel& model, const std::filesystem::path& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
  write_lp(f, model);
  f.flush();
  if (!f) throw std::runtime_error("write failed for " + path.string());
}

namespace {

enum class Section { None, Objective, Constraints, Bounds, Binary, General, End };

std::optional<double> parse_number(const std::string& s) {
  if (s == "+inf" || s == "inf" || s == "+infinity" || s == "infinity") return kInfinity;
  if (s == "-inf" || s == "-infinity") return -kInfinity;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (first != last && *first == '+') ++first;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) return std::nullopt;
  return v;
}

bool is_sense(const std::string& t) {
  return t == "<=" || t == ">=" || t == "=" || t == "<" || t == ">" || t == "=<" || t == "=>";
}

RowSense to_sense(const std::string& t) {
  if (t == "<=" || t == "<" || t == "=<") return RowSense::LessEqual;
  if (t == ">=" || t == ">" || t == "=>") return RowSense::GreaterEqual;
  return RowSense::Equal;
}

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

std::optional<Section> section_of(const std::string& line) {
  const std::string l = lower(line);
  if (l == "minimize" || l == "maximize" || l == "minimum" || l == "maximum" || l == "min" ||
      l == "max")
    return Section::Objective;
  if (l == "subject to" || l == "st" || l == "s.t." || l == "such that") return Section::Constraints;
  if (l == "bounds" || l == "bound") return Section::Bounds;
  if (l == "binary" || l == "binaries" || l == "bin") return Section::Binary;
  if (l == "general" || l == "generals" || l == "gen") return Section::General;
  if (l == "end") return Section::End;
  return std::nullopt;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> tokens_of(const std::string& s) {
  std::istringstream is(s);
  std::vector<std::string> out;
  std::string t;
  while (is >> t) out.push_back(t);
  return out;
}

class Reader {
 public:
  MilpModel read(std::istream& in) {
    std::string line;
    Section sec = Section::None;
    std::vector<std::string> obj_tokens, row_tokens, bound_lines, binary_names, general_names;
    while (std::getline(in, line)) {
      ++line_no_;
      const auto bs = line.find('\\');
      if (bs != std::string::npos) {
        read_metadata(line.substr(bs + 1));
        line = line.substr(0, bs);
      }
      line = trim(line);
      if (line.empty()) continue;
      if (const auto s = section_of(line)) {
        sec = *s;
        if (sec == Section::Objective) model_.objective().minimize = lower(line).rfind("min", 0) == 0;
        continue;
      }
      auto toks = tokens_of(line);
      switch (sec) {
        case Section::Objective: obj_tokens.insert(obj_tokens.end(), toks.begin(), toks.end()); break;
        case Section::Constraints: row_tokens.insert(row_tokens.end(), toks.begin(), toks.end()); break;
        case Section::Bounds: bound_lines.push_back(line); break;
        case Section::Binary: binary_names.insert(binary_names.end(), toks.begin(), toks.end()); break;
        case Section::General: general_names.insert(general_names.end(), toks.begin(), toks.end()); break;
        case Section::End: break;
        case Section::None: fail("text before the objective section");
      }
    }
    for (const std::string& b : bound_lines) read_bound(b);
    read_objective(obj_tokens);
    read_rows(row_tokens);
    for (const std::string& n : binary_names) var(n).kind = VarKind::Binary;
    for (const std::string& n : general_names) var(n).kind = VarKind::Integer;
    model_.validate();
    return std::move(model_);
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ValidationError("LP parse error near line " + std::to_string(line_no_) + ": " + what);
  }

  void read_metadata(const std::string& comment) {
    const auto t = tokens_of(comment);
    if (t.size() != 2) return;
    const auto v = parse_number(t[1]);
    if (!v) return;
    if (t[0] == "big_m") model_.metadata().big_m = *v;
    if (t[0] == "big_m1") model_.metadata().big_m1 = *v;
    if (t[0] == "epsilon") model_.metadata().epsilon = *v;
  }

  int var_id(const std::string& name) {
    const int id = model_.find_variable(name);
    if (id >= 0) return id;
    if (name.empty() || std::isdigit(static_cast<unsigned char>(name[0])) || name[0] == '.') {
      fail("bad variable name '" + name + "'");
    }
    return model_.add_variable(name, VarKind::Continuous, 0.0, kInfinity);
  }
  Variable& var(const std::string& name) {
    return model_.variables()[static_cast<std::size_t>(var_id(name))];
  }

  void read_bound(const std::string& line) {
    const auto t = tokens_of(line);
    if (t.size() == 2 && lower(t[1]) == "free") {
      Variable& v = var(t[0]);
      v.lower = -kInfinity;
      v.upper = kInfinity;
      return;
    }
    if (t.size() == 5 && t[1] == "<=" && t[3] == "<=") {
      const auto lo = parse_number(t[0]);
      const auto hi = parse_number(t[4]);
      if (!lo || !hi) fail("bad bound values");
      Variable& v = var(t[2]);
      v.lower = *lo;
      v.upper = *hi;
      return;
    }
    if (t.size() == 3 && is_sense(t[1])) {
      const auto val = parse_number(t[2]);
      if (!val) fail("bad bound value");
      Variable& v = var(t[0]);
      const RowSense s = to_sense(t[1]);
      if (s != RowSense::GreaterEqual) v.upper = *val;
      if (s != RowSense::LessEqual) v.lower = *val;
      return;
    }
    fail("unsupported bound '" + line + "'");
  }

  /// Parses "[+|-] [coef] name ..." up to `end`; a trailing bare number is a
  /// constant.
  std::vector<Term> read_expression(const std::vector<std::string>& t, std::size_t begin,
                                    std::size_t end, double* constant) {
    std::vector<Term> terms;
    double sign = 1.0;
    for (std::size_t p = begin; p < end; ++p) {
      const std::string& tok = t[p];
      if (tok == "+") { sign = 1.0; continue; }
      if (tok == "-") { sign = -1.0; continue; }
      double coef = 1.0;
      std::string name = tok;
      if (const auto num = parse_number(tok)) {
        if (p + 1 < end && t[p + 1] != "+" && t[p + 1] != "-" && !parse_number(t[p + 1])) {
          coef = *num;
          name = t[++p];
        } else {
          if (constant == nullptr) fail("constant term in a row");
          *constant += sign * *num;
          sign = 1.0;
          continue;
        }
      }
      terms.push_back({var_id(name), sign * coef});
      sign = 1.0;
    }
    return terms;
  }

  void read_objective(const std::vector<std::string>& t) {
    std::size_t begin = 0;
    if (!t.empty() && t[0].back() == ':') begin = 1;
    double constant = 0.0;
    model_.objective().terms = read_expression(t, begin, t.size(), &constant);
    model_.objective().constant = constant;
  }

  void read_rows(const std::vector<std::string>& t) {
    std::size_t p = 0;
    int anonymous = 0;
    while (p < t.size()) {
      std::string name;
      if (t[p].back() == ':') {
        name = t[p].substr(0, t[p].size() - 1);
        ++p;
      } else {
        name = "R" + std::to_string(++anonymous);
      }
      std::size_t s = p;
      while (s < t.size() && !is_sense(t[s])) ++s;
      if (s + 1 >= t.size()) fail("row " + name + " has no sense and right-hand side");
      const auto rhs = parse_number(t[s + 1]);
      if (!rhs) fail("row " + name + " has a non-numeric right-hand side");
      model_.add_constraint(name, read_expression(t, p, s, nullptr), to_sense(t[s]), *rhs);
      p = s + 2;
    }
  }

  MilpModel model_;
  int line_no_ = 0;
};

}  // namespace

MilpModel read_lp(std::istream& in) { return Reader().read(in); }

MilpModel import_lp(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path.string() + " for reading");
  return read_lp(f);
}

}  // namespace pedsched
