#include "andor/model.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <sstream>

#include "andor/util.hpp"

namespace andor {

const char* task_name(Task t) {
  switch (t) {
    case Task::SumProduct: return "sum-product";
    case Task::Count: return "count";
    case Task::Consistency: return "consistency";
  }
  return "?";
}

long long Model::table_size(const Factor& f) const {
  long long n = 1;
  for (VarId v : f.scope) n *= domain_size(v);
  return n;
}

std::vector<int> scope_sizes(const Model& m, const std::vector<VarId>& scope) {
  std::vector<int> s;
  s.reserve(scope.size());
  for (VarId v : scope) s.push_back(m.domain_size(v));
  return s;
}

std::vector<int> FlatRelation::row_values(
    long long row, const std::vector<int>& sizes) const {
  std::vector<int> vals(scope.size());
  for (int i = int(scope.size()) - 1; i >= 0; --i) {
    vals[i] = int(row % sizes[i]);
    row /= sizes[i];
  }
  return vals;
}

namespace {

// whitespace tokenizer with line tracking; `#` comments run to end of line
class Lexer {
 public:
  explicit Lexer(const std::string& text) : text_(text) {}

  bool next(std::string& tok) {
    skip();
    if (pos_ >= text_.size()) return false;
    std::size_t start = pos_;
    while (pos_ < text_.size() && !std::isspace((unsigned char)text_[pos_]) &&
           text_[pos_] != '#')
      ++pos_;
    tok.assign(text_, start, pos_ - start);
    return true;
  }

  int line() const { return line_; }

 private:
  void skip() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == '#') {
        while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
      } else if (std::isspace((unsigned char)c)) {
        if (c == '\n') ++line_;
        ++pos_;
      } else {
        break;
      }
    }
  }

  const std::string& text_;
  std::size_t pos_ = 0;
  int line_ = 1;
};

[[noreturn]] void fail(int line, const std::string& msg) {
  throw ModelFormatError(line, msg);
}

long long parse_int(Lexer& lx, const std::string& what) {
  std::string tok;
  if (!lx.next(tok)) fail(lx.line(), "unexpected end of input, expected " + what);
  char* end = nullptr;
  long long v = std::strtoll(tok.c_str(), &end, 10);
  if (end == tok.c_str() || *end != '\0')
    fail(lx.line(), "expected " + what + ", got '" + tok + "'");
  return v;
}

}  // namespace

Model parse_model(const std::string& text) {
  Lexer lx(text);
  std::string tok;

  if (!lx.next(tok) || tok != "model") fail(lx.line(), "expected 'model <name>'");
  Model m;
  if (!lx.next(m.name)) fail(lx.line(), "expected model name");

  if (!lx.next(tok) || tok != "vars") fail(lx.line(), "expected 'vars <n>'");
  long long n = parse_int(lx, "variable count");
  if (n < 1) fail(lx.line(), "variable count must be >= 1");
  m.domains.assign(static_cast<std::size_t>(n), Domain{});
  m.evidence = Assignment(int(n));

  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  for (long long i = 0; i < n; ++i) {
    if (!lx.next(tok) || tok != "dom") fail(lx.line(), "expected 'dom <var> <size>'");
    long long v = parse_int(lx, "variable index");
    if (v < 0 || v >= n) fail(lx.line(), "variable index out of range");
    if (seen[std::size_t(v)]) fail(lx.line(), "duplicate dom line for variable " + std::to_string(v));
    seen[std::size_t(v)] = 1;
    long long size = parse_int(lx, "domain size");
    if (size < 1) fail(lx.line(), "domain size must be >= 1");
    m.domains[std::size_t(v)].size = int(size);
  }

  while (true) {
    if (!lx.next(tok)) fail(lx.line(), "missing 'end'");
    if (tok == "end") break;
    if (tok == "factor") {
      int factor_line = lx.line();
      long long arity = parse_int(lx, "factor arity");
      if (arity < 0) fail(factor_line, "negative factor arity");
      Factor f;
      std::set<VarId> dup;
      for (long long i = 0; i < arity; ++i) {
        long long v = parse_int(lx, "scope variable");
        if (v < 0 || v >= n) fail(lx.line(), "variable index out of range");
        if (!dup.insert(VarId(v)).second) fail(lx.line(), "duplicate scope variable");
        f.scope.push_back(VarId(v));
      }
      long long want = 1;
      for (VarId v : f.scope) want *= m.domain_size(v);
      f.table.reserve(static_cast<std::size_t>(want));
      for (long long i = 0; i < want; ++i) {
        std::string vt;
        if (!lx.next(vt))
          fail(lx.line(), "table length mismatch for factor at line " +
                              std::to_string(factor_line));
        char* end = nullptr;
        double x = std::strtod(vt.c_str(), &end);
        if (end == vt.c_str() || *end != '\0')
          fail(lx.line(), "table length mismatch for factor at line " +
                              std::to_string(factor_line));
        if (x < 0) fail(lx.line(), "negative table entry");
        if (!std::isfinite(x)) fail(lx.line(), "non-finite table entry");
        f.table.push_back(x);
      }
      m.factors.push_back(std::move(f));
    } else if (tok == "evidence") {
      long long v = parse_int(lx, "evidence variable");
      if (v < 0 || v >= n) fail(lx.line(), "variable index out of range");
      long long x = parse_int(lx, "evidence value");
      if (x < 0 || x >= m.domain_size(VarId(v)))
        fail(lx.line(), "evidence value out of range");
      m.evidence.set(VarId(v), int(x));
    } else {
      // a stray number here is the common symptom of a short factor line
      char* end = nullptr;
      std::strtod(tok.c_str(), &end);
      if (end != tok.c_str() && *end == '\0')
        fail(lx.line(), "table length mismatch");
      fail(lx.line(), "unknown directive '" + tok + "'");
    }
  }
  if (lx.next(tok)) fail(lx.line(), "trailing content after 'end'");
  return m;
}

std::string render_model(const Model& m) {
  std::ostringstream out;
  out << "model " << m.name << "\n";
  out << "vars " << m.var_count() << "\n";
  for (int v = 0; v < m.var_count(); ++v)
    out << "dom " << v << " " << m.domain_size(v) << "\n";
  for (const Factor& f : m.factors) {
    out << "factor " << f.scope.size();
    for (VarId v : f.scope) out << " " << v;
    out << "\n";
    for (std::size_t i = 0; i < f.table.size(); ++i)
      out << (i ? " " : "") << format_double(f.table[i]);
    out << "\n";
  }
  for (int v = 0; v < m.var_count(); ++v)
    if (m.evidence.size() == m.var_count() && m.evidence.assigned(v))
      out << "evidence " << v << " " << m.evidence.value(v) << "\n";
  out << "end\n";
  return out.str();
}

long long factor_index(const Model& m, const Factor& f, const Assignment& a) {
  long long idx = 0;
  for (VarId v : f.scope) {
    if (!a.assigned(v))
      throw std::invalid_argument("unassigned scope variable " + std::to_string(v));
    idx = idx * m.domain_size(v) + a.value(v);
  }
  return idx;
}

double evaluate_factor(const Model& m, int factor_id, const Assignment& a) {
  const Factor& f = m.factors.at(static_cast<std::size_t>(factor_id));
  return f.table[std::size_t(factor_index(m, f, a))];
}

FlatRelation flat_relation(const Model& m, int factor_id) {
  const Factor& f = m.factors.at(static_cast<std::size_t>(factor_id));
  FlatRelation r;
  r.scope = f.scope;
  r.allowed.resize(f.table.size());
  for (std::size_t i = 0; i < f.table.size(); ++i)
    r.allowed[i] = f.table[i] != 0.0 ? 1 : 0;
  return r;
}

bool is_consistent(const Model& m, const Assignment& a) {
  for (const Factor& f : m.factors) {
    bool full = true;
    for (VarId v : f.scope)
      if (!a.assigned(v)) {
        full = false;
        break;
      }
    if (!full) continue;
    if (evaluate_factor(m, int(&f - m.factors.data()), a) == 0.0) return false;
  }
  return true;
}

Graph primal_graph(const Model& m) {
  Graph g(m.var_count());
  for (const Factor& f : m.factors)
    for (std::size_t i = 0; i < f.scope.size(); ++i)
      for (std::size_t j = i + 1; j < f.scope.size(); ++j)
        g.add_edge(f.scope[i], f.scope[j]);
  return g;
}

bool is_strictly_positive(const Model& m) {
  for (const Factor& f : m.factors)
    for (double x : f.table)
      if (x == 0.0) return false;
  return true;
}

Model apply_evidence(const Model& m, const Assignment& e) {
  for (int v = 0; v < m.var_count(); ++v)
    if (e.size() == m.var_count() && e.assigned(v) &&
        (e.value(v) < 0 || e.value(v) >= m.domain_size(v)))
      throw std::out_of_range("evidence value out of range for variable " +
                              std::to_string(v));
  Model out = m;
  for (Factor& f : out.factors) {
    std::vector<int> sizes = scope_sizes(out, f.scope);
    for (long long row = 0; row < (long long)f.table.size(); ++row) {
      long long rest = row;
      bool keep = true;
      for (int i = int(f.scope.size()) - 1; i >= 0; --i) {
        int val = int(rest % sizes[std::size_t(i)]);
        rest /= sizes[std::size_t(i)];
        VarId v = f.scope[std::size_t(i)];
        if (e.size() == out.var_count() && e.assigned(v) && e.value(v) != val) {
          keep = false;
          break;
        }
      }
      if (!keep) f.table[std::size_t(row)] = 0.0;
    }
  }
  for (int v = 0; v < out.var_count(); ++v)
    if (e.size() == out.var_count() && e.assigned(v))
      out.evidence.set(v, e.value(v));
  return out;
}

}  // namespace andor
