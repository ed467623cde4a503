#pragma once

#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace andor {

using VarId = int;
inline constexpr VarId kNoVar = -1;

enum class Task { SumProduct, Count, Consistency };

const char* task_name(Task t);

// Thrown by parse_model with the 1-based line of the offending token.
struct ModelFormatError : std::runtime_error {
  int line;
  ModelFormatError(int line_, const std::string& what_)
      : std::runtime_error("line " + std::to_string(line_) + ": " + what_),
        line(line_) {}
};

struct SizeGuardError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Domain {
  int size = 0;
  std::vector<std::string> labels;  // optional; when present, one per value
};

// Non-negative real table over an ordered scope of distinct variables.
// Row-major with the LAST scope variable varying fastest.
struct Factor {
  std::vector<VarId> scope;
  std::vector<double> table;
};

// Partial assignment of value indices; -1 marks unassigned variables.
class Assignment {
 public:
  Assignment() = default;
  explicit Assignment(int n) : values_(n, -1) {}

  int size() const { return int(values_.size()); }
  bool assigned(VarId v) const { return values_[v] >= 0; }
  int value(VarId v) const { return values_[v]; }
  void set(VarId v, int x) { values_[v] = x; }
  void clear(VarId v) { values_[v] = -1; }
  bool empty() const {
    for (int x : values_)
      if (x >= 0) return false;
    return true;
  }
  bool operator==(const Assignment&) const = default;

 private:
  std::vector<int> values_;
};

struct Model {
  std::string name = "model";
  std::vector<Domain> domains;
  std::vector<Factor> factors;
  Assignment evidence;

  int var_count() const { return int(domains.size()); }
  int domain_size(VarId v) const { return domains[v].size; }
  long long table_size(const Factor& f) const;
};

struct Graph {
  int n = 0;
  std::vector<std::set<VarId>> adj;

  explicit Graph(int n_ = 0) : n(n_), adj(n_) {}
  void add_edge(VarId u, VarId v) {
    if (u == v) return;
    adj[u].insert(v);
    adj[v].insert(u);
  }
  bool has_edge(VarId u, VarId v) const { return adj[u].count(v) > 0; }
  long long edge_count() const {
    long long c = 0;
    for (const auto& s : adj) c += (long long)s.size();
    return c / 2;
  }
};

// Relation of the consistent (nonzero) rows of a factor table. `allowed`
// parallels the factor's row-major table.
struct FlatRelation {
  std::vector<VarId> scope;
  std::vector<char> allowed;

  long long row_count() const { return (long long)allowed.size(); }
  // decodes row index into per-scope-variable values
  std::vector<int> row_values(long long row,
                              const std::vector<int>& scope_sizes) const;
};

// Line-oriented model file format; see README for the grammar.
Model parse_model(const std::string& text);
std::string render_model(const Model& m);

double evaluate_factor(const Model& m, int factor_id, const Assignment& a);
FlatRelation flat_relation(const Model& m, int factor_id);
bool is_consistent(const Model& m, const Assignment& a);
Graph primal_graph(const Model& m);
bool is_strictly_positive(const Model& m);
Model apply_evidence(const Model& m, const Assignment& e);

// row-major index of `a` restricted to the factor scope; throws if a scope
// variable is unassigned
long long factor_index(const Model& m, const Factor& f, const Assignment& a);

std::vector<int> scope_sizes(const Model& m, const std::vector<VarId>& scope);

}  // namespace andor
