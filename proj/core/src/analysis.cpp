#include "andor/analysis.hpp"

#include <algorithm>
#include <map>
#include <sstream>
#include <stdexcept>

#include "andor/util.hpp"

namespace andor {

namespace {

// full-space odometer; aborts construction when the space exceeds the guard
long long checked_space(const Model& m, const std::vector<VarId>& vars) {
  long long space = 1;
  for (VarId v : vars) {
    space *= m.domain_size(v);
    if (space > kSizeGuard)
      throw SizeGuardError("enumeration space exceeds size guard");
  }
  return space;
}

std::vector<VarId> all_vars(const Model& m) {
  std::vector<VarId> vs(static_cast<std::size_t>(m.var_count()));
  for (int v = 0; v < m.var_count(); ++v) vs[std::size_t(v)] = v;
  return vs;
}

void write_assignment(const ContextCodec& codec, long long code, Assignment& a) {
  std::vector<int> vals = codec.values_of(code);
  for (std::size_t i = 0; i < codec.vars().size(); ++i) a.set(codec.vars()[i], vals[i]);
}

void clear_assignment(const ContextCodec& codec, Assignment& a) {
  for (VarId v : codec.vars()) a.clear(v);
}

// factor ids placed in the bucket of each variable (deepest tree variable)
std::vector<std::vector<int>> tree_buckets(const Model& m, const PseudoTree& t) {
  std::vector<std::vector<int>> bucket(static_cast<std::size_t>(t.var_count()));
  for (int fi = 0; fi < int(m.factors.size()); ++fi) {
    const Factor& f = m.factors[std::size_t(fi)];
    if (f.scope.empty()) {
      bucket[std::size_t(t.root)].push_back(fi);
      continue;
    }
    VarId deepest = f.scope[0];
    for (VarId v : f.scope)
      if (t.depth[std::size_t(v)] > t.depth[std::size_t(deepest)]) deepest = v;
    bucket[std::size_t(deepest)].push_back(fi);
  }
  return bucket;
}

}  // namespace

double brute_force_value(const Model& m, Task task) {
  std::vector<VarId> vars = all_vars(m);
  long long space = checked_space(m, vars);
  ContextCodec codec(m, vars);
  Assignment a(m.var_count());
  double acc = 0.0;
  for (long long code = 0; code < space; ++code) {
    write_assignment(codec, code, a);
    double prod = 1.0;
    for (int fi = 0; fi < int(m.factors.size()) && prod != 0.0; ++fi)
      prod *= evaluate_factor(m, fi, a);
    switch (task) {
      case Task::SumProduct: acc += prod; break;
      case Task::Count: acc += prod != 0.0 ? 1.0 : 0.0; break;
      case Task::Consistency:
        if (prod != 0.0) return 1.0;
        break;
    }
    clear_assignment(codec, a);
  }
  return task == Task::Consistency ? 0.0 : acc;
}

CmGraph build_cm(const Model& m, const PseudoTree& t, const ContextTable& ctx) {
  int n = t.var_count();
  long long total = 0;
  for (VarId v = 0; v < n; ++v) {
    long long cells = m.domain_size(v);
    for (VarId y : ctx.sep[std::size_t(v)]) cells *= m.domain_size(y);
    total += cells;
    if (total > kSizeGuard) throw SizeGuardError("CM graph exceeds size guard");
  }

  CmGraph cm;
  cm.or_nodes = KeySet(n);
  cm.and_nodes = KeySet(n);
  cm.tuples = KeySet(n);

  Assignment a(n);
  for (VarId v = 0; v < n; ++v) {
    ContextCodec sep(m, ctx.sep[std::size_t(v)]);
    ContextCodec andc(m, ctx.and_ctx[std::size_t(v)]);
    std::vector<VarId> tup_vars = ctx.sep[std::size_t(v)];
    tup_vars.push_back(v);
    ContextCodec tup(m, tup_vars);

    for (long long oc = 0; oc < sep.space(); ++oc) {
      cm.or_nodes.add(v, oc);
      write_assignment(sep, oc, a);
      for (int x = 0; x < m.domain_size(v); ++x) {
        a.set(v, x);
        long long ac = andc.code_of(a);
        cm.tuples.add(v, tup.code_of(a));
        if (cm.and_nodes.add(v, ac)) {
          for (VarId c : t.children[std::size_t(v)]) {
            ContextCodec child_sep(m, ctx.sep[std::size_t(c)]);
            cm.child_arcs.push_back({v, ac, c, child_sep.code_of(a)});
          }
        }
        cm.down_arcs.push_back({v, oc, x, ac});
        a.clear(v);
      }
      clear_assignment(sep, a);
    }
  }
  return cm;
}

ExploredSets oracle_explored_sets(const Model& m, const PseudoTree& t,
                                  const ContextTable& ctx) {
  int n = t.var_count();
  ExploredSets out{KeySet(n), KeySet(n), KeySet(n), KeySet(n), KeySet(n)};
  std::vector<std::vector<int>> bucket = tree_buckets(m, t);

  auto bucket_value = [&](VarId v, const Assignment& a) {
    double prod = 1.0;
    for (int fi : bucket[std::size_t(v)]) prod *= evaluate_factor(m, fi, a);
    return prod;
  };

  Assignment a(n);

  // ao: enumerate ancestor assignments, keep prefix-consistent ones
  for (VarId v = 0; v < n; ++v) {
    std::vector<VarId> anc = t.ancestors(v);
    checked_space(m, anc);
    ContextCodec anc_codec(m, anc);
    std::vector<VarId> tup_vars = ctx.sep[std::size_t(v)];
    tup_vars.push_back(v);
    ContextCodec tup(m, tup_vars);
    ContextCodec andc(m, ctx.and_ctx[std::size_t(v)]);

    for (long long pc = 0; pc < anc_codec.space(); ++pc) {
      write_assignment(anc_codec, pc, a);
      bool consistent = true;
      for (VarId y : anc)
        if (bucket_value(y, a) == 0.0) {
          consistent = false;
          break;
        }
      if (consistent) {
        for (int x = 0; x < m.domain_size(v); ++x) {
          a.set(v, x);
          out.ao_tuples.add(v, tup.code_of(a));
          if (bucket_value(v, a) != 0.0) out.ao_nodes.add(v, andc.code_of(a));
          a.clear(v);
        }
      }
      clear_assignment(anc_codec, a);
    }
  }

  // ve: a tuple is kept when every child subtree is consistent below it;
  // memoized top-down recursion over (variable, separator assignment)
  std::vector<ContextCodec> sep_codec;
  sep_codec.reserve(static_cast<std::size_t>(n));
  for (VarId v = 0; v < n; ++v) sep_codec.emplace_back(m, ctx.sep[std::size_t(v)]);
  std::vector<std::map<long long, char>> memo(static_cast<std::size_t>(n));

  auto consistent_below = [&](auto&& self, VarId c, Assignment& b) -> bool {
    long long key = sep_codec[std::size_t(c)].code_of(b);
    auto it = memo[std::size_t(c)].find(key);
    if (it != memo[std::size_t(c)].end()) return it->second != 0;
    bool ok = false;
    for (int x = 0; x < m.domain_size(c) && !ok; ++x) {
      b.set(c, x);
      if (bucket_value(c, b) != 0.0) {
        bool kids = true;
        for (VarId gc : t.children[std::size_t(c)])
          if (!self(self, gc, b)) {
            kids = false;
            break;
          }
        ok = kids;
      }
      b.clear(c);
    }
    memo[std::size_t(c)].emplace(key, ok ? 1 : 0);
    return ok;
  };

  for (VarId v = 0; v < n; ++v) {
    std::vector<VarId> tup_vars = ctx.sep[std::size_t(v)];
    tup_vars.push_back(v);
    checked_space(m, tup_vars);
    ContextCodec tup(m, tup_vars);
    ContextCodec andc(m, ctx.and_ctx[std::size_t(v)]);
    for (long long tc = 0; tc < tup.space(); ++tc) {
      write_assignment(tup, tc, a);
      bool keep = true;
      for (VarId c : t.children[std::size_t(v)])
        if (!consistent_below(consistent_below, c, a)) {
          keep = false;
          break;
        }
      if (keep) {
        out.ve_tuples.add(v, tc);
        out.ve_nodes.add(v, andc.code_of(a));
      }
      clear_assignment(tup, a);
    }
  }

  // bf: nodes of tuples that sit in both sets and lie on a full solution
  std::vector<VarId> vars = all_vars(m);
  long long space = checked_space(m, vars);
  ContextCodec full(m, vars);
  std::vector<ContextCodec> tupc, andcc;
  tupc.reserve(static_cast<std::size_t>(n));
  andcc.reserve(static_cast<std::size_t>(n));
  for (VarId v = 0; v < n; ++v) {
    std::vector<VarId> tv = ctx.sep[std::size_t(v)];
    tv.push_back(v);
    tupc.emplace_back(m, tv);
    andcc.emplace_back(m, ctx.and_ctx[std::size_t(v)]);
  }
  for (long long code = 0; code < space; ++code) {
    write_assignment(full, code, a);
    bool sol = true;
    for (int fi = 0; fi < int(m.factors.size()) && sol; ++fi)
      if (evaluate_factor(m, fi, a) == 0.0) sol = false;
    if (sol) {
      for (VarId v = 0; v < n; ++v) {
        long long tc = tupc[std::size_t(v)].code_of(a);
        if (out.ao_tuples.contains(v, tc) && out.ve_tuples.contains(v, tc))
          out.bf_nodes.add(v, andcc[std::size_t(v)].code_of(a));
      }
    }
    clear_assignment(full, a);
  }
  return out;
}

const char* relation_name(Relation r) {
  switch (r) {
    case Relation::Identical: return "identical";
    case Relation::AStrictSubset: return "a-subset-b";
    case Relation::BStrictSubset: return "b-subset-a";
    case Relation::Incomparable: return "incomparable";
  }
  return "?";
}

CompareResult compare_reports(const RunReport& a, const RunReport& b) {
  if (a.fingerprint != b.fingerprint)
    throw std::invalid_argument("reports come from different models or trees");
  CompareResult r;
  for (std::size_t v = 0; v < a.tuples.by_var.size(); ++v) {
    for (long long c : a.tuples.by_var[v])
      (b.tuples.by_var[v].count(c) ? r.both : r.only_a)++;
    for (long long c : b.tuples.by_var[v])
      if (!a.tuples.by_var[v].count(c)) r.only_b++;
  }
  if (r.only_a == 0 && r.only_b == 0) r.relation = Relation::Identical;
  else if (r.only_a == 0) r.relation = Relation::AStrictSubset;
  else if (r.only_b == 0) r.relation = Relation::BStrictSubset;
  else r.relation = Relation::Incomparable;
  return r;
}

std::string export_dot(const Model& m, const PseudoTree& t, const ContextTable& ctx,
                       const CmGraph& cm, const RunReport* marks) {
  int n = t.var_count();
  (void)m;

  // explored OR nodes are those with at least one explored tuple
  KeySet or_explored(n);
  if (marks) {
    std::vector<ContextCodec> tupc;
    tupc.reserve(static_cast<std::size_t>(n));
    for (VarId v = 0; v < n; ++v) {
      std::vector<VarId> tv = ctx.sep[std::size_t(v)];
      tv.push_back(v);
      tupc.emplace_back(m, tv);
    }
    for (VarId v = 0; v < n; ++v)
      for (long long code : marks->tuples.by_var[std::size_t(v)])
        or_explored.add(v, code / m.domain_size(v));
  }

  std::map<std::pair<VarId, long long>, std::string> or_id, and_id;
  std::ostringstream out;
  out << "digraph cm {\n";
  out << "  rankdir=TB;\n";
  int oc = 0, acount = 0;
  for (VarId v = 0; v < n; ++v) {
    for (long long code : cm.or_nodes.by_var[std::size_t(v)]) {
      std::string id = "o" + std::to_string(oc++);
      or_id[{v, code}] = id;
      bool dashed = marks && !or_explored.contains(v, code);
      out << "  " << id << " [shape=ellipse, label=\"X" << v << "\""
          << (dashed ? ", style=dashed" : "") << "];\n";
    }
  }
  for (VarId v = 0; v < n; ++v) {
    for (long long code : cm.and_nodes.by_var[std::size_t(v)]) {
      std::string id = "a" + std::to_string(acount++);
      and_id[{v, code}] = id;
      ContextCodec andc(m, ctx.and_ctx[std::size_t(v)]);
      std::vector<int> vals = andc.values_of(code);
      int x = vals.back();  // the variable itself is last in its and-context
      bool dashed = marks && !marks->nodes.contains(v, code);
      out << "  " << id << " [shape=box, label=\"X" << v << "=" << x << "\""
          << (dashed ? ", style=dashed" : "") << "];\n";
    }
  }
  std::vector<CmGraph::OrToAnd> down = cm.down_arcs;
  std::sort(down.begin(), down.end(), [](const auto& a, const auto& b) {
    return std::tie(a.var, a.or_code, a.value) < std::tie(b.var, b.or_code, b.value);
  });
  for (const auto& arc : down)
    out << "  " << or_id[{arc.var, arc.or_code}] << " -> "
        << and_id[{arc.var, arc.and_code}] << ";\n";
  std::vector<CmGraph::AndToOr> childs = cm.child_arcs;
  std::sort(childs.begin(), childs.end(), [](const auto& a, const auto& b) {
    return std::tie(a.var, a.and_code, a.child, a.child_or_code) <
           std::tie(b.var, b.and_code, b.child, b.child_or_code);
  });
  for (const auto& arc : childs)
    out << "  " << and_id[{arc.var, arc.and_code}] << " -> "
        << or_id[{arc.child, arc.child_or_code}] << ";\n";
  out << "}\n";
  return out.str();
}

}  // namespace andor
