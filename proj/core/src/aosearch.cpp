#include "andor/aosearch.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>
#include <unordered_map>

#include "andor/util.hpp"

namespace andor {

DomainMask DomainMask::full(const Model& m) {
  DomainMask d;
  d.allow.resize(static_cast<std::size_t>(m.var_count()));
  for (int v = 0; v < m.var_count(); ++v)
    d.allow[std::size_t(v)].assign(static_cast<std::size_t>(m.domain_size(v)), 1);
  return d;
}

int DomainMask::count(VarId v) const {
  int c = 0;
  for (char b : allow[std::size_t(v)]) c += b != 0;
  return c;
}

std::vector<int> DomainMask::values(VarId v) const {
  std::vector<int> out;
  for (int x = 0; x < int(allow[std::size_t(v)].size()); ++x)
    if (allow[std::size_t(v)][std::size_t(x)]) out.push_back(x);
  return out;
}

namespace {

std::vector<int> relation_sizes(const FlatRelation& r,
                                const std::vector<int>& domain_sizes) {
  std::vector<int> s;
  s.reserve(r.scope.size());
  for (VarId v : r.scope) s.push_back(domain_sizes[std::size_t(v)]);
  return s;
}

}  // namespace

std::optional<DomainMask> propagate_fc(const std::vector<FlatRelation>& relations,
                                       const DomainMask& domains,
                                       const Assignment& a,
                                       const std::vector<int>& domain_sizes) {
  DomainMask out = domains;
  for (const FlatRelation& r : relations) {
    VarId open = kNoVar;
    int open_idx = -1;
    bool skip = false;
    for (int i = 0; i < int(r.scope.size()); ++i) {
      if (!a.assigned(r.scope[std::size_t(i)])) {
        if (open != kNoVar) {
          skip = true;
          break;
        }
        open = r.scope[std::size_t(i)];
        open_idx = i;
      }
    }
    if (skip || open == kNoVar) continue;

    std::vector<int> sizes = relation_sizes(r, domain_sizes);
    std::vector<char> supported(static_cast<std::size_t>(domain_sizes[std::size_t(open)]), 0);
    for (long long row = 0; row < r.row_count(); ++row) {
      if (!r.allowed[std::size_t(row)]) continue;
      std::vector<int> vals = r.row_values(row, sizes);
      bool match = true;
      for (int i = 0; i < int(r.scope.size()); ++i) {
        if (i == open_idx) continue;
        if (a.value(r.scope[std::size_t(i)]) != vals[std::size_t(i)]) {
          match = false;
          break;
        }
      }
      if (match) supported[std::size_t(vals[std::size_t(open_idx)])] = 1;
    }
    for (int x = 0; x < domain_sizes[std::size_t(open)]; ++x)
      if (!supported[std::size_t(x)]) out.forbid(open, x);
  }
  for (int v = 0; v < int(domain_sizes.size()); ++v)
    if (!a.assigned(v) && out.count(v) == 0) return std::nullopt;
  return out;
}

std::optional<DomainMask> propagate_ac(const std::vector<FlatRelation>& relations,
                                       const DomainMask& domains,
                                       const std::vector<int>& domain_sizes) {
  DomainMask out = domains;
  bool changed = true;
  while (changed) {
    changed = false;
    for (const FlatRelation& r : relations) {
      if (r.scope.empty()) continue;
      std::vector<int> sizes = relation_sizes(r, domain_sizes);
      for (int i = 0; i < int(r.scope.size()); ++i) {
        VarId v = r.scope[std::size_t(i)];
        for (int x = 0; x < sizes[std::size_t(i)]; ++x) {
          if (!out.allowed(v, x)) continue;
          bool supported = false;
          for (long long row = 0; row < r.row_count() && !supported; ++row) {
            if (!r.allowed[std::size_t(row)]) continue;
            std::vector<int> vals = r.row_values(row, sizes);
            if (vals[std::size_t(i)] != x) continue;
            bool ok = true;
            for (int j = 0; j < int(r.scope.size()); ++j)
              if (!out.allowed(r.scope[std::size_t(j)], vals[std::size_t(j)])) {
                ok = false;
                break;
              }
            if (ok) supported = true;
          }
          if (!supported) {
            out.forbid(v, x);
            changed = true;
          }
        }
        if (out.count(v) == 0) return std::nullopt;
      }
    }
  }
  return out;
}

namespace {

double lift(Task task, double v) {
  if (task == Task::SumProduct) return v;
  return v != 0.0 ? 1.0 : 0.0;
}

double marginalize(Task task, double acc, double v) {
  if (task == Task::Consistency) return std::max(acc, v);
  return acc + v;
}

// Work area shared by the depth-first and breadth-first traversals. Both
// sides compute domains and consistency checks as pure functions of node
// contexts, which is what makes their explored sets coincide.
struct AoEngine {
  const Model& m;
  const PseudoTree& t;
  Task task;
  AoOptions opts;
  int n;

  Graph g;
  ContextTable ctx;
  std::vector<ContextCodec> sep_codec, and_codec, tuple_codec;
  std::vector<std::vector<int>> bucket;  // factor ids by deepest tree variable
  std::vector<FlatRelation> base_relations;
  std::vector<int> domain_sizes;
  std::vector<char> cache_live;  // neither root nor dead cache

  // zero-valued OR contexts discovered so far, by variable (no-goods)
  std::vector<std::set<long long>> nogoods;

  // graph-based induced ancestor sets (gbj)
  std::vector<std::set<VarId>> induced;

  RunReport rep;

  // memoized lookahead results; invalid once no-goods join the relations
  std::unordered_map<long long, std::vector<int>> dom_memo;
  std::unordered_map<long long, char> check_memo;

  AoEngine(const Model& m_, const PseudoTree& t_, Task task_, AoOptions o)
      : m(m_), t(t_), task(task_), opts(o), n(m_.var_count()) {
    if (opts.lookahead_uses_nogoods &&
        (opts.lookahead == Lookahead::None || opts.caching != AoCaching::Full))
      throw std::invalid_argument(
          "lookahead_uses_nogoods requires lookahead and full caching");
    g = primal_graph(m);
    if (!validate_pseudo_tree(t, g))
      throw std::invalid_argument("pseudo tree does not cover the primal graph");
    ctx = make_contexts(t, g);
    sep_codec.reserve(static_cast<std::size_t>(n));
    and_codec.reserve(static_cast<std::size_t>(n));
    tuple_codec.reserve(static_cast<std::size_t>(n));
    for (VarId v = 0; v < n; ++v) {
      sep_codec.emplace_back(m, ctx.sep[std::size_t(v)]);
      and_codec.emplace_back(m, ctx.and_ctx[std::size_t(v)]);
      std::vector<VarId> tup = ctx.sep[std::size_t(v)];
      tup.push_back(v);
      tuple_codec.emplace_back(m, tup);
    }
    bucket.assign(static_cast<std::size_t>(n), {});
    for (int fi = 0; fi < int(m.factors.size()); ++fi) {
      const Factor& f = m.factors[std::size_t(fi)];
      if (f.scope.empty()) {
        bucket[std::size_t(t.root)].push_back(fi);
        continue;
      }
      VarId deepest = f.scope[0];
      for (VarId v : f.scope)
        if (t.depth[std::size_t(v)] > t.depth[std::size_t(deepest)]) deepest = v;
      for (VarId v : f.scope)
        if (v != deepest && !t.is_ancestor(v, deepest))
          throw std::invalid_argument("factor scope is not on one tree path");
      bucket[std::size_t(deepest)].push_back(fi);
    }
    if (opts.lookahead != Lookahead::None) {
      base_relations.reserve(m.factors.size());
      for (int fi = 0; fi < int(m.factors.size()); ++fi)
        base_relations.push_back(flat_relation(m, fi));
    }
    domain_sizes.resize(static_cast<std::size_t>(n));
    for (VarId v = 0; v < n; ++v) domain_sizes[std::size_t(v)] = m.domain_size(v);

    cache_live.assign(static_cast<std::size_t>(n), 0);
    std::set<VarId> dead = dead_cache_vars(t, ctx);
    for (VarId v = 0; v < n; ++v)
      cache_live[std::size_t(v)] = (v != t.root && !dead.count(v)) ? 1 : 0;

    nogoods.assign(static_cast<std::size_t>(n), {});
    if (opts.gbj) {
      induced.assign(static_cast<std::size_t>(n), {});
      for (VarId v = 0; v < n; ++v)
        for (VarId a : t.ancestors(v))
          if (g.has_edge(a, v)) induced[std::size_t(v)].insert(a);
    }

    rep.task = task;
    rep.tuples = KeySet(n);
    rep.nodes = KeySet(n);
    rep.cache_hits_by_var.assign(static_cast<std::size_t>(n), 0);
    rep.cache_entries_by_var.assign(static_cast<std::size_t>(n), 0);
    rep.and_visits_by_var.assign(static_cast<std::size_t>(n), 0);
    rep.fingerprint = run_fingerprint(m, t);
  }

  double label_at(VarId x, const Assignment& a) const {
    double prod = 1.0;
    for (int fi : bucket[std::size_t(x)]) prod *= evaluate_factor(m, fi, a);
    return prod;
  }

  void record_tuple(VarId x, const Assignment& a, double label) {
    long long code = tuple_codec[std::size_t(x)].code_of(a);
    rep.counters.tuples_evaluated++;
    if (rep.tuples.add(x, code))
      rep.trace.push_back(
          {x, sep_codec[std::size_t(x)].code_of(a), a.value(x), label});
  }

  std::vector<FlatRelation> active_relations() const {
    std::vector<FlatRelation> rels = base_relations;
    if (opts.lookahead_uses_nogoods) {
      for (VarId v = 0; v < n; ++v) {
        if (nogoods[std::size_t(v)].empty()) continue;
        FlatRelation r;
        r.scope = ctx.sep[std::size_t(v)];
        r.allowed.assign(static_cast<std::size_t>(sep_codec[std::size_t(v)].space()), 1);
        for (long long code : nogoods[std::size_t(v)])
          r.allowed[std::size_t(code)] = 0;
        rels.push_back(std::move(r));
      }
    }
    return rels;
  }

  std::optional<DomainMask> la_run(const std::vector<VarId>& vars,
                                   const std::vector<int>& vals) const {
    DomainMask mask = DomainMask::full(m);
    Assignment a(n);
    for (std::size_t i = 0; i < vars.size(); ++i) a.set(vars[i], vals[i]);
    std::vector<FlatRelation> rels = active_relations();
    if (opts.lookahead == Lookahead::FC)
      return propagate_fc(rels, mask, a, domain_sizes);
    for (std::size_t i = 0; i < vars.size(); ++i) {
      auto& row = mask.allow[std::size_t(vars[i])];
      std::fill(row.begin(), row.end(), 0);
      row[std::size_t(vals[i])] = 1;
    }
    return propagate_ac(rels, mask, domain_sizes);
  }

  bool memo_usable() const { return !opts.lookahead_uses_nogoods; }

  // values of X surviving propagation conditioned on its separator context
  std::vector<int> or_domain(VarId X, const Assignment& path) {
    if (opts.lookahead == Lookahead::None) {
      std::vector<int> all(static_cast<std::size_t>(m.domain_size(X)));
      for (int i = 0; i < int(all.size()); ++i) all[std::size_t(i)] = i;
      return all;
    }
    long long key = 0;
    if (memo_usable()) {
      key = (long long)X * (1ll << 40) + sep_codec[std::size_t(X)].code_of(path);
      auto it = dom_memo.find(key);
      if (it != dom_memo.end()) return it->second;
    }
    const std::vector<VarId>& vars = ctx.sep[std::size_t(X)];
    std::vector<int> vals;
    vals.reserve(vars.size());
    for (VarId v : vars) vals.push_back(path.value(v));
    auto mask = la_run(vars, vals);
    std::vector<int> dom = mask ? mask->values(X) : std::vector<int>{};
    if (memo_usable()) dom_memo.emplace(key, dom);
    return dom;
  }

  // propagation check for the AND node X=x; false on conflict
  bool and_alive(VarId X, const Assignment& path) {
    if (opts.lookahead == Lookahead::None) return true;
    long long key = 0;
    if (memo_usable()) {
      key = (long long)X * (1ll << 40) + tuple_codec[std::size_t(X)].code_of(path);
      auto it = check_memo.find(key);
      if (it != check_memo.end()) return it->second != 0;
    }
    std::vector<VarId> vars = ctx.sep[std::size_t(X)];
    vars.push_back(X);
    std::vector<int> vals;
    vals.reserve(vars.size());
    for (VarId v : vars) vals.push_back(path.value(v));
    bool ok = la_run(vars, vals).has_value();
    if (memo_usable()) check_memo.emplace(key, ok ? 1 : 0);
    return ok;
  }
};

// ----- depth-first -----

struct DfRunner {
  AoEngine& e;
  std::vector<std::map<long long, double>> cache;
  Assignment path;

  explicit DfRunner(AoEngine& e_) : e(e_), cache(std::size_t(e_.n)), path(e_.n) {}

  // deepest induced ancestor; absorbs the source's set into the target.
  // Returns kNoVar when the jump degenerates to a plain backtrack.
  VarId jump_from(VarId X) {
    if (!e.opts.gbj) return kNoVar;
    VarId p = e.t.parent[std::size_t(X)];
    if (p == kNoVar) return kNoVar;
    const std::set<VarId>& anc = e.induced[std::size_t(X)];
    if (anc.empty()) return kNoVar;
    VarId target = kNoVar;
    for (VarId y : anc)
      if (target == kNoVar ||
          e.t.depth[std::size_t(y)] > e.t.depth[std::size_t(target)])
        target = y;
    for (VarId y : anc)
      if (y != target) e.induced[std::size_t(target)].insert(y);
    return target == p ? kNoVar : target;
  }

  void absorb_sep(VarId X) {
    if (!e.opts.gbj) return;
    for (VarId y : e.ctx.sep[std::size_t(X)]) e.induced[std::size_t(X)].insert(y);
  }

  struct OrResult {
    double value;
    VarId jump;  // kNoVar: none
  };

  OrResult solve_or(VarId X) {
    long long sep_code = e.sep_codec[std::size_t(X)].code_of(path);
    if (e.opts.caching == AoCaching::Full && e.cache_live[std::size_t(X)]) {
      auto it = cache[std::size_t(X)].find(sep_code);
      if (it != cache[std::size_t(X)].end()) {
        e.rep.counters.cache_hits++;
        e.rep.cache_hits_by_var[std::size_t(X)]++;
        if (e.opts.gbj && it->second == 0.0) return {0.0, jump_from(X)};
        return {it->second, kNoVar};
      }
    }
    e.rep.counters.or_expansions++;

    std::vector<int> dom = e.or_domain(X, path);
    if (int(dom.size()) < e.m.domain_size(X)) absorb_sep(X);

    double acc = 0.0;
    VarId pending = kNoVar;
    for (int x : dom) {
      path.set(X, x);
      double label = e.label_at(X, path);
      e.record_tuple(X, path, label);
      if (label != 0.0) {
        if (!e.and_alive(X, path)) {
          absorb_sep(X);
        } else {
          e.rep.nodes.add(X, e.and_codec[std::size_t(X)].code_of(path));
          e.rep.and_visits_by_var[std::size_t(X)]++;
          double and_val = 1.0;
          for (VarId c : e.t.children[std::size_t(X)]) {
            OrResult r = solve_or(c);
            and_val *= r.value;
            if (r.jump != kNoVar && r.jump != X) {
              // jump passes through: remaining children belong to a region
              // that is zero-valued anyway
              pending = r.jump;
              and_val = 0.0;
              break;
            }
          }
          acc = marginalize(e.task, acc, lift(e.task, label) * and_val);
        }
      }
      path.clear(X);
      if (pending != kNoVar) return {acc, pending};  // abandoned: not cached
    }

    if (e.opts.caching == AoCaching::Full && e.cache_live[std::size_t(X)]) {
      cache[std::size_t(X)].emplace(sep_code, acc);
      e.rep.counters.cache_entries_stored++;
      e.rep.cache_entries_by_var[std::size_t(X)]++;
    }
    if (e.opts.lookahead_uses_nogoods && acc == 0.0)
      e.nogoods[std::size_t(X)].insert(sep_code);
    if (acc == 0.0) return {0.0, jump_from(X)};
    return {acc, kNoVar};
  }
};

// ----- breadth-first -----

struct BfRunner {
  AoEngine& e;
  // per variable: context code -> computed value; key is the separator
  // context under full caching and the whole ancestor set otherwise
  std::vector<ContextCodec> key_codec;
  std::vector<std::map<long long, double>> layer;

  explicit BfRunner(AoEngine& e_) : e(e_), layer(std::size_t(e_.n)) {
    key_codec.reserve(static_cast<std::size_t>(e_.n));
    for (VarId v = 0; v < e.n; ++v) {
      if (e.opts.caching == AoCaching::Full) {
        key_codec.push_back(e.sep_codec[std::size_t(v)]);
      } else {
        std::vector<VarId> anc = e.t.ancestors(v);
        key_codec.emplace_back(e.m, anc);
      }
    }
  }

  double run() {
    std::vector<VarId> order(static_cast<std::size_t>(e.n));
    for (int v = 0; v < e.n; ++v) order[std::size_t(v)] = v;
    std::sort(order.begin(), order.end(), [&](VarId a, VarId b) {
      if (e.t.depth[std::size_t(a)] != e.t.depth[std::size_t(b)])
        return e.t.depth[std::size_t(a)] < e.t.depth[std::size_t(b)];
      return a < b;
    });

    layer[std::size_t(e.t.root)].emplace(0, 0.0);

    Assignment a(e.n);
    // top-down expansion
    for (VarId X : order) {
      for (auto& [key, value] : layer[std::size_t(X)]) {
        (void)value;
        e.rep.counters.or_expansions++;
        set_context(X, key, a);
        std::vector<int> dom = e.or_domain(X, a);
        for (int x : dom) {
          a.set(X, x);
          double label = e.label_at(X, a);
          e.record_tuple(X, a, label);
          if (label != 0.0 && e.and_alive(X, a)) {
            e.rep.nodes.add(X, e.and_codec[std::size_t(X)].code_of(a));
            e.rep.and_visits_by_var[std::size_t(X)]++;
            for (VarId c : e.t.children[std::size_t(X)]) {
              long long ck = key_codec[std::size_t(c)].code_of(a);
              if (!layer[std::size_t(c)].emplace(ck, 0.0).second) {
                e.rep.counters.cache_hits++;
                e.rep.cache_hits_by_var[std::size_t(c)]++;
              }
            }
          }
          a.clear(X);
        }
        clear_context(X, a);
      }
    }

    // bottom-up values
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      VarId X = *it;
      for (auto& [key, value] : layer[std::size_t(X)]) {
        set_context(X, key, a);
        std::vector<int> dom = e.or_domain(X, a);
        double acc = 0.0;
        for (int x : dom) {
          a.set(X, x);
          double label = e.label_at(X, a);
          if (label != 0.0 && e.and_alive(X, a)) {
            double and_val = 1.0;
            for (VarId c : e.t.children[std::size_t(X)])
              and_val *= layer[std::size_t(c)].at(key_codec[std::size_t(c)].code_of(a));
            acc = marginalize(e.task, acc, lift(e.task, label) * and_val);
          }
          a.clear(X);
        }
        clear_context(X, a);
        value = acc;
      }
      if (e.cache_live[std::size_t(X)]) {
        e.rep.counters.cache_entries_stored += (long long)layer[std::size_t(X)].size();
        e.rep.cache_entries_by_var[std::size_t(X)] += (long long)layer[std::size_t(X)].size();
      }
    }
    return layer[std::size_t(e.t.root)].at(0);
  }

  void set_context(VarId X, long long key, Assignment& a) {
    const auto& vars = key_codec[std::size_t(X)].vars();
    std::vector<int> vals = key_codec[std::size_t(X)].values_of(key);
    for (std::size_t i = 0; i < vars.size(); ++i) a.set(vars[i], vals[i]);
  }

  void clear_context(VarId X, Assignment& a) {
    for (VarId v : key_codec[std::size_t(X)].vars()) a.clear(v);
  }
};

}  // namespace

double arc_label(const Model& m, const PseudoTree& t, VarId x, const Assignment& a) {
  double prod = 1.0;
  for (int fi = 0; fi < int(m.factors.size()); ++fi) {
    const Factor& f = m.factors[std::size_t(fi)];
    bool mine = false;
    if (f.scope.empty()) {
      mine = (x == t.root);
    } else {
      VarId deepest = f.scope[0];
      for (VarId v : f.scope)
        if (t.depth[std::size_t(v)] > t.depth[std::size_t(deepest)]) deepest = v;
      mine = (deepest == x);
    }
    if (mine) prod *= evaluate_factor(m, fi, a);
  }
  return prod;
}

RunReport ao_df(const Model& m, const PseudoTree& t, Task task, AoOptions opts) {
  AoEngine engine(m, t, task, opts);
  DfRunner runner(engine);
  DfRunner::OrResult r = runner.solve_or(t.root);
  engine.rep.value = r.value;
  engine.rep.counters.peak_live_table_entries = engine.rep.counters.cache_entries_stored;
  return std::move(engine.rep);
}

RunReport ao_bf(const Model& m, const PseudoTree& t, Task task, AoOptions opts) {
  if (opts.gbj) throw std::invalid_argument("backjumping is depth-first only");
  // breadth-first discovers values only after expansion, so search no-goods
  // never reach its propagation
  opts.lookahead_uses_nogoods = false;
  AoEngine engine(m, t, task, opts);
  BfRunner runner(engine);
  engine.rep.value = runner.run();
  engine.rep.counters.peak_live_table_entries = engine.rep.counters.cache_entries_stored;
  return std::move(engine.rep);
}

}  // namespace andor
