#include "andor/structure.hpp"

#include <algorithm>
#include <stdexcept>

namespace andor {

Ordering Ordering::of(std::vector<VarId> vars) {
  Ordering d;
  d.order = std::move(vars);
  int n = int(d.order.size());
  d.pos.assign(static_cast<std::size_t>(n), -1);
  for (int p = 0; p < n; ++p) {
    VarId v = d.order[std::size_t(p)];
    if (v < 0 || v >= n || d.pos[std::size_t(v)] != -1)
      throw std::invalid_argument("ordering is not a permutation");
    d.pos[std::size_t(v)] = p;
  }
  return d;
}

Ordering Ordering::identity(int n) {
  std::vector<VarId> v(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) v[std::size_t(i)] = i;
  return Ordering::of(std::move(v));
}

InducedGraph induced_graph(const Graph& g, const Ordering& d) {
  if (g.n != d.size()) throw std::invalid_argument("ordering/graph size mismatch");
  InducedGraph ig{g, 0};
  for (int p = g.n - 1; p >= 0; --p) {
    VarId x = d.order[std::size_t(p)];
    std::vector<VarId> earlier;
    for (VarId y : ig.graph.adj[std::size_t(x)])
      if (d.pos[std::size_t(y)] < p) earlier.push_back(y);
    ig.width = std::max(ig.width, int(earlier.size()));
    for (std::size_t i = 0; i < earlier.size(); ++i)
      for (std::size_t j = i + 1; j < earlier.size(); ++j)
        ig.graph.add_edge(earlier[i], earlier[j]);
  }
  return ig;
}

BucketTree build_bucket_tree(const Model& m, const Ordering& d) {
  int n = m.var_count();
  if (d.size() != n) throw std::invalid_argument("ordering/model size mismatch");
  BucketTree bt;
  bt.ordering = d;
  bt.parent.assign(static_cast<std::size_t>(n), kNoVar);
  bt.placed_factors.assign(static_cast<std::size_t>(n), {});
  bt.message_scope.assign(static_cast<std::size_t>(n), {});

  for (int fi = 0; fi < int(m.factors.size()); ++fi) {
    const Factor& f = m.factors[std::size_t(fi)];
    if (f.scope.empty()) {
      // constant factor lands in the root-most bucket
      bt.placed_factors[std::size_t(d.order[0])].push_back(fi);
      continue;
    }
    VarId latest = f.scope[0];
    for (VarId v : f.scope)
      if (d.pos[std::size_t(v)] > d.pos[std::size_t(latest)]) latest = v;
    bt.placed_factors[std::size_t(latest)].push_back(fi);
  }

  // symbolic scopes, processed from the last position up
  std::vector<std::set<VarId>> bucket_scope(static_cast<std::size_t>(n));
  for (int fi = 0; fi < int(m.factors.size()); ++fi)
    for (VarId v : m.factors[std::size_t(fi)].scope) {
      VarId latest = v;
      for (VarId w : m.factors[std::size_t(fi)].scope)
        if (d.pos[std::size_t(w)] > d.pos[std::size_t(latest)]) latest = w;
      bucket_scope[std::size_t(latest)].insert(v);
    }

  for (int p = n - 1; p >= 0; --p) {
    VarId x = d.order[std::size_t(p)];
    std::set<VarId> scope = bucket_scope[std::size_t(x)];
    scope.erase(x);
    if (!scope.empty()) {
      VarId parent = *scope.begin();
      for (VarId v : scope)
        if (d.pos[std::size_t(v)] > d.pos[std::size_t(parent)]) parent = v;
      bt.parent[std::size_t(x)] = parent;
      for (VarId v : scope) bucket_scope[std::size_t(parent)].insert(v);
    }
    std::vector<VarId> sc(scope.begin(), scope.end());
    std::sort(sc.begin(), sc.end(), [&](VarId a, VarId b) {
      return d.pos[std::size_t(a)] < d.pos[std::size_t(b)];
    });
    bt.message_scope[std::size_t(x)] = std::move(sc);
  }
  return bt;
}

namespace {

void finish_tree(PseudoTree& t, const std::vector<int>* child_order_key) {
  int n = t.var_count();
  t.children.assign(static_cast<std::size_t>(n), {});
  t.root = kNoVar;
  for (VarId v = 0; v < n; ++v) {
    if (t.parent[std::size_t(v)] == kNoVar) {
      if (t.root != kNoVar) throw std::invalid_argument("pseudo tree has two roots");
      t.root = v;
    } else {
      t.children[std::size_t(t.parent[std::size_t(v)])].push_back(v);
    }
  }
  if (t.root == kNoVar) throw std::invalid_argument("pseudo tree has no root");
  for (auto& ch : t.children)
    std::sort(ch.begin(), ch.end(), [&](VarId a, VarId b) {
      if (child_order_key)
        return (*child_order_key)[std::size_t(a)] < (*child_order_key)[std::size_t(b)];
      return a < b;
    });
  t.depth.assign(static_cast<std::size_t>(n), -1);
  std::vector<VarId> stack{t.root};
  t.depth[std::size_t(t.root)] = 0;
  int visited = 0;
  while (!stack.empty()) {
    VarId x = stack.back();
    stack.pop_back();
    ++visited;
    for (VarId c : t.children[std::size_t(x)]) {
      t.depth[std::size_t(c)] = t.depth[std::size_t(x)] + 1;
      stack.push_back(c);
    }
  }
  if (visited != n) throw std::invalid_argument("pseudo tree has a cycle");
}

}  // namespace

bool PseudoTree::is_ancestor(VarId anc, VarId x) const {
  for (VarId p = parent[std::size_t(x)]; p != kNoVar; p = parent[std::size_t(p)])
    if (p == anc) return true;
  return false;
}

std::vector<VarId> PseudoTree::ancestors(VarId x) const {
  std::vector<VarId> a;
  for (VarId p = parent[std::size_t(x)]; p != kNoVar; p = parent[std::size_t(p)])
    a.push_back(p);
  std::reverse(a.begin(), a.end());
  return a;
}

PseudoTree pseudo_tree_of(const BucketTree& bt) {
  int n = int(bt.parent.size());
  PseudoTree t;
  t.parent = bt.parent;
  // single root: earliest root-candidate in the ordering wins, others attach
  VarId root = kNoVar;
  for (int p = 0; p < n; ++p) {
    VarId v = bt.ordering.order[std::size_t(p)];
    if (t.parent[std::size_t(v)] == kNoVar) {
      root = v;
      break;
    }
  }
  for (VarId v = 0; v < n; ++v)
    if (v != root && t.parent[std::size_t(v)] == kNoVar) t.parent[std::size_t(v)] = root;
  finish_tree(t, &bt.ordering.pos);
  return t;
}

PseudoTree make_pseudo_tree(std::vector<VarId> parent) {
  PseudoTree t;
  t.parent = std::move(parent);
  finish_tree(t, nullptr);
  return t;
}

PseudoTree dfs_pseudo_tree(const Graph& g, VarId root) {
  PseudoTree t;
  t.parent.assign(static_cast<std::size_t>(g.n), kNoVar);
  std::vector<char> seen(static_cast<std::size_t>(g.n), 0);
  VarId first_root = kNoVar;

  auto dfs = [&](auto&& self, VarId x) -> void {
    seen[std::size_t(x)] = 1;
    for (VarId y : g.adj[std::size_t(x)])
      if (!seen[std::size_t(y)]) {
        t.parent[std::size_t(y)] = x;
        self(self, y);
      }
  };

  if (g.n > 0) {
    first_root = root;
    dfs(dfs, root);
    for (VarId v = 0; v < g.n; ++v)
      if (!seen[std::size_t(v)]) {
        t.parent[std::size_t(v)] = first_root;  // disconnected component
        dfs(dfs, v);
      }
  }
  finish_tree(t, nullptr);
  return t;
}

bool validate_pseudo_tree(const PseudoTree& t, const Graph& g) {
  if (t.var_count() != g.n) return false;
  for (VarId u = 0; u < g.n; ++u)
    for (VarId v : g.adj[std::size_t(u)]) {
      if (u > v) continue;
      if (t.parent[std::size_t(u)] == v || t.parent[std::size_t(v)] == u) continue;
      if (!t.is_ancestor(u, v) && !t.is_ancestor(v, u)) return false;
    }
  return true;
}

namespace {

// marks x and its descendants
std::vector<char> subtree_mask(const PseudoTree& t, VarId x) {
  std::vector<char> in(static_cast<std::size_t>(t.var_count()), 0);
  std::vector<VarId> stack{x};
  while (!stack.empty()) {
    VarId y = stack.back();
    stack.pop_back();
    in[std::size_t(y)] = 1;
    for (VarId c : t.children[std::size_t(y)]) stack.push_back(c);
  }
  return in;
}

bool adjacent_to_marked(const Graph& g, VarId y, const std::vector<char>& mask) {
  for (VarId z : g.adj[std::size_t(y)])
    if (mask[std::size_t(z)]) return true;
  return false;
}

}  // namespace

std::vector<VarId> separator_context(const PseudoTree& t, const Graph& g, VarId x) {
  std::vector<char> sub = subtree_mask(t, x);
  std::vector<VarId> out;
  for (VarId y : t.ancestors(x))
    if (adjacent_to_marked(g, y, sub)) out.push_back(y);
  return out;  // ancestors() is already root-to-leaf
}

std::vector<VarId> and_context(const PseudoTree& t, const Graph& g, VarId x) {
  std::vector<char> sub = subtree_mask(t, x);
  sub[std::size_t(x)] = 0;  // strict descendants only
  std::vector<VarId> out;
  for (VarId y : t.ancestors(x))
    if (adjacent_to_marked(g, y, sub)) out.push_back(y);
  out.push_back(x);
  return out;
}

ContextTable make_contexts(const PseudoTree& t, const Graph& g) {
  ContextTable ctx;
  int n = t.var_count();
  ctx.sep.resize(static_cast<std::size_t>(n));
  ctx.and_ctx.resize(static_cast<std::size_t>(n));
  for (VarId v = 0; v < n; ++v) {
    ctx.sep[std::size_t(v)] = separator_context(t, g, v);
    ctx.and_ctx[std::size_t(v)] = and_context(t, g, v);
  }
  return ctx;
}

std::set<VarId> dead_cache_vars(const PseudoTree& t, const ContextTable& ctx) {
  std::set<VarId> dead;
  for (VarId x = 0; x < t.var_count(); ++x) {
    VarId p = t.parent[std::size_t(x)];
    if (p == kNoVar) continue;
    std::set<VarId> mine(ctx.sep[std::size_t(x)].begin(), ctx.sep[std::size_t(x)].end());
    bool covers = mine.count(p) > 0;
    for (VarId y : ctx.sep[std::size_t(p)])
      if (!mine.count(y)) {
        covers = false;
        break;
      }
    if (covers) dead.insert(x);
  }
  return dead;
}

TreeStats tree_stats(const Model& m, const Ordering& d) {
  Graph g = primal_graph(m);
  InducedGraph ig = induced_graph(g, d);
  BucketTree bt = build_bucket_tree(m, d);
  PseudoTree t = pseudo_tree_of(bt);
  ContextTable ctx = make_contexts(t, g);

  TreeStats s;
  s.width = ig.width;
  for (VarId v = 0; v < t.var_count(); ++v)
    s.depth = std::max(s.depth, t.depth[std::size_t(v)]);
  for (VarId v = 0; v < t.var_count(); ++v) {
    long long cells = 1;
    for (VarId y : ctx.sep[std::size_t(v)]) cells *= m.domain_size(y);
    s.cm_bound += cells;
  }
  s.is_dfs_tree = validate_pseudo_tree(t, g);
  if (s.is_dfs_tree) {
    for (VarId v = 0; v < t.var_count() && s.is_dfs_tree; ++v) {
      VarId p = t.parent[std::size_t(v)];
      if (p == kNoVar) continue;
      std::vector<char> sub = subtree_mask(t, v);
      if (!adjacent_to_marked(g, p, sub)) s.is_dfs_tree = false;
    }
  }
  return s;
}

}  // namespace andor
