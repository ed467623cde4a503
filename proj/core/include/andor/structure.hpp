#pragma once

#include <set>
#include <vector>

#include "andor/model.hpp"

namespace andor {

// Elimination ordering. Position 0 is the root: its bucket is processed last.
struct Ordering {
  std::vector<VarId> order;  // order[position] = variable
  std::vector<int> pos;      // pos[variable] = position

  static Ordering of(std::vector<VarId> vars);
  static Ordering identity(int n);
  int size() const { return int(order.size()); }
};

struct InducedGraph {
  Graph graph;
  int width = 0;
};

// Moral/induced graph along an ordering: variables are processed from the
// last position to the first; processing a variable connects its earlier
// neighbours pairwise. width = max earlier-neighbour count at processing
// time.
InducedGraph induced_graph(const Graph& g, const Ordering& d);

struct BucketTree {
  Ordering ordering;
  std::vector<VarId> parent;                    // kNoVar for roots
  std::vector<std::vector<int>> placed_factors; // factor ids per bucket
  std::vector<std::vector<VarId>> message_scope; // symbolic, root-to-leaf order
};

// Places each factor in the bucket of its latest scope variable and derives
// message scopes and parent links symbolically.
BucketTree build_bucket_tree(const Model& m, const Ordering& d);

struct PseudoTree {
  std::vector<VarId> parent;  // kNoVar at the root
  VarId root = kNoVar;
  std::vector<int> depth;
  std::vector<std::vector<VarId>> children;  // deterministic order

  int var_count() const { return int(parent.size()); }
  bool is_ancestor(VarId anc, VarId x) const;  // strict
  std::vector<VarId> ancestors(VarId x) const; // root first
};

// Bucket-tree parents become pseudo-tree parents. If several buckets have an
// empty message scope, the one earliest in the ordering is the root and the
// others attach below it.
PseudoTree pseudo_tree_of(const BucketTree& bt);

// Rebuilds depths/children from a parent array (tests, hand-made trees).
PseudoTree make_pseudo_tree(std::vector<VarId> parent);

// DFS tree of g rooted at `root`; neighbours visited in ascending order.
// Spanning forests attach later component roots under the first root.
PseudoTree dfs_pseudo_tree(const Graph& g, VarId root = 0);

// True iff every edge of g joins an ancestor/descendant pair of t.
bool validate_pseudo_tree(const PseudoTree& t, const Graph& g);

// Strict ancestors of x adjacent to x or to a descendant of x, root-to-leaf.
std::vector<VarId> separator_context(const PseudoTree& t, const Graph& g, VarId x);

// {x} plus strict ancestors adjacent to a strict descendant of x,
// root-to-leaf (x last).
std::vector<VarId> and_context(const PseudoTree& t, const Graph& g, VarId x);

struct ContextTable {
  std::vector<std::vector<VarId>> sep;
  std::vector<std::vector<VarId>> and_ctx;
};

ContextTable make_contexts(const PseudoTree& t, const Graph& g);

// Variables whose cache can never receive a hit: sep(x) contains the
// parent's full bucket scope sep(parent) + {parent} (the two sets are then
// equal, so every arrival at x carries a fresh cache key).
std::set<VarId> dead_cache_vars(const PseudoTree& t, const ContextTable& ctx);

struct TreeStats {
  int width = 0;
  int depth = 0;
  long long cm_bound = 0;  // sum over variables of k^|sep|
  bool is_dfs_tree = false;
};

TreeStats tree_stats(const Model& m, const Ordering& d);

}  // namespace andor
