#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "andor/gen.hpp"
#include "andor/model.hpp"
#include "andor/structure.hpp"
#include "andor/util.hpp"

using namespace andor;

namespace {

Model bundled(const std::string& name, int n = 0, bool uniform = true,
              std::uint64_t seed = 1) {
  GenSpec spec;
  spec.name = name;
  spec.n = n;
  spec.uniform = uniform;
  spec.seed = seed;
  return parse_model(gen_model_text(spec));
}

Model random_model(int n, int k, std::uint64_t seed, double zero_frac = 0.0) {
  GenSpec spec;
  spec.name = "random";
  spec.n = n;
  spec.k = k;
  spec.seed = seed;
  spec.zero_frac = zero_frac;
  return parse_model(gen_model_text(spec));
}

Ordering recommended(const std::string& name, int n) {
  return Ordering::of(gen_recommended_ordering(name, n));
}

Ordering shuffled(int n, std::uint64_t seed) {
  std::vector<VarId> v(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) v[std::size_t(i)] = i;
  Lcg rng(seed);
  for (int i = n - 1; i > 0; --i)
    std::swap(v[std::size_t(i)], v[std::size_t(rng.below(i + 1))]);
  return Ordering::of(v);
}

// every pair factor: the chain pseudo tree has contexts growing one per level
Model clique_model(int n, int k) {
  Model m;
  m.name = "clique";
  m.domains.assign(std::size_t(n), Domain{k, {}});
  m.evidence = Assignment(n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      Factor f;
      f.scope = {i, j};
      f.table.assign(std::size_t(k * k), 1.0);
      m.factors.push_back(f);
    }
  return m;
}

}  // namespace

TEST_CASE("ordering must be a permutation") {
  CHECK_THROWS_AS(Ordering::of({0, 0, 1}), std::invalid_argument);
  CHECK_THROWS_AS(Ordering::of({0, 3}), std::invalid_argument);
  Ordering d = Ordering::of({2, 0, 1});
  CHECK(d.pos[2] == 0);
  CHECK(d.pos[1] == 2);
}

TEST_CASE("induced width: edgeless, fig4, chain") {
  Model single = parse_model("model m\nvars 3\ndom 0 2\ndom 1 2\ndom 2 2\nend\n");
  CHECK(induced_graph(primal_graph(single), Ordering::identity(3)).width == 0);

  Model fig4 = bundled("fig4");
  CHECK(induced_graph(primal_graph(fig4), recommended("fig4", 5)).width == 2);

  Model chain = parse_model(
      "model m\nvars 4\ndom 0 2\ndom 1 2\ndom 2 2\ndom 3 2\n"
      "factor 2 0 1\n1 1 1 1\nfactor 2 1 2\n1 1 1 1\nfactor 2 2 3\n1 1 1 1\nend\n");
  CHECK(induced_graph(primal_graph(chain), Ordering::identity(4)).width == 1);
}

TEST_CASE("bucket tree of fig1 under (A,B,E,C,D)") {
  Model m = bundled("fig1");
  BucketTree bt = build_bucket_tree(m, recommended("fig1", 5));
  CHECK(bt.parent[3] == 2);       // D -> C
  CHECK(bt.parent[2] == 1);       // C -> B
  CHECK(bt.parent[4] == 1);       // E -> B
  CHECK(bt.parent[1] == 0);       // B -> A
  CHECK(bt.parent[0] == kNoVar);  // A is the root
  CHECK(bt.message_scope[3] == std::vector<VarId>{1, 2});
  CHECK(bt.message_scope[2] == std::vector<VarId>{0, 1});
  CHECK(bt.message_scope[4] == std::vector<VarId>{0, 1});
  CHECK(bt.message_scope[1] == std::vector<VarId>{0});
}

TEST_CASE("bucket scope sizes of fig4 under (D,C,B,A,E)") {
  Model m = bundled("fig4");
  BucketTree bt = build_bucket_tree(m, recommended("fig4", 5));
  // bucket scope = message scope + the bucket variable
  CHECK(bt.message_scope[4].size() == 2);  // E: {A,B}
  CHECK(bt.message_scope[0].size() == 2);  // A: {B,C}
  CHECK(bt.message_scope[1].size() == 2);  // B: {C,D}
  CHECK(bt.message_scope[2].size() == 1);  // C: {D}
  CHECK(bt.message_scope[3].empty());      // D: root bucket
}

TEST_CASE("single variable, one unary factor") {
  Model m = parse_model("model m\nvars 1\ndom 0 2\nfactor 1 0\n0.3 0.7\nend\n");
  BucketTree bt = build_bucket_tree(m, Ordering::identity(1));
  CHECK(bt.parent[0] == kNoVar);
  CHECK(bt.placed_factors[0] == std::vector<int>{0});
}

TEST_CASE("pseudo tree of fig1: root A, children {B}, {E,C}, {D}") {
  Model m = bundled("fig1");
  PseudoTree t = pseudo_tree_of(build_bucket_tree(m, recommended("fig1", 5)));
  CHECK(t.root == 0);
  CHECK(t.children[0] == std::vector<VarId>{1});
  std::vector<VarId> b_children = t.children[1];
  std::sort(b_children.begin(), b_children.end());
  CHECK(b_children == std::vector<VarId>{2, 4});
  CHECK(t.children[2] == std::vector<VarId>{3});
  CHECK(t.depth[3] == 3);
}

TEST_CASE("chain models give chain pseudo trees") {
  Model ex34 = bundled("ex34");
  PseudoTree t = pseudo_tree_of(build_bucket_tree(ex34, recommended("ex34", 4)));
  CHECK(t.root == 0);
  CHECK(t.parent[1] == 0);
  CHECK(t.parent[2] == 1);
  CHECK(t.parent[3] == 2);
}

TEST_CASE("validate_pseudo_tree") {
  // DFS trees of random graphs validate
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    Model m = random_model(8, 2, seed);
    Graph g = primal_graph(m);
    PseudoTree t = dfs_pseudo_tree(g, 0);
    CHECK(validate_pseudo_tree(t, g));
  }

  // star graph, chain tree ordered center-first
  Graph star(5);
  for (int i = 1; i < 5; ++i) star.add_edge(0, i);
  PseudoTree chain = make_pseudo_tree({kNoVar, 0, 1, 2, 3});
  CHECK(validate_pseudo_tree(chain, star));

  // path a-b-c with the tree rooted at b and a,c as siblings
  Graph path(3);
  path.add_edge(0, 1);
  path.add_edge(1, 2);
  PseudoTree sib = make_pseudo_tree({1, kNoVar, 1});
  CHECK(validate_pseudo_tree(sib, path));

  // an edge between different branches breaks validity
  Graph bad(4);
  bad.add_edge(0, 1);
  bad.add_edge(0, 2);
  bad.add_edge(1, 3);
  bad.add_edge(2, 3);
  PseudoTree v = make_pseudo_tree({kNoVar, 0, 0, 1});
  CHECK_FALSE(validate_pseudo_tree(v, bad));
}

TEST_CASE("separator contexts") {
  Model fig4 = bundled("fig4");
  Graph g4 = primal_graph(fig4);
  PseudoTree t4 = pseudo_tree_of(build_bucket_tree(fig4, recommended("fig4", 5)));
  std::vector<VarId> e_sep = separator_context(t4, g4, 4);
  std::sort(e_sep.begin(), e_sep.end());
  CHECK(e_sep == std::vector<VarId>{0, 1});  // {A,B}

  Model fig1 = bundled("fig1");
  Graph g1 = primal_graph(fig1);
  PseudoTree t1 = pseudo_tree_of(build_bucket_tree(fig1, recommended("fig1", 5)));
  CHECK(separator_context(t1, g1, 2) == std::vector<VarId>{0, 1});  // C: (A,B)
  CHECK(separator_context(t1, g1, t1.root).empty());
}

TEST_CASE("and contexts") {
  Model ex34 = bundled("ex34");
  Graph g = primal_graph(ex34);
  PseudoTree t = pseudo_tree_of(build_bucket_tree(ex34, recommended("ex34", 4)));
  CHECK(and_context(t, g, 1) == std::vector<VarId>{1});  // B: just {B}

  Model fig4 = bundled("fig4");
  Graph g4 = primal_graph(fig4);
  PseudoTree t4 = pseudo_tree_of(build_bucket_tree(fig4, recommended("fig4", 5)));
  CHECK(and_context(t4, g4, 0) == std::vector<VarId>{1, 0});  // A: (B,A)
  CHECK(and_context(t4, g4, 4) == std::vector<VarId>{4});     // leaf E
}

TEST_CASE("dead caches: growing-context chain has all non-root dead") {
  Model m = clique_model(5, 2);
  PseudoTree t = pseudo_tree_of(build_bucket_tree(m, Ordering::identity(5)));
  ContextTable ctx = make_contexts(t, primal_graph(m));
  std::set<VarId> dead = dead_cache_vars(t, ctx);
  CHECK(dead == std::set<VarId>{1, 2, 3, 4});
}

TEST_CASE("dead caches: ex33 has every non-root variable dead") {
  Model m = bundled("ex33", 12);
  PseudoTree t = pseudo_tree_of(build_bucket_tree(m, Ordering::identity(12)));
  ContextTable ctx = make_contexts(t, primal_graph(m));
  std::set<VarId> dead = dead_cache_vars(t, ctx);
  CHECK(int(dead.size()) == 11);
  CHECK_FALSE(dead.count(t.root));
}

TEST_CASE("dead caches: fig1 keeps only D alive") {
  // sep(D)={B,C} sits strictly inside its parent's bucket scope {A,B,C}, so
  // OR nodes of D are reachable under several contexts; B, C, E arrive with
  // a fresh key every time
  Model m = bundled("fig1");
  PseudoTree t = pseudo_tree_of(build_bucket_tree(m, recommended("fig1", 5)));
  ContextTable ctx = make_contexts(t, primal_graph(m));
  std::set<VarId> dead = dead_cache_vars(t, ctx);
  CHECK(dead == std::set<VarId>{1, 2, 4});  // B, C, E
  CHECK_FALSE(dead.count(3));               // D stays live
}

TEST_CASE("tree_stats on the bundled models") {
  Model fig4 = bundled("fig4");
  TreeStats s4 = tree_stats(fig4, recommended("fig4", 5));
  CHECK(s4.width == 2);
  CHECK(s4.depth == 4);  // chain D-C-B-A-E
  CHECK(s4.cm_bound == 1 + 2 + 4 + 4 + 4);

  Model fig1 = bundled("fig1");
  TreeStats s1 = tree_stats(fig1, recommended("fig1", 5));
  CHECK(s1.depth == 3);

  Model edgeless = parse_model(
      "model m\nvars 4\ndom 0 2\ndom 1 2\ndom 2 2\ndom 3 2\nend\n");
  TreeStats se = tree_stats(edgeless, Ordering::identity(4));
  CHECK(se.cm_bound == 4);
  CHECK(se.width == 0);
}

TEST_CASE("property: symbolic message scopes equal separator contexts") {
  for (std::uint64_t seed = 1; seed <= 25; ++seed) {
    Model m = random_model(8, 3, seed, seed % 2 ? 0.3 : 0.0);
    Ordering d = shuffled(8, seed * 7 + 1);
    BucketTree bt = build_bucket_tree(m, d);
    PseudoTree t = pseudo_tree_of(bt);
    Graph g = primal_graph(m);
    for (VarId v = 0; v < m.var_count(); ++v) {
      std::vector<VarId> sep = separator_context(t, g, v);
      std::vector<VarId> msg = bt.message_scope[std::size_t(v)];
      std::sort(sep.begin(), sep.end());
      std::sort(msg.begin(), msg.end());
      CHECK(sep == msg);
    }
  }
}

TEST_CASE("property: derived pseudo trees validate against the primal graph") {
  for (std::uint64_t seed = 1; seed <= 25; ++seed) {
    Model m = random_model(9, 2, seed, 0.2);
    Ordering d = shuffled(9, seed * 13 + 5);
    PseudoTree t = pseudo_tree_of(build_bucket_tree(m, d));
    CHECK(validate_pseudo_tree(t, primal_graph(m)));
  }
}

TEST_CASE("property: separator sizes bounded by the induced width") {
  for (std::uint64_t seed = 1; seed <= 25; ++seed) {
    Model m = random_model(8, 2, seed);
    Ordering d = shuffled(8, seed * 3 + 2);
    Graph g = primal_graph(m);
    int width = induced_graph(g, d).width;
    PseudoTree t = pseudo_tree_of(build_bucket_tree(m, d));
    for (VarId v = 0; v < m.var_count(); ++v)
      CHECK(int(separator_context(t, g, v).size()) <= width);
  }
}

TEST_CASE("isDfsTree holds for DFS orderings of a connected graph") {
  Model m = clique_model(5, 2);
  TreeStats s = tree_stats(m, Ordering::identity(5));
  CHECK(s.is_dfs_tree);

  // fig4's derived chain passes the operational test as well
  Model fig4 = bundled("fig4");
  CHECK(tree_stats(fig4, recommended("fig4", 5)).is_dfs_tree);

  Model edgeless = parse_model(
      "model m\nvars 3\ndom 0 2\ndom 1 2\ndom 2 2\nend\n");
  CHECK_FALSE(tree_stats(edgeless, Ordering::identity(3)).is_dfs_tree);
}
