#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "andor/analysis.hpp"
#include "andor/aosearch.hpp"
#include "andor/elimination.hpp"
#include "andor/gen.hpp"
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

PseudoTree derived_tree(const Model& m, const Ordering& d) {
  return pseudo_tree_of(build_bucket_tree(m, d));
}

bool close(double a, double b, double rel = 1e-9) {
  return std::abs(a - b) <= rel * std::max({1.0, std::abs(a), std::abs(b)});
}

long long count_dashed(const std::string& dot) {
  long long c = 0;
  std::size_t pos = 0;
  while ((pos = dot.find("style=dashed", pos)) != std::string::npos) {
    ++c;
    pos += 12;
  }
  return c;
}

}  // namespace

TEST_CASE("brute force values") {
  Model edgeless = parse_model(
      "model m\nvars 3\ndom 0 3\ndom 1 3\ndom 2 3\nend\n");
  CHECK(brute_force_value(edgeless, Task::Count) == 27.0);
  CHECK(brute_force_value(edgeless, Task::Consistency) == 1.0);

  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    Model bn = bundled(seed % 2 ? "fig1" : "fig4", 0, false, seed);
    CHECK(close(brute_force_value(bn, Task::SumProduct), 1.0));
  }

  CHECK(brute_force_value(bundled("ex34"), Task::Count) == 1.0);
}

TEST_CASE("brute force size guard") {
  Model big;
  big.name = "big";
  big.domains.assign(30, Domain{2, {}});
  big.evidence = Assignment(30);
  CHECK_THROWS_AS(brute_force_value(big, Task::Count), SizeGuardError);
}

TEST_CASE("cm graph of fig4: level counts from the chain") {
  Model m = bundled("fig4");
  PseudoTree t = derived_tree(m, recommended("fig4", 5));
  ContextTable ctx = make_contexts(t, primal_graph(m));
  CmGraph cm = build_cm(m, t, ctx);

  CHECK(cm.tuples.count(4) == 8);  // E
  CHECK(cm.tuples.count(0) == 8);  // A
  CHECK(cm.tuples.count(1) == 8);  // B
  CHECK(cm.tuples.count(2) == 4);  // C
  CHECK(cm.tuples.count(3) == 2);  // D

  CHECK(cm.and_nodes.count(3) == 2);  // D
  CHECK(cm.and_nodes.count(2) == 4);  // C
  CHECK(cm.and_nodes.count(1) == 4);  // B
  CHECK(cm.and_nodes.count(0) == 4);  // A
  CHECK(cm.and_nodes.count(4) == 2);  // E
}

TEST_CASE("cm graph of an edgeless model over a chain tree") {
  Model m = parse_model("model m\nvars 3\ndom 0 2\ndom 1 2\ndom 2 2\nend\n");
  PseudoTree t = make_pseudo_tree({kNoVar, 0, 1});
  ContextTable ctx = make_contexts(t, primal_graph(m));
  CmGraph cm = build_cm(m, t, ctx);
  CHECK(cm.and_nodes.total() == 6);
  CHECK(cm.or_nodes.total() == 3);
}

TEST_CASE("or-node count equals the context bound") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    Model m = random_model(7, 2, seed, 0.2);
    Ordering d = shuffled(7, seed);
    PseudoTree t = derived_tree(m, d);
    Graph g = primal_graph(m);
    ContextTable ctx = make_contexts(t, g);
    CmGraph cm = build_cm(m, t, ctx);
    long long bound = 0;
    for (VarId v = 0; v < m.var_count(); ++v) {
      long long cells = 1;
      for (VarId y : ctx.sep[std::size_t(v)]) cells *= m.domain_size(y);
      bound += cells;
    }
    CHECK(cm.or_nodes.total() == bound);
    int w = induced_graph(g, d).width;
    long long cap = m.var_count();
    for (int i = 0; i < w; ++i) cap *= 2;
    CHECK(bound <= cap);
  }
}

TEST_CASE("oracle explored sets on a strictly positive model cover everything") {
  Model m = bundled("fig1");
  PseudoTree t = derived_tree(m, recommended("fig1", 5));
  ContextTable ctx = make_contexts(t, primal_graph(m));
  ExploredSets sets = oracle_explored_sets(m, t, ctx);
  CmGraph cm = build_cm(m, t, ctx);
  CHECK(sets.ao_tuples == cm.tuples);
  CHECK(sets.ve_tuples == cm.tuples);
  CHECK(sets.bf_nodes == cm.and_nodes);
}

TEST_CASE("oracle explored sets on ex34") {
  Model m = bundled("ex34");
  PseudoTree t = derived_tree(m, recommended("ex34", 4));
  ContextTable ctx = make_contexts(t, primal_graph(m));
  ExploredSets sets = oracle_explored_sets(m, t, ctx);

  CHECK(sets.bf_nodes.by_var[0] == std::set<long long>{0});
  CHECK(sets.bf_nodes.by_var[1] == std::set<long long>{1});
  CHECK(sets.bf_nodes.by_var[2] == std::set<long long>{2});
  CHECK(sets.bf_nodes.by_var[3] == std::set<long long>{3});
  CHECK(sets.ao_nodes.total() == 10);
  CHECK(sets.ve_nodes.total() == 10);
}

TEST_CASE("implementations reproduce the oracle explored sets") {
  auto check_model = [](const Model& m, const Ordering& d) {
    PseudoTree t = derived_tree(m, d);
    ContextTable ctx = make_contexts(t, primal_graph(m));
    ExploredSets sets = oracle_explored_sets(m, t, ctx);
    RunReport ve = run_ve(m, d, Task::Count);
    RunReport ao = ao_df(m, t, Task::Count);
    CHECK(ve.tuples == sets.ve_tuples);
    CHECK(ve.nodes == sets.ve_nodes);
    CHECK(ao.tuples == sets.ao_tuples);
    CHECK(ao.nodes == sets.ao_nodes);
  };

  check_model(bundled("ex34"), recommended("ex34", 4));
  check_model(bundled("fig1"), recommended("fig1", 5));
  check_model(bundled("fig4"), recommended("fig4", 5));
  check_model(bundled("ex43", 5), Ordering::identity(5));
  for (std::uint64_t seed = 1; seed <= 20; ++seed)
    check_model(random_model(7, 3, seed, seed % 2 ? 0.35 : 0.0),
                shuffled(7, seed * 3));
}

TEST_CASE("backtrack-free nodes sit inside the node intersection") {
  auto node_intersection = [](const KeySet& a, const KeySet& b) {
    KeySet out(int(a.by_var.size()));
    for (std::size_t v = 0; v < a.by_var.size(); ++v)
      for (long long c : a.by_var[v])
        if (b.by_var[v].count(c)) out.add(VarId(v), c);
    return out;
  };

  // chains and strictly positive models: equality
  for (const char* name : {"ex34", "fig1", "fig4"}) {
    Model m = bundled(name);
    Ordering d = recommended(name, 5);
    if (std::string(name) == "ex34") d = recommended(name, 4);
    PseudoTree t = derived_tree(m, d);
    ContextTable ctx = make_contexts(t, primal_graph(m));
    ExploredSets sets = oracle_explored_sets(m, t, ctx);
    RunReport ve = run_ve(m, d, Task::Count);
    RunReport ao = ao_df(m, t, Task::Count);
    KeySet inter = node_intersection(ve.nodes, ao.nodes);
    CHECK(inter == sets.bf_nodes);
  }
  {
    Model m = bundled("ex43", 5);
    Ordering d = Ordering::identity(5);
    PseudoTree t = derived_tree(m, d);
    ContextTable ctx = make_contexts(t, primal_graph(m));
    ExploredSets sets = oracle_explored_sets(m, t, ctx);
    KeySet inter = node_intersection(run_ve(m, d, Task::Count).nodes,
                                     ao_df(m, t, Task::Count).nodes);
    CHECK(inter == sets.bf_nodes);
  }

  // in general only containment is guaranteed
  for (std::uint64_t seed = 1; seed <= 15; ++seed) {
    Model m = random_model(6, 3, seed, 0.4);
    Ordering d = shuffled(6, seed);
    PseudoTree t = derived_tree(m, d);
    ContextTable ctx = make_contexts(t, primal_graph(m));
    ExploredSets sets = oracle_explored_sets(m, t, ctx);
    KeySet inter = node_intersection(run_ve(m, d, Task::Count).nodes,
                                     ao_df(m, t, Task::Count).nodes);
    CHECK(sets.bf_nodes.subset_of(inter));
  }
}

TEST_CASE("compare_reports") {
  Model m = bundled("fig1");
  Ordering d = recommended("fig1", 5);
  PseudoTree t = derived_tree(m, d);

  RunReport ve = run_ve(m, d, Task::SumProduct);
  CHECK(compare_reports(ve, ve).relation == Relation::Identical);

  RunReport ao = ao_df(m, t, Task::SumProduct);
  CompareResult r = compare_reports(ve, ao);
  CHECK(r.relation == Relation::Identical);
  CHECK(r.only_a == 0);
  CHECK(r.only_b == 0);
  CHECK(r.both == ve.tuples.total());

  Model ex34 = bundled("ex34");
  Ordering d34 = recommended("ex34", 4);
  RunReport ve34 = run_ve(ex34, d34, Task::Count);
  RunReport ao34 = ao_df(ex34, derived_tree(ex34, d34), Task::Count);
  CHECK(compare_reports(ve34, ao34).relation == Relation::Incomparable);

  CHECK_THROWS_AS(compare_reports(ve, ve34), std::invalid_argument);
}

TEST_CASE("compare respects the subset structure of look-ahead runs") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    Model m = random_model(6, 3, seed, 0.4);
    PseudoTree t = derived_tree(m, shuffled(6, seed + 3));
    AoOptions none, fc, ac;
    fc.lookahead = Lookahead::FC;
    ac.lookahead = Lookahead::AC;
    RunReport rn = ao_df(m, t, Task::Count, none);
    RunReport rf = ao_df(m, t, Task::Count, fc);
    RunReport ra = ao_df(m, t, Task::Count, ac);

    Relation af = compare_reports(ra, rf).relation;
    Relation fn = compare_reports(rf, rn).relation;
    Relation an = compare_reports(ra, rn).relation;
    CHECK((af == Relation::Identical || af == Relation::AStrictSubset));
    CHECK((fn == Relation::Identical || fn == Relation::BStrictSubset ||
           fn == Relation::AStrictSubset));
    // transitivity of containment
    if (af != Relation::Identical || fn != Relation::Identical)
      CHECK(an != Relation::BStrictSubset);
    CHECK(an != Relation::Incomparable);
    // antisymmetry
    Relation na = compare_reports(rn, ra).relation;
    if (an == Relation::AStrictSubset) CHECK(na == Relation::BStrictSubset);
    if (an == Relation::Identical) CHECK(na == Relation::Identical);
  }
}

TEST_CASE("brute force agrees with VE on 200 random models") {
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    Model m = random_model(5 + int(seed % 2), 2 + int(seed % 2), seed,
                           seed % 3 == 0 ? 0.4 : 0.0);
    Ordering d = shuffled(m.var_count(), seed * 31 + 7);
    CHECK(close(run_ve(m, d, Task::SumProduct).value,
                brute_force_value(m, Task::SumProduct)));
    CHECK(run_ve(m, d, Task::Count).value == brute_force_value(m, Task::Count));
  }
}

TEST_CASE("dot export: determinism and dash marks") {
  Model m = bundled("ex34");
  Ordering d = recommended("ex34", 4);
  PseudoTree t = derived_tree(m, d);
  ContextTable ctx = make_contexts(t, primal_graph(m));
  CmGraph cm = build_cm(m, t, ctx);

  std::string plain = export_dot(m, t, ctx, cm);
  CHECK(count_dashed(plain) == 0);
  CHECK(plain == export_dot(m, t, ctx, cm));

  RunReport ve = run_ve(m, d, Task::Count);
  std::string marked = export_dot(m, t, ctx, cm, &ve);
  // every or node of ex34 keeps at least one recorded tuple under VE, so
  // the dashes are exactly the 16-10 unexplored and nodes
  CHECK(count_dashed(marked) == cm.and_nodes.total() - ve.nodes.total());
  CHECK(marked == export_dot(m, t, ctx, cm, &ve));
  CHECK(marked.find("shape=ellipse") != std::string::npos);
  CHECK(marked.find("shape=box") != std::string::npos);
}
