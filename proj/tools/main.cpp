#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "andor/analysis.hpp"
#include "andor/aosearch.hpp"
#include "andor/elimination.hpp"
#include "andor/gen.hpp"
#include "andor/model.hpp"
#include "andor/structure.hpp"
#include "andor/util.hpp"

namespace {

using namespace andor;

struct CommonArgs {
  std::string model_path;
  std::string ordering_csv;
  std::string task_name = "sum-product";
};

struct AlgoArgs {
  std::string cache = "full";
  std::string lookahead = "none";
  std::string tree = "ordering";
  bool nogood = false;
  bool gbj = false;
  bool la_nogoods = false;
  bool forget_layers = false;
  bool no_zero_skip = false;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--model", args.model_path, "model file")->required();
  cmd->add_option("--ordering", args.ordering_csv,
                  "comma list of variable indices, root first (default identity)");
  cmd->add_option("--task", args.task_name, "sum-product|count|consistency");
}

void add_algo_flags(CLI::App* cmd, AlgoArgs& args) {
  cmd->add_option("--cache", args.cache, "full|none (AND/OR search)");
  cmd->add_option("--lookahead", args.lookahead, "none|fc|ac");
  cmd->add_option("--tree", args.tree,
                  "ordering|dfs: derive the pseudo tree from the bucket tree "
                  "or take a DFS tree of the primal graph (AND/OR search)");
  cmd->add_flag("--nogood", args.nogood, "graph-based no-good learning flag");
  cmd->add_flag("--gbj", args.gbj, "graph-based backjumping (ao-df)");
  cmd->add_flag("--la-nogoods", args.la_nogoods,
                "no-goods found during search join the look-ahead (ao-df)");
  cmd->add_flag("--forget-layers", args.forget_layers,
                "release VE messages once their parent bucket finishes");
  cmd->add_flag("--no-zero-skip", args.no_zero_skip,
                "VE records tuples even under zero child messages");
}

Model load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ModelFormatError(0, "cannot open model file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_model(ss.str());
}

Ordering parse_ordering(const std::string& csv, int n) {
  if (csv.empty()) return Ordering::identity(n);
  std::vector<VarId> vars;
  std::stringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    vars.push_back(std::stoi(tok));
  }
  if (int(vars.size()) != n)
    throw std::invalid_argument("ordering must list all " + std::to_string(n) +
                                " variables");
  return Ordering::of(vars);
}

Task parse_task(const std::string& name) {
  if (name == "sum-product") return Task::SumProduct;
  if (name == "count") return Task::Count;
  if (name == "consistency") return Task::Consistency;
  throw std::invalid_argument("unknown task '" + name + "'");
}

Lookahead parse_lookahead(const std::string& name) {
  if (name == "none") return Lookahead::None;
  if (name == "fc") return Lookahead::FC;
  if (name == "ac") return Lookahead::AC;
  throw std::invalid_argument("unknown lookahead '" + name + "'");
}

// pseudo tree used by the search algorithms and by trace/graph rendering;
// VE always follows the ordering-derived tree
PseudoTree build_tree(const Model& m, const Ordering& d, const std::string& mode) {
  if (mode == "ordering") return pseudo_tree_of(build_bucket_tree(m, d));
  if (mode == "dfs") return dfs_pseudo_tree(primal_graph(m), d.order[0]);
  throw std::invalid_argument("unknown tree mode '" + mode + "'");
}

RunReport run_algo(const std::string& algo, const Model& m, const Ordering& d,
                   Task task, const AlgoArgs& args) {
  Model applied = apply_evidence(m, m.evidence);
  if (algo == "ve") {
    VeOptions opts;
    opts.forget_layers = args.forget_layers;
    opts.zero_skip = !args.no_zero_skip;
    opts.lookahead = parse_lookahead(args.lookahead);
    return run_ve(applied, d, task, opts);
  }
  AoOptions opts;
  if (args.cache == "full") opts.caching = AoCaching::Full;
  else if (args.cache == "none") opts.caching = AoCaching::None;
  else throw std::invalid_argument("unknown cache mode '" + args.cache + "'");
  opts.lookahead = parse_lookahead(args.lookahead);
  opts.nogood = args.nogood;
  opts.gbj = args.gbj;
  opts.lookahead_uses_nogoods = args.la_nogoods;
  PseudoTree t = build_tree(applied, d, args.tree);
  if (algo == "ao-df") return ao_df(applied, t, task, opts);
  if (algo == "ao-bf") return ao_bf(applied, t, task, opts);
  throw std::invalid_argument("unknown algorithm '" + algo + "'");
}

void print_report(const std::string& algo, const RunReport& rep) {
  std::cout << "value=" << format_double(rep.value) << "\n";
  std::cout << "tuples=" << rep.tuples.total() << "\n";
  std::cout << "nodes=" << rep.nodes.total() << "\n";
  std::cout << "peak_entries=" << rep.counters.peak_live_table_entries << "\n";
  std::cout << "messages=" << rep.counters.messages_stored << "\n";
  if (algo != "ve") {
    std::cout << "cache_hits=" << rep.counters.cache_hits << "\n";
    std::cout << "cache_entries=" << rep.counters.cache_entries_stored << "\n";
  }
}

void dump_messages(const RunReport& rep, const std::string& path) {
  std::ofstream out(path);
  for (const Message& msg : rep.messages) {
    out << "factor " << msg.scope.size();
    for (VarId v : msg.scope) out << " " << v;
    out << "\n";
    for (std::size_t i = 0; i < msg.table.size(); ++i)
      out << (i ? " " : "") << format_double(msg.table[i]);
    out << "\n";
  }
}

void dump_trace(const Model& m, const PseudoTree& t, const RunReport& rep,
                const std::string& path) {
  ContextTable ctx = make_contexts(t, primal_graph(m));
  std::ofstream out(path);
  for (const TraceRow& row : rep.trace) {
    ContextCodec sep(m, ctx.sep[std::size_t(row.var)]);
    std::vector<int> vals = sep.values_of(row.sep_code);
    out << row.var << " ";
    if (vals.empty()) out << "-";
    for (std::size_t i = 0; i < vals.size(); ++i) out << (i ? "," : "") << vals[i];
    out << " " << row.value << " " << format_double(row.label) << "\n";
  }
}

int cmd_gen(const GenSpec& spec, const std::string& out_path) {
  std::string text = gen_model_text(spec);
  if (out_path.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(out_path);
    out << text;
  }
  return 0;
}

int cmd_stats(const CommonArgs& args) {
  Model m = load_model(args.model_path);
  Ordering d = parse_ordering(args.ordering_csv, m.var_count());
  TreeStats s = tree_stats(m, d);
  Graph g = primal_graph(m);
  PseudoTree t = pseudo_tree_of(build_bucket_tree(m, d));
  ContextTable ctx = make_contexts(t, g);
  std::set<VarId> dead = dead_cache_vars(t, ctx);

  std::cout << "width=" << s.width << " depth=" << s.depth
            << " cm_bound=" << s.cm_bound << " dfs_tree=" << (s.is_dfs_tree ? 1 : 0)
            << " dead_caches=";
  bool first = true;
  for (VarId v : dead) {
    std::cout << (first ? "" : ",") << v;
    first = false;
  }
  std::cout << "\n";
  for (VarId v = 0; v < m.var_count(); ++v) {
    std::cout << "ctx " << v << " sep=";
    for (std::size_t i = 0; i < ctx.sep[std::size_t(v)].size(); ++i)
      std::cout << (i ? "," : "") << ctx.sep[std::size_t(v)][i];
    std::cout << " and=";
    for (std::size_t i = 0; i < ctx.and_ctx[std::size_t(v)].size(); ++i)
      std::cout << (i ? "," : "") << ctx.and_ctx[std::size_t(v)][i];
    std::cout << "\n";
  }
  return 0;
}

int cmd_solve(const CommonArgs& args, const AlgoArgs& algo_args,
              const std::string& algo, const std::string& dump_msg_path,
              const std::string& dump_trace_path) {
  Model m = load_model(args.model_path);
  Ordering d = parse_ordering(args.ordering_csv, m.var_count());
  RunReport rep = run_algo(algo, m, d, parse_task(args.task_name), algo_args);
  print_report(algo, rep);
  if (!dump_msg_path.empty()) dump_messages(rep, dump_msg_path);
  if (!dump_trace_path.empty()) {
    Model applied = apply_evidence(m, m.evidence);
    PseudoTree t = build_tree(applied, d, algo == "ve" ? "ordering" : algo_args.tree);
    dump_trace(applied, t, rep, dump_trace_path);
  }
  return 0;
}

int cmd_compare(const CommonArgs& args, const AlgoArgs& algo_args,
                const std::string& algo_a, const std::string& algo_b) {
  Model m = load_model(args.model_path);
  Ordering d = parse_ordering(args.ordering_csv, m.var_count());
  Task task = parse_task(args.task_name);
  RunReport a = run_algo(algo_a, m, d, task, algo_args);
  RunReport b = run_algo(algo_b, m, d, task, algo_args);
  CompareResult r = compare_reports(a, b);
  std::cout << "relation=" << relation_name(r.relation) << "\n";
  std::cout << "only_a=" << r.only_a << " only_b=" << r.only_b << " both=" << r.both
            << "\n";
  return 0;
}

int cmd_dot(const CommonArgs& args, const AlgoArgs& algo_args,
            const std::string& algo, const std::string& out_path) {
  Model m = load_model(args.model_path);
  Model applied = apply_evidence(m, m.evidence);
  Ordering d = parse_ordering(args.ordering_csv, m.var_count());
  Graph g = primal_graph(applied);
  PseudoTree t = build_tree(applied, d,
                            algo == "ve" || algo == "none" ? "ordering" : algo_args.tree);
  ContextTable ctx = make_contexts(t, g);
  CmGraph cm = build_cm(applied, t, ctx);
  std::string text;
  if (algo == "none") {
    text = export_dot(applied, t, ctx, cm);
  } else {
    RunReport rep = run_algo(algo, m, d, parse_task(args.task_name), algo_args);
    text = export_dot(applied, t, ctx, cm, &rep);
  }
  std::ofstream out(out_path);
  out << text;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exact inference over bucket/pseudo-tree structure: variable "
               "elimination and AND/OR graph search with shared traces"};
  app.require_subcommand(1);

  // gen
  GenSpec spec;
  std::string gen_out;
  CLI::App* gen = app.add_subcommand("gen", "emit a bundled model");
  gen->add_option("name", spec.name, "fig1|fig4|ex33|ex34|ex43|random")->required();
  gen->add_option("--n", spec.n, "variable count (ex33/ex43/random)");
  gen->add_option("--k", spec.k, "domain size (random)");
  gen->add_option("--seed", spec.seed, "rng seed");
  gen->add_flag("--uniform", spec.uniform, "uniform tables");
  gen->add_option("--zero-frac", spec.zero_frac,
                  "probability of an exact zero entry (random)");
  gen->add_option("--out", gen_out, "output file (default stdout)");

  // stats
  CommonArgs stats_args;
  CLI::App* stats = app.add_subcommand("stats", "structure report for an ordering");
  add_common(stats, stats_args);

  // solve
  CommonArgs solve_args;
  AlgoArgs solve_algo;
  std::string algo, dump_msg_path, dump_trace_path;
  CLI::App* solve = app.add_subcommand("solve", "run one algorithm");
  add_common(solve, solve_args);
  solve->add_option("--algo", algo, "ve|ao-df|ao-bf")->required();
  add_algo_flags(solve, solve_algo);
  solve->add_option("--dump-messages", dump_msg_path, "write VE messages to a file");
  solve->add_option("--dump-trace", dump_trace_path, "write explored tuples to a file");

  // compare
  CommonArgs cmp_args;
  AlgoArgs cmp_algo;
  std::string algo_a, algo_b;
  CLI::App* cmp = app.add_subcommand("compare", "relate two runs' explored tuples");
  add_common(cmp, cmp_args);
  cmp->add_option("--algo-a", algo_a, "ve|ao-df|ao-bf")->required();
  cmp->add_option("--algo-b", algo_b, "ve|ao-df|ao-bf")->required();
  add_algo_flags(cmp, cmp_algo);

  // dot
  CommonArgs dot_args;
  AlgoArgs dot_algo;
  std::string dot_algo_name = "none", dot_out;
  CLI::App* dot = app.add_subcommand("dot", "context-minimal graph as DOT");
  add_common(dot, dot_args);
  dot->add_option("--algo", dot_algo_name, "none|ve|ao-df|ao-bf (marks)");
  add_algo_flags(dot, dot_algo);
  dot->add_option("--out", dot_out, "output file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (gen->parsed()) return cmd_gen(spec, gen_out);
    if (stats->parsed()) return cmd_stats(stats_args);
    if (solve->parsed())
      return cmd_solve(solve_args, solve_algo, algo, dump_msg_path, dump_trace_path);
    if (cmp->parsed()) return cmd_compare(cmp_args, cmp_algo, algo_a, algo_b);
    if (dot->parsed()) return cmd_dot(dot_args, dot_algo, dot_algo_name, dot_out);
  } catch (const ModelFormatError& e) {
    std::cerr << "model error: " << e.what() << "\n";
    return 2;
  } catch (const SizeGuardError& e) {
    std::cerr << "size guard: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
