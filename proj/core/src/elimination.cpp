#include "andor/elimination.hpp"

#include <algorithm>
#include <stdexcept>

#include "andor/aosearch.hpp"
#include "andor/util.hpp"

namespace andor {

namespace {

double lift(Task task, double v) {
  if (task == Task::SumProduct) return v;
  return v != 0.0 ? 1.0 : 0.0;
}

double marginalize(Task task, double acc, double v) {
  if (task == Task::Consistency) return std::max(acc, v);
  return acc + v;
}

// iterates assignments over `vars` with the last variable fastest,
// restricted to the allowed values of each variable
class Odometer {
 public:
  Odometer(const std::vector<VarId>& vars, const std::vector<std::vector<int>>& allowed)
      : vars_(vars), allowed_(allowed), idx_(vars.size(), 0) {
    done_ = false;
    for (const auto& vals : allowed_)
      if (vals.empty()) done_ = true;
  }

  bool done() const { return done_; }

  void write(Assignment& a) const {
    for (std::size_t i = 0; i < vars_.size(); ++i)
      a.set(vars_[i], allowed_[i][std::size_t(idx_[i])]);
  }

  void clear(Assignment& a) const {
    for (VarId v : vars_) a.clear(v);
  }

  void advance() {
    for (int i = int(vars_.size()) - 1; i >= 0; --i) {
      if (++idx_[std::size_t(i)] < int(allowed_[std::size_t(i)].size())) return;
      idx_[std::size_t(i)] = 0;
    }
    done_ = true;
  }

 private:
  const std::vector<VarId>& vars_;
  std::vector<std::vector<int>> allowed_;
  std::vector<int> idx_;
  bool done_;
};

}  // namespace

RunReport run_ve(const Model& m, const Ordering& d, Task task, VeOptions opts) {
  int n = m.var_count();
  bool lah = opts.lookahead != Lookahead::None;
  if (lah) opts.zero_skip = true;

  Graph g = primal_graph(m);
  BucketTree bt = build_bucket_tree(m, d);
  PseudoTree t = pseudo_tree_of(bt);
  ContextTable ctx = make_contexts(t, g);

  std::vector<ContextCodec> sep_codec, and_codec, tuple_codec;
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

  RunReport rep;
  rep.task = task;
  rep.tuples = KeySet(n);
  rep.nodes = KeySet(n);
  rep.cache_hits_by_var.assign(static_cast<std::size_t>(n), 0);
  rep.cache_entries_by_var.assign(static_cast<std::size_t>(n), 0);
  rep.and_visits_by_var.assign(static_cast<std::size_t>(n), 0);
  rep.fingerprint = run_fingerprint(m, t);

  std::vector<std::vector<VarId>> msg_children(static_cast<std::size_t>(n));
  for (VarId v = 0; v < n; ++v)
    if (t.parent[std::size_t(v)] != kNoVar)
      msg_children[std::size_t(t.parent[std::size_t(v)])].push_back(v);
  // consume children in processing order (latest position first)
  for (auto& ch : msg_children)
    std::sort(ch.begin(), ch.end(), [&](VarId a, VarId b) {
      return d.pos[std::size_t(a)] > d.pos[std::size_t(b)];
    });

  std::vector<std::vector<double>> msg(static_cast<std::size_t>(n));
  std::vector<char> msg_live(static_cast<std::size_t>(n), 0);
  std::vector<int> domain_sizes(static_cast<std::size_t>(n));
  for (VarId v = 0; v < n; ++v) domain_sizes[std::size_t(v)] = m.domain_size(v);

  long long live_entries = 0;
  auto bump_peak = [&] {
    rep.counters.peak_live_table_entries =
        std::max(rep.counters.peak_live_table_entries, live_entries);
  };

  // look-ahead bookkeeping: domains pruned by the propagation scheme run
  // over the flat relations of the unprocessed factors and live messages
  DomainMask mask = DomainMask::full(m);
  std::vector<char> factor_done(m.factors.size(), 0);
  auto run_propagation = [&] {
    if (!lah) return;
    std::vector<FlatRelation> rels;
    for (int fi = 0; fi < int(m.factors.size()); ++fi)
      if (!factor_done[std::size_t(fi)]) rels.push_back(flat_relation(m, fi));
    for (VarId v = 0; v < n; ++v) {
      if (!msg_live[std::size_t(v)]) continue;
      FlatRelation r;
      r.scope = ctx.sep[std::size_t(v)];
      r.allowed.resize(msg[std::size_t(v)].size());
      for (std::size_t i = 0; i < msg[std::size_t(v)].size(); ++i)
        r.allowed[i] = msg[std::size_t(v)][i] != 0.0 ? 1 : 0;
      rels.push_back(std::move(r));
    }
    std::optional<DomainMask> next;
    if (opts.lookahead == Lookahead::FC) {
      next = propagate_fc(rels, mask, m.evidence.size() == n ? m.evidence : Assignment(n),
                          domain_sizes);
    } else {
      next = propagate_ac(rels, mask, domain_sizes);
    }
    if (next) {
      mask = *next;
    } else {
      // provably no solution: nothing past this point can contribute
      for (auto& row : mask.allow) std::fill(row.begin(), row.end(), 0);
    }
  };

  run_propagation();

  double value = 0.0;
  Assignment a(n);
  for (int p = n - 1; p >= 0; --p) {
    VarId X = d.order[std::size_t(p)];
    const std::vector<VarId>& sep = ctx.sep[std::size_t(X)];
    std::vector<VarId> tup_vars = sep;
    tup_vars.push_back(X);

    std::vector<std::vector<int>> allowed;
    allowed.reserve(tup_vars.size());
    for (VarId v : tup_vars) allowed.push_back(mask.values(v));

    std::vector<double> out(static_cast<std::size_t>(sep_codec[std::size_t(X)].space()), 0.0);

    for (Odometer od(tup_vars, allowed); !od.done(); od.advance()) {
      od.write(a);
      bool skip = false;
      if (opts.zero_skip) {
        for (VarId c : msg_children[std::size_t(X)])
          if (msg[std::size_t(c)][std::size_t(sep_codec[std::size_t(c)].code_of(a))] == 0.0) {
            skip = true;
            break;
          }
      }
      if (!skip) {
        double raw = 1.0;
        for (int fi : bt.placed_factors[std::size_t(X)])
          raw *= evaluate_factor(m, fi, a);
        rep.counters.tuples_evaluated++;
        if (rep.tuples.add(X, tuple_codec[std::size_t(X)].code_of(a)))
          rep.trace.push_back({X, sep_codec[std::size_t(X)].code_of(a), a.value(X), raw});
        rep.nodes.add(X, and_codec[std::size_t(X)].code_of(a));
        double contrib = lift(task, raw);
        for (VarId c : msg_children[std::size_t(X)])
          contrib *= msg[std::size_t(c)][std::size_t(sep_codec[std::size_t(c)].code_of(a))];
        long long out_idx = sep_codec[std::size_t(X)].code_of(a);
        out[std::size_t(out_idx)] = marginalize(task, out[std::size_t(out_idx)], contrib);
      }
      od.clear(a);
    }

    msg[std::size_t(X)] = std::move(out);
    msg_live[std::size_t(X)] = 1;
    rep.counters.messages_stored++;
    live_entries += (long long)msg[std::size_t(X)].size();
    bump_peak();
    rep.messages.push_back({X, sep, msg[std::size_t(X)]});

    if (X == t.root) value = msg[std::size_t(X)][0];

    for (int fi : bt.placed_factors[std::size_t(X)]) factor_done[std::size_t(fi)] = 1;
    for (VarId c : msg_children[std::size_t(X)]) msg_live[std::size_t(c)] = 0;
    if (opts.forget_layers) {
      for (VarId c : msg_children[std::size_t(X)]) {
        live_entries -= (long long)msg[std::size_t(c)].size();
        msg[std::size_t(c)].clear();
        msg[std::size_t(c)].shrink_to_fit();
      }
    }
    run_propagation();
  }

  rep.value = value;
  return rep;
}

RunReport run_ve_lah(const Model& m, const Ordering& d, Task task, Lookahead prop) {
  VeOptions opts;
  opts.zero_skip = true;
  opts.lookahead = prop;
  return run_ve(m, d, task, opts);
}

CollapsedBucketTree collapse_dead_chains(const BucketTree& bt, const ContextTable& ctx) {
  PseudoTree t = pseudo_tree_of(bt);
  std::set<VarId> dead = dead_cache_vars(t, ctx);
  int n = t.var_count();

  CollapsedBucketTree out;
  out.tree = bt;
  out.bucket_of.resize(static_cast<std::size_t>(n));
  for (VarId v = 0; v < n; ++v) out.bucket_of[std::size_t(v)] = v;

  // a dead bucket folds into its parent when it is the parent's only child;
  // branch points keep their buckets so sibling subtrees stay decomposed
  std::vector<VarId> by_depth(static_cast<std::size_t>(n));
  for (int v = 0; v < n; ++v) by_depth[std::size_t(v)] = v;
  std::sort(by_depth.begin(), by_depth.end(), [&](VarId a, VarId b) {
    return t.depth[std::size_t(a)] < t.depth[std::size_t(b)];
  });

  for (VarId x : by_depth) {
    VarId p = t.parent[std::size_t(x)];
    if (p == kNoVar || !dead.count(x)) continue;
    if (t.children[std::size_t(p)].size() != 1) continue;
    out.bucket_of[std::size_t(x)] = out.bucket_of[std::size_t(p)];
  }

  // factors follow their bucket representative
  for (VarId v = 0; v < n; ++v) {
    VarId rep = out.bucket_of[std::size_t(v)];
    if (rep == v) continue;
    auto& from = out.tree.placed_factors[std::size_t(v)];
    auto& to = out.tree.placed_factors[std::size_t(rep)];
    to.insert(to.end(), from.begin(), from.end());
    from.clear();
    out.tree.message_scope[std::size_t(v)].clear();
  }
  std::set<VarId> reps(out.bucket_of.begin(), out.bucket_of.end());
  out.bucket_count = int(reps.size());
  return out;
}

}  // namespace andor
