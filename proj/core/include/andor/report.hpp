#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "andor/model.hpp"
#include "andor/structure.hpp"

namespace andor {

// Per-variable sets of context codes. A code is the row-major index of an
// assignment over the variable's canonical context order (root-to-leaf, the
// variable itself last and fastest). Tuple keys are coded over
// sep(X) + {X}, node keys over and_context(X).
struct KeySet {
  std::vector<std::set<long long>> by_var;

  explicit KeySet(int n = 0) : by_var(std::size_t(n)) {}
  // returns true if the key was new
  bool add(VarId v, long long code) { return by_var[std::size_t(v)].insert(code).second; }
  bool contains(VarId v, long long code) const {
    return by_var[std::size_t(v)].count(code) > 0;
  }
  long long total() const {
    long long t = 0;
    for (const auto& s : by_var) t += (long long)s.size();
    return t;
  }
  long long count(VarId v) const { return (long long)by_var[std::size_t(v)].size(); }
  bool operator==(const KeySet&) const = default;

  bool subset_of(const KeySet& o) const {
    for (std::size_t v = 0; v < by_var.size(); ++v)
      for (long long c : by_var[v])
        if (!o.by_var[v].count(c)) return false;
    return true;
  }
};

// Encoding helpers for canonical context assignments.
class ContextCodec {
 public:
  ContextCodec() = default;
  ContextCodec(const Model& m, const std::vector<VarId>& ctx_vars);

  long long code_of(const Assignment& a) const;      // all ctx vars assigned
  std::vector<int> values_of(long long code) const;  // per ctx var
  long long space() const { return space_; }
  const std::vector<VarId>& vars() const { return vars_; }

 private:
  std::vector<VarId> vars_;
  std::vector<int> sizes_;
  long long space_ = 1;
};

struct Counters {
  long long tuples_evaluated = 0;
  long long messages_stored = 0;
  long long peak_live_table_entries = 0;
  long long cache_hits = 0;
  long long cache_entries_stored = 0;  // entries held by live caches
  long long or_expansions = 0;         // distinct OR-node expansions
  bool operator==(const Counters&) const = default;
};

struct Message {
  VarId source = kNoVar;
  std::vector<VarId> scope;  // separator context, root-to-leaf
  std::vector<double> table;
  bool operator==(const Message&) const = default;
};

struct TraceRow {
  VarId var;
  long long sep_code;
  int value;
  double label;
  bool operator==(const TraceRow&) const = default;
};

struct RunReport {
  Task task = Task::SumProduct;
  double value = 0.0;
  KeySet tuples;  // explored TupleKeys
  KeySet nodes;   // explored NodeKeys
  Counters counters;
  std::vector<Message> messages;           // VE only
  std::vector<TraceRow> trace;             // first-time tuple recordings, in order
  std::vector<long long> cache_hits_by_var;
  std::vector<long long> cache_entries_by_var;
  std::vector<long long> and_visits_by_var;
  std::uint64_t fingerprint = 0;  // model + pseudo tree; guards compare()

  bool operator==(const RunReport&) const = default;
};

std::uint64_t run_fingerprint(const Model& m, const PseudoTree& t);

}  // namespace andor
