#pragma once

#include <string>

#include "andor/model.hpp"
#include "andor/report.hpp"
#include "andor/structure.hpp"

namespace andor {

inline constexpr long long kSizeGuard = 10'000'000;

// Direct enumeration over all full assignments; guarded at kSizeGuard rows.
double brute_force_value(const Model& m, Task task);

// Structure-only context-minimal graph: every OR node (X, sep assignment),
// every AND node (X, and-context assignment), every bucket tuple, and the
// arcs between them, independent of factor values.
struct CmGraph {
  KeySet or_nodes;
  KeySet and_nodes;
  KeySet tuples;
  // arc OR(var, or_code) -> AND(var, and_code), one per tuple
  struct OrToAnd {
    VarId var;
    long long or_code;
    int value;
    long long and_code;
  };
  // arc AND(var, and_code) -> OR(child, child_or_code)
  struct AndToOr {
    VarId var;
    long long and_code;
    VarId child;
    long long child_or_code;
  };
  std::vector<OrToAnd> down_arcs;
  std::vector<AndToOr> child_arcs;
};

CmGraph build_cm(const Model& m, const PseudoTree& t, const ContextTable& ctx);

// Exhaustive-enumeration reference for the explored portions of the CM
// graph; independent of run_ve / ao_df / ao_bf.
//   ao_tuples: bucket tuples whose path to the variable admits a
//              prefix-consistent ancestor assignment
//   ve_tuples: bucket tuples where every child subtree is consistent below
//   bf_nodes:  nodes of the backtrack-free CM graph (tuples in both sets
//              that lie on some globally consistent solution)
struct ExploredSets {
  KeySet ao_tuples;
  KeySet ve_tuples;
  KeySet bf_nodes;
  KeySet ao_nodes;  // consistent AND expansions (nonzero arc label)
  KeySet ve_nodes;  // node projection of ve_tuples
};

ExploredSets oracle_explored_sets(const Model& m, const PseudoTree& t,
                                  const ContextTable& ctx);

enum class Relation { Identical, AStrictSubset, BStrictSubset, Incomparable };

const char* relation_name(Relation r);

struct CompareResult {
  Relation relation = Relation::Identical;
  long long only_a = 0;
  long long only_b = 0;
  long long both = 0;
};

// Def-3.1-style comparison of two runs over explored tuple sets. Throws if
// the reports come from different model/tree fingerprints.
CompareResult compare_reports(const RunReport& a, const RunReport& b);

// Deterministic DOT rendering of the CM graph. OR nodes are ellipses, AND
// nodes boxes; nodes missing from `marks` (when given) are dashed.
std::string export_dot(const Model& m, const PseudoTree& t, const ContextTable& ctx,
                       const CmGraph& cm, const RunReport* marks = nullptr);

}  // namespace andor
