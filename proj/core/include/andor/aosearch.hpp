#pragma once

#include <optional>

#include "andor/elimination.hpp"
#include "andor/model.hpp"
#include "andor/report.hpp"
#include "andor/structure.hpp"

namespace andor {

enum class AoCaching { Full, None };

struct AoOptions {
  AoCaching caching = AoCaching::Full;
  Lookahead lookahead = Lookahead::None;
  bool nogood = false;  // graph-based no-good learning; subsumed by full caching
  bool gbj = false;     // graph-based backjumping (depth-first only)
  bool lookahead_uses_nogoods = false;  // requires lookahead != None, caching Full
};

// Product of the functions placed in the bucket of x (those whose deepest
// pseudo-tree scope variable is x), evaluated at a. Empty bucket gives 1.
double arc_label(const Model& m, const PseudoTree& t, VarId x, const Assignment& a);

// Depth-first traversal of the AND/OR space guided by t. With full caching
// the traversal covers the context-minimal graph, otherwise the AND/OR tree.
RunReport ao_df(const Model& m, const PseudoTree& t, Task task, AoOptions opts = {});

// Breadth-first explication of the same space, level by pseudo-tree depth
// (ties by variable id); values are computed bottom-up after expansion.
RunReport ao_bf(const Model& m, const PseudoTree& t, Task task, AoOptions opts = {});

// Value masks for constraint propagation.
struct DomainMask {
  std::vector<std::vector<char>> allow;

  static DomainMask full(const Model& m);
  bool allowed(VarId v, int x) const { return allow[std::size_t(v)][std::size_t(x)]; }
  void forbid(VarId v, int x) { allow[std::size_t(v)][std::size_t(x)] = 0; }
  int count(VarId v) const;
  std::vector<int> values(VarId v) const;
};

// Forward checking: one pass over the relations with exactly one unassigned
// variable; removes unsupported values of that variable. Empty domain of an
// unassigned variable means conflict (nullopt).
std::optional<DomainMask> propagate_fc(const std::vector<FlatRelation>& relations,
                                       const DomainMask& domains,
                                       const Assignment& a,
                                       const std::vector<int>& domain_sizes);

// Generalized arc consistency to fixpoint; assigned variables are
// conditioned by passing singleton domains.
std::optional<DomainMask> propagate_ac(const std::vector<FlatRelation>& relations,
                                       const DomainMask& domains,
                                       const std::vector<int>& domain_sizes);

}  // namespace andor
