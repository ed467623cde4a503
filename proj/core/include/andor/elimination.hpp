#pragma once

#include "andor/model.hpp"
#include "andor/report.hpp"
#include "andor/structure.hpp"

namespace andor {

enum class Lookahead { None, FC, AC };

struct VeOptions {
  bool forget_layers = false;
  bool zero_skip = true;
  Lookahead lookahead = Lookahead::None;
};

// Bucket elimination along d (buckets processed from the last position to
// position 0). The report's value is the root message scalar; explored
// tuples are the bucket tuples actually combined under the zero_skip rule.
// With lookahead != None this is the look-ahead variant: zero_skip is forced
// on and the propagation scheme runs over the flat relations of the
// remaining functions before the first bucket and after every bucket.
RunReport run_ve(const Model& m, const Ordering& d, Task task, VeOptions opts = {});

RunReport run_ve_lah(const Model& m, const Ordering& d, Task task, Lookahead prop);

// Result of collapsing chain-shaped dead-cache segments upward: a dead
// bucket whose parent has no other child is folded into the parent, so the
// clique-sized message between them is never materialised.
struct CollapsedBucketTree {
  BucketTree tree;               // surviving buckets keep their factors
  std::vector<VarId> bucket_of;  // representative bucket per variable
  int bucket_count = 0;
};

CollapsedBucketTree collapse_dead_chains(const BucketTree& bt, const ContextTable& ctx);

}  // namespace andor
