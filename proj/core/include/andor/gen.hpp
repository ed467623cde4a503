#pragma once

#include <string>
#include <vector>

#include "andor/model.hpp"

namespace andor {

// Bundled model generators. Output is deterministic for a given spec; the
// random fills come from the documented 64-bit LCG.
struct GenSpec {
  std::string name;     // fig1 | fig4 | ex33 | ex34 | ex43 | random
  int n = 0;            // ex33 / ex43 / random
  int k = 2;            // random
  std::uint64_t seed = 1;
  bool uniform = false;
  double zero_frac = 0.0;  // random only: probability of an exact 0.0 entry
};

std::string gen_model_text(const GenSpec& spec);

// The ordering each generator is documented against (root first).
std::vector<VarId> gen_recommended_ordering(const std::string& name, int n);

}  // namespace andor
